#!/usr/bin/env python3
"""Writes data/example_prices.csv: two synthetic weeks of hourly prices in EUR/MWh."""
import math
import random
import sys

rng = random.Random(7)
out = sys.argv[1] if len(sys.argv) > 1 else "data/example_prices.csv"
with open(out, "w") as f:
    f.write("timestamp,price_eur_per_mwh\n")
    for t in range(14 * 24):
        day, hour = divmod(t, 24)
        daily = 25 * math.sin(2 * math.pi * (hour - 9) / 24) + 15 * math.sin(4 * math.pi * hour / 24)
        weekly = 20 * math.sin(2 * math.pi * t / 168)
        price = 80 + daily + weekly + rng.gauss(0, 8)
        if rng.random() < 0.02:
            price = -rng.uniform(0, 40)
        f.write(f"2024-01-{day + 1:02d}T{hour:02d}:00,{price:.2f}\n")
