#!/usr/bin/env python3
"""Generate the bundled hourly price series for the merge replay scenario.

Synthetic magnitudes: ETH flat at 1600 USD, USDC at par, ETHW as a ratio of
ETH ramping toward ~3.6% into the fork then collapsing, stETH at a 3%
discount to ETH with two brief depeg dips in August 2022.
"""

import csv
import sys

START = 1660003200  # 2022-08-09 00:00 UTC
END = 1665792000    # 2022-10-15 00:00 UTC
FORK = 1663200000   # 2022-09-15 00:00 UTC
HOUR = 3600

ETH = 1600.0

# piecewise-linear anchors for the ETHW/ETH ratio
RATIO_ANCHORS = [
    (START, 0.027),
    (1661990400, 0.030),   # 1 Sep
    (1662163200, 0.031),   # 3 Sep
    (1662681600, 0.035),   # 9 Sep
    (1663113600, 0.036),   # 14 Sep
    (FORK, 0.036),
    (FORK + HOUR, 0.009),  # post-fork collapse
    (1664064000, 0.005),   # 25 Sep
    (END, 0.004),
]

STETH_DISCOUNT = 0.97
DIP1_LO, DIP1_HI, DIP1_FACTOR = 1660996800, 1661025600, 0.945   # 20 Aug 12:00-20:00
DIP2_LO, DIP2_HI, DIP2_FACTOR = 1661601600, 1661630400, 0.935   # 27 Aug 12:00-20:00


def interp(anchors, t):
    if t <= anchors[0][0]:
        return anchors[0][1]
    for (t0, v0), (t1, v1) in zip(anchors, anchors[1:]):
        if t <= t1:
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    return anchors[-1][1]


def steth_factor(t):
    if DIP1_LO <= t < DIP1_HI:
        return DIP1_FACTOR
    if DIP2_LO <= t < DIP2_HI:
        return DIP2_FACTOR
    return STETH_DISCOUNT


def main(out_path):
    with open(out_path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["timestamp", "asset", "price_usd"])
        for t in range(START, END + HOUR, HOUR):
            w.writerow([t, "ETH", f"{ETH:.2f}"])
            w.writerow([t, "USDC", "1.00"])
            w.writerow([t, "ETHW", f"{ETH * interp(RATIO_ANCHORS, t):.6f}"])
            w.writerow([t, "STETH", f"{ETH * steth_factor(t):.2f}"])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/merge_prices.csv")
