"""Regenerate the 12-node synthetic governance fixture in src/multinet/data/fixture12.

Shareholding and board files are written literally; prices come from a
seeded three-factor return model.  Run from the repository root.
"""
import csv
import datetime as dt
import json
from pathlib import Path

import numpy as np

OUT = Path("src/multinet/data/fixture12")
NAMES = ["Alfa", "Bravo", "Charlie", "Delta", "Echo", "Foxtrot",
         "Golf", "Hotel", "India", "Juliett", "Kilo", "Lima"]

SHAREHOLDING = [
    ("Alfa", "Bravo", 0.10), ("Bravo", "Charlie", 0.25), ("Charlie", "Alfa", 0.05),
    ("Alfa", "Delta", 0.04), ("Delta", "Echo", 0.30), ("Foxtrot", "Golf", 0.51),
    ("Golf", "Hotel", 0.12), ("Hotel", "Alfa", 0.03), ("India", "Alfa", 0.08),
    ("Alfa", "Juliett", 0.06), ("Lima", "India", 0.50), ("Bravo", "Alfa", 0.015),
    ("Kilo", "Alfa", 0.01), ("Alfa", "Kilo", 0.019), ("Echo", "Echo", 0.20),
    ("Golf", "Foxtrot", 0.02),
]
BOARD = {
    "Alfa": ["d01", "d02"], "Bravo": ["d02", "d12"], "Charlie": ["d11", "d12"],
    "Delta": ["d03", "d04", "d05"], "Echo": ["d01", "d05"], "Foxtrot": ["d03"],
    "Golf": ["d06"], "Hotel": ["d07"], "India": ["d10"], "Juliett": ["d08"],
    "Kilo": ["d08"], "Lima": ["d09"],
}
# tickers loading on the "bank" factor / the "energy" factor
# and a third factor shared by Foxtrot and Golf only
LOADINGS = {"Alfa": (1.0, 0, 0), "Bravo": (1.0, 0, 0), "Charlie": (0.9, 0, 0),
            "Delta": (0, 1.0, 0), "Echo": (0, 1.0, 0),
            "Foxtrot": (0, 0.3, 0.8), "Golf": (0, 0.3, 0.8)}
MISSING = [("Hotel", 5), ("Kilo", 17), ("Kilo", 18), ("Alfa", 30)]


def main(seed=20130430, days=80):
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "shareholding.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["src", "dst", "weight"])
        w.writerows(SHAREHOLDING)
    with open(OUT / "board.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["company", "director"])
        for company, directors in BOARD.items():
            for d in directors:
                w.writerow([company, d])
    rng = np.random.default_rng(seed)
    factors = rng.normal(0, 0.01, size=(days - 1, 3))
    rets = np.empty((days - 1, len(NAMES)))
    for c, name in enumerate(NAMES):
        load = np.array(LOADINGS.get(name, (0, 0, 0)))
        scale = 0.004 if load.max() >= 0.9 else (0.0075 if load.any() else 0.0085)
        rets[:, c] = factors @ load + rng.normal(0, scale, days - 1)
    prices = 10.0 * np.vstack([np.ones(len(NAMES)), np.cumprod(1 + rets, axis=0)])
    dates, d = [], dt.date(2012, 5, 2)
    while len(dates) < days:
        if d.weekday() < 5:
            dates.append(d)
        d += dt.timedelta(days=1)
    cells = [[f"{p:.6f}" for p in row] for row in prices]
    for name, t in MISSING:
        cells[t][NAMES.index(name)] = ""
    with open(OUT / "prices.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date"] + NAMES)
        for day, row in zip(dates, cells):
            w.writerow([day.isoformat()] + row)
    expected = {
        "union_scc": NAMES[:8],
        "sh_dropped_below_threshold": [["Bravo", "Alfa"], ["Kilo", "Alfa"], ["Alfa", "Kilo"]],
        "sh_dropped_self_loops": [["Echo", "Echo"]],
        "sh_kept_at_threshold": [["Golf", "Foxtrot"]],
        "corr_edges": [["Alfa", "Bravo"], ["Alfa", "Charlie"], ["Bravo", "Charlie"], ["Delta", "Echo"]],
        "corr_near_miss": [["Foxtrot", "Golf"]],
    }
    (OUT / "expected.json").write_text(json.dumps(expected, indent=1) + "\n")


if __name__ == "__main__":
    main()
