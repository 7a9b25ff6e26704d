#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under data/fixtures.

    python3 tools/make_fixtures.py [output_dir]
"""

import csv
import random
import statistics
import sys
from pathlib import Path

ECONOMIES = [
    "ARG", "AUS", "BGD", "BRA", "CAN", "CHN", "COL", "DEU", "DZA", "EGY",
    "ESP", "ETH", "FRA", "GBR", "IDN", "IND", "IRN", "ITA", "JPN", "KAZ",
    "KEN", "KOR", "MAR", "MEX", "MYS", "NGA", "NLD", "PAK", "PER", "PHL",
    "POL", "PRY", "ROU", "RUS", "SAU", "SEN", "THA", "TUR", "UKR", "URY",
    "USA", "VNM", "ZAF", "CHL", "BEL", "SDN", "YEM", "IRQ", "VEN", "CUB",
]
STAPLES = {"Wheat": "wheat", "Rice, milled": "rice", "Maize": "maize", "Soya beans": "soybeans"}
KCAL = {"wheat": 3.34e6, "rice": 3.60e6, "maize": 3.65e6, "soybeans": 4.16e6}


def raw_trade(out: Path) -> None:
    rows = [
        ("USA", "JPN", "Wheat", 2022, "tonnes", 2500000),
        ("USA", "MEX", "Maize", 2022, "tonnes", 15000000),
        ("BRA", "CHN", "Soya beans", 2022, "tonnes", 54000000),
        ("IND", "BGD", "Rice, milled", 2022, "tonnes", 2300000),
        ("RUS", "EGY", "Wheat", 2022, "tonnes", 8000000),
        ("UKR", "EGY", "Maize", 2022, "tonnes", 1200000),
        ("ARG", "VNM", "Maize", 2022, "tonnes", 3000000),
        ("THA", "CHN", "Rice, milled", 2022, "tonnes", 800000),
        ("USA", "CHN", "Soya beans", 2021, "tonnes", 29000000),
        ("CAN", "IDN", "Wheat", 2021, "tonnes", 2100000),
        ("FRA", "DZA", "Barley", 2022, "tonnes", 900000),
        ("AUS", "IDN", "Wheat", 2022, "tonnes", 0),
    ]
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["reporter", "partner", "item", "year", "unit", "value"])
        w.writerows(rows)


def layered_flows(out_dir: Path, rng: random.Random) -> None:
    """Four staple layers over the same economies; every layer touches every
    economy, so each layer is a strict sub-network of the aggregate."""
    for year in (2021, 2022):
        flows = []
        for item in STAPLES:
            exporters = rng.sample(ECONOMIES, 8)
            pairs = set()
            # Every economy imports from at least one exporter.
            for importer in ECONOMIES:
                src = rng.choice([e for e in exporters if e != importer])
                pairs.add((src, importer))
            for _ in range(30):
                a, b = rng.sample(ECONOMIES, 2)
                pairs.add((a, b))
            for src, dst in sorted(pairs):
                tonnes = round(rng.lognormvariate(11, 1.5))
                flows.append((src, dst, item, year, tonnes))
        path = out_dir / f"staples_{year}.csv"
        with path.open("w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["reporter", "partner", "item", "year", "unit", "value"])
            for src, dst, item, y, t in flows:
                w.writerow([src, dst, item, y, "tonnes", t])


def determinants(out: Path, rng: random.Random) -> None:
    """R = 0.5 + 2 * BDI + noise, with BDI already at mean 0 and sample sd 1."""
    years = list(range(1986, 2023))
    n = len(years)

    def zscores(values):
        m, s = statistics.mean(values), statistics.stdev(values)
        return [(v - m) / s for v in values]

    bdi = zscores([rng.gauss(0, 1) for _ in range(n)])
    others = {name: [rng.gauss(loc, scale) for _ in range(n)]
              for name, loc, scale in [("GPR", 100, 20), ("GND", 5e4, 8e3), ("FPI", 95, 15),
                                       ("OPU", 120, 40), ("PROD", 2.6e9, 2e8)]}
    r = [0.5 + 2.0 * b + rng.gauss(0, 0.1) for b in bdi]
    with out.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["year", "R", "BDI", *others])
        for i, year in enumerate(years):
            row = [year, repr(r[i]), repr(bdi[i])] + [repr(others[k][i]) for k in others]
            if year == 1990:
                row[3] = "NA"
            w.writerow(row)


def main() -> None:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20220601)
    raw_trade(out_dir / "trade_raw.csv")
    layered_flows(out_dir, rng)
    determinants(out_dir / "determinants.csv", rng)


if __name__ == "__main__":
    main()
