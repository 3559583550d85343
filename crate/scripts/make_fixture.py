"""Regenerates crates/core/data/covid_fixture.csv.

The fixture is synthetic: region names follow the US daily report, while
confirmed counts and death rates are chosen so that the number of regions
with rate <= theta* is 7, 26, 45 and 51 at theta* = 0.0100, 0.0144, 0.0198
and 0.0254.
"""
import csv
import math
import sys

NAMES = """Alabama Alaska Arizona Arkansas California Colorado Connecticut Delaware
District_of_Columbia Florida Georgia Hawaii Idaho Illinois Indiana Iowa Kansas
Kentucky Louisiana Maine Maryland Massachusetts Michigan Minnesota Mississippi
Missouri Montana Nebraska Nevada New_Hampshire New_Jersey New_Mexico New_York
North_Carolina North_Dakota Ohio Oklahoma Oregon Pennsylvania Rhode_Island
South_Carolina South_Dakota Tennessee Texas Utah Vermont Virginia Washington
West_Virginia Wisconsin Wyoming Puerto_Rico Guam Northern_Mariana_Islands
Virgin_Islands Diamond_Princess Grand_Princess""".split()

BANDS = [  # (count, low, high)
    (7, 0.0030, 0.0095),
    (19, 0.0106, 0.0139),
    (19, 0.0151, 0.0192),
    (6, 0.0206, 0.0247),
    (6, 0.0263, 0.0350),
]


def main(out):
    assert len(NAMES) == 57
    rates = []
    for count, lo, hi in BANDS:
        rates += [(lo + (hi - lo) * (j + 0.5) / count, lo, hi) for j in range(count)]
    # Interleave bands across regions with a fixed stride permutation.
    order = [(i * 23) % 57 for i in range(57)]
    assert sorted(order) == list(range(57))
    rows = []
    for i, name in enumerate(NAMES):
        rate, lo, hi = rates[order[i]]
        if name == "Diamond_Princess":
            confirmed = 49
        elif name == "Grand_Princess":
            confirmed = 103
        else:
            # Log-spread sizes between about 2e3 and 2e6.
            confirmed = int(round(math.exp(7.6 + 6.9 * ((i * 37) % 55) / 54)))
        # Small ships cannot hit every rate exactly; grow them until the
        # realized rate stays inside its band.
        while not lo <= round(rate * confirmed) / confirmed <= hi:
            confirmed += 1
        deaths = int(round(rate * confirmed))
        rows.append((name.replace("_", " "), confirmed, deaths))
    rows.append(("American Samoa", 0, 0))
    with open(out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["Province_State", "Confirmed", "Deaths"])
        w.writerows(rows)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/covid_fixture.csv")
