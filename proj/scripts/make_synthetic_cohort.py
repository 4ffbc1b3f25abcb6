#!/usr/bin/env python3
"""Deterministic generator for data/heart_failure_clinical_records.csv.

The original 299-patient heart-failure records file is not redistributed in
this repository. This script builds a synthetic stand-in with the same schema
and the same published cohort structure so the pipeline and its tests run out
of the box:

  * 299 rows, 105 women / 194 men, 96 death events (majority share 203/299)
  * the eight widely printed sample rows appear verbatim as rows 1..8
  * every feature spans exactly its documented interval
  * death risk depends on ejection fraction, serum creatinine, and age, so a
    classifier can beat the majority-class baseline
  * death events cluster at shorter follow-up times, giving an increasing,
    flattening cumulative curve

Swap in the real file (same header) to run everything on the original data.
"""

import math
import random

HEADER = (
    "age,anaemia,creatinine_phosphokinase,diabetes,ejection_fraction,"
    "high_blood_pressure,platelets,serum_creatinine,serum_sodium,sex,"
    "smoking,time,DEATH_EVENT"
)

# The eight sample rows, all death events, follow-up days 4..10.
FIXED_ROWS = [
    "75,0,582,0,20,1,265000,1.9,130,1,0,4,1",
    "55,0,7861,0,38,0,263358,1.1,136,1,0,6,1",
    "65,0,146,0,20,0,162000,1.3,129,1,1,7,1",
    "50,1,111,0,20,0,210000,1.9,137,1,0,7,1",
    "65,1,160,1,20,0,327000,2.7,116,0,0,8,1",
    "90,1,47,0,40,1,204000,2.1,132,1,1,8,1",
    "75,1,246,0,15,0,127000,1.2,137,1,0,10,1",
    "60,1,315,1,60,0,454000,1.1,131,1,1,10,1",
]

TOTAL_ROWS = 299
TOTAL_WOMEN = 105       # fixed rows contribute 1
TOTAL_DEATHS = 96       # fixed rows contribute 8

RANGES = {
    "age": (40, 95),
    "creatinine_phosphokinase": (23, 7861),
    "ejection_fraction": (14, 80),
    "platelets": (25100, 850000),
    "serum_creatinine": (0.5, 9.4),
    "serum_sodium": (114, 148),
    "time": (4, 285),
}


def clip(value, feature):
    lo, hi = RANGES[feature]
    return max(lo, min(hi, value))


def fmt(value):
    if isinstance(value, float) and not value.is_integer():
        return repr(round(value, 3))
    return str(int(value))


def main():
    rng = random.Random(20260810)
    n = TOTAL_ROWS - len(FIXED_ROWS)

    rows = []
    for i in range(n):
        age = clip(round(rng.gauss(60.8, 11.9)), "age")
        if rng.random() < 0.04:  # the source data carries a few fractional ages
            age = clip(int(age) + 0.667, "age")
        anaemia = 1 if rng.random() < 0.43 else 0
        cpk = clip(round(math.exp(rng.gauss(math.log(250.0), 1.0))),
                   "creatinine_phosphokinase")
        diabetes = 1 if rng.random() < 0.42 else 0
        ef = clip(5 * round(rng.gauss(38.0, 11.8) / 5), "ejection_fraction")
        hbp = 1 if rng.random() < 0.35 else 0
        platelets = clip(1000 * round(rng.gauss(263.0, 95.0)), "platelets")
        if rng.random() < 0.08:  # imputation artifact value seen in the source
            platelets = 263358.03
        creatinine = clip(round(math.exp(rng.gauss(math.log(1.1), 0.35)), 1),
                          "serum_creatinine")
        sodium = clip(round(rng.gauss(136.6, 4.4)), "serum_sodium")
        smoking = 1 if rng.random() < 0.32 else 0
        rows.append({
            "age": age, "anaemia": anaemia, "creatinine_phosphokinase": cpk,
            "diabetes": diabetes, "ejection_fraction": ef,
            "high_blood_pressure": hbp, "platelets": platelets,
            "serum_creatinine": creatinine, "serum_sodium": sodium,
            "smoking": smoking,
        })

    # Pin every documented interval endpoint so the observed feature ranges
    # match the documented ones exactly.
    pins = [
        ("age", 40), ("age", 95),
        ("creatinine_phosphokinase", 23), ("creatinine_phosphokinase", 7861),
        ("ejection_fraction", 14), ("ejection_fraction", 80),
        ("platelets", 25100), ("platelets", 850000),
        ("serum_creatinine", 0.5), ("serum_creatinine", 9.4),
        ("serum_sodium", 114), ("serum_sodium", 148),
    ]
    for k, (feature, value) in enumerate(pins):
        rows[k * 7][feature] = value

    # Sex: 104 more women among the synthetic rows.
    women = [True] * (TOTAL_WOMEN - 1) + [False] * (n - (TOTAL_WOMEN - 1))
    rng.shuffle(women)
    for row, is_woman in zip(rows, women):
        row["sex"] = 0 if is_woman else 1

    # Risk score drives the death label: low ejection fraction, high serum
    # creatinine, and age dominate, with enough noise to keep it non-trivial.
    def risk(row):
        return (
            -2.1 * (row["ejection_fraction"] - 38.0) / 11.8
            + 2.3 * (math.log(row["serum_creatinine"]) - math.log(1.1)) / 0.35
            + 0.8 * (row["age"] - 60.8) / 11.9
            + 0.5 * row["anaemia"]
            - 0.4 * (row["serum_sodium"] - 136.6) / 4.4
            + rng.gauss(0.0, 1.1)
        )

    scores = [(risk(row), idx) for idx, row in enumerate(rows)]
    scores.sort(reverse=True)
    dead = set(idx for _, idx in scores[: TOTAL_DEATHS - len(FIXED_ROWS)])

    # Follow-up: deaths skew early, survivors late; day 285 must be attained.
    for idx, row in enumerate(rows):
        if idx in dead:
            t = 4 + round(281 * rng.betavariate(1.1, 2.4))
        else:
            t = 4 + round(281 * rng.betavariate(2.2, 1.2))
        row["time"] = clip(t, "time")
        row["DEATH_EVENT"] = 1 if idx in dead else 0
    max_time_row = max(range(n), key=lambda i: rows[i]["time"])
    rows[max_time_row]["time"] = 285

    columns = HEADER.split(",")
    lines = [HEADER] + FIXED_ROWS
    for row in rows:
        lines.append(",".join(fmt(row[c]) for c in columns))

    # structural self-checks before writing
    assert len(lines) - 1 == TOTAL_ROWS
    women_count = sum(1 for line in lines[1:] if line.split(",")[9] == "0")
    deaths_count = sum(1 for line in lines[1:] if line.split(",")[12] == "1")
    assert women_count == TOTAL_WOMEN, women_count
    assert deaths_count == TOTAL_DEATHS, deaths_count
    for line in lines[1:]:
        cells = line.split(",")
        for name, (lo, hi) in RANGES.items():
            value = float(cells[columns.index(name)])
            assert lo <= value <= hi, (name, value)

    with open("data/heart_failure_clinical_records.csv", "w", newline="") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {TOTAL_ROWS} rows: {women_count} women, {deaths_count} deaths")


if __name__ == "__main__":
    main()
