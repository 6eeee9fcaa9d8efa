"""Regenerate the bundled sample passenger dataset.

Writes ``src/vqcnoise/assets/titanic_sample.csv``: a deterministic synthetic
dataset in the Kaggle Titanic train.csv schema whose headline statistics
match the published aggregates of that file, so pipelines built against the
real data behave the same way here:

* 891 rows, 342 survivors / 549 non-survivors
* class sizes 216 / 184 / 491, sexes 577 male / 314 female
* survival counts per (sex, class): female 91/94, 70/76, 72/144;
  male 45/122, 17/108, 47/347
* 177 missing ages; Embarked 644 S / 168 C / 77 Q with 2 missing
* class-dependent fares and ages with a child-survival skew

Per-passenger values (names, tickets, exact ages and fares) are synthetic.
Supply a real Kaggle train.csv via ``--data`` / ``TITANIC_CSV`` for exact
replication studies.
"""

from __future__ import annotations

import csv
import os

import numpy as np

SEED = 1912
OUT = os.path.join(os.path.dirname(__file__), "..", "src", "vqcnoise",
                   "assets", "titanic_sample.csv")

HEADER = ("PassengerId", "Survived", "Pclass", "Name", "Sex", "Age", "SibSp",
          "Parch", "Ticket", "Fare", "Cabin", "Embarked")

# (sex, pclass) -> (survived, died) counts from the published contingency table
CELL_COUNTS = {
    ("female", 1): (91, 3),
    ("female", 2): (70, 6),
    ("female", 3): (72, 72),
    ("male", 1): (45, 77),
    ("male", 2): (17, 91),
    ("male", 3): (47, 300),
}

N_ROWS = 891
N_MISSING_AGE = 177
EMBARKED_COUNTS = {"S": 644, "C": 168, "Q": 77, None: 2}

AGE_MEAN_BY_CLASS = {1: 38.0, 2: 30.0, 3: 25.0}
AGE_STD_BY_CLASS = {1: 14.0, 2: 13.0, 3: 12.0}
FARE_MEDIAN_BY_CLASS = {1: 60.0, 2: 14.25, 3: 8.05}
FARE_LOGSTD_BY_CLASS = {1: 0.9, 2: 0.45, 3: 0.55}

FEMALE_NAMES = ("Mary", "Anna", "Margaret", "Elizabeth", "Bridget", "Alice",
                "Ellen", "Catherine", "Ada", "Helen")
MALE_NAMES = ("John", "William", "James", "George", "Thomas", "Charles",
              "Patrick", "Henry", "Edward", "Frederick")
SURNAMES = ("Hale", "Carter", "Reeves", "Morley", "Dunn", "Whitfield",
            "Soren", "Banfield", "Quinn", "Ashworth", "Keane", "Lowry",
            "Mercer", "Todd", "Vance", "Ingram", "Doyle", "Natt", "Olsen",
            "Price")


def _age(rng: np.random.Generator, pclass: int, survived: int) -> float:
    # survivors in classes 2 and 3 include a child component
    if survived and pclass > 1 and rng.random() < 0.15:
        age = rng.uniform(0.42, 15.0)
    else:
        age = rng.normal(AGE_MEAN_BY_CLASS[pclass], AGE_STD_BY_CLASS[pclass])
    age = float(np.clip(age, 0.42, 80.0))
    return round(age, 2) if age < 1.0 else float(int(round(age)))


def _fare(rng: np.random.Generator, pclass: int, survived: int) -> float:
    mu = np.log(FARE_MEDIAN_BY_CLASS[pclass])
    if survived and pclass == 1:
        mu += 0.25  # pricier cabins sat closer to the boat deck
    fare = float(np.exp(rng.normal(mu, FARE_LOGSTD_BY_CLASS[pclass])))
    return round(min(fare, 512.3292), 4)


def _name(rng: np.random.Generator, sex: str, pid: int) -> str:
    surname = SURNAMES[pid % len(SURNAMES)]
    if sex == "male":
        return f"{surname}, Mr. {MALE_NAMES[pid % len(MALE_NAMES)]}"
    title = "Mrs." if rng.random() < 0.5 else "Miss."
    return f"{surname}, {title} {FEMALE_NAMES[pid % len(FEMALE_NAMES)]}"


def build_rows() -> list[tuple]:
    rng = np.random.default_rng(SEED)
    passengers = []
    for (sex, pclass), (survived_n, died_n) in sorted(CELL_COUNTS.items()):
        passengers += [(sex, pclass, 1)] * survived_n
        passengers += [(sex, pclass, 0)] * died_n
    assert len(passengers) == N_ROWS
    order = rng.permutation(N_ROWS)
    passengers = [passengers[i] for i in order]

    missing_age = set(rng.choice(N_ROWS, size=N_MISSING_AGE, replace=False))
    embarked_pool = []
    for port, count in EMBARKED_COUNTS.items():
        embarked_pool += [port] * count
    embarked = [embarked_pool[i] for i in rng.permutation(N_ROWS)]

    rows = []
    for idx, (sex, pclass, survived) in enumerate(passengers):
        pid = idx + 1
        age = "" if idx in missing_age else _age(rng, pclass, survived)
        sibsp = int(rng.choice([0, 1, 2, 3, 4], p=[0.68, 0.21, 0.06, 0.03, 0.02]))
        parch = int(rng.choice([0, 1, 2, 3], p=[0.76, 0.13, 0.08, 0.03]))
        cabin = ""
        if pclass == 1 and rng.random() < 0.75:
            cabin = f"{'ABCDE'[int(rng.integers(5))]}{int(rng.integers(2, 130))}"
        rows.append((pid, survived, pclass, _name(rng, sex, pid), sex, age,
                     sibsp, parch, f"T{100000 + pid}",
                     _fare(rng, pclass, survived), cabin,
                     embarked[idx] or ""))
    return rows


def main() -> None:
    rows = build_rows()
    path = os.path.normpath(OUT)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        writer.writerows(rows)
    print(f"wrote {len(rows)} rows to {path}")


if __name__ == "__main__":
    main()
