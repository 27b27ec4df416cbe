"""Reference operating characteristics bundled for the comparison report.

Values come from the published simulation study these nine designs were
benchmarked in (10 scenarios, 2000 replications, target rate 0.3, maximum 60
patients).  ``best``/``worst`` flags reproduce that study's per-scenario
highlighting.  The "early_stop" table covers the four designs re-run with a
12-patient-per-dose stopping rule.
"""

from __future__ import annotations

from dataclasses import dataclass

METRICS = ("S_C", "S_OT", "A_C", "A_OT")
SCENARIO_COUNT = 10

# design id -> metric -> one value per scenario 1..10
MAIN_TABLE: dict[str, dict[str, tuple[float, ...]]] = {
    "i2d": {
        "S_C": (0.43, 0.71, 0.41, 0.90, 0.86, 0.34, 0.59, 0.11, 0.15, 0.43),
        "S_OT": (0.18, 0.18, 0.18, 0.10, 0.00, 0.29, 0.07, 0.26, 0.39, 0.32),
        "A_C": (0.38, 0.57, 0.45, 0.71, 0.58, 0.23, 0.50, 0.07, 0.05, 0.33),
        "A_OT": (0.29, 0.27, 0.19, 0.29, 0.00, 0.27, 0.16, 0.37, 0.35, 0.31),
    },
    "copula": {
        "S_C": (0.53, 0.60, 0.52, 0.10, 0.90, 0.44, 0.65, 0.15, 0.32, 0.26),
        "S_OT": (0.32, 0.19, 0.36, 0.09, 0.00, 0.43, 0.22, 0.58, 0.55, 0.63),
        "A_C": (0.33, 0.57, 0.31, 0.72, 0.46, 0.29, 0.41, 0.12, 0.31, 0.09),
        "A_OT": (0.17, 0.13, 0.19, 0.28, 0.00, 0.18, 0.13, 0.31, 0.23, 0.41),
    },
    "hierarchy": {
        "S_C": (0.61, 0.64, 0.62, 0.61, 0.81, 0.45, 0.45, 0.30, 0.47, 0.52),
        "S_OT": (0.22, 0.18, 0.21, 0.16, 0.00, 0.30, 0.31, 0.30, 0.17, 0.20),
        "A_C": (0.42, 0.48, 0.43, 0.59, 0.68, 0.31, 0.35, 0.21, 0.30, 0.35),
        "A_OT": (0.34, 0.31, 0.31, 0.28, 0.00, 0.36, 0.35, 0.40, 0.29, 0.38),
    },
    "pocrm": {
        "S_C": (0.75, 0.71, 0.69, 0.78, 0.54, 0.59, 0.56, 0.59, 0.52, 0.58),
        "S_OT": (0.12, 0.24, 0.08, 0.22, 0.00, 0.11, 0.19, 0.17, 0.18, 0.26),
        "A_C": (0.53, 0.53, 0.47, 0.64, 0.33, 0.37, 0.43, 0.35, 0.30, 0.36),
        "A_OT": (0.16, 0.32, 0.11, 0.36, 0.00, 0.15, 0.24, 0.24, 0.21, 0.38),
    },
    "dfcomb": {
        "S_C": (0.54, 0.76, 0.66, 0.65, 0.54, 0.33, 0.69, 0.48, 0.15, 0.47),
        "S_OT": (0.18, 0.08, 0.17, 0.06, 0.00, 0.27, 0.09, 0.27, 0.57, 0.32),
        "A_C": (0.23, 0.45, 0.37, 0.91, 0.39, 0.16, 0.33, 0.23, 0.13, 0.16),
        "A_OT": (0.11, 0.05, 0.14, 0.09, 0.00, 0.14, 0.08, 0.23, 0.25, 0.23),
    },
    "gcrm": {
        "S_C": (0.69, 0.65, 0.71, 0.42, 0.81, 0.59, 0.67, 0.34, 0.47, 0.55),
        "S_OT": (0.15, 0.13, 0.13, 0.10, 0.00, 0.18, 0.10, 0.31, 0.11, 0.33),
        "A_C": (0.46, 0.45, 0.49, 0.75, 0.69, 0.36, 0.46, 0.27, 0.29, 0.36),
        "A_OT": (0.27, 0.27, 0.24, 0.25, 0.00, 0.29, 0.21, 0.34, 0.23, 0.42),
    },
    "cboin": {
        "S_C": (0.70, 0.69, 0.70, 0.62, 0.72, 0.58, 0.74, 0.38, 0.40, 0.45),
        "S_OT": (0.16, 0.21, 0.15, 0.17, 0.00, 0.19, 0.13, 0.21, 0.13, 0.31),
        "A_C": (0.43, 0.49, 0.40, 0.72, 0.43, 0.34, 0.46, 0.21, 0.26, 0.20),
        "A_OT": (0.20, 0.27, 0.18, 0.28, 0.00, 0.22, 0.20, 0.27, 0.21, 0.39),
    },
    "ckeyboard": {
        "S_C": (0.67, 0.70, 0.70, 0.60, 0.72, 0.56, 0.71, 0.38, 0.40, 0.45),
        "S_OT": (0.17, 0.21, 0.14, 0.17, 0.00, 0.20, 0.14, 0.21, 0.12, 0.31),
        "A_C": (0.42, 0.49, 0.40, 0.72, 0.43, 0.33, 0.44, 0.21, 0.25, 0.20),
        "A_OT": (0.20, 0.27, 0.17, 0.28, 0.00, 0.22, 0.21, 0.27, 0.20, 0.38),
    },
    "bcrm": {
        "S_C": (0.72, 0.75, 0.66, 0.76, 0.52, 0.51, 0.63, 0.51, 0.37, 0.50),
        "S_OT": (0.08, 0.22, 0.05, 0.24, 0.00, 0.11, 0.15, 0.20, 0.20, 0.38),
        "A_C": (0.41, 0.51, 0.36, 0.67, 0.24, 0.24, 0.32, 0.23, 0.15, 0.22),
        "A_OT": (0.13, 0.28, 0.06, 0.33, 0.00, 0.12, 0.19, 0.25, 0.19, 0.35),
    },
}

EARLY_STOP_TABLE: dict[str, dict[str, tuple[float, ...]]] = {
    "pocrm": {
        "S_C": (0.61, 0.50, 0.58, 0.70, 0.43, 0.45, 0.49, 0.44, 0.39, 0.40),
        "S_OT": (0.17, 0.34, 0.09, 0.31, 0.00, 0.15, 0.22, 0.23, 0.21, 0.38),
        "A_C": (0.41, 0.39, 0.34, 0.56, 0.19, 0.26, 0.36, 0.22, 0.20, 0.23),
        "A_OT": (0.16, 0.42, 0.09, 0.44, 0.00, 0.13, 0.22, 0.26, 0.19, 0.43),
    },
    "dfcomb": {
        "S_C": (0.27, 0.21, 0.50, 0.79, 0.46, 0.24, 0.41, 0.27, 0.14, 0.19),
        "S_OT": (0.10, 0.02, 0.14, 0.02, 0.00, 0.13, 0.03, 0.20, 0.25, 0.12),
        "A_C": (0.15, 0.24, 0.29, 0.93, 0.26, 0.12, 0.22, 0.14, 0.12, 0.07),
        "A_OT": (0.09, 0.03, 0.13, 0.07, 0.00, 0.11, 0.06, 0.23, 0.27, 0.22),
    },
    "cboin": {
        "S_C": (0.56, 0.56, 0.57, 0.63, 0.63, 0.47, 0.62, 0.32, 0.36, 0.35),
        "S_OT": (0.20, 0.25, 0.17, 0.24, 0.00, 0.22, 0.18, 0.26, 0.18, 0.40),
        "A_C": (0.31, 0.40, 0.28, 0.69, 0.26, 0.24, 0.34, 0.15, 0.19, 0.14),
        "A_OT": (0.18, 0.26, 0.15, 0.31, 0.00, 0.20, 0.20, 0.26, 0.21, 0.40),
    },
    "ckeyboard": {
        "S_C": (0.50, 0.51, 0.54, 0.61, 0.60, 0.41, 0.54, 0.27, 0.33, 0.22),
        "S_OT": (0.21, 0.24, 0.18, 0.25, 0.00, 0.24, 0.20, 0.29, 0.24, 0.46),
        "A_C": (0.29, 0.39, 0.27, 0.69, 0.25, 0.22, 0.31, 0.14, 0.18, 0.10),
        "A_OT": (0.17, 0.24, 0.14, 0.31, 0.00, 0.19, 0.20, 0.25, 0.21, 0.43),
    },
}

# (design, metric) -> scenarios flagged among the best (green) / worst (red)
MAIN_BEST: dict[tuple[str, str], tuple[int, ...]] = {
    ("i2d", "S_C"): (4,),
    ("copula", "S_C"): (5,),
    ("pocrm", "S_C"): (1, 8),
    ("pocrm", "S_OT"): (3, 6, 8),
    ("dfcomb", "S_OT"): (2,),
    ("bcrm", "S_OT"): (1, 3, 6),
    ("i2d", "A_C"): (2,),
    ("copula", "A_C"): (2,),
    ("pocrm", "A_C"): (1, 8),
    ("dfcomb", "A_C"): (4,),
    ("pocrm", "A_OT"): (3,),
    ("dfcomb", "A_OT"): (1, 2, 4, 7),
    ("bcrm", "A_OT"): (3, 6),
}

MAIN_WORST: dict[tuple[str, str], tuple[int, ...]] = {
    ("i2d", "S_C"): (1, 3, 6, 8, 9),
    ("copula", "S_C"): (1, 3, 4, 8, 10),
    ("hierarchy", "S_C"): (7,),
    ("pocrm", "S_C"): (5,),
    ("dfcomb", "S_C"): (1, 5, 6, 9),
    ("bcrm", "S_C"): (5,),
    ("i2d", "S_OT"): (9,),
    ("copula", "S_OT"): (1, 3, 6, 8, 9, 10),
    ("hierarchy", "S_OT"): (7,),
    ("pocrm", "S_OT"): (4,),
    ("dfcomb", "S_OT"): (9,),
    ("bcrm", "S_OT"): (4,),
    ("i2d", "A_C"): (8, 9),
    ("copula", "A_C"): (3, 10),
    ("hierarchy", "A_C"): (7,),
    ("pocrm", "A_C"): (5,),
    ("dfcomb", "A_C"): (1, 6, 7, 9, 10),
    ("bcrm", "A_C"): (5, 7, 9),
    ("i2d", "A_OT"): (9,),
    ("hierarchy", "A_OT"): (1, 3, 6, 7),
}

EARLY_STOP_BEST: dict[tuple[str, str], tuple[int, ...]] = {
    ("pocrm", "S_C"): (1, 8, 10),
    ("dfcomb", "S_C"): (4,),
    ("cboin", "S_C"): (5, 7),
    ("ckeyboard", "S_C"): (5,),
    ("pocrm", "S_OT"): (3,),
    ("dfcomb", "S_OT"): (1, 2, 4, 7, 10),
    ("pocrm", "A_C"): (1, 8, 10),
    ("dfcomb", "A_C"): (4,),
    ("dfcomb", "A_OT"): (1, 2, 4, 7, 10),
}

EARLY_STOP_WORST: dict[tuple[str, str], tuple[int, ...]] = {
    ("dfcomb", "S_C"): (1, 2, 6, 7, 9, 10),
    ("pocrm", "S_OT"): (2,),
    ("pocrm", "A_C"): (4,),
    ("dfcomb", "A_C"): (1, 2, 6, 7, 10),
    ("pocrm", "A_OT"): (2, 4),
}


@dataclass(frozen=True)
class ReferenceCell:
    design_id: str
    scenario: int  # 1-based
    metric: str
    value: float
    best: bool
    worst: bool


def reference_cells(table: str = "main") -> list[ReferenceCell]:
    if table == "main":
        values, best, worst = MAIN_TABLE, MAIN_BEST, MAIN_WORST
    elif table == "early_stop":
        values, best, worst = EARLY_STOP_TABLE, EARLY_STOP_BEST, EARLY_STOP_WORST
    else:
        raise ValueError(f"unknown reference table '{table}'")
    cells = []
    for design, metrics in values.items():
        for metric, vals in metrics.items():
            for idx, v in enumerate(vals, start=1):
                cells.append(
                    ReferenceCell(
                        design,
                        idx,
                        metric,
                        v,
                        idx in best.get((design, metric), ()),
                        idx in worst.get((design, metric), ()),
                    )
                )
    return cells


def reference_value(design_id: str, scenario: int, metric: str, table: str = "main") -> float:
    src = MAIN_TABLE if table == "main" else EARLY_STOP_TABLE
    return src[design_id][metric][scenario - 1]
