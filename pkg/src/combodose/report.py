"""Comparison report: join simulated operating characteristics against the
bundled reference values, with per-cell deltas and best/worst flags."""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .engine import MetricsRow
from .reference import METRICS, reference_cells


@dataclass(frozen=True)
class ComparisonCell:
    design_id: str
    scenario: int
    metric: str
    simulated: float
    reference: float
    delta: float
    best: bool
    worst: bool

    @property
    def within_band(self) -> bool:
        return abs(self.delta) <= 0.05


def scenario_number(name: str) -> Optional[int]:
    """Scenario names map to reference columns by their trailing integer
    (e.g. 'sc07' or 'scenario-7' -> 7)."""
    m = re.search(r"(\d+)\s*$", name)
    if not m:
        return None
    num = int(m.group(1))
    return num if 1 <= num <= 10 else None


def compare(rows: Sequence[MetricsRow], table: str = "main") -> tuple[list[ComparisonCell], list[str]]:
    """Join result rows with the reference table; unmatched rows produce
    warnings instead of cells."""
    ref = {(c.design_id, c.scenario, c.metric): c for c in reference_cells(table)}
    cells = []
    warnings = []
    for row in rows:
        num = scenario_number(row.scenario_id)
        if num is None:
            warnings.append(f"scenario '{row.scenario_id}' has no trailing number; row omitted")
            continue
        values = {"S_C": row.s_c, "S_OT": row.s_ot, "A_C": row.a_c, "A_OT": row.a_ot}
        matched = False
        for metric in METRICS:
            key = (row.design_id, num, metric)
            if key in ref:
                matched = True
                c = ref[key]
                cells.append(
                    ComparisonCell(
                        row.design_id, num, metric, values[metric], c.value,
                        values[metric] - c.value, c.best, c.worst,
                    )
                )
        if not matched:
            warnings.append(
                f"no reference values for design '{row.design_id}' scenario {num}; row omitted"
            )
    return cells, warnings


def comparison_csv(cells: Sequence[ComparisonCell], warnings: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    buf.write("design,scenario,metric,simulated,reference,delta,best,worst,within_band\n")
    for c in sorted(cells, key=lambda c: (c.design_id, c.scenario, METRICS.index(c.metric))):
        buf.write(
            f"{c.design_id},{c.scenario},{c.metric},{c.simulated:.4f},{c.reference:.4f},"
            f"{c.delta:+.4f},{int(c.best)},{int(c.worst)},{int(c.within_band)}\n"
        )
    for w in warnings:
        buf.write(f"# warning: {w}\n")
    return buf.getvalue()


def comparison_markdown(cells: Sequence[ComparisonCell], warnings: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    buf.write("# Comparison against reference operating characteristics\n\n")
    if warnings:
        for w in warnings:
            buf.write(f"> warning: {w}\n")
        buf.write("\n")
    designs = sorted({c.design_id for c in cells})
    for design in designs:
        buf.write(f"## {design}\n\n")
        buf.write("| scenario | metric | simulated | reference | delta | flags | within 0.05 |\n")
        buf.write("|---|---|---|---|---|---|---|\n")
        sub = [c for c in cells if c.design_id == design]
        for c in sorted(sub, key=lambda c: (c.scenario, METRICS.index(c.metric))):
            flags = "best" if c.best else ("worst" if c.worst else "")
            buf.write(
                f"| {c.scenario} | {c.metric} | {c.simulated:.3f} | {c.reference:.3f} "
                f"| {c.delta:+.3f} | {flags} | {'yes' if c.within_band else 'no'} |\n"
            )
        buf.write("\n")
    return buf.getvalue()
