"""Technology-independent area / delay / ADP estimates for GCD machines.

Area is the weighted gate census over every datapath netlist.  Delay is the
weighted critical path from the X/Y registers back to the register inputs (or
the ``eq`` flag), following the block wiring, so the multiplexers sit in series
with the SAD block or with the slower of comparator and subtractors.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .machines import REG_X, REG_Y, ArchVariant, Machine, build_machine
from .netlist import DEFAULT_AREA, GateStats, Kind, path_delays, stats

__all__ = ["CostWeights", "CostReport", "Comparison", "cost", "percent_reduction", "compare",
           "SCHEMA_VERSION"]

SCHEMA_VERSION = 1

FOR_LOOP_NOTE = (
    "for-loop is behavioral: no structural cost, reductions against it are not applicable. "
    "Reference ADPs 1727 vs 9462437.935 give a 99.98% reduction (1 - 1727/9462437.935), not 81%."
)


@dataclass(frozen=True)
class CostWeights:
    area: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_AREA))
    delay: Mapping[str, float] = field(default_factory=lambda: {k.name: 1.0 for k in Kind})

    def __post_init__(self):
        for table_name, table in (("area", self.area), ("delay", self.delay)):
            for kind, w in table.items():
                if kind not in Kind.__members__:
                    raise ValueError(f"unknown gate kind {kind!r} in {table_name} weights")
                if not (isinstance(w, (int, float)) and math.isfinite(w) and w > 0):
                    raise ValueError(f"{table_name} weight for {kind} must be > 0, got {w!r}")
            missing = set(Kind.__members__) - set(table)
            if missing:
                raise ValueError(f"{table_name} weights missing {sorted(missing)}")

    @classmethod
    def from_dict(cls, data: Mapping) -> "CostWeights":
        """Overrides on top of the defaults.

        Accepts ``{"area": {...}, "delay": {...}}`` or a flat ``{"NAND": 1, ...}``
        mapping, which is read as area weights.
        """
        if not isinstance(data, Mapping):
            raise ValueError("weights must be a JSON object")
        if set(data) <= {"area", "delay"}:
            area_over, delay_over = data.get("area", {}), data.get("delay", {})
        else:
            area_over, delay_over = data, {}
        if not isinstance(area_over, Mapping) or not isinstance(delay_over, Mapping):
            raise ValueError("area/delay weights must be JSON objects")
        base = cls()
        return cls(area={**base.area, **area_over}, delay={**base.delay, **delay_over})

    def to_dict(self):
        return {"area": dict(self.area), "delay": dict(self.delay)}


@dataclass(frozen=True)
class CostReport:
    variant: ArchVariant
    width: int
    area: float | None
    delay: float | None
    adp: float | None
    census: GateStats | None
    blocks: dict[str, GateStats]
    behavioral: bool

    def to_dict(self):
        return {
            "variant": self.variant.value,
            "width": self.width,
            "area": self.area,
            "delay": self.delay,
            "adp": self.adp,
            "behavioral_flag": self.behavioral,
            "census": None if self.census is None else {
                "counts": self.census.counts, "depth": self.census.depth,
                "nand_equivalent_area": self.census.nand_equivalent_area},
            "blocks": {name: {"counts": s.counts, "depth": s.depth} for name, s in self.blocks.items()},
        }


def _critical_path(machine: Machine, gate_delay) -> float:
    arrival = {REG_X: [0.0] * machine.width, REG_Y: [0.0] * machine.width}
    for name, nl in machine.blocks.items():
        ins = {grp: arrival[src] for grp, src in machine.wiring[name].items()}
        for grp, times in path_delays(nl, gate_delay, ins).items():
            arrival[(name, grp)] = times
    ends = [arrival[s] for s in (machine.next_x, machine.next_y, machine.done) if s is not None]
    if not ends:
        ends = [t for key, t in arrival.items() if key not in (REG_X, REG_Y)]
    return max((max(t) for t in ends if t), default=0.0)


def cost(machine: Machine, weights: CostWeights | None = None) -> CostReport:
    weights = weights or CostWeights()
    if machine.behavioral:
        return CostReport(machine.variant, machine.width, None, None, None, None, {}, True)
    blocks = machine.stats()
    counts: dict[str, int] = {}
    for s in blocks.values():
        for k, c in s.counts.items():
            counts[k] = counts.get(k, 0) + c
    area = float(sum(weights.area[k] * c for k, c in counts.items()))
    delay = float(_critical_path(machine, weights.delay))
    depth = int(_critical_path(machine, None))
    census = GateStats(counts=dict(sorted(counts.items())), depth=depth,
                       nand_equivalent_area=sum(DEFAULT_AREA[k] * c for k, c in counts.items()))
    return CostReport(machine.variant, machine.width, area, delay, area * delay, census, blocks, False)


def percent_reduction(adp_opt: float, adp_other: float) -> float:
    """ADP saving of ``adp_opt`` relative to ``adp_other``, in percent."""
    if not adp_other > 0:
        raise ValueError(f"reference ADP must be positive, got {adp_other}")
    return 100.0 * (adp_other - adp_opt) / adp_other


@dataclass
class Comparison:
    width: int
    weights: CostWeights
    reports: list[CostReport]
    reductions: list[float | None]
    notes: list[str]

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "width": self.width,
            "weights": self.weights.to_dict(),
            "reports": [dict(r.to_dict(), reduction_vs_first=red)
                        for r, red in zip(self.reports, self.reductions)],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["variant", "area", "delay", "adp", "reduction_vs_first", "behavioral_flag"])
        for r, red in zip(self.reports, self.reductions):
            w.writerow([r.variant.value, _fmt(r.area), _fmt(r.delay), _fmt(r.adp),
                        "" if red is None else f"{red:.2f}", str(r.behavioral).lower()])
        return buf.getvalue()

    def to_text(self) -> str:
        head = f"{'variant':<18}{'area':>10}{'delay':>8}{'adp':>12}{'%red':>9}  gates"
        lines = [f"width {self.width}", head, "-" * len(head)]
        for r, red in zip(self.reports, self.reductions):
            gates = "behavioral" if r.behavioral else ", ".join(
                f"{k}={v}" for k, v in r.census.counts.items())
            red_s = "-" if red is None else f"{red:.2f}"
            lines.append(f"{r.variant.value:<18}{_fmt(r.area, '-'):>10}{_fmt(r.delay, '-'):>8}"
                         f"{_fmt(r.adp, '-'):>12}{red_s:>9}  {gates}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _fmt(v, missing=""):
    return missing if v is None else f"{v:g}"


def compare(variants: Sequence[ArchVariant | str], width: int,
            weights: CostWeights | None = None) -> Comparison:
    """Cost every variant; reductions are of the first variant's ADP against each other one."""
    weights = weights or CostWeights()
    reports = [cost(build_machine(v, width), weights) for v in variants]
    reductions: list[float | None] = [None]
    first = reports[0] if reports else None
    for r in reports[1:]:
        if first.behavioral or r.behavioral or not r.adp:
            reductions.append(None)
        else:
            reductions.append(percent_reduction(first.adp, r.adp))
    reductions = reductions[:len(reports)]
    notes = []
    if any(r.behavioral for r in reports):
        notes.append(FOR_LOOP_NOTE)
    return Comparison(width, weights, reports, reductions, notes)
