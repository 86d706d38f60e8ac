"""Cross-architecture agreement sweeps.

Every machine is run lane-parallel over a set of operand pairs and checked
against ``math.gcd`` semantics (``numpy.gcd``) and the cycle law
``cycles == subtractive steps + 2``.  Pairs whose step count does not fit the
cycle budget must time out instead; any other outcome is a mismatch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .machines import ArchVariant, build_machine, default_max_cycles, gcd_reference, run_batch

__all__ = ["Mismatch", "VariantSummary", "SweepResult", "exhaustive_pairs", "random_pairs",
           "boundary_pairs", "sweep", "EXHAUSTIVE_MAX_WIDTH", "VERIFY_CYCLE_BUDGET"]

EXHAUSTIVE_MAX_WIDTH = 10
VERIFY_CYCLE_BUDGET = 4096


@dataclass(frozen=True)
class Mismatch:
    variant: str
    a: int
    b: int
    expected_g: int
    got_g: int
    expected_cycles: int
    got_cycles: int


@dataclass
class VariantSummary:
    variant: str
    checked: int = 0
    over_budget: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)


@dataclass
class SweepResult:
    width: int
    pairs: int
    max_cycles: int
    summaries: list[VariantSummary]

    @property
    def mismatch_count(self) -> int:
        return sum(len(s.mismatches) for s in self.summaries)

    @property
    def ok(self) -> bool:
        return self.mismatch_count == 0


def exhaustive_pairs(width: int):
    if width > EXHAUSTIVE_MAX_WIDTH:
        raise ValueError(f"exhaustive sweeps are limited to width <= {EXHAUSTIVE_MAX_WIDTH}")
    vals = np.arange(1, 1 << width, dtype=np.uint64)
    a, b = np.meshgrid(vals, vals, indexing="ij")
    return a.ravel(), b.ravel()


def random_pairs(width: int, count: int, seed: int):
    rng = np.random.default_rng(seed)
    hi = np.uint64((1 << width) - 1) if width < 64 else np.uint64(2**64 - 1)
    a = rng.integers(1, hi, size=count, dtype=np.uint64, endpoint=True)
    b = rng.integers(1, hi, size=count, dtype=np.uint64, endpoint=True)
    return a, b


def boundary_pairs(width: int, include_zero: bool = False):
    """Extremes, equal and off-by-one pairs."""
    top = (1 << width) - 1
    base = sorted({1, 2, 3, top // 2, top // 2 + 1, top - 1, top} | ({0} if include_zero else set()))
    base = [v for v in base if 0 <= v <= top]
    pairs = set()
    for v in base:
        pairs.add((v, v))
        for w in base:
            pairs.add((v, w))
        for d in (-1, 1):
            if 0 <= v + d <= top:
                pairs.add((v, v + d))
                pairs.add((v + d, v))
    if not include_zero:
        pairs = {p for p in pairs if p[0] and p[1]}
    ordered = sorted(pairs)
    return (np.array([p[0] for p in ordered], dtype=np.uint64),
            np.array([p[1] for p in ordered], dtype=np.uint64))


def sweep(width: int, a, b, variants: Sequence[ArchVariant | str] = tuple(ArchVariant),
          max_cycles: int | None = None) -> SweepResult:
    if max_cycles is None:
        max_cycles = min(default_max_cycles(width), VERIFY_CYCLE_BUDGET)
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    expected_g = np.gcd(a, b)
    steps = np.fromiter((gcd_reference(int(x), int(y))[1] for x, y in zip(a, b)),
                        dtype=np.int64, count=a.shape[0])
    expected_cycles = steps + 2
    fits = expected_cycles <= max_cycles
    summaries = []
    for v in variants:
        v = ArchVariant(v)
        res = run_batch(build_machine(v, width), a, b, max_cycles)
        good_fit = (~res.timed_out) & (res.g == expected_g) & (res.cycles == expected_cycles)
        ok = np.where(fits, good_fit, res.timed_out)
        summary = VariantSummary(v.value, checked=int(fits.sum()), over_budget=int((~fits).sum()))
        for i in np.flatnonzero(~ok):
            summary.mismatches.append(Mismatch(
                v.value, int(a[i]), int(b[i]), int(expected_g[i]), int(res.g[i]),
                int(expected_cycles[i]), int(res.cycles[i])))
        summaries.append(summary)
    return SweepResult(width=width, pairs=int(a.shape[0]), max_cycles=max_cycles, summaries=summaries)
