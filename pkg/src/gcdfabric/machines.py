"""Cycle-accurate GCD machines.

Four architectures share one controller (Idle -> Load -> Run* -> Done) and three
registers X, Y, R:

* ``for-loop``: behavioral subtractive Euclid on host integers, no netlist.
* ``gcd2sub``: comparator (lookahead carry for ``gt``, NOR over ``X xor Y`` for
  ``eq``), ripple-borrow subtractors ``X-Y`` and ``Y-X``, 2:1 multiplexers.
* ``gcdsad``: one SAD block with native gates plus multiplexers.
* ``optimized-gcdsad``: the same datapath built from NAND gates only.

Load latches the operands (cycle 0).  Each later cycle evaluates the datapath
on the current registers: if ``eq`` is set the controller copies X into R and
moves to Done, otherwise the register holding the larger value is overwritten
with the difference.  A pair needing ``s`` subtractions therefore takes
``s + 2`` cycles.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import bitplanes
from .carry import build_carry_out
from .netlist import GateStats, Netlist, NetlistBuilder, simulate, stats
from .sad import Mode, sad_netlist

__all__ = [
    "ArchVariant", "FsmState", "TraceRecord", "CycleTrace", "Machine", "RunResult", "BatchResult",
    "DomainError", "CycleLimitExceeded", "gcd_reference", "build_machine", "run", "run_batch",
    "default_max_cycles",
]

REG_X = ("reg", "x")
REG_Y = ("reg", "y")

MAX_CYCLES_CAP = 1 << 20


class DomainError(ValueError):
    """Operand outside the machine's domain (zero, or too wide)."""


class CycleLimitExceeded(RuntimeError):
    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class ArchVariant(str, Enum):
    FOR_LOOP = "for-loop"
    GCD2SUB = "gcd2sub"
    GCDSAD = "gcdsad"
    OPTIMIZED_GCDSAD = "optimized-gcdsad"

    @property
    def structural(self) -> bool:
        return self is not ArchVariant.FOR_LOOP


class FsmState(str, Enum):
    IDLE = "Idle"
    LOAD = "Load"
    RUN = "Run"
    DONE = "Done"


@dataclass(frozen=True)
class TraceRecord:
    cycle: int
    state: FsmState
    x: int
    y: int


@dataclass
class CycleTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def to_csv(self, header: bool = True) -> str:
        lines = ["cycle,state,X,Y"] if header else []
        lines += [f"{r.cycle},{r.state.value},{r.x},{r.y}" for r in self.records]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RunResult:
    g: int
    cycles: int
    trace: CycleTrace


@dataclass
class BatchResult:
    g: np.ndarray
    cycles: np.ndarray
    timed_out: np.ndarray


def gcd_reference(a: int, b: int) -> tuple[int, int]:
    """Subtractive Euclid: returns ``(gcd, number of subtraction updates)``.

    Consecutive subtractions of the same operand are counted in one go, so large
    quotients (e.g. ``(1, 2**32 - 1)``) cost nothing extra.
    """
    if a < 1 or b < 1:
        raise DomainError(f"operands must be >= 1, got ({a}, {b})")
    steps = 0
    while a != b:
        if a > b:
            k = (a - 1) // b
            a -= k * b
        else:
            k = (b - 1) // a
            b -= k * a
        steps += k
    return a, steps


def default_max_cycles(width: int) -> int:
    """Enough for any pair at ``width`` bits, capped at 2**20."""
    return min((1 << width) + 2, MAX_CYCLES_CAP)


# -- datapath construction -----------------------------------------------------


def _mux_netlist(width, nand_only, name):
    bld = NetlistBuilder(name, nand_only=nand_only, width_hint=width)
    x = bld.add_input("x", width)
    y = bld.add_input("y", width)
    x_alt = bld.add_input("x_alt", width)
    y_alt = bld.add_input("y_alt", width)
    sel = bld.add_input("sel", 1)[0]
    sel_n = bld.not_(sel)
    bld.add_output("x_next", [bld.mux(sel, xa, xo, sel_n) for xa, xo in zip(x_alt, x)])
    bld.add_output("y_next", [bld.mux(sel, yo, ya, sel_n) for yo, ya in zip(y, y_alt)])
    return bld.finalize()


def _subtractor_netlist(width, name):
    """Ripple-borrow ``a - b`` modulo ``2**width``."""
    bld = NetlistBuilder(name, width_hint=width)
    a = bld.add_input("a", width)
    b = bld.add_input("b", width)
    borrow = bld.const0
    diff = []
    for i, (x, y) in enumerate(zip(a, b)):
        t = bld.xor_(x, y)
        diff.append(bld.xor_(t, borrow))
        if i != width - 1:
            borrow = bld.or_(bld.and_(bld.not_(x), y), bld.and_(bld.not_(t), borrow))
    bld.add_output("diff", diff)
    return bld.finalize()


def _comparator_netlist(width, name):
    bld = NetlistBuilder(name, width_hint=width)
    a = bld.add_input("a", width)
    b = bld.add_input("b", width)
    bld.add_output("gt", build_carry_out(bld, a, b))
    bld.add_output("eq", bld.nor_all([bld.xor_(x, y) for x, y in zip(a, b)]))
    return bld.finalize()


@functools.lru_cache(maxsize=None)
def _datapath(variant: ArchVariant, width: int):
    """(blocks, wiring, next_x, next_y, done) shared by machines of one kind."""
    if variant is ArchVariant.FOR_LOOP:
        return {}, {}, None, None, None
    if variant is ArchVariant.GCD2SUB:
        blocks = {
            "comparator": _comparator_netlist(width, f"cmp{width}"),
            "sub_xy": _subtractor_netlist(width, f"sub{width}_xy"),
            "sub_yx": _subtractor_netlist(width, f"sub{width}_yx"),
            "mux": _mux_netlist(width, False, f"mux{width}"),
        }
        wiring = {
            "comparator": {"a": REG_X, "b": REG_Y},
            "sub_xy": {"a": REG_X, "b": REG_Y},
            "sub_yx": {"a": REG_Y, "b": REG_X},
            "mux": {"x": REG_X, "y": REG_Y, "x_alt": ("sub_xy", "diff"),
                    "y_alt": ("sub_yx", "diff"), "sel": ("comparator", "gt")},
        }
        return blocks, wiring, ("mux", "x_next"), ("mux", "y_next"), ("comparator", "eq")
    nand_only = variant is ArchVariant.OPTIMIZED_GCDSAD
    mode = Mode.NAND_ONLY if nand_only else Mode.MIXED
    blocks = {
        "sad": sad_netlist(width, mode),
        "mux": _mux_netlist(width, nand_only, f"mux{width}_{mode.value}"),
    }
    wiring = {
        "sad": {"a": REG_X, "b": REG_Y},
        "mux": {"x": REG_X, "y": REG_Y, "x_alt": ("sad", "diff"), "y_alt": ("sad", "diff"),
                "sel": ("sad", "gt")},
    }
    return blocks, wiring, ("mux", "x_next"), ("mux", "y_next"), ("sad", "eq")


# -- machine -------------------------------------------------------------------


@dataclass(eq=False)
class Machine:
    """Datapath netlists plus controller state.

    ``wiring[block][input_group]`` names the source of each block input: a
    register (``("reg", "x")``) or an earlier block's output group.
    """

    variant: ArchVariant
    width: int
    blocks: dict[str, Netlist]
    wiring: dict[str, dict[str, tuple[str, str]]]
    next_x: tuple[str, str] | None = None
    next_y: tuple[str, str] | None = None
    done: tuple[str, str] | None = None
    x: int = 0
    y: int = 0
    r: int = 0
    state: FsmState = FsmState.IDLE
    trace: CycleTrace = field(default_factory=CycleTrace)

    @property
    def behavioral(self) -> bool:
        return not self.variant.structural

    @property
    def nand_only(self) -> bool:
        return bool(self.blocks) and all(nl.nand_only for nl in self.blocks.values())

    def stats(self) -> dict[str, GateStats]:
        return {name: stats(nl) for name, nl in self.blocks.items()}

    # datapath evaluation

    def _signals(self, x_planes, y_planes):
        sig = {REG_X: x_planes, REG_Y: y_planes}
        for name, nl in self.blocks.items():
            ins = {grp: sig[src] for grp, src in self.wiring[name].items()}
            for grp, planes in simulate(nl, ins).items():
                sig[(name, grp)] = planes
        return sig

    def step_datapath(self, x: int, y: int) -> tuple[int, int, bool]:
        """One combinational evaluation: ``(x_next, y_next, eq)``."""
        if self.behavioral:
            if x == y:
                return x, y, True
            return (x - y, y, False) if x > y else (x, y - x, False)
        sig = self._signals(bitplanes.pack_int(x, self.width), bitplanes.pack_int(y, self.width))
        return (bitplanes.unpack_int(sig[self.next_x]), bitplanes.unpack_int(sig[self.next_y]),
                bool(bitplanes.unpack_int(sig[self.done])))

    def datapath(self, x: np.ndarray, y: np.ndarray):
        """Lane-parallel :meth:`step_datapath` over ``uint64`` arrays."""
        if self.behavioral:
            eq = x == y
            gt = x > y
            return np.where(gt, x - y, x), np.where(gt | eq, y, y - x), eq
        n = x.shape[0]
        sig = self._signals(bitplanes.pack(x, self.width), bitplanes.pack(y, self.width))
        return (bitplanes.unpack(sig[self.next_x], n), bitplanes.unpack(sig[self.next_y], n),
                bitplanes.lane_mask(sig[self.done][0], n))

    # controller

    def _check_operands(self, a, b):
        for v in (a, b):
            if v < 1:
                raise DomainError(f"operands must be >= 1, got ({a}, {b})")
            if v >> self.width:
                raise DomainError(f"operand {v} does not fit in {self.width} bits")

    def reset(self) -> None:
        self.x = self.y = self.r = 0
        self.state = FsmState.IDLE
        self.trace = CycleTrace()

    def _record(self):
        rec = TraceRecord(len(self.trace), self.state, self.x, self.y)
        self.trace.records.append(rec)
        return rec

    def load(self, a: int, b: int) -> TraceRecord:
        if self.state is not FsmState.IDLE:
            raise RuntimeError(f"load in state {self.state.value}; reset first")
        self._check_operands(a, b)
        self.x, self.y = a, b
        self.state = FsmState.LOAD
        return self._record()

    def step(self) -> TraceRecord | None:
        """Advance one clock; returns the new record, or None once Done."""
        if self.state is FsmState.IDLE:
            raise RuntimeError("step before load")
        if self.state is FsmState.DONE:
            return None
        nx, ny, eq = self.step_datapath(self.x, self.y)
        if eq:
            self.r = self.x
            self.state = FsmState.DONE
        else:
            self.x, self.y = nx, ny
            self.state = FsmState.RUN
        return self._record()

    def run(self, a: int, b: int, max_cycles: int | None = None) -> RunResult:
        if max_cycles is None:
            max_cycles = default_max_cycles(self.width)
        if max_cycles < 2:
            raise ValueError("max_cycles must be >= 2")
        self.reset()
        self.load(a, b)
        while self.state is not FsmState.DONE:
            if len(self.trace) >= max_cycles:
                raise CycleLimitExceeded(
                    f"{self.variant.value}: no result within {max_cycles} cycles", self.trace)
            self.step()
        return RunResult(g=self.r, cycles=len(self.trace), trace=self.trace)


def build_machine(variant: ArchVariant | str, width: int) -> Machine:
    variant = ArchVariant(variant)
    if not isinstance(width, int) or width < 1:
        raise ValueError(f"unsupported width {width!r}")
    blocks, wiring, nx, ny, done = _datapath(variant, width)
    return Machine(variant, width, dict(blocks), {k: dict(v) for k, v in wiring.items()}, nx, ny, done)


def run(machine: Machine, a: int, b: int, max_cycles: int | None = None) -> RunResult:
    return machine.run(a, b, max_cycles)


def run_batch(machine: Machine, a, b, max_cycles: int | None = None) -> BatchResult:
    """Run many operand pairs in lockstep (width <= 64).

    Lanes drop out as they finish.  Lanes still running at ``max_cycles`` are
    flagged in ``timed_out`` and report ``g = 0``, ``cycles = -1``.
    """
    if machine.width > 64:
        raise ValueError("batched runs support widths up to 64")
    if max_cycles is None:
        max_cycles = default_max_cycles(machine.width)
    a = np.asarray(a, dtype=np.uint64).reshape(-1)
    b = np.asarray(b, dtype=np.uint64).reshape(-1)
    if a.shape != b.shape:
        raise ValueError("operand arrays differ in length")
    if np.any(a == 0) or np.any(b == 0):
        raise DomainError("operands must be >= 1")
    if machine.width < 64 and (np.any(a >> np.uint64(machine.width)) or np.any(b >> np.uint64(machine.width))):
        raise DomainError(f"operands do not fit in {machine.width} bits")
    n = a.shape[0]
    g = np.zeros(n, dtype=np.uint64)
    cycles = np.full(n, -1, dtype=np.int64)
    timed_out = np.zeros(n, dtype=bool)
    if machine.behavioral:
        _lockstep_values(machine, a, b, max_cycles, g, cycles, timed_out)
    else:
        _lockstep_planes(machine, a, b, max_cycles, g, cycles, timed_out)
    return BatchResult(g=g, cycles=cycles, timed_out=timed_out)


def _lockstep_values(machine, a, b, max_cycles, g, cycles, timed_out):
    idx = np.arange(a.shape[0])
    x, y = a.copy(), b.copy()
    cycle = 0
    while idx.size:
        cycle += 1
        if cycle >= max_cycles:
            timed_out[idx] = True
            return
        nx, ny, eq = machine.datapath(x, y)
        if eq.any():
            g[idx[eq]] = x[eq]
            cycles[idx[eq]] = cycle + 1
            keep = ~eq
            idx, x, y = idx[keep], nx[keep], ny[keep]
        else:
            x, y = nx, ny


def _lockstep_planes(machine, a, b, max_cycles, g, cycles, timed_out):
    # Registers stay packed between cycles.  Finished lanes keep evolving but are
    # masked out by ``active``; lanes are repacked once half of them are finished.
    width = machine.width
    idx = np.arange(a.shape[0])
    x, y = bitplanes.pack(a, width), bitplanes.pack(b, width)
    active = bitplanes.pack(np.ones(a.shape[0], dtype=np.uint64), 1)[0]
    live = idx.size
    cycle = 0
    while live:
        cycle += 1
        if cycle >= max_cycles:
            timed_out[idx[bitplanes.lane_mask(active, idx.size)]] = True
            return
        sig = machine._signals(x, y)
        fin = sig[machine.done][0] & active
        if fin.any():
            lanes = np.flatnonzero(bitplanes.lane_mask(fin, idx.size))
            g[idx[lanes]] = bitplanes.gather(x, lanes)
            cycles[idx[lanes]] = cycle + 1
            active = active & ~fin
            live -= lanes.size
        x, y = sig[machine.next_x], sig[machine.next_y]
        if live and live * 2 <= idx.size and idx.size > 64:
            keep = bitplanes.lane_mask(active, idx.size)
            idx = idx[keep]
            x = bitplanes.pack(bitplanes.unpack(x, keep.size)[keep], width)
            y = bitplanes.pack(bitplanes.unpack(y, keep.size)[keep], width)
            active = bitplanes.pack(np.ones(idx.size, dtype=np.uint64), 1)[0]
