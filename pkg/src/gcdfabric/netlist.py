"""Combinational netlists over 2-input gates.

A :class:`NetlistBuilder` appends gates in topological order and is frozen into an
immutable :class:`Netlist` by :meth:`NetlistBuilder.finalize`.  In ``nand_only``
mode the NOT/AND/OR/XOR/NOR builders expand into NAND gates using the usual
identities::

    NOT a   = a NAND a
    a AND b = (a NAND b) NAND (a NAND b)
    a OR b  = (a NAND a) NAND (b NAND b)
    a XOR b = (a NAND t) NAND (t NAND b),  t = a NAND b

Evaluation is bit-parallel: every net carries one bit per stimulus ("lane"),
packed 64 lanes per ``uint64`` word.  See :mod:`gcdfabric.bitplanes`.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import bitplanes
from ._engine import Program, run_program

__all__ = [
    "Kind", "NetId", "Gate", "Netlist", "NetlistBuilder", "GateStats", "NetlistError",
    "evaluate", "evaluate_many", "simulate", "stats", "export", "loads", "loads_all",
    "path_delays", "DEFAULT_AREA",
]


class NetlistError(ValueError):
    """Structural problem: foreign net, width mismatch, bad format, cycle."""


class Kind(enum.IntEnum):
    NAND = 0
    AND = 1
    OR = 2
    XOR = 3
    NOT = 4
    NOR = 5


# Relative area in NAND2 units; cost_model reuses these as its defaults.
DEFAULT_AREA = {"NAND": 1.0, "NOT": 1.0, "AND": 1.5, "OR": 1.5, "XOR": 2.5, "NOR": 1.5}

CONST0 = 0
CONST1 = 1

_owner_ids = itertools.count(1)


@dataclass(frozen=True)
class NetId:
    """Handle for one net; only valid for the builder that issued it."""

    index: int
    owner: int = field(repr=False)


@dataclass(frozen=True)
class Gate:
    kind: Kind
    inputs: tuple[int, ...]
    output: int


@dataclass(frozen=True)
class GateStats:
    counts: dict[str, int]
    depth: int
    nand_equivalent_area: float

    @property
    def total(self) -> int:
        return sum(self.counts.values())


class Netlist:
    """Finalized, immutable netlist.

    Net 0 is constant 0, net 1 is constant 1.  ``inputs`` and ``outputs`` map a
    group name to its nets, least significant bit first.
    """

    def __init__(self, name, n_nets, inputs, outputs, gates, nand_only, width_hint):
        self.name = name
        self.n_nets = n_nets
        self.inputs: dict[str, tuple[int, ...]] = dict(inputs)
        self.outputs: dict[str, tuple[int, ...]] = dict(outputs)
        self.gates: tuple[Gate, ...] = tuple(gates)
        self.nand_only = nand_only
        self.width_hint = width_hint
        self._check()
        in_rows = [n for nets in self.inputs.values() for n in nets]
        out_rows = [n for nets in self.outputs.values() for n in nets]
        self.program = Program(
            ops=[int(g.kind) for g in self.gates],
            a=[g.inputs[0] for g in self.gates],
            b=[g.inputs[-1] for g in self.gates],
            out=[g.output for g in self.gates],
            n_nets=n_nets,
            in_rows=in_rows,
            out_rows=out_rows,
        )

    def _check(self):
        defined = [False] * self.n_nets
        defined[CONST0] = defined[CONST1] = True
        for nets in self.inputs.values():
            for n in nets:
                if defined[n]:
                    raise NetlistError(f"net {n} has more than one driver")
                defined[n] = True
        for i, g in enumerate(self.gates):
            for n in g.inputs:
                if not defined[n]:
                    raise NetlistError(f"gate {i} reads net {n} before it is driven")
            if defined[g.output]:
                raise NetlistError(f"net {g.output} has more than one driver")
            defined[g.output] = True
            if self.nand_only and g.kind != Kind.NAND:
                raise NetlistError(f"gate {i} is {g.kind.name} in a nand_only netlist")
        for name, nets in self.outputs.items():
            if not all(defined[n] for n in nets):
                raise NetlistError(f"output {name} references an undriven net")

    def __repr__(self):
        return (f"Netlist({self.name!r}, gates={len(self.gates)}, "
                f"inputs={ {k: len(v) for k, v in self.inputs.items()} }, "
                f"outputs={ {k: len(v) for k, v in self.outputs.items()} }, nand_only={self.nand_only})")

    def input_width(self, name):
        return len(self.inputs[name])

    def output_width(self, name):
        return len(self.outputs[name])


class NetlistBuilder:
    """Single-writer builder; call :meth:`finalize` once done."""

    def __init__(self, name="netlist", nand_only=False, width_hint=0):
        self.name = name
        self.nand_only = nand_only
        self.width_hint = width_hint
        self._owner = next(_owner_ids)
        self._n_nets = 2
        self._inputs: dict[str, tuple[int, ...]] = {}
        self._outputs: dict[str, tuple[int, ...]] = {}
        self._gates: list[Gate] = []
        self._final = False

    # -- nets -------------------------------------------------------------

    @property
    def const0(self) -> NetId:
        return NetId(CONST0, self._owner)

    @property
    def const1(self) -> NetId:
        return NetId(CONST1, self._owner)

    def _new_net(self) -> int:
        self._n_nets += 1
        return self._n_nets - 1

    def _idx(self, net) -> int:
        if not isinstance(net, NetId) or net.owner != self._owner:
            raise NetlistError(f"{net!r} does not belong to netlist {self.name!r}")
        return net.index

    def _mutable(self):
        if self._final:
            raise NetlistError(f"netlist {self.name!r} is finalized")

    def add_input(self, name: str, width: int) -> list[NetId]:
        self._mutable()
        if name in self._inputs:
            raise NetlistError(f"duplicate input group {name!r}")
        if width < 1:
            raise NetlistError("input width must be >= 1")
        nets = tuple(self._new_net() for _ in range(width))
        self._inputs[name] = nets
        return [NetId(n, self._owner) for n in nets]

    def add_output(self, name: str, nets: NetId | Sequence[NetId]) -> None:
        self._mutable()
        if name in self._outputs:
            raise NetlistError(f"duplicate output group {name!r}")
        if isinstance(nets, NetId):
            nets = [nets]
        self._outputs[name] = tuple(self._idx(n) for n in nets)

    # -- gates ------------------------------------------------------------

    def gate(self, kind: Kind, *inputs: NetId) -> NetId:
        """Append one native gate; no decomposition is applied."""
        self._mutable()
        kind = Kind(kind)
        if self.nand_only and kind != Kind.NAND:
            raise NetlistError(f"{kind.name} gate in nand_only netlist {self.name!r}")
        arity = 1 if kind == Kind.NOT else 2
        if len(inputs) != arity:
            raise NetlistError(f"{kind.name} takes {arity} input(s), got {len(inputs)}")
        ins = tuple(self._idx(n) for n in inputs)
        out = self._new_net()
        self._gates.append(Gate(kind, ins, out))
        return NetId(out, self._owner)

    def nand(self, a: NetId, b: NetId) -> NetId:
        return self.gate(Kind.NAND, a, b)

    def not_(self, a: NetId) -> NetId:
        if self.nand_only:
            return self.nand(a, a)
        return self.gate(Kind.NOT, a)

    def and_(self, a: NetId, b: NetId) -> NetId:
        if self.nand_only:
            t = self.nand(a, b)
            return self.nand(t, t)
        return self.gate(Kind.AND, a, b)

    def or_(self, a: NetId, b: NetId) -> NetId:
        if self.nand_only:
            return self.nand(self.nand(a, a), self.nand(b, b))
        return self.gate(Kind.OR, a, b)

    def xor_(self, a: NetId, b: NetId) -> NetId:
        if self.nand_only:
            t = self.nand(a, b)
            return self.nand(self.nand(a, t), self.nand(t, b))
        return self.gate(Kind.XOR, a, b)

    def nor_(self, a: NetId, b: NetId) -> NetId:
        if self.nand_only:
            return self.not_(self.or_(a, b))
        return self.gate(Kind.NOR, a, b)

    def mux(self, sel: NetId, when1: NetId, when0: NetId, sel_n: NetId | None = None) -> NetId:
        """``sel ? when1 : when0``; pass a shared ``sel_n`` to avoid one NOT per bit."""
        if sel_n is None:
            sel_n = self.not_(sel)
        return self.or_(self.and_(sel, when1), self.and_(sel_n, when0))

    def _tree(self, op, nets: Sequence[NetId]) -> NetId:
        nets = list(nets)
        if not nets:
            raise NetlistError("reduction over zero nets")
        while len(nets) > 1:
            nxt = [op(nets[i], nets[i + 1]) for i in range(0, len(nets) - 1, 2)]
            if len(nets) % 2:
                nxt.append(nets[-1])
            nets = nxt
        return nets[0]

    def and_tree(self, nets: Sequence[NetId]) -> NetId:
        """Balanced AND reduction (depth grows with log2 of the operand count)."""
        return self._tree(self.and_, nets)

    def or_tree(self, nets: Sequence[NetId]) -> NetId:
        return self._tree(self.or_, nets)

    def nor_all(self, nets: Sequence[NetId]) -> NetId:
        """Wide NOR: balanced OR halves joined by one NOR at the root."""
        nets = list(nets)
        if len(nets) == 1:
            return self.not_(nets[0])
        half = (len(nets) + 1) // 2
        return self.nor_(self.or_tree(nets[:half]), self.or_tree(nets[half:]))

    def finalize(self) -> Netlist:
        self._mutable()
        self._final = True
        return Netlist(self.name, self._n_nets, self._inputs, self._outputs,
                       self._gates, self.nand_only, self.width_hint)


# -- evaluation -------------------------------------------------------------


def simulate(netlist: Netlist, planes: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Evaluate on bit planes: ``planes[name]`` has shape ``(width, n_words)``."""
    missing = netlist.inputs.keys() - planes.keys()
    if missing:
        raise NetlistError(f"missing input group(s): {sorted(missing)}")
    extra = planes.keys() - netlist.inputs.keys()
    if extra:
        raise NetlistError(f"unknown input group(s): {sorted(extra)}")
    n_words = None
    rows = []
    for name, nets in netlist.inputs.items():
        p = planes[name]
        if p.shape[0] != len(nets):
            raise NetlistError(f"input {name!r} expects width {len(nets)}, got {p.shape[0]}")
        if n_words is None:
            n_words = p.shape[1]
        elif p.shape[1] != n_words:
            raise NetlistError("input groups disagree on lane count")
        rows.append(p)
    if n_words is None:
        n_words = 1
    in_planes = (np.concatenate(rows, axis=0) if rows
                 else np.zeros((0, n_words), dtype=np.uint64))
    out = run_program(netlist.program, np.ascontiguousarray(in_planes, dtype=np.uint64))
    result = {}
    pos = 0
    for name, nets in netlist.outputs.items():
        result[name] = out[pos:pos + len(nets)]
        pos += len(nets)
    return result


def _check_word(netlist, name, value):
    width = len(netlist.inputs.get(name, ()))
    if value < 0 or value >> width:
        raise NetlistError(f"value {value} does not fit input {name!r} of width {width}")


def evaluate(netlist: Netlist, assignment: Mapping[str, int]) -> dict[str, int]:
    """Evaluate one stimulus given as integers per input group."""
    planes = {}
    for name, value in assignment.items():
        if name in netlist.inputs:
            value = int(value)
            _check_word(netlist, name, value)
            planes[name] = bitplanes.pack_int(value, len(netlist.inputs[name]))
        else:
            planes[name] = np.zeros((0, 1), dtype=np.uint64)
    out = simulate(netlist, planes)
    return {name: bitplanes.unpack_int(p) for name, p in out.items()}


def evaluate_many(netlist: Netlist, assignment: Mapping[str, Iterable[int]]) -> dict[str, np.ndarray]:
    """Evaluate many stimuli at once; groups must be at most 64 bits wide."""
    arrays = {name: np.asarray(v, dtype=np.uint64) for name, v in assignment.items()}
    sizes = {a.shape for a in arrays.values()}
    if len(sizes) > 1:
        raise NetlistError("input groups have different stimulus counts")
    n = next(iter(sizes))[0] if sizes else 1
    planes = {}
    for name, arr in arrays.items():
        width = len(netlist.inputs.get(name, ()))
        if width < 64 and width and np.any(arr >> np.uint64(width)):
            raise NetlistError(f"a value does not fit input {name!r} of width {width}")
        planes[name] = bitplanes.pack(arr, width)
    out = simulate(netlist, planes)
    return {name: bitplanes.unpack(p, n) for name, p in out.items()}


# -- measurement ------------------------------------------------------------


def path_delays(netlist: Netlist, gate_delay: Mapping[str, float] | None = None,
                arrival: Mapping[str, Sequence[float]] | None = None) -> dict[str, list[float]]:
    """Arrival time of every output bit.

    ``gate_delay`` maps kind name to delay (default 1 per gate); ``arrival``
    optionally gives per-bit arrival times of input groups (default 0).
    """
    delay = [1.0] * len(Kind)
    if gate_delay is not None:
        for k in Kind:
            delay[k] = float(gate_delay.get(k.name, 1.0))
    t = [0.0] * netlist.n_nets
    if arrival:
        for name, times in arrival.items():
            for n, v in zip(netlist.inputs[name], times, strict=True):
                t[n] = float(v)
    for g in netlist.gates:
        t[g.output] = delay[g.kind] + max(t[n] for n in g.inputs)
    return {name: [t[n] for n in nets] for name, nets in netlist.outputs.items()}


def stats(netlist: Netlist) -> GateStats:
    counts: dict[str, int] = {}
    for g in netlist.gates:
        counts[g.kind.name] = counts.get(g.kind.name, 0) + 1
    levels = path_delays(netlist)
    depth = int(max((max(v) for v in levels.values() if v), default=0))
    area = sum(DEFAULT_AREA[k] * c for k, c in counts.items())
    return GateStats(counts=dict(sorted(counts.items())), depth=depth, nand_equivalent_area=area)


# -- text formats -------------------------------------------------------------


def _net_names(netlist: Netlist) -> list[str]:
    names = [f"n{i}" for i in range(netlist.n_nets)]
    names[CONST0], names[CONST1] = "0", "1"
    for grp, nets in netlist.inputs.items():
        for bit, n in enumerate(nets):
            names[n] = f"{grp}[{bit}]"
    return names


def _export_lines(netlist: Netlist) -> str:
    names = _net_names(netlist)
    out = [f"netlist {netlist.name} width={netlist.width_hint} nand_only={int(netlist.nand_only)}"]
    for grp, nets in netlist.inputs.items():
        out.append(f"input {grp} {len(nets)}")
    for grp, nets in netlist.outputs.items():
        out.append(f"output {grp} {len(nets)} " + " ".join(names[n] for n in nets))
    for i, g in enumerate(netlist.gates):
        ins = " ".join(names[n] for n in g.inputs)
        out.append(f"gate {i} {g.kind.name} {ins} -> {names[g.output]}")
    return "\n".join(out) + "\n"


def _export_dot(netlist: Netlist) -> str:
    names = _net_names(netlist)
    drivers = {g.output: f"g{i}" for i, g in enumerate(netlist.gates)}

    def node(n):
        return drivers.get(n, f'"{names[n]}"')

    out = [f'digraph "{netlist.name}" {{', "  rankdir=LR;"]
    used = sorted({n for g in netlist.gates for n in g.inputs if n not in drivers}
                  | {n for nets in netlist.outputs.values() for n in nets if n not in drivers})
    for n in used:
        out.append(f'  "{names[n]}" [shape=box];')
    for i, g in enumerate(netlist.gates):
        out.append(f'  g{i} [label="{g.kind.name}"];')
        for n in g.inputs:
            out.append(f"  {node(n)} -> g{i};")
    for grp, nets in netlist.outputs.items():
        for bit, n in enumerate(nets):
            out.append(f'  "out:{grp}[{bit}]" [shape=box];')
            out.append(f'  {node(n)} -> "out:{grp}[{bit}]";')
    out.append("}")
    return "\n".join(out) + "\n"


def export(netlist: Netlist, format: str = "lines") -> str:
    """Deterministic text rendering, ``lines`` (parseable by :func:`loads`) or ``dot``."""
    if format == "lines":
        return _export_lines(netlist)
    if format == "dot":
        return _export_dot(netlist)
    raise ValueError(f"unknown export format {format!r}")


def _parse_section(lines: list[str]) -> Netlist:
    head = lines[0].split()
    if len(head) < 2 or head[0] != "netlist":
        raise NetlistError(f"expected 'netlist <name>' header, got {lines[0]!r}")
    opts = dict(tok.split("=", 1) for tok in head[2:])
    bld = NetlistBuilder(head[1], nand_only=opts.get("nand_only", "0") == "1",
                         width_hint=int(opts.get("width", 0)))
    nets = {"0": bld.const0, "1": bld.const1}
    outputs = []

    def lookup(tok):
        try:
            return nets[tok]
        except KeyError:
            raise NetlistError(f"undefined net {tok!r}") from None

    for line in lines[1:]:
        tok = line.split()
        if tok[0] == "input":
            for bit, n in enumerate(bld.add_input(tok[1], int(tok[2]))):
                nets[f"{tok[1]}[{bit}]"] = n
        elif tok[0] == "output":
            if len(tok) != 3 + int(tok[2]):
                raise NetlistError(f"malformed output line {line!r}")
            outputs.append((tok[1], tok[3:]))
        elif tok[0] == "gate":
            if len(tok) < 6 or tok[-2] != "->":
                raise NetlistError(f"malformed gate line {line!r}")
            try:
                kind = Kind[tok[2]]
            except KeyError:
                raise NetlistError(f"unknown gate kind {tok[2]!r}") from None
            if tok[-1] in nets:
                raise NetlistError(f"net {tok[-1]} has more than one driver")
            nets[tok[-1]] = bld.gate(kind, *(lookup(t) for t in tok[3:-2]))
        else:
            raise NetlistError(f"unrecognized record {line!r}")
    for name, toks in outputs:
        bld.add_output(name, [lookup(t) for t in toks])
    return bld.finalize()


def loads_all(text: str) -> dict[str, Netlist]:
    """Parse a ``lines`` document holding one or more netlists."""
    sections: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("netlist "):
            sections.append([line])
        elif not sections:
            raise NetlistError("document does not start with a netlist header")
        else:
            sections[-1].append(line)
    result = {}
    for sec in sections:
        nl = _parse_section(sec)
        result[nl.name] = nl
    return result


def loads(text: str) -> Netlist:
    parsed = loads_all(text)
    if len(parsed) != 1:
        raise NetlistError(f"expected exactly one netlist, found {len(parsed)}")
    return next(iter(parsed.values()))
