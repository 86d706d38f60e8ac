"""Carry-out generation for ``A + ~B`` without building the sum.

Per bit ``nb = ~B``, propagate ``p = A | nb`` and generate ``g = A & nb``.  Bits
are combined by radix-4 lookahead: a group of up to four members (LSB first)
has

    P = p3 & p2 & p1 & p0
    G = g3 | g2&p3 | g1&p3&p2 | g0&p3&p2&p1

and groups are combined again with the same rule until one span covers the
word.  At 32 bits that is eight 4-bit groups, two 16-bit superblocks and a
final 2-way combine.  With carry-in 0 the final generate is the carry-out,
which is 1 exactly when ``A > B`` (unsigned).

Widths that are not a power of four are handled as if zero-padded on the high
side; padded bits have ``p=1, g=0`` and are simply left out of their group.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

from .netlist import NetId, Netlist, NetlistBuilder, NetlistError, evaluate

__all__ = ["PgVectors", "GroupVectors", "build_pg", "build_groups", "build_carry_out",
           "carry_netlist", "carry_out_value"]


@dataclass(frozen=True)
class PgVectors:
    p: tuple[NetId, ...]
    g: tuple[NetId, ...]
    nb: tuple[NetId, ...]


@dataclass(frozen=True)
class GroupVectors:
    p4: tuple[NetId, ...]
    g4: tuple[NetId, ...]


def _check_operands(a, b):
    if len(a) != len(b):
        raise NetlistError(f"operand widths differ: {len(a)} vs {len(b)}")
    if not a:
        raise NetlistError("operand width must be >= 1")


def build_pg(bld: NetlistBuilder, a: Sequence[NetId], b: Sequence[NetId]) -> PgVectors:
    _check_operands(a, b)
    nb = tuple(bld.not_(x) for x in b)
    p = tuple(bld.or_(x, y) for x, y in zip(a, nb))
    g = tuple(bld.and_(x, y) for x, y in zip(a, nb))
    return PgVectors(p=p, g=g, nb=nb)


def _combine(bld, members, need_p):
    """Lookahead over ``members`` = [(p, g), ...] LSB first; returns (P or None, G)."""
    ps = [m[0] for m in members]
    gs = [m[1] for m in members]
    top = len(members) - 1
    terms = [gs[top]]
    for i in range(top - 1, -1, -1):
        terms.append(bld.and_tree([gs[i]] + ps[i + 1:]))
    big_g = bld.or_tree(terms)
    big_p = bld.and_tree(ps) if need_p else None
    return big_p, big_g


def build_groups(bld: NetlistBuilder, pg: PgVectors) -> GroupVectors:
    """Per 4-bit group propagate/generate (the last group may be short)."""
    p4, g4 = [], []
    for lo in range(0, len(pg.g), 4):
        members = list(zip(pg.p[lo:lo + 4], pg.g[lo:lo + 4]))
        gp, gg = _combine(bld, members, need_p=True)
        p4.append(gp)
        g4.append(gg)
    return GroupVectors(p4=tuple(p4), g4=tuple(g4))


class _LazyPg:
    """Bit p/g nets built on first use, so the carry tree emits no dead logic."""

    def __init__(self, bld, a, b):
        self.bld, self.a, self.b = bld, a, b
        self._nb, self._p, self._g = {}, {}, {}

    def nb(self, i):
        if i not in self._nb:
            self._nb[i] = self.bld.not_(self.b[i])
        return self._nb[i]

    def p(self, i):
        if i not in self._p:
            self._p[i] = self.bld.or_(self.a[i], self.nb(i))
        return self._p[i]

    def g(self, i):
        if i not in self._g:
            self._g[i] = self.bld.and_(self.a[i], self.nb(i))
        return self._g[i]


def _span(bld, pg, lo, hi, size, need_p):
    if size == 1:
        return (pg.p(lo) if need_p else None), pg.g(lo)
    step = size // 4
    starts = [lo + k * step for k in range(4) if lo + k * step < hi]
    members = [_span(bld, pg, s, min(s + step, hi), step, need_p or k > 0)
               for k, s in enumerate(starts)]
    if len(members) == 1:
        return members[0]
    return _combine(bld, members, need_p)


def build_carry_out(bld: NetlistBuilder, a: Sequence[NetId], b: Sequence[NetId]) -> NetId:
    """Carry-out of ``A + ~B`` (carry-in 0), i.e. the ``A > B`` flag."""
    _check_operands(a, b)
    size = 4
    while size < len(a):
        size *= 4
    _, c = _span(bld, _LazyPg(bld, a, b), 0, len(a), size, need_p=False)
    return c


_cache: dict[tuple[int, bool], Netlist] = {}
_cache_lock = threading.Lock()


def carry_netlist(width: int, nand_only: bool = True) -> Netlist:
    """Cached standalone netlist: inputs ``a``, ``b``; output ``c``."""
    if width < 1:
        raise NetlistError(f"unsupported width {width}")
    key = (width, nand_only)
    with _cache_lock:
        nl = _cache.get(key)
        if nl is None:
            bld = NetlistBuilder(f"carry{width}", nand_only=nand_only, width_hint=width)
            a = bld.add_input("a", width)
            b = bld.add_input("b", width)
            bld.add_output("c", build_carry_out(bld, a, b))
            nl = _cache[key] = bld.finalize()
    return nl


def carry_out_value(a: int, b: int, width: int) -> int:
    """Evaluate the carry netlist: 1 iff ``a > b``."""
    for v in (a, b):
        if not 0 <= v < (1 << width):
            raise ValueError(f"operand {v} out of range for width {width}")
    return evaluate(carry_netlist(width), {"a": a, "b": b})["c"]
