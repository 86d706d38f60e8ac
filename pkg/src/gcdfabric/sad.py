"""Absolute-difference block for the GCD datapath.

The carry ``C`` of ``A + ~B`` picks which operand to complement:

    BX(i) = B(i) XOR C           (~B when A > B, B otherwise)
    AX(i) = NOT (A(i) XOR C)     (A when A > B, ~A otherwise)

``AX + BX = 2**n - 1 + |A - B|``, so a ripple adder with carry-in 1 (carry-out
dropped) yields ``|A - B|``.  ``eq`` is a wide NOR over the difference bits.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .carry import build_carry_out
from .netlist import NetId, Netlist, NetlistBuilder, NetlistError, evaluate

__all__ = ["Mode", "SadOutputs", "build_sad", "sad_netlist", "sad", "ripple_add"]


class Mode(str, Enum):
    MIXED = "mixed"
    NAND_ONLY = "nand_only"


@dataclass(frozen=True)
class SadOutputs:
    diff: tuple[NetId, ...]
    gt: NetId
    eq: NetId
    bx: tuple[NetId, ...]
    ax: tuple[NetId, ...]


def ripple_add(bld: NetlistBuilder, a: Sequence[NetId], b: Sequence[NetId], cin: NetId) -> list[NetId]:
    """Full-adder chain; the final carry-out is not built."""
    out = []
    carry = cin
    last = len(a) - 1
    for i, (x, y) in enumerate(zip(a, b)):
        t = bld.xor_(x, y)
        out.append(bld.xor_(t, carry))
        if i != last:
            carry = bld.or_(bld.and_(x, y), bld.and_(carry, t))
    return out


def build_sad(bld: NetlistBuilder, a: Sequence[NetId], b: Sequence[NetId]) -> SadOutputs:
    """Append the SAD block for operand nets ``a``, ``b`` to ``bld``."""
    if len(a) != len(b) or not a:
        raise NetlistError("SAD operands must have the same nonzero width")
    c = build_carry_out(bld, a, b)
    bx = tuple(bld.xor_(bi, c) for bi in b)
    ax = tuple(bld.not_(bld.xor_(ai, c)) for ai in a)
    diff = tuple(ripple_add(bld, ax, bx, bld.const1))
    eq = bld.nor_all(diff)
    return SadOutputs(diff=diff, gt=c, eq=eq, bx=bx, ax=ax)


_cache: dict[tuple, Netlist] = {}
_cache_lock = threading.Lock()


def sad_netlist(width: int, mode: Mode | str = Mode.NAND_ONLY, probes: bool = False) -> Netlist:
    """Cached SAD netlist with inputs ``a``, ``b`` and outputs ``diff``, ``gt``, ``eq``.

    ``probes=True`` also exposes the conditioned operands as outputs ``bx``/``ax``
    (no extra gates).
    """
    mode = Mode(mode)
    if width < 1:
        raise NetlistError(f"unsupported width {width}")
    key = (width, mode, probes)
    with _cache_lock:
        nl = _cache.get(key)
        if nl is None:
            bld = NetlistBuilder(f"sad{width}_{mode.value}", nand_only=mode is Mode.NAND_ONLY,
                                 width_hint=width)
            a = bld.add_input("a", width)
            b = bld.add_input("b", width)
            out = build_sad(bld, a, b)
            bld.add_output("diff", out.diff)
            bld.add_output("gt", out.gt)
            bld.add_output("eq", out.eq)
            if probes:
                bld.add_output("bx", out.bx)
                bld.add_output("ax", out.ax)
            nl = _cache[key] = bld.finalize()
    return nl


def sad(a: int, b: int, width: int, mode: Mode | str = Mode.NAND_ONLY) -> tuple[int, int, int]:
    """``(|a-b|, a>b, a==b)`` computed by evaluating the netlist."""
    for v in (a, b):
        if not 0 <= v < (1 << width):
            raise ValueError(f"operand {v} out of range for width {width}")
    r = evaluate(sad_netlist(width, mode), {"a": a, "b": b})
    return r["diff"], r["gt"], r["eq"]
