import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gcdfabric.carry import (PgVectors, build_carry_out, build_groups, build_pg, carry_netlist,
                             carry_out_value)
from gcdfabric.netlist import NetlistBuilder, NetlistError, evaluate, evaluate_many, stats


def carry_oracle(a, b, n):
    """Bit n of the actual sum A + (2^n - 1 - B)."""
    return (a + ((1 << n) - 1 - b)) >> n & 1


def ripple_group(p, g):
    """Carry out of a 4-bit group with carry-in 0, bit by bit."""
    c = 0
    for pi, gi in zip(p, g):
        c = gi | (pi & c)
    return c


def pg_netlist(width, nand_only=True):
    bld = NetlistBuilder("pg", nand_only=nand_only)
    a = bld.add_input("a", width)
    b = bld.add_input("b", width)
    pg = build_pg(bld, a, b)
    bld.add_output("p", pg.p)
    bld.add_output("g", pg.g)
    bld.add_output("nb", pg.nb)
    return bld.finalize()


@pytest.mark.parametrize("a,b,p,g", [
    (0b1111, 0b0000, 0b1111, 0b1111),
    (0b0000, 0b1111, 0b0000, 0b0000),
    (0b0101, 0b0101, 0b1111, 0b0000),
])
def test_build_pg_examples(a, b, p, g):
    out = evaluate(pg_netlist(4), {"a": a, "b": b})
    assert (out["p"], out["g"], out["nb"]) == (p, g, b ^ 0b1111)


def test_generate_implies_propagate():
    nl = pg_netlist(4)
    for a, b in itertools.product(range(16), repeat=2):
        out = evaluate(nl, {"a": a, "b": b})
        assert out["g"] & ~out["p"] == 0


def group_netlist():
    bld = NetlistBuilder("grp", nand_only=True)
    p = bld.add_input("p", 4)
    g = bld.add_input("g", 4)
    grp = build_groups(bld, PgVectors(p=tuple(p), g=tuple(g), nb=()))
    bld.add_output("p4", grp.p4)
    bld.add_output("g4", grp.g4)
    return bld.finalize()


def test_groups_match_ripple_oracle():
    nl = group_netlist()
    for p, g in itertools.product(range(16), repeat=2):
        out = evaluate(nl, {"p": p, "g": g})
        pb = [(p >> i) & 1 for i in range(4)]
        gb = [(g >> i) & 1 for i in range(4)]
        assert out["p4"] == int(all(pb))
        assert out["g4"] == ripple_group(pb, gb)


def test_group_examples():
    nl = group_netlist()
    assert evaluate(nl, {"p": 0b1111, "g": 0}) == {"p4": 1, "g4": 0}
    for p in range(16):
        assert evaluate(nl, {"p": p, "g": 0b1000})["g4"] == 1


def test_groups_short_last_group():
    bld = NetlistBuilder("pg6")
    a = bld.add_input("a", 6)
    b = bld.add_input("b", 6)
    grp = build_groups(bld, build_pg(bld, a, b))
    assert len(grp.g4) == 2


@pytest.mark.parametrize("width", [4, 8])
@pytest.mark.parametrize("nand_only", [True, False])
def test_carry_exhaustive(width, nand_only, backend):
    vals = np.arange(1 << width, dtype=np.uint64)
    a, b = (m.ravel() for m in np.meshgrid(vals, vals, indexing="ij"))
    c = evaluate_many(carry_netlist(width, nand_only), {"a": a, "b": b})["c"]
    assert np.array_equal(c, (a > b).astype(np.uint64))
    oracle = np.array([carry_oracle(int(x), int(y), width) for x, y in zip(a, b)], dtype=np.uint64)
    assert np.array_equal(c, oracle)


@pytest.mark.parametrize("width", [1, 2, 3, 5, 6, 7, 9, 12, 16])
def test_carry_padded_widths_exhaustive(width):
    vals = np.arange(1 << min(width, 8), dtype=np.uint64)
    if width > 8:
        vals = np.random.default_rng(width).integers(0, 1 << width, 256, dtype=np.uint64)
    a, b = (m.ravel() for m in np.meshgrid(vals, vals, indexing="ij"))
    c = evaluate_many(carry_netlist(width), {"a": a, "b": b})["c"]
    assert np.array_equal(c, (a > b).astype(np.uint64))


@pytest.mark.parametrize("a,b,n,c", [(5, 3, 4, 1), (0, 255, 8, 0), (9, 4, 8, 1), (4, 9, 8, 0),
                                     (7, 7, 8, 0), (2**32 - 1, 2**32 - 2, 32, 1)])
def test_carry_out_value_examples(a, b, n, c):
    assert carry_out_value(a, b, n) == c


@pytest.mark.parametrize("n", [4, 8, 16, 32])
def test_equal_operands_never_carry(n):
    for v in (0, 1, (1 << n) - 1, 0x5A5A5A5A & ((1 << n) - 1)):
        assert carry_out_value(v, v, n) == 0


def test_carry_out_value_range_check():
    with pytest.raises(ValueError):
        carry_out_value(256, 0, 8)
    with pytest.raises(ValueError):
        carry_out_value(-1, 0, 8)


def test_width_errors():
    bld = NetlistBuilder("w")
    a = bld.add_input("a", 4)
    b = bld.add_input("b", 3)
    with pytest.raises(NetlistError):
        build_carry_out(bld, a, b)
    with pytest.raises(NetlistError):
        carry_netlist(0)


def test_structure_32_bit():
    nl = carry_netlist(32)
    assert nl.nand_only and stats(nl).counts.keys() == {"NAND"}
    assert list(nl.outputs) == ["c"] and len(nl.inputs["a"]) == 32


def test_lookahead_shallower_than_ripple(ripple_comparator):
    la = stats(carry_netlist(32)).depth
    rip = stats(ripple_comparator(32)).depth
    assert la < rip


def test_ripple_fixture_is_a_comparator(ripple_comparator):
    nl = ripple_comparator(4)
    for a, b in itertools.product(range(16), repeat=2):
        assert evaluate(nl, {"a": a, "b": b})["gt"] == int(a > b)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_carry_32_property(a, b):
    assert carry_out_value(a, b, 32) == int(a > b) == carry_oracle(a, b, 32)
