import csv
import io
import json

import pytest
from hypothesis import given, strategies as st

from gcdfabric.cost import CostWeights, compare, cost, percent_reduction
from gcdfabric.machines import REG_X, ArchVariant, Machine, build_machine
from gcdfabric.netlist import NetlistBuilder, stats


def chain_machine(n_gates):
    bld = NetlistBuilder("chain")
    n = bld.add_input("a", 1)[0]
    for _ in range(n_gates):
        n = bld.nand(n, n)
    bld.add_output("y", n)
    return Machine(ArchVariant.GCDSAD, 1, {"chain": bld.finalize()}, {"chain": {"a": REG_X}},
                   next_x=("chain", "y"))


def test_nand_chain_cost():
    r = cost(chain_machine(4))
    assert (r.area, r.delay, r.adp) == (4.0, 4.0, 16.0)
    assert r.census.counts == {"NAND": 4} and r.census.depth == 4


def test_empty_datapath_cost():
    r = cost(chain_machine(0))
    assert (r.area, r.delay, r.adp) == (0.0, 0.0, 0.0)


def test_behavioral_report():
    r = cost(build_machine("for-loop", 8))
    assert r.behavioral and r.area is None and r.delay is None and r.adp is None


@pytest.mark.parametrize("variant", [v for v in ArchVariant if v.structural])
@pytest.mark.parametrize("width", [8, 32])
def test_report_census_matches_stats(variant, width):
    m = build_machine(variant, width)
    r = cost(m)
    assert r.adp == r.area * r.delay
    direct = {name: stats(nl) for name, nl in m.blocks.items()}
    assert r.blocks == direct
    total = {}
    for s in direct.values():
        for k, c in s.counts.items():
            total[k] = total.get(k, 0) + c
    assert r.census.counts == total


@pytest.mark.parametrize("width", [8, 32])
def test_delay_spans_sad_then_mux(width):
    m = build_machine("optimized-gcdsad", width)
    r = cost(m)
    sad_depth = stats(m.blocks["sad"]).depth
    # eq can end deeper than diff + mux, so the bound is inclusive below
    assert sad_depth <= r.delay <= sad_depth + stats(m.blocks["mux"]).depth


def test_weighted_area_by_hand():
    w = CostWeights.from_dict({"NAND": 1, "XOR": 2.5, "AND": 2, "OR": 2, "NOT": 0.5, "NOR": 3})
    m = build_machine("gcdsad", 8)
    r = cost(m, w)
    counts = r.census.counts
    by_hand = (counts.get("NAND", 0) * 1 + counts["XOR"] * 2.5 + counts["AND"] * 2
               + counts["OR"] * 2 + counts["NOT"] * 0.5 + counts["NOR"] * 3)
    assert r.area == by_hand
    assert r.adp == by_hand * r.delay


def test_delay_weights_scale_critical_path():
    m = build_machine("optimized-gcdsad", 8)
    base = cost(m)
    slow = cost(m, CostWeights.from_dict({"delay": {"NAND": 2.0}}))
    assert slow.delay == 2 * base.delay and slow.area == base.area


@pytest.mark.parametrize("bad", [{"NAND": 0}, {"XOR": -1}, {"FOO": 1}, {"area": {"NAND": "x"}}, [1, 2]])
def test_invalid_weights(bad):
    with pytest.raises(ValueError):
        CostWeights.from_dict(bad)


@pytest.mark.parametrize("opt,other,expected", [
    (1727, 2038.453, 15.28),
    (1727, 1847.832, 6.54),
])
def test_percent_reduction_table_values(opt, other, expected):
    assert percent_reduction(opt, other) == pytest.approx(expected, abs=0.005)


def test_percent_reduction_for_loop_figure_is_not_81():
    assert percent_reduction(1727, 9462437.935) == pytest.approx(99.98, abs=0.01)


def test_percent_reduction_domain():
    with pytest.raises(ValueError):
        percent_reduction(1, 0)
    with pytest.raises(ValueError):
        percent_reduction(1, -5)


@given(st.floats(0.1, 1e6), st.floats(0.1, 1e6))
def test_percent_reduction_sign_antisymmetry(x, y):
    assert percent_reduction(x, x) == 0
    fwd, back = percent_reduction(x, y), percent_reduction(y, x)
    assert (fwd > 0) == (back < 0) or fwd == back == 0


def test_compare_two_variants():
    table = compare(["optimized-gcdsad", "gcdsad"], 32)
    assert len(table.reports) == 2 and len(table.reductions) == 2
    assert table.reductions[0] is None
    assert table.reductions[1] == pytest.approx(
        percent_reduction(table.reports[0].adp, table.reports[1].adp))


def test_compare_all_with_for_loop():
    table = compare(["optimized-gcdsad", "gcdsad", "gcd2sub", "for-loop"], 8)
    assert table.reductions[3] is None and table.reports[3].behavioral
    assert any("99.98%" in n for n in table.notes)


def test_area_grows_with_width():
    for v in ("optimized-gcdsad", "gcdsad", "gcd2sub"):
        small, big = compare([v], 8).reports[0], compare([v], 32).reports[0]
        assert big.area > small.area


def test_serializations():
    table = compare(["optimized-gcdsad", "gcdsad", "gcd2sub", "for-loop"], 8)
    doc = json.loads(table.to_json())
    assert doc["schema_version"] == 1 and len(doc["reports"]) == 4
    rows = list(csv.reader(io.StringIO(table.to_csv())))
    assert rows[0] == ["variant", "area", "delay", "adp", "reduction_vs_first", "behavioral_flag"]
    assert rows[4][0] == "for-loop" and rows[4][-1] == "true" and rows[4][1] == ""
    assert "for-loop" in table.to_text()
