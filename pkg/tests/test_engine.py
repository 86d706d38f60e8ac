import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gcdfabric import _engine
from gcdfabric.bitplanes import gather, pack, pack_int, unpack, unpack_int
from gcdfabric.netlist import Kind, NetlistBuilder, simulate

needs_compiled = pytest.mark.skipif("compiled" not in _engine.available_backends(),
                                    reason="extension not built")

BINARY = [Kind.NAND, Kind.AND, Kind.OR, Kind.XOR, Kind.NOR]


def random_netlist(seed, n_in=6, n_gates=80, n_out=5):
    rng = np.random.default_rng(seed)
    bld = NetlistBuilder(f"rand{seed}")
    nets = bld.add_input("x", n_in) + [bld.const0, bld.const1]
    for _ in range(n_gates):
        if rng.random() < 0.15:
            nets.append(bld.not_(nets[rng.integers(len(nets))]))
        else:
            kind = BINARY[rng.integers(len(BINARY))]
            nets.append(bld.gate(kind, nets[rng.integers(len(nets))], nets[rng.integers(len(nets))]))
    bld.add_output("y", [nets[-1 - i] for i in range(n_out)])
    return bld.finalize()


def reference_eval(nl, x):
    v = {0: 0, 1: 1}
    for i, n in enumerate(nl.inputs["x"]):
        v[n] = (x >> i) & 1
    fns = {Kind.NAND: lambda a, b: 1 - (a & b), Kind.AND: lambda a, b: a & b,
           Kind.OR: lambda a, b: a | b, Kind.XOR: lambda a, b: a ^ b,
           Kind.NOR: lambda a, b: 1 - (a | b)}
    for g in nl.gates:
        ins = [v[i] for i in g.inputs]
        v[g.output] = 1 - ins[0] if g.kind == Kind.NOT else fns[g.kind](*ins)
    return sum(v[n] << i for i, n in enumerate(nl.outputs["y"]))


@pytest.mark.parametrize("seed", range(8))
def test_backends_match_gate_by_gate_reference(seed, backend):
    nl = random_netlist(seed)
    xs = np.arange(64, dtype=np.uint64)
    got = unpack(simulate(nl, {"x": pack(xs, 6)})["y"], 64)
    assert [int(g) for g in got] == [reference_eval(nl, int(x)) for x in xs]


@needs_compiled
@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 300))
def test_compiled_equals_python(seed, lanes):
    nl = random_netlist(seed, n_in=8, n_gates=120)
    rng = np.random.default_rng(seed)
    planes = pack(rng.integers(0, 256, size=lanes, dtype=np.uint64), 8)
    prog = nl.program
    c = _engine.run_program(prog, planes, backend="compiled")
    p = _engine.run_program(prog, planes, backend="python")
    mask = (np.uint64(1) << np.uint64(lanes % 64)) - np.uint64(1) if lanes % 64 else ~np.uint64(0)
    assert np.array_equal(c[:, :-1], p[:, :-1])
    assert np.array_equal(c[:, -1] & mask, p[:, -1] & mask)


def test_set_backend_roundtrip():
    before = _engine.get_backend()
    try:
        for name in _engine.available_backends():
            _engine.set_backend(name)
            assert _engine.get_backend() == name
        with pytest.raises(ValueError):
            _engine.set_backend("fpga")
    finally:
        _engine.set_backend(before)


def test_env_forces_python_backend():
    code = "from gcdfabric import _engine; print(_engine.get_backend())"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True,
                         env={**__import__("os").environ, "GCDFABRIC_BACKEND": "python"})
    assert out.stdout.strip() == "python"


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 64), st.lists(st.integers(0, 2**64 - 1), min_size=1, max_size=200))
def test_pack_unpack_roundtrip(width, values):
    vals = np.array([v & ((1 << width) - 1) for v in values], dtype=np.uint64)
    planes = pack(vals, width)
    assert planes.shape == (width, (len(vals) + 63) // 64)
    assert np.array_equal(unpack(planes, len(vals)), vals)
    idx = np.arange(len(vals))[::3]
    assert np.array_equal(gather(planes, idx), vals[idx])


@given(st.integers(1, 200).flatmap(lambda w: st.tuples(st.just(w), st.integers(0, 2**w - 1))))
def test_pack_int_roundtrip(wv):
    width, v = wv
    assert unpack_int(pack_int(v, width)) == v
