"""Compiled vs pure-Python gate kernels.

    python benchmarks/bench_kernel.py [--repeat N]

Times one NAND-only 32-bit SAD evaluation over 65536 lanes and a width-8
exhaustive verify sweep of the structural machines and one
single-lane 32-bit machine run (~330 cycles), on every available backend.
"""

import argparse
import time

import numpy as np

from gcdfabric import _engine
from gcdfabric.bitplanes import pack
from gcdfabric.machines import ArchVariant, build_machine
from gcdfabric.netlist import simulate
from gcdfabric.sad import Mode, sad_netlist
from gcdfabric.verify import exhaustive_pairs, sweep


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--lanes", type=int, default=65536)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    nl = sad_netlist(32, Mode.NAND_ONLY)
    planes = {"a": pack(rng.integers(0, 2**32, args.lanes, dtype=np.uint64), 32),
              "b": pack(rng.integers(0, 2**32, args.lanes, dtype=np.uint64), 32)}
    a8, b8 = exhaustive_pairs(8)
    structural = [v for v in ArchVariant if v.structural]

    cases = {
        f"sad32 nand_only x{args.lanes} lanes ({len(nl.gates)} gates)": lambda: simulate(nl, planes),
        "single run optimized-gcdsad w32 (1000, 3)": lambda: build_machine(
            "optimized-gcdsad", 32).run(1000, 3),
        "verify width 8 exhaustive (3 machines)": lambda: sweep(8, a8, b8, structural),
    }
    previous = _engine.get_backend()
    results = {}
    try:
        for backend in _engine.available_backends():
            _engine.set_backend(backend)
            for name, fn in cases.items():
                fn()  # warm caches (codegen, netlist build)
                results[(name, backend)] = best_of(fn, args.repeat)
    finally:
        _engine.set_backend(previous)

    backends = _engine.available_backends()
    print(f"{'case':<52}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for name in cases:
        row = [results[(name, b)] for b in backends]
        speed = f"{row[-1] / row[0]:>11.1f}x" if len(row) > 1 else "           -"
        print(f"{name:<52}" + "".join(f"{t * 1e3:>10.1f}ms" for t in row) + speed)


if __name__ == "__main__":
    main()
