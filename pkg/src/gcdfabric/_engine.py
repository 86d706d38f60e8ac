"""Gate-program execution backends.

``compiled``: the Cython extension :mod:`gcdfabric._kernel` (word loops in C).
``python``: :mod:`gcdfabric._kernel_py`, which turns each program into a
straight-line Python function over arbitrary-precision ints.

The compiled backend is used when importable.  Set ``GCDFABRIC_BACKEND=python``
to force the fallback, or call :func:`set_backend`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None


@dataclass(eq=False)
class Program:
    ops: list[int]
    a: list[int]
    b: list[int]
    out: list[int]
    n_nets: int
    in_rows: list[int]
    out_rows: list[int]
    cache: dict = field(default_factory=dict, repr=False)

    def arrays(self):
        arr = self.cache.get("arrays")
        if arr is None:
            arr = (np.asarray(self.ops, dtype=np.uint8), np.asarray(self.a, dtype=np.int32),
                   np.asarray(self.b, dtype=np.int32), np.asarray(self.out, dtype=np.int32),
                   np.asarray(self.in_rows, dtype=np.intp), np.asarray(self.out_rows, dtype=np.intp))
            self.cache["arrays"] = arr
        return arr


def available_backends() -> list[str]:
    return (["compiled"] if _compiled is not None else []) + ["python"]


def _initial_backend() -> str:
    requested = os.environ.get("GCDFABRIC_BACKEND", "").strip().lower()
    if requested == "python" or _compiled is None:
        return "python"
    return "compiled"


_backend = _initial_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in available_backends():
        raise ValueError(f"backend {name!r} unavailable; have {available_backends()}")
    _backend = name


def run_program(program: Program, in_planes: np.ndarray, backend: str | None = None) -> np.ndarray:
    """Evaluate ``program``; rows of ``in_planes`` follow ``program.in_rows``."""
    backend = backend or _backend
    if backend == "compiled":
        ops, a, b, out, in_rows, out_rows = program.arrays()
        n_words = in_planes.shape[1]
        values = np.empty((program.n_nets, n_words), dtype=np.uint64)
        values[0] = 0
        values[1] = ~np.uint64(0)
        values[in_rows] = in_planes
        _compiled.run_gates(ops, a, b, out, values)
        return values[out_rows]
    return _kernel_py.run_program(program, in_planes)
