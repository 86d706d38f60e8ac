"""Pure-Python gate evaluation.

Each lane word row becomes one Python int (all lanes of a net in one integer),
and each program is compiled once into a straight-line function with one local
per net, so evaluation is a single call with no per-gate dispatch.
"""

import numpy as np

_TEMPLATES = (
    "m ^ ({a} & {b})",   # NAND
    "{a} & {b}",         # AND
    "{a} | {b}",         # OR
    "{a} ^ {b}",         # XOR
    "m ^ {a}",           # NOT
    "m ^ ({a} | {b})",   # NOR
)


def _codegen(program):
    lines = ["def _run(ins, m):", "    v0 = 0", "    v1 = m"]
    if program.in_rows:
        lines.append("    " + ", ".join(f"v{r}" for r in program.in_rows) + ", = ins")
    for op, a, b, o in zip(program.ops, program.a, program.b, program.out):
        lines.append(f"    v{o} = " + _TEMPLATES[op].format(a=f"v{a}", b=f"v{b}"))
    lines.append("    return (" + "".join(f"v{r}, " for r in program.out_rows) + ")")
    scope = {}
    exec(compile("\n".join(lines), "<gate-program>", "exec"), scope)
    return scope["_run"]


def run_program(program, in_planes: np.ndarray) -> np.ndarray:
    fn = program.cache.get("pyfunc")
    if fn is None:
        fn = program.cache["pyfunc"] = _codegen(program)
    n_words = in_planes.shape[1]
    nbytes = 8 * n_words
    mask = (1 << (64 * n_words)) - 1
    ins = [int.from_bytes(row.tobytes(), "little") for row in np.ascontiguousarray(in_planes, dtype=np.uint64)]
    outs = fn(ins, mask)
    buf = b"".join(v.to_bytes(nbytes, "little") for v in outs)
    return np.frombuffer(buf, dtype=np.uint64).reshape(len(outs), n_words).copy()
