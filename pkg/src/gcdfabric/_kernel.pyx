# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Bit-parallel gate evaluation over uint64 lane words."""

from libc.stdint cimport uint8_t, int32_t, uint64_t


def run_gates(const uint8_t[::1] ops, const int32_t[::1] a, const int32_t[::1] b,
              const int32_t[::1] out, uint64_t[:, ::1] values):
    """Evaluate gates in order, writing each output row of ``values`` in place.

    Op codes follow ``gcdfabric.netlist.Kind``: NAND, AND, OR, XOR, NOT, NOR.
    """
    cdef Py_ssize_t n_gates = ops.shape[0]
    cdef Py_ssize_t n_words = values.shape[1]
    cdef Py_ssize_t g, w
    cdef uint64_t* pa
    cdef uint64_t* pb
    cdef uint64_t* po
    cdef uint8_t op
    if n_words == 0:
        return
    with nogil:
        for g in range(n_gates):
            pa = &values[a[g], 0]
            pb = &values[b[g], 0]
            po = &values[out[g], 0]
            op = ops[g]
            if op == 0:
                for w in range(n_words):
                    po[w] = ~(pa[w] & pb[w])
            elif op == 1:
                for w in range(n_words):
                    po[w] = pa[w] & pb[w]
            elif op == 2:
                for w in range(n_words):
                    po[w] = pa[w] | pb[w]
            elif op == 3:
                for w in range(n_words):
                    po[w] = pa[w] ^ pb[w]
            elif op == 4:
                for w in range(n_words):
                    po[w] = ~pa[w]
            else:
                for w in range(n_words):
                    po[w] = ~(pa[w] | pb[w])
