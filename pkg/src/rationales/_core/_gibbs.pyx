# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs scan kernel.

Twin of ``gibbs_py.gibbs_counts``: identical operation order, so results are
bit-identical to the pure-Python fallback for the same inputs.
"""

from libc.math cimport exp, INFINITY
from libc.stdint cimport int64_t


def gibbs_counts(double[::1] sal, double[:, ::1] sim, int k, int eta, int theta,
                 double w_div, double temperature, int64_t[::1] init,
                 double[::1] draws):
    cdef int n = sal.shape[0]
    cdef int n_pairs = k * (k - 1) // 2
    cdef int scan, j, a, b, c, idx, m, chosen, t = 0
    cdef double pair_base, cross, div, expo, best, total, u, acc
    cdef list slots = [0] * k
    cdef int[::1] rest_buf
    cdef double[::1] expos_buf
    cdef int[::1] eligible_buf
    cdef char[::1] in_rest

    import array
    rest_arr = array.array("i", [0] * max(k - 1, 1))
    expos_arr = array.array("d", [0.0] * n)
    eligible_arr = array.array("i", [0] * n)
    in_rest_arr = array.array("b", [0] * n)
    rest_buf = rest_arr
    expos_buf = expos_arr
    eligible_buf = eligible_arr
    in_rest = in_rest_arr

    cdef int[::1] slot_idx
    slot_arr = array.array("i", [0] * k)
    slot_idx = slot_arr
    for j in range(k):
        slot_idx[j] = <int>init[j]

    counts = {}
    cdef int n_rest = k - 1
    cdef int n_elig

    for scan in range(1, eta + theta + 1):
        for j in range(k):
            m = 0
            for a in range(k):
                if a != j:
                    rest_buf[m] = slot_idx[a]
                    in_rest[rest_buf[m]] = 1
                    m += 1
            pair_base = 0.0
            for a in range(n_rest):
                for b in range(a + 1, n_rest):
                    pair_base += sim[rest_buf[a], rest_buf[b]]
            n_elig = 0
            best = -INFINITY
            for c in range(n):
                if in_rest[c]:
                    continue
                cross = 0.0
                for a in range(n_rest):
                    cross += sim[c, rest_buf[a]]
                if n_pairs > 0:
                    div = -(pair_base + cross) / n_pairs
                else:
                    div = 0.0
                expo = (sal[c] + w_div * div) / temperature
                eligible_buf[n_elig] = c
                expos_buf[n_elig] = expo
                n_elig += 1
                if expo > best:
                    best = expo
            total = 0.0
            for idx in range(n_elig):
                expos_buf[idx] = exp(expos_buf[idx] - best)
                total += expos_buf[idx]
            u = draws[t] * total
            t += 1
            acc = 0.0
            chosen = eligible_buf[n_elig - 1]
            for idx in range(n_elig):
                acc += expos_buf[idx]
                if u < acc:
                    chosen = eligible_buf[idx]
                    break
            slot_idx[j] = chosen
            for a in range(n_rest):
                in_rest[rest_buf[a]] = 0
            if scan > eta:
                for a in range(k):
                    slots[a] = slot_idx[a]
                key = tuple(sorted(slots))
                if key in counts:
                    counts[key] += 1
                else:
                    counts[key] = 1
    return counts
