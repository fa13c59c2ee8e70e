"""Pure-Python Gibbs scan kernel.

Fallback twin of the compiled extension in ``_gibbs.pyx``.  Both consume a
pre-drawn stream of uniforms and perform floating-point operations in the
same order, so for identical inputs they produce bit-identical group
frequency tables.
"""

import math


def gibbs_counts(sal, sim, k, eta, theta, w_div, temperature, init, draws):
    """Run eta + theta Gibbs scans over a k-slot group; count visited groups.

    Parameters
    ----------
    sal : float64[n]            per-candidate salience scores
    sim : float64[n, n]         pairwise bag cosine similarities
    k : int                     group size (k <= n)
    eta, theta : int            burn-in and recording scan counts
    w_div, temperature : float  diversity weight and softmax temperature
    init : int64[k]             initial slot assignment (distinct indices)
    draws : float64[(eta+theta)*k]  uniform variates, one per slot update

    Returns a dict mapping sorted index tuples to visit counts; counts are
    incremented after every slot update of the recording scans and sum to
    k * theta.
    """
    n = len(sal)
    slots = [int(i) for i in init]
    counts = {}
    n_pairs = k * (k - 1) // 2
    in_rest = [False] * n
    t = 0
    for scan in range(1, eta + theta + 1):
        for j in range(k):
            rest = [slots[a] for a in range(k) if a != j]
            for r in rest:
                in_rest[r] = True
            pair_base = 0.0
            for a in range(len(rest)):
                row = sim[rest[a]]
                for b in range(a + 1, len(rest)):
                    pair_base += row[rest[b]]
            eligible = []
            expos = []
            best = -math.inf
            for c in range(n):
                if in_rest[c]:
                    continue
                cross = 0.0
                row = sim[c]
                for r in rest:
                    cross += row[r]
                if n_pairs > 0:
                    div = -(pair_base + cross) / n_pairs
                else:
                    div = 0.0
                expo = (sal[c] + w_div * div) / temperature
                eligible.append(c)
                expos.append(expo)
                if expo > best:
                    best = expo
            total = 0.0
            for idx in range(len(expos)):
                expos[idx] = math.exp(expos[idx] - best)
                total += expos[idx]
            u = draws[t] * total
            t += 1
            acc = 0.0
            chosen = eligible[-1]
            for idx in range(len(eligible)):
                acc += expos[idx]
                if u < acc:
                    chosen = eligible[idx]
                    break
            slots[j] = chosen
            for r in rest:
                in_rest[r] = False
            if scan > eta:
                key = tuple(sorted(slots))
                counts[key] = counts.get(key, 0) + 1
    return counts
