"""Independent reference implementations used only by the tests.

Each one is written the slow, obvious way (explicit loops, itertools) and
shares no code with the package.
"""

import itertools
import math

import numpy as np


def kings_edges(rows, cols):
    """Unordered lattice pairs found by scanning every cell's 8 neighbours."""
    edges = set()
    for r in range(rows):
        for c in range(cols):
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    if dr == dc == 0:
                        continue
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < rows and 0 <= cc < cols:
                        a, b = r * cols + c, rr * cols + cc
                        edges.add((min(a, b), max(a, b)))
    return edges


def hamiltonian(n, couplings, s):
    """``-sum_{i<j} J_ij s_i s_j`` with ``couplings`` a dict ``(i, j) -> J``."""
    h = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            h -= couplings.get((i, j), 0.0) * s[i] * s[j]
    return h


def cut(edges, s):
    return sum(w for i, j, w in edges if s[i] != s[j])


def brute_maxcut(n, edges):
    """Best cut over all 2^n assignments."""
    best = -math.inf
    for bits in itertools.product((-1, 1), repeat=n):
        best = max(best, cut(edges, bits))
    return best


def energy(phases, couplings, k_c, k_s):
    e = 0.0
    for (i, j), J in couplings.items():
        e -= k_c * J * math.cos(phases[i] - phases[j])
    for p in phases:
        e -= 0.5 * k_s * math.cos(2 * p)
    return e


def numeric_gradient(f, x, h=1e-5):
    g = np.zeros_like(x)
    for i in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2 * h)
    return g


# Table 1 of the source study: (total power W, shil power W, node power W,
# reported energy J, cycles, solution time s)
TABLE1 = {
    "ideal": (458.9e-3, 0.0, 458.9e-3, 8.71e-9, 23, 19.63e-9),
    "rosc": (468.2e-3, 6.0e-3, 462.2e-3, 11.24e-9, 28, 24.70e-9),
    "roa": (502.0e-3, 33.0e-3, 469.0e-3, 11.20e-9, 26, 22.96e-9),
}
