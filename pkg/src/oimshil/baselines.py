"""Exact and heuristic max-cut baselines.

``brute_force_maxcut`` enumerates every configuration with ``s_0 = +1``;
``tabu_maxcut`` is a single-flip tabu search with incremental gains and
aspiration, restarted from seeded random assignments.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import SizeGuardError
from .ising import as_spins

log = logging.getLogger(__name__)

MAX_BRUTE_N = 24


@dataclass(frozen=True)
class TabuConfig:
    tenure: int = 20
    max_sweeps: int = 2000
    restarts: int = 10
    seed: int = 0


@dataclass(frozen=True, eq=False)
class BaselineResult:
    method: str
    best_cut: float
    spins: np.ndarray
    sweeps_used: int = 0
    seed: int | None = None

    def as_record(self):
        return {
            "method": self.method,
            "best_cut": self.best_cut,
            "spins": [int(x) for x in self.spins],
            "sweeps_used": self.sweeps_used,
            "seed": self.seed,
        }

    def __iter__(self):
        # allows ``cut, spins = tabu_maxcut(...)``
        return iter((self.best_cut, self.spins))


def brute_force_maxcut(g, chunk_bits=16):
    """Exact max cut; ties go to the lexicographically smallest spin vector (-1 < +1)."""
    n = g.n
    if n > MAX_BRUTE_N:
        raise SizeGuardError(f"brute force limited to n <= {MAX_BRUTE_N}, got n={n}")
    if n == 1:
        return BaselineResult("brute", 0.0, np.ones(1, dtype=np.int8), 1)
    free = n - 1
    total = 1 << free
    # bit (free-1-k) of the counter encodes node k+1 (1 -> +1), so counter order is lexicographic
    shifts = np.arange(free - 1, -1, -1, dtype=np.int64)
    best, best_idx = -np.inf, 0
    step = 1 << min(free, chunk_bits)
    w = g.weights
    for start in range(0, total, step):
        idx = np.arange(start, min(start + step, total), dtype=np.int64)
        bits = (idx[:, None] >> shifts) & 1
        s = np.empty((len(idx), n), dtype=np.int8)
        s[:, 0] = 1
        s[:, 1:] = 2 * bits - 1
        cut = (s[:, g.rows] != s[:, g.cols]) @ w
        k = int(np.argmax(cut))
        if cut[k] > best:
            best, best_idx = float(cut[k]), int(idx[k])
    bits = (best_idx >> shifts) & 1
    spins = np.concatenate([[1], 2 * bits - 1]).astype(np.int8)
    return BaselineResult("brute", best, spins, total)


def _adjacency(g):
    n = g.n
    nbr = [[] for _ in range(n)]
    for i, j, w in zip(g.rows.tolist(), g.cols.tolist(), g.weights.tolist()):
        nbr[i].append((j, w))
        nbr[j].append((i, w))
    return nbr


def flip_gains(g, s):
    """Cut change from flipping each node: ``gain_i = sum_j w_ij s_i s_j``."""
    s = np.asarray(s, dtype=np.float64)
    gain = np.zeros(g.n)
    prod = g.weights * s[g.rows] * s[g.cols]
    np.add.at(gain, g.rows, prod)
    np.add.at(gain, g.cols, prod)
    return gain


def _cut(g, s):
    return float(g.weights[s[g.rows] != s[g.cols]].sum())


def _search(g, nbr, s, tenure, max_sweeps, rng, check=False):
    n = g.n
    gain = flip_gains(g, s)
    cur = _cut(g, s)
    best, best_s = cur, s.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    sweeps = 0
    for it in range(1, max_sweeps + 1):
        sweeps = it
        allowed = tabu_until < it
        # aspiration: a tabu move that beats the incumbent is admissible
        allowed |= cur + gain > best
        if not allowed.any():
            continue
        cand = np.where(allowed, gain, -np.inf)
        top = cand.max()
        ties = np.flatnonzero(cand == top)
        k = int(ties[rng.integers(len(ties))]) if len(ties) > 1 else int(ties[0])
        sk = s[k]
        cur += gain[k]
        gain[k] = -gain[k]
        for j, w in nbr[k]:
            gain[j] -= 2.0 * w * s[j] * sk
        s[k] = -sk
        tabu_until[k] = it + tenure
        if check:
            assert np.allclose(gain, flip_gains(g, s)), "incremental gains diverged"
            assert abs(cur - _cut(g, s)) < 1e-9
        if cur > best + 1e-12:
            best, best_s = cur, s.copy()
    return best, best_s, sweeps


def tabu_maxcut(g, cfg=TabuConfig(), check=False):
    """Best cut over ``cfg.restarts`` seeded tabu searches."""
    n = g.n
    tenure = cfg.tenure
    if n > 1 and tenure >= n:
        log.warning("tabu tenure %d >= n=%d, clamping to %d", tenure, n, n - 1)
        tenure = n - 1
    if n == 1 or g.m == 0:
        return BaselineResult("tabu", 0.0, np.ones(n, dtype=np.int8), 0, cfg.seed)
    nbr = _adjacency(g)
    results = []
    used = 0
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        s = rng.choice(np.array([-1, 1], dtype=np.int8), n)
        cut, spins, sweeps = _search(g, nbr, s, tenure, cfg.max_sweeps, rng, check)
        used += sweeps
        results.append((cut, _canonical(spins)))
    # max cut, then lexicographically smallest canonical vector
    cut = max(c for c, _ in results)
    spins = min((tuple(s) for c, s in results if c == cut))
    return BaselineResult("tabu", cut, np.array(spins, dtype=np.int8), used, cfg.seed)


def _canonical(s):
    s = as_spins(s)
    return s if s[0] == 1 else -s


def greedy_maxcut(g, seed=0):
    """Steepest-ascent single flips from a random start until no flip improves."""
    rng = np.random.default_rng([seed, 0])
    s = rng.choice(np.array([-1, 1], dtype=np.int8), g.n)
    nbr = _adjacency(g)
    gain = flip_gains(g, s)
    while gain.max() > 1e-12:
        k = int(np.argmax(gain))
        sk = s[k]
        gain[k] = -gain[k]
        for j, w in nbr[k]:
            gain[j] -= 2.0 * w * s[j] * sk
        s[k] = -sk
    return BaselineResult("greedy", _cut(g, s), _canonical(s), 0, seed)
