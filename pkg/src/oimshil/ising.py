"""Max-cut graphs, Ising problems and their energy/cut evaluation.

Nodes on a lattice are indexed row-major: node ``r * cols + c`` sits at
row ``r``, column ``c``.  Max-cut maps onto Ising with ``J_ij = -w_ij`` so
that minimising ``H(s) = -sum_{i<j} J_ij s_i s_j`` maximises the cut.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import ContractError

NATIVE = "native-ising"
FROM_MAXCUT = "from-maxcut"


def _frozen(a, dtype):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph with ``i < j`` edges and no duplicates."""

    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    shape: tuple[int, int] | None = None

    def __post_init__(self):
        if int(self.n) < 1:
            raise ContractError(f"graph needs at least one node, got n={self.n}")
        i = _frozen(self.rows, np.int64)
        j = _frozen(self.cols, np.int64)
        w = _frozen(self.weights, np.float64)
        if not (i.shape == j.shape == w.shape) or i.ndim != 1:
            raise ContractError("edge arrays must be 1-D and of equal length")
        if len(i):
            if i.min() < 0 or j.max() >= self.n:
                raise ContractError("edge index out of range [0, n)")
            if np.any(i >= j):
                raise ContractError("edges must satisfy i < j (no self-loops)")
            keys = i * self.n + j
            if len(np.unique(keys)) != len(keys):
                raise ContractError("duplicate edge")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "rows", i)
        object.__setattr__(self, "cols", j)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_edges(cls, n, edges, shape=None):
        """Build from an iterable of ``(i, j, w)``; pairs are normalised to ``i < j``."""
        edges = list(edges)
        if not edges:
            return cls(n, [], [], [], shape)
        a = np.array([(min(i, j), max(i, j), w) for i, j, w in edges], dtype=float)
        return cls(n, a[:, 0].astype(np.int64), a[:, 1].astype(np.int64), a[:, 2], shape)

    @property
    def m(self):
        return len(self.weights)

    @property
    def edges(self):
        return [(int(i), int(j), float(w)) for i, j, w in zip(self.rows, self.cols, self.weights)]

    @property
    def total_weight(self):
        return float(self.weights.sum())

    def sorted(self):
        order = np.lexsort((self.cols, self.rows))
        return Graph(self.n, self.rows[order], self.cols[order], self.weights[order], self.shape)


@dataclass(frozen=True, eq=False)
class IsingProblem:
    """Sparse symmetric couplings ``J_ij``; stored once per unordered pair (``i < j``)."""

    n: int
    rows: np.ndarray
    cols: np.ndarray
    couplings: np.ndarray
    provenance: str = NATIVE
    source: Graph | None = field(default=None, repr=False)

    def __post_init__(self):
        g = Graph(self.n, self.rows, self.cols, self.couplings)
        object.__setattr__(self, "n", g.n)
        object.__setattr__(self, "rows", g.rows)
        object.__setattr__(self, "cols", g.cols)
        object.__setattr__(self, "couplings", g.weights)
        if self.provenance not in (NATIVE, FROM_MAXCUT):
            raise ContractError(f"unknown provenance {self.provenance!r}")

    def J(self, i, j):
        """Coupling between ``i`` and ``j`` (symmetric, 0 when absent or ``i == j``)."""
        return self.coupling_map.get((min(i, j), max(i, j)), 0.0)

    @cached_property
    def coupling_map(self):
        return {(int(i), int(j)): float(c) for i, j, c in zip(self.rows, self.cols, self.couplings)}

    @cached_property
    def matrix(self):
        """Symmetric CSR coupling matrix with empty diagonal."""
        r = np.concatenate([self.rows, self.cols])
        c = np.concatenate([self.cols, self.rows])
        v = np.concatenate([self.couplings, self.couplings])
        a = sp.csr_matrix((v, (r, c)), shape=(self.n, self.n))
        a.sort_indices()
        return a


def as_spins(s, n=None):
    """Validate a spin vector (entries exactly -1 or +1) and return it as int8."""
    a = np.asarray(s)
    if a.ndim != 1:
        raise ContractError("spin configuration must be 1-D")
    if n is not None and len(a) != n:
        raise ContractError(f"spin configuration has length {len(a)}, expected {n}")
    if not np.all((a == 1) | (a == -1)):
        raise ContractError("spins must be exactly -1 or +1")
    return a.astype(np.int8)


def kings_graph(rows, cols, weight_rule="all-ones", seed=None):
    """King's-graph lattice: each site joined to its 8-neighbourhood.

    ``weight_rule`` is ``"all-ones"`` or ``"random-sign"``; the latter draws
    each edge weight uniformly from {-1, +1} using ``seed``.
    """
    if int(rows) < 1 or int(cols) < 1:
        raise ContractError(f"lattice dimensions must be positive, got {rows}x{cols}")
    rows, cols = int(rows), int(cols)
    ii, jj = [], []
    # right, down, down-right, down-left: every neighbour pair exactly once
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
                rr, cc = r + dr, c + dc
                if rr < rows and 0 <= cc < cols:
                    v = rr * cols + cc
                    ii.append(min(u, v))
                    jj.append(max(u, v))
    ii = np.array(ii, dtype=np.int64)
    jj = np.array(jj, dtype=np.int64)
    order = np.lexsort((jj, ii))
    ii, jj = ii[order], jj[order]
    if weight_rule == "all-ones":
        w = np.ones(len(ii))
    elif weight_rule == "random-sign":
        rng = np.random.default_rng(seed)
        w = rng.choice(np.array([-1.0, 1.0]), size=len(ii))
    else:
        raise ContractError(f"unknown weight rule {weight_rule!r}")
    return Graph(rows * cols, ii, jj, w, shape=(rows, cols))


def kings_edge_count(rows, cols):
    return rows * (cols - 1) + cols * (rows - 1) + 2 * (rows - 1) * (cols - 1)


def maxcut_to_ising(g):
    return IsingProblem(g.n, g.rows, g.cols, -g.weights, FROM_MAXCUT, source=g)


def hamiltonian(p, s):
    """``H(s) = -sum_{i<j} J_ij s_i s_j``."""
    s = as_spins(s, p.n).astype(np.float64)
    return float(-np.sum(p.couplings * s[p.rows] * s[p.cols]))


def cut_size(g, s):
    s = as_spins(s, g.n)
    return float(g.weights[s[g.rows] != s[g.cols]].sum())


def flip_delta(p, s, k):
    """Change in ``H`` when spin ``k`` flips: ``2 s_k sum_j J_kj s_j``."""
    s = as_spins(s, p.n).astype(np.float64)
    return float(2.0 * s[k] * (p.matrix.getrow(k) @ s)[0])


# -- problem file I/O -------------------------------------------------------

def write_problem(g, path_or_buf, comment=None):
    """Write ``n m`` then one ``i j w`` line per edge, sorted by ``(i, j)``."""
    g = g.sorted()
    lines = []
    if comment:
        lines += [f"# {c}" for c in comment.splitlines()]
    if g.shape is not None:
        lines.append(f"# shape {g.shape[0]} {g.shape[1]}")
    lines.append(f"{g.n} {g.m}")
    lines += [f"{i} {j} {_num(w)}" for i, j, w in g.edges]
    text = "\n".join(lines) + "\n"
    if isinstance(path_or_buf, io.TextIOBase):
        path_or_buf.write(text)
    else:
        Path(path_or_buf).write_text(text)


def _num(w):
    # shortest text that reads back to the same double
    short = f"{w:g}"
    return short if float(short) == w else repr(w)


def read_problem(path_or_buf):
    if isinstance(path_or_buf, io.TextIOBase):
        text = path_or_buf.read()
    else:
        text = Path(path_or_buf).read_text()
    shape = None
    body = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) == 3 and parts[0] == "shape":
                shape = (int(parts[1]), int(parts[2]))
            continue
        body.append((lineno, line.split()))
    if not body:
        raise ContractError("problem file has no header line")
    (lineno, head), edges = body[0], body[1:]
    try:
        n, m = int(head[0]), int(head[1])
    except (IndexError, ValueError):
        raise ContractError(f"line {lineno}: expected 'n m' header") from None
    if len(edges) != m:
        raise ContractError(f"header declares {m} edges, file has {len(edges)}")
    parsed = []
    for lineno, tok in edges:
        if len(tok) != 3:
            raise ContractError(f"line {lineno}: expected 'i j w'")
        try:
            parsed.append((int(tok[0]), int(tok[1]), float(tok[2])))
        except ValueError:
            raise ContractError(f"line {lineno}: malformed edge {' '.join(tok)!r}") from None
    for i, j, _ in parsed:
        if i == j:
            raise ContractError(f"self-loop on node {i}")
    if shape is not None and shape[0] * shape[1] != n:
        shape = None
    return Graph.from_edges(n, parsed, shape)
