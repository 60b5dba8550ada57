"""Communication graphs and the adversarial lower-bound scenario families.

Graphs are undirected, simple and immutable.  Nodes are dense integers
``0..n-1``; adjacency is stored as sorted neighbor tuples, plus a CSR view
(``indptr``/``indices``) that the simulation engine consumes directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class InvalidGraphError(ValueError):
    """Raised for bad sizes, parameters or arguments to a graph generator."""


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise InvalidGraphError("adjacency must have one entry per node")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 1:
            raise InvalidGraphError(f"graph needs at least one node, got n={n}")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InvalidGraphError(f"self-loop at node {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    @property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def num_edges(self) -> int:
        return int(self.degrees.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """Sorted list of ``(u, v)`` pairs with ``u < v``."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(self.degrees)
        indices = np.fromiter(
            (v for a in self.adjacency for v in a), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices

    def validate(self) -> None:
        for u, nb in enumerate(self.adjacency):
            if list(nb) != sorted(set(nb)):
                raise InvalidGraphError(f"neighbors of {u} are not sorted and unique")
            for v in nb:
                if v == u:
                    raise InvalidGraphError(f"self-loop at node {u}")
                if not 0 <= v < self.n:
                    raise InvalidGraphError(f"neighbor {v} of {u} out of range")
                if u not in self.adjacency[v]:
                    raise InvalidGraphError(f"edge ({u}, {v}) is not symmetric")


@dataclass(frozen=True)
class LBScenario:
    """A lower-bound execution: topology, wake rounds and clique labels."""

    graph: Graph
    wakeup: tuple[int, ...]
    group_labels: tuple[str, ...]
    params: dict = field(default_factory=dict)

    def groups(self, prefix: str = "") -> dict[str, list[int]]:
        """Map each label starting with ``prefix`` to its member nodes."""
        out: dict[str, list[int]] = {}
        for u, lab in enumerate(self.group_labels):
            if lab.startswith(prefix):
                out.setdefault(lab, []).append(u)
        return out


def _check_size(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidGraphError(f"n must be a positive integer, got {n!r}")


def make_clique(n: int) -> Graph:
    _check_size(n)
    return Graph(n, tuple(tuple(v for v in range(n) if v != u) for u in range(n)))


def make_disjoint_pairs(n: int) -> Graph:
    """Perfect matching ``{0,1}, {2,3}, ...``."""
    _check_size(n)
    if n % 2:
        raise InvalidGraphError(f"disjoint pairs need an even n, got {n}")
    return Graph.from_edges(n, ((u, u + 1) for u in range(0, n, 2)))


def make_path(n: int) -> Graph:
    _check_size(n)
    return Graph.from_edges(n, ((u, u + 1) for u in range(n - 1)))


def make_gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p); deterministic given ``seed``."""
    _check_size(n)
    if not 0.0 <= p <= 1.0:
        raise InvalidGraphError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def connect_bipartite(g: Graph, a: Iterable[int], b: Iterable[int]) -> Graph:
    """Return ``g`` plus every edge between node sets ``a`` and ``b``."""
    a, b = set(a), set(b)
    if a & b:
        raise InvalidGraphError("bipartite sides must be disjoint")
    for u in a | b:
        if not 0 <= u < g.n:
            raise InvalidGraphError(f"node {u} out of range for n={g.n}")
    extra = ((u, v) for u in a for v in b)
    return Graph.from_edges(g.n, list(g.edges()) + list(extra))


class _Builder:
    """Accumulates labelled cliques and inter-clique bicliques."""

    def __init__(self):
        self.labels: list[str] = []
        self.wake: list[int] = []
        self.edges: list[tuple[int, int]] = []

    def clique(self, label: str, size: int, wake: int, sub_labels: Sequence[str] | None = None):
        start = len(self.labels)
        nodes = list(range(start, start + size))
        for idx in range(size):
            self.labels.append(sub_labels[idx] if sub_labels else label)
            self.wake.append(wake)
        self.edges.extend((u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:])
        return nodes

    def biclique(self, a: Sequence[int], b: Sequence[int]):
        self.edges.extend((u, v) for u in a for v in b)

    def build(self, params: dict) -> LBScenario:
        g = Graph.from_edges(len(self.labels), self.edges)
        g.validate()
        return LBScenario(g, tuple(self.wake), tuple(self.labels), params)


def make_lb_case1(k: int, clique_scale: int, p: float, ell: int) -> LBScenario:
    """Case 1 family: nodes hearing only collisions stay silent forever.

    ``k-1`` cliques ``C_i`` of ``k * clique_scale`` nodes, each split into
    sub-cliques ``C_i(j)``, and ``k`` cliques ``U_j`` of ``clique_scale``
    nodes.  ``U_j`` is completely joined to ``C_i(j)`` for every ``i``.
    ``C_i`` wakes in round ``i``; all ``U_j`` wake in round ``ell``.
    """
    if k < 2:
        raise InvalidGraphError(f"case 1 needs k >= 2, got {k}")
    if clique_scale < 1 or ell < 1:
        raise InvalidGraphError("clique_scale and ell must be >= 1")
    if not 0.0 < p <= 1.0:
        raise InvalidGraphError(f"p must lie in (0, 1], got {p}")
    s = clique_scale
    b = _Builder()
    sub: dict[tuple[int, int], list[int]] = {}
    for i in range(1, k):
        labels = [f"C_{i}({j})" for j in range(1, k + 1) for _ in range(s)]
        nodes = b.clique(f"C_{i}", k * s, wake=i, sub_labels=labels)
        for j in range(1, k + 1):
            sub[i, j] = nodes[(j - 1) * s: j * s]
    for j in range(1, k + 1):
        u_nodes = b.clique(f"U_{j}", s, wake=ell)
        for i in range(1, k):
            b.biclique(u_nodes, sub[i, j])
    return b.build(dict(case=1, k=k, clique_scale=s, p=p, ell=ell, q=k // 4))


def make_lb_case2(
    k: int, clique_scale: int, p: float, p_prime: float, ell: int, m: int
) -> LBScenario:
    """Case 2 family: nodes hearing only collisions beep after ``m`` rounds.

    ``k`` cliques ``U_j`` and ``m-1`` cliques ``C_h``.  ``U_j`` is joined to
    ``U_i`` for ``max(1, j-q) <= i < j`` (``q = k // 4``) and, when ``j < m``,
    to every existing ``C_h`` with ``j <= h <= m``.  ``C_i`` wakes in round
    ``i``, ``U_j`` in round ``ell + j``.
    """
    if k < 8:
        raise InvalidGraphError(f"case 2 needs k >= 8 so that q >= 2, got {k}")
    if m < 2:
        raise InvalidGraphError(f"case 2 needs m >= 2, got {m}")
    if clique_scale < 1 or ell < 1:
        raise InvalidGraphError("clique_scale and ell must be >= 1")
    for name, val in (("p", p), ("p_prime", p_prime)):
        if not 0.0 < val <= 1.0:
            raise InvalidGraphError(f"{name} must lie in (0, 1], got {val}")
    q = k // 4
    s = clique_scale
    b = _Builder()
    c_nodes = {h: b.clique(f"C_{h}", s, wake=h) for h in range(1, m)}
    u_nodes: dict[int, list[int]] = {}
    for j in range(1, k + 1):
        u_nodes[j] = b.clique(f"U_{j}", s, wake=ell + j)
        for i in range(max(1, j - q), j):
            b.biclique(u_nodes[j], u_nodes[i])
        if j < m:
            for h in range(j, m + 1):
                if h in c_nodes:
                    b.biclique(u_nodes[j], c_nodes[h])
    return b.build(dict(case=2, k=k, clique_scale=s, p=p, p_prime=p_prime, ell=ell, m=m, q=q))
