"""Parameterized greedy heuristics for knapsack and max-weight independent set.

Both families have piecewise-constant value as a function of the exponent
parameter: the output can only change where two items (or two vertices at
some pair of degrees) swap rank in the greedy score.  The breakpoint
functions enumerate those candidate swap points, evaluate the greedy once per
cell midpoint, and merge equal neighbors, which caps piece counts at n^2 + 1
for knapsack and within the n^4 candidate budget for MWIS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .piecewise import PiecewiseFunction1D


@dataclass(frozen=True)
class KnapsackInstance:
    values: tuple[float, ...]
    sizes: tuple[float, ...]
    capacity: float

    def __post_init__(self):
        if len(self.values) != len(self.sizes) or not self.values:
            raise ValueError("need equally many positive values and sizes")
        if any(v <= 0 for v in self.values) or any(s <= 0 for s in self.sizes):
            raise ValueError("values and sizes must be positive")
        if self.capacity <= 0:
            raise ValueError("capacity must be positive")

    @property
    def n(self):
        return len(self.values)

    @classmethod
    def from_csv(cls, text: str, capacity: float) -> "KnapsackInstance":
        vals, sizes = [], []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            v, s = line.split(",")
            vals.append(float(v))
            sizes.append(float(s))
        return cls(tuple(vals), tuple(sizes), float(capacity))


def _pack(inst: KnapsackInstance, order) -> tuple[set[int], float]:
    chosen: set[int] = set()
    used = 0.0
    total = 0.0
    for i in order:
        if used + inst.sizes[i] <= inst.capacity:
            chosen.add(i)
            used += inst.sizes[i]
            total += inst.values[i]
    return chosen, total


def knapsack_greedy(inst: KnapsackInstance, rho: float) -> tuple[set[int], float]:
    """Better of greedy-by-value and greedy-by-value/size^rho packings.

    Ordering ties break by item index; at equal totals the value-order
    packing is returned.  rho = 1 gives the classic 2-approximation.
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    by_value = sorted(range(inst.n), key=lambda i: (-inst.values[i], i))
    by_density = sorted(
        range(inst.n), key=lambda i: (-inst.values[i] / inst.sizes[i] ** rho, i)
    )
    sv, tv = _pack(inst, by_value)
    sd, td = _pack(inst, by_density)
    return (sd, td) if td > tv else (sv, tv)


def knapsack_breakpoints(inst: KnapsackInstance, rho_max: float) -> PiecewiseFunction1D:
    """Piecewise-constant greedy value over rho in [0, rho_max].

    Candidate breakpoints are the pairwise rank-swap points
    ln(v_i/v_j) / ln(s_i/s_j); cells between them are evaluated once at their
    midpoint.  Degenerate pairs (equal values or equal sizes) never swap and
    contribute no candidate.
    """
    if rho_max <= 0:
        raise ValueError("rho_max must be positive")
    cands = set()
    for i in range(inst.n):
        for j in range(i + 1, inst.n):
            if inst.sizes[i] == inst.sizes[j] or inst.values[i] == inst.values[j]:
                continue
            rho = math.log(inst.values[i] / inst.values[j]) / math.log(
                inst.sizes[i] / inst.sizes[j]
            )
            if 0.0 < rho < rho_max:
                cands.add(rho)
    return _evaluate_cells(sorted(cands), rho_max, lambda r: knapsack_greedy(inst, r)[1])


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    adjacency: tuple[frozenset[int], ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.n != len(self.adjacency) or self.n != len(self.weights):
            raise ValueError("adjacency and weights must cover all n vertices")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if v == u:
                    raise ValueError("self-loops are not allowed")
                if u not in self.adjacency[v]:
                    raise ValueError("adjacency must be symmetric")

    @classmethod
    def from_edges(
        cls, n: int, edges: Iterable[tuple[int, int]], weights: Iterable[float]
    ) -> "WeightedGraph":
        adj = [set() for _ in range(n)]
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        return cls(n, tuple(frozenset(a) for a in adj), tuple(weights))

    @classmethod
    def from_text(cls, text: str) -> "WeightedGraph":
        """Edge list 'u v' plus a weight section of 'w v weight' lines."""
        edges = []
        weights: dict[int, float] = {}
        for line in text.splitlines():
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "w":
                weights[int(parts[1])] = float(parts[2])
            else:
                edges.append((int(parts[0]), int(parts[1])))
        n = max(
            max((max(e) for e in edges), default=-1),
            max(weights, default=-1),
        ) + 1
        wvec = tuple(weights.get(v, 1.0) for v in range(n))
        return cls.from_edges(n, edges, wvec)


def mwis_greedy(g: WeightedGraph, rho: float) -> tuple[set[int], float]:
    """Iteratively take the vertex maximizing w(v)/(1+deg(v))^rho.

    Degrees are recomputed on the shrinking graph each round; score ties
    break to the lowest vertex index.  The result is always independent.
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    alive = set(range(g.n))
    chosen: set[int] = set()
    total = 0.0
    while alive:
        best_v = -1
        best_score = -math.inf
        for v in range(g.n):  # ascending order realizes the index tie-break
            if v not in alive:
                continue
            deg = len(g.adjacency[v] & alive)
            score = g.weights[v] / (1 + deg) ** rho
            if score > best_score:
                best_v, best_score = v, score
        chosen.add(best_v)
        total += g.weights[best_v]
        alive.discard(best_v)
        alive -= g.adjacency[best_v]
    return chosen, total


def mwis_breakpoints(g: WeightedGraph, rho_max: float) -> PiecewiseFunction1D:
    """Piecewise-constant MWIS-greedy value over rho in [0, rho_max].

    Candidates cover every weight pair at every degree pair that could occur
    on the shrinking graph (an O(n^4) over-approximation; true discontinuities
    are a subset, verified downstream by grid oracles).
    """
    if rho_max <= 0:
        raise ValueError("rho_max must be positive")
    if g.n > 30:
        raise ValueError("candidate explosion")
    cands = set()
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if g.weights[u] == g.weights[v]:
                continue
            dw = math.log(g.weights[u] / g.weights[v])
            for du in range(g.n):
                for dv in range(g.n):
                    if du == dv:
                        continue
                    rho = dw / math.log((1 + du) / (1 + dv))
                    if 0.0 < rho < rho_max:
                        cands.add(rho)
    return _evaluate_cells(sorted(cands), rho_max, lambda r: mwis_greedy(g, r)[1])


def _evaluate_cells(cands: list[float], rho_max: float, value_at) -> PiecewiseFunction1D:
    edges = [0.0]
    for c in cands:
        if c - edges[-1] > 1e-12:
            edges.append(c)
    edges.append(float(rho_max))
    if edges[-1] - edges[-2] <= 1e-12:
        edges.pop(-2)
    bps, pieces = [], []
    for lo, hi in zip(edges, edges[1:]):
        v = value_at(0.5 * (lo + hi))
        if pieces:
            bps.append(lo)
        pieces.append((0.0, float(v), None))
    return PiecewiseFunction1D(0.0, float(rho_max), bps, pieces)
