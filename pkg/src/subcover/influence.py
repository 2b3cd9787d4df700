"""Influence spread under the independent cascade model.

Activation starts from a seed set and spreads over "live" edges, each edge
being live independently with a constant probability p.  The benefit of a
seed set is its expected number of activated vertices.  Exact evaluation
enumerates all live-edge configurations and is limited to tiny graphs;
production evaluation samples reverse-reachable (RR) sets once and scores
any seed set by the fraction of samples it intersects, which is monotone
and submodular as a function of the seed set for a fixed sample.

Seeding costs follow a degree-with-noise model: a vertex of out-degree d
costs 1 + (1 + |xi|) * d with xi drawn from a centered normal.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Tuple

import numba
import numpy as np

from .core import Subset, SubmodularOracle
from .errors import BudgetExceededError, InstanceError

__all__ = [
    "DirectedGraph",
    "random_graph",
    "RRSetIndex",
    "generate_rr_sets",
    "ris_influence",
    "RISOracle",
    "exact_influence",
    "DegreeNoiseCosts",
    "degree_noise_costs",
]

_EXACT_EDGE_LIMIT = 20
_EXACT_VERTEX_LIMIT = 64
_EXACT_CHUNK = 1 << 15


class DirectedGraph:
    """Directed graph with CSR adjacency in both directions.

    Duplicate edges collapse at construction; self-loops are allowed.  The
    constant per-edge liveness probability lives on the graph (p = 0 is
    accepted for degenerate test setups).
    """

    __slots__ = (
        "vertex_count",
        "edge_probability",
        "edge_array",
        "_out_flat",
        "_out_off",
        "_in_flat",
        "_in_off",
    )

    def __init__(self, vertex_count: int, edges: Iterable[Tuple[int, int]],
                 edge_probability: float):
        if vertex_count < 1:
            raise InstanceError("graph needs at least one vertex")
        if not 0.0 <= edge_probability <= 1.0:
            raise InstanceError(
                f"edge probability must be in [0, 1], got {edge_probability}"
            )
        edge_array = np.asarray(sorted(set((int(u), int(v)) for u, v in edges)),
                                dtype=np.int64)
        if edge_array.size == 0:
            edge_array = edge_array.reshape(0, 2)
        if edge_array.size and (edge_array.min() < 0
                                or edge_array.max() >= vertex_count):
            raise InstanceError("edge endpoint outside 0..vertex_count-1")
        self.vertex_count = vertex_count
        self.edge_probability = float(edge_probability)
        self.edge_array = edge_array
        self.edge_array.setflags(write=False)
        self._out_flat, self._out_off = _build_csr(
            edge_array[:, 0], edge_array[:, 1], vertex_count
        )
        self._in_flat, self._in_off = _build_csr(
            edge_array[:, 1], edge_array[:, 0], vertex_count
        )

    @property
    def edge_count(self) -> int:
        return self.edge_array.shape[0]

    def out_neighbors(self, v: int) -> np.ndarray:
        return self._out_flat[self._out_off[v] : self._out_off[v + 1]]

    def in_neighbors(self, v: int) -> np.ndarray:
        return self._in_flat[self._in_off[v] : self._in_off[v + 1]]

    @property
    def out_degrees(self) -> np.ndarray:
        return np.diff(self._out_off)

    def content_hash(self) -> str:
        """Stable digest of the vertex count and collapsed edge set."""
        digest = hashlib.sha256()
        digest.update(self.vertex_count.to_bytes(8, "little"))
        digest.update(np.ascontiguousarray(self.edge_array).tobytes())
        return digest.hexdigest()


def _build_csr(src: np.ndarray, dst: np.ndarray, vertex_count: int):
    order = np.argsort(src, kind="stable")
    flat = dst[order].astype(np.int64)
    counts = np.bincount(src, minlength=vertex_count)
    off = np.zeros(vertex_count + 1, dtype=np.int64)
    np.cumsum(counts, out=off[1:])
    flat.setflags(write=False)
    off.setflags(write=False)
    return flat, off


def random_graph(
    vertex_count: int, mean_out_degree: float, edge_probability: float, seed: int
) -> DirectedGraph:
    """Seeded random digraph: each ordered pair u != v is an edge with
    probability mean_out_degree / (vertex_count - 1)."""
    if vertex_count < 2:
        raise InstanceError("random_graph needs at least two vertices")
    q = mean_out_degree / (vertex_count - 1)
    if not 0.0 <= q <= 1.0:
        raise InstanceError(f"mean out-degree {mean_out_degree} is infeasible")
    rng = np.random.default_rng(seed)
    adjacency = rng.random((vertex_count, vertex_count)) < q
    np.fill_diagonal(adjacency, False)
    edges = np.argwhere(adjacency)
    return DirectedGraph(vertex_count, edges, edge_probability)


@dataclass(frozen=True)
class RRSetIndex:
    """A fixed sample of reverse-reachable sets plus an inverted index.

    ``sets_flat``/``sets_off`` store the vertices of each RR set in CSR
    form; ``inv_flat``/``inv_off`` map each vertex to the ids of the RR
    sets containing it.  Every RR set contains at least its root.
    """

    vertex_count: int
    sample_count: int
    seed: int
    sets_flat: np.ndarray = field(repr=False)
    sets_off: np.ndarray = field(repr=False)
    inv_flat: np.ndarray = field(repr=False)
    inv_off: np.ndarray = field(repr=False)

    @classmethod
    def from_sets(cls, vertex_count: int, rr_sets, seed: int = 0) -> "RRSetIndex":
        """Build an index from explicit vertex collections (tests, cache)."""
        m = len(rr_sets)
        arrays = []
        for i, s in enumerate(rr_sets):
            arr = np.unique(np.asarray(list(s), dtype=np.int64))
            if arr.size == 0:
                raise InstanceError(f"RR set {i} is empty")
            if arr[0] < 0 or arr[-1] >= vertex_count:
                raise InstanceError(f"RR set {i} contains an out-of-range vertex")
            arrays.append(arr)
        sets_flat = (
            np.concatenate(arrays) if arrays else np.empty(0, dtype=np.int64)
        )
        sets_off = np.zeros(m + 1, dtype=np.int64)
        np.cumsum([a.size for a in arrays], out=sets_off[1:])
        inv_flat, inv_off = _invert(sets_flat, sets_off, vertex_count)
        for arr in (sets_flat, sets_off, inv_flat, inv_off):
            arr.setflags(write=False)
        return cls(vertex_count, m, seed, sets_flat, sets_off, inv_flat, inv_off)

    def rr_set(self, i: int) -> np.ndarray:
        return self.sets_flat[self.sets_off[i] : self.sets_off[i + 1]]

    def sets_containing(self, vertex: int) -> np.ndarray:
        return self.inv_flat[self.inv_off[vertex] : self.inv_off[vertex + 1]]


def _invert(sets_flat: np.ndarray, sets_off: np.ndarray, vertex_count: int):
    m = sets_off.size - 1
    ids = np.repeat(
        np.arange(m, dtype=np.int32), np.diff(sets_off).astype(np.int64)
    )
    order = np.argsort(sets_flat, kind="stable")
    inv_flat = ids[order]
    counts = np.bincount(sets_flat, minlength=vertex_count)
    inv_off = np.zeros(vertex_count + 1, dtype=np.int64)
    np.cumsum(counts, out=inv_off[1:])
    return inv_flat, inv_off


def generate_rr_sets(graph: DirectedGraph, m: int, seed: int) -> RRSetIndex:
    """Sample m reverse-reachable sets.

    Each sample picks a uniform root and walks reversed edges breadth
    first, traversing each in-edge independently with probability p; the
    RR set is everything reached, root included.  Deterministic per seed:
    roots are drawn in one batch, then each sample consumes its edge draws
    in BFS order.
    """
    if m < 1:
        raise InstanceError("need at least one RR sample")
    rng = np.random.default_rng(seed)
    v_count = graph.vertex_count
    p = graph.edge_probability
    roots = rng.integers(0, v_count, size=m)
    arrays = []
    for root in roots.tolist():
        visited = {root}
        queue = deque((root,))
        while queue:
            w = queue.popleft()
            parents = graph.in_neighbors(w)
            if parents.size == 0:
                continue
            live = parents[rng.random(parents.size) < p]
            for u in live.tolist():
                if u not in visited:
                    visited.add(u)
                    queue.append(u)
        arrays.append(
            np.sort(np.fromiter(visited, dtype=np.int64, count=len(visited)))
        )
    sets_flat = np.concatenate(arrays)
    sets_off = np.zeros(m + 1, dtype=np.int64)
    np.cumsum([a.size for a in arrays], out=sets_off[1:])
    inv_flat, inv_off = _invert(sets_flat, sets_off, v_count)
    for arr in (sets_flat, sets_off, inv_flat, inv_off):
        arr.setflags(write=False)
    return RRSetIndex(v_count, m, seed, sets_flat, sets_off, inv_flat, inv_off)


@numba.njit(cache=True)
def _count_hits(members, inv_flat, inv_off, stamps, stamp):  # pragma: no cover
    hits = 0
    for k in range(members.size):
        v = members[k]
        for j in range(inv_off[v], inv_off[v + 1]):
            i = inv_flat[j]
            if stamps[i] != stamp:
                stamps[i] = stamp
                hits += 1
    return hits


def _hit_count(index: RRSetIndex, members: np.ndarray, stamps, stamp) -> int:
    return int(_count_hits(members, index.inv_flat, index.inv_off, stamps, stamp))


def ris_influence(index: RRSetIndex, x_set: Subset, vertex_count: int) -> float:
    """|V| * (RR sets intersecting X) / m, the sampled influence estimate."""
    stamps = np.zeros(index.sample_count, dtype=np.int64)
    hits = _hit_count(index, x_set.indices(), stamps, 1)
    return vertex_count * hits / index.sample_count


class RISOracle(SubmodularOracle):
    """Submodular oracle over a fixed RR sample.

    Evaluations reuse a stamp buffer, so each costs one pass over the
    members' inverted-index lists.  For a fixed sample the estimate is
    monotone and submodular in the seed set; it approximates the true
    expected activation only in distribution over samples.
    """

    def __init__(self, index: RRSetIndex, vertex_count: int):
        super().__init__()
        self.index = index
        self.vertex_count = vertex_count
        self._stamps = np.zeros(index.sample_count, dtype=np.int64)
        self._stamp = 0

    def _value(self, subset: Subset) -> float:
        self._stamp += 1
        hits = _hit_count(self.index, subset.indices(), self._stamps, self._stamp)
        return self.vertex_count * hits / self.index.sample_count


def exact_influence(graph: DirectedGraph, x_set: Subset) -> float:
    """Exact expected activation by live-edge enumeration.

    Sums P(configuration) * |reachable(X)| over all 2^|E| live-edge
    configurations, processed in chunks to bound memory.  Guarded to
    |E| <= 20 and |V| <= 64 (vertex sets are packed into unsigned words).
    """
    E = graph.edge_count
    if E > _EXACT_EDGE_LIMIT:
        raise BudgetExceededError(
            f"exact influence capped at |E| <= {_EXACT_EDGE_LIMIT}, got {E}"
        )
    V = graph.vertex_count
    if V > _EXACT_VERTEX_LIMIT:
        raise BudgetExceededError(
            f"exact influence capped at |V| <= {_EXACT_VERTEX_LIMIT}, got {V}"
        )
    p = graph.edge_probability
    edges = graph.edge_array
    seed_mask = np.uint64(x_set.mask)
    total = 0.0
    n_cfg = 1 << E
    for start in range(0, n_cfg, _EXACT_CHUNK):
        cfg = np.arange(start, min(start + _EXACT_CHUNK, n_cfg), dtype=np.uint64)
        adj = np.zeros((cfg.size, V), dtype=np.uint64)
        for ei in range(E):
            u, v = int(edges[ei, 0]), int(edges[ei, 1])
            live = ((cfg >> np.uint64(ei)) & np.uint64(1)).astype(bool)
            adj[live, u] |= np.uint64(1 << v)
        reach = np.full(cfg.size, seed_mask, dtype=np.uint64)
        for _ in range(V):
            new = reach.copy()
            for u in range(V):
                active = ((reach >> np.uint64(u)) & np.uint64(1)).astype(bool)
                new[active] |= adj[active, u]
            if np.array_equal(new, reach):
                break
            reach = new
        live_counts = np.bitwise_count(cfg)
        probabilities = (p ** live_counts.astype(np.float64)) * (
            (1.0 - p) ** (E - live_counts).astype(np.float64)
        )
        total += float(
            np.sum(probabilities * np.bitwise_count(reach).astype(np.float64))
        )
    return total


@dataclass(frozen=True)
class DegreeNoiseCosts:
    """Per-vertex seeding costs 1 + (1 + |xi|) * out_degree, xi ~ N(0, sigma).

    Every cost is >= 1 and a degree-0 vertex costs exactly 1.
    """

    costs: np.ndarray
    sigma: float
    seed: int


def degree_noise_costs(
    graph: DirectedGraph, sigma: float, seed: int
) -> DegreeNoiseCosts:
    """Draw the noise vector from a seeded PCG64 generator (numpy's normal
    transform), making costs reproducible per seed."""
    if sigma < 0.0:
        raise InstanceError(f"sigma must be >= 0, got {sigma}")
    rng = np.random.default_rng(seed)
    xi = rng.normal(0.0, sigma, size=graph.vertex_count)
    costs = 1.0 + (1.0 + np.abs(xi)) * graph.out_degrees.astype(np.float64)
    costs.setflags(write=False)
    return DegreeNoiseCosts(costs=costs, sigma=float(sigma), seed=seed)
