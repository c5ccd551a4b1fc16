"""Static routing protocols and route betweenness.

Two protocols are provided: shortest-path (SP) with uniform random
tie-breaking over the shortest-path predecessor DAG, and hub avoidance
(HA), which first routes inside the clusters left after removing the
top-degree nodes and then fills the remaining pairs with full-graph
shortest paths.

Paths are sampled once per unordered pair and assigned to both orders
(reverse symmetry). The same per-source sampler backs both the
materialized RouteTable and the streaming betweenness accumulator, so
their counts agree exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, _components


class RoutingError(Exception):
    pass


# rng stream tags: one independent stream per (seed, phase, source)
_PHASE_SP = 0   # shortest-path sampling (also HA step 1, within clusters)
_PHASE_FILL = 1  # HA step 2, full-graph fill


@dataclass
class RouteTable:
    """One node path per ordered (source, destination) pair.

    Paths are stored once per unordered pair with s < d; the reverse
    order is served as the reversed path, so reverse symmetry holds by
    construction.
    """

    n: int
    protocol: str  # "SP" | "HA"
    seed: int
    ha_fraction: float | None = None
    _paths: dict = field(default_factory=dict, repr=False)

    def path(self, s: int, d: int) -> tuple:
        if s == d:
            raise RoutingError(f"no route from a node to itself ({s})")
        if s < d:
            return self._paths[(s, d)]
        return tuple(reversed(self._paths[(d, s)]))

    def has_pair(self, s, d):
        key = (s, d) if s < d else (d, s)
        return key in self._paths

    def unordered_items(self):
        """Iterate ((s, d), path) with s < d, in sorted pair order."""
        return iter(sorted(self._paths.items()))

    def is_complete(self):
        return len(self._paths) == self.n * (self.n - 1) // 2

    def first_missing_pair(self):
        for s in range(self.n - 1):
            for d in range(s + 1, self.n):
                if (s, d) not in self._paths:
                    return (s, d)
        return None

    def dump(self, path):
        """Debug-scale text dump: one line 's d n1 n2 ... d' per ordered pair."""
        with open(path, "w", encoding="utf-8") as fh:
            for s in range(self.n):
                for d in range(self.n):
                    if s == d:
                        continue
                    nodes = " ".join(str(v) for v in self.path(s, d))
                    fh.write(f"{s} {d} {nodes}\n")


@dataclass
class BetweennessReport:
    """Per-node counts of ordered-pair routes with the node strictly interior."""

    counts: np.ndarray
    n: int
    protocol: str
    seed: int

    @property
    def max_betweenness(self) -> int:
        return int(self.counts.max()) if self.n else 0

    @property
    def argmax_node(self) -> int:
        return int(np.argmax(self.counts))

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(
                f"# B={self.max_betweenness} argmax={self.argmax_node} "
                f"N={self.n} protocol={self.protocol} seed={self.seed}\n"
            )
            fh.write("node_id,b\n")
            for v in range(self.n):
                fh.write(f"{v},{int(self.counts[v])}\n")


def _level_bfs(indptr, indices, n, source, allowed=None):
    """BFS distances from source; -1 for unreachable. Vectorized frontiers."""
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        base = np.repeat(starts, counts)
        step = np.arange(total) - np.repeat(
            np.cumsum(counts) - counts, counts
        )
        nbrs = indices[base + step]
        if allowed is not None:
            nbrs = nbrs[allowed[nbrs]]
        nbrs = nbrs[dist[nbrs] < 0]
        if nbrs.size == 0:
            break
        frontier = np.unique(nbrs)
        dist[frontier] = level
    return dist


def _pred_csr(indptr, indices, tails, dist, allowed=None):
    """CSR of shortest-path predecessors: preds of v are neighbors one level up."""
    mask = (dist[indices] >= 0) & (dist[tails] == dist[indices] + 1)
    if allowed is not None:
        mask &= allowed[indices]
    cm = np.concatenate(([0], np.cumsum(mask)))
    pindptr = cm[indptr]
    pindices = indices[mask]
    return pindptr, pindices


def _sample_level_matrix(dests, dist, pindptr, pindices, rng):
    """Sample one shortest path per destination, uniformly over the DAG.

    Returns (M, L): L[j] = dist to dests[j]; column j of M holds the
    path nodes by level, M[0..L[j], j] = [source, ..., dests[j]].
    Entries above L[j] are unused.
    """
    L = dist[dests]
    m = len(dests)
    max_l = int(L.max())
    M = np.zeros((max_l + 1, m), dtype=np.int64)
    M[L, np.arange(m)] = dests
    cur = dests.copy()
    for level in range(max_l - 1, -1, -1):
        active = L > level
        c = cur[active]
        cnt = pindptr[c + 1] - pindptr[c]
        r = rng.random(c.size)
        pick = pindptr[c] + np.minimum((r * cnt).astype(np.int64), cnt - 1)
        chosen = pindices[pick]
        cur[active] = chosen
        M[level, active] = chosen
    return M, L


def _removal_set(g: Graph, fraction: float):
    """The x highest-degree nodes; degree ties remove the lower id first."""
    if fraction == 0:
        return []
    x = max(1, math.floor(fraction * g.n))
    deg = g.degrees()
    order = sorted(range(g.n), key=lambda v: (-deg[v], v))
    return order[:x]


def _iter_sampled_paths(g: Graph, protocol, seed, fraction=None):
    """Yield (source, dests, M, L) covering every unordered pair once.

    The rng stream for a source depends only on (seed, phase, source),
    so the iteration is reproducible and order-independent across
    sources. HA with fraction 0 degenerates to a single whole-graph
    cluster and consumes rng identically to SP.
    """
    n = g.n
    indptr, indices = g.csr()
    deg = indptr[1:] - indptr[:-1]
    tails = np.repeat(np.arange(n, dtype=np.int64), deg)

    def sample(source, dests, allowed, phase):
        rng = np.random.default_rng((seed, phase, source))
        dist = _level_bfs(indptr, indices, n, source, allowed)
        if np.any(dist[dests] < 0):
            bad = int(dests[dist[dests] < 0][0])
            raise RoutingError(
                f"no path from {source} to {bad}; graph not connected"
            )
        pindptr, pindices = _pred_csr(indptr, indices, tails, dist, allowed)
        return _sample_level_matrix(dests, dist, pindptr, pindices, rng)

    if protocol == "SP":
        for s in range(n - 1):
            dests = np.arange(s + 1, n, dtype=np.int64)
            M, L = sample(s, dests, None, _PHASE_SP)
            yield s, dests, M, L
        return

    if protocol != "HA":
        raise ValueError(f"unknown protocol {protocol!r}")
    if fraction is None:
        raise ValueError("HA requires a removal fraction")
    if not (0 <= fraction < 1):
        raise ValueError(f"fraction must be in [0, 1), got {fraction}")

    removed = _removal_set(g, fraction)
    cluster_id = np.full(n, -1, dtype=np.int64)
    if removed:
        removed_mask = np.zeros(n, dtype=bool)
        removed_mask[removed] = True
        surv_adj = tuple(
            tuple(v for v in nbrs if not removed_mask[v])
            if not removed_mask[u]
            else ()
            for u, nbrs in enumerate(g.adjacency)
        )
        comps, label = _components(surv_adj, n)
        for cid, members in enumerate(comps):
            if len(members) == 1 and removed_mask[members[0]]:
                continue
            for v in members:
                if not removed_mask[v]:
                    cluster_id[v] = cid
    else:
        cluster_id[:] = 0

    allowed_all = None if not removed else ~removed_mask

    # step 1: SP within each surviving cluster
    for cid in np.unique(cluster_id[cluster_id >= 0]):
        members = np.flatnonzero(cluster_id == cid)
        if len(members) < 2:
            continue
        if removed:
            allowed = np.zeros(n, dtype=bool)
            allowed[members] = True
        else:
            allowed = None
        for s in members[:-1]:
            dests = members[members > s]
            M, L = sample(int(s), dests, allowed, _PHASE_SP)
            yield int(s), dests, M, L

    # step 2: full-graph SP for every pair not assigned in step 1
    if removed:
        for s in range(n - 1):
            dests = np.arange(s + 1, n, dtype=np.int64)
            if cluster_id[s] >= 0:
                dests = dests[cluster_id[dests] != cluster_id[s]]
            if dests.size == 0:
                continue
            M, L = sample(s, dests, None, _PHASE_FILL)
            yield s, dests, M, L


def _materialize(g, protocol, seed, fraction=None) -> RouteTable:
    paths = {}
    for s, dests, M, L in _iter_sampled_paths(g, protocol, seed, fraction):
        for j in range(len(dests)):
            d = int(dests[j])
            paths[(s, d)] = tuple(M[: L[j] + 1, j].tolist())
    table = RouteTable(
        n=g.n, protocol=protocol, seed=seed, ha_fraction=fraction, _paths=paths
    )
    return table


def shortest_path_routes(g: Graph, seed) -> RouteTable:
    """SP routing table: one uniformly sampled shortest path per pair."""
    _require_connected(g)
    return _materialize(g, "SP", seed)


def hub_avoidance_routes(g: Graph, fraction: float, seed) -> RouteTable:
    """HA routing table: cluster-internal SP first, full-graph SP fill second."""
    _require_connected(g)
    return _materialize(g, "HA", seed, fraction)


def _require_connected(g):
    if not g.is_connected():
        raise RoutingError("routing requires a connected graph")


def route_betweenness(routes: RouteTable, n: int) -> BetweennessReport:
    """Count, per node, the ordered-pair routes with the node strictly interior."""
    if routes.n != n:
        raise RoutingError(f"table is for n={routes.n}, not {n}")
    if not routes.is_complete():
        missing = routes.first_missing_pair()
        raise RoutingError(f"route table incomplete: missing pair {missing}")
    counts = np.zeros(n, dtype=np.int64)
    for (_, _), path in routes.unordered_items():
        for v in path[1:-1]:
            counts[v] += 2  # both orders of the pair traverse v
    return BetweennessReport(
        counts=counts, n=n, protocol=routes.protocol, seed=routes.seed
    )


def streaming_betweenness(
    g: Graph, protocol: str, seed, fraction: float | None = None
) -> BetweennessReport:
    """Betweenness without materializing the table.

    Consumes the same per-source samples as the materialized
    construction, so counts are identical to route_betweenness on
    the corresponding RouteTable.
    """
    _require_connected(g)
    n = g.n
    counts = np.zeros(n, dtype=np.int64)
    for _, dests, M, L in _iter_sampled_paths(g, protocol, seed, fraction):
        rows = np.arange(M.shape[0])[:, None]
        interior = (rows >= 1) & (rows < L[None, :])
        if np.any(interior):
            counts += np.bincount(M[interior], minlength=n)
    return BetweennessReport(
        counts=counts * 2, n=n, protocol=protocol, seed=seed
    )


def predict_gamma_c(report: BetweennessReport, mode: str = "paper") -> float:
    """Predicted congestion threshold from the maximal betweenness.

    mode="paper": (N-1)/B, capped at the maximal feasible rate 1.
    mode="exact": (N-1)/(B+N-1), which also counts the unit injection
    load entering the bottleneck node's own queue.
    """
    n, b = report.n, report.max_betweenness
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if mode == "paper":
        return 1.0 if b == 0 else min(1.0, (n - 1) / b)
    if mode == "exact":
        return min(1.0, (n - 1) / (b + n - 1))
    raise ValueError(f"unknown mode {mode!r}")
