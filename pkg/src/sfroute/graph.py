"""Generation and I/O of simple connected substrate graphs.

Degree sequences are drawn from a discrete power law truncated to
[k_min, k_max]; graphs are realized with the configuration model
(uniform stub matching) and reduced to their largest connected
component when connectivity is required.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class GraphError(Exception):
    """Base class for graph construction and I/O failures."""


class GenerationError(GraphError):
    """Random graph generation exhausted its retry budget."""


class EdgeListParseError(GraphError):
    """Malformed edge-list file; carries the offending line number."""

    def __init__(self, message, line_number):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


def structural_cutoff(n: int, exponent: float) -> int:
    """Default maximum degree: floor(sqrt(n)) for 2 < exponent < 3, else n-1."""
    if 2.0 < exponent < 3.0:
        return max(1, math.floor(math.sqrt(n)))
    return n - 1


@dataclass(frozen=True)
class DegreeDistribution:
    """Discrete truncated power law P(k) = A k^-exponent on [k_min, k_max].

    The normalization A is computed by explicit summation over the
    support, so the pmf is exact for any finite cutoff.
    """

    exponent: float
    k_min: int = 3
    k_max: int = 100

    def __post_init__(self):
        if self.exponent <= 2.0:
            raise ValueError(f"exponent must exceed 2, got {self.exponent}")
        if self.k_min < 1:
            raise ValueError(f"k_min must be >= 1, got {self.k_min}")
        if self.k_max < self.k_min:
            raise ValueError(
                f"k_max ({self.k_max}) must be >= k_min ({self.k_min})"
            )

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def normalization(self) -> float:
        k = self.support.astype(float)
        return 1.0 / np.sum(k ** -self.exponent)

    def pmf(self) -> np.ndarray:
        k = self.support.astype(float)
        w = k ** -self.exponent
        return w / w.sum()

    def mean_degree(self) -> float:
        return float(np.sum(self.support * self.pmf()))


@dataclass
class Graph:
    """Immutable simple undirected graph with 0-based contiguous node ids.

    Treat instances as read-only after construction; they are safe to
    share across parallel workers.
    """

    n: int
    adjacency: tuple  # tuple of sorted tuples, one per node
    edge_count: int

    @classmethod
    def from_edges(cls, n, edges):
        """Build from an iterable of (u, v) pairs, validating simplicity."""
        adj = [set() for _ in range(n)]
        count = 0
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"node id out of range in edge ({u}, {v})")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
            count += 1
        return cls(
            n=n,
            adjacency=tuple(tuple(sorted(s)) for s in adj),
            edge_count=count,
        )

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def edges(self):
        """Yield each undirected edge once, as (u, v) with u < v."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield u, v

    def neighbor_sets(self):
        return [frozenset(a) for a in self.adjacency]

    def csr(self):
        """Adjacency in CSR form: (indptr, indices), both int64 arrays."""
        deg = self.degrees()
        indptr = np.concatenate(([0], np.cumsum(deg)))
        indices = np.fromiter(
            (v for nbrs in self.adjacency for v in nbrs),
            dtype=np.int64,
            count=int(indptr[-1]),
        )
        return indptr, indices

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        comp, _ = _components(self.adjacency, self.n)
        return len(comp) == 1

    def validate(self):
        """Raise GraphError on any violation of the simple/undirected invariants."""
        seen_edges = 0
        for u, nbrs in enumerate(self.adjacency):
            if len(set(nbrs)) != len(nbrs):
                raise GraphError(f"repeated neighbor at node {u}")
            if list(nbrs) != sorted(nbrs):
                raise GraphError(f"unsorted neighbor list at node {u}")
            for v in nbrs:
                if v == u:
                    raise GraphError(f"self-loop at node {u}")
                if not (0 <= v < self.n):
                    raise GraphError(f"neighbor {v} out of range at node {u}")
                if u not in self.adjacency[v]:
                    raise GraphError(f"asymmetric edge ({u}, {v})")
                seen_edges += 1
        if seen_edges != 2 * self.edge_count:
            raise GraphError(
                f"edge_count {self.edge_count} inconsistent with adjacency"
            )


def _components(adjacency, n):
    """Connected components as lists of nodes, plus a node->component map."""
    label = [-1] * n
    comps = []
    for start in range(n):
        if label[start] >= 0:
            continue
        cid = len(comps)
        stack = [start]
        label[start] = cid
        members = [start]
        while stack:
            u = stack.pop()
            for v in adjacency[u]:
                if label[v] < 0:
                    label[v] = cid
                    stack.append(v)
                    members.append(v)
        comps.append(sorted(members))
    return comps, label


def sample_degree_sequence(n: int, dist: DegreeDistribution, seed) -> np.ndarray:
    """Draw n i.i.d. degrees from dist, then fix parity.

    If the sum is odd, one uniformly chosen entry is redrawn from the
    pmf until the total is even. Deterministic given the seed.
    """
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    if dist.k_max > n - 1:
        raise ValueError(
            f"k_max ({dist.k_max}) exceeds n-1 ({n - 1})"
        )
    rng = np.random.default_rng(seed)
    support = dist.support
    p = dist.pmf()
    degrees = rng.choice(support, size=n, p=p)
    if degrees.sum() % 2 == 1:
        if not np.any(support % 2 == 0):
            # every redraw keeps each entry odd, so parity can never flip
            raise GenerationError(
                "odd degree sum cannot be repaired: support contains no even degree"
            )
        while degrees.sum() % 2 == 1:
            idx = rng.integers(n)
            degrees[idx] = rng.choice(support, p=p)
    return degrees.astype(np.int64)


def _stub_match(degrees, rng):
    """One uniform stub matching; returns (u, v) arrays, unnormalized."""
    stubs = np.repeat(np.arange(len(degrees), dtype=np.int64), degrees)
    perm = rng.permutation(stubs)
    return perm[0::2], perm[1::2]


def _match_defects(u, v):
    """Indices of edges that are self-loops or duplicates."""
    lo = np.minimum(u, v)
    hi = np.maximum(u, v)
    bad = lo == hi
    order = np.lexsort((hi, lo))
    slo, shi = lo[order], hi[order]
    dup = np.zeros(len(u), dtype=bool)
    same = (slo[1:] == slo[:-1]) & (shi[1:] == shi[:-1])
    dup[order[1:][same]] = True
    return np.flatnonzero(bad | dup)


def build_configuration_model(
    seq,
    seed,
    max_restarts: int = 200,
    collision_policy: str = "rematch",
) -> Graph:
    """Realize a degree sequence as a simple graph via stub matching.

    collision_policy:
      "rematch" - any self-loop or duplicate edge triggers a full
        rematch (uniform over simple matchings; only viable when the
        collision probability is small).
      "rewire"  - repair collisions with degree-preserving double-edge
        swaps; needed for heavy-tailed sequences at larger n, where a
        fully collision-free matching is hopelessly rare.

    Connectivity is NOT guaranteed; see largest_component.
    """
    degrees = np.asarray(seq, dtype=np.int64)
    if degrees.sum() % 2 != 0:
        raise ValueError("degree sequence has odd sum")
    if np.any(degrees < 0):
        raise ValueError("negative degree in sequence")
    if collision_policy not in ("rematch", "rewire"):
        raise ValueError(f"unknown collision_policy {collision_policy!r}")
    rng = np.random.default_rng(seed)
    n = len(degrees)

    if collision_policy == "rematch":
        for _ in range(max_restarts):
            u, v = _stub_match(degrees, rng)
            if len(_match_defects(u, v)) == 0:
                g = Graph.from_edges(n, zip(u.tolist(), v.tolist()))
                return g
        raise GenerationError(
            f"no simple matching in {max_restarts} attempts for degree "
            f"sequence with n={n}, max degree {int(degrees.max())}"
        )

    # rewire policy: match once, then swap away defects
    u, v = _stub_match(degrees, rng)
    u, v = u.tolist(), v.tolist()
    m = len(u)
    edge_multiset = {}
    for i in range(m):
        key = (u[i], v[i]) if u[i] < v[i] else (v[i], u[i])
        edge_multiset[key] = edge_multiset.get(key, 0) + 1

    def is_defect(i):
        a, b = u[i], v[i]
        if a == b:
            return True
        key = (a, b) if a < b else (b, a)
        return edge_multiset[key] > 1

    budget = 200 * m + 1000
    attempts = 0
    pending = [i for i in range(m) if is_defect(i)]
    while pending:
        i = pending[-1]
        if not is_defect(i):
            pending.pop()
            continue
        if attempts >= budget:
            raise GenerationError(
                f"rewiring stalled after {attempts} swap attempts for "
                f"degree sequence with n={n}, max degree {int(degrees.max())}"
            )
        attempts += 1
        j = int(rng.integers(m))
        if j == i:
            continue
        a, b = u[i], v[i]
        c, d = u[j], v[j]
        if rng.integers(2):
            c, d = d, c
        # propose (a,b),(c,d) -> (a,c),(b,d)
        if a == c or b == d:
            continue
        k1 = (a, c) if a < c else (c, a)
        k2 = (b, d) if b < d else (d, b)
        if edge_multiset.get(k1, 0) or edge_multiset.get(k2, 0):
            continue
        for x, y in ((a, b), (c, d)):
            key = (x, y) if x < y else (y, x)
            cnt = edge_multiset[key] - 1
            if cnt:
                edge_multiset[key] = cnt
            else:
                del edge_multiset[key]
        edge_multiset[k1] = 1
        edge_multiset[k2] = 1
        u[i], v[i] = a, c
        u[j], v[j] = b, d
        if is_defect(j):
            pending.append(j)
    g = Graph.from_edges(n, zip(u, v))
    return g


def largest_component(g: Graph):
    """Induced subgraph on the largest component, relabeled 0..m-1.

    Nodes keep their relative order (old id order), so the relabeling is
    stable. Returns (subgraph, mapping) where mapping is old id -> new id.
    """
    if g.n < 1:
        raise ValueError("graph has no nodes")
    comps, _ = _components(g.adjacency, g.n)
    best = max(comps, key=lambda c: (len(c), -c[0]))
    mapping = {old: new for new, old in enumerate(best)}
    edges = [
        (mapping[a], mapping[b])
        for a, b in g.edges()
        if a in mapping and b in mapping
    ]
    sub = Graph.from_edges(len(best), edges)
    return sub, mapping


def save_edge_list(g: Graph, path):
    """Write the edge-list format: '# n=<n>' header, then 'u v' with u < v."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={g.n}\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def load_edge_list(path) -> Graph:
    """Parse the edge-list format written by save_edge_list.

    Lines starting with '#' are comments; a '# n=<n>' comment pins the
    node count, otherwise it is inferred as max id + 1. Malformed lines,
    out-of-range ids, self-loops and duplicates raise EdgeListParseError
    with the line number.
    """
    edges = []
    declared_n = None
    seen = set()
    max_id = -1
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("n=") and declared_n is None:
                    try:
                        declared_n = int(body[2:])
                    except ValueError:
                        raise EdgeListParseError(
                            f"bad node-count comment {line!r}", lineno
                        ) from None
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListParseError(f"expected 'u v', got {line!r}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(
                    f"non-integer node id in {line!r}", lineno
                ) from None
            if u < 0 or v < 0:
                raise EdgeListParseError(f"negative node id in {line!r}", lineno)
            if u == v:
                raise EdgeListParseError(f"self-loop at node {u}", lineno)
            if u > v:
                raise EdgeListParseError(
                    f"edge ({u}, {v}) not in u < v order", lineno
                )
            if (u, v) in seen:
                raise EdgeListParseError(f"duplicate edge ({u}, {v})", lineno)
            if declared_n is not None and v >= declared_n:
                raise EdgeListParseError(
                    f"node id {v} out of range for n={declared_n}", lineno
                )
            seen.add((u, v))
            max_id = max(max_id, v)
            edges.append((u, v))
    n = declared_n if declared_n is not None else max_id + 1
    if n < 1:
        raise GraphError(f"empty edge list in {path}")
    return Graph.from_edges(n, edges)
