"""Exact topological bottleneck bounds at small N.

Brute-force enumeration of vertex separators (minimal sparsity) and of
edge expansion, plus the closed-form scaling exponent of the analytical
betweenness estimate for power-law graphs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import Graph

ENUMERATION_GUARD = 20


class BoundsError(Exception):
    pass


class EnumerationGuardError(BoundsError):
    def __init__(self, n, guard):
        super().__init__(
            f"exhaustive enumeration refused for N={n} > {guard}; "
            f"raise max_nodes explicitly if you accept the 2^N cost"
        )


@dataclass
class SeparatorResult:
    """Minimal-sparsity vertex separator X with bipartition (A, B).

    sparsity Q = |X| / (|A| * |B|); bound = 1/Q is the topological lower
    bound on maximal (unordered-pair) betweenness. For graphs with no
    separator (complete graphs) X/A/B are empty, sparsity is inf and
    bound is 0 by convention.
    """

    separator: tuple
    side_a: tuple
    side_b: tuple
    sparsity: float
    bound: float

    @property
    def exists(self):
        return bool(self.separator)

    def text_block(self):
        lines = [
            "separator_result",
            f"  X = {list(self.separator)}",
            f"  A = {list(self.side_a)}",
            f"  B = {list(self.side_b)}",
            f"  Q = {self.sparsity}",
            f"  B_T = {self.bound}",
        ]
        return "\n".join(lines)

    def csv_row(self):
        fmt = lambda s: ";".join(str(v) for v in s)
        return (
            f"{fmt(self.separator)},{fmt(self.side_a)},{fmt(self.side_b)},"
            f"{self.sparsity!r},{self.bound!r}"
        )


@dataclass
class ExpansionResult:
    """Exact edge expansion: min over A (|A| <= N/2) of cut(A)/|A|."""

    expansion: float
    witness_set: tuple

    def text_block(self):
        return (
            "expansion_result\n"
            f"  chi_e = {self.expansion}\n"
            f"  A = {list(self.witness_set)}"
        )

    def csv_row(self):
        return f"{';'.join(str(v) for v in self.witness_set)},{self.expansion!r}"


def _adjacency_masks(g: Graph):
    masks = []
    for nbrs in g.adjacency:
        m = 0
        for v in nbrs:
            m |= 1 << v
        masks.append(m)
    return masks


def _mask_components(rem_mask, adj):
    """Connected components of the induced subgraph on rem_mask, as bitmasks."""
    comps = []
    remaining = rem_mask
    while remaining:
        seed_bit = remaining & -remaining
        comp = seed_bit
        frontier = seed_bit
        while frontier:
            grow = 0
            f = frontier
            while f:
                bit = f & -f
                f ^= bit
                grow |= adj[bit.bit_length() - 1]
            grow &= remaining & ~comp
            comp |= grow
            frontier = grow
        comps.append(comp)
        remaining &= ~comp
    return comps


def _bits(mask):
    out = []
    while mask:
        bit = mask & -mask
        mask ^= bit
        out.append(bit.bit_length() - 1)
    return out


def _best_split(comp_sizes):
    """Group component sizes into two sides maximizing the size product.

    Subset-sum over achievable side totals; ties resolved toward the
    smaller side total, reconstruction greedy in component index order.
    Returns (membership bools for side A, |A|, |B|).
    """
    total = sum(comp_sizes)
    k = len(comp_sizes)
    # dp[i] = bitset of sums achievable using components i..k-1
    dp = [0] * (k + 1)
    dp[k] = 1
    for i in range(k - 1, -1, -1):
        dp[i] = dp[i + 1] | (dp[i + 1] << comp_sizes[i])
    best_a, best_prod = None, -1
    for a in range(1, total):
        if (dp[0] >> a) & 1:
            prod = a * (total - a)
            if prod > best_prod:
                best_prod, best_a = prod, a
    in_a = [False] * k
    need = best_a
    for i in range(k):
        if comp_sizes[i] <= need and (dp[i + 1] >> (need - comp_sizes[i])) & 1:
            in_a[i] = True
            need -= comp_sizes[i]
    return in_a, best_a, total - best_a


def min_sparsity_separator(g: Graph, max_nodes: int = ENUMERATION_GUARD) -> SeparatorResult:
    """Exhaustive minimal-sparsity vertex separator.

    Enumerates every node subset X with 1 <= |X| <= N-2 whose removal
    disconnects the graph, splits the leftover components into the
    (A, B) pair maximizing |A||B|, and returns the X of minimal
    sparsity Q = |X|/(|A||B|). Ties prefer smaller |X|, then the
    lexicographically smallest X.
    """
    if not g.is_connected():
        raise BoundsError("separator search requires a connected graph")
    n = g.n
    if n > max_nodes:
        raise EnumerationGuardError(n, max_nodes)
    if n < 3:
        return SeparatorResult((), (), (), float("inf"), 0.0)
    adj = _adjacency_masks(g)
    full = (1 << n) - 1
    best = None  # (Q fraction, |X|, X tuple, A tuple, B tuple)
    for x_mask in range(1, full):
        size_x = bin(x_mask).count("1")
        if size_x > n - 2:
            continue
        rem = full & ~x_mask
        comps = _mask_components(rem, adj)
        if len(comps) < 2:
            continue
        sizes = [bin(c).count("1") for c in comps]
        in_a, na, nb = _best_split(sizes)
        q = Fraction(size_x, na * nb)
        x_nodes = tuple(_bits(x_mask))
        key = (q, size_x, x_nodes)
        if best is None or key < best[0]:
            a_mask = 0
            b_mask = 0
            for c, flag in zip(comps, in_a):
                if flag:
                    a_mask |= c
                else:
                    b_mask |= c
            best = (key, tuple(_bits(a_mask)), tuple(_bits(b_mask)))
    if best is None:
        return SeparatorResult((), (), (), float("inf"), 0.0)
    (q, _, x_nodes), a_nodes, b_nodes = best
    return SeparatorResult(
        separator=x_nodes,
        side_a=a_nodes,
        side_b=b_nodes,
        sparsity=float(q),
        bound=float(1 / q),
    )


def edge_expansion(g: Graph, max_nodes: int = ENUMERATION_GUARD) -> ExpansionResult:
    """Exact edge expansion by enumerating all sides A with |A| <= N/2."""
    if not g.is_connected():
        raise BoundsError("edge expansion requires a connected graph")
    n = g.n
    if n > max_nodes:
        raise EnumerationGuardError(n, max_nodes)
    adj = _adjacency_masks(g)
    full = (1 << n) - 1
    best = None  # (chi fraction, |A|, A tuple)
    for a_mask in range(1, full):
        size_a = bin(a_mask).count("1")
        if 2 * size_a > n:
            continue
        not_a = full & ~a_mask
        cut = 0
        m = a_mask
        while m:
            bit = m & -m
            m ^= bit
            cut += bin(adj[bit.bit_length() - 1] & not_a).count("1")
        key = (Fraction(cut, size_a), size_a, tuple(_bits(a_mask)))
        if best is None or key < best:
            best = key
    chi, _, witness = best
    return ExpansionResult(expansion=float(chi), witness_set=witness)


def b_e_exponent(lam: float, with_structural_cutoff: bool = False) -> float:
    """Scaling exponent of the analytical maximal-betweenness estimate.

    Without the structural cutoff: lam/(lam-1). With the cutoff
    (maximum degree ~ sqrt(N)) and 2 < lam < 3, the exponent saturates
    at 3/2, the lam = 3 value.
    """
    if lam <= 2.0:
        raise ValueError(
            f"exponent defined only for lam > 2 (got {lam}); the estimate "
            f"degenerates toward the star-like N^2 regime"
        )
    if with_structural_cutoff and lam < 3.0:
        return 1.5
    return lam / (lam - 1.0)


@dataclass
class BoundCheck:
    holds: bool
    margin: float
    separator: SeparatorResult


def verify_topological_bound(g: Graph, report, max_nodes: int = ENUMERATION_GUARD) -> BoundCheck:
    """Check the central inequality: maximal betweenness >= topological bound.

    The bound counts unordered-pair routes, while reports use the
    ordered convention, so the comparison halves B. Margin is
    (B/2) / B_T, or inf when no separator exists (vacuous bound).
    """
    sep = min_sparsity_separator(g, max_nodes=max_nodes)
    b_half = report.max_betweenness / 2.0
    if sep.bound == 0.0:
        return BoundCheck(holds=True, margin=float("inf"), separator=sep)
    return BoundCheck(
        holds=b_half >= sep.bound,
        margin=b_half / sep.bound,
        separator=sep,
    )
