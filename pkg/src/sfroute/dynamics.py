"""Discrete-time parallel-update packet simulation.

Each step: nodes collect the packets sent to them in the previous step,
deliver those addressed to themselves, inject a fresh packet with
probability gamma, shuffle the collected set into a sub-queue appended
to the existing queue, and finally every nonempty node forwards its head
packet one hop along its static route. Packets received at step t become
eligible for forwarding at step t+1.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .routing import RouteTable

MAX_LIVE_PACKETS = 10_000_000


class SimulationError(Exception):
    pass


class CongestionOverflow(SimulationError):
    """Live packet count exceeded the memory guard."""


class Packet:
    __slots__ = ("id", "path", "hop_index", "birth_step")

    def __init__(self, pid, path, birth_step):
        self.id = pid
        self.path = path
        self.hop_index = 0
        self.birth_step = birth_step

    @property
    def source(self):
        return self.path[0]

    @property
    def destination(self):
        return self.path[-1]


@dataclass
class SimState:
    """Mutable per-run state: queues, in-flight buffers, counters, rng."""

    n: int
    queues: list = field(default_factory=list)
    in_flight: dict = field(default_factory=dict)  # node -> packets sent last step
    t: int = 0
    live: int = 0
    injected_total: int = 0
    delivered_total: int = 0
    next_id: int = 0
    active: set = field(default_factory=set)  # nodes with nonempty queue

    @classmethod
    def fresh(cls, n):
        return cls(n=n, queues=[deque() for _ in range(n)])

    def queued_packets(self):
        return sum(len(q) for q in self.queues)


def step(state: SimState, g: Graph, routes: RouteTable, gamma: float, rng) -> SimState:
    """Advance one synchronous step in place; returns the same state."""
    if not (0.0 <= gamma <= 1.0):
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    n = state.n
    queues = state.queues
    in_flight = state.in_flight
    nbr_sets = _neighbor_sets(g)

    # (c) injection decisions, drawn in node order via one vectorized pass
    if gamma > 0.0:
        inject_nodes = np.flatnonzero(rng.random(n) < gamma).tolist()
        raw_dests = rng.integers(0, n - 1, size=len(inject_nodes)).tolist()
        inject_dest = {
            v: d + (d >= v) for v, d in zip(inject_nodes, raw_dests)
        }
    else:
        inject_dest = {}

    # (a, b, d) per-node collection, delivery, sub-queue randomization
    touched = set(in_flight)
    touched.update(inject_dest)
    injected = 0
    delivered = 0
    active = state.active
    next_id = state.next_id
    birth = state.t + 1
    for v in sorted(touched):
        bucket = in_flight.pop(v, None)
        if bucket:
            sub = [p for p in bucket if p.path[-1] != v]
            delivered += len(bucket) - len(sub)
        else:
            sub = []
        d = inject_dest.get(v)
        if d is not None:
            p = Packet(next_id, routes.path(v, d), birth)
            next_id += 1
            injected += 1
            sub.append(p)
        if len(sub) > 1:
            order = rng.permutation(len(sub))
            sub = [sub[i] for i in order]
        if sub:
            queues[v].extend(sub)
            active.add(v)
    state.next_id = next_id

    # (e) every nonempty node forwards its head packet, simultaneously
    drained = []
    for v in sorted(active):
        q = queues[v]
        p = q.popleft()
        if not q:
            drained.append(v)
        hop = p.hop_index + 1
        p.hop_index = hop
        path = p.path
        nxt = path[hop]
        if nxt not in nbr_sets[v]:
            raise SimulationError(
                f"packet {p.id} routed over non-edge ({v}, {nxt})"
            )
        if nxt == path[-1]:
            delivered += 1
        else:
            bucket = in_flight.get(nxt)
            if bucket is None:
                in_flight[nxt] = [p]
            else:
                bucket.append(p)
    for v in drained:
        active.discard(v)

    state.t += 1
    state.injected_total += injected
    state.delivered_total += delivered
    state.live += injected - delivered
    if state.live > MAX_LIVE_PACKETS:
        raise CongestionOverflow(
            f"live packets exceeded {MAX_LIVE_PACKETS} at step {state.t}"
        )
    return state


_nbr_cache = {}


def _neighbor_sets(g: Graph):
    key = id(g)
    cached = _nbr_cache.get(key)
    if cached is None or cached[0] is not g:
        _nbr_cache.clear()
        cached = (g, [set(a) for a in g.adjacency])
        _nbr_cache[key] = cached
    return cached[1]


@dataclass
class ThetaEstimate:
    gamma: float
    theta: float
    t_warm: int
    t_meas: int
    seed: int | None = None
    n_series: list | None = None


def run_simulation(
    g: Graph,
    routes: RouteTable,
    gamma: float,
    t_warm: int = 1000,
    t_meas: int = 5000,
    seed=0,
    record_series: bool = False,
    trace_path=None,
) -> ThetaEstimate:
    """Measure the rescaled steady-state packet growth rate theta(gamma).

    theta = [n(t_warm + t_meas) - n(t_warm)] / (N * gamma * t_meas);
    by definition theta = 0 at gamma = 0. Deterministic given the seed.
    """
    if t_warm < 0 or t_meas < 1:
        raise ValueError("need t_warm >= 0 and t_meas >= 1")
    rng = np.random.default_rng(seed)
    state = SimState.fresh(g.n)
    series = [] if record_series else None
    trace = open(trace_path, "w", encoding="utf-8") if trace_path else None
    try:
        if trace:
            trace.write("step,n,injected,delivered\n")
        n_at_warm = 0
        for k in range(t_warm + t_meas):
            inj0, del0 = state.injected_total, state.delivered_total
            step(state, g, routes, gamma, rng)
            if trace:
                trace.write(
                    f"{state.t},{state.live},"
                    f"{state.injected_total - inj0},"
                    f"{state.delivered_total - del0}\n"
                )
            if series is not None:
                series.append(state.live)
            if k + 1 == t_warm:
                n_at_warm = state.live
        if gamma == 0.0:
            theta = 0.0
        else:
            theta = (state.live - n_at_warm) / (g.n * gamma * t_meas)
    finally:
        if trace:
            trace.close()
    return ThetaEstimate(
        gamma=gamma,
        theta=theta,
        t_warm=t_warm,
        t_meas=t_meas,
        seed=seed if isinstance(seed, int) else None,
        n_series=series,
    )


def find_threshold(
    g: Graph,
    routes: RouteTable,
    epsilon: float = 0.02,
    gamma_lo: float = 0.0,
    gamma_hi: float = 1.0,
    width: float = 0.01,
    t_warm: int = 1000,
    t_meas: int = 5000,
    seed=0,
    replicates: int = 3,
) -> float:
    """Empirical congestion threshold by bisection on gamma.

    A probe is supercritical when the majority of `replicates`
    independent runs measure theta > epsilon; this absorbs non-monotone
    noise near the transition. Returns gamma_hi when even gamma_hi is
    subcritical, gamma_lo when gamma_lo is already supercritical, and
    otherwise the midpoint of the final bracket of width <= `width`.
    """
    if not (0.0 <= gamma_lo < gamma_hi <= 1.0):
        raise ValueError("need 0 <= gamma_lo < gamma_hi <= 1")

    probe_index = 0

    def supercritical(gamma):
        nonlocal probe_index
        probe_index += 1
        votes = 0
        for r in range(replicates):
            est = run_simulation(
                g, routes, gamma, t_warm, t_meas,
                seed=(seed, probe_index, r),
            )
            if est.theta > epsilon:
                votes += 1
        return 2 * votes > replicates

    if not supercritical(gamma_hi):
        return gamma_hi
    if gamma_lo > 0.0 and supercritical(gamma_lo):
        return gamma_lo
    lo, hi = gamma_lo, gamma_hi
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if supercritical(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
