"""Experiment orchestration: gamma sweeps, scaling studies, exponent fits.

All randomness flows from a single master seed; per-cell seeds are
derived deterministically from (master seed, cell coordinates), so
re-running a study reproduces byte-identical output regardless of
execution order or worker count.
"""
from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from . import __version__
from .graph import (
    DegreeDistribution,
    GenerationError,
    build_configuration_model,
    largest_component,
    sample_degree_sequence,
    structural_cutoff,
)
from .routing import (
    hub_avoidance_routes,
    predict_gamma_c,
    shortest_path_routes,
    streaming_betweenness,
)
from .dynamics import run_simulation

SCAN_FIELDS = ["protocol", "gamma", "theta", "replica", "seed"]
SCALING_FIELDS = [
    "N", "protocol", "replica", "B", "gamma_c_paper", "gamma_c_exact", "seed",
]

DEFAULT_SCALING_N = [250, 500, 1000, 2000, 4000]


class ConfigError(Exception):
    pass


@dataclass
class ExperimentConfig:
    n_list: list = field(default_factory=lambda: list(DEFAULT_SCALING_N))
    exponent: float = 2.5
    k_min: int = 3
    cutoff: object = "sqrt"  # "sqrt" | integer | None (meaning n - 1)
    protocols: list = field(default_factory=lambda: ["SP", "HA"])
    ha_fraction: float = 0.01
    gammas: list = field(default_factory=list)
    t_warm: int = 1000
    t_meas: int = 5000
    replicas: int = 10
    master_seed: int = 0
    out_dir: str = "."
    graph_file: object = None  # edge-list path; skips CM generation when set

    @classmethod
    def from_json(cls, path, overrides=None):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls.from_dict(data, overrides)

    @classmethod
    def from_dict(cls, data, overrides=None):
        merged = dict(data)
        if overrides:
            merged.update({k: v for k, v in overrides.items() if v is not None})
        known = set(cls.__dataclass_fields__)
        unknown = set(merged) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**merged)
        cfg.validate()
        return cfg

    def validate(self):
        if not self.n_list or any(n < 2 for n in self.n_list):
            raise ConfigError(f"n_list must contain sizes >= 2, got {self.n_list}")
        if self.exponent <= 2.0:
            raise ConfigError(f"exponent must exceed 2, got {self.exponent}")
        if self.k_min < 1:
            raise ConfigError(f"k_min must be >= 1, got {self.k_min}")
        if self.cutoff not in ("sqrt", None) and not isinstance(self.cutoff, int):
            raise ConfigError(f"cutoff must be 'sqrt', an integer, or null")
        bad = [p for p in self.protocols if p not in ("SP", "HA")]
        if bad or not self.protocols:
            raise ConfigError(f"protocols must be a nonempty subset of SP/HA")
        if not (0.0 <= self.ha_fraction < 1.0):
            raise ConfigError(f"ha_fraction must be in [0, 1)")
        if any(not (0.0 <= x <= 1.0) for x in self.gammas):
            raise ConfigError(f"gammas must lie in [0, 1]")
        if self.t_warm < 0 or self.t_meas < 1:
            raise ConfigError("need t_warm >= 0 and t_meas >= 1")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")

    def cutoff_for(self, n):
        if self.cutoff == "sqrt":
            return structural_cutoff(n, self.exponent)
        if self.cutoff is None:
            return n - 1
        return int(self.cutoff)

    def to_json_string(self):
        return json.dumps(asdict(self), sort_keys=True)


def derive_seed(master, *key) -> int:
    """Stable per-cell integer seed from the master seed and coordinates."""
    ss = np.random.SeedSequence([int(master), *(int(k) for k in key)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_graph(n, cfg: ExperimentConfig, seed, max_attempts=10):
    """Generate one connected substrate graph of target size n.

    Returns (graph, meta) where meta records the realized node count
    after largest-component extraction and the number of regeneration
    retries; the realized count is what enters all threshold formulas.

    When cfg.graph_file is set, that edge list is loaded instead and the
    generator parameters are ignored.
    """
    if cfg.graph_file is not None:
        from .graph import load_edge_list

        g = load_edge_list(cfg.graph_file)
        return g, {"target_n": g.n, "realized_n": g.n, "retries": 0}
    dist = DegreeDistribution(
        exponent=cfg.exponent, k_min=cfg.k_min, k_max=cfg.cutoff_for(n)
    )
    last_error = None
    for attempt in range(max_attempts):
        attempt_seed = seed if attempt == 0 else derive_seed(seed, attempt)
        try:
            seq = sample_degree_sequence(n, dist, attempt_seed)
            raw = build_configuration_model(
                seq, derive_seed(attempt_seed, 1), collision_policy="rewire"
            )
        except GenerationError as exc:
            last_error = exc
            continue
        g, _ = largest_component(raw)
        meta = {"target_n": n, "realized_n": g.n, "retries": attempt}
        return g, meta
    raise GenerationError(
        f"graph generation failed after {max_attempts} attempts: {last_error}"
    )


def _routes_for(g, protocol, cfg, seed):
    if protocol == "SP":
        return shortest_path_routes(g, seed)
    return hub_avoidance_routes(g, cfg.ha_fraction, seed)


def scan_gamma(cfg: ExperimentConfig, out_path=None):
    """theta(gamma) table over the configured grid, protocols and replicas."""
    cfg.validate()
    if cfg.graph_file is None and len(cfg.n_list) != 1:
        raise ConfigError("scan_gamma expects exactly one entry in n_list")
    n = None if cfg.graph_file is not None else cfg.n_list[0]
    if n is not None and n > 2000:
        raise ConfigError(
            f"dynamics runs are limited to n <= 2000 (got {n})"
        )
    if not cfg.gammas:
        raise ConfigError("scan_gamma needs a nonempty gamma grid")
    rows = []
    for replica in range(cfg.replicas):
        g, _ = make_graph(n, cfg, derive_seed(cfg.master_seed, 1, 0, replica))
        if g.n > 2000:
            raise ConfigError(
                f"dynamics runs are limited to n <= 2000 (got {g.n})"
            )
        for pi, protocol in enumerate(cfg.protocols):
            routes = _routes_for(
                g, protocol, cfg, derive_seed(cfg.master_seed, 2, 0, replica, pi)
            )
            for gi, gamma in enumerate(cfg.gammas):
                sim_seed = derive_seed(cfg.master_seed, 3, 0, replica, pi, gi)
                est = run_simulation(
                    g, routes, gamma, cfg.t_warm, cfg.t_meas, seed=sim_seed
                )
                rows.append(
                    {
                        "protocol": protocol,
                        "gamma": gamma,
                        "theta": est.theta,
                        "replica": replica,
                        "seed": sim_seed,
                    }
                )
    rows.sort(key=lambda r: (r["protocol"], r["gamma"], r["replica"]))
    if out_path:
        write_csv(out_path, SCAN_FIELDS, rows, cfg)
    return rows


def _scaling_cell(args):
    cfg, ni, replica = args
    n = cfg.n_list[ni]
    g, meta = make_graph(n, cfg, derive_seed(cfg.master_seed, 1, ni, replica))
    out = []
    for pi, protocol in enumerate(cfg.protocols):
        route_seed = derive_seed(cfg.master_seed, 2, ni, replica, pi)
        report = streaming_betweenness(
            g,
            protocol,
            route_seed,
            cfg.ha_fraction if protocol == "HA" else None,
        )
        out.append(
            {
                "N": g.n,  # realized size after largest-component extraction
                "protocol": protocol,
                "replica": replica,
                "B": report.max_betweenness,
                "gamma_c_paper": predict_gamma_c(report, "paper"),
                "gamma_c_exact": predict_gamma_c(report, "exact"),
                "seed": route_seed,
            }
        )
    return out


def scaling_study(cfg: ExperimentConfig, out_path=None, workers: int = 1):
    """Maximal betweenness and threshold predictions versus system size.

    Betweenness is accumulated per source (no dynamics, no materialized
    route table), which keeps sizes up to a few thousand tractable.
    """
    cfg.validate()
    cells = [
        (cfg, ni, replica)
        for ni in range(len(cfg.n_list))
        for replica in range(cfg.replicas)
    ]
    rows = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for out in pool.map(_scaling_cell, cells):
                rows.extend(out)
    else:
        for cell in cells:
            rows.extend(_scaling_cell(cell))
    rows.sort(key=lambda r: (r["N"], r["protocol"], r["replica"]))
    if out_path:
        write_csv(out_path, SCALING_FIELDS, rows, cfg)
    return rows


@dataclass
class FitResult:
    slope: float
    intercept: float
    r_squared: float


def fit_exponent(pairs) -> FitResult:
    """Least-squares power-law fit on (N, value) pairs.

    Replicas sharing an N are aggregated by median before the OLS fit
    on (log N, log value). Requires >= 3 distinct N and positive values.
    """
    grouped = {}
    for n, value in pairs:
        if value <= 0:
            raise ValueError(f"nonpositive value in fit input: ({n}, {value})")
        if n <= 0:
            raise ValueError(f"nonpositive N in fit input: ({n}, {value})")
        grouped.setdefault(n, []).append(value)
    if len(grouped) < 3:
        raise ValueError(
            f"need at least 3 distinct N values, got {len(grouped)}"
        )
    ns = np.array(sorted(grouped))
    medians = np.array([np.median(grouped[n]) for n in ns])
    x = np.log(ns)
    y = np.log(medians)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(slope=float(slope), intercept=float(intercept), r_squared=r2)


def fit_scaling_csv(rows):
    """Per-protocol exponent fits from scaling-study rows."""
    fits = {}
    for protocol in sorted({r["protocol"] for r in rows}):
        pairs = [
            (r["N"], r["B"]) for r in rows if r["protocol"] == protocol
        ]
        fits[protocol] = fit_exponent(pairs)
    return fits


def _format_value(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, fieldnames, rows, cfg=None, extra_comments=()):
    """CSV with '#' header comments embedding config and code version."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# version={__version__}\n")
        if cfg is not None:
            fh.write(f"# config={cfg.to_json_string()}\n")
        for line in extra_comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(row[k]) for k in fieldnames) + "\n")


def read_csv(path):
    """Read a harness CSV back into a list of dicts (numbers parsed)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            values = line.split(",")
            row = {}
            for key, raw in zip(header, values):
                try:
                    row[key] = int(raw)
                except ValueError:
                    try:
                        row[key] = float(raw)
                    except ValueError:
                        row[key] = raw
            rows.append(row)
    return rows
