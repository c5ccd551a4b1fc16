"""Power-law fitting, deliberately identical to the producing toolkit.

Replicas sharing an N are collapsed to their median, then ordinary
least squares runs on (log N, log median). Keeping the procedure in
sync is what lets slope annotations match the toolkit's own fit
command digit for digit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class PowerLawFit:
    slope: float
    intercept: float
    r_squared: float
    ns: np.ndarray
    medians: np.ndarray


def fit_power_law(pairs) -> PowerLawFit:
    grouped = {}
    for n, value in pairs:
        if n <= 0 or value <= 0:
            raise ValueError(f"nonpositive fit input: ({n}, {value})")
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
    return PowerLawFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        ns=ns,
        medians=medians,
    )
