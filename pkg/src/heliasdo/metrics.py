"""Post-processing of simulated time series.

Functions take any mapping from column name to sample array that includes a
``"t"`` column, so they work on :class:`~heliasdo.scenario.TimeSeries` and
on plain dicts alike.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


def _col(series, column: str) -> np.ndarray:
    try:
        return np.asarray(series[column], dtype=float)
    except KeyError:
        raise KeyError(f"unknown column {column!r}") from None


def settle_time(series, column: str, band: float, hold: float = 1.0) -> float | None:
    """Earliest ``t`` after which ``|signal| <= band`` for the rest of the run.

    The in-band stretch must last at least ``hold`` seconds; otherwise the
    signal counts as not settled and ``None`` is returned.
    """
    if not band > 0.0 or hold < 0.0:
        raise ValueError("band must be positive and hold non-negative")
    t = _col(series, "t")
    x = np.abs(_col(series, column))
    if len(t) == 0:
        return None
    outside = np.flatnonzero(~(x <= band))
    start = 0 if len(outside) == 0 else outside[-1] + 1
    if start >= len(t) or t[-1] - t[start] < hold:
        return None
    return float(t[start])


def _window(series, column, window):
    t_a, t_b = window
    if not t_a < t_b:
        raise ValueError(f"empty window [{t_a}, {t_b}]")
    t = _col(series, "t")
    x = _col(series, column)
    mask = (t >= t_a) & (t <= t_b)
    if not mask.any():
        raise ValueError(f"no samples in window [{t_a}, {t_b}]")
    return x[mask]


def total_variation(series, column: str, window: tuple[float, float]) -> float:
    """Sum of absolute successive differences over ``t_a <= t <= t_b``."""
    return float(np.abs(np.diff(_window(series, column, window))).sum())


def max_abs_after(series, column: str, t0: float) -> float:
    t = _col(series, "t")
    x = _col(series, column)[t > t0]
    if len(x) == 0:
        raise ValueError(f"no samples after t={t0}")
    return float(np.max(np.abs(x)))


def rmse(series, column: str, t0: float = 0.0) -> float:
    t = _col(series, "t")
    x = _col(series, column)[t >= t0]
    return float(np.sqrt(np.mean(x * x))) if len(x) else math.nan


def is_nondecreasing(x) -> bool:
    return bool(np.all(np.diff(np.asarray(x, dtype=float)) >= 0.0))


@dataclass(frozen=True)
class MetricsReport:
    rmse_z1: float
    rmse_z3: float
    settle_z1: float | None
    settle_z3: float | None
    max_abs_z1_after: float
    max_abs_z3_after: float
    max_obs_err1_after: float
    max_obs_err2_after: float
    tv_Vf: float
    tv_Vb: float
    tv_d1_hat: float
    tv_d2_hat: float
    saturation_fraction: float
    band: float
    hold: float
    transient: float

    def as_dict(self) -> dict:
        return asdict(self)


def compute_metrics(series, band: float = 0.01, hold: float = 2.0,
                    transient: float = 5.0) -> MetricsReport:
    """Standard report; ``transient`` marks the start of the steady window."""
    t = _col(series, "t")
    end = float(t[-1])
    err = {"t": t,
           "e1": _col(series, "d1") - _col(series, "d1_hat"),
           "e2": _col(series, "d2") - _col(series, "d2_hat")}
    short = transient >= end  # no post-transient window

    def peak(src, col):
        return math.nan if short else max_abs_after(src, col, transient)

    def tv(col):
        return math.nan if short else total_variation(series, col, (transient, end))

    return MetricsReport(
        rmse_z1=rmse(series, "z1"),
        rmse_z3=rmse(series, "z3"),
        settle_z1=settle_time(series, "z1", band, hold),
        settle_z3=settle_time(series, "z3", band, hold),
        max_abs_z1_after=peak(series, "z1"),
        max_abs_z3_after=peak(series, "z3"),
        max_obs_err1_after=peak(err, "e1"),
        max_obs_err2_after=peak(err, "e2"),
        tv_Vf=tv("Vf"),
        tv_Vb=tv("Vb"),
        tv_d1_hat=tv("d1_hat"),
        tv_d2_hat=tv("d2_hat"),
        saturation_fraction=float(np.mean(_col(series, "saturated"))),
        band=band,
        hold=hold,
        transient=transient,
    )
