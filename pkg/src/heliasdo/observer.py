"""Adaptive smooth disturbance observer (ASDO) for one acceleration channel.

For a channel ``x_dot = v``, ``v_dot = f(x, u) + d`` with known ``f`` the
observer runs a velocity copy ``xh`` driven by ``f + d_hat`` and shapes the
innovation ``s = v - xh`` into

    d_hat   = L1 |s|^((m-1)/m) sgn(s) + L2 s + phi
    phi_dot = L3 |s|^((m-2)/m) sgn(s) + L4 s

with ``L1 = k1 L^((m-1)/m)``, ``L2 = k2 L``, ``L3 = k3 L^((2m-2)/m)``,
``L4 = k4 L^2`` and the monotone gain ``L_dot = kappa`` while ``|s| >= eps_d``.
Setting ``m = 2`` gives the adaptive second-order sliding mode observer
(ASOSMO) used as the comparison baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .numerics import sig

ASDO = "asdo"
ASOSMO = "asosmo"


@dataclass(frozen=True)
class AsdoGains:
    k1: float = 2.0
    k2: float = 2.5
    k3: float = 4.0
    k4: float = 30.0
    m: float = 3.0
    kappa: float = 20.0
    eps_d: float = 0.01
    L_d0: float = 1.0

    def __post_init__(self):
        for name in ("k1", "k2", "k3", "k4", "kappa", "eps_d", "L_d0"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ConfigError(f"asdo.{name} must be positive, got {v}")
        if not self.m >= 2.0:
            raise ConfigError(f"asdo.m must be >= 2, got {self.m}")

    @property
    def mode(self) -> str:
        return ASOSMO if self.m == 2.0 else ASDO


class AsdoState(NamedTuple):
    x_hat2: float
    phi_d: float
    L_d: float


def initial_state(x2_meas: float, g: AsdoGains) -> AsdoState:
    # zero initial innovation avoids a spurious start-up spike
    return AsdoState(x2_meas, 0.0, g.L_d0)


def asdo_output(st: AsdoState, g: AsdoGains, x2_meas: float) -> float:
    """Disturbance estimate ``d_hat`` for the current measurement."""
    s = x2_meas - st.x_hat2
    m = g.m
    L = st.L_d
    e1 = (m - 1.0) / m
    return g.k1 * L**e1 * sig(s, e1) + g.k2 * L * s + st.phi_d


def asdo_deriv(
    st: AsdoState, g: AsdoGains, x2_meas: float, channel_drift: float, d_hat: float
) -> AsdoState:
    """Time derivative of the observer memory.

    ``channel_drift`` is the known part of the channel acceleration, e.g.
    ``(L_a/J_alpha) cos(x3) u1 - (g/J_alpha) m_e L_a cos(x1)`` for elevation.
    """
    s = x2_meas - st.x_hat2
    m = g.m
    L = st.L_d
    # at m == 2 the exponent is 0 and sig(s, 0) reduces to sgn(s)
    phi_dot = g.k3 * L ** ((2.0 * m - 2.0) / m) * sig(s, (m - 2.0) / m) + g.k4 * L * L * s
    L_dot = g.kappa if abs(s) >= g.eps_d else 0.0
    return AsdoState(channel_drift + d_hat, phi_dot, L_dot)


def gain_margin(g: AsdoGains) -> float:
    """``m^2 k3 k4 - (m^3 k3/(m-1) + (2m-1)^2 k1^2) k2^2``; positive is required."""
    m = g.m
    return m * m * g.k3 * g.k4 - (
        m**3 * g.k3 / (m - 1.0) + (4.0 * m * m - 4.0 * m + 1.0) * g.k1**2
    ) * g.k2**2


def lyapunov_matrix(g: AsdoGains) -> np.ndarray:
    """Quadratic-form matrix ``P`` of the observer Lyapunov function."""
    k1, k2, k3, k4, m = g.k1, g.k2, g.k3, g.k4, g.m
    return 0.5 * np.array(
        [
            [2.0 * m / (m - 1.0) * k3 + k1**2, k1 * k2, -k1],
            [k1 * k2, 2.0 * k4 + k2**2, -k2],
            [-k1, -k2, 2.0],
        ]
    )


def omega_matrices(g: AsdoGains) -> tuple[np.ndarray, np.ndarray]:
    """Dissipation matrices multiplying the fractional and linear decay terms."""
    k1, k2, k3, k4, m = g.k1, g.k2, g.k3, g.k4, g.m
    omega1 = (k1 / m) * np.array(
        [
            [k3 * m + k1**2 * (m - 1.0), 0.0, -k1 * (m - 1.0)],
            [0.0, k4 * m + k2**2 * (3.0 * m - 1.0), -k2 * (2.0 * m - 1.0)],
            [-k1 * (m - 1.0), -k2 * (2.0 * m - 1.0), m - 1.0],
        ]
    )
    omega2 = k2 * np.array(
        [
            [k3 + k1**2 * (3.0 * m - 2.0) / m, 0.0, 0.0],
            [0.0, k4 + k2**2, -k2],
            [0.0, -k2, 1.0],
        ]
    )
    return omega1, omega2


def leading_minors(a: np.ndarray) -> list[float]:
    return [float(np.linalg.det(a[:k, :k])) for k in range(1, a.shape[0] + 1)]


def is_positive_definite(a: np.ndarray) -> bool:
    """Sylvester's criterion on a symmetric matrix."""
    if not np.allclose(a, a.T):
        return False
    return all(mn > 0.0 for mn in leading_minors(a))


@dataclass(frozen=True)
class GainReport:
    margin: float
    holds: bool
    P_pd: bool
    omega1_pd: bool
    omega2_pd: bool
    P: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray

    @property
    def all_ok(self) -> bool:
        return self.holds and self.P_pd and self.omega1_pd and self.omega2_pd

    def lines(self) -> list[str]:
        def verdict(ok):
            return "positive definite" if ok else "NOT positive definite"

        return [
            f"gain margin = {self.margin:.10g} ({'holds' if self.holds else 'VIOLATED'})",
            f"P: {verdict(self.P_pd)}  minors={_fmt(leading_minors(self.P))}",
            f"Omega1: {verdict(self.omega1_pd)}  minors={_fmt(leading_minors(self.omega1))}",
            f"Omega2: {verdict(self.omega2_pd)}  minors={_fmt(leading_minors(self.omega2))}",
        ]


def _fmt(vals):
    return "[" + ", ".join(f"{v:.6g}" for v in vals) + "]"


def verify_gain_condition(g: AsdoGains) -> GainReport:
    if g.m <= 2.0:
        raise ConfigError(f"gain condition applies to ASDO mode only (m > 2), got m={g.m}")
    margin = gain_margin(g)
    P = lyapunov_matrix(g)
    o1, o2 = omega_matrices(g)
    return GainReport(
        margin=margin,
        holds=margin > 0.0,
        P_pd=is_positive_definite(P),
        omega1_pd=is_positive_definite(o1),
        omega2_pd=is_positive_definite(o2),
        P=P,
        omega1=o1,
        omega2=o2,
    )
