"""Finite-time command-filtered backstepping law for one attitude channel.

Each channel is a double integrator ``x_dot = v``,
``v_dot = gain(x) u + drift(x) + d``.  The loop carries three dynamic
quantities besides the command filter: the compensation signals
``xi1, xi2`` that absorb the filter error, and ``p_hat``, an adaptive bound
on the residual observer error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import ConfigError
from .numerics import OddRatioExponent, lemma7_factor, sig
from .plant import PlantParams

# below this the inverse of the input gain is meaningless
MIN_CONTROL_GAIN = 1e-9


@dataclass(frozen=True)
class CtrlParams:
    kbar1: float = 1.0
    kbar2: float = 2.0
    s1: float = 0.5
    s2: float = 0.5
    r: OddRatioExponent = field(default_factory=lambda: OddRatioExponent(3, 5))
    l1: float = 1.0
    l2: float = 1.0
    eps_r: float = 0.1
    sigma_r: float = 0.1
    eps_p: float = 0.1
    sigma_p: float = 0.1
    q: float = 30.0
    mu: float = 0.1
    eta: float = 1.0


class CtrlState(NamedTuple):
    xi1: float = 0.0
    xi2: float = 0.0
    p_hat: float = 0.0


def validate_ctrl_params(p: CtrlParams) -> list[str]:
    """Raise on hard violations and return soft (sufficient-condition) warnings."""
    for name in ("kbar1", "kbar2", "s1", "s2", "l1", "l2", "eps_r", "sigma_r",
                 "eps_p", "sigma_p", "q", "mu", "eta"):
        v = getattr(p, name)
        if not (v > 0.0 and math.isfinite(v)):
            raise ConfigError(f"ctrl.{name} must be positive, got {v}")
    r = p.r.value
    if not r < 1.0:
        raise ConfigError(f"ctrl.r must be < 1, got {p.r}")
    if not 2.0 * p.kbar1 - 1.0 > 0.0:
        raise ConfigError(f"ctrl.kbar1 must exceed 1/2, got {p.kbar1}")
    notes = []
    for i, (s, l) in enumerate(((p.s1, p.l1), (p.s2, p.l2)), start=1):
        if not s - l / (1.0 + r) > 0.0:
            notes.append(
                f"s{i} - l{i}/(1+r) = {s - l / (1.0 + r):.6g} <= 0: "
                "sufficient condition for the finite-time bound does not hold"
            )
    return notes


@dataclass(frozen=True)
class ChannelModel:
    """Known input gain and drift of one channel.

    ``kind`` is ``"elevation"`` (gain ``(L_a/J_alpha) cos x3``, gravity drift)
    or ``"pitch"`` (constant gain ``L_h/J_beta``, no drift).
    """

    kind: str
    plant: PlantParams

    def __post_init__(self):
        if self.kind not in ("elevation", "pitch"):
            raise ConfigError(f"unknown channel kind {self.kind!r}")

    def control_gain(self, x1: float, x3: float) -> float:
        if self.kind == "elevation":
            return self.plant.elev_gain * math.cos(x3)
        return self.plant.pitch_gain

    def drift(self, x1: float, x3: float) -> float:
        if self.kind == "elevation":
            return -self.plant.gravity_coeff * math.cos(x1)
        return 0.0


def tracking_errors(
    x_pos: float, x_vel: float, x_ref: float, x1c: float, st: CtrlState
) -> tuple[float, float, float, float]:
    """Return ``(z1, z2, v1, v2)``; the ``v`` are compensated by ``xi``."""
    z1 = x_pos - x_ref
    z2 = x_vel - x1c
    return z1, z2, z1 - st.xi1, z2 - st.xi2


def virtual_law(z1, v1, x_ref_dot, p: CtrlParams):
    """Singularity-free velocity command.

    ``-kbar1 z1 + x_ref_dot - s1 sig(v1)^(1+2r) F(|v1|^(2+2r))`` where ``F`` is
    :func:`~heliasdo.numerics.lemma7_factor`.  Works elementwise on arrays.
    """
    r = p.r.value
    w = abs(v1) ** (2.0 + 2.0 * r)
    return (
        -p.kbar1 * z1
        + x_ref_dot
        - p.s1 * sig(v1, 1.0 + 2.0 * r) * lemma7_factor(w, p.eps_r, p.sigma_r)
    )


def control_law(
    z1: float,
    z2: float,
    v2: float,
    x2c: float,
    d_hat: float,
    st: CtrlState,
    ch: ChannelModel,
    x1: float,
    x3: float,
    p: CtrlParams,
) -> float:
    """Channel input (``u1`` or ``u2``, newtons).

    ``x2c`` is the filter's derivative state, i.e. the exact time derivative
    of the filtered command.
    """
    gain = ch.control_gain(x1, x3)
    if abs(gain) < MIN_CONTROL_GAIN:
        raise ConfigError(f"{ch.kind} input gain {gain} is too close to zero")
    r = p.r.value
    comp = st.p_hat * v2 * lemma7_factor(v2 * v2, p.eps_p, p.sigma_p)
    return (
        -p.kbar2 * z2
        - z1
        + x2c
        - ch.drift(x1, x3)
        - p.s2 * sig(v2, r)
        - d_hat
        - comp
    ) / gain


def aux_deriv(st: CtrlState, filter_error: float, p: CtrlParams) -> tuple[float, float]:
    """Compensation dynamics driven by ``filter_error = x1c - alpha_r``."""
    r = p.r.value
    return (
        -p.kbar1 * st.xi1 + st.xi2 + filter_error - p.l1 * sig(st.xi1, r),
        -p.kbar2 * st.xi2 - st.xi1 - p.l2 * sig(st.xi2, r),
    )


def adaptive_law_deriv(p_hat: float, v2: float, p: CtrlParams) -> float:
    """sigma-modified update of the observer-error bound estimate."""
    r = p.r.value
    w = v2 * v2
    return p.q * (
        w * lemma7_factor(w, p.eps_p, p.sigma_p) - p.mu * p_hat - p.eta * sig(p_hat, r)
    )
