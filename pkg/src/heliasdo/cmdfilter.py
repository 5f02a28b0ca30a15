"""Command filters producing a virtual control signal and its derivative.

The fast finite-time command filter (FFTCF) is a second-order singularly
perturbed differentiator:

    x1c_dot = x2c
    eps^2 x2c_dot = -a0 e - a1 sig(e)^g3 - b0 eps x2c - b1 sig(eps x2c)^g4,  e = x1c - input

A plain linear second-order filter is kept alongside for ablation runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ConfigError
from .numerics import sig

FFTCF = "fftcf"
LINEAR = "linear"


@dataclass(frozen=True)
class FftcfParams:
    eps_c: float = 0.01
    a0: float = 5.0
    a1: float = 0.5
    b0: float = 2.0
    b1: float = 0.5
    gamma3: float = 0.5
    gamma4: float = 0.5


class FftcfState(NamedTuple):
    x1c: float
    x2c: float


def validate_fftcf_params(p: FftcfParams) -> FftcfParams:
    for name in ("eps_c", "a0", "a1", "b0", "b1"):
        v = getattr(p, name)
        if not (v > 0.0 and math.isfinite(v)):
            raise ConfigError(f"fftcf.{name} must be > 0, got {v}")
    if not 0.0 < p.gamma4 < 1.0:
        raise ConfigError(f"fftcf.gamma4 must lie in (0, 1), got {p.gamma4}")
    lo = p.gamma4 / (2.0 - p.gamma4)
    if not lo < p.gamma3 < 1.0:
        raise ConfigError(
            f"fftcf.gamma3 must lie in (gamma4/(2-gamma4), 1) = ({lo:.6g}, 1), got {p.gamma3}"
        )
    return p


def fftcf_deriv(st: FftcfState, alpha_r: float, p: FftcfParams) -> FftcfState:
    e = st.x1c - alpha_r
    ev = p.eps_c * st.x2c
    acc = (
        -p.a0 * e - p.a1 * sig(e, p.gamma3) - p.b0 * ev - p.b1 * sig(ev, p.gamma4)
    ) / (p.eps_c * p.eps_c)
    return FftcfState(st.x2c, acc)


def linear_cf_deriv(st: FftcfState, alpha_r: float, omega_n: float, zeta: float) -> FftcfState:
    return FftcfState(
        st.x2c, -2.0 * zeta * omega_n * st.x2c - omega_n * omega_n * (st.x1c - alpha_r)
    )
