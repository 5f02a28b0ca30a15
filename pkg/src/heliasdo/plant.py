"""Elevation/pitch dynamics of the 3-DOF lab helicopter.

State ``[x1, x2, x3, x4] = [elevation, elevation rate, pitch, pitch rate]``.
Inputs are the thrust sum ``u1 = Kf (Vf + Vb)`` and difference
``u2 = Kf (Vf - Vb)``; the travel axis is left free and not modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ConfigError

# cos(x3) must stay in [sqrt(2)/2, 1] for the model to hold
COS_PITCH_MIN = math.sqrt(2.0) / 2.0


@dataclass(frozen=True)
class PlantParams:
    J_alpha: float = 1.0348  # kg m^2
    J_beta: float = 0.0451  # kg m^2
    L_a: float = 0.66  # m
    L_h: float = 0.178  # m
    m_e: float = 0.094  # kg
    g: float = 9.81  # m/s^2
    K_f: float = 0.1188  # N/V
    V_max: float = 24.0  # V

    def __post_init__(self):
        for name, value in vars(self).items():
            if not (value > 0.0 and math.isfinite(value)):
                raise ConfigError(f"plant.{name} must be positive and finite, got {value}")

    @property
    def elev_gain(self) -> float:
        """L_a / J_alpha, the elevation input gain at zero pitch."""
        return self.L_a / self.J_alpha

    @property
    def pitch_gain(self) -> float:
        return self.L_h / self.J_beta

    @property
    def gravity_coeff(self) -> float:
        """g m_e L_a / J_alpha."""
        return self.g * self.m_e * self.L_a / self.J_alpha


class PlantState(NamedTuple):
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0
    x4: float = 0.0


class MotorVoltages(NamedTuple):
    V_f: float
    V_b: float


def elevation_drift(x1: float, p: PlantParams) -> float:
    """Known gravity term of the elevation acceleration."""
    return -p.gravity_coeff * math.cos(x1)


def plant_deriv(
    s: PlantState, u1: float, u2: float, d1: float, d2: float, p: PlantParams
) -> PlantState:
    x1, x2, x3, x4 = s
    return PlantState(
        x2,
        p.elev_gain * math.cos(x3) * u1 - p.gravity_coeff * math.cos(x1) + d1,
        x4,
        p.pitch_gain * u2 + d2,
    )


def voltages_from_u(u1: float, u2: float, p: PlantParams) -> MotorVoltages:
    k2 = 2.0 * p.K_f
    return MotorVoltages((u1 + u2) / k2, (u1 - u2) / k2)


def u_from_voltages(v: MotorVoltages, p: PlantParams) -> tuple[float, float]:
    return p.K_f * (v.V_f + v.V_b), p.K_f * (v.V_f - v.V_b)


def saturate(v: MotorVoltages, p: PlantParams) -> tuple[MotorVoltages, float, float, bool]:
    """Clamp both motor voltages to ``[-V_max, V_max]``.

    Returns the clamped voltages, the effective ``(u1, u2)`` they produce and
    whether any clamping happened.
    """
    vmax = p.V_max
    vf = min(max(v.V_f, -vmax), vmax)
    vb = min(max(v.V_b, -vmax), vmax)
    clamped = MotorVoltages(vf, vb)
    u1, u2 = u_from_voltages(clamped, p)
    return clamped, u1, u2, (vf != v.V_f or vb != v.V_b)


def in_operating_domain(x3: float) -> bool:
    return math.cos(x3) >= COS_PITCH_MIN
