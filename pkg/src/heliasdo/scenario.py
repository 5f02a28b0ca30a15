"""Experiment descriptions and the fixed-step closed-loop simulator."""

from __future__ import annotations

import bisect
import logging
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import cmdfilter, controller, observer
from .cmdfilter import FftcfParams, FftcfState
from .controller import ChannelModel, CtrlParams, CtrlState
from .errors import ConfigError, SimulationError
from .observer import AsdoGains, AsdoState
from .plant import (
    COS_PITCH_MIN,
    PlantParams,
    PlantState,
    saturate,
    voltages_from_u,
)

log = logging.getLogger(__name__)

CONSTANT = "constant"
SINUSOID = "sinusoid"
TABULATED = "tabulated"
INTEGRATORS = ("euler", "rk4")


class GainConditionWarning(UserWarning):
    """A sufficient stability condition is not met by the configured gains."""


@dataclass(frozen=True)
class DisturbanceProfile:
    kind: str = CONSTANT
    amplitude: float = 0.0
    frequency: float = 0.0
    phase: float = 0.0
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in (CONSTANT, SINUSOID, TABULATED):
            raise ConfigError(f"unknown disturbance kind {self.kind!r}")
        if self.kind == TABULATED:
            times = [p[0] for p in self.table]
            if len(times) < 2:
                raise ConfigError("tabulated disturbance needs at least two points")
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ConfigError("tabulated disturbance times must be strictly increasing")


def disturbance_eval(dp: DisturbanceProfile, t: float) -> float:
    if dp.kind == CONSTANT:
        return dp.amplitude
    if dp.kind == SINUSOID:
        return dp.amplitude * math.sin(dp.frequency * t + dp.phase)
    times = [p[0] for p in dp.table]
    if t < times[0] or t > times[-1]:
        raise ValueError(f"t={t} outside tabulated range [{times[0]}, {times[-1]}]")
    i = min(bisect.bisect_right(times, t), len(times) - 1)
    (t0, v0), (t1, v1) = dp.table[i - 1], dp.table[i]
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0)


@dataclass(frozen=True)
class ReferenceProfile:
    """``offset + amplitude * cos(w t)`` or ``offset + amplitude * sin(w t)``."""

    offset: float = 0.0
    amplitude: float = 0.0
    frequency: float = 0.0
    shape: str = "cosine"

    def __post_init__(self):
        if self.shape not in ("cosine", "sine"):
            raise ConfigError(f"unknown reference shape {self.shape!r}")


def reference_eval(rp: ReferenceProfile, t: float) -> tuple[float, float]:
    wt = rp.frequency * t
    if rp.shape == "cosine":
        return rp.offset + rp.amplitude * math.cos(wt), -rp.amplitude * rp.frequency * math.sin(wt)
    return rp.offset + rp.amplitude * math.sin(wt), rp.amplitude * rp.frequency * math.cos(wt)


@dataclass(frozen=True)
class ChannelConfig:
    """Observer, command filter and controller settings for one channel.

    ``observer_mode = "asosmo"`` forces ``m = 2`` regardless of ``asdo.m``.
    ``filter = "linear"`` swaps the FFTCF for a linear second-order filter
    with natural frequency ``linear_wn`` and damping ``linear_zeta``.
    """

    asdo: AsdoGains = field(default_factory=AsdoGains)
    fftcf: FftcfParams = field(default_factory=FftcfParams)
    ctrl: CtrlParams = field(default_factory=CtrlParams)
    observer_mode: str = observer.ASDO
    filter: str = cmdfilter.FFTCF
    linear_wn: float = 100.0
    linear_zeta: float = 1.0

    def effective_asdo(self) -> AsdoGains:
        if self.observer_mode == observer.ASOSMO:
            return replace(self.asdo, m=2.0)
        return self.asdo


PITCH_CTRL = CtrlParams(kbar1=3.0, kbar2=5.0, l1=2.0, l2=2.0, s1=2.0, s2=2.0)


@dataclass(frozen=True)
class Scenario:
    plant: PlantParams = field(default_factory=PlantParams)
    init: PlantState = PlantState(-2.0 * math.pi / 15.0, 0.0, 0.0, 0.0)
    elev: ChannelConfig = field(default_factory=ChannelConfig)
    pitch: ChannelConfig = field(default_factory=lambda: ChannelConfig(ctrl=PITCH_CTRL))
    d1: DisturbanceProfile = field(default_factory=DisturbanceProfile)
    d2: DisturbanceProfile = field(default_factory=DisturbanceProfile)
    ref1: ReferenceProfile = ReferenceProfile(-0.1, -0.2, 0.08, "cosine")
    ref3: ReferenceProfile = ReferenceProfile(0.0, 0.1, 0.06, "sine")
    step: float = 0.001
    duration: float = 100.0
    integrator: str = "euler"
    filter_substeps: int = 10

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.step))


def validate_scenario(sc: Scenario) -> list[str]:
    """Raise :class:`ConfigError` on invalid settings; return soft warnings."""
    if not (sc.step > 0.0 and math.isfinite(sc.step)):
        raise ConfigError(f"step must be positive, got {sc.step}")
    if not sc.duration >= sc.step:
        raise ConfigError(f"duration {sc.duration} shorter than step {sc.step}")
    if abs(sc.n_steps * sc.step - sc.duration) > 1e-9 * max(1.0, sc.duration):
        raise ConfigError(f"duration {sc.duration} is not a multiple of step {sc.step}")
    if not (isinstance(sc.filter_substeps, int) and sc.filter_substeps >= 1):
        raise ConfigError(f"filter_substeps must be a positive integer, got {sc.filter_substeps!r}")
    if sc.integrator not in INTEGRATORS:
        raise ConfigError(f"integrator must be one of {INTEGRATORS}, got {sc.integrator!r}")
    if not all(math.isfinite(v) for v in sc.init):
        raise ConfigError("initial state must be finite")
    for name in ("d1", "d2"):
        dp = getattr(sc, name)
        if dp.kind == TABULATED and (dp.table[0][0] > 0.0 or dp.table[-1][0] < sc.duration):
            raise ConfigError(f"{name} table does not cover [0, {sc.duration}]")
    notes = []
    for name in ("elev", "pitch"):
        ch: ChannelConfig = getattr(sc, name)
        if ch.observer_mode not in (observer.ASDO, observer.ASOSMO):
            raise ConfigError(f"{name}.observer_mode must be asdo or asosmo")
        if ch.filter not in (cmdfilter.FFTCF, cmdfilter.LINEAR):
            raise ConfigError(f"{name}.filter must be fftcf or linear")
        if ch.filter == cmdfilter.LINEAR and not (ch.linear_wn > 0.0 and ch.linear_zeta > 0.0):
            raise ConfigError(f"{name}.linear_wn and linear_zeta must be positive")
        cmdfilter.validate_fftcf_params(ch.fftcf)
        g = ch.effective_asdo()
        if g.mode == observer.ASDO:
            if not g.m > 2.0:
                raise ConfigError(f"{name}.asdo.m must exceed 2 in asdo mode")
            if not observer.gain_margin(g) > 0.0:
                raise ConfigError(
                    f"{name}.asdo gains violate the observer gain condition "
                    f"(margin {observer.gain_margin(g):.6g})"
                )
        notes += [f"{name}.ctrl: {msg}" for msg in controller.validate_ctrl_params(ch.ctrl)]
    return notes


def preset_case1(observer_mode: str = observer.ASDO, disturbance_kind: str = CONSTANT,
                 duration: float = 20.0) -> Scenario:
    """Observer comparison run: d1 = d2 = 1 or d1 = d2 = sin(2t)."""
    if disturbance_kind == CONSTANT:
        d = DisturbanceProfile(CONSTANT, amplitude=1.0)
    elif disturbance_kind == SINUSOID:
        d = DisturbanceProfile(SINUSOID, amplitude=1.0, frequency=2.0)
    else:
        raise ConfigError(f"case1 disturbance must be constant or sinusoid, got {disturbance_kind!r}")
    if observer_mode not in (observer.ASDO, observer.ASOSMO):
        raise ConfigError(f"unknown observer mode {observer_mode!r}")
    return Scenario(
        elev=ChannelConfig(observer_mode=observer_mode),
        pitch=ChannelConfig(ctrl=PITCH_CTRL, observer_mode=observer_mode),
        d1=d,
        d2=d,
        duration=duration,
    )


def preset_case2(duration: float = 100.0) -> Scenario:
    """Tracking run with d1 = d2 = sin(2t) and the observer-comparison gains."""
    return replace(preset_case1(observer.ASDO, SINUSOID), duration=duration)


# ----------------------------------------------------------------------------
# time series

COLUMNS = (
    "t", "x1", "x2", "x3", "x4",
    "x1d", "x1d_dot", "x3d", "x3d_dot",
    "z1", "z2", "v1", "v2", "z3", "z4", "v3", "v4",
    "d1", "d2", "d1_hat", "d2_hat",
    "sd1", "sd2", "Ld1", "Ld2",
    "alpha_r1", "alpha_r2",
    "x1c_1", "x2c_1", "x1c_2", "x2c_2",
    "xi1_1", "xi2_1", "xi1_2", "xi2_2",
    "p_hat1", "p_hat2",
    "u1_cmd", "u2_cmd", "u1", "u2", "Vf", "Vb",
    "saturated", "domain_violation",
)


class TimeSeries:
    """Column store of a run, one row per grid point ``t_k = k * step``."""

    def __init__(self, data: dict[str, np.ndarray], step: float, notes=()):
        missing = [c for c in COLUMNS if c not in data]
        if missing:
            raise ValueError(f"missing columns: {missing}")
        self.data = {c: np.asarray(data[c], dtype=float) for c in COLUMNS}
        self.step = step
        self.notes = list(notes)

    @classmethod
    def from_rows(cls, rows, step, notes=()):
        arr = np.array(rows, dtype=float).reshape(-1, len(COLUMNS))
        return cls({c: arr[:, i] for i, c in enumerate(COLUMNS)}, step, notes)

    @property
    def columns(self) -> tuple[str, ...]:
        return COLUMNS

    @property
    def t(self) -> np.ndarray:
        return self.data["t"]

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.data[name]
        except KeyError:
            raise KeyError(f"unknown column {name!r}") from None

    def __len__(self) -> int:
        return len(self.data["t"])

    def as_matrix(self) -> np.ndarray:
        return np.column_stack([self.data[c] for c in COLUMNS]) if len(self) else np.empty((0, len(COLUMNS)))

    def equals(self, other: "TimeSeries") -> bool:
        return len(self) == len(other) and all(
            np.array_equal(self.data[c], other.data[c]) for c in COLUMNS
        )


# ----------------------------------------------------------------------------
# simulation

class _Channel:
    """Per-channel constants resolved once per run."""

    def __init__(self, cfg: ChannelConfig, model: ChannelModel):
        self.model = model
        self.asdo = cfg.effective_asdo()
        self.fftcf = cfg.fftcf
        self.ctrl = cfg.ctrl
        self.linear = cfg.filter == cmdfilter.LINEAR
        self.wn = cfg.linear_wn
        self.zeta = cfg.linear_zeta

    def outputs(self, pos, vel, ref, ref_dot, x1, x3, y):
        """Algebraic controller outputs at a sample.

        ``y`` is this channel's slice ``[xh, phi, L, x1c, x2c, xi1, xi2, p]``.
        """
        obs = AsdoState(y[0], y[1], y[2])
        cst = CtrlState(y[5], y[6], y[7])
        z1, z2, v1, v2 = controller.tracking_errors(pos, vel, ref, y[3], cst)
        alpha = controller.virtual_law(z1, v1, ref_dot, self.ctrl)
        d_hat = observer.asdo_output(obs, self.asdo, vel)
        u = controller.control_law(z1, z2, v2, y[4], d_hat, cst, self.model, x1, x3, self.ctrl)
        return z1, z2, v1, v2, alpha, d_hat, u

    def rates(self, vel, drift_known, alpha, y):
        """Derivative of the channel slice with ``alpha``, the input and the
        filter states held; the filter entries are advanced separately."""
        obs = AsdoState(y[0], y[1], y[2])
        d_hat = observer.asdo_output(obs, self.asdo, vel)
        do = observer.asdo_deriv(obs, self.asdo, vel, drift_known, d_hat)
        cst = CtrlState(y[5], y[6], y[7])
        dxi1, dxi2 = controller.aux_deriv(cst, y[3] - alpha, self.ctrl)
        v2 = vel - y[3] - y[6]
        dp = controller.adaptive_law_deriv(y[7], v2, self.ctrl)
        return [do[0], do[1], do[2], 0.0, 0.0, dxi1, dxi2, dp]

    def advance_filter(self, x1c, x2c, alpha, h, n):
        """``n`` explicit Euler sub-steps of the command filter over ``h``.

        Same right-hand side as :func:`cmdfilter.fftcf_deriv` and
        :func:`cmdfilter.linear_cf_deriv`, unrolled on locals for speed.
        """
        dt = h / n
        if self.linear:
            c1 = 2.0 * self.zeta * self.wn
            c0 = self.wn * self.wn
            for _ in range(n):
                acc = -c1 * x2c - c0 * (x1c - alpha)
                x1c, x2c = x1c + dt * x2c, x2c + dt * acc
            return FftcfState(x1c, x2c)
        f = self.fftcf
        eps, g3, g4 = f.eps_c, f.gamma3, f.gamma4
        inv = 1.0 / (eps * eps)
        a0, a1, b0, b1 = f.a0 * inv, f.a1 * inv, f.b0 * inv, f.b1 * inv
        for _ in range(n):
            e = x1c - alpha
            ev = eps * x2c
            acc = -a0 * e - b0 * ev
            if e > 0.0:
                acc -= a1 * e**g3
            elif e < 0.0:
                acc += a1 * (-e) ** g3
            if ev > 0.0:
                acc -= b1 * ev**g4
            elif ev < 0.0:
                acc += b1 * (-ev) ** g4
            x1c, x2c = x1c + dt * x2c, x2c + dt * acc
        return FftcfState(x1c, x2c)


def simulate(sc: Scenario) -> TimeSeries:
    """Run the closed loop on the uniform grid ``0, step, ..., duration``.

    All controller outputs (inputs ``u`` and filter commands ``alpha_r``) are
    held over each step.  Plant, observer, compensation and adaptive states
    are advanced together by the chosen integrator with the filter states
    held; the filter itself takes ``filter_substeps`` Euler sub-steps, which
    keeps its non-Lipschitz damping term from locking into a period-2 cycle
    at millisecond steps.
    """
    notes = validate_scenario(sc)
    for msg in notes:
        warnings.warn(msg, GainConditionWarning, stacklevel=2)

    p = sc.plant
    elev = _Channel(sc.elev, ChannelModel("elevation", p))
    pitch = _Channel(sc.pitch, ChannelModel("pitch", p))
    h = sc.step
    n = sc.n_steps
    eg, pg, gc = p.elev_gain, p.pitch_gain, p.gravity_coeff
    d1p, d2p, r1p, r3p = sc.d1, sc.d2, sc.ref1, sc.ref3

    x1, x2, x3, x4 = (float(v) for v in sc.init)
    oe = observer.initial_state(x2, elev.asdo)
    op = observer.initial_state(x4, pitch.asdo)
    # filter starts on the first virtual command with zero derivative
    r1, r1d = reference_eval(r1p, 0.0)
    r3, r3d = reference_eval(r3p, 0.0)
    a1 = controller.virtual_law(x1 - r1, x1 - r1, r1d, elev.ctrl)
    a2 = controller.virtual_law(x3 - r3, x3 - r3, r3d, pitch.ctrl)
    y = [x1, x2, x3, x4,
         oe.x_hat2, oe.phi_d, oe.L_d, a1, 0.0, 0.0, 0.0, 0.0,
         op.x_hat2, op.phi_d, op.L_d, a2, 0.0, 0.0, 0.0, 0.0]

    def rates(t, y, u1, u2, a1, a2):
        x1, x2, x3, x4 = y[0], y[1], y[2], y[3]
        d1 = disturbance_eval(d1p, t)
        d2 = disturbance_eval(d2p, t)
        known1 = eg * math.cos(x3) * u1 - gc * math.cos(x1)
        known2 = pg * u2
        return ([x2, known1 + d1, x4, known2 + d2]
                + elev.rates(x2, known1, a1, y[4:12])
                + pitch.rates(x4, known2, a2, y[12:20]))

    rk4 = sc.integrator == "rk4"
    nsub = sc.filter_substeps
    rows = []
    warned_domain = False
    k = 0
    try:
        for k in range(n + 1):
            t = k * h
            x1, x2, x3, x4 = y[0], y[1], y[2], y[3]
            r1, r1d = reference_eval(r1p, t)
            r3, r3d = reference_eval(r3p, t)
            d1 = disturbance_eval(d1p, t)
            d2 = disturbance_eval(d2p, t)
            ye, yp = y[4:12], y[12:20]
            z1, z2, v1, v2, a1, d1h, u1c = elev.outputs(x1, x2, r1, r1d, x1, x3, ye)
            z3, z4, v3, v4, a2, d2h, u2c = pitch.outputs(x3, x4, r3, r3d, x1, x3, yp)
            volts, u1, u2, sat = saturate(voltages_from_u(u1c, u2c, p), p)
            violation = math.cos(x3) < COS_PITCH_MIN
            if violation and not warned_domain:
                log.warning("pitch left the operating domain at t=%.4f (x3=%.4f)", t, x3)
                notes.append(f"operating-domain violation first at t={t:.6g}")
                warned_domain = True
            rows.append((
                t, x1, x2, x3, x4, r1, r1d, r3, r3d,
                z1, z2, v1, v2, z3, z4, v3, v4,
                d1, d2, d1h, d2h,
                x2 - ye[0], x4 - yp[0], ye[2], yp[2],
                a1, a2, ye[3], ye[4], yp[3], yp[4],
                ye[5], ye[6], yp[5], yp[6], ye[7], yp[7],
                u1c, u2c, u1, u2, volts.V_f, volts.V_b,
                float(sat), float(violation),
            ))
            if k == n:
                break
            if rk4:
                k1 = rates(t, y, u1, u2, a1, a2)
                k2 = rates(t + 0.5 * h, [a + 0.5 * h * b for a, b in zip(y, k1)], u1, u2, a1, a2)
                k3 = rates(t + 0.5 * h, [a + 0.5 * h * b for a, b in zip(y, k2)], u1, u2, a1, a2)
                k4 = rates(t + h, [a + h * b for a, b in zip(y, k3)], u1, u2, a1, a2)
                y = [a + h / 6.0 * (b + 2.0 * c + 2.0 * d + e)
                     for a, b, c, d, e in zip(y, k1, k2, k3, k4)]
            else:
                f = rates(t, y, u1, u2, a1, a2)
                y = [a + h * b for a, b in zip(y, f)]
            fe = elev.advance_filter(ye[3], ye[4], a1, h, nsub)
            fp = pitch.advance_filter(yp[3], yp[4], a2, h, nsub)
            y[7], y[8], y[15], y[16] = fe.x1c, fe.x2c, fp.x1c, fp.x2c
            if not math.isfinite(sum(y)):
                raise SimulationError(f"non-finite state at t={(k + 1) * h:.6g}", step=k + 1)
    except (OverflowError, ZeroDivisionError, ConfigError) as exc:
        # blow-up inside a power or a vanishing input gain mid-run
        raise SimulationError(f"simulation diverged at t={k * h:.6g}: {exc}", step=k) from exc
    return TimeSeries.from_rows(rows, h, notes)
