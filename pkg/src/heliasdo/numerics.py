"""Scalar primitives shared by the observer, filter and controller.

``sig`` and ``lemma7_factor`` accept Python floats or numpy arrays.  The
float path goes through :mod:`math` because it sits in the inner loop of the
simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def sig(x, gamma):
    """Sign-preserving power ``|x|**gamma * sgn(x)``; zero at ``x == 0``."""
    if isinstance(x, np.ndarray):
        return np.sign(x) * np.abs(x) ** gamma
    if x > 0.0:
        return x**gamma
    if x < 0.0:
        return -((-x) ** gamma)
    return 0.0


def sgn(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def lemma7_factor(w, eps, sigma):
    """Smooth replacement for ``1/|x|`` evaluated at ``w = x**2``.

    Returns ``sqrt((w + sigma^2 + eps^2) / ((w + eps^2) * (w + sigma^2)))``,
    which stays finite at ``w = 0`` (value ``sqrt(1/eps^2 + 1/sigma^2)``).
    """
    e2 = eps * eps
    s2 = sigma * sigma
    return ((w + s2 + e2) / ((w + e2) * (w + s2))) ** 0.5


def lemma7_gap(x, eps, sigma):
    """``|x| - x**2 * lemma7_factor(x**2, eps, sigma)`` without cancellation.

    With ``a = x**2``, ``N = a + s^2 + e^2`` and ``D = (a + e^2)(a + s^2)``
    one has ``D - a*N = e^2 s^2``, hence
    ``gap = |x| e^2 s^2 / (D (1 + sqrt(a N / D)))``.
    The direct difference loses all significant digits once ``|x|`` is much
    larger than ``eps*sigma``.
    """
    a = x * x
    e2 = eps * eps
    s2 = sigma * sigma
    d = (a + e2) * (a + s2)
    return abs(x) * e2 * s2 / (d * (1.0 + (a * (a + s2 + e2) / d) ** 0.5))


def lemma7_bound(eps, sigma):
    """Upper bound ``eps*sigma/sqrt(eps^2 + sigma^2)`` on :func:`lemma7_gap`."""
    return eps * sigma / (eps * eps + sigma * sigma) ** 0.5


@dataclass(frozen=True)
class OddRatioExponent:
    """Exponent ``numerator/denominator`` with both terms positive odd integers.

    Odd/odd ratios make ``x**r`` a real odd function, which is why every
    fractional power of a signed quantity goes through :func:`sig`.
    """

    numerator: int
    denominator: int

    def __post_init__(self):
        for name in ("numerator", "denominator"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v <= 0 or v % 2 == 0:
                raise ValueError(f"{name} must be a positive odd integer, got {v!r}")

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    @classmethod
    def from_float(cls, r: float, max_denominator: int = 999) -> "OddRatioExponent":
        frac = Fraction(r).limit_denominator(max_denominator)
        if not math.isclose(float(frac), r, rel_tol=0, abs_tol=1e-12):
            raise ValueError(f"{r} is not representable as a small rational")
        return cls(frac.numerator, frac.denominator)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"
