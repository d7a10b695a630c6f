"""Closed-form trajectories, error envelopes, thresholds and tail bounds.

All logarithms are natural.  ``p = 1 - 6 i / n**2`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

__all__ = [
    "ParamSet",
    "PAPER_PARAMS",
    "KINDS",
    "p_of",
    "t_of",
    "phi",
    "gamma_hat",
    "lambda_of",
    "p_star",
    "p_one",
    "Thresholds",
    "thresholds",
    "p_floor",
    "center",
    "half_width",
    "envelope",
    "yuvw_strict_half_width",
    "q_upper_alt",
    "ConstantCondition",
    "check_constants",
    "freedman_tail",
    "bilinear_sum_bound_check",
]

KINDS = ("Q", "Yu", "Yuv", "Tu", "Ruv", "Yuvw")


@dataclass(frozen=True)
class ParamSet:
    """Envelope constants.  Values may be floats or exact fractions."""

    alpha: Real = 1
    beta: Real = Fraction(1, 2)
    kappa: Real = Fraction(1, 4)
    mu: Real = Fraction(1, 4)
    gamma: Real = Fraction(1, 2)

    def __post_init__(self):
        for name in ("alpha", "beta", "kappa", "mu", "gamma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    def as_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in ("alpha", "beta", "kappa", "mu", "gamma")}


PAPER_PARAMS = ParamSet()


def t_of(i, n):
    return i / n**2


def p_of(i, n):
    return 1 - 6 * i / n**2


def phi(p, n):
    return math.exp(1 - p) * math.log(n) ** 2


def gamma_hat(n, gamma=Fraction(1, 2)):
    return float(gamma) - 6 / math.log(n)


def lambda_of(n):
    return 1 / math.log(n) ** 2


def p_star(n, params: ParamSet = PAPER_PARAMS) -> float:
    """Smallest density at which the tracking guarantees still apply."""
    g = gamma_hat(n, params.gamma)
    base = 6 * float(params.alpha) ** 2 * math.e**2 * math.log(n) ** 10 / n
    return base ** (1 / (4 - 2 * g))


def p_one(n) -> float:
    """Density threshold of the sharper triple co-degree bound."""
    return n ** (-1 / 3) * math.log(n) ** (5 / 3)


@dataclass(frozen=True)
class Thresholds:
    p_star: float
    p_one: float
    vacuous: bool  # p_star >= 1: the tracking window is empty at this n


def thresholds(n, params: ParamSet = PAPER_PARAMS) -> Thresholds:
    ps = p_star(n, params)
    return Thresholds(p_star=ps, p_one=p_one(n), vacuous=ps >= 1)


def p_floor(n, params: ParamSet = PAPER_PARAMS, policy="desk") -> float:
    """Lowest density at which envelope violations count.

    ``"desk"`` is ``n**(-1/3)``; ``"auto"`` is ``max(p_star, n**(-1/3))``
    (empty at any simulable n); ``"paper"`` is ``p_star``; a number is used
    as given.
    """
    if isinstance(policy, Real) and not isinstance(policy, bool):
        return float(policy)
    desk = n ** (-1 / 3)
    if policy == "desk":
        return desk
    if policy == "auto":
        return max(p_star(n, params), desk)
    if policy == "paper":
        return p_star(n, params)
    raise ValueError(f"unknown p_floor policy {policy!r}")


def center(kind, p, n, observed=None):
    """Trajectory value.  ``Ruv`` needs ``observed=(Y_u, Y_uv)``, ``Tu`` needs ``Y_u``."""
    if kind == "Q":
        return n**3 * p**3 / 6
    if kind == "Yuv":
        return n * p**2
    if kind == "Yu":
        return n * p
    if kind == "Yuvw":
        return n * p**3
    if kind == "Ruv":
        if observed is None:
            raise ValueError("Ruv center needs observed (Y_u, Y_uv)")
        yu, yuv = observed
        return p * np.asarray(yu, dtype=float) * np.asarray(yuv, dtype=float)
    if kind == "Tu":
        if observed is None:
            raise ValueError("Tu center needs observed Y_u")
        return p * np.asarray(observed, dtype=float) ** 2 / 2
    raise ValueError(f"unknown envelope kind {kind!r}")


def half_width(kind, p, n, params: ParamSet = PAPER_PARAMS) -> float:
    g = gamma_hat(n, params.gamma)
    ph = phi(p, n)
    a, b, k, m = (float(params.alpha), float(params.beta), float(params.kappa), float(params.mu))
    if kind == "Q":
        return a**2 * n**2 * p ** (2 * g - 1) * ph**2
    if kind == "Yuv":
        return a * math.sqrt(n) * p**g * ph
    if kind == "Ruv":
        return b * n**1.5 * p ** (2 + g) * ph
    if kind == "Yu":
        return k * math.sqrt(n) * p ** (g - 1) * ph
    if kind == "Tu":
        return m * n**1.5 * p ** (1 + g) * ph
    if kind == "Yuvw":
        return 2 * math.sqrt(n * p**3 * math.log(n) ** 5)
    raise ValueError(f"unknown envelope kind {kind!r}")


def envelope(kind, p, n, params: ParamSet = PAPER_PARAMS, observed=None):
    """``(center, half_width)`` of the tracking band for ``kind``."""
    return center(kind, p, n, observed), half_width(kind, p, n, params)


def yuvw_strict_half_width(p, n) -> float:
    """Half the triple co-degree width; the sharper bound valid for ``p >= p_one``."""
    return math.sqrt(n * p**3 * math.log(n) ** 5)


def q_upper_alt(p, n) -> float:
    """Alternative upper bound on the triangle count: ``n^3 p^3 / 6 + n^2 p / 3``."""
    return n**3 * p**3 / 6 + n**2 * p / 3


@dataclass(frozen=True)
class ConstantCondition:
    name: str
    lhs: Fraction
    rhs: Fraction

    @property
    def slack(self) -> Fraction:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


def _exact(x) -> Fraction:
    # floats are read as the decimal they print as, so 0.3 means 3/10
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def check_constants(params: ParamSet = PAPER_PARAMS) -> list[ConstantCondition]:
    """The four balance conditions on the constants, evaluated exactly."""
    a, b, k, m, g = (_exact(params.alpha), _exact(params.beta), _exact(params.kappa),
                     _exact(params.mu), _exact(params.gamma))
    return [
        ConstantCondition("R: (1-gamma) beta >= kappa", (1 - g) * b, k),
        ConstantCondition("Yuv: (2-gamma) alpha >= 2 beta + 2 kappa", (2 - g) * a, 2 * b + 2 * k),
        ConstantCondition("T: (4-2 gamma) mu >= beta + kappa", (4 - 2 * g) * m, b + k),
        ConstantCondition("Yu: (3-gamma) kappa >= 2 mu", (3 - g) * k, 2 * m),
    ]


def freedman_tail(s, v, B) -> float:
    """Freedman's bound ``exp(-s^2 / (2 (v + B s)))`` on a supermartingale rising by ``s``."""
    if not (s > 0 and v > 0 and B > 0):
        raise ValueError("freedman_tail needs s, v, B > 0")
    return math.exp(-s * s / (2 * (v + B * s)))


def bilinear_sum_bound_check(xs, ys) -> bool:
    """Check ``|sum x y - (sum x)(sum y)/|I|| <= |I| d1 d2`` exactly.

    ``d1``/``d2`` are the spreads ``max - min`` of ``xs``/``ys``.  Inputs are
    converted to exact fractions so rounding cannot fake a violation.
    """
    if len(xs) != len(ys) or not xs:
        raise ValueError("need two non-empty sequences of equal length")
    fx = [Fraction(x) for x in xs]
    fy = [Fraction(y) for y in ys]
    m = len(fx)
    d1 = max(fx) - min(fx)
    d2 = max(fy) - min(fy)
    lhs = abs(sum(x * y for x, y in zip(fx, fy)) - sum(fx) * sum(fy) / m)
    return lhs <= m * d1 * d2
