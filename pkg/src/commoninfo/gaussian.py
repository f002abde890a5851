"""Closed forms for a standardized bivariate Gaussian source under squared error.

X and Y have zero mean, unit variance and correlation ``rho``.  Distortions are
mean squared errors D1 (for X) and D2 (for Y); ``Dbar = 1 - D``.  Rates in bits.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BadParameter, NonPositiveDistortion, RegimeMismatch


@dataclass(frozen=True)
class GaussianSource:
    rho: float

    def __post_init__(self):
        r = float(self.rho)
        if not math.isfinite(r) or abs(r) >= 1.0:
            raise BadParameter(f"correlation must satisfy |rho| < 1, got {self.rho}")
        if r < 0:
            # the sign of the correlation can be absorbed into Y
            warnings.warn("negative rho mapped to |rho|", stacklevel=2)
            r = -r
        object.__setattr__(self, "rho", r)


class Regime(str, Enum):
    I_LOSSLESS_CI = "I_lossless_ci"
    II_ALL_SHARED = "II_all_shared"
    III_D1_EXCESS = "III_d1_excess"
    IV_D2_EXCESS = "IV_d2_excess"
    DEGENERATE_ZERO = "degenerate_zero"


def _src(src) -> GaussianSource:
    return src if isinstance(src, GaussianSource) else GaussianSource(src)


def _check(d1: float, d2: float) -> None:
    if not (d1 > 0 and d2 > 0):
        raise NonPositiveDistortion(f"distortions must be positive, got ({d1}, {d2})")


def gaussian_joint_rd(src, d1: float, d2: float) -> float:
    """Joint rate-distortion function R(D1, D2)."""
    rho = _src(src).rho
    _check(d1, d2)
    if d1 >= 1 and d2 >= 1:
        return 0.0
    if d1 >= 1 or d2 >= 1:
        return 0.5 * math.log2(1.0 / min(d1, d2))
    b1, b2 = 1 - d1, 1 - d2
    r2 = rho * rho
    if b1 * b2 >= r2:
        return 0.5 * math.log2((1 - r2) / (d1 * d2))
    if min(b1 / b2, b2 / b1) >= r2:
        return 0.5 * math.log2((1 - r2) / (d1 * d2 - (rho - math.sqrt(b1 * b2)) ** 2))
    return 0.5 * math.log2(1.0 / min(d1, d2))


def gaussian_wyner_ci_lossless(src) -> float:
    rho = _src(src).rho
    return 0.5 * math.log2((1 + rho) / (1 - rho))


def classify_regime(src, d1: float, d2: float) -> Regime:
    """Distortion regime; points on a shared boundary go to the lower-numbered regime."""
    rho = _src(src).rho
    _check(d1, d2)
    if max(d1, d2) <= 1 - rho:
        return Regime.I_LOSSLESS_CI
    if d1 >= 1 or d2 >= 1:
        return Regime.DEGENERATE_ZERO
    prod = (1 - d1) * (1 - d2)
    if prod <= rho * rho:
        return Regime.II_ALL_SHARED
    if d1 > 1 - rho:
        return Regime.III_D1_EXCESS
    return Regime.IV_D2_EXCESS


def _excess(rho: float, d: float) -> float:
    return 0.5 * math.log2((1 - rho * rho) / ((1 - rho * rho / (1 - d)) * d))


def regime_value(src, regime: Regime, d1: float, d2: float) -> float:
    """Evaluate one regime's closed form, regardless of where (d1, d2) lies."""
    src = _src(src)
    _check(d1, d2)
    if regime is Regime.I_LOSSLESS_CI:
        return gaussian_wyner_ci_lossless(src)
    if regime is Regime.II_ALL_SHARED:
        return gaussian_joint_rd(src, d1, d2)
    if regime is Regime.III_D1_EXCESS:
        return _excess(src.rho, d1)
    if regime is Regime.IV_D2_EXCESS:
        return _excess(src.rho, d2)
    return 0.0


def gaussian_lossy_wyner_ci(src, d1: float, d2: float) -> float:
    src = _src(src)
    return regime_value(src, classify_regime(src, d1, d2), d1, d2)


def gaussian_lossy_gk(src, d1: float = 1.0, d2: float = 1.0) -> float:
    """Lossy Gacs-Korner common information; zero for every |rho| < 1."""
    _src(src)
    _check(d1, d2)
    return 0.0


def gaussian_slb(src, d1: float, d2: float) -> tuple[float, bool]:
    """Shannon lower bound on R(D1, D2) and whether it is tight."""
    rho = _src(src).rho
    _check(d1, d2)
    value = 0.5 * math.log2((1 - rho * rho) / (d1 * d2))
    return value, (1 - d1) * (1 - d2) >= rho * rho


@dataclass(frozen=True)
class Fig2Curve:
    d1: np.ndarray
    values: np.ndarray
    regimes: tuple
    point_a: float  # end of the plateau, D1 = 1 - rho
    point_b: float  # start of the all-shared regime, D1 = 1 - rho^2/(1 - D2)


def fig2_curve(src, d2: float, d1_grid) -> Fig2Curve:
    """Lossy Wyner CI as a function of D1 at fixed D2."""
    src = _src(src)
    d1 = np.asarray(d1_grid, dtype=float)
    vals = np.array([gaussian_lossy_wyner_ci(src, a, d2) for a in d1])
    regs = tuple(classify_regime(src, a, d2) for a in d1)
    return Fig2Curve(d1, vals, regs, 1 - src.rho, 1 - src.rho ** 2 / (1 - d2))


@dataclass
class ConstructionReport:
    rho: float
    d1: float
    d2: float
    covariance: np.ndarray  # over (X, Y, Xhat, Yhat, U)
    residuals: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def ok(self, tol: float = 1e-12) -> bool:
        return self.max_residual <= tol


ORDER = ("X", "Y", "Xhat", "Yhat", "U")


def _partial(S: np.ndarray, a: list[int], b: list[int], c: list[int]) -> float:
    """Largest entry of the covariance of A and B given C."""
    sac = S[np.ix_(a, c)]
    scc = S[np.ix_(c, c)]
    scb = S[np.ix_(c, b)]
    return float(np.abs(S[np.ix_(a, b)] - sac @ np.linalg.pinv(scc) @ scb).max())


def verify_gaussian_construction(src, d1: float, d2: float, perturb: float = 0.0) -> ConstructionReport:
    """Check the plateau-regime construction by exact covariance algebra.

    Xhat = sqrt(rho) U + sqrt(1-D1-rho) N1,  X = Xhat + sqrt(D1) W1 (same for Y),
    with U, N1, N2, W1, W2 independent standard normals.  ``perturb`` is added to
    the sqrt(rho) loading of Xhat, to exercise the checks.
    """
    src = _src(src)
    rho = src.rho
    _check(d1, d2)
    if classify_regime(src, d1, d2) is not Regime.I_LOSSLESS_CI:
        raise RegimeMismatch("construction applies only when max(D1, D2) <= 1 - rho")
    s = math.sqrt(rho)
    # loadings on (U, N1, N2, W1, W2)
    L = np.zeros((5, 5))
    L[2] = [s + perturb, math.sqrt(max(1 - d1 - rho, 0.0)), 0, 0, 0]
    L[3] = [s, 0, math.sqrt(max(1 - d2 - rho, 0.0)), 0, 0]
    L[0] = L[2] + [0, 0, 0, math.sqrt(d1), 0]
    L[1] = L[3] + [0, 0, 0, 0, math.sqrt(d2)]
    L[4] = [1, 0, 0, 0, 0]
    S = L @ L.T
    X, Y, XH, YH, U = range(5)
    target = np.array([[1 - d1, rho], [rho, 1 - d2]])
    res = {
        "reconstruction_covariance": float(np.abs(S[np.ix_([XH, YH], [XH, YH])] - target).max()),
        "source_covariance": float(np.abs(S[np.ix_([X, Y], [X, Y])] - [[1, rho], [rho, 1]]).max()),
        "markov_xhat_u_yhat": _partial(S, [XH], [YH], [U]),
        "markov_x_u_y": _partial(S, [X], [Y], [U]),
        "markov_xy_recon_u": _partial(S, [X, Y], [U], [XH, YH]),
        "distortion_x": float(abs(S[X, X] - 2 * S[X, XH] + S[XH, XH] - d1)),
        "distortion_y": float(abs(S[Y, Y] - 2 * S[Y, YH] + S[YH, YH] - d2)),
    }
    return ConstructionReport(rho, d1, d2, S, res)
