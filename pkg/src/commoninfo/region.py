"""Gray-Wyner rate points generated from witness joints.

Every point is achievable by construction: it is computed from an explicit
auxiliary decomposition (the witness), which travels with the point.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import BadParameter, MarginalMismatch, ShapeMismatch
from .prob import JointPMF, NDDist, conditional_entropy, conditional_mutual_information, mutual_information
from .tradeoff import AuxDecomposition

CLAMP = 1e-9
JOINT5 = ("X", "Y", "Xhat", "Yhat", "U")
REGION_HEADER = ("r0", "r1", "r2", "sum", "d1", "d2", "witness_id")


def _clamp(v: float, name: str) -> float:
    v = float(v)
    if v < -CLAMP:
        raise BadParameter(f"{name} = {v} is negative")
    return max(v, 0.0)


@dataclass(frozen=True)
class RatePoint:
    r0: float
    r1: float
    r2: float
    d1: float = 0.0
    d2: float = 0.0
    witness_id: str = ""
    witness: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for name in ("r0", "r1", "r2"):
            object.__setattr__(self, name, _clamp(getattr(self, name), name))

    @property
    def total(self) -> float:
        return self.r0 + self.r1 + self.r2

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r0, self.r1, self.r2)


@dataclass(frozen=True)
class VKGBounds:
    """Corner point plus the four lower bounds of the alternate characterization."""

    corner: RatePoint
    r0: float  # I(X,Y;U)
    r01: float  # I(X,Y;U,Xhat)
    r02: float  # I(X,Y;U,Yhat)
    total: float  # I(X,Y;U,Xhat,Yhat) + I(Xhat;Yhat|U)

    def contains(self, point: RatePoint, tol: float = 1e-9) -> bool:
        return (point.r0 >= self.r0 - tol and point.r0 + point.r1 >= self.r01 - tol
                and point.r0 + point.r2 >= self.r02 - tol and point.total >= self.total - tol)


def lossless_point(pmf: JointPMF, aux: AuxDecomposition, witness_id: str = "") -> RatePoint:
    """(I(X,Y;U), H(X|U), H(Y|U)) for the joint induced by ``aux``."""
    d = aux.induced
    if d.p.shape[:2] != pmf.shape or not np.allclose(d.p.sum(axis=2), pmf.p, atol=1e-9):
        raise MarginalMismatch("decomposition does not reproduce the source joint")
    r0 = mutual_information(d, ["X", "Y"], ["U"])
    r1 = conditional_entropy(d, ["X"], ["U"])
    r2 = conditional_entropy(d, ["Y"], ["U"])
    return RatePoint(r0, r1, r2, 0.0, 0.0, witness_id, aux)


def _check_joint5(joint5: NDDist, spec) -> None:
    if joint5.names != JOINT5:
        raise ShapeMismatch(f"expected axes {JOINT5}, got {joint5.names}")
    nx, ny, mx, my, _ = joint5.p.shape
    if spec is not None and (spec.d_x.shape != (nx, mx) or spec.d_y.shape != (ny, my)):
        raise ShapeMismatch("distortion matrices do not match the joint's alphabets")


def _distortions(joint5: NDDist, spec) -> tuple[float, float]:
    if spec is None:
        return 0.0, 0.0
    p = joint5.p
    pxx = p.sum(axis=(1, 3, 4))
    pyy = p.sum(axis=(0, 2, 4))
    return float(np.sum(pxx * spec.d_x)), float(np.sum(pyy * spec.d_y))


def lossy_point(joint5: NDDist, spec=None, witness_id: str = "") -> tuple[RatePoint, float, float]:
    """(I(X,Y;U), I(X;Xhat|U), I(Y;Yhat|U)) and the achieved distortions."""
    _check_joint5(joint5, spec)
    d1, d2 = _distortions(joint5, spec)
    pt = RatePoint(
        mutual_information(joint5, ["X", "Y"], ["U"]),
        conditional_mutual_information(joint5, ["X"], ["Xhat"], ["U"]),
        conditional_mutual_information(joint5, ["Y"], ["Yhat"], ["U"]),
        d1, d2, witness_id, joint5,
    )
    return pt, d1, d2


def vkg_point(joint5: NDDist, spec=None, witness_id: str = "") -> VKGBounds:
    """Corner (I(X,Y;U), I(X,Y;Xhat|U), I(X,Y;Yhat|U,Xhat)) with the four bounds."""
    _check_joint5(joint5, spec)
    d1, d2 = _distortions(joint5, spec)
    xy = ["X", "Y"]
    r0 = mutual_information(joint5, xy, ["U"])
    corner = RatePoint(
        r0,
        conditional_mutual_information(joint5, xy, ["Xhat"], ["U"]),
        conditional_mutual_information(joint5, xy, ["Yhat"], ["U", "Xhat"]),
        d1, d2, witness_id, joint5,
    )
    return VKGBounds(
        corner,
        r0,
        mutual_information(joint5, xy, ["U", "Xhat"]),
        mutual_information(joint5, xy, ["U", "Yhat"]),
        mutual_information(joint5, xy, ["U", "Xhat", "Yhat"])
        + conditional_mutual_information(joint5, ["Xhat"], ["Yhat"], ["U"]),
    )


def pangloss_gap(point: RatePoint, target_sum: float) -> float:
    """Distance of r0+r1+r2 above the minimal total rate."""
    return point.total - float(target_sum)


def gk_plane_gap(point: RatePoint, targets) -> tuple[float, float]:
    """(r0+r1 - target_x, r0+r2 - target_y); ``targets`` is a JointPMF or a pair."""
    if isinstance(targets, JointPMF):
        tx, ty = targets.hx(), targets.hy()
    else:
        tx, ty = map(float, targets)
    return point.r0 + point.r1 - tx, point.r0 + point.r2 - ty


def write_region_csv(points, path_or_file=None) -> str:
    """Write points as CSV ``r0,r1,r2,sum,d1,d2,witness_id``; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REGION_HEADER)
    for pt in points:
        w.writerow([f"{v:.9g}" for v in (pt.r0, pt.r1, pt.r2, pt.total, pt.d1, pt.d2)] + [pt.witness_id])
    text = buf.getvalue()
    if path_or_file is not None:
        if hasattr(path_or_file, "write"):
            path_or_file.write(text)
        else:
            with open(path_or_file, "w", newline="") as fh:
                fh.write(text)
    return text
