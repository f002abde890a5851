"""Finite-alphabet probability machinery.

All information quantities are in bits.  Distributions are dense numpy arrays;
``NDDist`` attaches axis names so that entropies and (conditional) mutual
informations can be requested by name, e.g. ``mutual_information(d, "X", ["Y", "U"])``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AllZero,
    NegativeEntry,
    OverlappingGroups,
    ParseError,
    ShapeMismatch,
    UnknownAxis,
)

NORM_TOL = 1e-9
FILE_SUM_TOL = 1e-6
CLAMP_TOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def entropy_of(p: np.ndarray) -> float:
    """-sum p log2 p over an array of probabilities (0 log 0 = 0)."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(t: float) -> float:
    if t <= 0.0 or t >= 1.0:
        return 0.0
    return float(-t * np.log2(t) - (1 - t) * np.log2(1 - t))


@dataclass(frozen=True)
class NDDist:
    """A joint PMF over named axes.

    ``axes`` is a tuple of ``(name, labels)`` pairs, one per array dimension.
    """

    axes: tuple
    p: np.ndarray

    def __post_init__(self):
        axes = tuple((str(n), tuple(str(l) for l in labels)) for n, labels in self.axes)
        p = np.asarray(self.p, dtype=float)
        if p.ndim != len(axes):
            raise ShapeMismatch(f"{p.ndim}-d array for {len(axes)} axes")
        for (name, labels), size in zip(axes, p.shape):
            if len(labels) != size:
                raise ShapeMismatch(f"axis {name!r}: {len(labels)} labels for size {size}")
        names = [n for n, _ in axes]
        if len(set(names)) != len(names):
            raise ShapeMismatch(f"duplicate axis names {names}")
        if np.any(p < 0):
            raise NegativeEntry("negative probability")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ShapeMismatch(f"distribution sums to {p.sum():.12g}")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "p", _freeze(p))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.axes)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownAxis(f"no axis {name!r} in {self.names}") from None

    def labels(self, name: str) -> tuple[str, ...]:
        return self.axes[self.index(name)][1]

    @classmethod
    def from_array(cls, p, names: Sequence[str], labels: Sequence[Sequence] | None = None) -> "NDDist":
        p = np.asarray(p, dtype=float)
        if labels is None:
            labels = [[str(i) for i in range(s)] for s in p.shape]
        return cls(tuple(zip(names, labels)), p)


@dataclass(frozen=True)
class JointPMF:
    """Joint law of the source pair (X, Y) with labelled alphabets."""

    x_labels: tuple
    y_labels: tuple
    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 2:
            raise ShapeMismatch("JointPMF needs a 2-d matrix")
        if p.shape != (len(self.x_labels), len(self.y_labels)):
            raise ShapeMismatch(f"matrix {p.shape} vs labels ({len(self.x_labels)}, {len(self.y_labels)})")
        if np.any(p < 0):
            raise NegativeEntry("negative probability")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ShapeMismatch(f"distribution sums to {p.sum():.12g}")
        object.__setattr__(self, "x_labels", tuple(str(l) for l in self.x_labels))
        object.__setattr__(self, "y_labels", tuple(str(l) for l in self.y_labels))
        object.__setattr__(self, "p", _freeze(p))

    @property
    def shape(self) -> tuple[int, int]:
        return self.p.shape

    @property
    def px(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def py(self) -> np.ndarray:
        return self.p.sum(axis=0)

    def as_dist(self, names=("X", "Y")) -> NDDist:
        return NDDist(((names[0], self.x_labels), (names[1], self.y_labels)), self.p)

    def hx(self) -> float:
        return entropy_of(self.px)

    def hy(self) -> float:
        return entropy_of(self.py)

    def hxy(self) -> float:
        return entropy_of(self.p)

    def mi(self) -> float:
        return max(self.hx() + self.hy() - self.hxy(), 0.0)


def validate_and_trim(raw, x_labels=None, y_labels=None) -> JointPMF:
    """Normalize a nonnegative matrix and drop all-zero rows and columns."""
    a = np.array(raw, dtype=float)
    if a.ndim != 2:
        raise ShapeMismatch("expected a 2-d matrix")
    if np.any(a < 0):
        raise NegativeEntry("matrix has negative entries")
    total = a.sum()
    if not total > 0:
        raise AllZero("matrix sums to zero")
    x_labels = [str(i) for i in range(a.shape[0])] if x_labels is None else list(x_labels)
    y_labels = [str(j) for j in range(a.shape[1])] if y_labels is None else list(y_labels)
    if len(x_labels) != a.shape[0] or len(y_labels) != a.shape[1]:
        raise ShapeMismatch("label count does not match matrix shape")
    rows = a.sum(axis=1) > 0
    cols = a.sum(axis=0) > 0
    a = a[np.ix_(rows, cols)] / total
    return JointPMF(
        tuple(l for l, keep in zip(x_labels, rows) if keep),
        tuple(l for l, keep in zip(y_labels, cols) if keep),
        a / a.sum(),
    )


def _group(d: NDDist, group) -> list[int]:
    if isinstance(group, str):
        group = [group]
    idx = [d.index(g) for g in group]
    if len(set(idx)) != len(idx):
        raise OverlappingGroups(f"repeated axis in {group}")
    return idx


def _marginal_array(d: NDDist, idx: Iterable[int]) -> np.ndarray:
    keep = sorted(set(idx))
    drop = tuple(i for i in range(d.p.ndim) if i not in keep)
    return d.p.sum(axis=drop) if drop else d.p


def entropy(d: NDDist, axes) -> float:
    idx = _group(d, axes)
    if not idx:
        raise UnknownAxis("entropy needs at least one axis")
    return entropy_of(_marginal_array(d, idx))


def _disjoint(*groups: list[int]) -> None:
    seen: set[int] = set()
    for g in groups:
        if seen & set(g):
            raise OverlappingGroups("axis groups overlap")
        seen |= set(g)


def mutual_information(d: NDDist, group_a, group_b) -> float:
    a, b = _group(d, group_a), _group(d, group_b)
    _disjoint(a, b)
    val = (entropy_of(_marginal_array(d, a)) + entropy_of(_marginal_array(d, b))
           - entropy_of(_marginal_array(d, a + b)))
    return val if val > CLAMP_TOL else 0.0


def conditional_mutual_information(d: NDDist, group_a, group_b, group_c) -> float:
    """I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)."""
    a, b, c = _group(d, group_a), _group(d, group_b), _group(d, group_c)
    _disjoint(a, b, c)
    if not c:
        return mutual_information(d, group_a, group_b)
    h = lambda g: entropy_of(_marginal_array(d, g))
    val = h(a + c) + h(b + c) - h(a + b + c) - h(c)
    return val if val > CLAMP_TOL else 0.0


def conditional_entropy(d: NDDist, group_a, group_c) -> float:
    a, c = _group(d, group_a), _group(d, group_c)
    _disjoint(a, c)
    val = entropy_of(_marginal_array(d, a + c)) - (entropy_of(_marginal_array(d, c)) if c else 0.0)
    return max(val, 0.0)


def marginalize(d: NDDist, axes) -> NDDist:
    """Marginal over ``axes``, kept in the order given."""
    idx = _group(d, axes)
    m = _marginal_array(d, idx)
    order = sorted(idx)
    m = np.transpose(m, [order.index(i) for i in idx])
    return NDDist(tuple(d.axes[i] for i in idx), m / m.sum())


def condition(d: NDDist, given) -> tuple[NDDist, np.ndarray]:
    """Split ``d`` into the marginal on ``given`` and a conditional array.

    The conditional has the same shape and axis order as ``d.p``; where the
    conditioning event has zero mass it is left at zero.
    """
    idx = _group(d, given)
    marg = marginalize(d, [d.names[i] for i in idx])
    denom = _marginal_array(d, idx)
    shape = [d.p.shape[i] if i in idx else 1 for i in range(d.p.ndim)]
    denom = denom.reshape(shape)
    cond = np.divide(d.p, denom, out=np.zeros_like(d.p), where=denom > 0)
    return marg, cond


def recompose(marg: NDDist, cond: np.ndarray, d_axes: tuple) -> NDDist:
    """Inverse of :func:`condition`."""
    names = [n for n, _ in d_axes]
    shape = [cond.shape[i] if n in marg.names else 1 for i, n in enumerate(names)]
    order = [marg.names.index(n) for n in names if n in marg.names]
    m = np.transpose(marg.p, order).reshape(shape)
    return NDDist(d_axes, cond * m)


def product_compose(d: NDDist, kernel, given, new_axis: str, new_labels=None) -> NDDist:
    """Append an axis drawn from ``kernel`` conditioned on the ``given`` axes.

    ``kernel`` has shape ``(*sizes of given, n_new)`` and rows summing to one.
    The result is p(d) * kernel(new | given).
    """
    idx = _group(d, given)
    k = np.asarray(kernel, dtype=float)
    want = tuple(d.p.shape[i] for i in idx)
    if k.shape[:-1] != want:
        raise ShapeMismatch(f"kernel shape {k.shape} does not match given sizes {want}")
    if np.any(k < 0) or not np.allclose(k.sum(axis=-1), 1.0, atol=NORM_TOL):
        raise ShapeMismatch("kernel rows must be PMFs")
    n_new = k.shape[-1]
    # place kernel dims onto the positions of the given axes, broadcast the rest
    order = sorted(range(len(idx)), key=lambda j: idx[j])
    k = np.transpose(k, order + [len(idx)])
    shape = [d.p.shape[i] if i in idx else 1 for i in range(d.p.ndim)] + [n_new]
    joint = d.p[..., None] * k.reshape(shape)
    labels = [str(i) for i in range(n_new)] if new_labels is None else new_labels
    return NDDist(d.axes + ((new_axis, tuple(labels)),), joint)


def load_pmf(path) -> JointPMF:
    """Read a JointPMF from a JSON document with ``x_labels``, ``y_labels``, ``p``."""
    try:
        doc = json.loads(Path(path).read_text())
        p = np.array(doc["p"], dtype=float)
        xl, yl = list(doc["x_labels"]), list(doc["y_labels"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"cannot read PMF file {path}: {exc}") from exc
    if p.ndim != 2 or p.shape != (len(xl), len(yl)):
        raise ParseError(f"matrix shape {p.shape} does not match labels")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ParseError("matrix entries must be finite and nonnegative")
    if abs(p.sum() - 1.0) > FILE_SUM_TOL:
        raise ParseError(f"entries sum to {p.sum():.9g}, outside 1e-6 of 1")
    return validate_and_trim(p, xl, yl)


def dump_pmf(pmf: JointPMF, path) -> None:
    Path(path).write_text(json.dumps(
        {"x_labels": list(pmf.x_labels), "y_labels": list(pmf.y_labels), "p": pmf.p.tolist()},
        indent=2))


def dsbs(crossover: float) -> JointPMF:
    """Doubly symmetric binary source with the given crossover probability."""
    a = 0.5 * crossover
    b = 0.5 * (1 - crossover)
    return validate_and_trim([[b, a], [a, b]])
