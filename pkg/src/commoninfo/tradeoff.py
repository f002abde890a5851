"""Auxiliary-variable optimization for the lossless shared-rate tradeoffs.

Two curves are computed for a finite source (X, Y):

* the transmit curve ``C(R')``: least ``I(X,Y;U)`` given ``I(X;Y|U) = R'``;
* the receive curve ``K(R'')``: largest ``I(X,Y;W)`` given
  ``I(X;W|Y) + I(Y;W|X) = R''``.

Both come out of a single pool of candidate auxiliaries.  Any W gives a point
(R', C) and, via ``R'' = R' + I(X,Y;W) - I(X;Y)``, a point (R'', K).  The
C-Lagrangian ``I + lam*R'`` is minimized by damped fixed-point iteration

    q(u|x,y)  ~  p(u) * (p(x|u) p(y|u)) ** (lam / (1 + lam))

run on a batch of random restarts.  For |X||Y| <= 9 the pool also contains every
deterministic map of the support cells.  Curves are reported as the vertices of
the lower convex (C) or upper concave (K) hull of the pool.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import logsumexp, xlogy

from .errors import BadParameter, EmptyCurve, InsufficientPoints, TooLarge
from .gk import ergodic_decomposition, gk_common_information
from .prob import JointPMF, NDDist, entropy_of

LN2 = math.log(2.0)
ENUM_CELL_LIMIT = 9


def default_grid() -> tuple:
    return tuple(float(v) for v in np.geomspace(0.5, 64.0, 20))


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 8
    max_iters: int = 3000
    tol: float = 1e-7
    rng_seed: int = 0
    lagrange_grid: tuple = field(default_factory=default_grid)
    u_card: int | None = None
    enumerate_maps: bool = True

    def __post_init__(self):
        if self.restarts < 1:
            raise BadParameter("restarts must be >= 1")
        if not self.tol > 0:
            raise BadParameter("tol must be positive")
        if self.max_iters < 1:
            raise BadParameter("max_iters must be >= 1")
        grid = tuple(float(v) for v in self.lagrange_grid)
        if not grid or any(not v >= 0 for v in grid):
            raise BadParameter("lagrange_grid must be nonempty and nonnegative")
        object.__setattr__(self, "lagrange_grid", grid)


@dataclass(frozen=True)
class AuxDecomposition:
    """Channel q(u|x,y) stored as a (|X||Y|, |U|) matrix, rows in C order of (x, y)."""

    q: np.ndarray
    u_card: int
    induced: NDDist

    @classmethod
    def from_channel(cls, pmf: JointPMF, q) -> "AuxDecomposition":
        q = np.array(q, dtype=float)
        nx, ny = pmf.shape
        q = q.reshape(nx * ny, -1)
        # rows of zero-probability cells are irrelevant; make them uniform PMFs
        dead = pmf.p.ravel() <= 0
        q[dead] = 1.0 / q.shape[1]
        q /= q.sum(axis=1, keepdims=True)
        q.flags.writeable = False
        joint = pmf.p[:, :, None] * q.reshape(nx, ny, -1)
        ulabels = tuple(str(i) for i in range(q.shape[1]))
        induced = NDDist((("X", pmf.x_labels), ("Y", pmf.y_labels), ("U", ulabels)), joint)
        return cls(q, q.shape[1], induced)


@dataclass(frozen=True)
class CurvePoint:
    excess_rate: float
    shared_rate: float
    decomposition: AuxDecomposition | None
    lagrange_weight: float
    residual: float = 0.0
    converged: bool = True


class WynerResult(NamedTuple):
    value: float
    best: AuxDecomposition
    residual: float
    converged: bool
    ambiguous: bool


# ---------------------------------------------------------------------------
# batched information quantities over support cells


class CellModel:
    """Source restricted to its support cells, for batched evaluation of q(u|cell)."""

    def __init__(self, pmf: JointPMF):
        self.pmf = pmf
        nx, ny = pmf.shape
        self.nx, self.ny = nx, ny
        xi, yi = np.nonzero(pmf.p > 0)
        self.xi, self.yi = xi, yi
        self.cells = xi * ny + yi
        self.pc = pmf.p[xi, yi]
        self.n = len(self.pc)
        self.Mx = np.zeros((nx, self.n))
        self.Mx[xi, np.arange(self.n)] = 1.0
        self.My = np.zeros((ny, self.n))
        self.My[yi, np.arange(self.n)] = 1.0
        self.hx = entropy_of(pmf.px)
        self.hy = entropy_of(pmf.py)
        self.hxy = entropy_of(self.pc)
        self.mi = max(self.hx + self.hy - self.hxy, 0.0)

    def marginals(self, q: np.ndarray):
        j = self.pc[None, :, None] * q
        return j, j.sum(axis=1), self.Mx @ j, self.My @ j

    def stats(self, q: np.ndarray, marg=None):
        """Return (I(XY;U), I(X;Y|U)) in bits for a batch q of shape (B, n, K)."""
        j, pu, pxu, pyu = self.marginals(q) if marg is None else marg
        hu = -xlogy(pu, pu).sum(axis=1)
        hu_xy = -xlogy(j, q).sum(axis=(1, 2))
        hxu = -xlogy(pxu, pxu).sum(axis=(1, 2))
        hyu = -xlogy(pyu, pyu).sum(axis=(1, 2))
        info = np.maximum((hu - hu_xy) / LN2, 0.0)
        resid = np.maximum((hxu + hyu - hu_xy - hu) / LN2 - self.hxy, 0.0)
        return info, resid

    def fixed_point(self, q: np.ndarray, lam: float, marg=None) -> np.ndarray:
        a = 1.0 if math.isinf(lam) else lam / (1.0 + lam)
        _, pu, pxu, pyu = self.marginals(q) if marg is None else marg
        with np.errstate(divide="ignore", invalid="ignore"):
            lpu = np.log(pu)
            lx = np.log(pxu) - lpu[:, None, :]
            ly = np.log(pyu) - lpu[:, None, :]
            logits = lpu[:, None, :] + a * (lx[:, self.xi, :] + ly[:, self.yi, :])
        logits[np.isnan(logits)] = -np.inf
        norm = logsumexp(logits, axis=2, keepdims=True)
        with np.errstate(invalid="ignore"):
            out = np.exp(logits - norm)
        stuck = ~np.isfinite(norm[..., 0])
        if stuck.any():
            out[stuck] = q[stuck]
        return out

    def to_full(self, q_cells: np.ndarray) -> np.ndarray:
        full = np.full((self.nx * self.ny, q_cells.shape[-1]), 1.0 / q_cells.shape[-1])
        full[self.cells] = q_cells
        return full

    def from_full(self, q_full: np.ndarray) -> np.ndarray:
        return np.asarray(q_full, dtype=float).reshape(self.nx * self.ny, -1)[self.cells]


def descend(model: CellModel, q: np.ndarray, lam: float, max_iters: int, stop: float):
    """Fixed-point descent on I + lam*R' for a batch of channels.

    Steps are over-relaxed in the log domain, q ~ q**(1-w) * T(q)**w, with w grown
    on success and reset to a plain (then damped) step whenever the objective
    would increase.  Returns (q, info, resid, converged mask).
    """
    weight = 1.0 if math.isinf(lam) else lam
    base = 0.0 if math.isinf(lam) else 1.0
    q = q.copy()
    marg = model.marginals(q)
    info, resid = model.stats(q, marg)
    f = base * info + weight * resid
    done = np.zeros(len(q), dtype=bool)
    act = np.arange(len(q))
    qa, ma = q, marg
    omega = np.ones(len(q))
    for _ in range(max_iters):
        t = model.fixed_point(qa, lam, ma)
        w = omega[act][:, None, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            lg = (1 - w) * np.log(qa) + w * np.log(t)
        lg[np.isnan(lg) | (t <= 0)] = -np.inf
        qn = np.exp(lg - logsumexp(lg, axis=2, keepdims=True))
        mn = model.marginals(qn)
        i_n, r_n = model.stats(qn, mn)
        f_n = base * i_n + weight * r_n
        bad = ~(f_n <= f[act] + 1e-15)
        if bad.any():
            qn[bad] = t[bad]
            omega[act[bad]] = 1.0
        for _ in range(30):
            if not bad.any():
                break
            mn = model.marginals(qn)
            i_n, r_n = model.stats(qn, mn)
            f_n = base * i_n + weight * r_n
            bad = f_n > f[act] + 1e-15
            qn[bad] = 0.5 * (qa[bad] + qn[bad])
        omega[act[~bad]] = np.minimum(omega[act[~bad]] * 1.5, 16.0)
        delta = np.abs(f[act] - f_n)
        q[act], info[act], resid[act], f[act] = qn, i_n, r_n, f_n
        fin = delta < stop
        done[act[fin]] = True
        if fin.all():
            break
        keep = ~fin
        act = act[keep]
        qa, ma = qn[keep], tuple(m[keep] for m in mn)
    return q, info, resid, done


def restricted_growth_strings(n: int) -> np.ndarray:
    """All set partitions of n items as restricted-growth label arrays."""
    rows = [[0]]
    for _ in range(n - 1):
        rows = [r + [v] for r in rows for v in range(max(r) + 2)]
    return np.array(rows, dtype=int)


# ---------------------------------------------------------------------------
# candidate pool


@dataclass
class Pool:
    model: CellModel
    qs: list  # cell-channel arrays (n, K)
    info: np.ndarray
    resid: np.ndarray
    converged: np.ndarray
    exact: np.ndarray  # True for closed-form / enumerated candidates
    wyner_index: int
    wyner_resid: float
    wyner_ambiguous: bool
    wyner_converged: bool
    gk_index: int
    const_index: int
    full_index: int

    def channel(self, i: int) -> AuxDecomposition:
        return AuxDecomposition.from_channel(self.model.pmf, self.model.to_full(self.qs[i]))

    def c_points(self):
        return self.resid, self.info

    def k_points(self):
        return np.maximum(self.resid + self.info - self.model.mi, 0.0), self.info


_POOL_CACHE: dict = {}


def _one_hot(labels: np.ndarray, k: int) -> np.ndarray:
    return np.eye(k)[labels]


def _merge_labels(j: np.ndarray, tol: float = 1e-2) -> np.ndarray:
    """Merge U labels whose conditional laws p(cell|u) coincide; drop empty labels."""
    mass = j.sum(axis=0)
    cols = []
    for k in np.flatnonzero(mass > 1e-12):
        cond = j[:, k] / mass[k]
        for c in cols:
            if np.abs(c[0] / c[0].sum() - cond).sum() <= tol:
                c[0] += j[:, k]
                break
        else:
            cols.append([j[:, k].copy()])
    return np.stack([c[0] for c in cols], axis=1)


def _label_tv(qa: np.ndarray, qb: np.ndarray, pc: np.ndarray) -> float:
    """Total variation between induced joints after merging duplicate labels and
    the best relabelling of U."""
    ja, jb = _merge_labels(pc[:, None] * qa), _merge_labels(pc[:, None] * qb)
    k = max(ja.shape[1], jb.shape[1])
    ja = np.pad(ja, ((0, 0), (0, k - ja.shape[1])))
    jb = np.pad(jb, ((0, 0), (0, k - jb.shape[1])))
    cost = np.abs(ja[:, :, None] - jb[:, None, :]).sum(axis=0)
    r, c = linear_sum_assignment(cost)
    return 0.5 * float(cost[r, c].sum())


def build_pool(pmf: JointPMF, cfg: SolverConfig) -> Pool:
    key = (pmf.p.tobytes(), pmf.p.shape, cfg)
    if key in _POOL_CACHE:
        return _POOL_CACHE[key]
    model = CellModel(pmf)
    n = model.n
    k = cfg.u_card or n
    if k < 1 or k > pmf.shape[0] * pmf.shape[1] + 1:
        raise BadParameter(f"u_card must lie in [1, |X||Y|+1], got {k}")
    rng = np.random.default_rng(cfg.rng_seed)
    q0 = rng.dirichlet(np.ones(k), size=(cfg.restarts, n))
    stop = cfg.tol * 1e-3

    qs, infos, resids, convs, exact = [], [], [], [], []

    def add(batch, i, r, c, ex):
        for b in range(len(batch)):
            qs.append(np.array(batch[b]))
        infos.extend(np.atleast_1d(i))
        resids.extend(np.atleast_1d(r))
        convs.extend(np.broadcast_to(c, (len(batch),)))
        exact.extend([ex] * len(batch))

    # analytic anchors: constant U, U = (X, Y), U = J
    const = np.ones((1, n, 1))
    add(const, *model.stats(const), True, True)
    const_index = 0
    full = _one_hot(np.arange(n), n)[None]
    add(full, *model.stats(full), True, True)
    full_index = 1
    dec = ergodic_decomposition(pmf)
    jmap = dec.x_map(pmf.shape[0])[model.xi]
    jq = _one_hot(jmap, len(dec))[None]
    add(jq, *model.stats(jq), True, True)
    gk_index = 2

    # deterministic maps of the support cells
    if cfg.enumerate_maps and pmf.shape[0] * pmf.shape[1] <= ENUM_CELL_LIMIT and n > 1:
        labels = restricted_growth_strings(n)
        batch = _one_hot(labels, n)
        add(batch, *model.stats(batch), True, True)

    # Lagrangian sweep with descending weights, warm-started
    q = q0.copy()
    first_stage = None
    for lam in sorted(cfg.lagrange_grid, reverse=True):
        q, i, r, c = descend(model, q, lam, cfg.max_iters, stop)
        if first_stage is None:
            first_stage = q.copy()
        add(q, i, r, c, False)

    # Markov-constrained polish: push the weight up, then pure latent-class EM
    top = max(cfg.lagrange_grid)
    q = first_stage if top >= 1.0 else q0.copy()
    q, i, r, c = descend(model, q, math.inf, cfg.max_iters, stop * 1e-6)
    stalled = r > cfg.tol
    if stalled.any():
        # EM can stall on a near-fit; re-enter through a heavily weighted stage
        qs_, *_ = descend(model, q[stalled], 64 * max(top, 1.0), cfg.max_iters, stop * 1e-6)
        qs_, i_s, r_s, c_s = descend(model, qs_, math.inf, cfg.max_iters, stop * 1e-6)
        q[stalled], i[stalled], r[stalled], c[stalled] = qs_, i_s, r_s, c_s
    start = len(qs)
    add(q, i, r, c, False)

    info = np.array(infos)
    resid = np.array(resids)
    resid[resid < 1e-12] = 0.0
    conv = np.array(convs, dtype=bool)
    ex = np.array(exact, dtype=bool)

    # Wyner point: least I(XY;U) among candidates meeting the Markov tolerance
    ok = np.flatnonzero(resid <= cfg.tol)
    order = np.lexsort((resid[ok], info[ok]))
    wyner_index = int(ok[order[0]])
    ambiguous = False
    polished = np.arange(start, len(qs))
    near = [i for i in polished if resid[i] <= cfg.tol and abs(info[i] - info[wyner_index]) <= 10 * cfg.tol]
    for a in range(len(near)):
        for b in range(a + 1, len(near)):
            if _label_tv(qs[near[a]], qs[near[b]], model.pc) > 1e-3:
                ambiguous = True
    wyner_resid = float(resid[wyner_index])
    resid[wyner_index] = 0.0  # the Wyner vertex sits at zero excess rate on both curves
    pool = Pool(model, qs, info, resid, conv, ex, wyner_index, wyner_resid, ambiguous,
                bool(conv[wyner_index]), gk_index, const_index, full_index)
    _POOL_CACHE[key] = pool
    return pool


def clear_cache() -> None:
    _POOL_CACHE.clear()


# ---------------------------------------------------------------------------
# hulls


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(xs, ys, idx=None, x_tol: float = 1e-9) -> list[int]:
    """Indices of the lower convex hull vertices, sorted by x, collinear points dropped."""
    xs, ys = np.asarray(xs, float), np.asarray(ys, float)
    idx = np.arange(len(xs)) if idx is None else np.asarray(idx)
    order = idx[np.lexsort((ys[idx], xs[idx]))]
    # merge points closer than x_tol in x, keeping the lowest
    merged: list[int] = []
    for i in order:
        if merged and xs[i] - xs[merged[-1]] <= x_tol:
            if ys[i] < ys[merged[-1]]:
                merged[-1] = int(i)
            continue
        merged.append(int(i))
    hull: list[int] = []
    for i in merged:
        while len(hull) >= 2 and _cross((xs[hull[-2]], ys[hull[-2]]), (xs[hull[-1]], ys[hull[-1]]),
                                        (xs[i], ys[i])) <= 1e-11 * (xs[i] - xs[hull[-2]]):
            hull.pop()
        hull.append(i)
    return hull


def upper_hull(xs, ys, idx=None, x_tol: float = 1e-9) -> list[int]:
    return lower_hull(xs, -np.asarray(ys, float), idx, x_tol)


def _supporting_weights(xs, ys, hull, sign: float) -> list[float]:
    """Lower end of the Lagrange-weight interval on which each vertex is optimal."""
    out = []
    for pos in range(len(hull)):
        if pos + 1 < len(hull):
            a, b = hull[pos], hull[pos + 1]
            out.append(sign * (ys[b] - ys[a]) / (xs[b] - xs[a]))
        else:
            out.append(0.0)
    return out


# ---------------------------------------------------------------------------
# public API


def wyner_ci(pmf: JointPMF, cfg: SolverConfig | None = None) -> WynerResult:
    """Least I(X,Y;U) over U with I(X;Y|U) <= cfg.tol."""
    cfg = cfg or SolverConfig()
    pool = build_pool(pmf, cfg)
    i = pool.wyner_index
    value = max(float(pool.info[i]), 0.0)
    return WynerResult(value, pool.channel(i), pool.wyner_resid,
                       bool(pool.converged[i]) or bool(pool.exact[i]), pool.wyner_ambiguous)


def _fixed_point_gap(pool: Pool, i: int, lam: float) -> float:
    q = pool.qs[i][None]
    qn = pool.model.fixed_point(q, lam if lam > 0 else 1e-12)
    return float(np.abs(qn - q).max())


def c_curve(pmf: JointPMF, cfg: SolverConfig | None = None) -> list[CurvePoint]:
    """Vertices of the lower convex envelope of (I(X;Y|U), I(X,Y;U)) over the pool.

    Sorted by excess rate; the first point is the Wyner point (0, C_W) and the
    last is (I(X;Y), 0).  ``lagrange_weight`` is the smallest weight at which the
    vertex minimizes I + weight*R'; ``residual`` is the max change of q under one
    fixed-point step at that weight.
    """
    cfg = cfg or SolverConfig()
    pool = build_pool(pmf, cfg)
    mi = pool.model.mi
    xs, ys = pool.c_points()
    xs, ys = xs.copy(), ys.copy()
    w = pool.wyner_index
    xs[w] = 0.0
    xs[pool.const_index], ys[pool.const_index] = mi, 0.0
    keep = np.flatnonzero((xs > 1e-9) & (xs < mi - 1e-9))
    keep = np.union1d(keep, [w, pool.const_index])
    hull = lower_hull(xs, ys, keep)
    weights = _supporting_weights(xs, ys, hull, -1.0)
    pts = []
    for i, lam in zip(hull, weights):
        pts.append(CurvePoint(float(xs[i]), float(ys[i]), pool.channel(i), float(lam),
                              _fixed_point_gap(pool, i, lam) if not pool.exact[i] else 0.0,
                              bool(pool.converged[i] or pool.exact[i])))
    return pts


def k_curve(pmf: JointPMF, cfg: SolverConfig | None = None) -> list[CurvePoint]:
    """Vertices of the upper concave envelope of (I(X;W|Y)+I(Y;W|X), I(X,Y;W)).

    Maximizing ``K - mu*R''`` for mu > 1 is the transmit problem with weight
    ``mu/(mu-1)``, so the same pool serves both curves.  The first point is
    (0, C_GK) and the last is (H(X,Y) - I(X;Y), H(X,Y)).
    """
    cfg = cfg or SolverConfig()
    pool = build_pool(pmf, cfg)
    model = pool.model
    xs, ys = pool.k_points()
    xs, ys = xs.copy(), ys.copy()
    g, f = pool.gk_index, pool.full_index
    xs[g], ys[g] = 0.0, gk_common_information(pmf)
    xs[f], ys[f] = model.hxy - model.mi, model.hxy
    keep = np.flatnonzero((xs > 1e-9) & (xs < xs[f] - 1e-9))
    keep = np.union1d(keep, [g, f])
    hull = upper_hull(xs, ys, keep)
    weights = _supporting_weights(xs, ys, hull, 1.0)
    pts = []
    for i, mu in zip(hull, weights):
        lam = mu / (mu - 1.0) if mu > 1.0 else math.inf
        pts.append(CurvePoint(float(xs[i]), float(ys[i]), pool.channel(i), float(mu),
                              _fixed_point_gap(pool, i, lam) if not pool.exact[i] else 0.0,
                              bool(pool.converged[i] or pool.exact[i])))
    return pts


def _slopes(points: Sequence[CurvePoint]):
    pts = sorted(points, key=lambda p: p.excess_rate)
    if not pts:
        raise InsufficientPoints("empty curve")
    xs = np.array([p.excess_rate for p in pts])
    ys = np.array([p.shared_rate for p in pts])
    keep = np.concatenate([[True], np.diff(xs) > 1e-12])
    xs, ys = xs[keep], ys[keep]
    return xs, ys, np.diff(ys) / np.diff(xs)


def _match_slope(s: np.ndarray, target: float, slope_tol: float):
    """Index of the first segment whose slope best matches ``target`` within tol."""
    err = np.abs(s - target)
    hits = np.flatnonzero(err <= slope_tol)
    if not len(hits):
        return None
    best = err[hits].min()
    return int(hits[np.flatnonzero(err[hits] <= best + 1e-9)[0]])


def gk_from_curve(c_points: Sequence[CurvePoint], slope_tol: float = 5e-2) -> float:
    """Shared rate where the transmit curve's forward slope reaches -1 (0 if never).

    Among vertices whose forward slope is within ``slope_tol`` of -1, the one with
    the closest slope wins; exact ties go to the smallest excess rate.  A
    single-point curve means I(X;Y) = 0 and yields 0.
    """
    xs, ys, s = _slopes(c_points)
    i = _match_slope(s, -1.0, slope_tol)
    return 0.0 if i is None else float(ys[i])


def wyner_from_curve(k_points: Sequence[CurvePoint], slope_tol: float = 5e-2) -> float:
    """Receive-curve value where its forward slope settles at +1.

    Vertex selection mirrors :func:`gk_from_curve`.  Falls back to the right
    end of the curve, H(X,Y), when no slope is near one.  A single-point curve
    (X and Y determine each other, so H(X,Y) - I(X;Y) = 0) returns that point.
    """
    xs, ys, s = _slopes(k_points)
    i = _match_slope(s, 1.0, slope_tol)
    return float(ys[-1]) if i is None else float(ys[i])


def transmit_receive_tradeoff(c_points, k_points, pmf: JointPMF) -> list[tuple[float, float]]:
    """Least receive rate R_r = 2R0+R1+R2 for each total transmit rate R_t = R0+R1+R2.

    Transmit-curve points map to (H + R', H + R' + C); receive-curve points map
    to (H(X)+H(Y)+R''-K, H(X)+H(Y)+R'').  The result is the lower envelope of
    both families over R_t in [H(X,Y), H(X)+H(Y)].
    """
    if not c_points and not k_points:
        raise EmptyCurve("no curve points supplied")
    hxy, hx, hy = pmf.hxy(), pmf.hx(), pmf.hy()
    pts = [(hxy + p.excess_rate, hxy + p.excess_rate + p.shared_rate) for p in c_points]
    pts += [(hx + hy + p.excess_rate - p.shared_rate, hx + hy + p.excess_rate) for p in k_points]
    lo, hi = hxy, hx + hy
    pts = [(t, r) for t, r in pts if lo - 1e-9 <= t <= hi + 1e-9]
    if not pts:
        raise EmptyCurve("no points in the transmit-rate range")
    xs = np.clip([t for t, _ in pts], lo, hi)
    ys = np.array([r for _, r in pts])
    hull = lower_hull(xs, ys)
    out = []
    for i in hull:
        if out and ys[i] > out[-1][1]:
            break  # past the minimum receive rate
        out.append((float(xs[i]), float(ys[i])))
    return out


def receive_contour(c_points, pmf: JointPMF) -> list[tuple[float, float]]:
    """Least transmit rate for each receive rate, read off the transmit curve."""
    hxy = pmf.hxy()
    pts = sorted((hxy + p.excess_rate + p.shared_rate, hxy + p.excess_rate) for p in c_points)
    return [(float(r), float(t)) for r, t in pts]


def interpolate(points: Sequence[CurvePoint], x: float) -> float:
    pts = sorted(points, key=lambda p: p.excess_rate)
    return float(np.interp(x, [p.excess_rate for p in pts], [p.shared_rate for p in pts]))


# ---------------------------------------------------------------------------
# brute-force oracle

ORACLE_MAX_POINTS = 3e7


def _simplex_grid(k: int, step: float) -> np.ndarray:
    m = int(round(1.0 / step))
    if k == 2:
        a = np.arange(m + 1) / m
        return np.stack([a, 1 - a], axis=1)
    rows = [(i, j, m - i - j) for i in range(m + 1) for j in range(m + 1 - i)]
    return np.array(rows, dtype=float) / m


def _markov_family(pmf: JointPMF, step: float, all_points: bool = False):
    """Exact zero-residual binary-U decompositions of a 2x2 source.

    p(x,y) = sum_u pi_u a_u(x) b_u(y); grid over pi and a_0(0), solve for the rest.
    Returns (info, q) of the best feasible point, or None.  With ``all_points``
    the channels q(u|x,y) of every feasible grid point are returned instead,
    shaped (N, 4, 2).
    """
    p = pmf.p
    px0 = p[0].sum()
    m = int(round(1.0 / step))
    g = (np.arange(1, m) / m)
    pi, a0 = np.meshgrid(g, np.linspace(0, 1, m + 1), indexing="ij")
    pi, a0 = pi.ravel(), a0.ravel()
    a1 = (px0 - pi * a0) / (1 - pi)
    ok = (a1 >= 0) & (a1 <= 1)
    pi, a0, a1 = pi[ok], a0[ok], a1[ok]
    # A[x,u] = pi_u a_u(x); B = A^{-1} P gives rows b_u(y)
    A = np.empty((len(pi), 2, 2))
    A[:, 0, 0], A[:, 1, 0] = pi * a0, pi * (1 - a0)
    A[:, 0, 1], A[:, 1, 1] = (1 - pi) * a1, (1 - pi) * (1 - a1)
    det = A[:, 0, 0] * A[:, 1, 1] - A[:, 0, 1] * A[:, 1, 0]
    good = np.abs(det) > 1e-12
    A, pi = A[good], pi[good]
    B = np.linalg.solve(A, np.broadcast_to(p, A.shape))
    feas = np.all(B >= -1e-12, axis=(1, 2))
    if not feas.any():
        return None
    A, B, pi = A[feas], np.clip(B[feas], 0, None), pi[feas]
    # joint p(x,y,u) = A[x,u] B[u,y]
    j = np.einsum("nxu,nuy->nxyu", A, B)
    if all_points:
        denom = np.where(p > 0, p, 1.0)[None, :, :, None]
        q = (j / denom).reshape(len(j), 4, 2)
        q[:, p.ravel() <= 0] = 0.5
        return q / q.sum(axis=2, keepdims=True)
    pu = np.stack([pi, 1 - pi], axis=1)
    hxyu = -xlogy(j, j).sum(axis=(1, 2, 3)) / LN2
    hu = -xlogy(pu, pu).sum(axis=1) / LN2
    info = hu + entropy_of(p) - hxyu
    best = int(np.argmin(info))
    q = (j[best] / np.where(p > 0, p, 1)[:, :, None]).reshape(4, 2)
    return float(info[best]), q


def oracle_c_curve(pmf: JointPMF, u_card: int = 2, grid_step: float = 0.02,
                   exact_step: float = 1e-3, bins: int = 20000) -> list[CurvePoint]:
    """Brute-force lower envelope of (I(X;Y|U), I(X,Y;U)) over a grid of channels.

    Only for sources with at most four cells.  For 2x2 sources and binary U the
    left endpoint comes from an exact scan of conditionally independent
    decompositions, since a coarse channel grid never lands on R' = 0.
    """
    nx, ny = pmf.shape
    if nx * ny > 4:
        raise TooLarge("oracle handles at most 2x2 sources")
    if u_card not in (2, 3):
        raise TooLarge("oracle handles u_card 2 or 3")
    model = CellModel(pmf)
    simplex = _simplex_grid(u_card, grid_step)
    n = model.n
    total = float(len(simplex)) ** n
    if total > ORACLE_MAX_POINTS:
        raise TooLarge(f"grid has {total:.3g} points")
    mi = model.mi
    edges = np.linspace(0.0, mi, bins + 1) if mi > 0 else np.array([0.0, 1.0])
    nb = len(edges) - 1
    best_c = np.full(nb, np.inf)
    best_q = np.zeros((nb, n, u_card))
    s = len(simplex)
    rest = np.stack(np.meshgrid(*([np.arange(s)] * (n - 1)), indexing="ij"), -1).reshape(-1, n - 1) \
        if n > 1 else np.zeros((1, 0), dtype=int)
    for first in range(s):
        ids = np.concatenate([np.full((len(rest), 1), first), rest], axis=1)
        q = simplex[ids]
        info, resid = model.stats(q)
        ok = resid <= mi + 1e-12
        if not ok.any():
            continue
        b = np.minimum(np.searchsorted(edges, resid[ok], side="right") - 1, nb - 1)
        b = np.maximum(b, 0)
        vals, qq = info[ok], q[ok]
        order = np.lexsort((vals, b))
        b, vals, qq = b[order], vals[order], qq[order]
        head = np.concatenate([[True], b[1:] != b[:-1]])
        bb, vv, qh = b[head], vals[head], qq[head]
        better = vv < best_c[bb]
        best_c[bb[better]] = vv[better]
        best_q[bb[better]] = qh[better]
    # representative excess rate per bin: recompute from the stored channel
    filled = np.flatnonzero(np.isfinite(best_c))
    qs = best_q[filled]
    info, resid = model.stats(qs) if len(qs) else (np.zeros(0), np.zeros(0))
    xs, ys = list(resid), list(info)
    chans = [qs[i] for i in range(len(qs))]
    if u_card == 2 and nx == 2 and ny == 2 and mi > 0:
        fam = _markov_family(pmf, exact_step)
        if fam is not None:
            xs.append(0.0)
            ys.append(fam[0])
            chans.append(model.from_full(fam[1]))
    const = np.zeros((n, u_card))
    const[:, 0] = 1.0
    xs.append(mi)
    ys.append(0.0)
    chans.append(const)
    xs, ys = np.array(xs), np.array(ys)
    hull = lower_hull(xs, ys)
    weights = _supporting_weights(xs, ys, hull, -1.0)
    return [CurvePoint(float(xs[i]), float(ys[i]),
                       AuxDecomposition.from_channel(pmf, model.to_full(chans[i])), float(w))
            for i, w in zip(hull, weights)]


def write_curve_csv(points: Sequence[CurvePoint], path_or_file) -> None:
    fmt = lambda v: f"{v:.9g}"
    close = False
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        fh = open(path_or_file, "w", newline="")
        close = True
    else:
        fh = path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["excess_rate_bits", "shared_rate_bits", "lagrange_weight", "residual", "converged"])
        for p in points:
            w.writerow([fmt(p.excess_rate), fmt(p.shared_rate), fmt(p.lagrange_weight),
                        fmt(p.residual), str(bool(p.converged)).lower()])
    finally:
        if close:
            fh.close()
