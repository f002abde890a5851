"""Lossy quantities for finite sources with per-component distortion measures.

* :func:`joint_rd` solves R(D1, D2) with a two-multiplier Blahut-Arimoto loop.
* :func:`lossy_wyner_ci` fixes the RD-optimal test channel and minimizes
  I(X,Y;U) over q(u|xhat,yhat) subject to Xhat - U - Yhat.
* :func:`lossy_gk_ci` maximizes I(X,Y;U) over U that are functions of the
  ergodic class, penalizing what U reveals beyond the marginal reconstructions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from scipy.optimize import brentq

from .engine import Objective, mirror_descent
from .errors import BadParameter, Infeasible, UnsupportedDistortion
from .gk import ergodic_decomposition, gk_common_information
from .prob import JointPMF, NDDist, binary_entropy, entropy_of, conditional_mutual_information
from .tradeoff import CellModel, SolverConfig, _markov_family, descend, lower_hull, restricted_growth_strings

LN2 = math.log(2.0)
S_MAX = 400.0  # nats per unit distortion; exp(-S_MAX) is far below double precision relevance
S_MIN = 1e-6
SEARCH_ITERS = 300  # BA iteration cap while searching for multipliers
SEARCH_TOL = 1e-7


def _lse(a: np.ndarray, axis=None) -> np.ndarray:
    """logsumexp without scipy's per-call overhead (used in the BA hot loop)."""
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)) + m
    return np.squeeze(out, axis=axis) if axis is not None else float(out.ravel()[0])


@dataclass(frozen=True)
class DistortionSpec:
    d_x: np.ndarray
    d_y: np.ndarray
    names: tuple = ("custom", "custom")

    def __post_init__(self):
        dx = np.array(self.d_x, dtype=float)
        dy = np.array(self.d_y, dtype=float)
        for d in (dx, dy):
            if d.ndim != 2 or not np.all(np.isfinite(d)) or np.any(d < 0):
                raise BadParameter("distortion matrices must be finite, nonnegative, 2-d")
        dx.flags.writeable = False
        dy.flags.writeable = False
        object.__setattr__(self, "d_x", dx)
        object.__setattr__(self, "d_y", dy)

    @classmethod
    def hamming(cls, nx: int, ny: int | None = None) -> "DistortionSpec":
        ny = nx if ny is None else ny
        return cls(1.0 - np.eye(nx), 1.0 - np.eye(ny), ("hamming", "hamming"))

    def check(self, pmf: JointPMF) -> None:
        if self.d_x.shape[0] != pmf.shape[0] or self.d_y.shape[0] != pmf.shape[1]:
            raise BadParameter("distortion rows must match the source alphabets")


@dataclass(frozen=True)
class RDConfig:
    dist_tol: float = 1e-6
    rd_tol: float = 1e-8
    bisect_iters: int = 60
    max_ba_iters: int = 20000


@dataclass
class RDSolution:
    test_channel: np.ndarray  # (nx, ny, mx, my): P(xhat, yhat | x, y)
    rate: float
    d1_achieved: float
    d2_achieved: float
    multipliers: tuple
    converged: bool
    lower_bound: float = 0.0  # certified dual lower bound at the targets

    def joint(self, pmf: JointPMF) -> np.ndarray:
        return pmf.p[:, :, None, None] * self.test_channel


# ---------------------------------------------------------------------------
# Blahut-Arimoto with several distortion constraints


@dataclass
class _BAProblem:
    p: np.ndarray  # source PMF over a (n_a,)
    dists: list  # distortion matrices (n_a, n_r)
    mask: np.ndarray  # allowed (a, r) pairs

    def run(self, s, r0=None, max_iters=20000, tol=1e-8):
        """BA at fixed multipliers s (nats per unit distortion).

        The output-marginal update r <- r * c**w is over-relaxed (w grows while
        the dual objective keeps decreasing, and drops back to 1 otherwise).
        Returns (Q, r, converged, dual_terms) where dual_terms gives
        (sum_a p log Z_a, max_r log c_r) for the lower bound.
        """
        n_a, n_r = self.mask.shape
        logk = np.where(self.mask, 0.0, -np.inf)
        for si, d in zip(s, self.dists):
            logk = logk - si * d
        keep = self.mask.any(axis=0)
        r = np.full(n_r, 1.0 / n_r) if r0 is None else r0.copy()
        r = np.where(keep, np.maximum(r, 1e-300), 0.0)
        r /= r.sum()
        logp = np.log(self.p)[:, None]

        def state(r):
            with np.errstate(divide="ignore"):
                lr = np.log(r)
            lz = _lse(lr[None, :] + logk, axis=1)
            lc = _lse(logp + logk - lz[:, None], axis=0)
            lc = np.where(keep, lc, -np.inf)
            return float(np.dot(self.p, lz)), lc

        f, lc = state(r)
        omega = 1.0
        conv = False
        for _ in range(max_iters):
            gap = float(np.max(lc))  # >= 0; zero at the optimum
            if gap < tol * LN2:
                conv = True
                break
            while True:
                with np.errstate(divide="ignore", invalid="ignore"):
                    lr = np.log(r) + omega * lc
                lr = np.where(keep, lr, -np.inf)
                rn = np.exp(lr - _lse(lr))
                fn, lcn = state(rn)
                # the dual value sum p log Z must not drop (plain BA is monotone)
                if fn >= f - 1e-15 or omega == 1.0:
                    break
                omega = 1.0
            r, f, lc = rn, fn, lcn
            omega = min(omega * 1.5, 32.0)
        with np.errstate(divide="ignore"):
            lr = np.log(r)
        lq = lr[None, :] + logk
        lz = _lse(lq, axis=1)
        Q = np.exp(lq - lz[:, None])
        return Q, r, conv, (float(np.dot(self.p, lz)), float(np.max(lc)))

    def evaluate(self, Q):
        j = self.p[:, None] * Q
        r = j.sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(j > 0, Q / r[None, :], 1.0)
        rate = float(np.sum(xlogy(j, ratio)) / LN2)
        return max(rate, 0.0), [float(np.sum(j * d)) for d in self.dists]

    def dual_bound(self, s, targets, terms) -> float:
        """Lower bound on the rate at ``targets`` from multipliers s and BA state."""
        sum_logz, max_logc = terms
        return (-sum_logz - max_logc - sum(si * t for si, t in zip(s, targets))) / LN2


class _Hit(Exception):
    def __init__(self, res):
        self.res = res


def _solve_multipliers(prob: _BAProblem, targets, active, cfg: RDConfig):
    """Nested Brent root-finding on log-multipliers for the active constraints.

    Level k finds s_k with d_k(s) = D_k while deeper levels re-solve the later
    multipliers; d_k is non-increasing in s_k along that path.  The search uses
    capped BA runs and the returned point is re-solved at full precision.
    """
    state = {"r": None}

    def leaf(s, iters, tol):
        r0 = state["r"]
        if r0 is not None:
            # keep every reconstruction reachable so collapsed entries can recover
            r0 = 0.9 * r0 + 0.1 / len(r0)
        Q, r, conv, terms = prob.run(s, r0, iters, tol)
        state["r"] = r
        rate, ds = prob.evaluate(Q)
        return Q, r, conv, terms, rate, ds, list(s)

    def solve_from(k: int, s: list):
        if k == len(targets):
            return leaf(s, min(cfg.max_ba_iters, SEARCH_ITERS), max(cfg.rd_tol, SEARCH_TOL))
        if not active[k]:
            return solve_from(k + 1, s + [0.0])
        t = targets[k]
        res_hi = solve_from(k + 1, s + [S_MAX])
        if res_hi[5][k] > t - cfg.dist_tol:
            return res_hi  # target at (or beyond) the reach of the largest effort
        res_lo = solve_from(k + 1, s + [S_MIN])
        if res_lo[5][k] <= t:
            return res_lo
        best = [res_hi]

        def f(x):
            res = solve_from(k + 1, s + [math.exp(x)])
            gap = res[5][k] - t
            if gap <= 0 and res[5][k] > best[0][5][k]:
                best[0] = res
            if abs(gap) <= cfg.dist_tol:
                raise _Hit(res)
            return gap

        try:
            brentq(f, math.log(S_MIN), math.log(S_MAX), xtol=1e-12, maxiter=cfg.bisect_iters)
        except _Hit as hit:
            return hit.res
        except RuntimeError:
            pass
        return best[0]

    res = solve_from(0, [])
    return leaf(res[6], cfg.max_ba_iters, cfg.rd_tol)


def _min_distortion(p_a, d):
    return float(np.dot(p_a, d.min(axis=1)))


def _pin_mask(d):
    return d <= d.min(axis=1, keepdims=True) + 1e-15


def joint_rd(pmf: JointPMF, spec: DistortionSpec, d1: float, d2: float,
             cfg: RDConfig | None = None) -> RDSolution:
    """Joint rate-distortion function R(D1, D2) and an optimal test channel."""
    cfg = cfg or RDConfig()
    spec.check(pmf)
    if d1 < 0 or d2 < 0:
        raise BadParameter("distortions must be nonnegative")
    nx, ny = pmf.shape
    mx, my = spec.d_x.shape[1], spec.d_y.shape[1]
    p_a = pmf.p.ravel()
    live = p_a > 0
    # distortion of each (x,y) cell against each (xhat,yhat)
    DX = np.repeat(spec.d_x, ny, axis=0)[:, :, None].repeat(my, axis=2).reshape(nx * ny, mx * my)
    DY = np.tile(spec.d_y, (nx, 1))[:, None, :].repeat(mx, axis=1).reshape(nx * ny, mx * my)
    p, DX, DY = p_a[live], DX[live], DY[live]

    mins = [_min_distortion(p, DX), _min_distortion(p, DY)]
    targets = [float(d1), float(d2)]
    for t, m in zip(targets, mins):
        if t < m - 1e-12:
            raise Infeasible(f"distortion {t} below the minimum achievable {m:.6g}")
    mask = np.ones_like(DX, dtype=bool)
    active = [True, True]
    for k, (t, m, D) in enumerate(zip(targets, mins, (DX, DY))):
        # the best constant reconstruction for this component
        const_cost = D.T @ p
        if t <= m + cfg.dist_tol * 1e-3:
            mask &= _pin_mask(D)
            active[k] = False
        elif t >= const_cost.min():
            # constraint slack at zero multiplier: fix a best constant reconstruction
            col = int(np.argmin(const_cost))
            axis_idx = (np.arange(mx * my) // my) if k == 0 else (np.arange(mx * my) % my)
            chosen = (axis_idx == (col // my if k == 0 else col % my))
            mask &= chosen[None, :]
            active[k] = False
    prob = _BAProblem(p, [DX, DY], mask)
    Q, r, conv, terms, rate, ds, s = _solve_multipliers(prob, targets, active, cfg)
    lb = prob.dual_bound(s, targets, terms)
    full = np.zeros((nx * ny, mx * my))
    full[live] = Q
    full[~live] = r  # arbitrary rows for zero-probability cells
    channel = full.reshape(nx, ny, mx, my)
    return RDSolution(channel, rate, ds[0], ds[1], tuple(s), bool(conv), min(lb, rate))


def rd_dual_bound(pmf: JointPMF, spec: DistortionSpec, d1: float, d2: float, s1: float, s2: float,
                  iters: int = 2000) -> float:
    """Lower bound on R(D1, D2) from fixed multipliers (nats per unit distortion)."""
    nx, ny = pmf.shape
    mx, my = spec.d_x.shape[1], spec.d_y.shape[1]
    p_a = pmf.p.ravel()
    live = p_a > 0
    DX = np.repeat(spec.d_x, ny, axis=0)[:, :, None].repeat(my, axis=2).reshape(nx * ny, mx * my)[live]
    DY = np.tile(spec.d_y, (nx, 1))[:, None, :].repeat(mx, axis=1).reshape(nx * ny, mx * my)[live]
    prob = _BAProblem(p_a[live], [DX, DY], np.ones_like(DX, dtype=bool))
    _, _, _, terms = prob.run([s1, s2], None, iters, 1e-12)
    return prob.dual_bound([s1, s2], [d1, d2], terms)


def marginal_rd(px: np.ndarray, d: np.ndarray, target: float, cfg: RDConfig | None = None):
    """Single-source RD: returns (channel P(xhat|x), rate in bits)."""
    cfg = cfg or RDConfig()
    px = np.asarray(px, float)
    live = px > 0
    p, D = px[live], np.asarray(d, float)[live]
    m = _min_distortion(p, D)
    if target < m - 1e-12:
        raise Infeasible(f"distortion {target} below the minimum achievable {m:.6g}")
    mask = np.ones_like(D, dtype=bool)
    active = [True]
    const_cost = D.T @ p
    if target <= m + cfg.dist_tol * 1e-3:
        mask = _pin_mask(D)
        active = [False]
    elif target >= const_cost.min():
        mask = np.zeros_like(mask)
        mask[:, int(np.argmin(const_cost))] = True
        active = [False]
    prob = _BAProblem(p, [D], mask)
    Q, r, conv, terms, rate, ds, s = _solve_multipliers(prob, [float(target)], active, cfg)
    full = np.tile(r, (len(px), 1))
    full[live] = Q
    return full, rate


# ---------------------------------------------------------------------------
# Shannon lower bounds


def slb_discrete(h_marginal: float, d: np.ndarray, target: float) -> float:
    """H(X) - h(D') - D' log2(m-1), D' = min(D, (m-1)/m), for Hamming distortion."""
    d = np.asarray(d, float)
    m = d.shape[0]
    if d.shape[0] != d.shape[1] or not np.allclose(d, 1.0 - np.eye(m)):
        raise UnsupportedDistortion("discrete Shannon lower bound implemented for Hamming distortion")
    if target < 0:
        raise BadParameter("distortion must be nonnegative")
    t = min(float(target), (m - 1) / m)
    val = h_marginal - binary_entropy(t) - (t * math.log2(m - 1) if m > 2 else 0.0)
    return max(val, 0.0)


def slb_joint_discrete(pmf: JointPMF, spec: DistortionSpec, d1: float, d2: float) -> float:
    """Shannon lower bound on R(D1, D2) for Hamming components."""
    mx, my = spec.d_x.shape[0], spec.d_y.shape[0]
    val = pmf.hxy()
    for m, d, D in ((mx, spec.d_x, d1), (my, spec.d_y, d2)):
        slb_discrete(0.0, d, D)  # validates the distortion type
        t = min(float(D), (m - 1) / m)
        val -= binary_entropy(t) + (t * math.log2(m - 1) if m > 2 else 0.0)
    return max(val, 0.0)


# ---------------------------------------------------------------------------
# lossy Wyner common information


@dataclass
class BoundsReport:
    epsilon: float
    lower: float
    upper: float
    residuals: dict = field(default_factory=dict)


@dataclass
class LossyDecomposition:
    """Joint law over (X, Y, Xhat, Yhat, U) built from a test channel and q(u|xhat,yhat)."""

    q: np.ndarray  # (mx*my, |U|)
    joint: np.ndarray  # (nx, ny, mx, my, |U|)

    def dist(self) -> NDDist:
        return NDDist.from_array(self.joint, ("X", "Y", "Xhat", "Yhat", "U"))


class LossyWynerResult(tuple):
    """(value, decomposition, bounds) with attribute access."""

    def __new__(cls, value, decomposition, bounds, rd):
        obj = super().__new__(cls, (value, decomposition, bounds))
        obj.value, obj.decomposition, obj.bounds, obj.rd = value, decomposition, bounds, rd
        return obj


def _wyner_objective(base: np.ndarray, lam: float) -> Objective:
    # F = I(XY;U) + lam * I(Xh;Yh|U) over base (x, y, xh, yh)
    hxy = entropy_of(base.sum(axis=(2, 3)))
    terms = [(1.0 - lam, ()), (-1.0, (0, 1)), (lam, (2,)), (lam, (3,)), (-lam, (2, 3))]
    return Objective.build(base, (2, 3), terms, const=hxy)


def _info_pair(base: np.ndarray, q: np.ndarray):
    """(I(XY;U), I(Xh;Yh|U)) for a batch of channels q (B, n_c, K)."""
    i_obj = _wyner_objective(base, 0.0)
    info = np.maximum(i_obj.value(q), 0.0)
    mk = Objective.build(base, (2, 3), [(1.0, (2,)), (1.0, (3,)), (-1.0, (2, 3)), (-1.0, ())])
    return info, np.maximum(mk.value(q), 0.0)


def lossy_wyner_ci(pmf: JointPMF, spec: DistortionSpec, d1: float, d2: float,
                   cfg: SolverConfig | None = None, rd_cfg: RDConfig | None = None,
                   epsilon: float = 1e-3, rd: RDSolution | None = None) -> LossyWynerResult:
    """Least I(X,Y;U) over U with (X,Y) - (Xhat,Yhat) - U and Xhat - U - Yhat.

    The test channel is the one returned by :func:`joint_rd`.  Returns
    ``(value, decomposition, BoundsReport)``; the bracket's lower end is the best
    value found with every residual relaxed to ``epsilon``.
    """
    cfg = cfg or SolverConfig()
    rd = rd or joint_rd(pmf, spec, d1, d2, rd_cfg)
    base = rd.joint(pmf)
    nx, ny, mx, my = base.shape
    recon = base.sum(axis=(0, 1))
    # latent-class machinery on the reconstruction pair (zero rows are harmless)
    rmodel = CellModel(JointPMF(tuple(map(str, range(mx))), tuple(map(str, range(my))), recon / recon.sum()))
    n_c = mx * my
    k = cfg.u_card or rmodel.n
    rng = np.random.default_rng(cfg.rng_seed)
    q0 = rng.dirichlet(np.ones(k), size=(cfg.restarts, rmodel.n))
    stop = cfg.tol * 1e-3

    def widen(qc):  # support-cell channel -> full (xhat,yhat) channel
        out = np.full((len(qc), n_c, qc.shape[2]), 1.0 / qc.shape[2])
        out[:, rmodel.cells] = qc
        return out

    path_res, path_val, cands = [], [], []

    def record(qfull):
        info, mres = _info_pair(base, qfull)
        path_res.extend(mres)
        path_val.extend(info)
        cands.extend(list(qfull))

    # anchors: constant U and U = (Xhat, Yhat)
    record(np.ones((1, n_c, 1)))
    record(np.eye(n_c)[None])
    if n_c <= 9:
        labels = restricted_growth_strings(rmodel.n)
        qq = np.zeros((len(labels), rmodel.n, rmodel.n))
        qq[np.arange(len(labels))[:, None], np.arange(rmodel.n)[None, :], labels] = 1.0
        record(widen(qq))

    top = max(cfg.lagrange_grid)
    q = q0.copy()
    for lam in sorted(cfg.lagrange_grid, reverse=True):
        # warm start from the reconstruction-only problem, then the true objective
        q, *_ = descend(rmodel, q, lam, cfg.max_iters, stop)
        qf, _, _ = mirror_descent(_wyner_objective(base, lam), widen(q), cfg.max_iters, stop)
        record(qf)
        q = qf[:, rmodel.cells]
        if lam == top:
            first = q.copy()
    q, *_ = descend(rmodel, first, math.inf, cfg.max_iters, stop * 1e-6)
    for lam in (16 * top, 256 * top):
        qf, _, _ = mirror_descent(_wyner_objective(base, lam), widen(q), cfg.max_iters, stop * 1e-3)
        record(qf)
        q = qf[:, rmodel.cells]
    q, *_ = descend(rmodel, q, math.inf, cfg.max_iters, stop * 1e-6)
    polished = widen(q)
    record(polished)

    vals, res = np.array(path_val), np.array(path_res)
    ok = np.flatnonzero(res <= cfg.tol)
    best = int(ok[np.argmin(vals[ok])])
    value = float(vals[best])
    qbest = cands[best]
    joint = base[..., None] * qbest.reshape(mx, my, -1)[None, None]
    decomp = LossyDecomposition(qbest, joint)

    rate_slack = max(rd.rate - rd.lower_bound, 0.0)
    residuals = {
        "markov_xhat_u_yhat": float(res[best]),
        "markov_xy_recon_u": 0.0,  # U is drawn from (Xhat, Yhat) only
        "rate_slack": float(rate_slack),
        "distortion_slack_x": max(rd.d1_achieved - d1, 0.0),
        "distortion_slack_y": max(rd.d2_achieved - d2, 0.0),
    }
    eps = max(epsilon, max(residuals.values()))
    # relaxed problem: best value with Markov residual <= eps, read off the lower hull
    hull = lower_hull(res, vals)
    hx, hy = res[hull], vals[hull]
    lower = float(np.interp(eps, hx, hy)) if eps < hx[-1] else float(hy[-1])
    lower = min(lower, value)
    bounds = BoundsReport(eps, lower, value, residuals)
    return LossyWynerResult(value, decomp, bounds, rd)


def oracle_lossy_wyner(pmf: JointPMF, rd: RDSolution, step: float = 1e-3) -> float:
    """Least I(X,Y;U) over exactly conditionally independent binary-U splits of a
    2x2 reconstruction law, with the test channel held fixed."""
    base = rd.joint(pmf)
    recon = base.sum(axis=(0, 1))
    if recon.shape != (2, 2):
        raise BadParameter("oracle handles binary reconstructions only")
    fam = _markov_family(JointPMF(("0", "1"), ("0", "1"), recon / recon.sum()), step, all_points=True)
    if fam is None:
        return float("nan")
    qs = fam  # (N, 4, 2)
    info, _ = _info_pair(base, qs)
    return float(info.min())


def check_corollary1(decomposition: LossyDecomposition, rd: RDSolution | None = None,
                     tol: float = 1e-3) -> dict:
    """Residuals of the factorization P(xh,yh,u|x,y) = P(xh,u|x) P(yh,u|y)."""
    d = decomposition.dist()
    res = {
        "I(Xhat;Yhat|X,Y,U)": conditional_mutual_information(d, "Xhat", "Yhat", ["X", "Y", "U"]),
        "I(Xhat;Y|X,U)": conditional_mutual_information(d, "Xhat", "Y", ["X", "U"]),
        "I(Yhat;X|Y,U)": conditional_mutual_information(d, "Yhat", "X", ["Y", "U"]),
    }
    return {"residuals": res, "passed": all(v <= tol for v in res.values()), "tol": tol}


# ---------------------------------------------------------------------------
# lossy Gacs-Korner common information


def _gk_objective(base: np.ndarray, lam: float) -> Objective:
    # minimize -I(XY;U) + lam * (I(U;X|Xh) + I(U;Y|Yh)), base over (x, y, xh, yh), c = x
    hxy = entropy_of(base.sum(axis=(2, 3)))
    terms = [(-1.0, ()), (1.0, (0, 1)),
             (lam, (2,)), (-lam, (0, 2)),
             (lam, (3,)), (-lam, (1, 3))]
    return Objective.build(base, (0,), terms, const=-hxy)


def _gk_terms(base: np.ndarray, q: np.ndarray):
    info = np.maximum(-_gk_objective(base, 0.0).value(q), 0.0)
    r = Objective.build(base, (0,), [(1.0, (2,)), (-1.0, (0, 2)), (1.0, (3,)), (-1.0, (1, 3))],
                        const=0.0)
    # the dropped H(X,Xh)-H(Xh) style constants cancel: I(U;X|Xh) = H(U,Xh) - H(U,X,Xh) + H(X,Xh) - H(Xh)
    cx = entropy_of(base.sum(axis=(1, 3))) - entropy_of(base.sum(axis=(0, 1, 3)))
    cy = entropy_of(base.sum(axis=(0, 2))) - entropy_of(base.sum(axis=(0, 1, 2)))
    return info, np.maximum(r.value(q) + cx + cy, 0.0)


@dataclass
class LossyGKResult:
    value: float
    q_j: np.ndarray  # q(u|j)
    residual: float
    restricted_to_j: bool = True  # U is a function of the ergodic class


def _gk_base(pmf, spec, d1, d2, rd_cfg):
    cx, _ = marginal_rd(pmf.px, spec.d_x, d1, rd_cfg)
    cy, _ = marginal_rd(pmf.py, spec.d_y, d2, rd_cfg)
    return pmf.p[:, :, None, None] * cx[:, None, :, None] * cy[None, :, None, :]


def lossy_gk_ci(pmf: JointPMF, spec: DistortionSpec, d1: float, d2: float,
                cfg: SolverConfig | None = None, rd_cfg: RDConfig | None = None) -> LossyGKResult:
    """Largest I(X,Y;U) over U = f(J) (possibly randomized) whose residuals
    I(U;X|Xhat) + I(U;Y|Yhat) under the marginal RD channels stay below cfg.tol.

    Clamped to [0, C_GK(X,Y)].
    """
    cfg = cfg or SolverConfig()
    spec.check(pmf)
    dec = ergodic_decomposition(pmf)
    nj = len(dec)
    gk = gk_common_information(pmf)
    if nj == 1:
        return LossyGKResult(0.0, np.ones((1, 1)), 0.0)
    base = _gk_base(pmf, spec, d1, d2, rd_cfg)
    xmap = dec.x_map(pmf.shape[0])

    def lift(qj):  # q(u|j) -> q(u|x)
        return qj[:, xmap, :]

    cands = []
    # deterministic groupings of the classes
    labels = restricted_growth_strings(nj) if nj <= 9 else np.arange(nj)[None]
    for lab in labels:
        qj = np.eye(nj)[lab][None]
        cands.append(qj)
    rng = np.random.default_rng(cfg.rng_seed)
    q0 = rng.dirichlet(np.ones(nj), size=(cfg.restarts, nj))
    q = q0.copy()
    for lam in sorted(cfg.lagrange_grid):
        obj = _gk_objective(base, lam)
        qx, _, _ = mirror_descent(obj, lift(q), cfg.max_iters, cfg.tol * 1e-3)
        # read q(u|j) back from one representative x per class
        rep = np.array([xs[0] for xs, _ in dec.components])
        q = qx[:, rep, :]
        cands.append(q.copy())
    allq = np.concatenate([c if c.shape[2] == nj else np.pad(c, ((0, 0), (0, 0), (0, nj - c.shape[2])))
                           for c in cands])
    info, resid = _gk_terms(base, lift(allq))
    ok = resid <= cfg.tol
    if not ok.any():
        return LossyGKResult(0.0, np.ones((nj, 1)), 0.0)
    i = int(np.flatnonzero(ok)[np.argmax(info[ok])])
    value = float(min(max(info[i], 0.0), gk))
    return LossyGKResult(value, allq[i], float(resid[i]))


def oracle_lossy_gk(pmf: JointPMF, spec: DistortionSpec, d1: float, d2: float,
                    step: float = 0.01, tol: float = 1e-7, rd_cfg: RDConfig | None = None) -> float:
    """Grid search over binary q(u|j) for sources with two ergodic classes."""
    dec = ergodic_decomposition(pmf)
    if len(dec) != 2:
        raise BadParameter("oracle handles exactly two ergodic classes")
    base = _gk_base(pmf, spec, d1, d2, rd_cfg)
    g = np.arange(0.0, 1.0 + step / 2, step)
    a, b = np.meshgrid(g, g, indexing="ij")
    qj = np.stack([np.stack([a.ravel(), 1 - a.ravel()], -1), np.stack([b.ravel(), 1 - b.ravel()], -1)], 1)
    info, resid = _gk_terms(base, qj[:, dec.x_map(pmf.shape[0]), :])
    ok = resid <= tol
    return float(info[ok].max()) if ok.any() else 0.0
