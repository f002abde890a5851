"""Mirror-descent minimization of entropy combinations over a channel q(u|c).

The joint law is p(a, u) = base(a) * q(u | c(a)) on a finite base space ``a``
(a flattened tuple of source and reconstruction symbols), where ``c(a)`` picks
the coordinates U is allowed to depend on.  Objectives are linear combinations

    F(q) = sum_k w_k H(S_k, U)       (bits)

where each S_k is a coordinate subset of ``a`` (possibly empty).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

LN2 = math.log(2.0)


def _onehot(labels: np.ndarray, n: int | None = None) -> np.ndarray:
    n = int(labels.max()) + 1 if n is None else n
    m = np.zeros((n, len(labels)))
    m[labels, np.arange(len(labels))] = 1.0
    return m


def group_labels(shape: tuple, axes) -> np.ndarray:
    """Flat label of each base cell when only ``axes`` are kept."""
    grids = np.indices(shape).reshape(len(shape), -1)
    if not len(axes):
        return np.zeros(grids.shape[1], dtype=int)
    keep = [grids[i] for i in axes]
    return np.ravel_multi_index(keep, [shape[i] for i in axes])


@dataclass
class Objective:
    """F(q) = sum_k w_k H(S_k, U) on base(a) q(u|c(a))."""

    base: np.ndarray  # flattened base PMF over a
    c_of_a: np.ndarray  # channel input index per a
    n_c: int
    groups: list  # list of (weight, one-hot matrix (n_k, n_a))
    const: float = 0.0

    @classmethod
    def build(cls, base: np.ndarray, c_axes, terms, const: float = 0.0) -> "Objective":
        """``terms`` is a list of (weight, axes) over the dimensions of ``base``."""
        shape = base.shape
        c_of_a = group_labels(shape, c_axes)
        n_c = int(np.prod([shape[i] for i in c_axes])) if len(c_axes) else 1
        groups = []
        for w, axes in terms:
            lab = group_labels(shape, axes)
            groups.append((float(w), _onehot(lab, int(np.prod([shape[i] for i in axes])) if len(axes) else 1)))
        return cls(base.ravel().astype(float), c_of_a, n_c, groups, const)

    @property
    def pc(self) -> np.ndarray:
        return np.bincount(self.c_of_a, weights=self.base, minlength=self.n_c)

    def joint(self, q: np.ndarray) -> np.ndarray:
        return self.base[None, :, None] * q[:, self.c_of_a, :]

    def value(self, q: np.ndarray) -> np.ndarray:
        j = self.joint(q)
        out = np.full(len(q), self.const)
        for w, m in self.groups:
            pk = m @ j
            out += -w * xlogy(pk, pk).sum(axis=(1, 2)) / LN2
        return out

    def grad(self, q: np.ndarray) -> np.ndarray:
        """dF/dq(u|c) in bits, up to per-c constants."""
        j = self.joint(q)
        g_a = np.zeros_like(j)
        for w, m in self.groups:
            pk = m @ j
            with np.errstate(divide="ignore"):
                lp = np.log(pk)
            lp[~np.isfinite(lp)] = -745.0
            g_a += -w * (m.T @ lp)
        g_a *= self.base[None, :, None] / LN2
        cmat = _onehot(self.c_of_a, self.n_c)
        return cmat @ g_a


def mirror_descent(obj: Objective, q: np.ndarray, max_iters: int = 2000, stop: float = 1e-12,
                   step: float = 1.0):
    """Exponentiated-gradient descent with per-restart adaptive step.

    The update is q <- q * exp(-eta * grad / p(c)), renormalized.  Returns
    (q, F, converged mask).
    """
    pc = obj.pc
    scale = np.where(pc > 0, 1.0 / np.maximum(pc, 1e-300), 0.0)[None, :, None]
    q = q.copy()
    f = obj.value(q)
    eta = np.full(len(q), step)
    done = np.zeros(len(q), dtype=bool)
    for _ in range(max_iters):
        act = np.flatnonzero(~done)
        if not len(act):
            break
        qa = q[act]
        g = obj.grad(qa) * scale
        g -= g.max(axis=2, keepdims=True)
        accepted = np.zeros(len(act), dtype=bool)
        fa = f[act]
        qn = qa
        for _ in range(40):
            todo = ~accepted
            if not todo.any():
                break
            e = eta[act][todo][:, None, None]
            with np.errstate(divide="ignore"):
                lg = np.log(qa[todo]) - e * g[todo]
            cand = np.exp(lg - logsumexp(lg, axis=2, keepdims=True))
            fc = obj.value(cand)
            ok = fc <= fa[todo] + 1e-15
            idx = np.flatnonzero(todo)
            if qn is qa:
                qn = qa.copy()
            qn[idx[ok]] = cand[ok]
            fa_new = fa.copy()
            fa_new[idx[ok]] = fc[ok]
            fa = fa_new
            accepted[idx[ok]] = True
            shrink = act[idx[~ok]]
            eta[shrink] *= 0.5
            tiny = eta[act] < 1e-12
            accepted |= tiny
        delta = np.abs(f[act] - fa)
        q[act] = qn
        f[act] = fa
        eta[act] = np.minimum(eta[act] * 1.5, 1e6)
        done[act[delta < stop]] = True
    return q, f, done
