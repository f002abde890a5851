"""Common part of a finite joint: connected components of the support graph."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .prob import JointPMF, entropy_of

SUPPORT_EPS = 1e-12


@dataclass(frozen=True)
class ErgodicDecomposition:
    components: tuple  # ((x_indices, y_indices), ...)
    j_pmf: np.ndarray

    def __len__(self) -> int:
        return len(self.components)

    def x_map(self, nx: int) -> np.ndarray:
        """Component index of every x symbol."""
        out = np.empty(nx, dtype=int)
        for j, (xs, _) in enumerate(self.components):
            out[list(xs)] = j
        return out

    def y_map(self, ny: int) -> np.ndarray:
        out = np.empty(ny, dtype=int)
        for j, (_, ys) in enumerate(self.components):
            out[list(ys)] = j
        return out


def ergodic_decomposition(pmf: JointPMF, support_eps: float = SUPPORT_EPS) -> ErgodicDecomposition:
    p = pmf.p
    nx, ny = p.shape
    adj = np.zeros((nx + ny, nx + ny), dtype=bool)
    adj[:nx, nx:] = p > support_eps
    _, labels = connected_components(csr_matrix(adj), directed=False)
    # relabel so components are ordered by their smallest x index
    order: dict[int, int] = {}
    for x in range(nx):
        order.setdefault(labels[x], len(order))
    comps, masses = [], []
    for lab, _ in sorted(order.items(), key=lambda kv: kv[1]):
        xs = tuple(int(i) for i in np.flatnonzero(labels[:nx] == lab))
        ys = tuple(int(j) for j in np.flatnonzero(labels[nx:] == lab))
        comps.append((xs, ys))
        masses.append(p[np.ix_(xs, ys)].sum() if ys else 0.0)
    j = np.array(masses)
    j.flags.writeable = False
    return ErgodicDecomposition(tuple(comps), j / j.sum())


def gk_common_information(pmf: JointPMF, support_eps: float = SUPPORT_EPS) -> float:
    """H(J) where J labels the support component of (X, Y)."""
    dec = ergodic_decomposition(pmf, support_eps)
    return entropy_of(dec.j_pmf) if len(dec) > 1 else 0.0
