import numpy as np
import pytest

from commoninfo.engine import Objective, group_labels, mirror_descent
from commoninfo.prob import NDDist, entropy


def _rand_q(rng, k, n_c, n_u):
    return rng.dirichlet(np.ones(n_u), size=(k, n_c))


def test_group_labels():
    lab = group_labels((2, 3), [1])
    assert lab.tolist() == [0, 1, 2, 0, 1, 2]
    assert group_labels((2, 3), []).tolist() == [0] * 6


def test_value_matches_entropy():
    rng = np.random.default_rng(1)
    base = rng.dirichlet(np.ones(6)).reshape(2, 3)
    obj = Objective.build(base, [0, 1], [(1.0, [0]), (-1.0, [])])  # H(X,U) - H(U)
    q = _rand_q(rng, 1, 6, 2)
    j = NDDist.from_array((base.ravel()[:, None] * q[0]).reshape(2, 3, 2), ("X", "Y", "U"))
    want = entropy(j, ["X", "U"]) - entropy(j, ["U"])
    assert obj.value(q)[0] == pytest.approx(want, abs=1e-12)


def test_gradient_matches_finite_difference():
    rng = np.random.default_rng(2)
    base = rng.dirichlet(np.ones(4)).reshape(2, 2)
    obj = Objective.build(base, [0, 1], [(1.0, [0]), (1.0, [1]), (-1.0, [])])
    q = _rand_q(rng, 1, 4, 3)
    g = obj.grad(q)[0]
    h = 1e-7
    fd = np.zeros_like(g)
    for c in range(4):
        for u in range(3):
            qp, qm = q.copy(), q.copy()
            qp[0, c, u] += h
            qm[0, c, u] -= h
            fd[c, u] = (obj.value(qp)[0] - obj.value(qm)[0]) / (2 * h)
    # defined up to a per-c constant, so compare within-row differences
    assert np.allclose(fd - fd[:, :1], g - g[:, :1], atol=1e-5)


def test_mirror_descent_decreases_and_finds_minimum():
    # H(X|U) = H(X,U) - H(U) vanishes at U = X
    rng = np.random.default_rng(3)
    base = np.array([[0.4, 0.1], [0.1, 0.4]])
    obj = Objective.build(base, [0, 1], [(1.0, [0]), (-1.0, [])])
    q0 = _rand_q(rng, 4, 4, 2)
    f0 = obj.value(q0)
    q, f, done = mirror_descent(obj, q0, max_iters=3000)
    assert np.all(f <= f0 + 1e-12)
    assert f.min() == pytest.approx(0.0, abs=1e-4)
    assert np.allclose(q.sum(axis=2), 1.0)
