import math

import numpy as np
import pytest

from commoninfo.errors import BadParameter, Infeasible, UnsupportedDistortion
from commoninfo.gk import gk_common_information
from commoninfo.lossy import (
    DistortionSpec, LossyDecomposition, check_corollary1, joint_rd, lossy_gk_ci, lossy_wyner_ci,
    marginal_rd, oracle_lossy_gk, oracle_lossy_wyner, rd_dual_bound, slb_discrete, slb_joint_discrete,
)
from commoninfo.prob import binary_entropy, dsbs, validate_and_trim
from commoninfo.tradeoff import wyner_ci

HAM2 = DistortionSpec.hamming(2)


@pytest.fixture(scope="module")
def dsbs_002():
    return lossy_wyner_ci(dsbs(0.1), HAM2, 0.02, 0.02)


def test_distortion_spec_validation():
    with pytest.raises(BadParameter):
        DistortionSpec(np.array([[0, -1], [1, 0]]), np.zeros((2, 2)))
    with pytest.raises(BadParameter):
        joint_rd(dsbs(0.1), DistortionSpec.hamming(3), 0.1, 0.1)
    spec = DistortionSpec.hamming(3, 2)
    assert spec.d_x.shape == (3, 3) and spec.d_y.shape == (2, 2)
    assert spec.names == ("hamming", "hamming")


def test_joint_rd_lossless():
    pmf = dsbs(0.1)
    sol = joint_rd(pmf, HAM2, 0.0, 0.0)
    assert sol.rate == pytest.approx(pmf.hxy(), abs=1e-8)
    assert sol.d1_achieved == 0.0 and sol.d2_achieved == 0.0


def test_joint_rd_large_distortion_is_zero():
    sol = joint_rd(dsbs(0.1), HAM2, 0.6, 0.6)
    assert sol.rate == pytest.approx(0.0, abs=1e-9)


def test_joint_rd_dsbs_slb_tight():
    pmf = dsbs(0.1)
    sol = joint_rd(pmf, HAM2, 0.05, 0.05)
    want = pmf.hxy() - 2 * binary_entropy(0.05)
    assert sol.rate == pytest.approx(want, abs=1e-6)
    assert sol.rate == pytest.approx(slb_joint_discrete(pmf, HAM2, 0.05, 0.05), abs=1e-6)
    assert sol.d1_achieved <= 0.05 + 1e-6 and sol.d2_achieved <= 0.05 + 1e-6
    assert sol.converged
    assert sol.lower_bound <= sol.rate and sol.rate - sol.lower_bound <= 1e-3


def test_joint_rd_matches_dual_sweep():
    # any multiplier pair certifies a lower bound; the sweep maximum must meet the rate
    pmf = dsbs(0.1)
    sol = joint_rd(pmf, HAM2, 0.05, 0.05)
    grid = np.linspace(2.7, 3.2, 6)
    best = max(rd_dual_bound(pmf, HAM2, 0.05, 0.05, a, b) for a in grid for b in grid)
    assert best <= sol.rate + 1e-9
    assert sol.rate - best <= 1e-3


def test_joint_rd_asymmetric_channel_is_valid():
    pmf = dsbs(0.1)
    sol = joint_rd(pmf, HAM2, 0.02, 0.08)
    ch = sol.test_channel
    assert ch.shape == (2, 2, 2, 2)
    assert np.allclose(ch.sum(axis=(2, 3)), 1.0)
    assert sol.d1_achieved <= 0.02 + 1e-5 and sol.d2_achieved <= 0.08 + 1e-5


def test_joint_rd_monotone_and_convex():
    pmf = dsbs(0.2)
    ds = [0.0, 0.03, 0.06, 0.09]
    rates = [joint_rd(pmf, HAM2, d, d).rate for d in ds]
    assert all(b <= a + 1e-9 for a, b in zip(rates, rates[1:]))
    second = np.diff(rates, 2)
    assert np.all(second >= -1e-6)
    assert joint_rd(pmf, HAM2, 0.05, 0.02).rate <= joint_rd(pmf, HAM2, 0.02, 0.02).rate + 1e-9


def test_joint_rd_infeasible():
    spec = DistortionSpec(np.array([[0.1, 1.0], [1.0, 0.1]]), 1 - np.eye(2))
    with pytest.raises(Infeasible):
        joint_rd(dsbs(0.1), spec, 0.05, 0.0)
    with pytest.raises(BadParameter):
        joint_rd(dsbs(0.1), HAM2, -0.1, 0.0)


def test_marginal_rd_binary():
    ch, rate = marginal_rd(np.array([0.5, 0.5]), 1 - np.eye(2), 0.1)
    assert rate == pytest.approx(1 - binary_entropy(0.1), abs=1e-6)
    assert np.allclose(ch.sum(axis=1), 1.0)


def test_slb_discrete_examples():
    ham = 1 - np.eye(2)
    assert slb_discrete(1.0, ham, 0.0) == 1.0
    assert slb_discrete(1.0, ham, 0.5) == 0.0
    assert slb_discrete(1.0, ham, 0.1) == pytest.approx(0.5310, abs=1e-4)
    m4 = slb_discrete(2.0, 1 - np.eye(4), 0.1)
    assert m4 == pytest.approx(2.0 - binary_entropy(0.1) - 0.1 * math.log2(3))
    with pytest.raises(UnsupportedDistortion):
        slb_discrete(1.0, np.array([[0.0, 2.0], [1.0, 0.0]]), 0.1)


def test_lossy_wyner_at_zero_matches_lossless():
    pmf = dsbs(0.1)
    res = lossy_wyner_ci(pmf, HAM2, 0.0, 0.0)
    assert res.value == pytest.approx(wyner_ci(pmf).value, abs=1e-2)
    rep = check_corollary1(res.decomposition, res.rd)
    assert rep["passed"]
    assert max(rep["residuals"].values()) == pytest.approx(0.0, abs=1e-12)


def test_lossy_wyner_independent_is_zero():
    pmf = validate_and_trim(np.outer([0.3, 0.7], [0.5, 0.5]))
    res = lossy_wyner_ci(pmf, HAM2, 0.05, 0.1)
    assert res.value == pytest.approx(0.0, abs=1e-7)


def test_lossy_wyner_beyond_max_distortion():
    res = lossy_wyner_ci(dsbs(0.1), HAM2, 0.6, 0.6)
    assert res.rd.rate == pytest.approx(0.0, abs=1e-9)
    assert res.value == pytest.approx(0.0, abs=1e-9)


def test_lossy_wyner_matches_grid_oracle(dsbs_002):
    oracle = oracle_lossy_wyner(dsbs(0.1), dsbs_002.rd)
    assert dsbs_002.value == pytest.approx(oracle, abs=1e-2)


def test_lossy_wyner_floor_when_slb_tight(dsbs_002):
    pmf = dsbs(0.1)
    assert dsbs_002.rd.rate == pytest.approx(slb_joint_discrete(pmf, HAM2, 0.02, 0.02), abs=1e-4)
    assert dsbs_002.value >= wyner_ci(pmf).value - 2e-2
    assert dsbs_002.value >= pmf.mi() - 1e-7


def test_bounds_report(dsbs_002):
    b = dsbs_002.bounds
    assert b.lower <= dsbs_002.value <= b.upper + 1e-9
    assert b.upper - b.lower <= 5e-2
    assert b.epsilon >= 1e-3
    assert set(b.residuals) >= {"markov_xhat_u_yhat", "rate_slack"}
    assert b.residuals["markov_xhat_u_yhat"] <= 1e-7


def test_recon_markov_at_optimum(dsbs_002):
    rep = check_corollary1(dsbs_002.decomposition, dsbs_002.rd, tol=1e-3)
    assert rep["passed"], rep
    assert set(rep["residuals"]) == {"I(Xhat;Yhat|X,Y,U)", "I(Xhat;Y|X,U)", "I(Yhat;X|Y,U)"}


def test_recon_markov_negative_control(dsbs_002):
    rng = np.random.default_rng(0)
    base = dsbs_002.rd.joint(dsbs(0.1))
    q = rng.dirichlet(np.full(2, 0.3), size=4)
    joint = base[..., None] * q.reshape(2, 2, 2)[None, None]
    rep = check_corollary1(LossyDecomposition(q, joint), dsbs_002.rd, tol=1e-3)
    assert not rep["passed"]


def test_lossy_gk_full_support_is_zero():
    res = lossy_gk_ci(dsbs(0.1), HAM2, 0.05, 0.05)
    assert res.value == 0.0
    assert res.restricted_to_j


def test_lossy_gk_two_block(two_block):
    spec = DistortionSpec.hamming(4)
    assert lossy_gk_ci(two_block, spec, 0.0, 0.0).value == pytest.approx(1.0, abs=1e-9)
    v = lossy_gk_ci(two_block, spec, 0.1, 0.1).value
    assert v <= 1.0 + 1e-9
    assert v == pytest.approx(oracle_lossy_gk(two_block, spec, 0.1, 0.1), abs=2e-2)


def test_lossy_gk_never_exceeds_lossless():
    rng = np.random.default_rng(9)
    for _ in range(3):
        p = np.zeros((4, 4))
        p[:2, :2] = rng.dirichlet(np.ones(4)).reshape(2, 2) * 0.3
        p[2:, 2:] = rng.dirichlet(np.ones(4)).reshape(2, 2) * 0.7
        pmf = validate_and_trim(p)
        for d in (0.0, 0.02, 0.2):
            assert lossy_gk_ci(pmf, DistortionSpec.hamming(4), d, d).value <= gk_common_information(pmf) + 1e-9
