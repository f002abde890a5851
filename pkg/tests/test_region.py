import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from commoninfo.errors import BadParameter, MarginalMismatch, ShapeMismatch
from commoninfo.gk import ergodic_decomposition
from commoninfo.lossy import DistortionSpec
from commoninfo.prob import NDDist, binary_entropy, dsbs, validate_and_trim
from commoninfo.region import (
    JOINT5, REGION_HEADER, RatePoint, gk_plane_gap, lossless_point, lossy_point, pangloss_gap, vkg_point,
    write_region_csv,
)
from commoninfo.tradeoff import AuxDecomposition, wyner_ci


def _const_u(pmf):
    return AuxDecomposition.from_channel(pmf, np.ones((pmf.p.size, 1)))


def _u_is_xy(pmf):
    return AuxDecomposition.from_channel(pmf, np.eye(pmf.p.size))


def _markov_joint5(rng, nx=2, ny=2, nu=2):
    """p(x,y) q(u|x,y) p(xhat|x,u) p(yhat|y,u) with random factors."""
    pxy = rng.dirichlet(np.ones(nx * ny)).reshape(nx, ny)
    qu = rng.dirichlet(np.ones(nu), size=(nx, ny))
    ax = rng.dirichlet(np.ones(nx), size=(nx, nu))  # [x, u, xhat]
    ay = rng.dirichlet(np.ones(ny), size=(ny, nu))  # [y, u, yhat]
    j = np.einsum("xy,xyu,xua,yub->xyabu", pxy, qu, ax, ay)
    return NDDist.from_array(j / j.sum(), JOINT5)


def _identity_joint5(pmf):
    nx, ny = pmf.shape
    j = np.zeros((nx, ny, nx, ny, 1))
    for x in range(nx):
        for y in range(ny):
            j[x, y, x, y, 0] = pmf.p[x, y]
    return NDDist.from_array(j, JOINT5)


def test_rate_point_clamps_and_rejects():
    pt = RatePoint(-5e-10, 0.2, 0.3)
    assert pt.r0 == 0.0 and pt.total == pytest.approx(0.5)
    with pytest.raises(BadParameter):
        RatePoint(-1e-3, 0.0, 0.0)


def test_lossless_point_extremes(dsbs01):
    pt = lossless_point(dsbs01, _const_u(dsbs01))
    assert pt.as_tuple() == pytest.approx((0.0, 1.0, 1.0), abs=1e-12)
    pt = lossless_point(dsbs01, _u_is_xy(dsbs01))
    assert pt.as_tuple() == pytest.approx((dsbs01.hxy(), 0.0, 0.0), abs=1e-12)


def test_lossless_point_marginal_mismatch(dsbs01):
    with pytest.raises(MarginalMismatch):
        lossless_point(dsbs(0.2), _const_u(dsbs01))


def test_pangloss_gap_constant_u(dsbs01):
    pt = lossless_point(dsbs01, _const_u(dsbs01))
    assert pangloss_gap(pt, dsbs01.hxy()) == pytest.approx(1 - binary_entropy(0.1), abs=1e-9)
    assert pangloss_gap(pt, dsbs01.hxy()) == pytest.approx(0.531, abs=1e-3)


def test_wyner_point_on_pangloss_plane(dsbs01):
    w = wyner_ci(dsbs01)
    pt = lossless_point(dsbs01, w.best, "wyner")
    assert abs(pangloss_gap(pt, dsbs01.hxy())) <= 2e-2
    assert pt.r0 == pytest.approx(w.value, abs=1e-9)


def test_gk_plane_gap(two_block):
    dec = ergodic_decomposition(two_block)
    jx = dec.x_map(4)
    q = np.zeros((16, 2))
    for x in range(4):
        for y in range(4):
            q[x * 4 + y, jx[x]] = 1.0
    pt = lossless_point(two_block, AuxDecomposition.from_channel(two_block, q))
    assert pt.r0 == pytest.approx(1.0)
    assert gk_plane_gap(pt, two_block) == pytest.approx((0.0, 0.0), abs=1e-12)
    pt = lossless_point(two_block, _u_is_xy(two_block))
    gx, gy = gk_plane_gap(pt, (two_block.hx(), two_block.hy()))
    assert gx == pytest.approx(two_block.hxy() - two_block.hx())
    assert gy == pytest.approx(two_block.hxy() - two_block.hy())


def test_lossy_point_identity_reconstruction(dsbs01):
    j5 = _identity_joint5(dsbs01)
    pt, d1, d2 = lossy_point(j5, DistortionSpec.hamming(2), "id")
    assert (d1, d2) == (0.0, 0.0)
    assert pt.as_tuple() == pytest.approx((0.0, 1.0, 1.0), abs=1e-12)
    assert pt.witness_id == "id" and pt.witness is j5


def test_vkg_bounds_identity_reconstruction(dsbs01):
    b = vkg_point(_identity_joint5(dsbs01))
    h, i = dsbs01.hxy(), dsbs01.mi()
    assert b.r0 == pytest.approx(0.0, abs=1e-12)
    assert b.total == pytest.approx(h + i)
    assert b.corner.as_tuple() == pytest.approx((0.0, 1.0, h - 1.0))
    # the corner ignores the I(Xhat;Yhat|U) penalty
    assert not b.contains(b.corner)


def test_shape_checks(dsbs01):
    j5 = _identity_joint5(dsbs01)
    with pytest.raises(ShapeMismatch):
        lossy_point(j5, DistortionSpec.hamming(3, 2))
    bad = NDDist.from_array(j5.p, ("X", "Y", "A", "B", "U"))
    with pytest.raises(ShapeMismatch):
        vkg_point(bad)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_lossy_point_meets_vkg_bounds_under_markov(seed):
    j5 = _markov_joint5(np.random.default_rng(seed))
    pt, _, _ = lossy_point(j5)
    b = vkg_point(j5)
    assert b.contains(pt, tol=1e-9)
    assert pt.total == pytest.approx(b.total, abs=1e-9)


def test_region_csv(tmp_path):
    pts = [RatePoint(0.1, 0.2, 0.3, 0.0, 0.05, "a"), RatePoint(1.0, 0.0, 0.0, witness_id="b")]
    text = write_region_csv(pts, tmp_path / "r.csv")
    lines = text.splitlines()
    assert lines[0] == ",".join(REGION_HEADER)
    assert lines[1] == "0.1,0.2,0.3,0.6,0,0.05,a"
    assert (tmp_path / "r.csv").read_text() == text
    buf = io.StringIO()
    write_region_csv(pts, buf)
    assert buf.getvalue() == text
