import math

import numpy as np
import pytest

from commoninfo.gk import ergodic_decomposition, gk_common_information
from commoninfo.prob import dsbs, validate_and_trim


def test_full_support_single_component():
    dec = ergodic_decomposition(dsbs(0.3))
    assert len(dec) == 1
    assert np.allclose(dec.j_pmf, [1.0])


def test_diagonal_singletons():
    dec = ergodic_decomposition(validate_and_trim(np.eye(3) / 3))
    assert dec.components == (((0,), (0,)), ((1,), (1,)), ((2,), (2,)))
    assert np.allclose(dec.j_pmf, 1 / 3)


def test_two_block_decomposition(two_block):
    dec = ergodic_decomposition(two_block)
    assert dec.components == (((0, 1), (0, 1)), ((2, 3), (2, 3)))
    assert np.allclose(dec.j_pmf, [0.5, 0.5])
    assert list(dec.x_map(4)) == [0, 0, 1, 1]
    assert list(dec.y_map(4)) == [0, 0, 1, 1]


def test_gk_values(two_block):
    assert gk_common_information(dsbs(0.1)) == 0.0
    assert gk_common_information(validate_and_trim(np.eye(4) / 4)) == pytest.approx(2.0, abs=1e-12)
    assert gk_common_information(two_block) == pytest.approx(1.0, abs=1e-12)


def test_components_ordered_by_smallest_x():
    p = np.zeros((3, 3))
    p[0, 2] = 0.2
    p[1, 0] = 0.5
    p[2, 1] = 0.3
    dec = ergodic_decomposition(validate_and_trim(p))
    assert [c[0] for c in dec.components] == [(0,), (1,), (2,)]
    assert np.allclose(dec.j_pmf, [0.2, 0.5, 0.3])


def test_support_eps_ignores_dust():
    p = np.eye(2) / 2
    p[0, 1] = 1e-14
    pmf = validate_and_trim(p)
    assert len(ergodic_decomposition(pmf)) == 2
    assert len(ergodic_decomposition(pmf, support_eps=0.0)) == 1


def test_merging_blocks_reduces_count(two_block):
    p = two_block.p.copy()
    p[1, 2] = 1e-6
    assert len(ergodic_decomposition(validate_and_trim(p))) == 1


def test_staircase_is_one_component():
    # overlapping supports chain everything together even without full support
    p = np.array([[0.2, 0.1, 0], [0, 0.3, 0.1], [0, 0, 0.3]])
    assert gk_common_information(validate_and_trim(p)) == 0.0
    assert math.isclose(gk_common_information(validate_and_trim(np.diag([0.5, 0.25, 0.25]))), 1.5)
