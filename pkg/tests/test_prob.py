import json
import math

import numpy as np
import pytest

from commoninfo.errors import (
    AllZero, NegativeEntry, OverlappingGroups, ParseError, ShapeMismatch, UnknownAxis,
)
from commoninfo.prob import (
    NDDist, binary_entropy, condition, conditional_entropy, conditional_mutual_information, dsbs,
    dump_pmf, entropy, load_pmf, marginalize, mutual_information, product_compose, recompose,
    validate_and_trim,
)


def test_uniform_2x2_is_valid():
    pmf = validate_and_trim([[0.25, 0.25], [0.25, 0.25]])
    assert pmf.shape == (2, 2)
    assert np.allclose(pmf.p, 0.25)


def test_zero_row_trimmed_with_labels():
    pmf = validate_and_trim([[0.5, 0], [0, 0.5], [0, 0]], ["a", "b", "c"], ["u", "v"])
    assert pmf.shape == (2, 2)
    assert pmf.x_labels == ("a", "b")


def test_zero_column_trimmed():
    pmf = validate_and_trim([[0.5, 0, 0], [0, 0, 0.5]], None, ["u", "v", "w"])
    assert pmf.y_labels == ("u", "w")


def test_normalization():
    pmf = validate_and_trim([[1, 1], [1, 1]])
    assert abs(pmf.p.sum() - 1) < 1e-15
    assert np.allclose(pmf.p, 0.25)


def test_negative_entry_rejected():
    with pytest.raises(NegativeEntry):
        validate_and_trim([[0.5, -0.1], [0.3, 0.3]])


def test_all_zero_rejected():
    with pytest.raises(AllZero):
        validate_and_trim([[0, 0], [0, 0]])


def test_entropy_examples():
    d = NDDist.from_array(np.array([0.5, 0.5]), ["X"])
    assert entropy(d, ["X"]) == pytest.approx(1.0, abs=1e-15)
    assert entropy(NDDist.from_array(np.array([1.0, 0.0]), ["X"]), "X") == 0.0
    d = NDDist.from_array(np.array([0.1, 0.9]), ["X"])
    assert entropy(d, "X") == pytest.approx(0.46900, abs=1e-5)


def test_entropy_unknown_axis():
    with pytest.raises(UnknownAxis):
        entropy(dsbs(0.1).as_dist(), ["Z"])


def test_mutual_information_examples():
    assert mutual_information(validate_and_trim(np.outer([0.2, 0.8], [0.5, 0.5])).as_dist(), "X", "Y") == 0.0
    assert mutual_information(validate_and_trim(np.eye(2) / 2).as_dist(), "X", "Y") == pytest.approx(1.0)
    d = validate_and_trim([[0.45, 0.05], [0.05, 0.45]]).as_dist()
    assert mutual_information(d, "X", "Y") == pytest.approx(0.53100, abs=1e-5)
    assert mutual_information(d, "X", "Y") == pytest.approx(1 - binary_entropy(0.1), abs=1e-12)


def test_overlapping_groups():
    d = dsbs(0.1).as_dist()
    with pytest.raises(OverlappingGroups):
        mutual_information(d, ["X", "Y"], ["Y"])
    with pytest.raises(OverlappingGroups):
        conditional_mutual_information(d, "X", "Y", "X")


def _with_u(pmf, q):
    return product_compose(pmf.as_dist(), q, ["X", "Y"], "U")


def test_cmi_examples(dsbs01):
    full = _with_u(dsbs01, np.eye(4).reshape(2, 2, 4))
    assert conditional_mutual_information(full, "X", "Y", "U") == 0.0
    const = _with_u(dsbs01, np.ones((2, 2, 1)))
    assert conditional_mutual_information(const, "X", "Y", "U") == pytest.approx(dsbs01.mi(), abs=1e-12)
    coin = _with_u(dsbs01, np.full((2, 2, 2), 0.5))
    assert conditional_mutual_information(coin, "X", "Y", "U") == pytest.approx(0.53100, abs=1e-5)


def test_cmi_empty_condition_is_mi(dsbs01):
    d = dsbs01.as_dist()
    assert conditional_mutual_information(d, "X", "Y", []) == pytest.approx(dsbs01.mi())


def test_marginalize_uniform():
    d = validate_and_trim(np.full((2, 3), 1 / 6)).as_dist()
    m = marginalize(d, ["X"])
    assert m.names == ("X",)
    assert np.allclose(m.p, 0.5)


def test_marginalize_keeps_given_order(dsbs01):
    d = _with_u(dsbs01, np.eye(4).reshape(2, 2, 4))
    m = marginalize(d, ["U", "X"])
    assert m.names == ("U", "X")
    assert m.p.shape == (4, 2)


def test_condition_recompose_identity():
    rng = np.random.default_rng(1)
    d = NDDist.from_array(rng.dirichlet(np.ones(24)).reshape(2, 3, 4), ["A", "B", "C"])
    marg, cond = condition(d, ["B"])
    back = recompose(marg, cond, d.axes)
    assert np.abs(back.p - d.p).max() < 1e-12


def test_compose_deterministic_u(dsbs01):
    q = np.zeros((2, 2, 2))
    q[0, :, 0] = 1
    q[1, :, 1] = 1
    d = _with_u(dsbs01, q)
    assert d.names == ("X", "Y", "U")
    assert entropy(d, "U") == pytest.approx(1.0)
    assert abs(d.p.sum() - 1) < 1e-12


def test_compose_shape_mismatch(dsbs01):
    with pytest.raises(ShapeMismatch):
        _with_u(dsbs01, np.ones((3, 2, 2)) / 2)


def test_conditional_entropy_chain_rule(dsbs01):
    d = dsbs01.as_dist()
    assert entropy(d, ["X", "Y"]) == pytest.approx(entropy(d, "X") + conditional_entropy(d, "Y", "X"), abs=1e-12)


def test_binary_entropy_edges():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)


def test_pmf_file_roundtrip(tmp_path, dsbs01):
    path = tmp_path / "p.json"
    dump_pmf(dsbs01, path)
    back = load_pmf(path)
    assert np.allclose(back.p, dsbs01.p)
    assert back.x_labels == dsbs01.x_labels


def test_pmf_file_tolerates_small_sum_error(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"x_labels": ["0", "1"], "y_labels": ["0", "1"],
                                "p": [[0.25, 0.25], [0.25, 0.2500005]]}))
    pmf = load_pmf(path)
    assert abs(pmf.p.sum() - 1) < 1e-15


@pytest.mark.parametrize("doc", [
    "not json",
    json.dumps({"x_labels": ["0"], "y_labels": ["0", "1"], "p": [[0.5, 0.4]]}),
    json.dumps({"x_labels": ["0", "1"], "y_labels": ["0"], "p": [[0.5, 0.5]]}),
    json.dumps({"x_labels": ["0"], "y_labels": ["0", "1"], "p": [[0.5, -0.5]]}),
    json.dumps({"y_labels": ["0"], "p": [[1.0]]}),
])
def test_pmf_file_errors(tmp_path, doc):
    path = tmp_path / "bad.json"
    path.write_text(doc)
    with pytest.raises(ParseError):
        load_pmf(path)


def test_dsbs_marginals():
    pmf = dsbs(0.2)
    assert np.allclose(pmf.px, 0.5) and np.allclose(pmf.py, 0.5)
    assert pmf.hxy() == pytest.approx(1 + binary_entropy(0.2))
    assert math.isclose(pmf.mi(), 1 - binary_entropy(0.2), abs_tol=1e-12)
