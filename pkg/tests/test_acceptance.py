"""Acceptance criteria 1-11, each at its stated tolerance and time budget."""
import time

import pytest

from commoninfo import acceptance
from commoninfo.acceptance import CRITERIA, CriterionResult


def _report(capsys, result: CriterionResult) -> None:
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.details


@pytest.fixture(scope="module")
def wyner_pair():
    # criteria 6 and 7 share one solver run
    return {r.key: r for r in acceptance.run([6, 7])}


@pytest.mark.parametrize("key", [1, 2, 3, 4, 5])
def test_closed_form_criteria(capsys, key):
    (res,) = acceptance.run([key])
    _report(capsys, res)


def test_criterion_3_tie_break_flipped(capsys):
    name, budget = CRITERIA[3]
    t0 = time.perf_counter()
    r = acceptance.criterion_3(flip_tie_break=True)
    dt = time.perf_counter() - t0
    ok = bool(r.pop("passed")) and dt < budget
    _report(capsys, CriterionResult(3, name + " (flipped tie-break)", ok, r, dt, budget))


@pytest.mark.parametrize("key", [6, 7])
def test_wyner_criteria(capsys, wyner_pair, key):
    _report(capsys, wyner_pair[key])


@pytest.mark.parametrize("key", [8, 9, 10, 11])
def test_solver_criteria(capsys, key):
    (res,) = acceptance.run([key])
    _report(capsys, res)
