"""Acceptance gate: one test per verify-all criterion, at the documented
tolerances.  Each test prints its PASS/FAIL line (run pytest with -s to see
them all; verify-all prints the same table).

The optimal-constant check (criterion 1) fails by design: the documented
reference triple lies on the disc-parameter curve a(r) = (1+r^2)/(r sqrt(1-r^2))
but does not minimize it, so no honest minimizer can reproduce it.  The
minimality property itself is covered by criterion 2.
"""

import pytest

from pinchlab import acceptance


@pytest.fixture(scope="module")
def results():
    return {r.index: r for r in acceptance.run_all(seed=7)}


def _check(results, index):
    result = results[index]
    print(result.line())
    assert result.passed, result.line()


def test_criterion_01_optimal_constant(results):
    _check(results, 1)


def test_criterion_02_disc_threshold(results):
    _check(results, 2)


def test_criterion_03_ellipse_oracle(results):
    _check(results, 3)
    assert results[3].seconds < 5.0


def test_criterion_04_realization_exactness(results):
    _check(results, 4)


def test_criterion_05_averaging_identity(results):
    _check(results, 5)


def test_criterion_06_alignment_exactness(results):
    _check(results, 6)


def test_criterion_07_orbit_obstruction(results):
    _check(results, 7)


def test_criterion_08_expectation_reduction(results):
    _check(results, 8)
    assert results[8].seconds < 30.0


def test_criterion_09_idempotent_suite(results):
    _check(results, 9)


def test_criterion_10_channel_suite(results):
    _check(results, 10)


def test_criterion_11_wall_time(results):
    _check(results, 11)
