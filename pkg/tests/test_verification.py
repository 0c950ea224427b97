import numpy as np
import pytest

from gxpeakon.verification import SUITES, configuration_error, random_configuration, run_suites


def test_all_suites_pass():
    results = run_suites("all", seed=0)
    assert [r.name for r in results] == list(SUITES)
    assert all(r.passed for r in results), [(r.name, r.residual, r.detail) for r in results if not r.passed]


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suites("nope")


def test_configuration_error_is_zero_for_identical(rng):
    p = random_configuration(rng, 2)
    assert configuration_error(p, p) == 0.0


def test_random_configuration_respects_ranges():
    p = random_configuration(np.random.default_rng(1), 4)
    assert all(-3 <= v <= 3 for v in p.x)
    assert all(0.1 <= v <= 10 for v in p.m_odd + p.n_even)
