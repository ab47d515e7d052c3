import math

import numpy as np
import pytest

from qosassoc.core import (Association, Budget, load_efficiency, harmonic_gain,
                           objective_resource_based, objective_user_based, objective_user_pf,
                           pf_throughput, resource_demand, resource_objective_eliminated,
                           round_max_probability, sample_demand)
from qosassoc.exceptions import DomainError


def test_resource_demand_examples():
    dp = resource_demand(np.array([[500.0, 1000.0], [250.0, 4000.0]]), [1000.0, 1000.0])
    np.testing.assert_allclose(dp.s, [[2.0, 1.0], [4.0, 0.25]])


def test_resource_demand_rejects_bad_input():
    with pytest.raises(DomainError):
        resource_demand(np.ones((2, 2)), [1.0, 0.0])
    with pytest.raises(DomainError):
        resource_demand(np.array([[1.0, 0.0]]), [1.0, 1.0])
    with pytest.raises(DomainError):
        resource_demand(np.ones((2, 3)), [1.0, 1.0])


def test_sample_demand_modes(rng):
    np.testing.assert_array_equal(sample_demand("identical", 3, rng), [1000.0] * 3)
    d = sample_demand("uniform", 10000, rng)
    assert d.min() > 0 and d.max() <= 2000.0
    assert abs(d.mean() - 1000.0) < 30.0
    with pytest.raises(DomainError):
        sample_demand("other", 3, rng)


def test_budget_positive():
    assert Budget().M == 100
    with pytest.raises(DomainError):
        Budget(0)


def test_association_validation():
    a = Association.from_labels([1, 0, 1], 2)
    np.testing.assert_array_equal(a.user_loads(), [1, 2])
    np.testing.assert_array_equal(a.labels, [1, 0, 1])
    with pytest.raises(ValueError):
        a.x[0, 0] = 1.0
    with pytest.raises(DomainError):
        Association(np.array([[0.5, 1.0], [0.4, 0.0]]), integral=False)
    with pytest.raises(DomainError):
        Association(np.array([[0.5], [0.5]]), integral=True)
    with pytest.raises(DomainError):
        Association.from_labels([2], 2)


def test_round_max_probability_ties_lowest_index():
    x = np.array([[0.5, 0.2], [0.5, 0.8]])
    np.testing.assert_array_equal(round_max_probability(x), [0, 1])


def test_load_efficiency():
    R = np.array([[100.0, 200.0], [50.0, 50.0]])
    dp = resource_demand(R, [100.0, 100.0])
    a = Association.from_labels([0, 0], 2)
    e = load_efficiency(a, R, dp)
    np.testing.assert_allclose(e[0], R[0] / 1.5)
    assert np.isnan(e[1]).all()


def test_harmonic_gain_examples():
    assert harmonic_gain(1) == 1.0
    assert harmonic_gain(3) == pytest.approx(11 / 6)
    with pytest.raises(DomainError):
        harmonic_gain(0)
    with pytest.raises(DomainError):
        harmonic_gain(1.5)


def test_pf_throughput():
    R = np.array([[300.0, 600.0], [100.0, 100.0]])
    a = Association.from_labels([0, 0], 2)
    # two users share BS 0: gain J(2)/2 = 0.75
    np.testing.assert_allclose(pf_throughput(a, R), [225.0, 450.0])


def test_objectives_hand_values():
    R = np.array([[100.0, 200.0], [50.0, 400.0]])
    dp = resource_demand(R, [100.0, 100.0])
    a = Association.from_labels([0, 1], 2)
    # user 0: s=1, y0=1 -> log 100; user 1: s=0.25, y1=0.25 -> 0.25 (log 400 - log 0.25)
    want = math.log(100) + 0.25 * (math.log(400) - math.log(0.25))
    assert objective_resource_based(a, R, dp) == pytest.approx(want, rel=1e-14)
    assert objective_user_based(a, R) == pytest.approx(math.log(100) + math.log(400))
    both = Association.from_labels([0, 0], 2)
    assert objective_user_based(both, R) == pytest.approx(
        math.log(100 / 2) + math.log(200 / 2))
    assert objective_user_pf(both, R) == pytest.approx(
        math.log(0.75 * 100) + math.log(0.75 * 200))


def test_eliminated_form_matches():
    rng = np.random.default_rng(0)
    R = np.exp(rng.uniform(1, 7, (3, 5)))
    dp = resource_demand(R, rng.uniform(1, 2000, 5))
    a = Association.from_labels([0, 2, 2, 1, 0], 3)
    assert resource_objective_eliminated(a.x, dp.s, np.log(R)) == pytest.approx(
        objective_resource_based(a, R, dp), rel=1e-12)


def test_empty_bs_contributes_zero():
    R = np.array([[100.0], [100.0]])
    dp = resource_demand(R, [100.0])
    a = Association.from_labels([0], 2)
    assert objective_resource_based(a, R, dp) == pytest.approx(math.log(100))
