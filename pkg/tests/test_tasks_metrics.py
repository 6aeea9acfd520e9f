import numpy as np
import pytest

from replilearn.core.hypotheses import Aggregate, ConstantMinus, ConstantPlus, FiniteLabeling, Threshold
from replilearn.core.metrics import classification_distance, distance_matrix, excess_error, opt_error, true_error
from replilearn.core.tasks import FiniteLabeledDistribution, ThresholdTask, finite_task


def test_finite_true_error_formula():
    p = np.array([0.4, -0.4, 0.2, 0.0])
    w = np.array([0.1, 0.2, 0.3, 0.4])
    task = finite_task(p, w)
    lab = np.array([1, 1, -1, 1])
    expect = sum(w[i] * (1 - lab[i] * p[i]) / 2 for i in range(4))
    assert true_error(task, FiniteLabeling(lab)) == pytest.approx(expect, abs=1e-15)
    assert opt_error(task) == pytest.approx(sum(w * (1 - np.abs(p)) / 2), abs=1e-15)


def test_finite_error_matches_monte_carlo():
    task = finite_task([0.4, -0.4, 0.4, -0.4])
    h = FiniteLabeling([1, 1, 1, 1])
    gen = np.random.default_rng(0)
    n = 200_000
    x = gen.integers(4, size=n)
    y = np.where(gen.random(n) < (1 + task.biases[x]) / 2, 1, -1)
    mc = np.mean(h.predict(x) != y)
    assert abs(mc - true_error(task, h)) < 4 * np.sqrt(0.25 / n)


def test_threshold_error_closed_form():
    task = ThresholdTask.uniform(0.37, 0.1)
    for t in (0.0, 0.2, 0.37, 0.5, 1.0):
        assert true_error(task, Threshold(t)) == pytest.approx(0.1 + 0.8 * abs(t - 0.37), abs=1e-12)
    assert opt_error(task) == pytest.approx(0.1)
    assert excess_error(task, Threshold(0.47)) == pytest.approx(0.08)
    assert true_error(task, ConstantPlus()) == pytest.approx(0.1 + 0.8 * 0.37)
    assert true_error(task, ConstantMinus()) == pytest.approx(0.1 + 0.8 * 0.63)


def test_threshold_distance_is_interval_mass():
    task = ThresholdTask.uniform(0.5)
    assert classification_distance(task, Threshold(0.2), Threshold(0.45)) == pytest.approx(0.25)
    D = distance_matrix(task, [Threshold(0.1), Threshold(0.3), ConstantPlus()])
    assert D == pytest.approx(np.array([[0, 0.2, 0.1], [0.2, 0, 0.3], [0.1, 0.3, 0]]))


def test_aggregate_threshold_distance_matches_grid():
    task = ThresholdTask.uniform(0.5)
    agg = Aggregate([Threshold(0.2), Threshold(0.4), Threshold(0.6)], 0.5)
    grid = (np.arange(1_000_000) + 0.5) / 1_000_000
    mc = np.mean(agg.predict(grid) != Threshold(0.3).predict(grid))
    assert classification_distance(task, agg, Threshold(0.3)) == pytest.approx(mc, abs=1e-5)


def test_finite_distance_weighted():
    task = finite_task([0.1, 0.1, 0.1], [0.5, 0.3, 0.2])
    d = classification_distance(task, FiniteLabeling([1, -1, 1]), FiniteLabeling([1, 1, -1]))
    assert d == pytest.approx(0.5)


def test_task_validation():
    with pytest.raises(ValueError):
        FiniteLabeledDistribution(np.array([1.5]))
    with pytest.raises(ValueError):
        FiniteLabeledDistribution(np.array([0.1, 0.2]), np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        ThresholdTask.uniform(0.3, 0.5)


def test_structural_equality():
    assert FiniteLabeling([1, -1]) == FiniteLabeling([1, -1])
    assert Threshold(0.3) != Threshold(0.30000000000000004)
    a = Aggregate([FiniteLabeling([1, -1]), FiniteLabeling([1, 1])], 0.25)
    b = Aggregate([FiniteLabeling([1, -1]), FiniteLabeling([1, 1])], 0.25)
    c = Aggregate([FiniteLabeling([1, 1]), FiniteLabeling([1, -1])], 0.25)
    assert a == b and hash(a) == hash(b)
    assert a != c


def test_aggregate_vote_rule():
    subs = [FiniteLabeling([1, -1, 1]), FiniteLabeling([1, -1, -1]), FiniteLabeling([1, 1, -1])]
    agg = Aggregate(subs, 0.5)
    # plus fractions 1, 1/3, 1/3; strict comparison with the cut
    assert list(agg.labels_on(3)) == [1, -1, -1]
    assert list(Aggregate(subs, 0.3).labels_on(3)) == [1, 1, 1]
