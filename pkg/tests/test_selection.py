import math

import numpy as np
import pytest
from scipy import special, stats

from oracles import collision_bound
from replilearn.core.data import DrawnSample
from replilearn.core.hypotheses import FiniteLabeling
from replilearn.core.randomness import SharedRandomness
from replilearn.core.tasks import finite_task
from replilearn.experiments import SelectionInstance, collision_pair, selection_trial
from replilearn.selection import (
    HypothesisSelection,
    correlated_sample,
    correlated_sample_batch,
    exponential_tail_mass,
    exponential_weights,
    robustness_radius,
    selection_sample_size,
    selection_temperature,
)


def test_correlated_sample_is_deterministic():
    w = [0.1, 0.5, 0.2, 0.2]
    s = SharedRandomness(1).substream("x")
    assert len({correlated_sample(w, s) for _ in range(200)}) == 1


def test_scalar_matches_batch():
    gen = np.random.default_rng(0)
    W = gen.dirichlet(np.ones(6), size=300)
    streams = [SharedRandomness(2).substream("r", t) for t in range(300)]
    batch = correlated_sample_batch(W, streams)
    assert batch.tolist() == [correlated_sample(W[i], streams[i]) for i in range(300)]


def test_marginal_matches_weights():
    P = np.array([0.05, 0.4, 0.15, 0.3, 0.1])
    streams = [SharedRandomness(3).substream("r", t) for t in range(50_000)]
    out = correlated_sample_batch(P, streams)
    obs = np.bincount(out, minlength=5)
    assert stats.chisquare(obs, P * out.size).pvalue > 1e-4


def test_unnormalized_weights_and_zeros():
    s = SharedRandomness(4)
    assert correlated_sample([0.0, 3.0, 0.0], s) == 1
    with pytest.raises(ValueError):
        correlated_sample([0.0, 0.0], s)
    with pytest.raises(ValueError):
        correlated_sample([1.0, -1.0], s)


@pytest.mark.parametrize("tv", [0.05, 0.2])
def test_collision_rate_below_bound(tv):
    gen = np.random.default_rng(5)
    P, Q = collision_pair(8, tv, gen)
    assert 0.5 * np.abs(P - Q).sum() == pytest.approx(tv)
    n = 20_000
    streams = [SharedRandomness(6).substream("r", t) for t in range(n)]
    rate = np.mean(correlated_sample_batch(P, streams) != correlated_sample_batch(Q, streams))
    assert rate <= collision_bound(tv) + 3 * math.sqrt(tv * (1 - tv) / n)


def test_exponential_weights_are_softmax():
    errs = np.array([0.3, 0.1, 0.25, 0.5])
    t = selection_temperature(4, 0.1, 0.05)
    assert t == pytest.approx(2 * math.log(2 * 4 / 0.05) / 0.1)
    w = exponential_weights(errs, 0.1, 0.05)
    assert w / w.sum() == pytest.approx(special.softmax(-t * errs), rel=1e-12)


def test_tail_mass_oracle():
    errs = np.array([0.1, 0.12, 0.2, 0.4])
    t = selection_temperature(4, 0.1, 0.05)
    P = special.softmax(-t * errs)
    assert exponential_tail_mass(errs, 0.1, 0.05) == pytest.approx(P[2] + P[3], rel=1e-12)
    assert exponential_tail_mass(errs, 0.1, 0.05) <= 0.05 / 2


def test_size_and_radius_formulas():
    assert selection_sample_size(10, 0.05, 0.01) == math.ceil(64 * math.log(200) / 1e-4)
    assert robustness_radius(10, 0.1, 0.05, 0.2) == pytest.approx(0.02 / (12 * math.log(200)))
    sel = HypothesisSelection(0.1, 0.05, 0.2, robustness_radius(10, 0.1, 0.05, 0.2))
    assert sel.robust(10)
    with pytest.raises(ValueError):
        HypothesisSelection(0.1, 0.05, 0.2, 0.2)


def test_selection_finds_best_and_uses_shared_stream():
    task = finite_task([0.5, 0.5, 0.5])
    hyps = [FiniteLabeling([1, 1, 1]), FiniteLabeling([-1, 1, 1]), FiniteLabeling([-1, -1, 1])]
    sel = HypothesisSelection(0.1, 0.05, 0.2, 0.01)
    m = sel.sample_need(3)
    out = sel.select(hyps, DrawnSample(task, m, SharedRandomness(1)), SharedRandomness(2))
    assert out.index == 0
    assert out.probabilities.sum() == pytest.approx(1.0)


def test_selection_instance_geometry():
    inst = SelectionInstance()
    task = inst.task
    from replilearn.core.metrics import classification_distance, true_error

    f, g = inst.candidates(False), inst.candidates(True)
    for a, b in zip(f, g):
        assert classification_distance(task, a, b) == pytest.approx(inst.light_mass)
    assert inst.light_mass <= inst.tau
    assert true_error(task, f[inst.best]) == 0.0
    others = [true_error(task, h) for i, h in enumerate(f) if i != inst.best]
    assert min(others) == pytest.approx(0.4 * (1 - inst.light_mass))


def test_selection_trial_runs():
    out = selection_trial(SelectionInstance(), (7, 0))
    assert out.correct and out.tail_ok
