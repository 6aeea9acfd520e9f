"""Acceptance suite: twelve statistical criteria at their stated tolerances.

Run with pytest (one PASS/FAIL line per criterion appears in the terminal
summary) or directly with ``python tests/test_acceptance.py``.  SE is the
binomial standard error of the measured rate at the trial count used.
"""

from __future__ import annotations

import math
import os
import subprocess
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

sys.path.insert(0, str(Path(__file__).parent))
from oracles import dkw_bound, erm_plus_probability, log_log_slope  # noqa: E402

from replilearn import BasicPointwise, ERMFinite, pointwise_learner  # noqa: E402
from replilearn.approximate import ClusterParams, FiniteSupportSampler, replicable_stable_tester, tester_sizes  # noqa: E402
from replilearn.core.data import DrawnSample  # noqa: E402
from replilearn.core.hypotheses import Threshold, is_proper  # noqa: E402
from replilearn.core.metrics import excess_error  # noqa: E402
from replilearn.core.randomness import SharedRandomness  # noqa: E402
from replilearn.core.tasks import ThresholdTask, finite_task  # noqa: E402
from replilearn.experiments import (  # noqa: E402
    SelectionInstance,
    approx_config,
    collision_pair,
    run_reduce_amplify,
    run_reduce_bias,
    selection_trial,
    threshold_config,
)
from replilearn.harness import Estimate, PairedTrialConfig, default_workers, map_trials, run_paired, wilson_interval  # noqa: E402
from replilearn.pointwise import n_blocks  # noqa: E402
from replilearn.reductions import sign_identity_gap  # noqa: E402
from replilearn.selection import correlated_sample, correlated_sample_batch, exponential_tail_mass  # noqa: E402
from replilearn.semirepl import SemiReplicableLearner, SharedPool, build_cover  # noqa: E402
from replilearn.thresholds import RealizableApproxRepl, dkw_quantiles  # noqa: E402

SEED = 20261016
WORKERS = int(os.environ.get("REPLILEARN_TEST_WORKERS", default_workers()))
TASK4 = finite_task([0.4, -0.4, 0.4, -0.4])
RESULTS: list[str] = []


@dataclass
class Check:
    name: str
    ok: bool
    detail: str


def se(est: Estimate) -> float:
    return est.se


def at_most(name: str, est: Estimate, bound: float) -> Check:
    lim = bound + 3 * se(est)
    return Check(name, est.value <= lim, f"{est.value:.4f} <= {lim:.4f}")


def at_least(name: str, est: Estimate, bound: float) -> Check:
    lim = bound - 3 * se(est)
    return Check(name, est.value >= lim, f"{est.value:.4f} >= {lim:.4f}")


def verdict(cid: int, title: str, checks: list[Check], started: float) -> bool:
    ok = all(c.ok for c in checks)
    detail = "; ".join(f"{c.name} {c.detail}{'' if c.ok else ' [X]'}" for c in checks)
    line = f"C{cid:<2} {'PASS' if ok else 'FAIL'}  {title}: {detail} ({time.time() - started:.1f}s)"
    RESULTS.append(line)
    print(line, flush=True)
    return ok


# 1. pointwise replicability of the averaged predictor


def criterion_1() -> bool:
    t0 = time.time()
    checks = []
    for label, m in (("erm", None), ("erm-m15", 15)):
        lrn = BasicPointwise(ERMFinite(d=4, m=m), alpha=0.1, beta=0.1, rho=0.2, c_T=4)
        cfg = PairedTrialConfig(lrn, TASK4, 5000, SEED + 1, {"pointwise"}, points=(0, 1, 2, 3))
        checks.append(at_most(f"max disagreement[{label}]", run_paired(cfg, WORKERS).pointwise_max, 0.2))
    return verdict(1, "pointwise replicability d=4 rho=0.2 5000 trials", checks, t0)


# 2. the averaged predictor is an unbiased vote of the base learner


def _unbiased_job(payload, t):
    m, seed = payload
    lrn = BasicPointwise(ERMFinite(d=4, m=m), alpha=0.1, beta=0.1, rho=0.2, c_T=4)
    root = SharedRandomness(seed)
    h = lrn.learn(DrawnSample(TASK4, lrn.sample_need(), root.substream("data", t)), root.substream("r", t))
    return h.predict(np.arange(4)) == 1


def criterion_2() -> bool:
    t0 = time.time()
    N = 20000
    checks = []
    for label, m in (("erm", None), ("erm-m15", 15)):
        plus = np.array(map_trials(_unbiased_job, (m, SEED + 2), N, WORKERS)).mean(axis=0)
        if m is None:
            # the inner learner is accurate enough that its sign is the bias sign
            px = (TASK4.biases > 0).astype(float)
        else:
            px = np.array([erm_plus_probability(m, 0.25, p) for p in TASK4.biases])
        gap = float(np.max(np.abs(plus - px)))
        checks.append(Check(f"max|Pr[g=+1]-p_x|[{label}]", gap <= 0.02, f"{gap:.4f} <= 0.02"))
    return verdict(2, "unbiasedness N=20000", checks, t0)


# 3. boosted confidence


def criterion_3() -> bool:
    t0 = time.time()
    checks = []
    lrn = pointwise_learner(ERMFinite(d=4), alpha=0.15, beta=0.01, rho=0.2)
    cfg = PairedTrialConfig(lrn, TASK4, 3000, SEED + 3, {"pointwise", "excess_error"}, points=(0, 1, 2, 3),
                            alpha=0.15)
    rep = run_paired(cfg, WORKERS)
    checks.append(at_most("excess>alpha rate", rep.estimates["excess_exceeds"], 0.01))
    checks.append(at_most("max disagreement", rep.pointwise_max, 0.4))
    small = pointwise_learner(ERMFinite(d=4, m=15), alpha=0.15, beta=0.01, rho=0.2)
    cfg = PairedTrialConfig(small, TASK4, 3000, SEED + 33, {"pointwise"}, points=(0, 1, 2, 3))
    checks.append(at_most("max disagreement[erm-m15]", run_paired(cfg, WORKERS).pointwise_max, 0.4))
    return verdict(3, "boosted confidence beta=0.01 3000 trials", checks, t0)


# 4. replicable hypothesis selection under tau-perturbed lists


def _select_job(payload, t):
    inst, seed = payload
    return selection_trial(inst, (seed, t))


def criterion_4() -> bool:
    t0 = time.time()
    inst = SelectionInstance(n=10, alpha=0.1, beta=0.05, rho=0.2)
    trials = map_trials(_select_job, (inst, SEED + 4), 2000, WORKERS)
    n = len(trials)
    checks = [
        at_least("correct", Estimate(sum(t.correct for t in trials), n), 1 - inst.beta),
        at_least("perturbed agreement", Estimate(sum(t.agree for t in trials), n), 1 - (inst.rho + inst.beta)),
        Check("tail <= beta/2 on every trial", all(t.tail_ok for t in trials), f"{sum(t.tail_ok for t in trials)}/{n}"),
    ]
    return verdict(4, "hypothesis selection n=10 2000 trials", checks, t0)


# 5. correlated sampling


def criterion_5() -> bool:
    t0 = time.time()
    checks = []
    gen = np.random.default_rng(SEED + 5)
    w = gen.dirichlet(np.ones(12))
    s = SharedRandomness(SEED).substream("det")
    first = correlated_sample(w, s)
    same = sum(correlated_sample(w, s) == first for _ in range(10_000))
    checks.append(Check("determinism", same == 10_000, f"{same}/10000"))
    n_draws = 20_000
    streams = [SharedRandomness(SEED + 5).substream("r", t) for t in range(n_draws)]
    for tv in (0.01, 0.05, 0.1, 0.3):
        P, Q = collision_pair(8, tv, gen)
        dis = int(np.sum(correlated_sample_batch(P, streams) != correlated_sample_batch(Q, streams)))
        checks.append(at_most(f"collision@TV={tv}", Estimate(dis, n_draws), 2 * tv))
    worst = 1.0
    # one stream set serves all 20 vectors; each test is valid on its own
    big = [SharedRandomness(SEED + 55).substream("chi", t) for t in range(100_000)]
    for i in range(20):
        n = int(gen.integers(2, 33))
        P = gen.dirichlet(np.ones(n))
        obs = np.bincount(correlated_sample_batch(P, big), minlength=n)
        # pool cells with tiny expectation so the chi-square approximation holds
        exp = P * obs.sum()
        keep = exp >= 5
        o = np.append(obs[keep], obs[~keep].sum())
        e = np.append(exp[keep], exp[~keep].sum())
        if e[-1] == 0:
            o, e = o[:-1], e[:-1]
        worst = min(worst, stats.chisquare(o, e).pvalue)
    checks.append(Check("chi-square min p over 20 vectors", worst > 1e-4, f"{worst:.2e} > 1e-4"))
    return verdict(5, "correlated sampling", checks, t0)


# 6. approximate pipelines and the stable-string tester


def _tester_job(payload, t):
    hyps, probs, seed, paired = payload
    params, rho = ClusterParams(0.8, 0.05, 0.05, 0.05), 0.3
    m1, m2 = tester_sizes(params, rho)
    line = ThresholdTask.uniform(0.5)
    root = SharedRandomness(seed)
    out = []
    for k in ((1, 2) if paired else (1,)):
        sampler = FiniteSupportSampler(hyps, probs, root.substream("sampler", t, k))
        data = DrawnSample(line, m1 * m2, root.substream("data", t, k))
        out.append(replicable_stable_tester(sampler, data, params, rho, root.substream("r", t)).accept)
    return out


def criterion_6() -> bool:
    t0 = time.time()
    checks = []
    for mode, n_trials in (("const_alpha", 1500), ("const_gamma", 1000)):
        params = {"mode": mode, "d": 4}
        cfg = approx_config(params, SEED + 6, n_trials)
        rep = run_paired(cfg, WORKERS)
        checks.append(at_most(f"{mode} distance>gamma", rep.estimates["distance_exceeds"], cfg.learner.rho))
        checks.append(at_most(f"{mode} excess>alpha", rep.estimates["excess_exceeds"], cfg.learner.beta))
    beta, rho, n = 0.05, 0.3, 500
    near = [Threshold(0.30), Threshold(0.31), Threshold(0.80)]
    # close-pair probability about 0.905: comfortably above v + eps
    acc = map_trials(_tester_job, (near, [0.475, 0.475, 0.05], SEED + 61, False), n, WORKERS)
    checks.append(at_least("tester completeness", Estimate(sum(a[0] for a in acc), n), 1 - beta))
    far = [Threshold(0.2), Threshold(0.7)]
    # close-pair probability 0.68: below v - eps
    rej = map_trials(_tester_job, (far, [0.8, 0.2], SEED + 62, False), n, WORKERS)
    checks.append(at_least("tester soundness", Estimate(sum(not a[0] for a in rej), n), 1 - beta))
    root = math.sqrt(0.8)
    mid = [Threshold(0.2), Threshold(0.7), Threshold(0.9)]
    pair = map_trials(_tester_job, (mid, [root, (1 - root) / 2, (1 - root) / 2], SEED + 63, True), n, WORKERS)
    checks.append(at_least("tester replicability", Estimate(sum(a[0] == a[1] for a in pair), n), 1 - rho))
    return verdict(6, "approximate pipelines and tester", checks, t0)


# 7. proper threshold learner


def _dkw_job(payload, t):
    m, tau, K, seed = payload
    task = ThresholdTask.uniform(0.37, 0.1)
    S = DrawnSample(task, m, SharedRandomness(seed).substream("dkw", t))
    x = np.sort(S.materialize().x)
    i = np.arange(1, m + 1)
    gap = max(np.max(i / m - x), np.max(x - (i - 1) / m))
    q = dkw_quantiles(S, K, 0.0)[1:]
    ranks = (m // K) * np.arange(1, K + 1) / m
    return gap > tau, bool(np.max(np.abs(q - ranks)) > tau)


def criterion_7() -> bool:
    t0 = time.time()
    cfg = threshold_config({}, SEED + 7, 1000)
    records = map_trials(_threshold_job, cfg, cfg.n_trials, WORKERS)
    n = len(records)
    lrn = cfg.learner
    checks = [
        at_least("accuracy", Estimate(sum(r[0] for r in records), n), 0.95),
        at_least("gamma-closeness", Estimate(sum(r[1] for r in records), n), 0.7),
        Check("properness", all(r[2] for r in records), f"{sum(r[2] for r in records)}/{n}"),
    ]
    tau, beta = 0.02, 0.05
    m = math.ceil(16 * math.log(1 / beta) / tau**2)
    dk = map_trials(_dkw_job, (m, tau, 30, SEED + 77), 2000, WORKERS)
    bound = 2 * math.exp(-m * tau * tau)
    checks.append(at_most("DKW sup-gap violation", Estimate(sum(d[0] for d in dk), len(dk)), bound))
    checks.append(at_most("quantile CDF-gap violation", Estimate(sum(d[1] for d in dk), len(dk)), bound))
    assert bound >= dkw_bound(m, tau)
    return verdict(7, f"threshold learner 1000 trials (alpha,gamma,rho,beta)=({lrn.alpha},{lrn.gamma},{lrn.rho},{lrn.beta})",
                   checks, t0)


def _threshold_job(cfg, t):
    root = SharedRandomness(cfg.root_seed)
    lrn, task = cfg.learner, cfg.task
    r = root.substream("r", t)
    h1 = lrn.learn(DrawnSample(task, lrn.sample_need(), root.substream("data", t, 1)), r)
    h2 = lrn.learn(DrawnSample(task, lrn.sample_need(), root.substream("data", t, 2)), r)
    from replilearn.core.metrics import classification_distance

    return (excess_error(task, h1) <= lrn.alpha, classification_distance(task, h1, h2) <= lrn.gamma,
            is_proper(h1) and is_proper(h2))


# 8. realizable OPT gate


def _gate_job(payload, t):
    kind, seed = payload
    root = SharedRandomness(seed)
    r = root.substream("r", t)
    if kind == "realizable":
        lrn = RealizableApproxRepl("threshold", alpha=0.1, beta=0.05, rho=0.2, gamma=0.1)
        task = ThresholdTask.uniform(0.37)
        h, tr = lrn.learn_with_trace(DrawnSample(task, lrn.sample_need(), root.substream("data", t, 1)), r)
        return tr.passed and excess_error(task, h) <= lrn.alpha
    lrn = RealizableApproxRepl("finite", d=2, alpha=0.1, beta=0.05, rho=0.05, gamma=0.1)
    task = finite_task([1.0, 0.94])
    d1 = lrn.learn_with_trace(DrawnSample(task, lrn.sample_need(), root.substream("data", t, 1)), r)[1]
    d2 = lrn.learn_with_trace(DrawnSample(task, lrn.sample_need(), root.substream("data", t, 2)), r)[1]
    return d1.passed != d2.passed


def criterion_8() -> bool:
    t0 = time.time()
    n = 1000
    acc = map_trials(_gate_job, ("realizable", SEED + 8), n, WORKERS)
    dis = map_trials(_gate_job, ("boundary", SEED + 88), n, WORKERS)
    from replilearn.core.metrics import opt_error

    opt = opt_error(finite_task([1.0, 0.94]))
    checks = [
        at_least("realizable accept-and-accurate", Estimate(sum(acc), n), 1 - 0.05),
        at_most(f"boundary (OPT={opt:.3f}) decision disagreement", Estimate(sum(dis), n), 11 * 0.05),
    ]
    return verdict(8, "realizable gate", checks, t0)


# 9. semi-replicable learner


def _semi_job(seed, t):
    lrn = SemiReplicableLearner("threshold", alpha=0.1, beta=0.05, rho=0.2)
    task = ThresholdTask.uniform(0.37)
    root = SharedRandomness(seed)
    r = root.substream("r", t)
    pool = SharedPool.draw(task, lrn.m_u, r)
    cover_ok = len(build_cover(pool, "threshold")) == np.unique(pool.unlabeled).size + 1
    h1 = lrn.learn(DrawnSample(task, lrn.sample_need(), root.substream("data", t, 1)), r)
    h2 = lrn.learn(DrawnSample(task, lrn.sample_need(), root.substream("data", t, 2)), r)
    return h1 == h2, excess_error(task, h1) <= lrn.alpha, cover_ok


def criterion_9() -> bool:
    t0 = time.time()
    recs = map_trials(_semi_job, SEED + 9, 1000, WORKERS)
    n = len(recs)
    checks = [
        at_least("exact equality", Estimate(sum(r[0] for r in recs), n), 0.8),
        at_least("accuracy", Estimate(sum(r[1] for r in recs), n), 0.95),
        Check("cover size identity", all(r[2] for r in recs), f"{sum(r[2] for r in recs)}/{n}"),
    ]
    return verdict(9, "semi-replicable thresholds 1000 trials", checks, t0)


# 10. reductions


def _sign_identity_job(seed, t):
    gen = SharedRandomness(seed).substream("sign", t).generator()
    d = int(gen.integers(1, 40))
    p = gen.uniform(-1, 1, size=d)
    from replilearn.core.hypotheses import FiniteLabeling

    return abs(sign_identity_gap(FiniteLabeling(gen.choice([-1, 1], size=d)), p))


def criterion_10() -> bool:
    t0 = time.time()
    checks = []
    bias = run_reduce_bias({"d": 2, "alpha": 0.1, "rho": 0.2, "base_m": 3000}, SEED + 10, 1000, WORKERS)
    n = bias.n_trials
    checks.append(at_most("bias wrong-sign", Estimate(round(bias.checks["wrong_rate"] * n), n), 0.03))
    amp = run_reduce_amplify({"d": 8, "alpha": 0.2, "rho": 0.2, "gamma": 0.2}, SEED + 100, 1000, WORKERS)
    n = amp.n_trials
    agree = Estimate(round(amp.est_exact_repl * n), n)
    checks.append(at_least("amplified agreement", agree, 1 - (2 * 0.2 + 0.2)))
    checks.append(at_most("amplified err>100alpha", Estimate(amp.checks["error_count"], n), 0.1))
    gaps = map_trials(_sign_identity_job, SEED + 101, 5000, 1)
    checks.append(Check("sign-one-way identity", max(gaps) < 1e-12, f"max gap {max(gaps):.1e}"))
    return verdict(10, "reductions", checks, t0)


# 11. scaling


def _slope_job(payload, t):
    c_T, seed = payload
    lrn = BasicPointwise(ERMFinite(d=1, m=1), alpha=0.1, beta=0.1, rho=1.0, c_T=c_T)
    task = finite_task([0.0])
    root = SharedRandomness(seed)
    r = root.substream("r", t)
    h1 = lrn.learn(DrawnSample(task, lrn.sample_need(), root.substream("data", t, 1)), r)
    h2 = lrn.learn(DrawnSample(task, lrn.sample_need(), root.substream("data", t, 2)), r)
    return bool(h1.predict(np.array([0]))[0] != h2.predict(np.array([0]))[0])


def _exact_disagreement(T: int) -> float:
    # E|F1 - F2| with F ~ Bin(T, 1/2) / T, the disagreement over a uniform cut
    k = np.arange(T + 1)
    pmf = stats.binom.pmf(k, T, 0.5)
    return float(np.sum(pmf[:, None] * pmf[None, :] * np.abs(k[:, None] - k[None, :])) / T)


def criterion_11() -> bool:
    t0 = time.time()
    Ts = [16, 64, 256, 1024]
    n = 6000
    rates = []
    for i, T in enumerate(Ts):
        assert n_blocks(1.0, T) == T
        rates.append(np.mean(map_trials(_slope_job, (T, SEED + 11 + i), n, WORKERS)))
    slope = log_log_slope(Ts, rates)
    exact = log_log_slope(Ts, [_exact_disagreement(T) for T in Ts])
    checks = [Check("measured slope", abs(slope + 0.5) <= 0.15, f"{slope:.3f} (oracle {exact:.3f})")]
    quad = all(n_blocks(r / 2) == 4 * n_blocks(r) for r in (0.2, 0.1, 0.05))
    checks.append(Check("T quadratic in 1/rho", quad, "T(rho/2) = 4 T(rho) at rho in {0.2, 0.1, 0.05}"))
    a = SemiReplicableLearner(alpha=0.1, beta=0.05, rho=0.2)
    b = SemiReplicableLearner(alpha=0.1, beta=0.05, rho=0.05)
    ratio = b.labeled_need_real(a.max_cover()) / a.labeled_need_real(a.max_cover())
    checks.append(Check("semirepl budget x16 at rho/4", abs(ratio - 16) < 1e-9, f"ratio {ratio:.12f}"))
    return verdict(11, "scaling", checks, t0)


# 12. infrastructure


def _selftest(workers: int) -> bytes:
    env = dict(os.environ)
    env.pop("REPLILEARN_SEED", None)
    out = subprocess.run([sys.executable, "-m", "replilearn", "selftest", "--quick", "--seed", "42", "--workers",
                          str(workers)], capture_output=True, env=env, check=False)
    return out.stdout if out.returncode == 0 else b"exit %d" % out.returncode


def _exact_coverage(n: int, p: float) -> float:
    k = np.arange(n + 1)
    inside = np.array([lo <= p <= hi for lo, hi in (wilson_interval(int(j), n) for j in k)])
    return float(stats.binom.pmf(k, n, p)[inside].sum())


def criterion_12() -> bool:
    t0 = time.time()
    a, b, c = _selftest(1), _selftest(1), _selftest(8)
    checks = [Check("selftest byte-identical (1, 1, 8 workers)", a == b == c and a.startswith(b"experiment_id"),
                    f"{len(a)} bytes")]
    gen = np.random.default_rng(SEED + 12)
    n_stream = 2000
    for p in (0.01, 0.2, 0.5):
        ks = gen.binomial(n_stream, p, size=5000)
        cov = np.mean([lo <= p <= hi for lo, hi in (wilson_interval(int(k), n_stream) for k in ks)])
        exact = _exact_coverage(n_stream, p)
        checks.append(Check(f"Wilson coverage p={p}", 0.93 <= cov <= 0.97, f"{cov:.4f} (exact {exact:.4f})"))
    return verdict(12, "infrastructure", checks, t0)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8,
            criterion_9, criterion_10, criterion_11, criterion_12]


@pytest.mark.acceptance
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"C{i + 1}" for i in range(len(CRITERIA))])
def test_criterion(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
