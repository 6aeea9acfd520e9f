"""Ready-made experiments shared by the command line and the acceptance suite.

Each ``run_*`` function takes a flat parameter dict, a seed, a trial count and
a worker count, and returns a :class:`Row` whose fields mirror the CSV schema,
plus a dict of named checks used by ``selftest``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from .approximate import build_approx_learner
from .base import Learner
from .constants import CONSTANTS
from .core.data import DrawnSample
from .core.hypotheses import FiniteLabeling, Hypothesis
from .core.metrics import excess_error, opt_error, true_error
from .core.randomness import SharedRandomness
from .core.tasks import FiniteLabeledDistribution, ThresholdTask, finite_task
from .harness import (
    MIN_TRIALS,
    Estimate,
    PairedTrialConfig,
    ReplicabilityReport,
    grid_cells,
    map_trials,
    run_paired,
)
from .learners import ERMFinite, ERMThreshold
from .pointwise import BasicPointwise, pointwise_learner
from .reductions import apx_repl_hardness_amplification, bias_estimator_pointwise, sign_one_way_from_learner
from .selection import (
    HypothesisSelection,
    correlated_sample_batch,
    exponential_tail_mass,
    robustness_radius,
)
from .semirepl import SemiReplicableLearner
from .thresholds import RealizableApproxRepl, ThresholdLearner

COLUMNS = (
    "experiment_id", "subcommand", "d", "alpha", "beta", "rho", "gamma", "n_trials", "seed",
    "samples_labeled", "samples_shared", "est_exact_repl", "est_approx_repl", "est_pointwise_max",
    "excess_err_p90", "opt", "ci_lo", "ci_hi",
)


@dataclass
class Row:
    experiment_id: str
    subcommand: str
    d: int | None = None
    alpha: float | None = None
    beta: float | None = None
    rho: float | None = None
    gamma: float | None = None
    n_trials: int | None = None
    seed: int | None = None
    samples_labeled: int | None = None
    samples_shared: int | None = None
    est_exact_repl: float | None = None
    est_approx_repl: float | None = None
    est_pointwise_max: float | None = None
    excess_err_p90: float | None = None
    opt: float | None = None
    ci_lo: float | None = None
    ci_hi: float | None = None
    checks: dict = field(default_factory=dict, repr=False)

    def values(self) -> list:
        return [getattr(self, c) for c in COLUMNS]


def _three_se(est: Estimate) -> float:
    return 3.0 * est.se


def _ci(row: Row, est: Estimate | None) -> None:
    if est is not None:
        row.ci_lo, row.ci_hi = est.interval


def _biases(params: dict, d: int) -> list[float]:
    b = params.get("biases")
    if b is None:
        return [0.4 if i % 2 == 0 else -0.4 for i in range(d)]
    b = list(b) if isinstance(b, (list, tuple)) else [float(b)]
    if len(b) != d:
        raise ValueError(f"biases has {len(b)} entries but d={d}")
    return [float(v) for v in b]


def _threshold_task(params: dict) -> ThresholdTask:
    return ThresholdTask.uniform(float(params.get("threshold", 0.37)), float(params.get("noise", 0.1)))


def _report_row(sub: str, params: dict, rep: ReplicabilityReport, seed: int, **fields) -> Row:
    row = Row(
        experiment_id=str(params.get("experiment_id", f"{sub}-{seed}")),
        subcommand=sub,
        n_trials=rep.n_trials,
        seed=seed,
        samples_labeled=rep.samples_labeled,
        samples_shared=rep.samples_shared,
        est_exact_repl=rep.value("exact_repl"),
        est_approx_repl=rep.value("approx_repl"),
        opt=rep.opt,
        excess_err_p90=rep.excess_quantile(0.9),
        **fields,
    )
    pm = rep.pointwise_max
    row.est_pointwise_max = None if pm is None else pm.value
    return row


# learner-based experiments


def pointwise_config(params: dict, seed: int, n_trials: int) -> PairedTrialConfig:
    d = int(params.get("d", 4))
    alpha, beta, rho = float(params.get("alpha", 0.1)), float(params.get("beta", 0.1)), float(params.get("rho", 0.2))
    base = ERMFinite(d=d, m=params.get("base_m"))
    if int(params.get("boost", 0)):
        learner: Learner = pointwise_learner(base, alpha, beta, rho, c_T=params.get("c_T"))
    else:
        learner = BasicPointwise(base, alpha=alpha, beta=beta, rho=rho, c_T=params.get("c_T"))
    task = finite_task(_biases(params, d))
    return PairedTrialConfig(learner, task, n_trials, seed, {"pointwise", "exact_equality", "excess_error"},
                             points=tuple(range(d)), alpha=alpha, label="pointwise")


def run_pointwise(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    cfg = pointwise_config(params, seed, n_trials)
    rep = run_paired(cfg, workers)
    lrn = cfg.learner
    rho = float(params.get("rho", 0.2))
    bound = 2 * rho if int(params.get("boost", 0)) else rho
    row = _report_row("pointwise", params, rep, seed, d=cfg.task.d, alpha=cfg.alpha,
                      beta=float(params.get("beta", 0.1)), rho=rho)
    pm = rep.pointwise_max
    _ci(row, pm)
    row.checks["pointwise_max"] = pm.value <= bound + _three_se(pm)
    return row


def approx_gamma_default(mode: str, alpha: float, beta: float, rho: float) -> float:
    if mode == "const_alpha":
        D = math.ceil(CONSTANTS.d_runs * math.log(1 / beta))
        return rho * alpha / (12 * math.log(D / beta))
    return 0.25


def approx_config(params: dict, seed: int, n_trials: int) -> PairedTrialConfig:
    mode = str(params.get("mode", "const_alpha"))
    d = int(params.get("d", 4))
    alpha, beta = float(params.get("alpha", 0.2)), float(params.get("beta", 0.05))
    rho = float(params.get("rho", 0.3 if mode == "const_alpha" else 0.1))
    gamma = float(params.get("gamma", approx_gamma_default(mode, alpha, beta, rho)))
    learner = build_approx_learner(mode, ERMFinite(d=d, m=params.get("base_m")), alpha, beta, rho, gamma)
    task = finite_task(_biases(params, d))
    return PairedTrialConfig(learner, task, n_trials, seed, {"approx_distance", "excess_error", "exact_equality"},
                             gamma=gamma, alpha=alpha, label=f"approx-{mode}")


def run_approx(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    cfg = approx_config(params, seed, n_trials)
    rep = run_paired(cfg, workers)
    lrn = cfg.learner
    row = _report_row("approx", params, rep, seed, d=cfg.task.d, alpha=cfg.alpha, beta=lrn.beta,
                      rho=lrn.rho, gamma=cfg.gamma)
    _ci(row, rep.estimates["approx_repl"])
    far, bad = rep.estimates["distance_exceeds"], rep.estimates["excess_exceeds"]
    row.checks["distance"] = far.value <= lrn.rho + _three_se(far)
    row.checks["excess"] = bad.value <= lrn.beta + _three_se(bad)
    return row


def threshold_config(params: dict, seed: int, n_trials: int) -> PairedTrialConfig:
    learner = ThresholdLearner(alpha=float(params.get("alpha", 0.1)), beta=float(params.get("beta", 0.05)),
                               rho=float(params.get("rho", 0.3)), gamma=float(params.get("gamma", 0.15)))
    return PairedTrialConfig(learner, _threshold_task(params), n_trials, seed,
                             {"approx_distance", "excess_error", "exact_equality"},
                             gamma=learner.gamma, alpha=learner.alpha, label="threshold")


def run_threshold(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    cfg = threshold_config(params, seed, n_trials)
    rep = run_paired(cfg, workers)
    lrn = cfg.learner
    row = _report_row("threshold", params, rep, seed, d=1, alpha=lrn.alpha, beta=lrn.beta, rho=lrn.rho,
                      gamma=lrn.gamma)
    close, bad = rep.estimates["approx_repl"], rep.estimates["excess_exceeds"]
    _ci(row, close)
    row.checks["closeness"] = close.value >= 1 - lrn.rho - _three_se(close)
    row.checks["accuracy"] = 1 - bad.value >= 1 - lrn.beta - _three_se(bad)
    return row


def _class_task(params: dict):
    if str(params.get("hclass", "threshold")) == "finite":
        d = int(params.get("d", 4))
        return finite_task(_biases(params, d))
    return ThresholdTask.uniform(float(params.get("threshold", 0.37)), float(params.get("noise", 0.0)))


def realizable_config(params: dict, seed: int, n_trials: int) -> PairedTrialConfig:
    hclass = str(params.get("hclass", "threshold"))
    task = _class_task(params)
    d = task.d if hclass == "finite" else 1
    learner = RealizableApproxRepl(hclass, d=d, alpha=float(params.get("alpha", 0.1)),
                                   beta=float(params.get("beta", 0.05)), rho=float(params.get("rho", 0.2)),
                                   gamma=float(params.get("gamma", 0.1)))
    return PairedTrialConfig(learner, task, n_trials, seed, {"approx_distance", "excess_error", "exact_equality"},
                             gamma=learner.radius, alpha=learner.alpha, label="realizable")


def run_realizable(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    cfg = realizable_config(params, seed, n_trials)
    rep = run_paired(cfg, workers)
    lrn = cfg.learner
    row = _report_row("realizable", params, rep, seed, d=lrn.d_eff, alpha=lrn.alpha, beta=lrn.beta,
                      rho=lrn.rho, gamma=lrn.gamma)
    close = rep.estimates["approx_repl"]
    _ci(row, close)
    row.checks["closeness"] = close.value >= 1 - 11 * lrn.rho - _three_se(close)
    return row


def semi_config(params: dict, seed: int, n_trials: int) -> PairedTrialConfig:
    hclass = str(params.get("hclass", "threshold"))
    task = _class_task(params)
    d = task.d if hclass == "finite" else 1
    learner = SemiReplicableLearner(hclass, d=d, alpha=float(params.get("alpha", 0.1)),
                                    beta=float(params.get("beta", 0.05)), rho=float(params.get("rho", 0.2)))
    return PairedTrialConfig(learner, task, n_trials, seed, {"exact_equality", "excess_error"},
                             alpha=learner.alpha, label="semi")


def run_semi(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    cfg = semi_config(params, seed, n_trials)
    rep = run_paired(cfg, workers)
    lrn = cfg.learner
    row = _report_row("semi", params, rep, seed, d=lrn.d_eff, alpha=lrn.alpha, beta=lrn.beta, rho=lrn.rho)
    eq, bad = rep.estimates["exact_repl"], rep.estimates["excess_exceeds"]
    _ci(row, eq)
    row.checks["exact"] = eq.value >= 1 - lrn.rho - _three_se(eq)
    row.checks["accuracy"] = 1 - bad.value >= 1 - lrn.beta - _three_se(bad)
    return row


# selection with perturbed candidate lists


@dataclass(frozen=True)
class SelectionInstance:
    """n candidates on a d = n + 1 point noiseless task with one light point.

    Candidate ``best`` labels everything +1; the others flip four heavy points
    each.  The perturbed list flips the light point in every candidate, which
    moves each by exactly its mass in classification distance.
    """

    n: int = 10
    alpha: float = 0.1
    beta: float = 0.05
    rho: float = 0.2
    best: int = 3
    light_mass: float = 1e-4

    @property
    def tau(self) -> float:
        return robustness_radius(self.n, self.alpha, self.beta, self.rho)

    @property
    def task(self) -> FiniteLabeledDistribution:
        heavy = (1.0 - self.light_mass) / self.n
        marginal = np.array([heavy] * self.n + [self.light_mass])
        return FiniteLabeledDistribution(np.ones(self.n + 1), marginal)

    def candidates(self, perturbed: bool = False) -> list[Hypothesis]:
        out = []
        for i in range(self.n):
            lab = np.ones(self.n + 1, dtype=np.int64)
            if i != self.best:
                lab[[(i + k) % self.n for k in range(4)]] = -1
            if perturbed:
                lab[self.n] = -lab[self.n]
            out.append(FiniteLabeling(lab))
        return out

    def selection(self) -> HypothesisSelection:
        return HypothesisSelection(self.alpha, self.beta, self.rho, self.tau)


@dataclass(frozen=True)
class SelectionTrial:
    correct: bool
    agree: bool
    tail_ok: bool


def selection_trial(inst: SelectionInstance, seed_t: tuple) -> SelectionTrial:
    seed, t = seed_t
    root = SharedRandomness(seed)
    sel = inst.selection()
    task = inst.task
    m = sel.sample_need(inst.n)
    r = root.substream("r", t)
    f, g = inst.candidates(False), inst.candidates(True)
    o1 = sel.select(f, DrawnSample(task, m, root.substream("data", t, 1)), r)
    o2 = sel.select(g, DrawnSample(task, m, root.substream("data", t, 2)), r)
    opt = opt_error(task)
    correct = true_error(task, f[o1.index]) <= opt + inst.alpha
    tail_ok = all(exponential_tail_mass(o.errors, inst.alpha, inst.beta) <= inst.beta / 2 for o in (o1, o2))
    return SelectionTrial(bool(correct), o1.index == o2.index, bool(tail_ok))


def _selection_job(payload, t):
    inst, seed = payload
    return selection_trial(inst, (seed, t))


def run_select(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    inst = SelectionInstance(n=int(params.get("n", 10)), alpha=float(params.get("alpha", 0.1)),
                             beta=float(params.get("beta", 0.05)), rho=float(params.get("rho", 0.2)))
    trials = map_trials(_selection_job, (inst, seed), n_trials, workers)
    n = len(trials)
    correct = Estimate(sum(t.correct for t in trials), n)
    agree = Estimate(sum(t.agree for t in trials), n)
    m = inst.selection().sample_need(inst.n)
    row = Row(str(params.get("experiment_id", f"select-{seed}")), "select", d=inst.n + 1, alpha=inst.alpha,
              beta=inst.beta, rho=inst.rho, gamma=inst.tau, n_trials=n, seed=seed, samples_labeled=2 * m * n,
              samples_shared=0, est_exact_repl=agree.value, opt=opt_error(inst.task))
    _ci(row, agree)
    row.checks["correct"] = correct.value >= 1 - inst.beta - _three_se(correct)
    row.checks["agree"] = agree.value >= 1 - (inst.rho + inst.beta) - _three_se(agree)
    row.checks["tail"] = all(t.tail_ok for t in trials)
    row.checks["correct_rate"] = correct.value
    return row


# reductions


def bias_base(params: dict) -> BasicPointwise:
    d = int(params.get("d", 2))
    return BasicPointwise(ERMFinite(d=2 * d + 1, m=int(params.get("base_m", 3000))), alpha=0.1, beta=0.1,
                          rho=float(params.get("rho", 0.2)))


def _bias_job(payload, t):
    params, seed = payload
    d, alpha, rho = int(params.get("d", 2)), float(params.get("alpha", 0.1)), float(params.get("rho", 0.2))
    A = bias_base(params)
    root = SharedRandomness(seed)
    sign = 1 if root.substream("task", t).uniform() < 0.5 else -1
    p = sign * alpha
    r = root.substream("r", t)
    a = bias_estimator_pointwise(A, d, alpha, rho, p, r, root.substream("data", t, 1))
    b = bias_estimator_pointwise(A, d, alpha, rho, p, r, root.substream("data", t, 2))
    return (a.answer != sign, a.answer == b.answer, a.capped)


def run_reduce_bias(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    trials = map_trials(_bias_job, (params, seed), n_trials, workers)
    n = len(trials)
    wrong = Estimate(sum(t[0] for t in trials), n)
    agree = Estimate(sum(t[1] for t in trials), n)
    rho = float(params.get("rho", 0.2))
    A = bias_base(params)
    row = Row(str(params.get("experiment_id", f"reduce-bias-{seed}")), "reduce-bias", d=int(params.get("d", 2)),
              alpha=float(params.get("alpha", 0.1)), rho=rho, n_trials=n, seed=seed,
              samples_labeled=2 * n * A.sample_need(), samples_shared=0, est_exact_repl=agree.value)
    _ci(row, agree)
    row.checks["wrong_sign"] = wrong.value <= 0.03 + _three_se(wrong)
    row.checks["agree"] = agree.value >= 1 - 2 * rho - _three_se(agree)
    row.checks["wrong_rate"] = wrong.value
    return row


def amplify_base(params: dict) -> BasicPointwise:
    d = int(params.get("d", 8))
    rho, gamma = float(params.get("rho", 0.2)), float(params.get("gamma", 0.2))
    return BasicPointwise(ERMFinite(d=d), alpha=float(params.get("base_alpha", 0.2)),
                          beta=float(params.get("base_beta", 0.2)), rho=rho * gamma)


def _amplify_job(payload, t):
    params, seed = payload
    d, alpha, rho = int(params.get("d", 8)), float(params.get("alpha", 0.2)), float(params.get("rho", 0.2))
    A0 = amplify_base(params)
    root = SharedRandomness(seed)
    p = root.substream("task", t).uniform(-alpha, alpha)
    r = root.substream("r", t)
    a = apx_repl_hardness_amplification(A0, d, alpha, rho, p, r, root.substream("data", t, 1))
    b = apx_repl_hardness_amplification(A0, d, alpha, rho, p, r, root.substream("data", t, 2))
    truth = 1 if p >= 0 else -1
    return (a.answer == b.answer, a.err > 100 * alpha, a.answer != truth)


def run_reduce_amplify(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    trials = map_trials(_amplify_job, (params, seed), n_trials, workers)
    n = len(trials)
    agree = Estimate(sum(t[0] for t in trials), n)
    err = Estimate(sum(t[1] for t in trials), n)
    rho, gamma = float(params.get("rho", 0.2)), float(params.get("gamma", 0.2))
    A0 = amplify_base(params)
    row = Row(str(params.get("experiment_id", f"reduce-amplify-{seed}")), "reduce-amplify",
              d=int(params.get("d", 8)), alpha=float(params.get("alpha", 0.2)), rho=rho, gamma=gamma, n_trials=n,
              seed=seed, samples_labeled=2 * n * A0.sample_need(), samples_shared=0, est_exact_repl=agree.value)
    _ci(row, agree)
    row.checks["agree"] = agree.value >= 1 - (2 * rho + gamma) - _three_se(agree)
    row.checks["error"] = err.value <= 0.1 + _three_se(err)
    row.checks["error_count"] = err.successes
    row.checks["wrong_sign_rate"] = sum(t[2] for t in trials) / n
    return row


def sign_learner(params: dict) -> SemiReplicableLearner:
    return SemiReplicableLearner("finite", d=int(params.get("d", 6)), alpha=float(params.get("alpha", 0.2)),
                                 beta=float(params.get("beta", 0.05)), rho=float(params.get("rho", 0.2)))


def _sign_job(payload, t):
    params, seed = payload
    A = sign_learner(params)
    root = SharedRandomness(seed)
    p = root.substream("task", t).generator().uniform(-1.0, 1.0, size=A.d)
    r = root.substream("r", t)
    a = sign_one_way_from_learner(A, p, r, root.substream("data", t, 1))
    b = sign_one_way_from_learner(A, p, r, root.substream("data", t, 2))
    if a.discarded or b.discarded:
        return None
    return (bool(np.array_equal(a.v, b.v)), a.error, b.error)


def run_sign_oneway(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    trials = map_trials(_sign_job, (params, seed), n_trials, workers)
    kept = [t for t in trials if t is not None]
    n = len(kept)
    A = sign_learner(params)
    eq = Estimate(sum(t[0] for t in kept), n)
    good = Estimate(sum(t[1] <= 2 * A.alpha for t in kept), n)
    errs = np.array([e for t in kept for e in t[1:]]) / 2.0
    row = Row(str(params.get("experiment_id", f"sign-oneway-{seed}")), "sign-oneway", d=A.d, alpha=A.alpha,
              beta=A.beta, rho=A.rho, n_trials=n, seed=seed, samples_labeled=2 * n * A.sample_need(),
              samples_shared=n * A.m_u, est_exact_repl=eq.value,
              excess_err_p90=float(np.quantile(errs, 0.9, method="inverted_cdf")))
    _ci(row, eq)
    row.checks["exact"] = eq.value >= 1 - A.rho - _three_se(eq)
    row.checks["error"] = good.value >= 0.95
    row.checks["discarded"] = len(trials) - n
    return row


# correlated sampling


def collision_pair(n: int, tv: float, gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random P, Q on [n] at total variation exactly ``tv``."""
    while True:
        P = gen.dirichlet(np.ones(n))
        i, j = gen.choice(n, size=2, replace=False)
        if P[j] >= tv:
            Q = P.copy()
            Q[i] += tv
            Q[j] -= tv
            return P, Q


def run_collision(params: dict, seed: int, n_trials: int, workers: int = 1) -> Row:
    n, tv = int(params.get("n", 8)), float(params.get("tv", 0.1))
    root = SharedRandomness(seed)
    P, Q = collision_pair(n, tv, root.substream("weights").generator())
    streams = [root.substream("r", t) for t in range(n_trials)]
    a = correlated_sample_batch(P, streams)
    b = correlated_sample_batch(Q, streams)
    dis = Estimate(int(np.sum(a != b)), n_trials)
    row = Row(str(params.get("experiment_id", f"collision-{seed}")), "collision", d=n, n_trials=n_trials, seed=seed,
              samples_labeled=0, samples_shared=0, est_exact_repl=1 - dis.value)
    _ci(row, Estimate(n_trials - dis.successes, n_trials))
    row.checks["collision"] = dis.value <= 2 * tv + _three_se(dis)
    return row


EXPERIMENTS: dict[str, Callable[..., Row]] = {
    "pointwise": run_pointwise,
    "approx": run_approx,
    "threshold": run_threshold,
    "realizable": run_realizable,
    "semi": run_semi,
    "select": run_select,
    "reduce-bias": run_reduce_bias,
    "reduce-amplify": run_reduce_amplify,
    "sign-oneway": run_sign_oneway,
}

CONFIG_BUILDERS: dict[str, Callable[..., PairedTrialConfig]] = {
    "pointwise": pointwise_config,
    "approx": approx_config,
    "threshold": threshold_config,
    "realizable": realizable_config,
    "semi": semi_config,
}


def run_grid_rows(sub: str, params: dict, axes: dict, seed: int, n_trials: int, workers: int = 1) -> list[Row]:
    """One row per cell of the Cartesian product of ``axes`` over experiment ``sub``."""
    if sub not in EXPERIMENTS:
        raise ValueError(f"grid cannot sweep {sub!r}")
    if not axes or any(len(v) == 0 for v in axes.values()):
        raise ValueError("grid axes must be nonempty")
    rows = []
    names = list(axes)
    from itertools import product

    from .harness import cell_seed

    for i, combo in enumerate(product(*(axes[k] for k in names))):
        cell = dict(params)
        cell.update(zip(names, combo))
        cell.setdefault("experiment_id", f"grid-{seed}")
        cell["experiment_id"] = f"{cell['experiment_id']}-cell{i}"
        row = EXPERIMENTS[sub](cell, cell_seed(seed, i), n_trials, workers)
        rows.append(row)
    return rows


def selftest_rows(seed: int, workers: int = 1, quick: bool = False) -> list[Row]:
    """Small, fast versions of the headline checks."""
    n = MIN_TRIALS if quick else 4 * MIN_TRIALS
    plans = [
        ("pointwise", {"experiment_id": "selftest-pointwise", "base_m": 15}),
        ("pointwise", {"experiment_id": "selftest-boosted", "boost": 1, "base_m": 15, "alpha": 0.6, "beta": 0.1}),
        ("select", {"experiment_id": "selftest-select"}),
        ("threshold", {"experiment_id": "selftest-threshold"}),
        ("realizable", {"experiment_id": "selftest-realizable", "noise": 0.0}),
    ]
    rows = []
    for i, (sub, params) in enumerate(plans):
        rows.append(EXPERIMENTS[sub](params, SharedRandomness(seed).substream("selftest", i).key[0], n, workers))
    rows.append(run_collision({"experiment_id": "selftest-collision", "tv": 0.1},
                              SharedRandomness(seed).substream("selftest", len(plans)).key[0], 10 * n))
    return rows


def passed(row: Row) -> bool:
    return all(v for v in row.checks.values() if isinstance(v, bool))
