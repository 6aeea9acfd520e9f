"""Single source of truth for every leading constant the transforms use."""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class Constants:
    # agnostic ERM sample size C (d + ln 1/beta) / alpha^2
    agnostic: float = 8.0
    # blocks in the averaged predictor: T = ceil(c_T / rho^2)
    c_T: float = 4.0
    # confidence booster: K = ceil(k_boost ln 1/beta), test size c_test ln(2K/beta) / alpha^2
    k_boost: float = 7.0
    c_test: float = 32.0
    # hypothesis selection: m = c_sel ln(n/beta) / tau^2, robustness tau <= rho alpha / (c_rob ln(n/beta))
    c_sel: float = 64.0
    c_rob: float = 12.0
    # error booster over approximately replicable runs: D = ceil(d_runs ln 1/beta)
    d_runs: float = 200.0
    # stable-string tester sizes
    c1: float = 16.0
    c2: float = 16.0
    # cluster detection sizes
    c_cluster_n: float = 16.0
    c_cluster_m: float = 16.0
    # replicability booster: R = ceil(r_mult ln 1/rho), inner failure budget multiplier
    r_mult: float = 4.0
    beta1_mult: float = 0.1
    # quantile sample for the threshold learner: c_dkw ln(1/beta) / tau^2
    c_dkw: float = 16.0
    # OPT gate sample: c_realizable (d + ln 1/min(rho, beta)) / (rho^2 min(alpha, gamma))
    c_realizable: float = 16.0
    # shared unlabeled pool: c_pool (d + ln 2/beta) / alpha
    c_pool: float = 8.0
    # per-point cap in the sign-one-way simulation
    c_sign_cap: float = 8.0

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


CONSTANTS = Constants()
