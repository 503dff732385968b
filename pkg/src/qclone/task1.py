"""M branch computations sharing one run of a common prefix U0.

Scores are average fidelities of the M output guesses against
``U_j U0 |0>``.  Strategy 1 computes N branches exactly and guesses the rest
at random; strategy 2 estimates ``U0|0>`` from N copies and re-prepares; the
cloning strategy feeds universal N -> M clones into the branches.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ucm
from .qcore import RandomSource, StateVector, fidelity, haar_unitary

CHANNEL_TOL = 1e-10


@dataclass(frozen=True)
class Example1Params:
    M: int = 2
    d: int = 2
    N: int = 1
    samples: int = 10**4
    seed: int = 0

    def __post_init__(self):
        if self.M < 2 or self.d < 2:
            raise ValueError("need M >= 2 and d >= 2")
        if not 1 <= self.N < self.M:
            raise ValueError(f"need 1 <= N < M, got N={self.N}, M={self.M}")
        if self.samples < 1:
            raise ValueError("samples must be positive")

    @property
    def spec(self) -> ucm.UniversalCloneSpec:
        return ucm.UniversalCloneSpec(self.N, self.M, self.d)


def score_strategy1(params: Example1Params) -> float:
    M, d, N = params.M, params.d, params.N
    return (N + (M - N) / d) / M


def score_strategy2(params: Example1Params) -> float:
    return ucm.measurement_clone_bound(params.N, params.d)


def score_cloning(params: Example1Params) -> float:
    return ucm.clone_fidelity(params.spec)


def best_no_cloning(params: Example1Params) -> float:
    return max(score_strategy1(params), score_strategy2(params))


def advantage_gaps(M: int, d: int) -> tuple[float, float]:
    """Closed-form margins of cloning over strategies 1 and 2 (single run of U0)."""
    gap1 = (M - 1) * (d - 1) / (M * d * (d + 1))
    gap2 = (d - 1) / (M * (d + 1))
    return gap1, gap2


@dataclass
class Example1Report:
    params: Example1Params
    f1_bar: float
    f2_bar: float
    f_cloning: float
    gap1: float
    gap2: float
    empirical: dict = field(default_factory=dict)

    def analytic(self) -> dict:
        return {
            "f1_bar": self.f1_bar,
            "f2_bar": self.f2_bar,
            "f_cloning": self.f_cloning,
            "best_no_cloning": max(self.f1_bar, self.f2_bar),
            "gap1": self.gap1,
            "gap2": self.gap2,
        }


def _mc_shard(args) -> dict:
    M, d, seed, shard, n = args
    rng = RandomSource(seed, shard)
    spec = ucm.UniversalCloneSpec(1, M, d)
    target_f = ucm.clone_fidelity(spec)
    ref = StateVector.basis(d, 0)
    clone_sum = clone_sq = guess_sum = guess_sq = f1_sum = 0.0
    max_dev = 0.0
    for _ in range(n):
        u0 = haar_unitary(d, rng)
        branches = [haar_unitary(d, rng) for _ in range(M)]
        psi = u0.apply(ref)
        joint = ucm.werner_clone_channel(psi, spec)
        clones = ucm.reduced_clones(joint, d, M)
        fids = [fidelity(u.apply(psi), u.conjugate(rho)) for u, rho in zip(branches, clones)]
        score = sum(fids) / M
        max_dev = max(max_dev, abs(score - target_f))
        clone_sum += score
        clone_sq += score * score
        # random guess for each branch beyond the first, which strategy 1 gets exactly
        guesses = [abs(haar_unitary(d, rng).apply(ref).inner(u.apply(psi))) ** 2 for u in branches[1:]]
        guess_sum += sum(guesses)
        guess_sq += sum(g * g for g in guesses)
        f1_sum += (1.0 + sum(guesses)) / M
    return {
        "n": n,
        "n_guess": n * (M - 1),
        "clone_sum": clone_sum,
        "clone_sq": clone_sq,
        "guess_sum": guess_sum,
        "guess_sq": guess_sq,
        "f1_sum": f1_sum,
        "max_dev": max_dev,
    }


def _mean_stderr(total: float, sq: float, n: int) -> tuple[float, float]:
    mean = total / n
    if n < 2:
        return mean, 0.0
    var = max(sq / n - mean * mean, 0.0) * n / (n - 1)
    return mean, float(np.sqrt(var / n))


def run_example1_mc(params: Example1Params, jobs: int = 1) -> dict:
    """Push Haar-random instances through the explicit cloning channel.

    Uses the joint symmetric-projection cloner (single run of U0, N = 1).
    Samples are split into ``jobs`` shards, shard ``s`` drawing from
    ``RandomSource(seed, s)``; results depend only on (seed, jobs).
    """
    M, d = params.M, params.d
    if d**M > ucm.MAX_JOINT_DIM:
        raise ValueError(f"d**M = {d**M} exceeds the channel size limit")
    if jobs < 1:
        raise ValueError("jobs must be positive")
    base, extra = divmod(params.samples, jobs)
    tasks = [(M, d, params.seed, s, base + (s < extra)) for s in range(jobs)]
    if jobs == 1:
        parts = [_mc_shard(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_mc_shard, tasks))
    tot = {k: sum(p[k] for p in parts) for k in parts[0] if k != "max_dev"}
    mc, mc_se = _mean_stderr(tot["clone_sum"], tot["clone_sq"], tot["n"])
    rg, rg_se = _mean_stderr(tot["guess_sum"], tot["guess_sq"], tot["n_guess"])
    max_dev = max(p["max_dev"] for p in parts)
    if max_dev > CHANNEL_TOL:
        raise ArithmeticError(f"channel clone score deviates from the closed form by {max_dev:.3e}")
    return {
        "mc_estimate": mc,
        "mc_stderr": mc_se,
        "mc_max_deviation": max_dev,
        "random_guess": rg,
        "random_guess_stderr": rg_se,
        "mc_f1_estimate": tot["f1_sum"] / tot["n"],
    }


def run_example1(params: Example1Params, monte_carlo: bool = True, jobs: int = 1) -> Example1Report:
    gap1, gap2 = advantage_gaps(params.M, params.d) if params.N == 1 else (
        score_cloning(params) - score_strategy1(params),
        score_cloning(params) - score_strategy2(params),
    )
    report = Example1Report(
        params,
        f1_bar=score_strategy1(params),
        f2_bar=score_strategy2(params),
        f_cloning=score_cloning(params),
        gap1=gap1,
        gap2=gap2,
    )
    if monte_carlo and params.N == 1:
        report.empirical = run_example1_mc(params, jobs)
    return report
