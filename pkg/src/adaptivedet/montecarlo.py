"""Seeded, reproducible Monte Carlo trial engine.

Per-trial randomness derives from ``(master_seed, trial_index)`` through a
counter-based stream split (one Philox counter block range per trial), so
results are a pure function of the plan and are independent of batch size,
worker count, and execution order.  Aggregation is count-based.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import batcheval, scenario
from .errors import InfeasibleError
from .linalg import herm_sqrt
from .scenario import CovarianceModel, ScenarioConfig

WILSON_Z99 = 2.5758293035489004  # two-sided 99% normal quantile
DEFAULT_BATCH = 4096


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """The stream of one trial: Philox keyed by the master seed, with the
    counter advanced ``2**64`` blocks per trial index."""
    return np.random.Generator(
        np.random.Philox(key=master_seed, counter=int(trial_index) << 64))


@dataclass(frozen=True)
class Geometry:
    """Steering geometry shared by all trials of a plan."""

    H: np.ndarray
    J: np.ndarray
    s: np.ndarray

    @classmethod
    def default(cls, config: ScenarioConfig) -> "Geometry":
        H, J = scenario.default_geometry(config.N, config.p, config.q)
        return cls(H=H, J=J, s=H[:, 0])


@dataclass(frozen=True)
class TrialPlan:
    """Everything needed to reproduce a batch of trials."""

    n_trials: int
    master_seed: int
    scenario: ScenarioConfig
    covariance: CovarianceModel
    detectors: tuple
    hypothesis: str = "h0"
    geometry: Geometry = None
    signal_mean: np.ndarray = None
    interference_mean: np.ndarray = None
    batch_size: int = DEFAULT_BATCH

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("need at least one trial")
        if self.hypothesis not in ("h0", "h1"):
            raise ValueError("hypothesis must be 'h0' or 'h1'")
        if self.geometry is None:
            object.__setattr__(self, "geometry", Geometry.default(self.scenario))
        unknown = set(self.detectors) - batcheval.ALL_DETECTORS
        if unknown:
            raise ValueError(f"unknown detectors: {sorted(unknown)}")

    def under(self, hypothesis: str) -> "TrialPlan":
        return replace(self, hypothesis=hypothesis)

    def with_covariance(self, covariance: CovarianceModel) -> "TrialPlan":
        return replace(self, covariance=covariance)


@dataclass(frozen=True)
class PdEstimate:
    """Binomial proportion with its Wilson 99% confidence interval."""

    pd: float
    ci_low: float
    ci_high: float
    n: int


def wilson_interval(successes: int, n: int, z: float = WILSON_Z99):
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("need at least one trial")
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = z * np.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def run_trials(plan: TrialPlan) -> dict:
    """Evaluate the plan's detector statistics for every trial.

    Returns a dict mapping detector name to an ``(n_trials,)`` array ordered
    by trial index.
    """
    cfg = plan.scenario
    wanted = set(plan.detectors)
    point_names = wanted & batcheval.POINT_FAMILY
    dist_names = wanted & batcheval.DISTRIBUTED_FAMILY
    if point_names and cfg.K != 1:
        raise ValueError("point-target detectors need K = 1")

    R = scenario.build_covariance(plan.covariance, cfg.N)
    A = herm_sqrt(R)
    scale = cfg.test_scale
    mean = np.zeros((cfg.N, cfg.K), dtype=np.complex128)
    if plan.hypothesis == "h1":
        for contrib in (plan.signal_mean, plan.interference_mean):
            if contrib is None:
                continue
            contrib = np.asarray(contrib, dtype=np.complex128)
            mean = mean + (contrib[:, None] if contrib.ndim == 1 else contrib)

    out = {name: np.empty(plan.n_trials) for name in wanted}
    n_flat = 2 * cfg.N * (cfg.L + cfg.K)
    for start in range(0, plan.n_trials, plan.batch_size):
        stop = min(start + plan.batch_size, plan.n_trials)
        B = stop - start
        flat = np.empty((B, n_flat))
        for i in range(B):
            trial_rng(plan.master_seed, start + i).standard_normal(out=flat[i])
        w_train, w_test = scenario.assemble_noise(flat, cfg.N, cfg.L, cfg.K)
        training = A @ w_train
        test = scale * (A @ w_test) + mean
        S = training @ np.conj(np.swapaxes(training, -2, -1))
        geom = plan.geometry
        if point_names:
            stats = batcheval.point_family_stats(
                test[:, :, 0], S, geom.H, geom.J, geom.s, R=R)
            for name in point_names:
                out[name][start:stop] = stats[name]
        if dist_names:
            stats = batcheval.distributed_family_stats(
                test, S, geom.s, geom.H, cfg.L)
            for name in dist_names:
                out[name][start:stop] = stats[name]
    return out


def calibrate_threshold(plan: TrialPlan, detector: str, stats=None) -> float:
    """Threshold at the plan's nominal false-alarm rate: the ``ceil(n * pfa)``-th
    largest H0 statistic (decisions downstream use strict ``>``).

    Calibration plans should carry ``n_trials >= 100 / pfa`` so the order
    statistic is stable; fewer than ``1 / pfa`` trials is an error.
    """
    pfa = plan.scenario.pfa
    m = int(np.ceil(plan.n_trials * pfa))
    if plan.n_trials * pfa < 1.0:
        raise InfeasibleError(
            "too few trials to place the false-alarm order statistic")
    if plan.hypothesis != "h0":
        raise ValueError("calibration plans must run under h0")
    if stats is None:
        stats = run_trials(plan)[detector]
    return float(np.partition(stats, len(stats) - m)[len(stats) - m])


def estimate_pd(plan: TrialPlan, detector: str, threshold: float,
                stats=None) -> PdEstimate:
    """Exceedance fraction of the detector over the plan's trials."""
    if stats is None:
        stats = run_trials(plan)[detector]
    k = int(np.sum(stats > threshold))
    lo, hi = wilson_interval(k, len(stats))
    return PdEstimate(pd=k / len(stats), ci_low=lo, ci_high=hi, n=len(stats))


@dataclass(frozen=True)
class CfarRow:
    covariance: str
    pfa_hat: float
    ci_low: float
    ci_high: float
    n: int


@dataclass(frozen=True)
class CfarReport:
    detector: str
    threshold: float
    rows: tuple
    passed: bool


def cfar_sweep(detector: str, config: ScenarioConfig, covariances, threshold: float,
               n_trials: int, master_seed: int = 0, geometry: Geometry = None,
               batch_size: int = DEFAULT_BATCH) -> CfarReport:
    """Empirical false-alarm rates of one detector across covariance models.

    The detector passes when every covariance's empirical rate lies inside
    the Wilson 99% interval of the first covariance's rate.  All runs share
    per-trial streams (common random numbers), so a CFAR detector's rates
    co-move and the comparison is sharp.
    """
    rows = []
    passed = True
    first_interval = None
    for cov in covariances:
        plan = TrialPlan(
            n_trials=n_trials, master_seed=master_seed, scenario=config,
            covariance=cov, detectors=(detector,), hypothesis="h0",
            geometry=geometry, batch_size=batch_size)
        est = estimate_pd(plan, detector, threshold)
        rows.append(CfarRow(covariance=cov.label(), pfa_hat=est.pd,
                            ci_low=est.ci_low, ci_high=est.ci_high, n=est.n))
        if first_interval is None:
            first_interval = (est.ci_low, est.ci_high)
        elif not first_interval[0] <= est.pd <= first_interval[1]:
            passed = False
    return CfarReport(detector=detector, threshold=threshold,
                      rows=tuple(rows), passed=passed)


def roc_invariance_check(detector: str, g, plan: TrialPlan,
                         threshold: float = None) -> bool:
    """Decision-set equality under a strictly increasing statistic transform.

    Verifies that thresholding ``g(statistic)`` at ``g(threshold)`` reproduces
    exactly the decisions of thresholding the statistic itself on every trial.
    A sampled derivative-sign test rejects non-monotone maps up front.
    """
    stats = run_trials(plan)[detector]
    if threshold is None:
        threshold = calibrate_threshold(plan.under("h0"), detector, stats=stats)
    probe = np.unique(np.concatenate([stats, [threshold]]))
    gp = np.asarray([g(t) for t in probe], dtype=float)
    if np.any(np.diff(gp) <= 0):
        raise ValueError("transform is not strictly increasing on the statistic range")
    base = stats > threshold
    mapped = np.asarray([g(t) for t in stats], dtype=float) > g(threshold)
    return bool(np.all(base == mapped))
