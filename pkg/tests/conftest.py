"""Shared fixtures: synthetic data builders and session-scoped simulations.

The Monte Carlo simulations are expensive enough to run once; both the
module tests and the acceptance suite assert against the same results.
Seed constants are fixed so reruns are bit-identical.
"""

import math

import numpy as np
import pytest

import scalefit as sf

AR32 = tuple(sf.scale_ladder(32, range(1, 9)))
TARGET = sf.ScaleSpec.from_dims(12, 768)  # 84_934_656 params, ~13.5x the 8-layer scale
TRUE_ALPHA = 0.08
TRUE_LOG_C = math.log(20)


def ar32_synth(
    seed,
    sigma_pre=0.0,
    sigma_fin=0.01,
    seeds_per_scale=5,
    direction="minimize",
    alpha=TRUE_ALPHA,
    log_c=TRUE_LOG_C,
    scales=AR32,
    **kwargs,
):
    spec = sf.SynthSpec(
        true_alpha=alpha,
        true_log_c=log_c,
        scales=tuple(scales),
        seeds_per_scale=seeds_per_scale,
        sigma_pre=sigma_pre,
        sigma_fin=sigma_fin,
        rng_seed=seed,
        direction=direction,
        **kwargs,
    )
    return sf.generate(spec)


@pytest.fixture(scope="session")
def sim_noisy_recovery():
    """200 fits on noisy AR-32 data; fraction recovering alpha and R^2."""
    trials = 200
    ok = 0
    for t in range(trials):
        runset, _ = ar32_synth(60_000 + t)
        fit = sf.fit_line(runset.points())
        ok += (abs(fit.alpha - TRUE_ALPHA) <= 0.05 * TRUE_ALPHA) and (fit.r_squared >= 0.97)
    return {"trials": trials, "pass_rate": ok / trials}


@pytest.fixture(scope="session")
def sim_slope_coverage():
    """Hierarchical B=500 slope-CI coverage of the true slope, 200 trials."""
    trials = 200
    hits = 0
    for t in range(trials):
        runset, _ = ar32_synth(40_000 + t)
        cfg = sf.BootstrapConfig(n_replicates=500, rng_seed=50_000 + t)
        lo, hi = sf.hierarchical_bootstrap(runset, cfg).slope_ci
        hits += lo <= TRUE_ALPHA <= hi
    return {"trials": trials, "coverage": hits / trials}


def _paired_widths(sigma_pre, n_trials=100, n_replicates=400):
    widths_h = []
    widths_n = []
    for t in range(n_trials):
        runset, _ = ar32_synth(10_000 + t, sigma_pre=sigma_pre)
        h = sf.hierarchical_bootstrap(
            runset, sf.BootstrapConfig(n_replicates=n_replicates, rng_seed=20_000 + t)
        )
        n = sf.naive_bootstrap(
            runset,
            sf.BootstrapConfig(n_replicates=n_replicates, rng_seed=30_000 + t, mode="naive"),
        )
        widths_h.append(h.slope_ci[1] - h.slope_ci[0])
        widths_n.append(n.slope_ci[1] - n.slope_ci[0])
    return {
        "median_hierarchical": float(np.median(widths_h)),
        "median_naive": float(np.median(widths_n)),
        "trials": n_trials,
    }


@pytest.fixture(scope="session")
def sim_width_conservatism():
    """Paired slope-CI widths when between-scale noise dominates (3x)."""
    return _paired_widths(sigma_pre=0.03)


@pytest.fixture(scope="session")
def sim_width_equal_noise():
    """Paired slope-CI widths with no between-scale noise at all."""
    return _paired_widths(sigma_pre=0.0)


@pytest.fixture(scope="session")
def sim_holdout():
    """1-6 -> 7-8 layer holdout MRE over 100 noisy trials."""
    trials = 100
    ok = 0
    worst = 0.0
    for t in range(trials):
        runset, _ = ar32_synth(70_000 + t)
        report = sf.holdout_eval(runset, (1, 6), (7, 8))
        worst = max(worst, report.mre)
        ok += report.mre <= 0.025
    return {"trials": trials, "pass_rate": ok / trials, "worst_mre": worst}


@pytest.fixture(scope="session")
def sim_extrapolation_coverage():
    """Band at the ~13.5x target covers the true law value, 100 trials."""
    trials = 100
    hits = 0
    for t in range(trials):
        runset, truth = ar32_synth(80_000 + t)
        cfg = sf.BootstrapConfig(n_replicates=400, rng_seed=90_000 + t)
        report = sf.extrapolate(runset, TARGET, cfg)
        lo, hi = report.targets[0].band
        hits += lo <= truth.value_at(TARGET.params) <= hi
    return {"trials": trials, "coverage": hits / trials}


@pytest.fixture(scope="session")
def sim_selection():
    """Two parallel-law families, true gap +1.5 at the target, 100 trials."""
    trials = 100
    actual_a, actual_b = 85.0, 86.5
    log_c_a = math.log(actual_a) - TRUE_ALPHA * math.log(TARGET.params)
    log_c_b = math.log(actual_b) - TRUE_ALPHA * math.log(TARGET.params)
    both_gates = 0
    gates_and_sign = 0
    for t in range(trials):
        runset_a, _ = ar32_synth(
            100_000 + t, direction="maximize", log_c=log_c_a, family="fam_a"
        )
        runset_b, _ = ar32_synth(
            200_000 + t, direction="maximize", log_c=log_c_b, family="fam_b"
        )
        cfg = sf.BootstrapConfig(n_replicates=100, rng_seed=300_000 + t)
        sel = sf.select_model(
            runset_a, runset_b, TARGET, cfg, actual_a=actual_a, actual_b=actual_b
        )
        both_gates += sel.reliable
        gates_and_sign += sel.reliable and sel.sign_agreement
    return {
        "trials": trials,
        "both_gates": both_gates,
        "gates_and_sign": gates_and_sign,
        "true_gap": actual_b - actual_a,
    }


@pytest.fixture(scope="session")
def sim_undertrained():
    """A +10% loss inflation at the held-out scale gets flagged, 100 trials."""
    trials = 100
    flagged = 0
    for t in range(trials):
        runset, truth = ar32_synth(400_000 + t)
        observed = truth.value_at(TARGET.params) * 1.10
        cfg = sf.BootstrapConfig(n_replicates=200, rng_seed=500_000 + t)
        verdict = sf.flag_undertrained(runset, TARGET, observed, cfg)
        flagged += verdict.flag == "suspect_undertrained"
    return {"trials": trials, "flag_rate": flagged / trials}
