"""Quantify fit uncertainty with the hierarchical bootstrap.

Per-run noise is not the whole story: when each scale was pretrained once,
the scale's whole group of finetuning runs shares that pretraining draw.
The hierarchical bootstrap resamples scales first and runs within scales
second, so its intervals widen when between-scale variance appears; the
naive bootstrap pools all points and only sees per-run variance.
"""

import math
from pathlib import Path

import scalefit as sf

out_dir = Path("demo_out")
out_dir.mkdir(exist_ok=True)

scales = tuple(sf.scale_ladder(32, range(1, 9)))


def slope_interval(sigma_pre, mode, seed):
    spec = sf.SynthSpec(
        true_alpha=0.08,
        true_log_c=math.log(20),
        scales=scales,
        seeds_per_scale=5,
        sigma_pre=sigma_pre,
        sigma_fin=0.01,
        rng_seed=seed,
        metric="loss",
    )
    runset, _ = sf.generate(spec)
    cfg = sf.BootstrapConfig(n_replicates=1000, mode=mode, rng_seed=seed + 1)
    band = sf.bootstrap_band(runset, cfg)
    return band, runset


print("slope intervals ([2.5, 97.5] percentiles of 1000 replicates)\n")
print(f"{'sigma_pre':>10} {'mode':>14} {'lo':>9} {'hi':>9} {'width':>9}")
for sigma_pre in (0.0, 0.03):
    for mode in ("naive", "hierarchical"):
        band, runset = slope_interval(sigma_pre, mode, seed=11)
        lo, hi = band.slope_ci
        print(f"{sigma_pre:>10} {mode:>14} {lo:>9.4f} {hi:>9.4f} {hi - lo:>9.4f}")

# --- the full band makes a confidence sleeve around the fitted line
band, runset = slope_interval(0.03, "hierarchical", seed=11)
fit = sf.fit_line(runset.points())
plot = sf.plot_runset(runset, fit=fit, band=band,
                      title="hierarchical bootstrap sleeve, sigma_pre=0.03")
svg_path = out_dir / "band.svg"
sf.write_plot(plot, svg_path)
print(f"\nsleeve plot written to {svg_path}")
print("note how the hierarchical interval inflates under between-scale noise;")
print("rerunning this script reproduces every number above bit for bit.")
