"""Measure predictive power: depth holdout and a 13.5x extrapolation.

First the classic protocol: fit on the 1-6 layer scales and predict the
7-8 layer scales, scoring with mean relative error (MRE).  Then extrapolate
the full 1-8 layer fit to a 12-layer, 768-wide target (13.5x the largest
training scale) and check the signed relative error (RE): negative RE means
the extrapolation was over-optimistic.
"""

import math

import scalefit as sf

scales = tuple(sf.scale_ladder(32, range(1, 9)))
spec = sf.SynthSpec(
    true_alpha=0.08,
    true_log_c=math.log(20),
    scales=scales,
    seeds_per_scale=5,
    sigma_fin=0.01,
    rng_seed=23,
    metric="loss",
)
runset, truth = sf.generate(spec)

# --- holdout: train shallow, test deep
report = sf.holdout_eval(runset, train_filter=(1, 6), test_filter=(7, 8))
print("holdout 1-6 -> 7-8:")
for t in report.targets:
    print(f"  params={t.x:>12,.0f}  actual={t.actual:.4f}  predicted={t.predicted:.4f}  "
          f"re={t.relative_error:+.5f}")
print(f"  MRE = {report.mre:.5f}  ({report.mre:.2%})")

# --- extrapolate to a much larger configuration with a bootstrap band
target = sf.ScaleSpec.from_dims(12, 768)
print(f"\ntarget: L=12 H=768, params={target.params:,} "
      f"({target.params / scales[-1].params:.1f}x the largest training scale)")
actual_at_target = truth.value_at(target.params)
cfg = sf.BootstrapConfig(n_replicates=1000, rng_seed=24)
extra = sf.extrapolate(runset, target, cfg, actual=actual_at_target)
t = extra.targets[0]
lo, hi = t.band
print(f"predicted {t.predicted:.4f}, band [{lo:.4f}, {hi:.4f}], "
      f"true value {t.actual:.4f} (inside: {lo <= t.actual <= hi})")
print(f"RE = {t.relative_error:+.5f}  "
      f"({'over-optimistic' if t.relative_error < 0 else 'conservative'})")
