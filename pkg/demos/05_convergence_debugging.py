"""Debug convergence: patience on loss curves and law-based outlier flags.

Early stopping hides a trap: a curve can plateau for a long stretch and
then keep improving, so small patience declares convergence too early.
Replaying a logged curve under several policies makes that visible.  The
fitted law gives a second, independent check: a run whose converged loss
sits above the band predicted from the other scales is suspect.
"""

import math
from pathlib import Path

import scalefit as sf

out_dir = Path("demo_out")
out_dir.mkdir(exist_ok=True)

# --- a plateau-then-drop evaluation curve, saved in the two-column format
steps = [500 * i for i in range(12)]
losses = [4.0, 3.0, 2.51, 2.50, 2.50, 2.50, 2.50, 2.49, 2.10, 1.80, 1.72, 1.70]
curve_path = out_dir / "curve.csv"
curve_path.write_text(
    "step,eval_loss\n" + "".join(f"{s},{v}\n" for s, v in zip(steps, losses)),
    encoding="utf-8",
)
curve = sf.load_loss_curve(curve_path)

rows = sf.compare_policies(curve, [sf.EarlyStopPolicy(patience=p) for p in (2, 4, 8)])
print("patience sweep over the logged curve:")
for row in rows:
    where = f"stopped at eval {row.stop_index}" if row.stopped else "ran to the end"
    print(f"  patience={row.policy.patience}: {where}, best loss {row.loss_at_best}")
print("small patience quits on the plateau; larger patience finds the lower basin\n")

# --- flag a suspiciously high loss against the law of the other scales
scales = tuple(sf.scale_ladder(32, range(1, 9)))
spec = sf.SynthSpec(
    true_alpha=-0.05,  # losses fall with scale
    true_log_c=math.log(8),
    scales=scales,
    seeds_per_scale=5,
    sigma_fin=0.01,
    rng_seed=41,
    metric="loss",
)
runset, truth = sf.generate(spec)
big = sf.ScaleSpec.from_dims(12, 768)
cfg = sf.BootstrapConfig(n_replicates=1000, rng_seed=42)

for inflation, label in ((1.0, "converged run"), (1.10, "under-trained run (+10% loss)")):
    observed = truth.value_at(big.params) * inflation
    verdict = sf.flag_undertrained(runset, big, observed, cfg)
    lo, hi = verdict.band
    print(f"{label}: observed={observed:.4f} predicted={verdict.predicted:.4f} "
          f"band=[{lo:.4f}, {hi:.4f}] -> {verdict.flag}")
