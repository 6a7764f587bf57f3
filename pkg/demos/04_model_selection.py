"""Pick between two method families without training the large model.

Two families (think: two pretraining objectives) are swept over the same
small scales.  Each gets its own law; extrapolating both to the large
target predicts which one wins there.  The comparison is only trusted when
both fits clear an R^2 gate, and with the actual large-scale values in
hand we can check whether the predicted gap has the right sign.
"""

import math

import scalefit as sf

scales = tuple(sf.scale_ladder(32, range(1, 9)))
target = sf.ScaleSpec.from_dims(12, 768)

# family B is genuinely better at the target by 1.5 metric points
actual_a, actual_b = 85.0, 86.5
log_c_a = math.log(actual_a) - 0.08 * math.log(target.params)
log_c_b = math.log(actual_b) - 0.08 * math.log(target.params)


def family(name, log_c, seed):
    spec = sf.SynthSpec(
        true_alpha=0.08,
        true_log_c=log_c,
        scales=scales,
        seeds_per_scale=5,
        sigma_fin=0.01,
        rng_seed=seed,
        direction="maximize",
        family=name,
        metric="f1",
    )
    return sf.generate(spec)[0]


runset_a = family("fam_a", log_c_a, seed=31)
runset_b = family("fam_b", log_c_b, seed=32)

cfg = sf.BootstrapConfig(n_replicates=500, rng_seed=33)
sel = sf.select_model(
    runset_a, runset_b, target, cfg, r2_threshold=0.95,
    actual_a=actual_a, actual_b=actual_b,
)

print(f"family {sel.family_a}: R^2={sel.fit_a.r_squared:.4f} gate={'PASS' if sel.gate_a else 'fail'}")
print(f"family {sel.family_b}: R^2={sel.fit_b.r_squared:.4f} gate={'PASS' if sel.gate_b else 'fail'}")
print(f"comparison reliable: {sel.reliable}")
print(f"\npredicted at target: {sel.family_a}={sel.predicted_a:.3f}  "
      f"{sel.family_b}={sel.predicted_b:.3f}")
print(f"predicted gap (b - a): {sel.predicted_gap:+.3f}")
print(f"actual gap (b - a):    {sel.actual_gap:+.3f}")
print(f"sign agreement: {sel.sign_agreement}")
winner = sel.family_b if sel.predicted_gap > 0 else sel.family_a
print(f"\n-> scale up {winner}, chosen without training the {target.params:,}-param model")
