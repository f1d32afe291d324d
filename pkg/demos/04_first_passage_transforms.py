"""First drawdown episodes against the Laplace transforms.

Each episode runs until the drawdown from the running maximum reaches c.
Its duration T_D, the maximum Z_D and the best truncated rise Z_{D-c}
enter the two joint transforms; we compare sample means of exp(a Y - b T_D)
with the closed forms.

    python demos/04_first_passage_transforms.py
"""

import math

from truncvar import analytics as an
from truncvar.montecarlo import ExperimentConfig, verify_laplace

c = 0.3
print(f"E exp(-T_D) at mu = 0 is 1/cosh(c sqrt 2) = {1 / math.cosh(c * math.sqrt(2)):.6f}")
print(f"closed form gives                       {an.laplace_tv_joint(0.0, 1.0, c, 0.0):.6f}\n")

for mu in (0.0, 0.5):
    cfg = ExperimentConfig.from_dict(dict(experiment="LAPLACE_CHECK", c=c, mu=mu, step_dt=c * c / 100, replicates=50_000))
    rep = verify_laplace(cfg)
    print(f"mu = {mu}: {cfg.replicates} episodes, E Z_D {rep.check('mean_Z_D').value:.4f} "
          f"(target {an.mean_Z_D(c, mu):.4f}), E T_D {rep.check('mean_T_D').value:.4f} (target {an.mean_T_D(c, mu):.4f})")
    for label in ("laplace_tv", "laplace_utv"):
        for row in rep.extra[label]:
            a, b = row["arg"]
            print(f"    {label:11s} ({a:+.1f}, {b:4.1f})  est {row['estimate']:.5f}  target {row['target']:.5f}  z {row['z']:+.2f}")
    print(f"    Z_D exponential KS p = {rep.check('z_d_exponential_ks').value:.3f}\n")
