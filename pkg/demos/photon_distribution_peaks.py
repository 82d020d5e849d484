"""Steady-state photon number distributions at two pump strengths.

At D = 1.7 (just past the intensity peak) the distribution is doubly
peaked: a remnant spike at n = 0 and a lasing peak near n = N.  This
bimodality is what drives the variance burst seen in the variance demo.
At D = 10 the field has settled into a single narrow, sub-Poissonian peak.
The lossless-flight reference at D = 1.7 puts its peak right at n = N and
carries almost no vacuum spike, showing how in-flight dissipation reshapes
the statistics.
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from microlaser import from_dimensionless, lossless_baseline, moments, solve
from microlaser.sweep import emit_distribution

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

fig, ax = plt.subplots(figsize=(7, 4.5))
for D, style in ((1.7, "-"), (10.0, "--")):
    p = from_dimensionless(100, 0.001, 0.1, D / 10.0)
    emit_distribution(p, OUT / f"distribution_D_{D}.csv")
    result = solve(p)
    probs = result.distribution.probabilities()
    support = probs > 1e-8
    ax.plot(np.flatnonzero(support), probs[support], style,
            label=f"D = {D} (<n> = {result.moments.mean_n:.1f}, "
                  f"v = {result.moments.variance_ratio_v:.2f})")
    print(f"D = {D}: {result.moments.classification}, "
          f"truncated at n_max = {result.distribution.n_max}")

p17 = from_dimensionless(100, 0.001, 0.1, 0.17)
ll = lossless_baseline(p17)
probs = ll.probabilities()
support = probs > 1e-8
ax.plot(np.flatnonzero(support), probs[support], ":",
        label=f"lossless flight, D = 1.7 (<n> = {moments(ll).mean_n:.1f})")

ax.set_xlabel("photon number n")
ax.set_ylabel("P(n)")
ax.set_xlim(0, 160)
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "photon_distributions.png", dpi=150)
print(f"wrote {OUT/'photon_distributions.png'}")
