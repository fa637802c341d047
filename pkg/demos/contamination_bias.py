"""Population-level bias of the estimators as contamination grows.

Instead of simulating, this demo fits directly on the *exact* response
probabilities of a contaminated process: a latent normal pair with
correlation 0.5 mixed with a tight cluster at (2, -2) that lands in cells
a positively correlated pair almost never produces.  There is no Monte
Carlo noise, so the curves below are the estimands themselves.

The ML estimand collapses and even changes sign before the contaminated
fraction reaches 0.15; lowering the tuning constant c flattens the bias
curve toward zero.

Run:  python demos/contamination_bias.py
"""

import math

import numpy as np

from polychoric import DiscrepancyConfig, FitOptions, fit_frequencies, mixture_cell_probs
from polychoric.datasets import pair_design_thresholds
from polychoric.simulation import BivariateNormalComponent, MixtureSpec

RHO_TRUE = 0.5
EPSILONS = (0.0, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.2, 0.25)
TUNINGS = (0.2, 0.6, 1.5, math.inf)

thresholds = pair_design_thresholds()
opts = FitOptions(simplex_tolerance=1e-9)

print("population estimand of the latent correlation (truth = 0.5)")
header = "epsilon | " + " | ".join(
    f"c = {c:>4}" if math.isfinite(c) else "c = inf (ML)" for c in TUNINGS
)
print(header)
print("-" * len(header))

for eps in EPSILONS:
    spec = MixtureSpec(
        epsilon=eps,
        rho_star=RHO_TRUE,
        thresholds_x=thresholds,
        thresholds_y=thresholds,
        misspecifying=BivariateNormalComponent() if eps > 0 else None,
    )
    grid = mixture_cell_probs(spec)
    row = []
    for c in TUNINGS:
        estimand = fit_frequencies(grid, DiscrepancyConfig(c=c), opts).rho
        row.append(f"{estimand:+.3f}")
    print(f"  {eps:5.3f} | " + " | ".join(f"{v:>12}" if not math.isfinite(c) else f"{v:>8}"
                                          for v, c in zip(row, TUNINGS)))

print()
print("Reading the table: at epsilon = 0 every tuning is exact (no cost to")
print("robustness under a correct model).  As contamination grows, ML bends")
print("away first and hardest; c = 0.2 barely moves even at 25% contamination.")
print()
print("The abrupt sign flips of the middle tunings at high contamination are")
print("a real feature, not noise: past a c-dependent breakdown fraction the")
print("loss grows a second, deeper valley that fits the contamination cluster")
print("instead of the majority, and the fit jumps basins.  Smaller c pushes")
print("that breakdown point further out.")
