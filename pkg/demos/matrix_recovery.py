"""Recovering a 5 x 5 latent correlation matrix from contaminated data.

A five-item questionnaire with a known latent correlation matrix (entries
0.20 to 0.56) is sampled with a fraction of respondents answering from
independent heavy-tailed Gumbel margins instead -- erratic responders whose
answers scatter over every category.  Each unique item pair is then fitted
separately and assembled into a matrix.

Run:  python demos/matrix_recovery.py
"""

import numpy as np

from polychoric import fit_matrix
from polychoric.datasets import matrix_design_correlations, matrix_design_thresholds
from polychoric.estimation import FitOptions
from polychoric.simulation import generate_multivariate

TRUTH = matrix_design_correlations()
opts = FitOptions(simplex_tolerance=1e-8)

print("true latent correlation matrix:")
print(TRUTH)

for eps in (0.0, 0.2):
    data = generate_multivariate(TRUTH, matrix_design_thresholds(),
                                 epsilon=eps, n=1000, seed=42)
    print(f"\n=== contaminated fraction {eps:.0%}, N = {data.n} ===")
    for method in ("ml", "robust"):
        result = fit_matrix(data, opts=opts, method=method)
        err = np.abs(result.estimates - TRUTH)
        iu = np.triu_indices(5, 1)
        print(f"\n{method} estimates (max |error| {err[iu].max():.3f}, "
              f"mean |error| {err[iu].mean():.3f}, "
              f"min eigenvalue {result.min_eigenvalue:.3f}):")
        print(np.round(result.estimates, 3))

print("\nWith clean data both methods recover the matrix; with 20% erratic")
print("responders the ML entries sag toward zero (worst for the strongest")
print("pair) while the robust entries stay within sampling noise.")
