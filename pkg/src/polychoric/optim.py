"""Nelder-Mead simplex minimizer.

A compact derivative-free driver used by the fitting layer.  The final
simplex is returned alongside the optimum so that the instability detector
can inspect its geometry (the published estimators diagnose ill-posed fits
through simplex degeneracy).

Coefficients follow the dimension-adaptive scheme (reflection 1,
expansion 1 + 2/n, contraction 0.75 - 1/(2n), shrink 1 - 1/n), which
behaves like the classic constants in low dimension and is markedly more
reliable for the 9-13 parameter problems produced by 5x5 and larger tables.
Convergence is declared when the simplex diameter, relative to the scale of
the best vertex, falls below ``tol``.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["SimplexState", "nelder_mead"]


@dataclass
class SimplexState:
    """Outcome of a Nelder-Mead run, including the final simplex."""

    x: np.ndarray          # best vertex
    fun: float             # value at the best vertex
    points: np.ndarray     # (n+1, n) final simplex vertices, best first
    values: np.ndarray     # (n+1,) values at the vertices
    iterations: int
    function_evals: int
    converged: bool

    def relative_diameter(self):
        """Max vertex distance from the best vertex, relative to its scale."""
        scale = max(1.0, float(np.max(np.abs(self.points[0]))))
        return float(np.max(np.abs(self.points[1:] - self.points[0]))) / scale

    def relative_value_spread(self):
        """Spread of simplex values relative to the best value's scale."""
        worst = float(self.values[-1])
        best = float(self.values[0])
        if not (np.isfinite(worst) and np.isfinite(best)):
            return np.inf
        return (worst - best) / max(1.0, abs(best))

    def anisotropy(self):
        """Condition number of the edge matrix (large = collapsed simplex)."""
        edges = self.points[1:] - self.points[0]
        svals = np.linalg.svd(edges, compute_uv=False)
        if svals[-1] <= 0.0:
            return np.inf
        return float(svals[0] / svals[-1])


def nelder_mead(fn, x0, initial_step=0.1, max_iter=5000, tol=1e-10):
    """Minimize ``fn`` from ``x0``; returns a :class:`SimplexState`.

    Parameters
    ----------
    fn : callable
        Objective mapping a 1-D ndarray to a float (may return +inf).
    x0 : array_like
        Starting point; the initial simplex offsets each coordinate by
        ``initial_step``.
    max_iter : int
        Iteration cap; one iteration is one reflect/expand/contract/shrink
        cycle.
    tol : float
        Relative simplex-diameter convergence tolerance.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    alpha = 1.0
    beta = 1.0 + 2.0 / n
    gamma = 0.75 - 1.0 / (2.0 * n)
    delta = 1.0 - 1.0 / n

    points = np.empty((n + 1, n))
    points[0] = x0
    for i in range(n):
        points[i + 1] = x0
        points[i + 1, i] += initial_step
    values = np.array([fn(p) for p in points])
    evals = n + 1

    iterations = 0
    converged = False
    while iterations < max_iter:
        order = np.argsort(values, kind="stable")
        points = points[order]
        values = values[order]
        scale = max(1.0, float(np.max(np.abs(points[0]))))
        if float(np.max(np.abs(points[1:] - points[0]))) <= tol * scale:
            converged = True
            break
        iterations += 1

        centroid = points[:-1].mean(axis=0)
        reflected = centroid + alpha * (centroid - points[-1])
        f_r = fn(reflected)
        evals += 1
        if f_r < values[0]:
            expanded = centroid + beta * (reflected - centroid)
            f_e = fn(expanded)
            evals += 1
            if f_e < f_r:
                points[-1], values[-1] = expanded, f_e
            else:
                points[-1], values[-1] = reflected, f_r
        elif f_r < values[-2]:
            points[-1], values[-1] = reflected, f_r
        else:
            if f_r < values[-1]:
                contracted = centroid + gamma * (reflected - centroid)
            else:
                contracted = centroid - gamma * (centroid - points[-1])
            f_c = fn(contracted)
            evals += 1
            if f_c < min(f_r, values[-1]):
                points[-1], values[-1] = contracted, f_c
            else:
                points[1:] = points[0] + delta * (points[1:] - points[0])
                values[1:] = [fn(p) for p in points[1:]]
                evals += n

    order = np.argsort(values, kind="stable")
    points = points[order]
    values = values[order]
    return SimplexState(
        x=points[0].copy(),
        fun=float(values[0]),
        points=points,
        values=values,
        iterations=iterations,
        function_evals=evals,
        converged=converged,
    )
