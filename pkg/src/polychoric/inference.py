"""Asymptotic covariance, standard errors, and cell-level diagnostics.

The generalized estimator solving ``min_theta sum_xy phi(f/pi - 1) pi`` is
asymptotically normal with sandwich covariance

    Sigma = M^{-1} U M^{-1},      U = W Omega W^T,

where, writing s_xy = grad(pi_xy) / pi_xy for the per-cell score and
PR_xy = f_xy / pi_xy - 1 for the Pearson residual,

* W collects the columns s_xy * 1{PR_xy in [-1, c]} (a cell past the
  robustness threshold contributes a zero column),
* Omega = diag(f) - f f^T is the multinomial covariance of the cell
  frequencies, and
* M is the Hessian of the loss,

    M = sum_xy [ f_xy 1{PR in [-1, c]} s s^T - A_xy ],
    A_xy = ( (f/pi) 1{PR in [-1, c]} + (c+1) 1{PR > c} ) hess(pi_xy),

all evaluated with the plug-in rule: empirical frequencies in place of the
population cell probabilities, at the fitted point.  Under a correctly
specified model Sigma reduces exactly to the inverse Fisher information.

Maximum likelihood standard errors are reported in the classical way, from
the inverse observed information (which is M at c = inf); the
misspecification-robust sandwich remains available for c = inf through
:func:`sandwich_covariance`.

Cells whose fitted probability falls below ``PROB_FLOOR`` are treated as
maximally misfit (they join the linear branch) when their observed
frequency is positive, and contribute nothing when it is zero; these are
the limits of the defining expressions.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import model
from .bvn import uni_quantile
from .errors import NearZeroCell
from .model import CellGrid, ContingencyTable, Theta

__all__ = [
    "PROB_FLOOR",
    "CONDITION_LIMIT",
    "CovarianceComponents",
    "ConfidenceInterval",
    "score",
    "sandwich_covariance",
    "observed_information",
    "ml_covariance",
    "profile_rho_information",
    "confidence_interval",
    "pearson_residuals",
    "flag_misfit_cells",
]

#: Cell probabilities below this are numerically indistinguishable from zero.
PROB_FLOOR = 1e-12

#: Condition-number guard for inverting M.
CONDITION_LIMIT = 1e12

WARN_SINGULAR_M = "singular-m"
WARN_THEOREM_BOUNDARY = "theorem-boundary"
WARN_NEAR_ZERO_CELL = "near-zero-cell"


@dataclass
class CovarianceComponents:
    """All ingredients of the sandwich covariance for one fit.

    ``scores`` has shape (k_x, k_y, d); ``w`` is d x K with K = k_x * k_y
    columns in row-major cell order; ``sigma`` is None when M failed the
    condition-number guard (reported through ``warnings``).
    """

    scores: np.ndarray
    w: np.ndarray
    omega: np.ndarray
    u: np.ndarray
    m: np.ndarray
    sigma: np.ndarray
    condition_number: float
    warnings: list


@dataclass(frozen=True)
class ConfidenceInterval:
    """A two-sided Wald interval; ``lower <= upper``."""

    lower: float
    upper: float
    level: float

    @property
    def length(self):
        return self.upper - self.lower

    def contains(self, value):
        return self.lower <= value <= self.upper

    def clipped(self, lo=-1.0, hi=1.0):
        """Interval intersected with [lo, hi], plus a flag if it changed."""
        lo_c = max(self.lower, lo)
        hi_c = min(self.upper, hi)
        changed = (lo_c != self.lower) or (hi_c != self.upper)
        return ConfidenceInterval(lo_c, hi_c, self.level), changed


def score(theta, x, y):
    """Per-cell score s_xy = grad(pi_xy) / pi_xy, 1-based cell indices.

    Raises
    ------
    NearZeroCell
        If pi_xy is below ``PROB_FLOOR``; such cells are excluded from the
        information matrices by the indicator structure.
    """
    probs = model.cell_probs_array(theta)
    p = probs[x - 1, y - 1]
    if p < PROB_FLOOR:
        raise NearZeroCell(f"cell ({x}, {y}) has probability {p!r} below the floor")
    return model.cell_prob_grad(theta, x, y) / p


def _as_frequencies(f):
    if isinstance(f, CellGrid):
        return f.values
    if isinstance(f, ContingencyTable):
        return model.empirical_frequencies(f).values
    return np.asarray(f, dtype=float)


def _assemble(theta, f, c):
    """Common W / M / scores assembly for a tuning constant c (inf = ML)."""
    f = _as_frequencies(f)
    probs = model.cell_probs_array(theta)
    grads = model.all_cell_gradients(theta)
    hessians = model.all_cell_hessians(theta)
    kx, ky, d = theta.k_x, theta.k_y, theta.d

    scores = np.zeros((kx, ky, d))
    w = np.zeros((d, kx * ky))
    m = np.zeros((d, d))
    warnings = []
    k = 0
    for x in range(kx):
        for y in range(ky):
            fx = f[x, y]
            px = probs[x, y]
            if px >= PROB_FLOOR:
                s = grads[x, y] / px
                scores[x, y] = s
                if math.isinf(c):
                    in_ml = True
                else:
                    in_ml = fx <= (c + 1.0) * px
                    if fx == (c + 1.0) * px and fx > 0.0:
                        # tie PR == c: kept in the ML branch, but the
                        # asymptotic theory excludes this boundary case
                        warnings.append(WARN_THEOREM_BOUNDARY)
                if in_ml:
                    w[:, k] = s
                    m += fx * np.outer(s, s) - (fx / px) * hessians[x, y]
                else:
                    m += -(c + 1.0) * hessians[x, y]
            else:
                # probability at numerical zero: maximally misfit if the
                # cell is populated, otherwise it contributes nothing
                if fx > 0.0:
                    if math.isinf(c):
                        warnings.append(WARN_NEAR_ZERO_CELL)
                    else:
                        m += -(c + 1.0) * hessians[x, y]
            k += 1
    return f, scores, w, m, sorted(set(warnings))


def sandwich_covariance(theta, f, cfg):
    """Plug-in sandwich covariance Sigma = M^-1 W Omega W^T M^-1.

    ``f`` may be a CellGrid, ContingencyTable, or plain frequency array;
    ``theta`` should be the fitted optimum for ``f`` under ``cfg``.  The
    returned Sigma is the asymptotic covariance; divide by the sample size
    for variance estimates.  A condition number of M beyond
    ``CONDITION_LIMIT`` withholds Sigma and reports ``singular-m``.
    """
    f, scores, w, m, warnings = _assemble(theta, f, cfg.c)
    fv = f.ravel()
    omega = np.diag(fv) - np.outer(fv, fv)
    u = w @ omega @ w.T
    cond = float(np.linalg.cond(m))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        sigma = None
        warnings = sorted(set(warnings) | {WARN_SINGULAR_M})
    else:
        m_inv = np.linalg.inv(m)
        sigma = m_inv @ u @ m_inv
    return CovarianceComponents(
        scores=scores,
        w=w,
        omega=omega,
        u=u,
        m=m,
        sigma=sigma,
        condition_number=cond,
        warnings=warnings,
    )


def observed_information(theta, f):
    """Per-observation observed information of the log-likelihood (M at c=inf)."""
    _, _, _, m, warnings = _assemble(theta, f, math.inf)
    return m, warnings


def ml_covariance(theta, f):
    """Classical maximum likelihood covariance: inverse observed information.

    Returns ``(sigma, warnings)``; ``sigma`` is None with ``singular-m``
    reported when the information matrix fails the condition guard.
    """
    m, warnings = observed_information(theta, f)
    cond = float(np.linalg.cond(m))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        return None, sorted(set(warnings) | {WARN_SINGULAR_M})
    return np.linalg.inv(m), warnings


def profile_rho_information(theta, f):
    """Observed information for rho alone, thresholds held fixed.

    Used for the two-step correlation standard error.
    """
    f = _as_frequencies(f)
    probs = model.cell_probs_array(theta)
    grads = model.all_cell_gradients(theta)
    hessians = model.all_cell_hessians(theta)
    ok = (probs >= PROB_FLOOR) & (f > 0.0)
    g0 = grads[:, :, 0][ok]
    h00 = hessians[:, :, 0, 0][ok]
    p = probs[ok]
    return float(np.sum(f[ok] * ((g0 / p) ** 2 - h00 / p)))


def confidence_interval(estimate, std_error, level=0.95):
    """Wald interval: estimate -/+ q_{1-alpha/2} * std_error.

    Intervals for a correlation are reported unclipped (they may exceed
    +-1); use :meth:`ConfidenceInterval.clipped` for the flagged variant.
    """
    if std_error < 0.0:
        raise ValueError("std_error must be nonnegative")
    if not (0.0 < level < 1.0):
        raise ValueError("level must be in (0, 1)")
    q = uni_quantile(0.5 + level / 2.0)
    return ConfidenceInterval(estimate - q * std_error, estimate + q * std_error, level)


def pearson_residuals(table, theta):
    """Pearson residuals f_xy / pi_xy - 1 at the fitted parameters.

    ``table`` may be a ContingencyTable, CellGrid, or frequency array.
    Cells with pi below ``PROB_FLOOR`` and positive frequency are reported
    as +inf sentinels; their ratios under the floored probability are
    attached as ``floored_values`` (identical to the plain residuals
    everywhere else).
    """
    f = _as_frequencies(table)
    probs = model.cell_probs_array(theta)
    floored = f / np.maximum(probs, PROB_FLOOR) - 1.0
    values = np.where((probs < PROB_FLOOR) & (f > 0.0), np.inf, floored)
    return CellGrid(values=values, kind="pearson-residual", floored_values=floored)


def flag_misfit_cells(residuals, threshold=3.0):
    """Cells with Pearson residual >= threshold, sorted descending.

    Returns a list of ``(x, y, pr)`` with 1-based indices.  Sorting and the
    reported values use the finite floored ratios, so +inf sentinel cells
    appear with their (very large) ratios under the floored probability.
    """
    values = residuals.floored_values
    if values is None:
        values = residuals.values
    cells = [
        (x + 1, y + 1, float(values[x, y]))
        for x in range(values.shape[0])
        for y in range(values.shape[1])
        if values[x, y] >= threshold
    ]
    cells.sort(key=lambda t: t[2], reverse=True)
    return cells
