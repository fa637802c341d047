"""Estimators for the polychoric model.

Three routes to the parameter vector:

* ``fit`` with ``c = inf`` -- maximum likelihood;
* ``fit`` with finite ``c`` (default 0.6) -- the generalized, outlier-cell
  robust estimator that minimizes the discrepancy loss

      L(theta, f) = sum_xy phi(f_xy / pi_xy(theta) - 1) * pi_xy(theta),

  where phi is maximum-likelihood-like on Pearson residuals in [-1, c] and
  linear beyond c, so that grossly misfit cells contribute linearly instead
  of super-linearly;
* ``fit_twostep`` -- thresholds from marginal quantiles, then a
  one-dimensional likelihood maximization for the correlation.

Optimization runs over an unconstrained reparameterization (rho through
tanh, thresholds through a first threshold plus log-gaps) driven by the
Nelder-Mead simplex in :mod:`polychoric.optim`, which keeps every probe
feasible.  The linear branch of the loss is evaluated in the algebraically
equivalent form ``f * (log(c+1) + 1) - (c+1) * pi``, which involves no
division by cell probabilities and is exact for every ``pi >= 0``; the ML
branch is ``f * log(f / pi)`` and an empty cell (f = 0) contributes exactly
zero.  No probability floor is needed inside the loss itself.

The Pearson sample correlation on integer-coded responses is included as
the naive comparison estimator.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from . import bvn, inference, model
from .errors import (
    DegenerateMargin,
    DomainError,
    EmptyCategory,
    EmptyTable,
    InvalidTheta,
    NoConvergence,
)
from .model import CellGrid, ContingencyTable, Theta
from .optim import SimplexState, nelder_mead

__all__ = [
    "DiscrepancyConfig",
    "FitOptions",
    "EstimateResult",
    "THRESHOLD_GAP_CUTOFF",
    "THRESHOLD_MERGE_CUTOFF",
    "phi",
    "loss",
    "fit",
    "fit_frequencies",
    "fit_twostep",
    "twostep_thresholds",
    "pearson_sample_correlation",
    "detect_instability",
]

#: Adjacent thresholds at least this far apart flag an unstable fit; the gap
#: spans ~95% of the latent marginal's probability mass.
THRESHOLD_GAP_CUTOFF = 3.92

#: Adjacent thresholds closer than this are flagged as effectively merged.
THRESHOLD_MERGE_CUTOFF = 1e-4

WARN_THRESHOLD_GAP = "threshold-gap"
WARN_THRESHOLD_MERGE = "threshold-merge"
WARN_DEGENERATE_SIMPLEX = "degenerate-simplex"
WARN_CORRELATION_CLAMPED = "correlation-clamped"
WARN_EMPTY_CATEGORY = "empty-category"


@dataclass(frozen=True)
class DiscrepancyConfig:
    """Tuning of the discrepancy function.

    ``c`` is the Pearson-residual threshold beyond which a cell's
    contribution turns linear; ``c = inf`` reproduces maximum likelihood
    exactly.  The default 0.6 is the recommended robustness/efficiency
    compromise.
    """

    c: float = 0.6

    def __post_init__(self):
        c = float(self.c)
        if math.isnan(c) or c < 0.0:
            raise DomainError(f"tuning constant c must be >= 0 (inf for ML), got {self.c}")
        object.__setattr__(self, "c", c)

    @property
    def is_ml(self):
        return math.isinf(self.c)


#: Configuration selecting the maximum likelihood discrepancy.
ML_CONFIG = DiscrepancyConfig(c=math.inf)


@dataclass(frozen=True)
class FitOptions:
    """Optimizer settings for :func:`fit`.

    ``simplex_tolerance`` is relative simplex size; ``restarts`` is how many
    jittered re-starts are attempted after a failed or degenerate run.
    ``initial_theta`` overrides the default two-step starting point.
    """

    max_iterations: int = 5000
    simplex_tolerance: float = 1e-10
    restarts: int = 1
    initial_theta: Theta = None
    initial_step: float = 0.1

    def __post_init__(self):
        if self.max_iterations <= 0:
            raise DomainError("max_iterations must be positive")
        if not (self.simplex_tolerance > 0.0):
            raise DomainError("simplex_tolerance must be positive")
        if self.restarts < 0:
            raise DomainError("restarts must be >= 0")


@dataclass
class EstimateResult:
    """A fitted polychoric model with uncertainty and diagnostics.

    ``covariance`` is the estimated covariance matrix of ``theta_hat`` (the
    asymptotic covariance already divided by n); for the two-step method it
    is absent and only the correlation's standard error is reported.
    ``std_errors`` follows the canonical (rho, a's, b's) order, with NaN in
    positions where no standard error applies.  Both are None when standard
    errors were withheld (singular information matrix) or no sample size
    was available.
    """

    theta_hat: Theta
    method: str
    c_used: float
    covariance: np.ndarray
    std_errors: np.ndarray
    loss_value: float
    converged: bool
    instability: list
    n: int

    @property
    def rho(self):
        return self.theta_hat.rho

    @property
    def se_rho(self):
        if self.std_errors is None:
            return None
        return float(self.std_errors[0])


def phi(z, cfg=None):
    """The discrepancy function applied to a Pearson residual.

    ML-like ``(z+1) log(z+1)`` on [-1, c] (with the limit convention
    phi(-1) = 0) and linear with slope ``log(c+1) + 1`` beyond c; the two
    branches meet with matching value and derivative at ``z = c``, the tie
    itself resolving into the ML branch.

    Raises
    ------
    DomainError
        For ``z < -1``, where a Pearson residual cannot lie.
    """
    cfg = cfg or DiscrepancyConfig()
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    if np.any(z < -1.0):
        raise DomainError("phi is defined on [-1, inf)")
    zp1 = z + 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ml_branch = np.where(zp1 > 0.0, zp1 * np.log(np.where(zp1 > 0.0, zp1, 1.0)), 0.0)
    if cfg.is_ml:
        out = ml_branch
    else:
        slope = math.log(cfg.c + 1.0) + 1.0
        linear_branch = zp1 * slope - (cfg.c + 1.0)
        out = np.where(z > cfg.c, linear_branch, ml_branch)
    if scalar:
        return float(out)
    return out


def _loss_raw(f, probs, c):
    """Loss on raw arrays; stable for zero cells and zero probabilities."""
    f = f.ravel()
    p = probs.ravel()
    pos = f > 0.0
    f = f[pos]
    p = p[pos]
    if math.isinf(c):
        if np.any(p <= 0.0):
            return math.inf
        return float(np.sum(f * np.log(f / p)))
    linear = f > (c + 1.0) * p
    slope = math.log(c + 1.0) + 1.0
    total = float(np.sum(f[linear] * slope - (c + 1.0) * p[linear]))
    f_ml = f[~linear]
    p_ml = p[~linear]
    if np.any(p_ml <= 0.0):
        # only reachable when f == 0 == p, which the `pos` mask removed
        return math.inf
    total += float(np.sum(f_ml * np.log(f_ml / p_ml)))
    return total


def loss(theta, f_hat, cfg=None):
    """Discrepancy loss L(theta, f) between a frequency grid and the model.

    ``f_hat`` may be a CellGrid (empirical-frequency kind) or a plain
    nonnegative array summing to one.  The value is always >= 0 and equals
    0 exactly when the frequencies coincide with ``cell_probs(theta)``.
    """
    cfg = cfg or DiscrepancyConfig()
    f = f_hat.values if isinstance(f_hat, CellGrid) else np.asarray(f_hat, dtype=float)
    if f.shape != (theta.k_x, theta.k_y):
        raise InvalidTheta(f"frequency grid shape {f.shape} does not match theta ({theta.k_x}x{theta.k_y})")
    return _loss_raw(f, model.cell_probs_array(theta), cfg.c)


# ---------------------------------------------------------------------------
# unconstrained reparameterization
#
# rho = tanh(r); a_1 free, subsequent thresholds add exp(log-gap); same for b.
# A smooth bijection onto the feasible parameter set, so the simplex never
# leaves it.

def _pack(theta):
    return np.concatenate((
        [math.atanh(theta.rho)],
        [theta.a[0]], np.log(np.diff(theta.a)),
        [theta.b[0]], np.log(np.diff(theta.b)),
    ))


def _unpack(eta, k_x, k_y):
    """Map an unconstrained point to (rho, a, b); None if it overflows."""
    rho = math.tanh(eta[0])
    rho, clamped = bvn.clamp_correlation(rho)
    a = np.concatenate(([eta[1]], np.exp(eta[2:k_x])))
    b = np.concatenate(([eta[k_x]], np.exp(eta[k_x + 1:])))
    a = np.cumsum(a)
    b = np.cumsum(b)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        return None, None, None, clamped
    return rho, a, b, clamped


def _objective(k_x, k_y, f, c):
    def fn(eta):
        rho, a, b, _ = _unpack(eta, k_x, k_y)
        if rho is None or np.any(np.diff(a) <= 0.0) or np.any(np.diff(b) <= 0.0):
            return math.inf
        probs = _probs_raw(rho, a, b)
        return _loss_raw(f, probs, c)
    return fn


def _probs_raw(rho, a, b):
    ap = np.concatenate(([-np.inf], a, [np.inf]))
    bp = np.concatenate(([-np.inf], b, [np.inf]))
    U, V = np.meshgrid(ap, bp, indexing="ij")
    c = bvn.biv_cdf_grid(U, V, rho)
    return np.maximum(c[1:, 1:] - c[:-1, 1:] - c[1:, :-1] + c[:-1, :-1], 0.0)


def twostep_thresholds(f):
    """Thresholds from cumulative marginal proportions of a frequency grid.

    Raises
    ------
    EmptyCategory
        If any cumulative marginal proportion is 0 or 1 (an empty marginal
        category), which leaves a threshold unidentified.
    """
    cum_rows = np.cumsum(f.sum(axis=1))[:-1]
    cum_cols = np.cumsum(f.sum(axis=0))[:-1]
    if np.any(cum_rows <= 0.0) or np.any(cum_rows >= 1.0) or np.any(cum_cols <= 0.0) or np.any(cum_cols >= 1.0):
        raise EmptyCategory("a marginal category is empty; thresholds are not identified")
    return bvn.uni_quantile(cum_rows), bvn.uni_quantile(cum_cols)


def _profile_rho(f, a, b, c=math.inf):
    """1-D minimization of the loss over rho with thresholds held fixed.

    The loss can be +inf where a populated cell's probability underflows
    (extreme correlations), so the minimum is bracketed on a coarse grid
    first; the local refinement then never has to cross an infinite region.
    """
    def fn(r):
        return _loss_raw(f, _probs_raw(math.tanh(r), a, b), c)

    grid = np.linspace(-3.0, 3.0, 25)
    values = [fn(r) for r in grid]
    i = int(np.argmin(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(fn, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    best_r, best_val = (res.x, float(res.fun)) if res.fun <= values[i] else (grid[i], values[i])
    rho, _ = bvn.clamp_correlation(math.tanh(best_r))
    return rho, best_val


def _jitter(theta, attempt):
    """Deterministic perturbation of a starting point for re-starts."""
    signs_a = np.where(np.arange(theta.a.size) % 2 == 0, 1.0, -1.0)
    signs_b = np.where(np.arange(theta.b.size) % 2 == 0, -1.0, 1.0)
    shift = 0.1 * attempt
    rho = theta.rho + 0.05 * attempt * (1 if attempt % 2 else -1)
    rho = min(max(rho, -0.99), 0.99)
    a = theta.a + shift * signs_a
    b = theta.b + shift * signs_b
    # re-sort defensively; jitter can in principle reorder tight thresholds
    a = np.sort(a)
    b = np.sort(b)
    a = _separate(a)
    b = _separate(b)
    return Theta(rho=rho, a=a, b=b)


def _separate(t, gap=1e-6):
    out = t.copy()
    for i in range(1, out.size):
        if out[i] <= out[i - 1]:
            out[i] = out[i - 1] + gap
    return out


def detect_instability(result, simplex_state=None, simplex_tolerance=1e-10):
    """Instability warnings for a completed fit.

    * ``threshold-gap`` -- some adjacent threshold pair is >= 3.92 apart;
    * ``threshold-merge`` -- some adjacent pair is < 1e-4 apart (the fit is
      trying to eliminate a category);
    * ``degenerate-simplex`` -- the final simplex collapsed geometrically
      while its loss values had not flattened (relative diameter below
      tolerance with relative value spread above 1e-8), or it collapsed
      into a subspace while still large (edge-matrix condition > 1e10 at a
      relative diameter above sqrt(tolerance)).

    ``result`` may be an EstimateResult or a bare Theta.
    """
    theta = result.theta_hat if isinstance(result, EstimateResult) else result
    warnings = []
    for t in (theta.a, theta.b):
        if t.size >= 2:
            gaps = np.diff(t)
            if np.any(gaps >= THRESHOLD_GAP_CUTOFF):
                warnings.append(WARN_THRESHOLD_GAP)
            if np.any(gaps < THRESHOLD_MERGE_CUTOFF):
                warnings.append(WARN_THRESHOLD_MERGE)
    if simplex_state is not None:
        collapsed_early = (
            simplex_state.relative_diameter() <= simplex_tolerance
            and simplex_state.relative_value_spread() > 1e-8
        )
        subspace_collapse = (
            simplex_state.relative_diameter() > math.sqrt(simplex_tolerance)
            and simplex_state.anisotropy() > 1e10
        )
        if collapsed_early or subspace_collapse:
            warnings.append(WARN_DEGENERATE_SIMPLEX)
    return sorted(set(warnings))


def _check_margins(table):
    if table.n == 0:
        raise EmptyTable("contingency table has no observations")
    if np.any(table.row_margins() == 0) or np.any(table.col_margins() == 0):
        raise EmptyCategory("every row and column needs at least one observation")


def _fit_grid(f, k_x, k_y, cfg, opts):
    """Shared minimization core; returns (theta, loss, simplex, warnings)."""
    a0, b0 = twostep_thresholds(f)
    if opts.initial_theta is not None:
        start = opts.initial_theta
        if (start.k_x, start.k_y) != (k_x, k_y):
            raise InvalidTheta("initial_theta has the wrong number of categories")
    else:
        rho0, _ = _profile_rho(f, a0, b0, c=math.inf)
        start = Theta(rho=rho0, a=a0, b=b0)

    objective = _objective(k_x, k_y, f, cfg.c)
    best = None
    for attempt in range(opts.restarts + 1):
        init = start if attempt == 0 else _jitter(start, attempt)
        state = nelder_mead(
            objective,
            _pack(init),
            initial_step=opts.initial_step,
            max_iter=opts.max_iterations,
            tol=opts.simplex_tolerance,
        )
        rho, a, b, clamped = _unpack(state.x, k_x, k_y)
        if rho is None:
            continue
        theta = Theta(rho=rho, a=_separate(a, 1e-9), b=_separate(b, 1e-9))
        warnings = detect_instability(theta, state, opts.simplex_tolerance)
        if clamped:
            warnings.append(WARN_CORRELATION_CLAMPED)
        candidate = (theta, state, sorted(set(warnings)))
        if best is None or state.fun < best[1].fun:
            best = candidate
        if state.converged and WARN_DEGENERATE_SIMPLEX not in warnings:
            break
    if best is None or not best[1].converged:
        raise NoConvergence(
            f"Nelder-Mead did not converge within {opts.max_iterations} iterations "
            f"({opts.restarts} restart(s) attempted)"
        )
    return best


def fit(table, cfg=None, opts=None):
    """Fit the polychoric model to a contingency table.

    With ``cfg.c = inf`` this is the maximum likelihood estimator; with
    finite ``c`` the robust generalized estimator.  Standard errors come
    from the inference layer: the classical observed-information covariance
    for maximum likelihood, the misspecification-robust sandwich covariance
    for finite ``c``.

    Raises
    ------
    EmptyCategory
        If some row or column of the table has no observations.
    NoConvergence
        If the optimizer exhausts its iteration budget and restarts.
    """
    cfg = cfg or DiscrepancyConfig()
    opts = opts or FitOptions()
    _check_margins(table)
    f = table.counts / table.n
    theta, state, warnings = _fit_grid(f, table.k_x, table.k_y, cfg, opts)
    covariance, std_errors, cov_warnings = _estimate_covariance(theta, f, cfg, table.n)
    return EstimateResult(
        theta_hat=theta,
        method="ml" if cfg.is_ml else "robust",
        c_used=cfg.c,
        covariance=covariance,
        std_errors=std_errors,
        loss_value=state.fun,
        converged=state.converged,
        instability=sorted(set(warnings) | set(cov_warnings)),
        n=table.n,
    )


def fit_frequencies(f_hat, cfg=None, opts=None, n=None):
    """Fit directly on a frequency grid (plug-in / population studies).

    ``f_hat`` is a CellGrid or array of nonnegative frequencies summing to
    one; with ``n`` given, covariance and standard errors are produced as in
    :func:`fit`, otherwise they are omitted.
    """
    cfg = cfg or DiscrepancyConfig()
    opts = opts or FitOptions()
    f = f_hat.values if isinstance(f_hat, CellGrid) else np.asarray(f_hat, dtype=float)
    if f.ndim != 2 or f.shape[0] < 2 or f.shape[1] < 2:
        raise InvalidTheta("frequency grid must be 2-D with at least 2 categories per side")
    theta, state, warnings = _fit_grid(f, f.shape[0], f.shape[1], cfg, opts)
    covariance = std_errors = None
    cov_warnings = []
    if n is not None:
        covariance, std_errors, cov_warnings = _estimate_covariance(theta, f, cfg, n)
    return EstimateResult(
        theta_hat=theta,
        method="ml" if cfg.is_ml else "robust",
        c_used=cfg.c,
        covariance=covariance,
        std_errors=std_errors,
        loss_value=state.fun,
        converged=state.converged,
        instability=sorted(set(warnings) | set(cov_warnings)),
        n=0 if n is None else int(n),
    )


def _estimate_covariance(theta, f, cfg, n):
    if cfg.is_ml:
        cov, warnings = inference.ml_covariance(theta, f)
    else:
        comps = inference.sandwich_covariance(theta, f, cfg)
        cov, warnings = comps.sigma, comps.warnings
    if cov is None:
        return None, None, warnings
    cov = cov / n
    return cov, np.sqrt(np.maximum(np.diag(cov), 0.0)), warnings


def fit_twostep(table):
    """Two-step estimate: marginal-quantile thresholds, then 1-D ML for rho.

    Fast, but the thresholds are not maximum likelihood estimates, so no
    threshold standard errors are reported; the correlation's standard
    error comes from the one-dimensional observed information with the
    thresholds held fixed.
    """
    _check_margins(table)
    f = table.counts / table.n
    a, b = twostep_thresholds(f)
    rho, loss_value = _profile_rho(f, a, b, c=math.inf)
    theta = Theta(rho=rho, a=a, b=b)
    std_errors = np.full(theta.d, np.nan)
    info = inference.profile_rho_information(theta, f)
    if info > 0.0:
        std_errors[0] = 1.0 / math.sqrt(info * table.n)
    return EstimateResult(
        theta_hat=theta,
        method="two-step",
        c_used=math.inf,
        covariance=None,
        std_errors=std_errors,
        loss_value=loss_value,
        converged=True,
        instability=detect_instability(theta),
        n=table.n,
    )


def pearson_sample_correlation(table):
    """Product-moment correlation treating categories as integers.

    Returns ``(estimate, std_error)`` with the standard error from the
    usual t-based formula sqrt((1 - r^2) / (N - 2)).

    Raises
    ------
    DegenerateMargin
        If either variable is constant or fewer than 3 observations exist.
    """
    n = table.n
    if n < 3:
        raise DegenerateMargin("sample correlation needs at least 3 observations")
    counts = table.counts.astype(float)
    x = np.arange(1, table.k_x + 1, dtype=float)
    y = np.arange(1, table.k_y + 1, dtype=float)
    px = counts.sum(axis=1) / n
    py = counts.sum(axis=0) / n
    mx = float(px @ x)
    my = float(py @ y)
    vx = float(px @ (x - mx) ** 2)
    vy = float(py @ (y - my) ** 2)
    if vx <= 0.0 or vy <= 0.0:
        raise DegenerateMargin("a variable is constant; correlation undefined")
    cov = float(((x - mx)[:, None] * (y - my)[None, :] * counts).sum()) / n
    r = cov / math.sqrt(vx * vy)
    r = min(max(r, -1.0), 1.0)
    se = math.sqrt(max(1.0 - r * r, 0.0) / (n - 2))
    return r, se
