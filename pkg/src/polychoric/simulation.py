"""Data generators and Monte Carlo harness for misspecification studies.

Latent pairs are drawn from a two-component mixture: with probability
``1 - epsilon`` from the informative bivariate standard normal with the
design correlation, otherwise from an uninformative contaminating
component (a shifted/scaled normal cluster, or independent Gumbel
margins).  Both components are discretized by the informative thresholds,
so the contamination manifests purely as implausible response cells.

The same machinery produces the analytic contaminated cell probabilities,
which lets population-level estimand studies run without Monte Carlo
noise, and two study drivers that summarize estimator performance (bias,
spread, coverage, interval length) over replications.

Reproducibility: the stream for replication ``r`` of a study with master
seed ``s`` is ``numpy.random.default_rng(numpy.random.SeedSequence((s, r)))``;
replications are therefore independent of execution order and can run in
parallel without changing results.  Latent multivariate normals are
generated through the (lower) Cholesky factor of the correlation matrix.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import estimation, inference, model
from .errors import DomainError, NotPositiveDefinite, PolychoricError
from .estimation import DiscrepancyConfig, FitOptions
from .model import CellGrid, ContingencyTable, Theta
from .pairwise import OrdinalDataset, fit_matrix

__all__ = [
    "BivariateNormalComponent",
    "IndependentGumbelComponent",
    "MixtureSpec",
    "MethodPerformance",
    "PerformanceReport",
    "MatrixStudyReport",
    "generate_pair",
    "generate_multivariate",
    "mixture_cell_probs",
    "run_study",
    "run_matrix_study",
]

STUDY_METHODS = ("ml", "robust", "twostep", "sample")


@dataclass(frozen=True)
class BivariateNormalComponent:
    """A (generally shifted and scaled) bivariate normal contaminant."""

    mean: tuple = (2.0, -2.0)
    variances: tuple = (0.2, 0.2)
    covariance: float = 0.0

    def __post_init__(self):
        if len(self.mean) != 2 or len(self.variances) != 2:
            raise DomainError("mean and variances must have two entries")
        v1, v2 = (float(v) for v in self.variances)
        if v1 <= 0.0 or v2 <= 0.0:
            raise DomainError("variances must be positive")
        if self.covariance**2 >= v1 * v2:
            raise DomainError("covariance is inconsistent with the variances")

    @property
    def correlation(self):
        return float(self.covariance) / math.sqrt(self.variances[0] * self.variances[1])


@dataclass(frozen=True)
class IndependentGumbelComponent:
    """Independent Gumbel margins; heavily skewed, scattering everywhere."""

    location: float = 0.0
    scale: float = 3.0

    def __post_init__(self):
        if self.scale <= 0.0:
            raise DomainError("scale must be positive")

    def sample(self, rng, size):
        u = rng.random(size)
        return self.location - self.scale * np.log(-np.log(u))

    def cdf(self, x):
        return np.exp(-np.exp(-(np.asarray(x, dtype=float) - self.location) / self.scale))


@dataclass(frozen=True)
class MixtureSpec:
    """Description of one contaminated-pair data generating process."""

    epsilon: float
    rho_star: float
    thresholds_x: np.ndarray
    thresholds_y: np.ndarray
    misspecifying: object = None

    def __post_init__(self):
        eps = float(self.epsilon)
        if not (0.0 <= eps < 0.5):
            raise DomainError(f"misspecification fraction must be in [0, 0.5), got {eps}")
        object.__setattr__(self, "epsilon", eps)
        if abs(self.rho_star) >= 1.0:
            raise DomainError("rho_star must be in (-1, 1)")
        for name in ("thresholds_x", "thresholds_y"):
            t = np.asarray(getattr(self, name), dtype=float)
            if t.ndim != 1 or t.size < 1 or np.any(np.diff(t) <= 0.0):
                raise DomainError(f"{name} must be strictly increasing")
            object.__setattr__(self, name, t)
        if eps > 0.0 and self.misspecifying is None:
            raise DomainError("epsilon > 0 requires a misspecifying component")
        if self.misspecifying is not None and not isinstance(
            self.misspecifying, (BivariateNormalComponent, IndependentGumbelComponent)
        ):
            raise DomainError("unsupported misspecifying component")

    @property
    def theta_star(self):
        return Theta(rho=self.rho_star, a=self.thresholds_x, b=self.thresholds_y)


def _rng_for(seed, replication=None):
    if replication is None:
        return np.random.default_rng(np.random.SeedSequence(seed))
    return np.random.default_rng(np.random.SeedSequence((seed, replication)))


def _discretize(values, thresholds):
    # category k when t_{k-1} <= value < t_k (left-closed, matching the model)
    return np.searchsorted(thresholds, values, side="right") + 1


def _draw_latent_pair(spec, n, rng):
    """Latent (xi, eta) mixture draws in a fixed stream order."""
    contaminated = rng.random(n) < spec.epsilon
    n_bad = int(contaminated.sum())
    z = rng.standard_normal((n, 2))
    xi = z[:, 0]
    eta = spec.rho_star * z[:, 0] + math.sqrt(1.0 - spec.rho_star**2) * z[:, 1]
    if n_bad:
        comp = spec.misspecifying
        if isinstance(comp, BivariateNormalComponent):
            zz = rng.standard_normal((n_bad, 2))
            v1, v2 = comp.variances
            r = comp.correlation
            bad_xi = comp.mean[0] + math.sqrt(v1) * zz[:, 0]
            bad_eta = comp.mean[1] + math.sqrt(v2) * (r * zz[:, 0] + math.sqrt(1.0 - r * r) * zz[:, 1])
        else:
            bad_xi = comp.sample(rng, n_bad)
            bad_eta = comp.sample(rng, n_bad)
        xi = np.where(contaminated, np.nan, xi)
        eta = np.where(contaminated, np.nan, eta)
        xi[contaminated] = bad_xi
        eta[contaminated] = bad_eta
    return xi, eta


def generate_pair(spec, n, seed):
    """One contingency table of ``n`` responses from the mixture process.

    Deterministic given ``seed``; both mixture components are discretized
    with the informative thresholds.
    """
    rng = _rng_for(seed)
    xi, eta = _draw_latent_pair(spec, n, rng)
    x = _discretize(xi, spec.thresholds_x)
    y = _discretize(eta, spec.thresholds_y)
    kx = spec.thresholds_x.size + 1
    ky = spec.thresholds_y.size + 1
    counts = np.zeros((kx, ky), dtype=np.int64)
    np.add.at(counts, (x - 1, y - 1), 1)
    return ContingencyTable(counts=counts)


def _component_cell_mass(spec):
    """Analytic cell probabilities of the misspecifying component."""
    comp = spec.misspecifying
    ax = np.concatenate(([-np.inf], spec.thresholds_x, [np.inf]))
    bx = np.concatenate(([-np.inf], spec.thresholds_y, [np.inf]))
    if isinstance(comp, BivariateNormalComponent):
        s1 = math.sqrt(comp.variances[0])
        s2 = math.sqrt(comp.variances[1])
        ua = (ax - comp.mean[0]) / s1
        vb = (bx - comp.mean[1]) / s2
        U, V = np.meshgrid(ua, vb, indexing="ij")
        from .bvn import biv_cdf_grid

        corners = biv_cdf_grid(U, V, comp.correlation)
        mass = corners[1:, 1:] - corners[:-1, 1:] - corners[1:, :-1] + corners[:-1, :-1]
        return np.maximum(mass, 0.0)
    # independent Gumbel margins: product of univariate CDF differences
    fx = np.concatenate(([0.0], comp.cdf(spec.thresholds_x), [1.0]))
    fy = np.concatenate(([0.0], comp.cdf(spec.thresholds_y), [1.0]))
    return np.outer(np.diff(fx), np.diff(fy))


def mixture_cell_probs(spec):
    """Population response probabilities under the contaminated process.

    ``(1 - eps) * pi(theta_star) + eps * (component cell mass)``, exact up
    to CDF precision; the noise-free input for estimand studies.
    """
    base = model.cell_probs_array(spec.theta_star)
    if spec.epsilon == 0.0:
        mix = base
    else:
        mix = (1.0 - spec.epsilon) * base + spec.epsilon * _component_cell_mass(spec)
    return CellGrid(values=mix / mix.sum(), kind="empirical-frequency")


def _latent_multivariate(cormat, epsilon, gumbel, n, rng):
    """Latent mixture draws for the multivariate design (fixed stream order)."""
    q = cormat.shape[0]
    contaminated = rng.random(n) < epsilon
    z = rng.standard_normal((n, q))
    try:
        chol = np.linalg.cholesky(cormat)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("correlation matrix is not positive definite") from exc
    latent = z @ chol.T
    n_bad = int(contaminated.sum())
    if n_bad:
        latent[contaminated] = gumbel.sample(rng, (n_bad, q))
    return latent, contaminated


def generate_multivariate(cormat, thresholds, epsilon, n, seed, gumbel=None):
    """Ordinal dataset of ``n`` draws of ``q`` items under Gumbel mixing.

    The informative component is a q-variate standard normal with
    correlation matrix ``cormat``; a shared per-observation membership
    swaps whole rows for independent Gumbel draws.  All coordinates use
    the common ``thresholds``.
    """
    cormat = np.asarray(cormat, dtype=float)
    if cormat.ndim != 2 or cormat.shape[0] != cormat.shape[1]:
        raise DomainError("cormat must be square")
    if not np.allclose(cormat, cormat.T) or not np.allclose(np.diag(cormat), 1.0):
        raise DomainError("cormat must be symmetric with unit diagonal")
    if not (0.0 <= epsilon < 0.5):
        raise DomainError("misspecification fraction must be in [0, 0.5)")
    thresholds = np.asarray(thresholds, dtype=float)
    gumbel = gumbel or IndependentGumbelComponent()
    rng = _rng_for(seed)
    latent, _ = _latent_multivariate(cormat, epsilon, gumbel, n, rng)
    codes = _discretize(latent, thresholds)
    return OrdinalDataset(codes=codes)


@dataclass
class MethodPerformance:
    """Summary of one estimation method across study replications."""

    method: str
    mean_estimate: float
    mean_bias: float
    std_dev: float
    coverage: float
    mean_ci_length: float
    n_failed: int
    replications_used: int
    std_dev_degenerate: bool = False

    def to_dict(self):
        return {
            "method": self.method,
            "mean_estimate": self.mean_estimate,
            "mean_bias": self.mean_bias,
            "std_dev": self.std_dev,
            "coverage": self.coverage,
            "mean_ci_length": self.mean_ci_length,
            "n_failed": self.n_failed,
            "replications_used": self.replications_used,
            "std_dev_degenerate": self.std_dev_degenerate,
        }


@dataclass
class PerformanceReport:
    """Per-method performance rows for one (design, epsilon, n) study."""

    rows: list
    epsilon: float
    rho_star: float
    n: int
    replications: int
    alpha: float
    seed: int

    def row(self, method):
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "rho_star": self.rho_star,
            "n": self.n,
            "replications": self.replications,
            "alpha": self.alpha,
            "seed": self.seed,
            "rows": [r.to_dict() for r in self.rows],
        }


def _study_options(opts):
    # harness default: slightly relaxed simplex tolerance; parameters move by
    # far more than 1e-8 across replications, so this is pure speed
    return opts or FitOptions(simplex_tolerance=1e-8)


def _estimate_once(method, table, cfg, opts, alpha):
    if method == "sample":
        est, se = estimation.pearson_sample_correlation(table)
    elif method == "twostep":
        res = estimation.fit_twostep(table)
        est, se = res.rho, res.se_rho
    elif method == "ml":
        res = estimation.fit(table, estimation.ML_CONFIG, opts)
        est, se = res.rho, res.se_rho
    elif method == "robust":
        res = estimation.fit(table, cfg, opts)
        est, se = res.rho, res.se_rho
    else:
        raise DomainError(f"unknown study method {method!r}")
    if se is None or not np.isfinite(se):
        raise PolychoricError(f"{method}: standard error unavailable")
    ci = inference.confidence_interval(est, se, 1.0 - alpha)
    return est, ci


def run_study(spec, n, replications, methods=("ml", "robust", "sample"),
              alpha=0.05, seed=0, cfg=None, opts=None):
    """Monte Carlo performance of estimators on the contaminated design.

    For every method: mean estimate, mean bias against ``spec.rho_star``,
    standard deviation across replications, coverage of the nominal
    ``1 - alpha`` Wald interval, and mean interval length.  Replications
    whose fit fails are excluded and counted in ``n_failed``.
    """
    if replications < 1:
        raise DomainError("replications must be >= 1")
    for m in methods:
        if m not in STUDY_METHODS:
            raise DomainError(f"unknown study method {m!r}")
    cfg = cfg or DiscrepancyConfig()
    opts = _study_options(opts)
    estimates = {m: [] for m in methods}
    covered = {m: 0 for m in methods}
    lengths = {m: [] for m in methods}
    failed = {m: 0 for m in methods}
    for rep in range(replications):
        rng = _rng_for(seed, rep)
        xi, eta = _draw_latent_pair(spec, n, rng)
        x = _discretize(xi, spec.thresholds_x)
        y = _discretize(eta, spec.thresholds_y)
        counts = np.zeros((spec.thresholds_x.size + 1, spec.thresholds_y.size + 1), dtype=np.int64)
        np.add.at(counts, (x - 1, y - 1), 1)
        table = ContingencyTable(counts=counts)
        for m in methods:
            try:
                est, ci = _estimate_once(m, table, cfg, opts, alpha)
            except PolychoricError:
                failed[m] += 1
                continue
            estimates[m].append(est)
            covered[m] += ci.contains(spec.rho_star)
            lengths[m].append(ci.length)
    rows = []
    for m in methods:
        used = len(estimates[m])
        est = np.asarray(estimates[m])
        degenerate = used < 2
        rows.append(MethodPerformance(
            method=m,
            mean_estimate=float(est.mean()) if used else math.nan,
            mean_bias=float(est.mean() - spec.rho_star) if used else math.nan,
            std_dev=float(est.std(ddof=1)) if used >= 2 else 0.0,
            coverage=covered[m] / used if used else math.nan,
            mean_ci_length=float(np.mean(lengths[m])) if used else math.nan,
            n_failed=failed[m],
            replications_used=used,
            std_dev_degenerate=degenerate,
        ))
    return PerformanceReport(
        rows=rows,
        epsilon=spec.epsilon,
        rho_star=spec.rho_star,
        n=n,
        replications=replications,
        alpha=alpha,
        seed=seed,
    )


@dataclass
class MatrixStudyReport:
    """Mean absolute bias of each pairwise coefficient, per method."""

    mean_abs_bias: dict        # method -> (q, q) array, NaN diagonal
    mean_estimates: dict       # method -> (q, q) array
    n_failed: dict             # method -> int (pair-fit failures)
    true_matrix: np.ndarray
    epsilon: float
    n: int
    replications: int
    seed: int

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "n": self.n,
            "replications": self.replications,
            "seed": self.seed,
            "true_matrix": self.true_matrix.tolist(),
            "mean_abs_bias": {m: v.tolist() for m, v in self.mean_abs_bias.items()},
            "mean_estimates": {m: v.tolist() for m, v in self.mean_estimates.items()},
            "n_failed": self.n_failed,
        }


def run_matrix_study(cormat, thresholds, epsilon, n, replications,
                     methods=("ml", "robust"), seed=0, gumbel=None,
                     cfg=None, opts=None):
    """Monte Carlo recovery of a correlation matrix under Gumbel mixing.

    Every replication draws a fresh dataset, fits the full pairwise matrix
    with each method, and accumulates |estimate - truth| per coefficient.
    """
    cormat = np.asarray(cormat, dtype=float)
    cfg = cfg or DiscrepancyConfig()
    opts = _study_options(opts)
    gumbel = gumbel or IndependentGumbelComponent()
    q = cormat.shape[0]
    sums = {m: np.zeros((q, q)) for m in methods}
    abs_sums = {m: np.zeros((q, q)) for m in methods}
    counts = {m: np.zeros((q, q)) for m in methods}
    failed = {m: 0 for m in methods}
    for rep in range(replications):
        rng = _rng_for(seed, rep)
        latent, _ = _latent_multivariate(cormat, epsilon, gumbel, n, rng)
        data = OrdinalDataset(codes=_discretize(latent, np.asarray(thresholds, dtype=float)))
        for m in methods:
            method = {"twostep": "two-step"}.get(m, m)
            result = fit_matrix(data, cfg=cfg, opts=opts, method=method)
            failed[m] += len(result.failures)
            ok = ~np.isnan(result.estimates)
            sums[m][ok] += result.estimates[ok]
            abs_sums[m][ok] += np.abs(result.estimates - cormat)[ok]
            counts[m][ok] += 1
    mean_abs = {}
    mean_est = {}
    for m in methods:
        with np.errstate(invalid="ignore", divide="ignore"):
            mean_abs[m] = abs_sums[m] / counts[m]
            mean_est[m] = sums[m] / counts[m]
        np.fill_diagonal(mean_abs[m], np.nan)
    return MatrixStudyReport(
        mean_abs_bias=mean_abs,
        mean_estimates=mean_est,
        n_failed=failed,
        true_matrix=cormat.copy(),
        epsilon=float(epsilon),
        n=n,
        replications=replications,
        seed=seed,
    )
