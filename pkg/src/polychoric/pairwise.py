"""Polychoric correlation matrices from multivariate ordinal data.

Every unique item pair is fitted separately on its pairwise-complete
observations and the coefficients are assembled into a symmetric matrix
with unit diagonal.  Failures and instability warnings are collected per
pair instead of aborting the whole matrix; positive definiteness is
checked and reported (smallest eigenvalue), never silently enforced.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import estimation
from .errors import EmptyCategory, InvalidTheta, PolychoricError
from .model import ContingencyTable

__all__ = ["MISSING", "OrdinalDataset", "CorrelationMatrixResult", "fit_matrix", "pairwise_table"]

#: Integer sentinel for a missing response (categories are coded 1..K).
MISSING = 0


@dataclass(frozen=True)
class OrdinalDataset:
    """N observations of q ordinal items, integer codes 1..K_j per item.

    ``codes[i, j]`` is respondent i's response to item j, with ``MISSING``
    (0) marking absent responses.  ``n_levels[j]`` is the number of
    categories of item j (at least the largest observed code).
    """

    codes: np.ndarray
    item_names: tuple = None
    n_levels: tuple = None

    def __post_init__(self):
        codes = np.array(self.codes, copy=True)
        if codes.ndim != 2 or codes.shape[1] < 2:
            raise InvalidTheta("dataset must be 2-D with at least 2 items")
        if not np.issubdtype(codes.dtype, np.integer):
            rounded = np.rint(codes)
            if not np.allclose(codes, rounded, equal_nan=False):
                raise InvalidTheta("category codes must be integers")
            codes = rounded.astype(np.int64)
        else:
            codes = codes.astype(np.int64)
        if np.any(codes < 0):
            raise InvalidTheta("category codes must be >= 1 (0 marks missing)")
        names = self.item_names or tuple(f"item_{j + 1}" for j in range(codes.shape[1]))
        if len(names) != codes.shape[1]:
            raise InvalidTheta("item_names length must match the number of items")
        levels = []
        for j in range(codes.shape[1]):
            observed = codes[codes[:, j] != MISSING, j]
            if observed.size == 0 or np.unique(observed).size < 2:
                raise InvalidTheta(f"item {names[j]!r} needs at least 2 observed categories")
            declared = None if self.n_levels is None else int(self.n_levels[j])
            k = int(observed.max()) if declared is None else declared
            if k < observed.max():
                raise InvalidTheta(f"item {names[j]!r} has codes above its declared level count")
            levels.append(k)
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "item_names", tuple(names))
        object.__setattr__(self, "n_levels", tuple(levels))

    @property
    def n(self):
        return self.codes.shape[0]

    @property
    def q(self):
        return self.codes.shape[1]


@dataclass
class CorrelationMatrixResult:
    """Pairwise polychoric correlation matrix with per-pair detail.

    ``estimates`` is symmetric with unit diagonal; entries of failed pairs
    are NaN ("holes") with the reason recorded in ``failures``.
    ``std_errors`` has zero diagonal.  ``min_eigenvalue`` refers to the
    estimates matrix (NaN entries replaced by 0 for the check); a negative
    value only produces the ``not-positive-definite`` warning.
    """

    estimates: np.ndarray
    std_errors: np.ndarray
    per_pair: dict
    pair_n: np.ndarray
    item_names: tuple
    warnings: dict
    failures: dict
    min_eigenvalue: float
    method: str

    @property
    def positive_definite(self):
        return self.min_eigenvalue > 0.0


def pairwise_table(data, i, j):
    """Contingency table of items (i, j) over their complete cases, 0-based."""
    codes = data.codes
    mask = (codes[:, i] != MISSING) & (codes[:, j] != MISSING)
    xi = codes[mask, i]
    xj = codes[mask, j]
    if xi.size < 2:
        raise EmptyCategory(f"items {i} and {j} share fewer than 2 complete observations")
    counts = np.zeros((data.n_levels[i], data.n_levels[j]), dtype=np.int64)
    np.add.at(counts, (xi - 1, xj - 1), 1)
    return ContingencyTable(counts=counts)


def _fit_pair(table, method, cfg, opts):
    if method == "two-step":
        return estimation.fit_twostep(table)
    if method == "ml":
        return estimation.fit(table, estimation.ML_CONFIG, opts)
    return estimation.fit(table, cfg, opts)


def fit_matrix(data, cfg=None, opts=None, method="robust"):
    """Pairwise polychoric correlation matrix of an ordinal dataset.

    Parameters
    ----------
    data : OrdinalDataset
    cfg : DiscrepancyConfig, optional
        Tuning for the robust method (ignored for ``method="ml"``).
    opts : FitOptions, optional
    method : {"robust", "ml", "two-step"}

    Pairs are statistically independent given the data, fitted one at a
    time (deterministic given fixed options), and assembled by index; a
    pair that fails leaves a NaN hole and a recorded reason.
    """
    if method not in ("robust", "ml", "two-step"):
        raise ValueError(f"unknown method {method!r}")
    cfg = cfg or estimation.DiscrepancyConfig()
    opts = opts or estimation.FitOptions()
    q = data.q
    estimates = np.eye(q)
    std_errors = np.zeros((q, q))
    pair_n = np.zeros((q, q), dtype=np.int64)
    np.fill_diagonal(pair_n, data.n)
    per_pair = {}
    warnings = {}
    failures = {}
    for i in range(q):
        for j in range(i + 1, q):
            try:
                table = pairwise_table(data, i, j)
                pair_n[i, j] = pair_n[j, i] = table.n
                result = _fit_pair(table, method, cfg, opts)
            except PolychoricError as exc:
                estimates[i, j] = estimates[j, i] = np.nan
                std_errors[i, j] = std_errors[j, i] = np.nan
                failures[(i, j)] = f"{type(exc).__name__}: {exc}"
                continue
            per_pair[(i, j)] = result
            estimates[i, j] = estimates[j, i] = result.rho
            se = result.se_rho
            std_errors[i, j] = std_errors[j, i] = np.nan if se is None else se
            if result.instability:
                warnings[(i, j)] = list(result.instability)
    checked = np.where(np.isnan(estimates), 0.0, estimates)
    np.fill_diagonal(checked, 1.0)
    min_eig = float(np.linalg.eigvalsh(checked).min())
    agg = dict(warnings)
    if min_eig <= 0.0:
        agg[("matrix",)] = ["not-positive-definite"]
    return CorrelationMatrixResult(
        estimates=estimates,
        std_errors=std_errors,
        per_pair=per_pair,
        pair_n=pair_n,
        item_names=data.item_names,
        warnings=agg,
        failures=failures,
        min_eigenvalue=min_eig,
        method=method,
    )
