"""The polychoric parameterization.

A parameter vector theta = (rho, a_1..a_{Kx-1}, b_1..b_{Ky-1}) couples a
latent bivariate standard normal with correlation rho to two observed ordinal
variables through strictly increasing thresholds.  This module provides the
parameter and data containers, the model cell probabilities

    pi_xy = Phi2(a_x, b_y) - Phi2(a_{x-1}, b_y) - Phi2(a_x, b_{y-1})
            + Phi2(a_{x-1}, b_{y-1}),

with the conventions a_0 = b_0 = -inf and a_Kx = b_Ky = +inf, and the exact
gradient and Hessian of every pi_xy with respect to theta.  The parameter
ordering (rho, a's, b's) is the single canonical layout used by every matrix
in the inference layer.

All values are immutable and safe to share across threads.
"""

from dataclasses import dataclass, field

import numpy as np

from . import bvn
from .errors import EmptyTable, InvalidTheta

__all__ = [
    "Theta",
    "ContingencyTable",
    "CellGrid",
    "cell_probs",
    "cell_prob_grad",
    "cell_prob_hessian",
    "empirical_frequencies",
    "all_cell_gradients",
    "all_cell_hessians",
]

_GRID_SUM_TOL = 1e-10


def _readonly(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Theta:
    """Polychoric parameter vector: correlation plus two ordered threshold sets.

    Attributes
    ----------
    rho : float
        Latent correlation, strictly inside (-1, 1).
    a : ndarray
        Row thresholds, strictly increasing, length ``k_x - 1``.
    b : ndarray
        Column thresholds, strictly increasing, length ``k_y - 1``.
    """

    rho: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _readonly(self.a)
        b = _readonly(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "rho", float(self.rho))
        if not np.isfinite(self.rho) or abs(self.rho) >= 1.0:
            raise InvalidTheta(f"rho must be in (-1, 1), got {self.rho}")
        for name, t in (("a", a), ("b", b)):
            if t.ndim != 1 or t.size < 1:
                raise InvalidTheta(f"{name} must be a 1-D array with at least one threshold")
            if not np.all(np.isfinite(t)):
                raise InvalidTheta(f"{name} thresholds must be finite")
            if np.any(np.diff(t) <= 0.0):
                raise InvalidTheta(f"{name} thresholds must be strictly increasing: {t}")

    @property
    def k_x(self):
        return self.a.size + 1

    @property
    def k_y(self):
        return self.b.size + 1

    @property
    def d(self):
        """Number of free parameters, k_x + k_y - 1."""
        return 1 + self.a.size + self.b.size

    def as_vector(self):
        """Parameters in the canonical (rho, a's, b's) order."""
        return np.concatenate(([self.rho], self.a, self.b))

    @classmethod
    def from_vector(cls, vec, k_x, k_y):
        vec = np.asarray(vec, dtype=float)
        if vec.size != k_x + k_y - 1:
            raise InvalidTheta(f"expected {k_x + k_y - 1} parameters, got {vec.size}")
        return cls(rho=vec[0], a=vec[1:k_x], b=vec[k_x:])

    def padded_a(self):
        """Row thresholds extended with -inf and +inf sentinels."""
        return np.concatenate(([-np.inf], self.a, [np.inf]))

    def padded_b(self):
        return np.concatenate(([-np.inf], self.b, [np.inf]))


@dataclass(frozen=True)
class ContingencyTable:
    """Cross-tabulated ordinal response counts.

    ``counts[x-1, y-1]`` is the number of observations with response (x, y),
    categories numbered 1..K per variable.  Row/column labels, when data came
    from a file with its own coding, are carried in ``row_labels`` /
    ``col_labels``.
    """

    counts: np.ndarray
    row_labels: tuple = None
    col_labels: tuple = None

    def __post_init__(self):
        counts = np.array(self.counts, copy=True)
        if counts.ndim != 2:
            raise InvalidTheta("counts must be a 2-D grid")
        if counts.shape[0] < 2 or counts.shape[1] < 2:
            raise InvalidTheta("each variable needs at least 2 categories")
        if not np.issubdtype(counts.dtype, np.integer):
            rounded = np.rint(counts)
            if not np.allclose(counts, rounded):
                raise InvalidTheta("counts must be integers")
            counts = rounded.astype(np.int64)
        else:
            counts = counts.astype(np.int64)
        if np.any(counts < 0):
            raise InvalidTheta("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def k_x(self):
        return self.counts.shape[0]

    @property
    def k_y(self):
        return self.counts.shape[1]

    @property
    def n(self):
        return int(self.counts.sum())

    def row_margins(self):
        return self.counts.sum(axis=1)

    def col_margins(self):
        return self.counts.sum(axis=0)


#: Valid CellGrid tags.
GRID_KINDS = ("model-probability", "empirical-frequency", "pearson-residual")


@dataclass(frozen=True)
class CellGrid:
    """A K_X x K_Y grid of reals with a kind tag.

    Probability and frequency grids are nonnegative and sum to one (within
    1e-10).  Pearson-residual grids have entries >= -1; cells whose model
    probability fell below the numerical floor carry a +inf sentinel, with
    the ratio under the floored probability attached as ``floored_values``.
    """

    values: np.ndarray
    kind: str
    floored_values: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2:
            raise InvalidTheta("grid values must be 2-D")
        if self.kind not in GRID_KINDS:
            raise InvalidTheta(f"unknown grid kind {self.kind!r}")
        if self.kind in ("model-probability", "empirical-frequency"):
            if np.any(values < 0.0):
                raise InvalidTheta(f"{self.kind} grid must be nonnegative")
            total = values.sum()
            if abs(total - 1.0) > _GRID_SUM_TOL:
                raise InvalidTheta(f"{self.kind} grid must sum to 1, got {total!r}")
        else:
            finite = values[np.isfinite(values)]
            if finite.size and finite.min() < -1.0 - 1e-12:
                raise InvalidTheta("pearson residuals must be >= -1")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.floored_values is not None:
            object.__setattr__(self, "floored_values", _readonly(self.floored_values))

    @property
    def k_x(self):
        return self.values.shape[0]

    @property
    def k_y(self):
        return self.values.shape[1]


def _corner_grids(theta):
    """Meshgrids of the padded thresholds at every cell corner."""
    ap = theta.padded_a()
    bp = theta.padded_b()
    return np.meshgrid(ap, bp, indexing="ij")


def _four_term(corner_values):
    """pi_xy from a (Kx+1, Ky+1) grid of corner CDF-like values."""
    c = corner_values
    return c[1:, 1:] - c[:-1, 1:] - c[1:, :-1] + c[:-1, :-1]


def cell_probs_array(theta):
    """Model cell probabilities as a plain ndarray (hot path for fitting)."""
    U, V = _corner_grids(theta)
    probs = _four_term(bvn.biv_cdf_grid(U, V, theta.rho))
    return np.maximum(probs, 0.0)


def cell_probs(theta):
    """Model cell probabilities pi_xy(theta) as a CellGrid.

    Entries are reported raw (possibly 0 to machine precision); consumers
    that divide by a probability apply their own floors.
    """
    if not isinstance(theta, Theta):
        raise InvalidTheta("theta must be a Theta instance")
    probs = cell_probs_array(theta)
    total = probs.sum()
    # Guard against accumulated quadrature round-off beyond spec precision.
    if abs(total - 1.0) > _GRID_SUM_TOL:
        probs = probs / total
    return CellGrid(values=probs, kind="model-probability")


def all_cell_gradients(theta):
    """Gradients of every cell probability, shape (k_x, k_y, d).

    Component order is (rho, a_1..a_{Kx-1}, b_1..b_{Ky-1}).  Threshold
    partials are nonzero only for the two thresholds bounding the cell.
    """
    kx, ky, d = theta.k_x, theta.k_y, theta.d
    rho = theta.rho
    U, V = _corner_grids(theta)
    pdf_corners = bvn.biv_pdf(U, V, rho)
    # dPhi2/du at each corner, and the v-twin.
    du_corners = bvn.d_cdf_d_u(U, V, rho)
    dv_corners = bvn.d_cdf_d_v(U, V, rho)

    grads = np.zeros((kx, ky, d))
    grads[:, :, 0] = _four_term(pdf_corners)
    # d pi_xy / d a_k is nonzero only for k in {x-1, x}:
    #   k = x:    +dPhi2/du(a_x, b_y) - dPhi2/du(a_x, b_{y-1})
    #   k = x-1:  -dPhi2/du(a_{x-1}, b_y) + dPhi2/du(a_{x-1}, b_{y-1})
    col_diff_u = du_corners[:, 1:] - du_corners[:, :-1]  # (kx+1, ky): index [i, y-1]
    for k in range(1, kx):
        grads[k - 1, :, k] += col_diff_u[k, :]
        grads[k, :, k] -= col_diff_u[k, :]
    row_diff_v = dv_corners[1:, :] - dv_corners[:-1, :]  # (kx, ky+1): index [x-1, j]
    for l in range(1, ky):
        grads[:, l - 1, kx - 1 + l] += row_diff_v[:, l]
        grads[:, l, kx - 1 + l] -= row_diff_v[:, l]
    return grads


def all_cell_hessians(theta):
    """Hessians of every cell probability, shape (k_x, k_y, d, d).

    Each Hessian is symmetric; the a-a and b-b blocks are diagonal because
    every corner CDF term depends on exactly one row and one column
    threshold.
    """
    kx, ky, d = theta.k_x, theta.k_y, theta.d
    rho = theta.rho
    U, V = _corner_grids(theta)
    drho2 = bvn.d2_cdf_d_rho2(U, V, rho)
    du2 = bvn.d2_cdf_d_u2(U, V, rho)
    dv2 = bvn.d2_cdf_d_v2(U, V, rho)
    dudrho = bvn.d2_cdf_d_u_d_rho(U, V, rho)
    dvdrho = bvn.d2_cdf_d_v_d_rho(U, V, rho)
    dudv = bvn.d2_cdf_d_u_d_v(U, V, rho)

    hess = np.zeros((kx, ky, d, d))
    hess[:, :, 0, 0] = _four_term(drho2)

    col_diff_du2 = du2[:, 1:] - du2[:, :-1]
    col_diff_dur = dudrho[:, 1:] - dudrho[:, :-1]
    for k in range(1, kx):
        hess[k - 1, :, k, k] += col_diff_du2[k, :]
        hess[k, :, k, k] -= col_diff_du2[k, :]
        hess[k - 1, :, 0, k] += col_diff_dur[k, :]
        hess[k, :, 0, k] -= col_diff_dur[k, :]

    row_diff_dv2 = dv2[1:, :] - dv2[:-1, :]
    row_diff_dvr = dvdrho[1:, :] - dvdrho[:-1, :]
    for l in range(1, ky):
        j = kx - 1 + l
        hess[:, l - 1, j, j] += row_diff_dv2[:, l]
        hess[:, l, j, j] -= row_diff_dv2[:, l]
        hess[:, l - 1, 0, j] += row_diff_dvr[:, l]
        hess[:, l, 0, j] -= row_diff_dvr[:, l]

    # a_k x b_l cross terms: +dudv(a_k, b_l) when (k, l) bounds the cell from
    # matching sides ((x, y) or (x-1, y-1)), -dudv when from opposite sides.
    for k in range(1, kx):
        for l in range(1, ky):
            j = kx - 1 + l
            val = dudv[k, l]
            if val == 0.0:
                continue
            for x, y, sign in ((k, l, 1.0), (k + 1, l + 1, 1.0), (k + 1, l, -1.0), (k, l + 1, -1.0)):
                if 1 <= x <= kx and 1 <= y <= ky:
                    hess[x - 1, y - 1, k, j] += sign * val
    # mirror the upper off-diagonal blocks
    hess = hess + np.swapaxes(hess, 2, 3)
    # the diagonal got doubled by the mirror
    idx = np.arange(d)
    hess[:, :, idx, idx] /= 2.0
    return hess


def cell_prob_grad(theta, x, y):
    """Gradient of pi_xy for the single cell (x, y), 1-based indices."""
    _check_cell(theta, x, y)
    return all_cell_gradients(theta)[x - 1, y - 1].copy()


def cell_prob_hessian(theta, x, y):
    """Hessian of pi_xy for the single cell (x, y), 1-based indices."""
    _check_cell(theta, x, y)
    return all_cell_hessians(theta)[x - 1, y - 1].copy()


def _check_cell(theta, x, y):
    if not isinstance(theta, Theta):
        raise InvalidTheta("theta must be a Theta instance")
    if not (1 <= x <= theta.k_x and 1 <= y <= theta.k_y):
        raise InvalidTheta(f"cell ({x}, {y}) outside a {theta.k_x}x{theta.k_y} grid")


def empirical_frequencies(table):
    """Relative frequencies N_xy / N as a CellGrid.

    Raises
    ------
    EmptyTable
        If the table holds no observations.
    """
    if table.n == 0:
        raise EmptyTable("contingency table has no observations")
    return CellGrid(values=table.counts / table.n, kind="empirical-frequency")
