"""Bivariate normal numerics against independent oracles.

Analytic derivatives are checked against central finite differences; the
CDF against adaptive 2-D quadrature of the density (frozen values in
``_bvn_oracle``, plus a live spot check) and against arcsine/quadrant
closed forms.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad

from polychoric import bvn
from polychoric.errors import DomainError

from _bvn_oracle import BIV_CDF_QUADRATURE

GRID_UV = (-2.0, -1.0, 0.0, 1.0, 2.0)
GRID_RHO = (-0.8, -0.3, 0.0, 0.3, 0.8)
FD_STEP = 1e-5


def fd_central(fn, x, h=FD_STEP):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def close_first_order(analytic, numeric):
    return abs(analytic - numeric) <= 1e-6 * max(abs(analytic), abs(numeric)) + 1e-8


def close_second_order(analytic, numeric):
    return abs(analytic - numeric) <= 1e-5 * max(abs(analytic), abs(numeric)) + 1e-8


class TestUnivariate:
    def test_pdf_at_zero(self):
        assert bvn.uni_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-12)
        assert bvn.uni_pdf(0.0) == pytest.approx(0.3989422804, abs=1e-9)

    def test_pdf_tails(self):
        assert bvn.uni_pdf(np.inf) == 0.0
        assert bvn.uni_pdf(-np.inf) == 0.0

    def test_pdf_at_one(self):
        # closed form evaluated at double precision
        assert bvn.uni_pdf(1.0) == pytest.approx(math.exp(-0.5) / math.sqrt(2 * math.pi), abs=1e-14)
        assert bvn.uni_pdf(1.0) == pytest.approx(0.2419707245, abs=1e-9)

    def test_cdf_symmetry(self):
        assert bvn.uni_cdf(0.0) == 0.5
        assert bvn.uni_cdf(np.inf) == 1.0
        assert bvn.uni_cdf(-np.inf) == 0.0

    def test_quantile_round_trip(self):
        # 1e-10 is achievable wherever Phi(u) keeps enough relative precision;
        # in the far upper tail the half-ulp spacing of doubles near 1 already
        # costs ulp/(2*phi(u)) ~ 5e-9 at u = 6, so that region gets the bound
        # dictated by the representation, not by the algorithm.
        for u in np.linspace(-6.0, 5.2, 29):
            assert abs(bvn.uni_quantile(bvn.uni_cdf(u)) - u) <= 1e-10
        for u in np.linspace(5.2, 6.0, 5):
            assert abs(bvn.uni_quantile(bvn.uni_cdf(u)) - u) <= 1e-8

    def test_quantile_values(self):
        assert bvn.uni_quantile(0.5) == 0.0
        # two-decimal value used by the simulation designs
        assert round(bvn.uni_quantile(0.1), 2) == -1.28
        # frozen from a brentq root-find on uni_cdf
        assert bvn.uni_quantile(0.975) == pytest.approx(1.9599639845400532, abs=1e-12)

    def test_quantile_domain(self):
        for p in (0.0, 1.0, -0.1, 1.1):
            with pytest.raises(DomainError):
                bvn.uni_quantile(p)


class TestBivPdf:
    def test_center_values(self):
        assert bvn.biv_pdf(0.0, 0.0, 0.0) == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-14)
        assert bvn.biv_pdf(0.0, 0.0, 0.5) == pytest.approx(1.0 / (2.0 * math.pi * math.sqrt(0.75)), abs=1e-14)

    def test_tail_limit(self):
        assert bvn.biv_pdf(np.inf, 0.0, 0.3) == 0.0
        assert bvn.biv_pdf(0.0, -np.inf, 0.3) == 0.0

    def test_symmetric_in_arguments(self):
        assert bvn.biv_pdf(0.7, -1.2, 0.4) == pytest.approx(bvn.biv_pdf(-1.2, 0.7, 0.4), abs=0.0)

    def test_rejects_unit_correlation(self):
        for rho in (1.0, -1.0, 1.5):
            with pytest.raises(DomainError):
                bvn.biv_pdf(0.0, 0.0, rho)


class TestBivCdf:
    def test_quadrant_probability(self):
        assert bvn.biv_cdf(0.0, 0.0, 0.0) == pytest.approx(0.25, abs=1e-13)

    def test_arcsine_closed_form(self):
        # Phi2(0, 0, rho) = 1/4 + arcsin(rho) / (2 pi), exact for any rho
        for rho in (-0.999999, -0.995, -0.8, -0.3, 0.3, 0.5, 0.9, 0.99, 0.995, 0.999999):
            expected = 0.25 + math.asin(rho) / (2.0 * math.pi)
            assert bvn.biv_cdf(0.0, 0.0, rho) == pytest.approx(expected, abs=1e-12), rho
        assert bvn.biv_cdf(0.0, 0.0, 0.5) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_marginalization(self):
        assert bvn.biv_cdf(np.inf, 0.0, 0.7) == pytest.approx(0.5, abs=1e-14)
        assert bvn.biv_cdf(1.3, np.inf, -0.4) == pytest.approx(bvn.uni_cdf(1.3), abs=1e-13)
        assert bvn.biv_cdf(np.inf, np.inf, 0.2) == 1.0
        assert bvn.biv_cdf(-np.inf, 1.0, 0.2) == 0.0

    def test_matches_frozen_quadrature_oracle(self):
        for (u, v, rho), expected in BIV_CDF_QUADRATURE.items():
            assert abs(bvn.biv_cdf(u, v, rho) - expected) <= 1e-10, (u, v, rho)

    def test_live_quadrature_spot_check(self):
        # keep the oracle runnable, not only frozen
        def density(s, t, rho):
            return bvn.biv_pdf(t, s, rho)

        for u, v, rho in ((-1.0, 0.5, 0.6), (0.5, -0.5, -0.45), (1.5, 2.0, 0.95)):
            expected, err = dblquad(density, -9.0, u, -9.0, v, args=(rho,), epsabs=1e-13, epsrel=1e-12)
            assert err < 1e-11
            assert abs(bvn.biv_cdf(u, v, rho) - expected) <= 1e-10

    def test_monotone_in_each_argument(self):
        grid = np.linspace(-2.5, 2.5, 11)
        for rho in GRID_RHO:
            values = bvn.biv_cdf(grid[:, None], grid[None, :], rho)
            assert np.all(np.diff(values, axis=0) >= -1e-14)
            assert np.all(np.diff(values, axis=1) >= -1e-14)

    def test_range(self):
        rng = np.random.default_rng(1)
        u, v = rng.normal(size=(2, 200)) * 2.5
        for rho in (-0.999, -0.5, 0.0, 0.7, 0.999):
            values = bvn.biv_cdf(u, v, rho)
            assert np.all(values >= 0.0) and np.all(values <= 1.0)

    def test_reflection_identity(self):
        # Phi2(-u, -v, rho) = 1 - Phi(u) - Phi(v) + Phi2(u, v, rho)
        for u in GRID_UV:
            for v in GRID_UV:
                for rho in GRID_RHO:
                    lhs = bvn.biv_cdf(-u, -v, rho)
                    rhs = 1.0 - bvn.uni_cdf(u) - bvn.uni_cdf(v) + bvn.biv_cdf(u, v, rho)
                    assert abs(lhs - rhs) <= 1e-10

    def test_clamping(self):
        value, flagged = bvn.clamp_correlation(0.9999999)
        assert flagged and value == bvn.RHO_CLAMP_BOUND
        value, flagged = bvn.clamp_correlation(-0.5)
        assert not flagged and value == -0.5
        # CDF evaluation applies the clamp instead of failing
        assert 0.0 <= bvn.biv_cdf(0.3, 0.1, 0.99999999) <= 1.0

    @settings(max_examples=60, deadline=None)
    @given(
        u=st.floats(-3.5, 3.5),
        v=st.floats(-3.5, 3.5),
        rho=st.floats(-0.99, 0.99),
    )
    def test_symmetry_property(self, u, v, rho):
        assert bvn.biv_cdf(u, v, rho) == pytest.approx(bvn.biv_cdf(v, u, rho), abs=1e-13)


class TestFirstDerivatives:
    def test_d_rho_equals_density(self):
        assert bvn.d_cdf_d_rho(0.0, 0.0, 0.0) == pytest.approx(1.0 / (2 * math.pi), abs=1e-14)
        for u, v, rho in ((0.4, -1.0, 0.25), (2.0, 2.0, -0.6)):
            assert bvn.d_cdf_d_rho(u, v, rho) == bvn.biv_pdf(u, v, rho)

    def test_d_rho_finite_difference(self):
        val = bvn.d_cdf_d_rho(1.0, -1.0, 0.2)
        num = fd_central(lambda r: bvn.biv_cdf(1.0, -1.0, r), 0.2)
        assert abs(val - num) <= 1e-7

    def test_d_rho_grid(self):
        for u in GRID_UV:
            for v in GRID_UV:
                for rho in GRID_RHO:
                    analytic = bvn.d_cdf_d_rho(u, v, rho)
                    numeric = fd_central(lambda r: bvn.biv_cdf(u, v, r), rho)
                    assert close_first_order(analytic, numeric), (u, v, rho)

    def test_d_rho_boundary_convention(self):
        assert bvn.d_cdf_d_rho(-np.inf, 0.0, 0.4) == 0.0
        assert bvn.d_cdf_d_rho(0.0, np.inf, 0.4) == 0.0

    def test_d_u_special_values(self):
        assert bvn.d_cdf_d_u(0.0, np.inf, 0.5) == pytest.approx(0.3989422804, abs=1e-9)
        assert bvn.d_cdf_d_u(0.0, 0.0, 0.0) == pytest.approx(0.1994711402, abs=1e-9)
        assert bvn.d_cdf_d_u(np.inf, 0.3, 0.5) == 0.0
        assert bvn.d_cdf_d_u(-np.inf, 0.3, 0.5) == 0.0

    def test_d_u_finite_difference(self):
        analytic = bvn.d_cdf_d_u(0.5, -0.5, 0.3)
        numeric = fd_central(lambda x: bvn.biv_cdf(x, -0.5, 0.3), 0.5)
        assert abs(analytic - numeric) <= 1e-7

    def test_d_u_grid(self):
        for u in GRID_UV:
            for v in GRID_UV:
                for rho in GRID_RHO:
                    analytic = bvn.d_cdf_d_u(u, v, rho)
                    numeric = fd_central(lambda x: bvn.biv_cdf(x, v, rho), u)
                    assert close_first_order(analytic, numeric), (u, v, rho)

    @settings(max_examples=40, deadline=None)
    @given(
        u=st.floats(-3.0, 3.0),
        v=st.floats(-3.0, 3.0),
        rho=st.floats(-0.95, 0.95),
    )
    def test_v_twin_by_swapping(self, u, v, rho):
        assert bvn.d_cdf_d_u(u, v, rho) == bvn.d_cdf_d_v(v, u, rho)

    def test_rejects_unit_correlation(self):
        with pytest.raises(DomainError):
            bvn.d_cdf_d_u(0.0, 0.0, 1.0)
        with pytest.raises(DomainError):
            bvn.d_cdf_d_rho(0.0, 0.0, -1.0)


class TestSecondDerivatives:
    def test_mixed_uv_at_center(self):
        assert bvn.d2_cdf_d_u_d_v(0.0, 0.0, 0.0) == pytest.approx(1.0 / (2 * math.pi), abs=1e-14)

    def test_d_u2_at_center(self):
        assert bvn.d2_cdf_d_u2(0.0, 0.0, 0.0) == 0.0

    def test_d_rho2_finite_difference(self):
        analytic = bvn.d2_cdf_d_rho2(0.3, -0.2, 0.4)
        numeric = fd_central(lambda r: bvn.d_cdf_d_rho(0.3, -0.2, r), 0.4)
        assert abs(analytic - numeric) <= 1e-6 * max(abs(analytic), abs(numeric)) + 1e-10

    def test_grids_against_finite_differences(self):
        for u in GRID_UV:
            for v in GRID_UV:
                for rho in GRID_RHO:
                    checks = (
                        (bvn.d2_cdf_d_rho2(u, v, rho),
                         fd_central(lambda r: bvn.d_cdf_d_rho(u, v, r), rho)),
                        (bvn.d2_cdf_d_u2(u, v, rho),
                         fd_central(lambda x: bvn.d_cdf_d_u(x, v, rho), u)),
                        (bvn.d2_cdf_d_u_d_rho(u, v, rho),
                         fd_central(lambda r: bvn.d_cdf_d_u(u, v, r), rho)),
                        (bvn.d2_cdf_d_u_d_v(u, v, rho),
                         fd_central(lambda y: bvn.d_cdf_d_u(u, y, rho), v)),
                    )
                    for analytic, numeric in checks:
                        assert close_second_order(analytic, numeric), (u, v, rho)

    def test_infinite_arguments_vanish(self):
        for fn in (bvn.d2_cdf_d_rho2, bvn.d2_cdf_d_u2, bvn.d2_cdf_d_u_d_rho, bvn.d2_cdf_d_u_d_v):
            assert fn(np.inf, 0.5, 0.3) == 0.0
        assert bvn.d2_cdf_d_rho2(0.5, -np.inf, 0.3) == 0.0
        assert bvn.d2_cdf_d_u_d_v(0.5, np.inf, 0.3) == 0.0
        # d2/du2 at v = +inf reduces to the univariate phi'(u) = -u phi(u)
        assert bvn.d2_cdf_d_u2(0.7, np.inf, 0.3) == pytest.approx(-0.7 * bvn.uni_pdf(0.7), abs=1e-14)

    def test_v_twins(self):
        assert bvn.d2_cdf_d_v2(0.4, -0.3, 0.25) == bvn.d2_cdf_d_u2(-0.3, 0.4, 0.25)
        assert bvn.d2_cdf_d_v_d_rho(0.4, -0.3, 0.25) == bvn.d2_cdf_d_u_d_rho(-0.3, 0.4, 0.25)

    def test_rejects_unit_correlation(self):
        with pytest.raises(DomainError):
            bvn.d2_cdf_d_rho2(0.0, 0.0, 1.0)
