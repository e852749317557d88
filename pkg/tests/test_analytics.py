import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special, stats

from secgraph import analytics as an
from secgraph.pointprocess import ParameterError


def pmf_by_quadrature(lam, r, n):
    """Mix Poisson(pi min(R, r)^2) over the Rayleigh guard radius R."""
    f = lambda rho: 2 * math.pi * lam * rho * math.exp(-math.pi * lam * rho * rho) \
        * stats.poisson.pmf(n, math.pi * rho * rho)
    body, _ = integrate.quad(f, 0, r, epsabs=1e-13, limit=200)
    return body + math.exp(-math.pi * lam * r * r) * stats.poisson.pmf(n, math.pi * r * r)


def test_constants():
    assert an.C_TWO_DISKS == pytest.approx(1.60899, abs=1e-5)
    assert an.BOUND_A == pytest.approx(0.8045, abs=1e-4)
    assert an.FIT_A == pytest.approx(2.828, abs=1e-3)
    assert an.basic_to_enhanced_floor() == pytest.approx(3 * math.pi / (5 * math.pi + 3 * math.sqrt(3)))
    assert an.basic_to_enhanced_floor() == pytest.approx(0.4509, abs=1e-4)


def test_fit_constants_relation():
    # the fitted offset is close to, not equal to, log(lambda_inf) + b r_G
    assert abs(an.FIT_A - (math.log(an.LAMBDA_INF_REF) + an.FIT_B * an.R_GILBERT_REF)) < 0.1


@pytest.mark.parametrize("n,a", [(0, 1.0), (1, 0.5), (3, 2.0), (10, 7.5), (40, 30.0), (5, 800.0), (200, 150.0)])
def test_incomplete_gamma_against_scipy(n, a):
    if n == 0:
        assert an.regularized_upper_gamma_int(0, a) == 0.0
        return
    assert an.regularized_upper_gamma_int(n, a) == pytest.approx(special.gammaincc(n, a), rel=1e-12, abs=1e-300)
    assert an.regularized_lower_gamma_int(n, a) == pytest.approx(special.gammainc(n, a), rel=1e-11, abs=1e-15)


def test_incomplete_gamma_frozen_value():
    assert an.regularized_upper_gamma_int(3, 2.0) == pytest.approx(5 * math.exp(-2), rel=1e-14)
    assert an.regularized_upper_gamma_int(3, 2.0) == pytest.approx(0.676676, abs=1e-6)
    with pytest.raises(ParameterError):
        an.regularized_upper_gamma_int(-1, 1.0)
    with pytest.raises(ParameterError):
        an.regularized_upper_gamma_int(2, -1.0)


@pytest.mark.parametrize("lam", [0.05, 0.2, 1.0, 3.0])
def test_out_isolation(lam):
    assert an.out_isolation(lam) == pytest.approx(lam / (lam + 1))
    assert an.out_isolation(lam, 1.0) == pytest.approx(an.out_degree_pmf(lam, 1.0, 0))


def test_out_isolation_examples():
    assert an.out_isolation(1.0) == 0.5
    assert an.out_isolation(0.0, 1.0) == pytest.approx(math.exp(-math.pi))


def test_basic_isolation_value():
    c = an.C_TWO_DISKS
    assert an.basic_isolation(1.0) == pytest.approx(c / (c + 1))
    assert an.basic_isolation(1.0) == pytest.approx(0.61671, abs=1e-5)


@pytest.mark.parametrize("lam,r", [(0.2, 1.0), (0.05, 2.0), (1.0, 0.5), (0.5, 3.0)])
def test_pmf_matches_quadrature(lam, r):
    for n in range(0, 25, 3):
        assert an.out_degree_pmf(lam, r, n) == pytest.approx(pmf_by_quadrature(lam, r, n), abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.1, 6.0))
def test_pmf_normalised_and_mean(lam, r):
    nmax = int(math.pi * r * r * 3 + 60)
    p = an.out_degree_pmf_array(lam, r, nmax)
    assert p.min() >= 0
    assert p.sum() == pytest.approx(1.0, abs=1e-10)
    assert (np.arange(nmax + 1) * p).sum() == pytest.approx(an.mean_out_degree(lam, r), rel=1e-9)


def test_pmf_limits():
    for n in range(20):
        assert an.out_degree_pmf(0.0, 1.0, n) == pytest.approx(stats.poisson.pmf(n, math.pi), rel=1e-12)
        geo = 0.2 / 1.2 * (1 / 1.2) ** n
        assert an.out_degree_pmf(0.2, math.inf, n) == pytest.approx(geo, rel=1e-12)
        assert an.out_degree_pmf(0.2, 1e4, n) == pytest.approx(geo, rel=1e-8)


@pytest.mark.parametrize("lam,r", [(0.2, 1.0), (0.05, 2.0), (1.0, 0.5)])
def test_means_by_quadrature(lam, r):
    out, _ = integrate.quad(lambda x: 2 * math.pi * x * math.exp(-lam * math.pi * x * x), 0, r)
    basic, _ = integrate.quad(lambda x: 2 * math.pi * x * math.exp(-an.C_TWO_DISKS * lam * math.pi * x * x), 0, r)
    assert an.mean_out_degree(lam, r) == pytest.approx(out, rel=1e-10)
    assert an.mean_basic_degree(lam, r) == pytest.approx(basic, rel=1e-10)
    assert an.mean_enhanced_degree(lam, r) == pytest.approx(2 * out - basic, rel=1e-10)


def test_unbounded_range_means():
    c = an.C_TWO_DISKS
    assert an.mean_out_degree(0.2) == pytest.approx(5.0)
    assert an.mean_basic_degree(1.0) == pytest.approx(1 / c)
    assert an.mean_basic_degree(1.0) == pytest.approx(0.62151, abs=1e-5)
    assert an.mean_enhanced_degree(1.0) == pytest.approx(2 - 1 / c)
    assert an.mean_enhanced_degree(1.0) == pytest.approx(1.37849, abs=1e-5)


def test_secrecy_ratio():
    c = an.C_TWO_DISKS
    r = math.sqrt(1 / (c * 0.1 * math.pi))
    eta, _ = an.secrecy_ratios(0.1, r)
    assert eta == pytest.approx(1 - math.exp(-1))
    with pytest.raises(ParameterError):
        an.secrecy_ratios(0.1, math.inf)


def test_secrecy_ratios_decrease():
    grid = np.linspace(0.2, 5, 30)
    for lam in (0.05, 0.3, 1.0):
        etas = [an.secrecy_ratios(lam, r) for r in grid]
        assert all(a[0] > b[0] and a[1] > b[1] for a, b in zip(etas, etas[1:]))
    for r in (0.5, 2.0):
        etas = [an.secrecy_ratios(lam, r)[0] for lam in np.linspace(0.01, 2, 30)]
        assert all(a > b for a, b in zip(etas, etas[1:]))


def test_basic_over_enhanced_floor():
    eta, eta_p = an.secrecy_ratios(50.0, 50.0)
    assert eta / eta_p == pytest.approx(an.basic_to_enhanced_floor(), rel=1e-9)


def test_cdf_bounds():
    b = an.basic_cdf_bounds(1.0, 0)
    assert b.lower == pytest.approx(0.5542, abs=1e-4)
    assert b.upper == pytest.approx(0.8)
    b = an.basic_cdf_bounds(0.2, 0)
    assert (b.mean_lower, b.mean_upper) == pytest.approx((1.25, 4.0225), abs=1e-4)
    for n in range(30):
        b = an.basic_cdf_bounds(0.2, n)
        assert 0 <= b.lower <= b.upper <= 1


def test_regimes():
    reg = an.regime_descriptors(0.1)
    assert reg.r_T == pytest.approx(math.sqrt(5 / math.pi))
    assert reg.r_T == pytest.approx(1.26, abs=5e-3)
    assert reg.slope == pytest.approx(math.sqrt(20 * math.pi / math.e))
    assert reg.r_eps(0.01) * math.sqrt(0.1) == pytest.approx(1.21, abs=5e-3)
    assert reg.power_limited(1.0) and not reg.power_limited(2.0)
    with pytest.raises(ParameterError):
        reg.r_eps(1.0)


def test_slope_is_maximum_derivative():
    lam = 0.3
    reg = an.regime_descriptors(lam)
    h = 1e-5
    deriv = lambda r: (an.mean_out_degree(lam, r + h) - an.mean_out_degree(lam, r - h)) / (2 * h)
    assert deriv(reg.r_T) == pytest.approx(reg.slope, rel=1e-6)
    assert all(deriv(r) <= reg.slope + 1e-6 for r in np.linspace(0.1, 5, 50))


def test_critical_curve_fit():
    assert an.critical_lambda_approx(2.0) == pytest.approx(0.1499 - math.exp(2 * math.sqrt(2) - 8))
    for lam in (0.02, 0.05, 0.1, 0.149):
        assert an.critical_lambda_approx(an.critical_radius_approx(lam)) == pytest.approx(lam, abs=1e-12)
    for r in (1.3, 2.0, 5.0):
        assert an.critical_radius_approx(an.critical_lambda_approx(r)) == pytest.approx(r, abs=1e-9)
    # the fitted curve meets zero slightly below the reference Gilbert radius
    assert an.critical_radius_approx(0.0) < an.R_GILBERT_REF
    assert 0 < an.critical_lambda_approx(an.R_GILBERT_REF + 1e-12) < 0.01
    assert an.critical_radius_approx(0.1499 - 1e-12) > 7
    assert an.conjectured_slope() == pytest.approx(1 / (4 * 0.1499))
    with pytest.raises(ParameterError):
        an.critical_lambda_approx(1.0)
    with pytest.raises(ParameterError):
        an.critical_radius_approx(0.2)


def test_critical_graph_approx():
    cg = an.critical_graph_approx(0.05)
    assert cg.p_isol == pytest.approx(0.0525)
    assert cg.mean_deg_lower == pytest.approx(math.pi * 1.198 ** 2 + 0.1375)


def test_range_from_power():
    assert an.range_from_power(16.0, 1.0, 1.0, 4.0) == pytest.approx(2.0)
    with pytest.raises(ParameterError):
        an.range_from_power(1.0, 0.0, 1.0, 2.0)


def test_reference_densities():
    ref = an.reference_densities(0.25)
    assert ref.rayleigh_edge_mean == pytest.approx(1.0)
    total, _ = integrate.quad(ref.nearest_eaves_pdf, 0, np.inf)
    assert total == pytest.approx(1.0)


@pytest.mark.parametrize("lam,r", [(-0.1, 1.0), (0.1, 0.0), (0.0, math.inf), (math.nan, 1.0)])
def test_invalid_params(lam, r):
    with pytest.raises(ParameterError):
        an.check_params(lam, r)
