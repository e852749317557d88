"""Closed-form degree, isolation and threshold quantities for the Poisson model.

Good nodes have intensity 1, eavesdroppers intensity ``lam``; ``r`` is the
transmission range and may be ``math.inf``.  ``lam == 0`` and ``r == inf``
are handled by their own closed forms (Poisson and geometric cases).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pointprocess import ParameterError

INF = math.inf

# area of two radius-R discs at centre distance R, in units of pi R^2
C_TWO_DISKS = 4 / 3 + math.sqrt(3) / (2 * math.pi)
# disc minus the segment of height R/2, in units of pi R^2
BOUND_A = 2 / 3 + math.sqrt(3) / (4 * math.pi)
BOUND_B = 1 / 4
FIT_B = 4.0
FIT_A = 2 * math.sqrt(2)
LAMBDA_INF_REF = 0.1499
R_GILBERT_REF = 1.198


@dataclass(frozen=True)
class Constants:
    c: float = C_TWO_DISKS
    bound_a: float = BOUND_A
    bound_b: float = BOUND_B
    fit_a: float = FIT_A
    fit_b: float = FIT_B
    lambda_inf_ref: float = LAMBDA_INF_REF
    r_G_ref: float = R_GILBERT_REF


CONSTANTS = Constants()


@dataclass(frozen=True)
class ModelParams:
    lam: float
    r: float = INF

    def __post_init__(self):
        check_params(self.lam, self.r)


def check_params(lam: float, r: float, allow_degenerate: bool = False) -> None:
    if not (lam >= 0 and math.isfinite(lam)):
        raise ParameterError(f"lambda must be finite and >= 0, got {lam}")
    if not r > 0:
        raise ParameterError(f"r must be > 0, got {r}")
    if not allow_degenerate and lam == 0 and math.isinf(r):
        raise ParameterError("(lambda, r) = (0, inf) is degenerate")


def _logsumexp(terms: list[float]) -> float:
    m = max(terms)
    if m == -INF:
        return -INF
    return m + math.log(math.fsum(math.exp(t - m) for t in terms))


def regularized_upper_gamma_int(n: int, a: float) -> float:
    """Q(n, a) = Gamma(n, a) / Gamma(n) for integer n, with Q(0, a) = 0.

    Uses exp(-a) * sum_{k<n} a^k / k!, accumulated as a running product and
    switching to log space once exp(-a) would underflow.
    """
    if int(n) != n or n < 0:
        raise ParameterError(f"order must be a non-negative integer, got {n}")
    if not a >= 0:
        raise ParameterError(f"argument must be >= 0, got {a}")
    n = int(n)
    if n == 0:
        return 0.0
    if math.isinf(a):
        return 0.0
    if a == 0:
        return 1.0
    if a < 700:
        term = math.exp(-a)
        total = term
        for k in range(1, n):
            term *= a / k
            total += term
        return min(total, 1.0)
    log_a = math.log(a)
    logs = []
    lt = -a
    for k in range(n):
        if k:
            lt += log_a - math.log(k)
        logs.append(lt)
    return min(math.exp(_logsumexp(logs)), 1.0)


def regularized_lower_gamma_int(n: int, a: float) -> float:
    """P(n, a) = 1 - Q(n, a), summed directly when a < n to keep relative accuracy."""
    if n == 0:
        return 1.0
    if a >= n or a == 0:
        return 1.0 - regularized_upper_gamma_int(n, a)
    # P(n, a) = exp(-a) sum_{k>=n} a^k / k!
    term = math.exp(-a + n * math.log(a) - math.lgamma(n + 1))
    total = 0.0
    k = n
    while term > 1e-17 * total:
        total += term
        k += 1
        term *= a / k
    return min(total, 1.0)


def _poisson_logpmf(n: int, mean: float) -> float:
    if mean == 0:
        return 0.0 if n == 0 else -INF
    return -mean + n * math.log(mean) - math.lgamma(n + 1)


def out_isolation(lam: float, r: float = INF) -> float:
    """P[N_out = 0] = (exp(-pi r^2 (lam+1)) + lam) / (1 + lam)."""
    check_params(lam, r)
    if math.isinf(r):
        return lam / (lam + 1)
    return (math.exp(-math.pi * r * r * (lam + 1)) + lam) / (1 + lam)


def basic_isolation(lam: float) -> float:
    """c*lam / (c*lam + 1) for r = inf (0 when lam = 0)."""
    if not (lam >= 0 and math.isfinite(lam)):
        raise ParameterError(f"lambda must be finite and >= 0, got {lam}")
    return C_TWO_DISKS * lam / (C_TWO_DISKS * lam + 1)


def out_degree_pmf(lam: float, r: float, n: int) -> float:
    """Probability that a typical node has out-degree ``n``."""
    check_params(lam, r)
    if int(n) != n or n < 0:
        raise ParameterError(f"n must be a non-negative integer, got {n}")
    n = int(n)
    if math.isinf(r):
        return math.exp(math.log(lam / (1 + lam)) - n * math.log1p(lam))
    if lam == 0:
        return math.exp(_poisson_logpmf(n, math.pi * r * r))
    a = math.pi * r * r * (lam + 1)
    log_scale = -(n + 1) * math.log1p(lam)
    first = lam * regularized_lower_gamma_int(n, a) * math.exp(log_scale)
    second = math.exp(_poisson_logpmf(n, a) + log_scale)
    return first + second


def out_degree_pmf_array(lam: float, r: float, nmax: int) -> np.ndarray:
    return np.array([out_degree_pmf(lam, r, k) for k in range(nmax + 1)])


def mean_out_degree(lam: float, r: float = INF) -> float:
    """(1/lam)(1 - exp(-lam pi r^2)); pi r^2 at lam = 0, 1/lam at r = inf."""
    check_params(lam, r)
    if math.isinf(r):
        return 1 / lam
    area = math.pi * r * r
    if lam == 0:
        return area
    return -math.expm1(-lam * area) / lam


def mean_basic_degree(lam: float, r: float = INF) -> float:
    """(1/(c lam))(1 - exp(-c lam pi r^2))."""
    check_params(lam, r)
    if math.isinf(r):
        return 1 / (C_TWO_DISKS * lam)
    area = math.pi * r * r
    if lam == 0:
        return area
    return -math.expm1(-C_TWO_DISKS * lam * area) / (C_TWO_DISKS * lam)


def mean_enhanced_degree(lam: float, r: float = INF) -> float:
    return 2 * mean_out_degree(lam, r) - mean_basic_degree(lam, r)


def secrecy_ratios(lam: float, r: float) -> tuple[float, float]:
    """(eta, eta') relative to the disk graph with mean degree pi r^2."""
    check_params(lam, r, allow_degenerate=True)
    if math.isinf(r):
        raise ParameterError("secrecy ratios need a finite range")
    area = math.pi * r * r
    x = C_TWO_DISKS * lam * area
    eta = 1.0 if x == 0 else -math.expm1(-x) / x
    return eta, mean_enhanced_degree(lam, r) / area


def basic_to_enhanced_floor() -> float:
    """Limit of E[N]/E[N'] as lam r^2 -> inf: 1/(2c - 1) = 3 pi / (5 pi + 3 sqrt 3)."""
    return 1 / (2 * C_TWO_DISKS - 1)


@dataclass(frozen=True)
class CdfBounds:
    lower: float
    upper: float
    mean_lower: float
    mean_upper: float


def basic_cdf_bounds(lam: float, n: int) -> CdfBounds:
    """Geometric bounds on P[N <= n] in the basic graph with r = inf."""
    if not lam > 0:
        raise ParameterError("lambda must be > 0")
    if int(n) != n or n < 0:
        raise ParameterError(f"n must be a non-negative integer, got {n}")
    lo = 1 - (BOUND_A / (BOUND_A + lam)) ** (n + 1)
    hi = 1 - (BOUND_B / (BOUND_B + lam)) ** (n + 1)
    return CdfBounds(lo, hi, BOUND_B / lam, BOUND_A / lam)


@dataclass(frozen=True)
class Regimes:
    lam: float
    r_T: float
    slope: float

    def piecewise_bound(self, r: float) -> float:
        return min(self.slope * r, 1 / self.lam)

    def r_eps(self, eps: float) -> float:
        if not 0 < eps < 1:
            raise ParameterError(f"eps must lie in (0, 1), got {eps}")
        return math.sqrt(-math.log(eps) / (self.lam * math.pi))

    def power_limited(self, r: float) -> bool:
        return 2 * math.pi * r * r < 1 / self.lam


def regime_descriptors(lam: float) -> Regimes:
    """Inflection point r_T = (2 pi lam)^(-1/2) and maximum slope of E N_out(r)."""
    if not lam > 0:
        raise ParameterError("lambda must be > 0")
    return Regimes(lam, (2 * math.pi * lam) ** -0.5, math.sqrt(2 * math.pi / (math.e * lam)))


def critical_lambda_approx(r: float, lambda_inf: float = LAMBDA_INF_REF,
                           a: float = FIT_A, b: float = FIT_B) -> float:
    """Fitted critical eavesdropper density lambda_inf - exp(a - b r), for r > r_G."""
    if not r > R_GILBERT_REF:
        raise ParameterError(f"r must exceed r_G = {R_GILBERT_REF}, got {r}")
    return lambda_inf - math.exp(a - b * r)


def critical_radius_approx(lam: float, lambda_inf: float = LAMBDA_INF_REF,
                           a: float = FIT_A, b: float = FIT_B) -> float:
    """Inverse of :func:`critical_lambda_approx`: a/b - log(lambda_inf - lam)/b."""
    if not 0 <= lam < lambda_inf:
        raise ParameterError(f"lambda must lie in [0, {lambda_inf}), got {lam}")
    return a / b - math.log(lambda_inf - lam) / b


def conjectured_slope(lambda_inf: float = LAMBDA_INF_REF, b: float = FIT_B) -> float:
    """Slope 1/(b lambda_inf) of the linear lower bound on r_c(lam)."""
    return 1 / (b * lambda_inf)


def critical_radius_lower_bound(lam: float) -> float:
    return R_GILBERT_REF + conjectured_slope() * lam


@dataclass(frozen=True)
class CriticalGraphApprox:
    p_isol: float
    mean_deg_lower: float
    mean_out_fit: float


def critical_graph_approx(lam: float) -> CriticalGraphApprox:
    """Empirical isolation law 1/80 + 4 lam/5 and the bound pi r_G^2 + 11 lam/4.

    ``mean_out_fit`` evaluates the mean out-degree along the fitted r_c(lam)
    curve; it tends to 1/lambda_inf as lam approaches lambda_inf.
    """
    if not 0 <= lam < LAMBDA_INF_REF:
        raise ParameterError(f"lambda must lie in [0, {LAMBDA_INF_REF}), got {lam}")
    fit = mean_out_degree(lam, critical_radius_approx(lam))
    return CriticalGraphApprox(1 / 80 + 0.8 * lam, math.pi * R_GILBERT_REF ** 2 + 2.75 * lam, fit)


def range_from_power(power: float, theta: float, noise: float, alpha: float) -> float:
    """Range (P / (Theta W))^(1/alpha) at which the SNR equals Theta."""
    for name, v in (("P", power), ("Theta", theta), ("W", noise), ("alpha", alpha)):
        if not (v > 0 and math.isfinite(v)):
            raise ParameterError(f"{name} must be positive and finite, got {v}")
    return (power / (theta * noise)) ** (1 / alpha)


@dataclass(frozen=True)
class ReferenceDensities:
    lam: float

    def nearest_eaves_pdf(self, x):
        x = np.asarray(x, dtype=float)
        return 2 * np.pi * self.lam * x * np.exp(-np.pi * self.lam * x * x)

    def nearest_eaves_cdf(self, x):
        x = np.asarray(x, dtype=float)
        return -np.expm1(-np.pi * self.lam * x * x)

    @property
    def rayleigh_edge_mean(self) -> float:
        return 1 / (2 * math.sqrt(self.lam))


def reference_densities(lam: float) -> ReferenceDensities:
    if not lam > 0:
        raise ParameterError("lambda must be > 0")
    return ReferenceDensities(lam)


QUANTITIES = {
    "out_isolation": lambda lam, r, n: out_isolation(lam, r),
    "basic_isolation": lambda lam, r, n: basic_isolation(lam),
    "out_degree_pmf": lambda lam, r, n: out_degree_pmf(lam, r, n),
    "mean_out_degree": lambda lam, r, n: mean_out_degree(lam, r),
    "mean_basic_degree": lambda lam, r, n: mean_basic_degree(lam, r),
    "mean_enhanced_degree": lambda lam, r, n: mean_enhanced_degree(lam, r),
    "eta": lambda lam, r, n: secrecy_ratios(lam, r)[0],
    "eta_prime": lambda lam, r, n: secrecy_ratios(lam, r)[1],
    "r_T": lambda lam, r, n: regime_descriptors(lam).r_T,
    "lambda_c_approx": lambda lam, r, n: critical_lambda_approx(r),
    "r_c_approx": lambda lam, r, n: critical_radius_approx(lam),
}
