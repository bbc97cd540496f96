"""
Extension operator (F dσ_n)^∨ on the torus, J_0 reference values, and the
L^{p'} tail probe for the extension of the constant density.

For F ≡ 1 the extension factorizes over the circle factors,
(dσ_n)^∨(x_1, ..., x_n) = ∏ J_0(2π|x_ℓ|), so every radial integral the
probe needs is one-dimensional.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from mpmath import mp
from scipy.optimize import bisect

from errors import DimensionMismatchError, DomainError, InconclusiveGrowthError
from geometry import surface_quadrature

SERIES_CUTOFF = 12.0
SERIES_EPS = 1e-17

# First twenty positive zeros of J_0; beyond that McMahon's expansion is
# accurate to double precision.
J0_ZEROS = np.array([
    2.40482555769577276862163187933,
    5.52007811028631064959660411281,
    8.65372791291101221695419871266,
    11.7915344390142816137430449119,
    14.9309177084877859477625939974,
    18.0710639679109225431478829756,
    21.2116366298792589590783933505,
    24.3524715307493027370579447632,
    27.4934791320402547958772882346,
    30.6346064684319751175495789269,
    33.7758202135735686842385463467,
    36.9170983536640439797694930633,
    40.0584257646282392947993073740,
    43.1997917131767303575240727287,
    46.3411883716618140186857888791,
    49.4826098973978171736027615332,
    52.6240518411149960292512853804,
    55.7655107550199793116834927735,
    58.9069839260809421328344066346,
    62.0484691902271698828525002646,
])

# Growth classes of TailProbeResult
CONVERGED = 'converged'
LOGARITHMIC = 'logarithmic'
POLYNOMIAL = 'polynomial'


def _series(r):
    x = 0.25 * r * r
    term = np.ones_like(r)
    total = np.ones_like(r)
    k = 0
    while np.any(np.abs(term) >= SERIES_EPS):
        k += 1
        term = -term * x / (k * k)
        total = total + term
    return total


def _asymptotic(r):
    # Hankel expansion: J_0(r) = sqrt(2/(πr)) (P cos χ - Q sin χ), χ = r - π/4.
    # Terms t_m = a_m(0)/r^m; the sums stop at the smallest term.
    p_sum = np.ones_like(r)
    q_sum = np.zeros_like(r)
    term = np.ones_like(r)
    active = np.ones(r.shape, dtype=bool)
    for m in range(1, 200):
        new = -term * (2 * m - 1) ** 2 / (8.0 * m * r)
        active &= (np.abs(new) < np.abs(term)) & (np.abs(term) >= SERIES_EPS)
        if not np.any(active):
            break
        term = np.where(active, new, term)
        sign = -1.0 if (m // 2) % 2 else 1.0
        contribution = np.where(active, sign * term, 0.0)
        if m % 2:
            q_sum = q_sum + contribution
        else:
            p_sum = p_sum + contribution
    chi = r - math.pi / 4
    return np.sqrt(2.0 / (math.pi * r)) * (p_sum * np.cos(chi) - q_sum * np.sin(chi))


def bessel_j0(r):
    """
    Bessel function J_0 for r ≥ 0.

    Power series up to r = 12, Hankel asymptotic expansion beyond. Accepts a
    scalar or an array and returns the same shape.
    """
    values = np.asarray(r, dtype=float)
    if np.any(values < 0) or np.any(np.isnan(values)):
        raise DomainError("Bessel argument must be non-negative")
    flat = np.atleast_1d(values).ravel()
    out = np.empty_like(flat)
    small = flat <= SERIES_CUTOFF
    if np.any(small):
        out[small] = _series(flat[small])
    if np.any(~small):
        out[~small] = _asymptotic(flat[~small])
    if values.ndim == 0:
        return float(out[0])
    return out.reshape(values.shape)


def bessel_j0_series_mp(r, dps=None):
    """
    Power series for J_0 summed in extended precision, valid for any r ≥ 0.

    Args:
        r: non-negative argument
        dps: decimal digits; by default enough to absorb the cancellation
            between terms of size ~e^r
    """
    if r < 0:
        raise DomainError(f"Bessel argument must be non-negative, got {r}")
    if dps is None:
        dps = 30 + int(r / math.log(10)) + 1
    with mp.workdps(dps):
        x = mp.mpf(r) ** 2 / 4
        term = mp.mpf(1)
        total = mp.mpf(1)
        eps = mp.mpf(10) ** (-25)
        k = 0
        while k < 2 or abs(term) > eps:
            k += 1
            term = -term * x / (k * k)
            total += term
        return float(total)


def bessel_j0_zero(k):
    """k-th positive zero of J_0 (k ≥ 1)."""
    if k < 1:
        raise DomainError(f"Zero index must be ≥ 1, got {k}")
    if k <= len(J0_ZEROS):
        return float(J0_ZEROS[k - 1])
    x = math.pi * (k - 0.25)
    r = 1.0 / x
    r2 = r * r
    return x + r * (0.125 + r2 * (-0.807291666666666666666666666667e-01
                   + r2 * (0.246028645833333333333333333333e+00
                   + r2 * (-0.182443876720610119047619047619e+01
                   + r2 * (0.253364147973439050099206349206e+02
                   + r2 * (-0.567644412135183381139802038240e+03
                   + r2 * (0.186904765282320653831636345064e+05
                   + r2 * (-0.849353580299148769921876983660e+06
                   + r2 * 0.509225462402226769498681286758e+08))))))))


def locate_first_zero(tol=1e-13):
    """First zero of J_0 by bisection on the power-series evaluator."""
    return bisect(bessel_j0, 2.0, 3.0, xtol=tol)


def extension_operator(F, x, grid):
    """
    (F dσ_n)^∨(x) = ∫ e^{2πi x·ξ} F(ξ) dσ_n(ξ) by surface quadrature.

    Args:
        F: vectorized callable on (M, n) angle arrays
        x: point in R^{2n}
        grid: TorusGrid

    Returns:
        complex value
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (grid.ambient_dim,):
        raise DimensionMismatchError(
            f"Point has shape {x.shape}, grid lives in R^{grid.ambient_dim}"
        )

    def integrand(angles):
        theta = 2 * np.pi * angles
        phase = np.cos(theta) @ x[0::2] + np.sin(theta) @ x[1::2]
        return np.exp(2j * np.pi * phase) * F(angles)

    return surface_quadrature(grid, integrand)


def constant_density(angles):
    """F ≡ 1 on the torus."""
    return np.ones(angles.shape[0])


def _panel_edges(radii):
    """Panel edges: zeros of J_0(2πr) below the largest radius, merged with the radii."""
    r_max = max(radii)
    zeros = []
    k = 1
    while True:
        z = bessel_j0_zero(k) / (2 * math.pi)
        if z >= r_max:
            break
        zeros.append(z)
        k += 1
    return np.unique(np.concatenate([[0.0], zeros, np.asarray(radii, dtype=float)]))


def radial_power_profile(p_prime, radii, weight=None, nodes_per_panel=16):
    """
    I(R) = 2π ∫_0^R |J_0(2πr) w(r)|^{p'} r dr at each radius R in ``radii``.

    Gauss–Legendre panels between consecutive zeros of J_0(2πr), so every
    panel integrand is free of sign changes; panel sums are accumulated with
    compensated summation in panel order.

    Args:
        p_prime: exponent > 0
        radii: increasing radii
        weight: optional vectorized radial weight w(r)
        nodes_per_panel: Gauss–Legendre nodes per panel

    Returns:
        numpy array of I(R), one entry per radius
    """
    if not p_prime > 0:
        raise DomainError(f"Exponent must be positive, got {p_prime}")
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise DomainError("Radii must be a non-empty increasing list of positive values")

    edges = _panel_edges(radii)
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    left, right = edges[:-1, None], edges[1:, None]
    half = 0.5 * (right - left)
    r = left + half * (x + 1.0)
    integrand = np.abs(bessel_j0(2 * np.pi * r))
    if weight is not None:
        integrand = integrand * np.abs(weight(r))
    integrand = integrand ** p_prime * (2 * np.pi * r)
    panel_sums = (integrand * (half * w)).sum(axis=1)

    profile = []
    for radius in radii:
        count = int(np.searchsorted(edges, radius, side='right')) - 1
        profile.append(math.fsum(panel_sums[:count]))
    return np.array(profile)


def radial_power_integral(p_prime, radius, weight=None, nodes_per_panel=16):
    """I(R) for a single radius (see radial_power_profile)."""
    return float(radial_power_profile(p_prime, [radius], weight, nodes_per_panel)[0])


def default_radii(r_max, count=6):
    """Dyadic radii r_max/2^(count-1), ..., r_max/2, r_max."""
    return [r_max / 2 ** k for k in range(count - 1, -1, -1)]


@dataclass
class TailProbeResult:
    """Truncated L^{p'} norms of (dσ_n)^∨ over growing balls, with a growth class."""

    p_prime: float
    n: int
    radii: list
    truncated_norms: list
    growth_class: str
    slope: float
    increment_exponent: float
    fit_residual: float = float('nan')
    last_increment: float = float('nan')
    details: dict = field(default_factory=dict)

    def rows(self):
        return [(self.p_prime, self.n, r, v) for r, v in zip(self.radii, self.truncated_norms)]


def _loglog_slope(x, y):
    coeffs = np.polyfit(np.log(x), np.log(y), 1)
    return float(coeffs[0])


def lp_tail_probe(p_prime, radii=None, nodes_per_panel=16, n=2,
                  increment_tol=1e-6, fit_residual_tol=0.05, slope_tol=0.1):
    """
    Classify the growth of ‖(dσ_n)^∨‖_{L^{p'}(B_R × ... × B_R)} as R grows.

    The integral over a product of planar balls is I(R)^n with I the radial
    integral of |J_0(2πr)|^{p'}, so the truncated norm is I(R)^{n/p'}.
    Growth is read off the dyadic increments I(R_{k+1}) - I(R_k), which
    behave like R^{2 - p'/2}:

    - converged: last relative increment below ``increment_tol``, or the
      increment exponent is below -slope_tol (summable dyadic tail)
    - logarithmic: increment exponent within ±slope_tol and I affine in
      log R with relative residual below ``fit_residual_tol``
    - polynomial: increment exponent above slope_tol

    Returns:
        TailProbeResult
    """
    if not p_prime > 0:
        raise DomainError(f"p′ must be positive, got {p_prime}")
    if n < 1:
        raise DomainError(f"Number of circle factors must be ≥ 1, got {n}")
    if radii is None:
        radii = default_radii(200.0)
    radii = [float(r) for r in radii]
    if len(radii) < 3:
        raise DomainError("Tail probe needs at least 3 radii")

    profile = radial_power_profile(p_prime, radii, nodes_per_panel=nodes_per_panel)
    norms = profile ** (n / p_prime)
    increments = np.diff(profile)
    last_increment = float(increments[-1] / profile[-1])

    positive = increments > 0
    if np.count_nonzero(positive) >= 2:
        gamma = _loglog_slope(np.asarray(radii[:-1])[positive], increments[positive])
    else:
        gamma = -math.inf

    log_r = np.log(radii)
    coeffs = np.polyfit(log_r, profile, 1)
    residual = profile - np.polyval(coeffs, log_r)
    spread = abs(profile[-1] - profile[0])
    fit_residual = float(np.max(np.abs(residual)) / spread) if spread > 0 else 0.0
    slope = _loglog_slope(radii, norms)

    if last_increment < increment_tol or gamma < -slope_tol:
        growth = CONVERGED
    elif abs(gamma) <= slope_tol and fit_residual < fit_residual_tol:
        growth = LOGARITHMIC
    elif gamma > slope_tol:
        growth = POLYNOMIAL
    else:
        raise InconclusiveGrowthError(
            f"p′={p_prime}: increment exponent {gamma:.3f}, log-fit residual {fit_residual:.3f}"
        )

    return TailProbeResult(
        p_prime=float(p_prime),
        n=n,
        radii=radii,
        truncated_norms=[float(v) for v in norms],
        growth_class=growth,
        slope=slope,
        increment_exponent=gamma,
        fit_residual=fit_residual,
        last_increment=last_increment,
    )


def expected_growth(p_prime, slope_tol=0.1):
    """
    Growth class the threshold p' > 4 predicts, or None inside the band
    around p' = 4 where the increment exponent |2 - p'/2| ≤ 2·slope_tol.
    """
    if p_prime == 4:
        return LOGARITHMIC
    gamma = 2.0 - float(p_prime) / 2.0
    if gamma < -2 * slope_tol:
        return CONVERGED
    if gamma > 2 * slope_tol:
        return POLYNOMIAL
    return None
