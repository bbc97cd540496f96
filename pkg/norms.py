"""
Weighted L^p norms of sampled data: surface norms on the torus, the
mixed-norm Minkowski interchange, and the Hölder embedding of a
probability measure.
"""
import numpy as np

from errors import DimensionMismatchError, DomainError, InvalidExponentError
from exponents import INFINITY

RELATIVE_SLACK = 1e-12


def _check_index(p):
    if p != p or p < 1:
        raise InvalidExponentError(f"Lebesgue index must be ≥ 1, got {p}")


def weighted_lp(values, weights, p, axis=None):
    """
    (Σ w·|v|^p)^{1/p} along ``axis`` (all axes by default).

    ``weights`` broadcasts against ``values``; p = INFINITY gives the maximum
    of |v| over nodes of positive weight.
    """
    _check_index(p)
    magnitude = np.abs(np.asarray(values))
    weights = np.broadcast_to(np.asarray(weights, dtype=float), magnitude.shape)
    if p == INFINITY:
        return np.max(np.where(weights > 0, magnitude, 0.0), axis=axis)
    p = float(p)
    return np.sum(weights * magnitude ** p, axis=axis) ** (1.0 / p)


def lq_surface_norm(samples, q):
    """
    ‖samples‖_{L^q(T^n, dσ_n)} under the grid's mass-1 product weights.

    Factored samples give a product of circle norms, so the N^n product array
    is never built.
    """
    _check_index(q)
    grid = samples.grid
    if samples.is_factorized:
        # ‖g_1 ⊗ ... ⊗ g_n‖_q = ∏ ‖g_k‖_q under the product measure
        return float(np.prod([weighted_lp(v, grid.circle_weight, q) for v in samples.factors]))
    return float(weighted_lp(samples.values, grid.weight, q))


def minkowski_check(values, p, q, ambient_weights, surface_weights=None):
    """
    Compare the two orders of mixed norms of a nonnegative array.

    Args:
        values: (S, A) array indexed by (surface node, ambient node)
        p: ambient index
        q: surface index
        ambient_weights: length-A quadrature weights
        surface_weights: length-S weights, uniform 1/S by default

    Returns:
        dict with lhs = ‖‖v‖_{L^p(ambient)}‖_{L^q(surface)},
        rhs = ‖‖v‖_{L^q(surface)}‖_{L^p(ambient)}, holds (lhs ≤ rhs within
        relative 1e-12) and guaranteed (q ≥ p, the direction Minkowski's
        inequality asserts)
    """
    _check_index(p)
    _check_index(q)
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise DimensionMismatchError(f"Expected a 2-D array, got shape {values.shape}")
    if np.any(values < 0):
        raise DomainError("Minkowski check needs a nonnegative array")
    n_surface, n_ambient = values.shape
    ambient_weights = np.asarray(ambient_weights, dtype=float)
    if ambient_weights.shape != (n_ambient,):
        raise DimensionMismatchError(
            f"Expected {n_ambient} ambient weights, got shape {ambient_weights.shape}"
        )
    if surface_weights is None:
        surface_weights = np.full(n_surface, 1.0 / n_surface)
    surface_weights = np.asarray(surface_weights, dtype=float)
    if surface_weights.shape != (n_surface,):
        raise DimensionMismatchError(
            f"Expected {n_surface} surface weights, got shape {surface_weights.shape}"
        )

    # lhs: L^p over ambient nodes first, then L^q over the surface
    inner_ambient = weighted_lp(values, ambient_weights[None, :], p, axis=1)
    lhs = float(weighted_lp(inner_ambient, surface_weights, q))
    # rhs: the same norms in the opposite order
    inner_surface = weighted_lp(values, surface_weights[:, None], q, axis=0)
    rhs = float(weighted_lp(inner_surface, ambient_weights, p))
    return {
        'lhs': lhs,
        'rhs': rhs,
        'holds': lhs <= rhs * (1 + RELATIVE_SLACK),
        'guaranteed': q >= p,
    }


def holder_check(samples, q_low, q_high):
    """
    Finite-measure embedding on σ_n: q_low ≤ q_high ⇒ ‖·‖_{q_low} ≤ ‖·‖_{q_high}.

    Returns:
        dict with the two norms and whether the embedding holds
    """
    if q_low > q_high:
        raise DomainError(f"Expected q_low ≤ q_high, got {q_low} > {q_high}")
    # σ_n has mass 1: embedding constant 1
    low = lq_surface_norm(samples, q_low)
    high = lq_surface_norm(samples, q_high)
    return {
        'q_low': q_low,
        'q_high': q_high,
        'low': low,
        'high': high,
        'holds': low <= high * (1 + RELATIVE_SLACK),
    }
