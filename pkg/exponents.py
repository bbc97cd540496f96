"""
Exponent arithmetic and admissibility regions.

Indices supplied as Fractions (e.g. parsed from "4/3" on the command line) are
compared exactly; floats are compared with a relative tolerance of 1e-12 so
that boundary cases such as q = p'/3 are decided deterministically.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from errors import InvalidExponentError

# Conjugate of p = 1. Predicates branch on it explicitly.
INFINITY = math.inf

TOLERANCE = 1e-12
FOUR_THIRDS = Fraction(4, 3)


def _is_exact(*values):
    return all(isinstance(v, Rational) or v == INFINITY for v in values)


def _slack(bound):
    return TOLERANCE * max(1.0, abs(float(bound)))


def _le(a, b):
    """a <= b, exact for rationals, tolerant for floats."""
    if b == INFINITY:
        return True
    if a == INFINITY:
        return False
    if _is_exact(a, b):
        return a <= b
    return float(a) <= float(b) + _slack(b)


def _lt(a, b):
    """a < b, exact for rationals; floats within tolerance of b count as equal."""
    if a == INFINITY:
        return False
    if b == INFINITY:
        return True
    if _is_exact(a, b):
        return a < b
    return float(a) < float(b) - _slack(b)


def _check_index(value, name='Lebesgue index'):
    if value != value or value < 1:
        raise InvalidExponentError(f"{name} must be ≥ 1, got {value}")


def conjugate(p):
    """
    Conjugate exponent p' = p/(p-1).

    Args:
        p: Lebesgue index ≥ 1 (float, int, Fraction or INFINITY)

    Returns:
        INFINITY for p = 1, 1 for p = INFINITY, p/(p-1) otherwise
        (a Fraction when p is rational)
    """
    _check_index(p)
    if p == 1:
        return INFINITY
    if p == INFINITY:
        return 1
    if isinstance(p, Rational):
        p = Fraction(p)
    return p / (p - 1)


def parse_index(text):
    """
    Parse a Lebesgue index from text.

    "inf" and "∞" give INFINITY; anything else ("1.2", "4/3", "2") is parsed
    as an exact Fraction so that boundary comparisons are exact.
    """
    raw = str(text).strip().lower()
    if raw in ('inf', 'infinity', '∞'):
        return INFINITY
    try:
        value = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise InvalidExponentError(f"Not a Lebesgue index: {text!r}")
    _check_index(value)
    return value


@dataclass(frozen=True)
class ExponentPair:
    """A (p, q) pair of Lebesgue indices in [1, ∞)."""

    p: object
    q: object

    def __post_init__(self):
        for name, value in (('p', self.p), ('q', self.q)):
            _check_index(value)
            if value == INFINITY:
                raise InvalidExponentError(f"{name} must be finite, got {value}")

    @property
    def p_conj(self):
        return conjugate(self.p)

    @property
    def q_conj(self):
        return conjugate(self.q)

    def as_floats(self):
        return float(self.p), float(self.q)

    def __str__(self):
        return f"(p={float(self.p):g}, q={float(self.q):g})"


def torus_admissible(pair):
    """True iff 1 ≤ p < 4/3 and q ≤ p'/3 (p = 1 leaves q unrestricted)."""
    if not _lt(pair.p, FOUR_THIRDS):
        return False
    p_conj = pair.p_conj
    if p_conj == INFINITY:
        return True
    return _le(pair.q, p_conj / 3)


def sphere_conjecture_region(n, pair):
    """
    Conjectured restriction region for the unit sphere in R^n.

    True iff 1 ≤ p < 2n/(n+1) and q ≤ p'·(n-1)/(n+1). Only used for
    comparison with the torus region.
    """
    if int(n) != n or n < 2:
        raise InvalidExponentError(f"Ambient dimension must be an integer ≥ 2, got {n}")
    n = int(n)
    if not _lt(pair.p, Fraction(2 * n, n + 1)):
        return False
    p_conj = pair.p_conj
    if p_conj == INFINITY:
        return True
    factor = Fraction(n - 1, n + 1)
    bound = p_conj * factor if _is_exact(p_conj) else float(p_conj) * float(factor)
    return _le(pair.q, bound)


def dual_extension_region(p_prime, q_prime):
    """
    Region of the extension estimate ‖(F dσ_n)^∨‖_{p'} ≤ C‖F‖_{q'}.

    True iff p' > 4 and q' ≥ (p'/3)'.
    """
    _check_index(p_prime, 'p′')
    _check_index(q_prime, 'q′')
    if not _lt(4, p_prime):
        return False
    if p_prime == INFINITY:
        third = INFINITY
    elif isinstance(p_prime, Rational):
        third = Fraction(p_prime) / 3
    else:
        third = p_prime / 3
    return _le(conjugate(third), q_prime)


def predicted_knapp_slope(pair, n=1):
    """d log(ratio) / d log(δ) for the n-fold Knapp tensor: n·(1/q - 3/p')."""
    p_conj = pair.p_conj
    three_over = 0.0 if p_conj == INFINITY else 3.0 / float(p_conj)
    return n * (1.0 / float(pair.q) - three_over)


def predicted_dilation_slope(p, n=1):
    """d log(ratio) / d log(λ) for the n-fold annular family: n·(3/2 - 2/p)."""
    _check_index(p)
    return n * (1.5 - 2.0 / float(p))


def _boundary_curve(samples=20001):
    # q = p'/3 bounds the region only up to its corner (4/3, 4/3)
    p_curve = 1.0 + np.logspace(-4, np.log10(1.0 / 3.0), samples)
    return p_curve, p_curve / (3.0 * (p_curve - 1.0))


_CURVE_P, _CURVE_Q = _boundary_curve()


def boundary_distance(pair):
    """
    Euclidean distance in the (p, q) plane to the nearer boundary curve,
    the line p = 4/3 or the arc of q = p'/3 over 1 < p ≤ 4/3.
    """
    p, q = pair.as_floats()
    to_line = abs(p - 4.0 / 3.0)
    to_curve = float(np.min(np.hypot(_CURVE_P - p, _CURVE_Q - q)))
    return min(to_line, to_curve)


def sphere_comparison(n, p_values, q_values):
    """
    Compare the torus region on T^n with the conjectured region of the
    sphere S^{2n-1} ⊂ R^{2n} that contains it (up to the factor √n).

    Returns:
        dict with cell counts: total, torus, sphere, both
    """
    counts = {'n': n, 'total': 0, 'torus': 0, 'sphere': 0, 'both': 0}
    for p in p_values:
        for q in q_values:
            pair = ExponentPair(p, q)
            in_torus = torus_admissible(pair)
            in_sphere = sphere_conjecture_region(2 * n, pair)
            counts['total'] += 1
            counts['torus'] += in_torus
            counts['sphere'] += in_sphere
            counts['both'] += in_torus and in_sphere
    return counts
