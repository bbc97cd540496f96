"""
Test-function families on R^d with exact Fourier transforms.

Fourier convention: f̂(ξ) = ∫ e^{-2πi x·ξ} f(x) dx.

Every family is an immutable value that knows its ambient dimension, its
pointwise values, its transform and its L^p norms. Points are arrays whose
last axis has length ``dim``; leading axes are broadcast.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import ive

from errors import DimensionMismatchError, DomainError, InvalidExponentError
from extension import bessel_j0, radial_power_integral

# Knapp rectangle constants: half-widths a/δ (tangent) and b/δ² (normal)
KNAPP_A = 1.0 / (8 * math.pi)
KNAPP_B = 1.0 / (8 * math.pi)


def _check_p(p):
    if not p >= 1:
        raise InvalidExponentError(f"Lebesgue index must be ≥ 1, got {p}")
    return float(p)


class TestFunction:
    """Common interface of all families."""

    __test__ = False

    dim = 0

    def evaluate(self, x):
        raise NotImplementedError

    def fourier(self, xi):
        raise NotImplementedError

    def lp_norm(self, p):
        raise NotImplementedError

    @property
    def label(self):
        return type(self).__name__


@dataclass(frozen=True)
class IsotropicGaussian(TestFunction):
    """f(x) = exp(-π|x|²/s²) on R^d."""

    scale: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"Gaussian scale must be positive, got {self.scale}")
        if self.dim < 1:
            raise DomainError(f"Dimension must be ≥ 1, got {self.dim}")

    def evaluate(self, x):
        r2 = np.sum(np.square(x), axis=-1)
        return np.exp(-np.pi * r2 / self.scale ** 2).astype(complex)

    def fourier(self, xi):
        r2 = np.sum(np.square(xi), axis=-1)
        s = self.scale
        return (s ** self.dim * np.exp(-np.pi * s * s * r2)).astype(complex)

    def lp_norm(self, p):
        p = _check_p(p)
        return self.scale ** (self.dim / p) * p ** (-self.dim / (2 * p))

    @property
    def label(self):
        return f"gaussian(s={self.scale:g},d={self.dim})"


@dataclass(frozen=True)
class IndicatorBox(TestFunction):
    """Indicator of the axis-aligned box ∏[-a_i, a_i]."""

    half_widths: tuple = (1.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, 'half_widths', tuple(float(a) for a in self.half_widths))
        if not self.half_widths or min(self.half_widths) <= 0:
            raise DomainError(f"Box half-widths must be positive, got {self.half_widths}")

    @property
    def dim(self):
        return len(self.half_widths)

    @property
    def volume(self):
        return float(np.prod([2 * a for a in self.half_widths]))

    def evaluate(self, x):
        inside = np.all(np.abs(x) <= np.asarray(self.half_widths), axis=-1)
        return inside.astype(complex)

    def fourier(self, xi):
        a = np.asarray(self.half_widths)
        # np.sinc(t) = sin(πt)/(πt), so 2a·sinc(2aξ) = sin(2πaξ)/(πξ)
        return np.prod(2 * a * np.sinc(2 * a * np.asarray(xi)), axis=-1).astype(complex)

    def lp_norm(self, p):
        return self.volume ** (1.0 / _check_p(p))

    @property
    def label(self):
        return "box(" + ",".join(f"{a:g}" for a in self.half_widths) + ")"


@dataclass(frozen=True)
class KnappTube(TestFunction):
    """
    Knapp example dual to the cap of angular width δ at angle ϰ₀ on the
    unit circle: f(x) = e^{2πi x·ξ₀} χ_R(x), R the rectangle with half-widths
    a/δ along the tangent at ξ₀ and b/δ² along the normal ξ₀.
    """

    delta: float
    center: float = 0.0

    dim = 2

    def __post_init__(self):
        if not 0 < self.delta <= 0.25:
            raise DomainError(f"Knapp width must satisfy 0 < δ ≤ 1/4, got {self.delta}")

    @property
    def frequency(self):
        theta = 2 * math.pi * self.center
        return np.array([math.cos(theta), math.sin(theta)])

    @property
    def tangent(self):
        theta = 2 * math.pi * self.center
        return np.array([-math.sin(theta), math.cos(theta)])

    @property
    def half_widths(self):
        return KNAPP_A / self.delta, KNAPP_B / self.delta ** 2

    @property
    def area(self):
        a, b = self.half_widths
        return 4 * a * b

    def frame(self, x):
        """Tangential and normal coordinates of x."""
        x = np.asarray(x, dtype=float)
        return x @ self.tangent, x @ self.frequency

    def evaluate(self, x):
        a, b = self.half_widths
        s, u = self.frame(x)
        inside = (np.abs(s) <= a) & (np.abs(u) <= b)
        phase = np.exp(2j * np.pi * (np.asarray(x, dtype=float) @ self.frequency))
        return np.where(inside, phase, 0j)

    def fourier(self, xi):
        a, b = self.half_widths
        zeta = np.asarray(xi, dtype=float) - self.frequency
        s, u = zeta @ self.tangent, zeta @ self.frequency
        return (4 * a * b * np.sinc(2 * a * s) * np.sinc(2 * b * u)).astype(complex)

    def lp_norm(self, p):
        # |f| is the indicator of R
        return self.area ** (1.0 / _check_p(p))

    @property
    def label(self):
        return f"knapp(δ={self.delta:g},ϰ0={self.center:g})"


def annular_window(scale):
    """Radial window w(r) = e^{-πr²/λ²} - e^{-4πr²/λ²}."""
    def window(r):
        t = np.square(r) / scale ** 2
        return np.exp(-np.pi * t) - np.exp(-4 * np.pi * t)
    return window


@lru_cache(maxsize=1024)
def _annular_norm(scale, p):
    window = annular_window(scale)
    radius = 4.0 * scale
    return radial_power_integral(p, radius, weight=window) ** (1.0 / p)


@dataclass(frozen=True)
class AnnularBump(TestFunction):
    """
    Family concentrating on the unit circle in frequency:
    f(x) = J_0(2π|x|)·(e^{-π|x|²/λ²} - e^{-4π|x|²/λ²}).

    f̂ is the circle measure convolved with a difference of Gaussians of
    widths 1/λ and 2/λ, a smooth bump of normal width ~1/λ around the whole
    circle with height ~λ/(4π) on it.
    """

    scale: float

    dim = 2

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError(f"Concentration scale must be positive, got {self.scale}")

    def evaluate(self, x):
        r = np.sqrt(np.sum(np.square(x), axis=-1))
        return (bessel_j0(2 * np.pi * r) * annular_window(self.scale)(r)).astype(complex)

    @staticmethod
    def _smoothed_circle(lam, rho):
        # λ² ∫ e^{-πλ²|ξ-ω|²} dσ(ω) = λ² e^{-πλ²(ρ-1)²} I_0(2πλ²ρ) e^{-2πλ²ρ}
        return lam * lam * np.exp(-np.pi * lam * lam * (rho - 1.0) ** 2) * ive(0, 2 * np.pi * lam * lam * rho)

    def fourier(self, xi):
        rho = np.sqrt(np.sum(np.square(xi), axis=-1))
        lam = self.scale
        values = self._smoothed_circle(lam, rho) - self._smoothed_circle(lam / 2, rho)
        return np.asarray(values).astype(complex)

    def lp_norm(self, p):
        # No closed form: zero-aligned radial quadrature of |f|^p
        return _annular_norm(float(self.scale), _check_p(p))

    @property
    def label(self):
        return f"annular(λ={self.scale:g})"


@dataclass(frozen=True)
class Scaled(TestFunction):
    """Constant multiple c·f."""

    factor: float
    base: TestFunction

    def __post_init__(self):
        if not self.factor > 0:
            raise DomainError(f"Scaling factor must be positive, got {self.factor}")

    @property
    def dim(self):
        return self.base.dim

    def evaluate(self, x):
        return self.factor * self.base.evaluate(x)

    def fourier(self, xi):
        return self.factor * self.base.fourier(xi)

    def lp_norm(self, p):
        return self.factor * self.base.lp_norm(p)

    @property
    def label(self):
        return f"{self.factor:g}*{self.base.label}"


@dataclass(frozen=True)
class TensorProduct(TestFunction):
    """f(x_1, ..., x_k) = ∏ g_j(x_j); nested products are flattened."""

    factors: tuple

    def __post_init__(self):
        flat = []
        for factor in self.factors:
            if isinstance(factor, TensorProduct):
                flat.extend(factor.factors)
            else:
                flat.append(factor)
        if not flat:
            raise DomainError("A tensor product needs at least one factor")
        object.__setattr__(self, 'factors', tuple(flat))

    @property
    def dim(self):
        return sum(f.dim for f in self.factors)

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        offsets = np.cumsum([0] + [f.dim for f in self.factors])
        return [x[..., offsets[j]:offsets[j + 1]] for j in range(len(self.factors))]

    def evaluate(self, x):
        parts = self._split(x)
        return np.prod([f.evaluate(part) for f, part in zip(self.factors, parts)], axis=0)

    def fourier(self, xi):
        parts = self._split(xi)
        return np.prod([f.fourier(part) for f, part in zip(self.factors, parts)], axis=0)

    def lp_norm(self, p):
        _check_p(p)
        return float(np.prod([f.lp_norm(p) for f in self.factors]))

    @property
    def is_circle_separable(self):
        return all(f.dim == 2 for f in self.factors)

    @property
    def label(self):
        return " ⊗ ".join(f.label for f in self.factors)


def tensor_power(factor, n):
    """n-fold tensor product of one dim-2 factor."""
    return TensorProduct((factor,) * n)


def _check_dim(f, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (f.dim,):
        raise DimensionMismatchError(
            f"{f.label} lives in R^{f.dim}, got point(s) of shape {x.shape}"
        )
    return x


def evaluate(f, x):
    """Pointwise value(s) f(x)."""
    values = f.evaluate(_check_dim(f, x))
    return complex(values) if np.ndim(values) == 0 else values


def fourier_closed_form(f, xi):
    """Exact f̂(ξ) = ∫ e^{-2πi x·ξ} f(x) dx."""
    values = f.fourier(_check_dim(f, xi))
    return complex(values) if np.ndim(values) == 0 else values


def lp_norm_closed_form(f, p):
    """‖f‖_{L^p(R^d)} (semi-analytic for AnnularBump)."""
    return float(f.lp_norm(p))
