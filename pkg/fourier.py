"""
Fourier transforms restricted to the torus, the partial-transform
factorization of separable functions, and the Gauss–Legendre oracle.
"""
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.special import erfc

from errors import (
    DimensionMismatchError,
    DomainError,
    FactorizationMismatchError,
    InsufficientTruncationError,
)
from functions import (
    AnnularBump,
    IndicatorBox,
    IsotropicGaussian,
    KnappTube,
    Scaled,
    TensorProduct,
    fourier_closed_form,
)
from geometry import angles_to_points, circle_nodes

FACTORIZATION_TOL = 1e-12
TRUNCATION_TOL = 1e-12

# Largest tensor Gauss–Legendre rule evaluated as one array
MAX_TENSOR_POINTS = 1 << 22


@dataclass(frozen=True, eq=False)
class SurfaceSamples:
    """
    Values of a function at the nodes of a TorusGrid.

    Either ``values`` holds the full product array of shape (N,)*n, or
    ``factors`` holds one length-N vector per circle factor and the sample at
    node (j_1, ..., j_n) is their product.
    """

    grid: object
    values: np.ndarray = None
    factors: tuple = None

    def __post_init__(self):
        shape = (self.grid.nodes_per_circle,) * self.grid.n
        if (self.values is None) == (self.factors is None):
            raise DomainError("SurfaceSamples needs exactly one of values or factors")
        if self.values is not None and np.shape(self.values) != shape:
            raise DimensionMismatchError(
                f"Expected samples of shape {shape}, got {np.shape(self.values)}"
            )
        if self.factors is not None:
            if len(self.factors) != self.grid.n or any(
                np.shape(v) != (self.grid.nodes_per_circle,) for v in self.factors
            ):
                raise DimensionMismatchError(
                    f"Expected {self.grid.n} factor vectors of length {self.grid.nodes_per_circle}"
                )

    @property
    def is_factorized(self):
        return self.factors is not None

    @property
    def count(self):
        return self.grid.node_count

    def array(self):
        """Full product array; materializes the outer product of factored samples."""
        if self.values is not None:
            return self.values
        return reduce(np.multiply.outer, self.factors)


def _is_separable(f, grid):
    if grid.n == 1:
        return True
    if isinstance(f, Scaled):
        return _is_separable(f.base, grid)
    return isinstance(f, TensorProduct) and len(f.factors) == grid.n and f.is_circle_separable


def restrict_ft_to_torus(f, grid, factorized=None):
    """
    Sample f̂ at every node of the torus grid.

    Args:
        f: TestFunction on R^{2n}
        grid: TorusGrid
        factorized: None factors whenever f is a tensor of n planar factors;
            False forces pointwise evaluation of the 2n-dimensional transform

    Returns:
        SurfaceSamples
    """
    if f.dim != grid.ambient_dim:
        raise DimensionMismatchError(
            f"{f.label} lives in R^{f.dim}, torus grid lives in R^{grid.ambient_dim}"
        )
    separable = _is_separable(f, grid)
    if factorized is None:
        factorized = separable
    if factorized and not separable:
        raise DomainError(f"{f.label} does not factor over {grid.n} circles")

    if factorized and isinstance(f, Scaled):
        base = restrict_ft_to_torus(f.base, grid, factorized=True)
        return SurfaceSamples(grid, factors=(f.factor * base.factors[0],) + base.factors[1:])

    if factorized:
        _, points = circle_nodes(grid)
        parts = (f,) if grid.n == 1 else f.factors
        return SurfaceSamples(grid, factors=tuple(fourier_closed_form(g, points) for g in parts))

    shape = (grid.nodes_per_circle,) * grid.n
    blocks = [fourier_closed_form(f, angles_to_points(block)) for block in grid.iter_angle_blocks()]
    return SurfaceSamples(grid, values=np.concatenate(blocks).reshape(shape))


def _two_factors(f):
    if not (isinstance(f, TensorProduct) and len(f.factors) == 2 and f.is_circle_separable):
        raise DomainError(f"Expected a tensor product of two planar factors, got {f.label}")
    return f.factors


def partial_ft_factorized(f, xi, eta):
    """
    F_{x→ξ}(F_{y→η} f(x, ·))(ξ) for f(x, y) = g(x)h(y).

    The partial transform in y leaves g(x)·ĥ(η); transforming that in x gives
    ĝ(ξ)·ĥ(η). The result is compared with the direct four-dimensional
    transform and a FactorizationMismatchError is raised on disagreement.
    """
    g, h = _two_factors(f)
    inner = fourier_closed_form(h, eta)
    iterated = fourier_closed_form(g, xi) * inner
    direct = fourier_closed_form(f, np.concatenate([np.asarray(xi, float), np.asarray(eta, float)]))
    if abs(iterated - direct) > FACTORIZATION_TOL * max(1.0, abs(direct)):
        raise FactorizationMismatchError(
            f"Iterated transform {iterated!r} differs from direct transform {direct!r}"
        )
    return iterated


def partial_ft_array(f, x_nodes, grid):
    """
    |F_{y→η} f(x, ·)(η)| over (circle node η, ambient node x).

    Args:
        f: tensor product g⊗h of two planar factors
        x_nodes: (M, 2) ambient nodes for the x variable
        grid: one-circle TorusGrid supplying the η nodes

    Returns:
        (N, M) nonnegative array
    """
    if grid.n != 1:
        raise DimensionMismatchError(f"Partial transforms live on one circle, grid has n={grid.n}")
    g, h = _two_factors(f)
    x_nodes = np.asarray(x_nodes, dtype=float)
    _, eta = circle_nodes(grid)
    return np.abs(np.multiply.outer(h.fourier(eta), g.evaluate(x_nodes)))


def gauss_legendre_box(lower, upper, nodes):
    """
    Tensor Gauss–Legendre rule on the box ∏[lower_i, upper_i].

    Returns:
        (points, weights) with points of shape (nodes^d, d)
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    axes, weights = [], []
    for lo, hi in zip(lower, upper):
        half = 0.5 * (hi - lo)
        axes.append(lo + half * (x + 1.0))
        weights.append(half * w)
    grids = np.meshgrid(*axes, indexing='ij')
    points = np.stack([g.ravel() for g in grids], axis=-1)
    weight = reduce(np.multiply.outer, weights).ravel()
    return points, weight


def _truncation_box(f, radius):
    """Box covering the support of f (or its essential support), with its tail bound."""
    if isinstance(f, IsotropicGaussian):
        radius = 6.0 * f.scale if radius is None else radius
        tail = f.dim * f.scale ** f.dim * erfc(math.sqrt(math.pi) * radius / f.scale)
        return [-radius] * f.dim, [radius] * f.dim, tail
    if isinstance(f, AnnularBump):
        radius = 4.0 * f.scale if radius is None else radius
        tail = f.scale ** 2 * math.exp(-math.pi * radius ** 2 / f.scale ** 2)
        return [-radius] * 2, [radius] * 2, tail
    if isinstance(f, IndicatorBox):
        return [-a for a in f.half_widths], list(f.half_widths), 0.0
    if isinstance(f, KnappTube):
        a, b = f.half_widths
        # frame coordinates (tangent, normal)
        return [-a, -b], [a, b], 0.0
    raise DomainError(f"No quadrature oracle for {f.label}")


def oracle_nodes(f, radius=None, nodes=128):
    """Gauss–Legendre nodes and weights covering f, raising on a heavy tail."""
    lower, upper, tail = _truncation_box(f, radius)
    if tail > TRUNCATION_TOL:
        raise InsufficientTruncationError(tail, TRUNCATION_TOL)
    if nodes ** f.dim > MAX_TENSOR_POINTS:
        raise DomainError(f"{nodes}^{f.dim} quadrature nodes exceed {MAX_TENSOR_POINTS}")
    points, weights = gauss_legendre_box(lower, upper, nodes)
    if isinstance(f, KnappTube):
        points = np.outer(points[:, 0], f.tangent) + np.outer(points[:, 1], f.frequency)
    return points, weights


def numeric_ft(f, xi, radius=None, nodes=128):
    """
    Brute-force f̂(ξ) by tensor Gauss–Legendre quadrature over a truncated box.

    Compactly supported families are integrated over their exact support
    (the Knapp rectangle in its own frame); Gaussian-type families over
    [-R, R]^d, with an InsufficientTruncationError when the tail bound
    exceeds 1e-12. Tensor products multiply the oracles of their factors,
    which is the same tensor sum in a different order.
    """
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (f.dim,):
        raise DimensionMismatchError(f"{f.label} lives in R^{f.dim}, got frequency of shape {xi.shape}")
    if isinstance(f, TensorProduct):
        offsets = np.cumsum([0] + [g.dim for g in f.factors])
        value = 1.0 + 0j
        for j, g in enumerate(f.factors):
            value *= numeric_ft(g, xi[offsets[j]:offsets[j + 1]], radius, nodes)
        return value
    if isinstance(f, Scaled):
        return f.factor * numeric_ft(f.base, xi, radius, nodes)

    points, weights = oracle_nodes(f, radius, nodes)
    integrand = f.evaluate(points) * np.exp(-2j * np.pi * (points @ xi))
    return complex(np.sum(weights * integrand))
