"""
Torus T^n embedded in R^{2n} and its product quadrature grids.

Each circle factor is parametrized by an angle coordinate ϰ ∈ [0, 1) through
(cos 2πϰ, sin 2πϰ); the surface measure σ_n is the product of the mass-1
measures dϰ, so σ_n is a probability measure.
"""
import math
from dataclasses import dataclass

import numpy as np

from errors import DimensionMismatchError, DomainError, UnderResolvedGridError

DEFAULT_NODES = 256

# Angle rows evaluated per block by surface_quadrature
BLOCK_ROWS = 1 << 16


@dataclass(frozen=True)
class TorusGrid:
    """
    Uniform product grid with N equispaced angles j/N on each of n circles.

    All nodes carry the same weight 1/N^n (trapezoidal rule on a periodic
    domain), which integrates trigonometric polynomials of degree < N in each
    factor exactly.
    """

    n: int
    nodes_per_circle: int = DEFAULT_NODES

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"Number of circle factors must be ≥ 1, got {self.n}")
        if int(self.nodes_per_circle) != self.nodes_per_circle or self.nodes_per_circle < 4:
            raise DomainError(f"Need at least 4 nodes per circle, got {self.nodes_per_circle}")

    @property
    def ambient_dim(self):
        return 2 * self.n

    @property
    def node_count(self):
        return self.nodes_per_circle ** self.n

    @property
    def circle_weight(self):
        return 1.0 / self.nodes_per_circle

    @property
    def weight(self):
        return self.circle_weight ** self.n

    def circle_angles(self):
        return np.arange(self.nodes_per_circle) / self.nodes_per_circle

    def angles(self):
        """All product nodes as an (N^n, n) array; the last factor varies fastest."""
        axes = np.meshgrid(*([self.circle_angles()] * self.n), indexing='ij')
        return np.stack([a.ravel() for a in axes], axis=-1)

    def points(self):
        return angles_to_points(self.angles())

    def iter_angle_blocks(self, rows=BLOCK_ROWS):
        """
        Yield the product nodes in order, in blocks of at most ``rows`` rows,
        so that large grids never materialize at once.
        """
        total = self.node_count
        n_nodes = self.nodes_per_circle
        for start in range(0, total, rows):
            index = np.arange(start, min(start + rows, total))
            # flat index -> base-N digits, last factor varies fastest
            digits = np.empty((index.size, self.n), dtype=np.int64)
            for axis in range(self.n - 1, -1, -1):
                digits[:, axis] = index % n_nodes
                index = index // n_nodes
            yield digits / n_nodes  # node k sits at angle k/N


def angles_to_points(angles):
    """Map an (..., n) array of angles to (..., 2n) ambient points."""
    angles = np.asarray(angles, dtype=float)
    theta = 2 * np.pi * angles
    # (cos, sin) pairs interleaved per circle factor
    points = np.empty(angles.shape[:-1] + (2 * angles.shape[-1],))
    points[..., 0::2] = np.cos(theta)
    points[..., 1::2] = np.sin(theta)
    return points


def torus_point(angles):
    """
    Ambient point (cos 2πϰ_1, sin 2πϰ_1, ..., cos 2πϰ_n, sin 2πϰ_n).

    Args:
        angles: sequence of n angle coordinates in [0, 1)

    Returns:
        numpy array of length 2n
    """
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if angles.ndim != 1:
        raise DimensionMismatchError(f"Expected a vector of angles, got shape {angles.shape}")
    if np.any(angles < 0) or np.any(angles >= 1) or not np.all(np.isfinite(angles)):
        raise DomainError(f"Angles must lie in [0, 1), got {angles.tolist()}")
    return angles_to_points(angles)


def circle_nodes(grid):
    """Angles and (N, 2) ambient points of a single circle factor of ``grid``."""
    angles = grid.circle_angles()
    return angles, angles_to_points(angles[:, None])


def surface_quadrature(grid, integrand):
    """
    Product trapezoidal approximation of ∫ integrand dσ_n.

    Args:
        grid: TorusGrid
        integrand: vectorized callable mapping an (M, n) array of angles to M
            (real or complex) values

    Returns:
        complex integral value (blocks are reduced in fixed order)
    """
    total = 0j
    for block in grid.iter_angle_blocks():
        values = np.asarray(integrand(block))
        if values.shape != (block.shape[0],):
            raise DimensionMismatchError(
                f"Integrand returned shape {values.shape} for {block.shape[0]} nodes"
            )
        total += np.sum(values)
    # equal weights 1/N^n, so σ_n has mass 1
    return complex(total * grid.weight)


def resolve_nodes(delta_min, minimum=DEFAULT_NODES, per_cap=8):
    """Nodes per circle keeping ``per_cap`` nodes per 2π/δ_min: max(minimum, ceil(per_cap·2π/δ_min))."""
    if not delta_min > 0:
        raise DomainError(f"Cap width must be positive, got {delta_min}")
    return max(int(minimum), int(math.ceil(per_cap * 2 * math.pi / delta_min)))


def check_resolution(grid, delta_min):
    """Raise UnderResolvedGridError unless N ≥ 4·2π/δ_min."""
    required = int(math.ceil(4 * 2 * math.pi / delta_min))
    if grid.nodes_per_circle < required:
        raise UnderResolvedGridError(grid.nodes_per_circle, required)
