"""
Restriction-ratio experiments on the torus.

A sweep follows one test family along a one-parameter limit (Knapp width
δ → 0, concentration scale λ → ∞) and fits a power law to the ratio
‖f̂|_{T^n}‖_{L^q(σ_n)} / ‖f‖_{L^p}. A positive blow-up slope witnesses that
the pair (p, q) is not admissible.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from errors import DimensionMismatchError, DomainError, ZeroNormError
from exponents import (
    ExponentPair,
    boundary_distance,
    predicted_dilation_slope,
    predicted_knapp_slope,
    torus_admissible,
)
from fourier import oracle_nodes, partial_ft_array, restrict_ft_to_torus
from functions import (
    AnnularBump,
    IndicatorBox,
    IsotropicGaussian,
    KnappTube,
    Scaled,
    TensorProduct,
    lp_norm_closed_form,
    tensor_power,
)
from geometry import DEFAULT_NODES, TorusGrid, check_resolution, resolve_nodes
from norms import lq_surface_norm, minkowski_check

DEFAULT_DELTAS = tuple(2.0 ** -k for k in range(4, 10))
DEFAULT_SCALES = (4.0, 8.0, 16.0, 32.0, 64.0)
GAUSSIAN_SCALES = (0.5, 0.75, 1.0, 1.5, 2.0)

BLOWUP_THRESHOLD = 0.05
BOUNDARY_MARGIN = 0.05
MIN_SWEEP_POINTS = 4

FAMILIES = ('knapp', 'dilation', 'gaussian')

# Cell status labels
INADMISSIBLE = 'empirically-inadmissible'
CONSISTENT = 'empirically-consistent'
BOUNDARY = 'boundary-deferred'

_samples = lru_cache(maxsize=512)(restrict_ft_to_torus)


def ratio(f, pair, grid, factorized=None):
    """
    Empirical restriction constant ‖f̂|_{T^n}‖_{L^q(σ_n)} / ‖f‖_{L^p(R^{2n})}.

    Raises:
        ZeroNormError: f has zero L^p norm
    """
    denominator = lp_norm_closed_form(f, pair.p)
    if denominator == 0:
        raise ZeroNormError(f"{f.label} has zero L^{float(pair.p):g} norm")
    samples = _samples(f, grid, factorized)
    return lq_surface_norm(samples, pair.q) / denominator


def fit_power_law(parameters, ratios):
    """
    Least-squares line through (log parameter, log ratio).

    Returns:
        (slope, intercept, residual) with residual the RMS deviation of
        log ratio from the fitted line
    """
    parameters = np.asarray(parameters, dtype=float)
    ratios = np.asarray(ratios, dtype=float)
    if parameters.size < MIN_SWEEP_POINTS:
        raise DomainError(
            f"Slope fit needs at least {MIN_SWEEP_POINTS} points, got {parameters.size}"
        )
    if np.any(ratios <= 0) or not np.all(np.isfinite(ratios)):
        raise DomainError("Restriction ratios must be finite and strictly positive")
    # ratio ≈ C·parameter^slope  <=>  log ratio = slope·log parameter + log C
    log_x, log_y = np.log(parameters), np.log(ratios)
    slope, intercept = np.polyfit(log_x, log_y, 1)
    residual = math.sqrt(float(np.mean((log_y - (slope * log_x + intercept)) ** 2)))
    return float(slope), float(intercept), residual


@dataclass
class SweepResult:
    """(parameter, ratio) rows of one family at one exponent pair, with a power-law fit."""

    family: str
    pair: ExponentPair
    n: int
    parameter: str
    limit: str
    rows: list
    slope: float
    intercept: float
    residual: float
    expected_slope: float = float('nan')

    @property
    def blowup_slope(self):
        """Growth rate of the ratio toward the family's limit (positive = blow-up)."""
        # δ → 0 walks toward -∞ in log δ, so growth there is a negative fitted slope
        return -self.slope if self.limit == 'zero' else self.slope

    @property
    def expected_blowup(self):
        return -self.expected_slope if self.limit == 'zero' else self.expected_slope

    @property
    def sup_ratio(self):
        return max(r for _, r in self.rows)

    def csv_rows(self):
        p, q = self.pair.as_floats()
        return [(p, q, parameter, value) for parameter, value in self.rows]


def _sweep(family, make, pair, parameters, grid, parameter, limit, expected, factor=1.0):
    rows = []
    # rows ascending in the parameter, whatever order the caller gave
    for value in sorted(parameters):
        f = make(value)
        if factor != 1.0:
            f = Scaled(factor, f)
        rows.append((float(value), ratio(f, pair, grid)))
    slope, intercept, residual = fit_power_law(*zip(*rows))
    return SweepResult(
        family=family,
        pair=pair,
        n=grid.n,
        parameter=parameter,
        limit=limit,
        rows=rows,
        slope=slope,
        intercept=intercept,
        residual=residual,
        expected_slope=expected,
    )


def _check_parameters(values, name, minimum=MIN_SWEEP_POINTS):
    values = [float(v) for v in values]
    if len(set(values)) < minimum:
        raise DomainError(f"A sweep needs at least {minimum} distinct {name} values, got {len(set(values))}")
    if min(values) <= 0:
        raise DomainError(f"{name} values must be positive")
    return values


def knapp_sweep(pair, deltas=DEFAULT_DELTAS, n=2, nodes=None, center=0.0, factor=1.0):
    """
    Ratio of the n-fold Knapp tensor KnappTube(δ)^{⊗n} as δ → 0.

    Args:
        pair: ExponentPair
        deltas: cap widths in (0, 1/4], at least 4 distinct values
        n: number of circle factors
        nodes: nodes per circle; by default max(256, ceil(8·2π/δ_min))
        center: cap center angle ϰ₀
        factor: constant multiple applied to every family member

    Returns:
        SweepResult with slope ≈ n·(1/q - 3/p') against δ

    Raises:
        UnderResolvedGridError: fewer than 4·2π/δ_min nodes per circle
    """
    deltas = _check_parameters(deltas, 'δ')
    if max(deltas) > 0.25:
        raise DomainError(f"Knapp widths must lie in (0, 1/4], got {max(deltas)}")
    delta_min = min(deltas)
    grid = TorusGrid(n, nodes or resolve_nodes(delta_min))
    check_resolution(grid, delta_min)
    return _sweep(
        'knapp',
        lambda delta: tensor_power(KnappTube(delta, center), n),
        pair, deltas, grid, 'delta', 'zero',
        predicted_knapp_slope(pair, n),
        factor,
    )


def dilation_p_probe(pair, scales=DEFAULT_SCALES, n=2, nodes=DEFAULT_NODES, factor=1.0):
    """
    Ratio of the n-fold annular family AnnularBump(λ)^{⊗n} as λ → ∞.

    f̂_λ is a bump of normal width ~1/λ around every circle factor, constant
    along the torus, so ‖f̂_λ‖_{L^q(σ_n)} ~ λ^n for every q while
    ‖f_λ‖_p ~ λ^{n(2/p - 1/2)}; the fitted slope is n·(3/2 - 2/p) and turns
    positive exactly for p > 4/3.
    """
    scales = _check_parameters(scales, 'λ')
    grid = TorusGrid(n, nodes)
    return _sweep(
        'dilation',
        lambda scale: tensor_power(AnnularBump(scale), n),
        pair, scales, grid, 'lambda', 'infinity',
        predicted_dilation_slope(pair.p, n),
        factor,
    )


def gaussian_sweep(pair, scales=GAUSSIAN_SCALES, n=2, nodes=DEFAULT_NODES, factor=1.0):
    """Unmodulated Gaussians e^{-π|x|²/s²} as s grows: the ratio decays, never blows up."""
    scales = _check_parameters(scales, 's')
    grid = TorusGrid(n, nodes)
    return _sweep(
        'gaussian',
        lambda scale: tensor_power(IsotropicGaussian(scale, 2), n),
        pair, scales, grid, 'scale', 'infinity',
        float('nan'),
        factor,
    )


@dataclass
class RegionCell:
    pair: ExponentPair
    admissible: bool
    distance: float
    slopes: dict
    status: str
    agrees: object  # None for deferred boundary cells

    def csv_row(self):
        p, q = self.pair.as_floats()
        knapp = self.slopes.get('knapp', float('nan'))
        dilation = self.slopes.get('dilation', float('nan'))
        agrees = '' if self.agrees is None else int(self.agrees)
        return (p, q, int(self.admissible), knapp, dilation, self.status, agrees)


@dataclass
class RegionTable:
    """Empirical classification of a (p, q) grid."""

    n: int
    threshold: float
    boundary_margin: float
    families: tuple
    cells: list = field(default_factory=list)

    @property
    def decided(self):
        return [c for c in self.cells if c.status != BOUNDARY]

    @property
    def disagreements(self):
        return [c for c in self.decided if not c.agrees]

    @property
    def agreement(self):
        decided = self.decided
        if not decided:
            return 1.0
        return sum(1 for c in decided if c.agrees) / len(decided)

    def counts(self):
        counts = {INADMISSIBLE: 0, CONSISTENT: 0, BOUNDARY: 0}
        for cell in self.cells:
            counts[cell.status] += 1
        return counts

    def status_map(self):
        return {c.pair.as_floats(): c.status for c in self.cells}


def _family_sweep(name, pair, n, deltas, scales, nodes):
    if name == 'knapp':
        return knapp_sweep(pair, deltas, n=n, nodes=nodes)
    if name == 'dilation':
        return dilation_p_probe(pair, scales, n=n)
    if name == 'gaussian':
        return gaussian_sweep(pair, n=n)
    raise DomainError(f"Unknown family {name!r}; choose from {', '.join(FAMILIES)}")


def classify_cell(pair, families=('knapp', 'dilation'), threshold=BLOWUP_THRESHOLD,
                  boundary_margin=BOUNDARY_MARGIN, n=2, deltas=DEFAULT_DELTAS,
                  scales=DEFAULT_SCALES, nodes=None):
    """Classify one exponent pair from the blow-up slopes of the given families."""
    slopes = {
        name: _family_sweep(name, pair, n, deltas, scales, nodes).blowup_slope
        for name in families
    }
    admissible = torus_admissible(pair)
    distance = boundary_distance(pair)
    if distance <= boundary_margin:
        status, agrees = BOUNDARY, None
    else:
        flagged = any(s > threshold for s in slopes.values())
        status = INADMISSIBLE if flagged else CONSISTENT
        agrees = flagged != admissible
    return RegionCell(pair, admissible, distance, slopes, status, agrees)


def classify_region(p_values, q_values, families=('knapp', 'dilation'),
                    threshold=BLOWUP_THRESHOLD, boundary_margin=BOUNDARY_MARGIN,
                    n=2, deltas=DEFAULT_DELTAS, scales=DEFAULT_SCALES, nodes=None, workers=1):
    """
    Classify every (p, q) cell of a grid by the blow-up slopes of the families.

    A cell is empirically inadmissible when some family's blow-up slope exceeds
    ``threshold``; cells within ``boundary_margin`` of the line p = 4/3 or the
    arc of q = p'/3 over 1 < p ≤ 4/3 are deferred. Agreement is measured
    against torus_admissible on the remaining cells.

    Returns:
        RegionTable with cells sorted by (p, q)
    """
    for name in families:
        if name not in FAMILIES:
            raise DomainError(f"Unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    pairs = sorted({(p, q) for p in p_values for q in q_values}, key=lambda pq: (float(pq[0]), float(pq[1])))
    for p, q in pairs:
        if not (1 <= p <= 2 and 1 <= q <= 4):
            raise DomainError(f"Grid cell (p={float(p):g}, q={float(q):g}) outside [1, 2] × [1, 4]")

    def cell(pq):
        return classify_cell(ExponentPair(*pq), families, threshold, boundary_margin,
                             n, deltas, scales, nodes)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(cell, pairs))
    else:
        cells = [cell(pq) for pq in pairs]
    return RegionTable(n, threshold, boundary_margin, tuple(families), cells)


def tensor_factorization_report(g, h, pair, nodes=512):
    """
    Torus ratio of g⊗h from pointwise samples of the four-dimensional transform,
    against the product of the circle ratios of g and h.
    """
    for factor in (g, h):
        if factor.dim != 2:
            raise DimensionMismatchError(f"Factors must be planar, {factor.label} lives in R^{factor.dim}")
    circle = TorusGrid(1, nodes)
    product = ratio(g, pair, circle) * ratio(h, pair, circle)
    torus = ratio(TensorProduct((g, h)), pair, TorusGrid(2, nodes), factorized=False)
    return {
        'g': g.label,
        'h': h.label,
        'ratio_torus': torus,
        'ratio_product': product,
        'relative_error': abs(torus - product) / product,
    }


def tensor_factorization_check(g, h, pair, nodes=512):
    """Relative error |ratio(g⊗h) - ratio(g)·ratio(h)| / (ratio(g)·ratio(h))."""
    return tensor_factorization_report(g, h, pair, nodes)['relative_error']


def random_planar_function(rng):
    """Draw one planar test function with random parameters."""
    kind = int(rng.integers(5))
    if kind == 0:
        return IsotropicGaussian(float(rng.uniform(0.5, 2.0)), 2)
    if kind == 1:
        return KnappTube(float(2.0 ** -rng.integers(2, 5)), float(rng.uniform(0, 1)))
    if kind == 2:
        return IndicatorBox(tuple(float(a) for a in rng.uniform(0.2, 1.0, size=2)))
    if kind == 3:
        return AnnularBump(float(2.0 ** rng.integers(0, 3)))
    return Scaled(float(rng.uniform(0.5, 3.0)), IsotropicGaussian(1.0, 2))


@dataclass
class DimensionReport:
    tables: dict
    identical: bool
    mismatches: list


def dimension_independence(n_values=(1, 2, 3), p_values=(), q_values=(),
                           families=('knapp', 'dilation'), threshold=BLOWUP_THRESHOLD,
                           boundary_margin=BOUNDARY_MARGIN, deltas=DEFAULT_DELTAS,
                           scales=DEFAULT_SCALES, workers=1):
    """
    Classify the same grid with n-fold tensor families for each n and compare.

    Returns:
        DimensionReport; ``identical`` is True when every non-boundary cell
        receives the same status for all n
    """
    tables = {
        n: classify_region(p_values, q_values, families, threshold, boundary_margin,
                           n=n, deltas=deltas, scales=scales, workers=workers)
        for n in n_values
    }
    maps = [t.status_map() for t in tables.values()]
    mismatches = []
    for key, status in maps[0].items():
        if status == BOUNDARY:
            continue
        if any(m[key] != status for m in maps[1:]):
            mismatches.append(key)
    return DimensionReport(tables, not mismatches, mismatches)


def minkowski_chain(g, h, pair, grid=None, ambient_nodes=48, radius=None):
    """
    Minkowski interchange on the partial transform |F_{y→η}(g⊗h)(x, η)|.

    Ambient nodes and weights come from the Gauss–Legendre oracle box of g;
    surface nodes are the circle grid with weights 1/N.
    """
    grid = grid or TorusGrid(1, DEFAULT_NODES)
    x_nodes, x_weights = oracle_nodes(g, radius, ambient_nodes)
    values = partial_ft_array(TensorProduct((g, h)), x_nodes, grid)
    surface = np.full(grid.nodes_per_circle, grid.circle_weight)
    return minkowski_check(values, pair.p, pair.q, x_weights, surface)


def minkowski_trials(trials, p, q, seed=0, max_size=12):
    """
    Random nonnegative arrays with random positive weights.

    Yields:
        (trial, record) with the minkowski_check record of each array
    """
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        shape = tuple(int(k) for k in rng.integers(1, max_size + 1, size=2))
        values = rng.random(shape) ** 3
        values[rng.random(shape) < 0.1] = 0.0
        ambient = rng.uniform(0.1, 1.0, size=shape[1])
        surface = rng.uniform(0.1, 1.0, size=shape[0])
        yield trial, minkowski_check(values, p, q, ambient, surface / surface.sum())
