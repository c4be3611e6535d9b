"""Empirical copulas, checkerboard aggregation, and conditional-distribution metrics.

A bivariate sample is mapped to the copula scale through normalized max-ranks
(ties are carried as rectangle widths, never broken), aggregated onto an N x N
grid, and scored with metrics built from conditional distribution functions.
All metric values are computed in closed form: the conditional CDFs of a
checkerboard are piecewise linear, so integrals of absolute differences reduce
to per-cell trapezoid/root formulas and suprema to finite candidate sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BivariateSample",
    "PseudoObservations",
    "EmpiricalCopula",
    "CheckerboardCopula",
    "pseudo_observations",
    "empirical_copula",
    "ecop_cdf",
    "checkerboard_aggregate",
    "conditional_cdf",
    "d1_pi",
    "zeta1",
    "transpose",
    "d_infty",
    "d1",
    "d_infty_markov",
    "extremal_metric_pair",
]

#: Tolerance for mass-balance invariants (total mass 1, uniform margins).
MASS_TOL = 1e-12


def _as_float_vector(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return arr


def _max_ranks(values):
    """Max-rank representation of a vector.

    Returns (R, t) where R[i] = #{j : v_j <= v_i} and t[i] = #{j : v_j == v_i}.
    R/n is the empirical CDF evaluated at the data points.
    """
    _, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    return ends[inverse], counts[inverse]


@dataclass(frozen=True)
class BivariateSample:
    """Paired real observations, the raw input of the estimation pipeline."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = _as_float_vector(self.xs, "xs")
        ys = _as_float_vector(self.ys, "ys")
        if xs.size != ys.size:
            raise ValueError("xs and ys must have equal length")
        if xs.size == 0:
            raise ValueError("empty input")
        if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
            raise ValueError("sample values must be finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return self.xs.size

    def swapped(self) -> "BivariateSample":
        """The sample with coordinates exchanged."""
        return BivariateSample(self.ys, self.xs)


@dataclass(frozen=True)
class PseudoObservations:
    """Normalized max-ranks (u_i, v_i) of a sample, each a multiple of 1/n.

    ``ranks_u``/``ranks_v`` hold the integer max-ranks, ``ties_u``/``ties_v``
    the per-element multiplicity of the value in its own margin.  These carry
    tie information exactly; ``us``/``vs`` are the float views ranks/n.
    """

    us: np.ndarray
    vs: np.ndarray
    n: int
    n_unique_u: int
    n_unique_v: int
    ranks_u: np.ndarray = field(repr=False)
    ranks_v: np.ndarray = field(repr=False)
    ties_u: np.ndarray = field(repr=False)
    ties_v: np.ndarray = field(repr=False)


def pseudo_observations(sample: BivariateSample) -> PseudoObservations:
    """Transform a sample to the copula scale via empirical CDFs.

    u_i = F_n(x_i) = (number of x_j <= x_i) / n, and likewise for v_i.
    Ties are not broken; tied values share the same (maximal) rank.
    """
    ru, tu = _max_ranks(sample.xs)
    rv, tv = _max_ranks(sample.ys)
    n = sample.n
    return PseudoObservations(
        us=ru / n,
        vs=rv / n,
        n=n,
        n_unique_u=int(np.unique(sample.xs).size),
        n_unique_v=int(np.unique(sample.ys).size),
        ranks_u=ru,
        ranks_v=rv,
        ties_u=tu,
        ties_v=tv,
    )


@dataclass(frozen=True)
class EmpiricalCopula:
    """Rectangle-mass representation of the empirical copula of a sample.

    One rectangle per distinct pseudo-observation pair (u'_i, v'_i): mass
    t_i/n is spread uniformly on [u'_i - r_i/n, u'_i] x [v'_i - s_i/n, v'_i],
    where t_i is the multiplicity of the pair and r_i, s_i the multiplicities
    of u'_i and v'_i in their margins.  Integer arrays are kept so that strip
    overlaps can later be computed without rounding.
    """

    n: int
    ranks_u: np.ndarray  # (m,) integer max-ranks of the distinct pairs
    ranks_v: np.ndarray
    ties_u: np.ndarray  # (m,) r_i
    ties_v: np.ndarray  # (m,) s_i
    counts: np.ndarray  # (m,) t_i

    @property
    def m(self) -> int:
        """Number of distinct pseudo-observation pairs."""
        return self.counts.size

    def rects(self):
        """The (u', v', r, s, t) records, one per distinct pair."""
        n = self.n
        return [
            (ru / n, rv / n, int(r), int(s), int(t))
            for ru, rv, r, s, t in zip(
                self.ranks_u, self.ranks_v, self.ties_u, self.ties_v, self.counts
            )
        ]

    def margin_masses(self, axis: int) -> np.ndarray:
        """Total mass per 1/n-slab along ``axis`` (0 = first coordinate).

        A valid empirical copula has uniform margins: every entry is 1/n.
        """
        if axis == 0:
            ranks, ties = self.ranks_u, self.ties_u
        elif axis == 1:
            ranks, ties = self.ranks_v, self.ties_v
        else:
            raise ValueError("axis must be 0 or 1")
        out = np.zeros(self.n)
        masses = self.counts / (self.n * ties)  # mass per covered slab
        for rank, tie, m in zip(ranks, ties, masses):
            out[rank - tie : rank] += m
        return out


def empirical_copula(pobs: PseudoObservations) -> EmpiricalCopula:
    """Build the empirical copula (rectangle masses) from pseudo-observations."""
    n = pobs.n
    codes = pobs.ranks_u * (n + 1) + pobs.ranks_v
    _, first, counts = np.unique(codes, return_index=True, return_counts=True)
    order = np.argsort(first)  # keep first-appearance order of the pairs
    first = first[order]
    counts = counts[order]
    return EmpiricalCopula(
        n=n,
        ranks_u=pobs.ranks_u[first],
        ranks_v=pobs.ranks_v[first],
        ties_u=pobs.ties_u[first],
        ties_v=pobs.ties_v[first],
        counts=counts,
    )


def ecop_cdf(ecop: EmpiricalCopula, u, v):
    """Exact CDF of the empirical copula at (u, v) in [0, 1]^2.

    Sums, over the mass rectangles, the fraction of each rectangle covered by
    [0, u] x [0, v].  Scalars in, scalar out; arrays broadcast elementwise.
    """
    u_arr = np.asarray(u, dtype=float)
    v_arr = np.asarray(v, dtype=float)
    if np.any((u_arr < 0) | (u_arr > 1) | (v_arr < 0) | (v_arr > 1)):
        raise ValueError("coordinates must lie in [0, 1]")
    n = ecop.n
    lo_u = (ecop.ranks_u - ecop.ties_u) / n
    lo_v = (ecop.ranks_v - ecop.ties_v) / n
    wu = ecop.ties_u / n
    wv = ecop.ties_v / n
    mass = ecop.counts / n
    fx = np.clip((u_arr[..., None] - lo_u) / wu, 0.0, 1.0)
    fy = np.clip((v_arr[..., None] - lo_v) / wv, 0.0, 1.0)
    out = np.sum(mass * fx * fy, axis=-1)
    return float(out) if out.ndim == 0 else out


class CheckerboardCopula:
    """An N x N checkerboard copula given by its cell-mass matrix.

    ``mass[i][j]`` is the probability of the cell with first coordinate in
    strip i and second coordinate in strip j (half-open strips, last closed).
    Rows and columns each sum to 1/N (doubly stochastic up to scaling).
    """

    __slots__ = ("resolution", "mass")

    def __init__(self, mass, validate: bool = True):
        mass = np.asarray(mass, dtype=float)
        if mass.ndim != 2 or mass.shape[0] != mass.shape[1]:
            raise ValueError("mass must be a square matrix")
        n = mass.shape[0]
        if validate:
            if np.any(mass < -MASS_TOL):
                raise ValueError("mass entries must be nonnegative")
            target = 1.0 / n
            if abs(mass.sum() - 1.0) > MASS_TOL:
                raise ValueError("total mass must equal 1")
            if np.max(np.abs(mass.sum(axis=1) - target)) > MASS_TOL:
                raise ValueError("row sums must equal 1/N")
            if np.max(np.abs(mass.sum(axis=0) - target)) > MASS_TOL:
                raise ValueError("column sums must equal 1/N")
        self.resolution = n
        self.mass = np.maximum(mass, 0.0)
        self.mass.setflags(write=False)

    @classmethod
    def independence(cls, resolution: int) -> "CheckerboardCopula":
        """The product copula: all cells carry 1/N^2."""
        n = int(resolution)
        if n < 1:
            raise ValueError("resolution must be >= 1")
        return cls(np.full((n, n), 1.0 / (n * n)), validate=False)

    @classmethod
    def comonotone(cls, resolution: int) -> "CheckerboardCopula":
        """The N-checkerboard of the minimum copula: mass 1/N on the diagonal."""
        n = int(resolution)
        if n < 1:
            raise ValueError("resolution must be >= 1")
        return cls(np.eye(n) / n, validate=False)

    def transpose(self) -> "CheckerboardCopula":
        return CheckerboardCopula(self.mass.T.copy(), validate=False)

    def cdf_grid(self) -> np.ndarray:
        """CDF values at the (N+1) x (N+1) cell corners."""
        n = self.resolution
        grid = np.zeros((n + 1, n + 1))
        grid[1:, 1:] = np.cumsum(np.cumsum(self.mass, axis=0), axis=1)
        return grid

    def to_json_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "mass": [float(x) for x in self.mass.ravel()],
        }

    def __eq__(self, other):
        return (
            isinstance(other, CheckerboardCopula)
            and self.resolution == other.resolution
            and np.array_equal(self.mass, other.mass)
        )

    def __repr__(self):
        return f"CheckerboardCopula(resolution={self.resolution})"


# ---------------------------------------------------------------------------
# Aggregation onto the checkerboard grid
# ---------------------------------------------------------------------------


def _delta_overlap_matrix(lo, hi, strip_width, resolution):
    """Dense per-rectangle strip-overlap fractions, integer coordinates.

    Rectangle k spans [lo[k], hi[k]] on an axis where strip i covers
    [i*strip_width, (i+1)*strip_width].  Entry (k, i) is the fraction of the
    rectangle's extent falling into strip i.
    """
    bounds = np.arange(resolution + 1, dtype=float) * strip_width
    span = (hi - lo).astype(float)[:, None]
    frac = np.clip((bounds[None, :] - lo[:, None]) / span, 0.0, 1.0)
    return np.diff(frac, axis=1)


def _two_strip_split(lo, hi, strip_width):
    """Strip indices and first-strip weight when every span fits in <= 2 strips."""
    i0 = lo // strip_width
    i1 = (hi - 1) // strip_width
    boundary = (i0 + 1) * strip_width
    span = (hi - lo).astype(float)
    w0 = np.where(i1 > i0, (boundary - lo) / span, 1.0)
    return i0, i1, w0


def _aggregate_rects(lo_u, hi_u, lo_v, hi_v, masses, strip_width, resolution):
    """Cell masses of the N-grid aggregation of a rectangle measure.

    All coordinates are integers on a common scale where strip boundaries sit
    at multiples of ``strip_width``; overlap fractions are then exact up to
    one rounding each.
    """
    n_cells = resolution * resolution
    small_u = int(np.max(hi_u - lo_u)) <= strip_width
    small_v = int(np.max(hi_v - lo_v)) <= strip_width
    if small_u and small_v:
        i0, i1, wu = _two_strip_split(lo_u, hi_u, strip_width)
        j0, j1, wv = _two_strip_split(lo_v, hi_v, strip_width)
        idx = np.concatenate(
            [ii * resolution + jj for ii in (i0, i1) for jj in (j0, j1)]
        )
        w = np.concatenate(
            [
                masses * wi * wj
                for wi in (wu, 1.0 - wu)
                for wj in (wv, 1.0 - wv)
            ]
        )
        flat = np.bincount(idx, weights=w, minlength=n_cells)
        return flat.reshape(resolution, resolution)
    gu = _delta_overlap_matrix(lo_u, hi_u, strip_width, resolution)
    gv = _delta_overlap_matrix(lo_v, hi_v, strip_width, resolution)
    return (gu * masses[:, None]).T @ gv


def _board_from_ranks(ranks_u, ties_u, ranks_v, ties_v, n, resolution):
    """Checkerboard mass matrix straight from per-element max-ranks.

    Element i spreads mass 1/n uniformly on
    [(R_u - t_u)/n, R_u/n] x [(R_v - t_v)/n, R_v/n]; summing elements of a
    tied pair reproduces the rectangle masses of the empirical copula.
    """
    N = resolution
    return _aggregate_rects(
        (ranks_u - ties_u) * N,
        ranks_u * N,
        (ranks_v - ties_v) * N,
        ranks_v * N,
        np.full(ranks_u.size, 1.0 / n),
        n,
        N,
    )


def checkerboard_aggregate(copula, resolution: int) -> CheckerboardCopula:
    """Aggregate a copula's mass onto the N x N checkerboard grid.

    Accepts an EmpiricalCopula or a CheckerboardCopula (any resolution);
    each source rectangle contributes mass times the exact area-overlap
    fraction.  Aggregating a checkerboard to its own resolution returns an
    equal copula (the operation is a projection).
    """
    N = int(resolution)
    if N < 1:
        raise ValueError("resolution must be >= 1")
    if isinstance(copula, EmpiricalCopula):
        n = copula.n
        mass = _aggregate_rects(
            (copula.ranks_u - copula.ties_u) * N,
            copula.ranks_u * N,
            (copula.ranks_v - copula.ties_v) * N,
            copula.ranks_v * N,
            copula.counts / n,
            n,
            N,
        )
    elif isinstance(copula, CheckerboardCopula):
        M = copula.resolution
        idx = np.arange(M)
        iu, iv = np.meshgrid(idx, idx, indexing="ij")
        mass = _aggregate_rects(
            iu.ravel() * N,
            (iu.ravel() + 1) * N,
            iv.ravel() * N,
            (iv.ravel() + 1) * N,
            copula.mass.ravel(),
            M,
            N,
        )
    else:
        raise TypeError("expected EmpiricalCopula or CheckerboardCopula")
    return CheckerboardCopula(mass, validate=False)


# ---------------------------------------------------------------------------
# Conditional CDFs and metrics
# ---------------------------------------------------------------------------


def _boundary_cdfs(mass: np.ndarray) -> np.ndarray:
    """Conditional CDF values at cell boundaries, one row per strip.

    Entry (i, j) is K(strip i, [0, j/N]) = N * sum_{l <= j} mass[i, l];
    column 0 is identically zero.
    """
    N = mass.shape[0]
    out = np.zeros((N, N + 1))
    out[:, 1:] = np.cumsum(mass, axis=1) * N
    return out


def _abs_linear_cell_base(d0, d1):
    """Per-cell integral of |linear segment| over a unit-width cell.

    The segment runs from d0 to d1.  Same sign: trapezoid; sign change:
    split at the root.  Multiply by the cell width to get the true integral.
    """
    a0 = np.abs(d0)
    a1 = np.abs(d1)
    denom = np.maximum(a0 + a1, 1e-300)
    return np.where(d0 * d1 >= 0.0, (a0 + a1) / 2.0, (d0 * d0 + d1 * d1) / (2.0 * denom))


def _mass_of(cb) -> np.ndarray:
    return cb.mass if isinstance(cb, CheckerboardCopula) else np.asarray(cb, dtype=float)


def _check_same_resolution(a, b):
    if a.shape != b.shape:
        raise ValueError("checkerboards must have equal resolution")


def _cells_integral(e: np.ndarray) -> float:
    N = e.shape[0]
    base = _abs_linear_cell_base(e[:, :-1], e[:, 1:])
    return float(base.sum() / (N * N))


def d1(cb_a, cb_b) -> float:
    """The conditional-distribution L1 metric between two same-resolution boards.

    Integrates, strip by strip, the absolute difference of the piecewise-linear
    conditional CDFs in closed form.
    """
    ma, mb = _mass_of(cb_a), _mass_of(cb_b)
    _check_same_resolution(ma, mb)
    return _cells_integral(_boundary_cdfs(ma) - _boundary_cdfs(mb))


def _product_boundary_row(resolution: int) -> np.ndarray:
    # bitwise identical to any row of _boundary_cdfs(independence board)
    row = np.zeros(resolution + 1)
    row[1:] = np.cumsum(np.full(resolution, 1.0 / (resolution * resolution))) * resolution
    return row


def d1_pi(cb) -> float:
    """D1 distance from the product copula; attains values in [0, 1/3].

    The product's conditional CDF is the same in every strip, so its boundary
    row is broadcast rather than materialized as a full board; the result is
    bit-identical to d1(cb, independence board).
    """
    mass = _mass_of(cb)
    N = mass.shape[0]
    e = _boundary_cdfs(mass)
    e -= _product_boundary_row(N)[None, :]
    return _cells_integral(e)


def zeta1(cb) -> float:
    """The dependence measure 3 * D1(A, product); 0 iff independence."""
    return min(1.0, max(0.0, 3.0 * d1_pi(cb)))


def _zeta1_mass(mass: np.ndarray) -> float:
    # identical code path as the public zeta1, minus object wrapping
    N = mass.shape[0]
    e = _boundary_cdfs(mass)
    e -= _product_boundary_row(N)[None, :]
    val = 3.0 * _cells_integral(e)
    return min(1.0, max(0.0, val))


def transpose(cb: CheckerboardCopula) -> CheckerboardCopula:
    """The copula with coordinates exchanged (mass matrix transposed)."""
    return cb.transpose()


def d_infty(cb_a: CheckerboardCopula, cb_b: CheckerboardCopula) -> float:
    """Uniform (sup) metric between the CDFs of two same-resolution boards.

    The CDF difference is bilinear on each cell, so the supremum over the unit
    square is attained at a cell corner.
    """
    _check_same_resolution(cb_a.mass, cb_b.mass)
    return float(np.max(np.abs(cb_a.cdf_grid() - cb_b.cdf_grid())))


def d_infty_markov(cb_a: CheckerboardCopula, cb_b: CheckerboardCopula) -> float:
    """Sup over y of the x-averaged absolute conditional-CDF difference.

    The map y -> integral_x |K_A - K_B| is piecewise linear with kinks at the
    cell boundaries and at interior sign changes of each strip difference, so
    the supremum is the maximum over that finite candidate set.
    """
    ma, mb = cb_a.mass, cb_b.mass
    _check_same_resolution(ma, mb)
    N = ma.shape[0]
    e = _boundary_cdfs(ma) - _boundary_cdfs(mb)  # (N, N+1)
    e0, e1 = e[:, :-1], e[:, 1:]
    strip_idx, cell_idx = np.nonzero(e0 * e1 < 0.0)
    roots = np.empty(0)
    if strip_idx.size:
        a = e0[strip_idx, cell_idx]
        b = e1[strip_idx, cell_idx]
        roots = (cell_idx + a / (a - b)) / N
    candidates = np.concatenate([np.arange(N + 1) / N, roots])
    pos = candidates * N
    j = np.clip(pos.astype(int), 0, N - 1)
    s = pos - j
    vals = e[:, j] * (1.0 - s) + e[:, j + 1] * s  # (N, n_candidates)
    phi = np.abs(vals).sum(axis=0) / N
    return float(phi.max())


def conditional_cdf(cb: CheckerboardCopula, strip: int, y):
    """Conditional CDF of the second coordinate given the first-strip index.

    ``strip`` is 1-based (1 <= strip <= N).  The CDF is piecewise linear with
    value N * cumulative strip mass at each cell boundary.
    """
    N = cb.resolution
    if not 1 <= strip <= N:
        raise ValueError("strip index out of range")
    y_arr = np.asarray(y, dtype=float)
    if np.any((y_arr < 0) | (y_arr > 1)):
        raise ValueError("y must lie in [0, 1]")
    c = _boundary_cdfs(cb.mass)[strip - 1]
    pos = y_arr * N
    j = np.clip(pos.astype(int), 0, N - 1)
    s = pos - j
    out = c[j] * (1.0 - s) + c[j + 1] * s
    return float(out) if out.ndim == 0 else out


def extremal_metric_pair(resolution: int):
    """A pair of N-checkerboards attaining D_infty = 2(N-1) * d_infty.

    Requires even N.  Both boards split each strip's mass uniformly over the
    lower or upper half of the cells; the strip-wise below-mass alternates so
    that the CDF difference oscillates with amplitude 1/(2N) while the
    conditional CDFs disagree fully on the interior strips, giving
    d_infty = 1/(2N) and D_infty = (N-1)/N.
    """
    N = int(resolution)
    if N < 2 or N % 2:
        raise ValueError("resolution must be an even integer >= 2")
    full = 1.0 / N
    half = 1.0 / (2 * N)
    below_a = np.zeros(N)
    below_b = np.zeros(N)
    below_a[0] = below_a[-1] = half
    below_a[1:-1:2] = full  # interior strips alternate, offset by one
    below_b[0] = full
    below_b[2:-1:2] = full

    def build(below):
        mass = np.empty((N, N))
        mass[:, : N // 2] = (below / (N / 2))[:, None]
        mass[:, N // 2 :] = ((full - below) / (N / 2))[:, None]
        return CheckerboardCopula(mass)

    return build(below_a), build(below_b)
