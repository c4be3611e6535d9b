"""Directional dependence estimation with permutation-based significance.

The estimator runs sample -> pseudo-observations -> empirical copula ->
checkerboard at the resolution ``floor(sqrt(min unique count))`` and reports
q(X, Y) = zeta1 of that board, q(Y, X) from the identical pipeline on the
swapped sample, their mean, the asymmetry a = q(X, Y) - q(Y, X), and
permutation p-values for dependence and for symmetry of the dependence.

Randomness is drawn from numpy's seeded PCG64 generator.  Replicate b of
test stream t uses ``SeedSequence(entropy=seed, spawn_key=(t, b))`` (t = 0 for
the dependence test, t = 1 for the asymmetry test), which makes results
reproducible and independent of evaluation order or thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .copula import (
    BivariateSample,
    _board_from_ranks,
    _max_ranks,
    _zeta1_mass,
    checkerboard_aggregate,
    empirical_copula,
    pseudo_observations,
    zeta1,
)
from .errors import DegenerateInputError

__all__ = [
    "QadOptions",
    "QadResult",
    "resolution_rule",
    "qad_compute",
    "permutation_test_dependence",
    "permutation_test_asymmetry",
]

DEPENDENCE_STREAM = 0
ASYMMETRY_STREAM = 1


@dataclass(frozen=True)
class QadOptions:
    """Estimation settings.

    permutations = 0 skips the significance tests.  ``resolution_override``
    replaces the default resolution rule (research use only).
    """

    permutations: int = 0
    seed: int = 0
    resolution_override: int | None = None
    min_n_warning_threshold: int = 16
    threads: int = 1

    def __post_init__(self):
        if self.permutations < 0:
            raise ValueError("permutations must be >= 0")
        if self.resolution_override is not None and self.resolution_override < 1:
            raise ValueError("resolution override must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass(frozen=True)
class QadResult:
    """Directional dependence estimates for one sample.

    q_xy is the dependence of Y on X, q_yx the dependence of X on Y; the
    asymmetry is q_xy - q_yx.  p-values are None when permutations were 0.
    """

    q_xy: float
    q_yx: float
    mean_dependence: float
    asymmetry: float
    p_q_xy: float | None
    p_q_yx: float | None
    p_asymmetry: float | None
    n: int
    n_unique_x: int
    n_unique_y: int
    resolution: int
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        """Stable field order for JSON serialization; p-values omitted if absent."""
        out = {
            "q_xy": self.q_xy,
            "q_yx": self.q_yx,
            "mean_dependence": self.mean_dependence,
            "asymmetry": self.asymmetry,
        }
        if self.p_q_xy is not None:
            out["p_q_xy"] = self.p_q_xy
            out["p_q_yx"] = self.p_q_yx
            out["p_asymmetry"] = self.p_asymmetry
        out.update(
            {
                "n": self.n,
                "n_unique_x": self.n_unique_x,
                "n_unique_y": self.n_unique_y,
                "resolution": self.resolution,
                "warnings": list(self.warnings),
            }
        )
        return out


def resolution_rule(n: int, n_unique_x: int, n_unique_y: int) -> int:
    """Checkerboard resolution: floor(sqrt(smaller unique-value count)).

    For tie-free data this is floor(sqrt(n)).  Constant margins give N = 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return max(1, math.isqrt(min(n_unique_x, n_unique_y)))


def _derived_rng(seed: int, stream: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(stream, replicate))
    )


def _rank_rep(sample: BivariateSample):
    ru, tu = _max_ranks(sample.xs)
    rv, tv = _max_ranks(sample.ys)
    return ru, tu, rv, tv


def _q_both(ru, tu, rv, tv, n, resolution):
    """(q_xy, q_yx) from max-rank arrays; the swapped board is the transpose."""
    board = _board_from_ranks(ru, tu, rv, tv, n, resolution)
    return _zeta1_mass(board), _zeta1_mass(board.T)


def _map_replicates(fn, B, threads):
    """Evaluate fn(0..B-1); replicate seeds make any schedule equivalent."""
    if threads <= 1 or B <= 1:
        return [fn(b) for b in range(B)]
    threads = min(threads, B)
    bounds = np.linspace(0, B, threads + 1).astype(int)
    chunks = [range(bounds[i], bounds[i + 1]) for i in range(threads)]

    def run_chunk(chunk):
        return [fn(b) for b in chunk]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(run_chunk, chunks))
    return [item for part in parts for item in part]


def permutation_test_dependence(
    sample: BivariateSample,
    permutations: int,
    seed: int,
    resolution: int | None = None,
    threads: int = 1,
):
    """Permutation p-values for the two directional dependence estimates.

    Each replicate shuffles the y-sequence uniformly at random (breaking the
    pairing while preserving both margins) and recomputes the estimates at the
    same resolution; p = (1 + #{q_b >= q_observed}) / (B + 1) per direction.
    """
    if permutations < 1:
        raise ValueError("permutations must be >= 1")
    n = sample.n
    ru, tu, rv, tv = _rank_rep(sample)
    if resolution is None:
        resolution = resolution_rule(
            n, int(np.unique(sample.xs).size), int(np.unique(sample.ys).size)
        )
    q_xy, q_yx = _q_both(ru, tu, rv, tv, n, resolution)

    def one(b):
        perm = _derived_rng(seed, DEPENDENCE_STREAM, b).permutation(n)
        qb_xy, qb_yx = _q_both(ru, tu, rv[perm], tv[perm], n, resolution)
        return qb_xy >= q_xy, qb_yx >= q_yx

    hits = _map_replicates(one, permutations, threads)
    ge_xy = sum(h[0] for h in hits)
    ge_yx = sum(h[1] for h in hits)
    B = permutations
    return (1 + ge_xy) / (B + 1), (1 + ge_yx) / (B + 1)


def permutation_test_asymmetry(
    sample: BivariateSample,
    permutations: int,
    seed: int,
    resolution: int | None = None,
    threads: int = 1,
) -> float:
    """Permutation p-value for the hypothesis of symmetric dependence.

    Both margins are first rank-normalized to pseudo-observations, then each
    replicate swaps every pair's coordinates independently with probability
    1/2 and recomputes |a| at the same resolution; under exchangeability of
    the rank pair this randomization is the natural null for symmetry.
    p = (1 + #{|a_b| >= |a_observed|}) / (B + 1).
    """
    if permutations < 1:
        raise ValueError("permutations must be >= 1")
    n = sample.n
    pobs = pseudo_observations(sample)
    us, vs = pobs.us, pobs.vs
    if resolution is None:
        resolution = resolution_rule(n, pobs.n_unique_u, pobs.n_unique_v)
    ru, tu = _max_ranks(us)
    rv, tv = _max_ranks(vs)
    q_xy, q_yx = _q_both(ru, tu, rv, tv, n, resolution)
    a_obs = abs(q_xy - q_yx)

    def one(b):
        swap = _derived_rng(seed, ASYMMETRY_STREAM, b).random(n) < 0.5
        xb = np.where(swap, vs, us)
        yb = np.where(swap, us, vs)
        rub, tub = _max_ranks(xb)
        rvb, tvb = _max_ranks(yb)
        qb_xy, qb_yx = _q_both(rub, tub, rvb, tvb, n, resolution)
        return abs(qb_xy - qb_yx) >= a_obs

    hits = _map_replicates(one, permutations, threads)
    return (1 + sum(hits)) / (permutations + 1)


def qad_compute(sample: BivariateSample, opts: QadOptions = QadOptions()) -> QadResult:
    """Full estimation pipeline for one sample.

    Runs pseudo-observation ranking, empirical-copula construction and
    checkerboard aggregation in each direction, evaluates zeta1, and attaches
    permutation p-values when requested.
    """
    n = sample.n
    if n < 2:
        raise DegenerateInputError("need at least 2 observations")
    warnings = []
    pobs = pseudo_observations(sample)
    if opts.resolution_override is not None:
        resolution = opts.resolution_override
    else:
        resolution = resolution_rule(n, pobs.n_unique_u, pobs.n_unique_v)
    if n < opts.min_n_warning_threshold:
        warnings.append(
            f"sample size {n} below recommended minimum ({opts.min_n_warning_threshold})"
        )
    if pobs.n_unique_u == 1:
        warnings.append("x is constant; dependence is 0 in both directions")
    if pobs.n_unique_v == 1:
        warnings.append("y is constant; dependence is 0 in both directions")

    board_xy = checkerboard_aggregate(empirical_copula(pobs), resolution)
    pobs_swapped = pseudo_observations(sample.swapped())
    board_yx = checkerboard_aggregate(empirical_copula(pobs_swapped), resolution)
    q_xy = zeta1(board_xy)
    q_yx = zeta1(board_yx)

    p_q_xy = p_q_yx = p_asym = None
    if opts.permutations > 0:
        p_q_xy, p_q_yx = permutation_test_dependence(
            sample, opts.permutations, opts.seed, resolution, opts.threads
        )
        p_asym = permutation_test_asymmetry(
            sample, opts.permutations, opts.seed, resolution, opts.threads
        )

    return QadResult(
        q_xy=q_xy,
        q_yx=q_yx,
        mean_dependence=(q_xy + q_yx) / 2,
        asymmetry=q_xy - q_yx,
        p_q_xy=p_q_xy,
        p_q_yx=p_q_yx,
        p_asymmetry=p_asym,
        n=n,
        n_unique_x=pobs.n_unique_u,
        n_unique_y=pobs.n_unique_v,
        resolution=resolution,
        warnings=tuple(warnings),
    )
