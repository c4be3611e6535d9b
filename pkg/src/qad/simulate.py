"""Samplers for validation copula families, shape generators, and the
convergence-experiment runner.

The parametric families come with closed-form dependence targets so that the
estimator can be validated end to end: Marshall-Olkin (asymmetric, with an
explicit zeta1 formula), Farlie-Gumbel-Morgenstern (zeta1 = |theta|/4), the
completely dependent copula y = a*x mod 1 (zeta1 = 1 forward, no closed form
for the transpose), and independence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .copula import BivariateSample, CheckerboardCopula
from .estimator import QadOptions, qad_compute

__all__ = [
    "MarshallOlkin",
    "FGM",
    "CompletelyDependent",
    "Independence",
    "CopulaModel",
    "ShapeGenerator",
    "SHAPE_NAMES",
    "sample_model",
    "zeta1_closed_form",
    "generate_shape",
    "analytic_checkerboard",
    "ExperimentRow",
    "ExperimentResult",
    "convergence_experiment",
]


@dataclass(frozen=True)
class MarshallOlkin:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1):
            raise ValueError("Marshall-Olkin parameters must lie in [0, 1]")

    label = "mo"

    def params(self) -> str:
        return f"alpha={self.alpha:g};beta={self.beta:g}"


@dataclass(frozen=True)
class FGM:
    theta: float

    def __post_init__(self):
        if not -1 <= self.theta <= 1:
            raise ValueError("FGM parameter must lie in [-1, 1]")

    label = "fgm"

    def params(self) -> str:
        return f"theta={self.theta:g}"


@dataclass(frozen=True)
class CompletelyDependent:
    slope: int

    def __post_init__(self):
        if int(self.slope) != self.slope or self.slope < 1:
            raise ValueError("slope must be a positive integer")

    label = "cd"

    def params(self) -> str:
        return f"slope={self.slope}"


@dataclass(frozen=True)
class Independence:
    label = "independence"

    def params(self) -> str:
        return ""


CopulaModel = Union[MarshallOlkin, FGM, CompletelyDependent, Independence]


def sample_model(model: CopulaModel, n: int, seed) -> BivariateSample:
    """Draw n i.i.d. pairs from the model's copula.

    Marshall-Olkin uses the max-power construction
    X = max(U1^(1/(1-alpha)), U3^(1/alpha)), Y = max(U2^(1/(1-beta)), U3^(1/beta)),
    with the alpha,beta in {0,1} limits taken analytically.  FGM inverts the
    conditional CDF in closed form (quadratic in v).  ``seed`` may be an int,
    SeedSequence, or Generator.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(model, Independence):
        u = rng.random(n)
        v = rng.random(n)
        return BivariateSample(u, v)
    if isinstance(model, CompletelyDependent):
        x = rng.random(n)
        return BivariateSample(x, (model.slope * x) % 1.0)
    if isinstance(model, MarshallOlkin):
        a, b = model.alpha, model.beta
        u1, u2, u3 = rng.random((3, n))
        if a == 0:
            x = u1
        elif a == 1:
            x = u3
        else:
            x = np.maximum(u1 ** (1.0 / (1.0 - a)), u3 ** (1.0 / a))
        if b == 0:
            y = u2
        elif b == 1:
            y = u3
        else:
            y = np.maximum(u2 ** (1.0 / (1.0 - b)), u3 ** (1.0 / b))
        return BivariateSample(x, y)
    if isinstance(model, FGM):
        u = rng.random(n)
        p = rng.random(n)
        coeff = model.theta * (1.0 - 2.0 * u)
        disc = np.sqrt((1.0 + coeff) ** 2 - 4.0 * coeff * p)
        denom = (1.0 + coeff) + disc
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.where(denom > 0, 2.0 * p / np.where(denom > 0, denom, 1.0), 0.0)
        v = np.where(coeff == 0, p, v)
        return BivariateSample(u, v)
    raise TypeError(f"unknown model {model!r}")


def _mo_zeta1(alpha: float, beta: float) -> float:
    """Closed-form zeta1 of the Marshall-Olkin copula."""
    if alpha == 0 or beta == 0:
        return 0.0
    z = 1.0 / alpha + 2.0 / beta - 1.0
    base = 1.0 - alpha
    return (
        3.0 * alpha * base**z
        + (6.0 / beta) * (1.0 - base**z) / z
        - (6.0 / beta) * (1.0 - base ** (z + 1.0)) / (z + 1.0)
    )


def zeta1_closed_form(model: CopulaModel):
    """(zeta1 of the model, zeta1 of its transpose), None where no closed form.

    The Marshall-Olkin transpose swaps (alpha, beta); FGM is symmetric;
    the completely dependent family has zeta1 = 1 forward but no closed form
    for the transpose, reported as None.
    """
    if isinstance(model, Independence):
        return 0.0, 0.0
    if isinstance(model, FGM):
        val = abs(model.theta) / 4.0
        return val, val
    if isinstance(model, CompletelyDependent):
        return 1.0, None
    if isinstance(model, MarshallOlkin):
        return _mo_zeta1(model.alpha, model.beta), _mo_zeta1(model.beta, model.alpha)
    raise TypeError(f"unknown model {model!r}")


def _model_cdf(model: CopulaModel, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    if isinstance(model, MarshallOlkin):
        a, b = model.alpha, model.beta
        return np.minimum(u ** (1.0 - a) * v, u * v ** (1.0 - b))
    if isinstance(model, FGM):
        return u * v + model.theta * u * v * (1.0 - u) * (1.0 - v)
    if isinstance(model, Independence):
        return u * v
    raise TypeError("no analytic CDF for this model")


def analytic_checkerboard(model: CopulaModel, resolution: int) -> CheckerboardCopula:
    """Checkerboard of the model's true copula via corner inclusion-exclusion.

    Serves as a transcription guard for the closed-form formulas: zeta1 of
    this board converges to the closed-form value as the resolution grows.
    """
    grid = np.arange(resolution + 1) / resolution
    uu, vv = np.meshgrid(grid, grid, indexing="ij")
    cdf = _model_cdf(model, uu, vv)
    mass = cdf[1:, 1:] - cdf[:-1, 1:] - cdf[1:, :-1] + cdf[:-1, :-1]
    return CheckerboardCopula(np.maximum(mass, 0.0), validate=False)


# ---------------------------------------------------------------------------
# Shape generators
# ---------------------------------------------------------------------------

SHAPE_NAMES = (
    "linear",
    "x_cross",
    "two_parallel_lines",
    "two_rotated_lines",
    "non_coexistence",
    "quadratic",
    "sinus",
    "torus",
    "periodic_pattern",
)

_PATTERN_X = np.arange(16) / 15.0
_PATTERN_Y = np.array(
    [4, 0, 6, 2, 4, 2, 0, 6, 4, 2, 0, 6, 4, 2, 6, 0], dtype=float
) / 6.0


@dataclass(frozen=True)
class ShapeGenerator:
    """One of the nine benchmark dependence shapes plus a noise amplitude.

    Noise is uniform on [-noise, noise]; most shapes add it vertically, see
    each branch for the exceptions.  The output is min-max rescaled to the
    unit square per coordinate.  ``non_coexistence`` subsets a uniform cloud,
    so fewer than n points may be returned; ``periodic_pattern`` tiles a
    16-point motif, so the count is rounded to a multiple of 16.
    """

    shape: str
    n: int
    noise: float = 0.0

    def __post_init__(self):
        if self.shape not in SHAPE_NAMES:
            raise ValueError(f"unknown shape {self.shape!r}; options: {SHAPE_NAMES}")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")


def _rescale(values: np.ndarray) -> np.ndarray:
    span = values.max() - values.min()
    if span == 0:
        return np.zeros_like(values)
    return (values - values.min()) / span


def generate_shape(gen: ShapeGenerator, seed) -> BivariateSample:
    """Draw one sample of the requested shape."""
    rng = np.random.default_rng(seed)
    n, a = gen.n, gen.noise

    def noise(size):
        return rng.uniform(-a, a, size) if a > 0 else np.zeros(size)

    if gen.shape == "linear":
        x = np.linspace(0.0, 1.0, n)
        y = x + noise(n)
    elif gen.shape == "x_cross":
        h = n // 2
        x1 = np.linspace(0.0, 1.0, h)
        x2 = np.linspace(0.0, 1.0, n - h)
        x = np.concatenate([x1, x2])
        y = np.concatenate([x1 + noise(h), 1.0 - x2 + noise(n - h)])
    elif gen.shape == "two_parallel_lines":
        h = n // 2
        x = np.linspace(0.0, 1.0, n) + noise(n)
        y = np.concatenate(
            [np.linspace(0.0, 1.0, h), np.linspace(0.0, 1.0, n - h)]
        ) + noise(n)
    elif gen.shape == "two_rotated_lines":
        x0 = rng.uniform(0.0, 1.0, n)
        y0 = rng.uniform(-a, a, n) if a > 0 else np.zeros(n)
        steep = rng.integers(0, 2, n).astype(bool)
        phi = np.where(steep, np.pi / 4.0, np.pi / 20.0)
        x = x0 * np.cos(phi) - y0 * np.sin(phi)
        y = x0 * np.sin(phi) + y0 * np.cos(phi)
    elif gen.shape == "non_coexistence":
        if a <= 0:
            raise ValueError("non_coexistence needs a positive noise band")
        x0 = rng.uniform(0.0, 1.0, n)
        y0 = rng.uniform(0.0, 1.0, n)
        keep = (x0 <= a) | (y0 <= a)
        if keep.sum() < 2:
            raise ValueError("noise band too small: fewer than 2 points kept")
        x, y = x0[keep], y0[keep]
    elif gen.shape == "quadratic":
        x = np.linspace(-1.0, 1.0, n)
        y = x**2 + noise(n)
    elif gen.shape == "sinus":
        x = np.linspace(-8.0, 8.0, n)
        y = np.sin(x) + noise(n)
    elif gen.shape == "torus":
        r = np.sqrt(rng.uniform(1.0 - a, 1.0 + a, n))
        phi = rng.uniform(0.0, 2.0 * np.pi, n)
        x = r * np.cos(phi)
        y = r * np.sin(phi)
    else:  # periodic_pattern
        reps = max(1, round(n / 16))
        x = np.tile(_PATTERN_X, reps) + noise(16 * reps)
        y = np.tile(_PATTERN_Y, reps) + noise(16 * reps)
    return BivariateSample(_rescale(x), _rescale(y))


# ---------------------------------------------------------------------------
# Convergence experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentRow:
    model: str
    params: str
    n: int
    replicate: int
    q_xy: float
    q_yx: float
    ref_xy: Optional[float]
    ref_yx: Optional[float]


@dataclass(frozen=True)
class ExperimentResult:
    rows: tuple[ExperimentRow, ...]

    def summaries(self):
        """Per-size quartiles of both estimates plus the reference values."""
        sizes = sorted({row.n for row in self.rows})
        out = []
        for n in sizes:
            rows = [r for r in self.rows if r.n == n]
            q_xy = np.array([r.q_xy for r in rows])
            q_yx = np.array([r.q_yx for r in rows])
            out.append(
                {
                    "n": n,
                    "q_xy_quartiles": tuple(np.percentile(q_xy, [25, 50, 75])),
                    "q_yx_quartiles": tuple(np.percentile(q_yx, [25, 50, 75])),
                    "ref_xy": rows[0].ref_xy,
                    "ref_yx": rows[0].ref_yx,
                }
            )
        return out


def convergence_experiment(
    model: CopulaModel,
    sizes,
    replicates: int,
    seed: int,
    threads: int = 1,
) -> ExperimentResult:
    """Estimate the dependence of the model repeatedly across sample sizes.

    Replicate r at size index s draws its sample from
    ``SeedSequence(entropy=seed, spawn_key=(s, r))``, so rows are reproducible
    and independent of evaluation order.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    ref_xy, ref_yx = zeta1_closed_form(model)
    tasks = [
        (si, n, rep) for si, n in enumerate(sizes) for rep in range(replicates)
    ]

    def one(task):
        si, n, rep = task
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(si, rep))
        sample = sample_model(model, n, ss)
        result = qad_compute(sample, QadOptions())
        return ExperimentRow(
            model=model.label,
            params=model.params(),
            n=n,
            replicate=rep,
            q_xy=result.q_xy,
            q_yx=result.q_yx,
            ref_xy=ref_xy,
            ref_yx=ref_yx,
        )

    if threads > 1 and len(tasks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, tasks))
    else:
        rows = [one(t) for t in tasks]
    return ExperimentResult(tuple(rows))
