"""Multivariate front end: pairwise dependence matrices, influence scores,
and directed dependency networks.

Columns are compared pairwise on pairwise-complete rows.  Each ordered entry
q[f][j] is the dependence of column j on column f; the asymmetry matrix
a[f][j] = q[f][j] - q[j][f] is antisymmetric by construction.  Per-pair
permutation seeds are derived from the global seed and the sorted column
names, so results do not depend on column order, row order, or scheduling.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .copula import BivariateSample
from .errors import DataError, DegenerateInputError
from .estimator import QadOptions, qad_compute

__all__ = [
    "DataTable",
    "FilterReport",
    "PairwiseResult",
    "InfluenceSummary",
    "DependencyNetwork",
    "Correlations",
    "filter_columns",
    "pairwise_qad",
    "influence_summary",
    "build_network",
    "baseline_correlations",
]


@dataclass(frozen=True)
class DataTable:
    """Named numeric columns with NaN as the missing-value marker."""

    names: tuple[str, ...]
    values: np.ndarray  # (n_rows, n_columns) float

    def __post_init__(self):
        names = tuple(self.names)
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("values must be a 2-d array")
        if len(names) != values.shape[1]:
            raise ValueError("one name per column required")
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "values", values)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        try:
            idx = self.names.index(name)
        except ValueError:
            raise DataError(f"unknown column {name!r}") from None
        return self.values[:, idx]


@dataclass(frozen=True)
class FilterReport:
    """Names and most-frequent-value proportions of the dropped columns."""

    dropped: tuple[tuple[str, float], ...]
    threshold: float


def filter_columns(
    table: DataTable,
    max_single_value_prop: float = 0.25,
    min_unique_prop: float | None = None,
):
    """Drop columns whose most frequent value occupies >= the given share of rows.

    Columns with no observed values are dropped as well; ``min_unique_prop``
    optionally drops columns whose share of distinct values is too small.
    Returns the filtered table and a report of dropped columns.
    """
    keep, dropped = [], []
    n_rows = table.n_rows
    for idx, name in enumerate(table.names):
        col = table.values[:, idx]
        observed = col[~np.isnan(col)]
        if observed.size == 0:
            dropped.append((name, 1.0))
            continue
        _, counts = np.unique(observed, return_counts=True)
        prop = counts.max() / n_rows
        if prop >= max_single_value_prop:
            dropped.append((name, float(prop)))
            continue
        if min_unique_prop is not None and counts.size / n_rows < min_unique_prop:
            dropped.append((name, float(prop)))
            continue
        keep.append(idx)
    if not keep:
        raise DataError("all columns dropped by the tie filter")
    filtered = DataTable(
        tuple(table.names[i] for i in keep), table.values[:, keep].copy()
    )
    return filtered, FilterReport(tuple(dropped), max_single_value_prop)


@dataclass(frozen=True)
class PairwiseResult:
    """Dependence, asymmetry, and significance matrices over all column pairs.

    q[f][j] is the dependence of column j on column f.  Diagonals are NaN.
    p-matrices are all-NaN when the run used no permutations.
    """

    variables: tuple[str, ...]
    q: np.ndarray
    p_q: np.ndarray
    asymmetry: np.ndarray
    p_asymmetry: np.ndarray
    n_used: np.ndarray
    permutations: int
    warnings: tuple[str, ...] = field(default=())

    @property
    def k(self) -> int:
        return len(self.variables)

    def has_p_values(self) -> bool:
        return self.permutations > 0


def _pair_seed(seed: int, name_a: str, name_b: str) -> int:
    """Deterministic per-pair seed from the global seed and sorted names."""
    key = "\x1f".join(sorted((name_a, name_b))).encode("utf-8")
    digest = hashlib.sha256(key).digest()
    return (seed & 0xFFFFFFFFFFFFFFFF) ^ int.from_bytes(digest[:8], "big")


def _canonical_pair(xs: np.ndarray, ys: np.ndarray) -> BivariateSample:
    # sort rows lexicographically so results ignore the table's row order
    order = np.lexsort((ys, xs))
    return BivariateSample(xs[order], ys[order])


def pairwise_qad(
    table: DataTable, opts: QadOptions = QadOptions(), threads: int = 1
) -> PairwiseResult:
    """Dependence estimation over every unordered column pair.

    Rows with a missing value in either column of a pair are excluded for
    that pair only.  Pairs with fewer than 2 complete rows yield NaN cells
    and a warning rather than an error.
    """
    k = table.n_columns
    if k < 2:
        raise DataError("need at least 2 columns")
    shape = (k, k)
    q = np.full(shape, np.nan)
    p_q = np.full(shape, np.nan)
    asym = np.full(shape, np.nan)
    p_asym = np.full(shape, np.nan)
    n_used = np.full(shape, np.nan)
    warnings = []

    pairs = [(f, j) for f in range(k) for j in range(f + 1, k)]

    def one(pair):
        # canonical orientation and row order: results must not depend on
        # the table's column or row arrangement, including p-values
        f, j = pair
        if table.names[j] < table.names[f]:
            f, j = j, f
        cols = table.values[:, (f, j)]
        complete = ~np.isnan(cols).any(axis=1)
        xs, ys = cols[complete, 0], cols[complete, 1]
        if xs.size < 2:
            return f, j, None, int(xs.size)
        sample = _canonical_pair(xs, ys)
        # parallelism lives at the pair level; keep inner permutation loops serial
        pair_opts = replace(
            opts,
            seed=_pair_seed(opts.seed, table.names[f], table.names[j]),
            threads=1,
        )
        try:
            result = qad_compute(sample, pair_opts)
        except DegenerateInputError:
            return f, j, None, int(xs.size)
        return f, j, result, int(xs.size)

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, pairs))
    else:
        results = [one(p) for p in pairs]

    for f, j, result, n_pair in results:
        n_used[f, j] = n_used[j, f] = n_pair
        if result is None:
            warnings.append(
                f"pair ({table.names[f]}, {table.names[j]}): fewer than 2 complete rows"
            )
            continue
        q[f, j] = result.q_xy
        q[j, f] = result.q_yx
        asym[f, j] = result.asymmetry
        asym[j, f] = -result.asymmetry
        if result.p_q_xy is not None:
            p_q[f, j] = result.p_q_xy
            p_q[j, f] = result.p_q_yx
            p_asym[f, j] = p_asym[j, f] = result.p_asymmetry

    return PairwiseResult(
        variables=table.names,
        q=q,
        p_q=p_q,
        asymmetry=asym,
        p_asymmetry=p_asym,
        n_used=n_used,
        permutations=opts.permutations,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class InfluenceSummary:
    """Per-variable summary of the influence values I_f^j = q[f][j] - q[j][f].

    ``mean_influence_given`` averages q[f][j] over partners j (how well f
    predicts the others); ``mean_influence_received`` averages q[j][f].
    ``p_median_positive`` tests median(I_f) > 0.
    """

    variables: tuple[str, ...]
    median_influence: np.ndarray
    q25_influence: np.ndarray
    q75_influence: np.ndarray
    mean_influence_given: np.ndarray
    mean_influence_received: np.ndarray
    p_median_positive: np.ndarray
    method: str


def _sign_test_greater(values: np.ndarray) -> float:
    """Exact one-sided sign test for median > 0 (zeros discarded)."""
    nonzero = values[values != 0]
    if nonzero.size == 0:
        return 1.0
    k_pos = int((nonzero > 0).sum())
    return float(stats.binom.sf(k_pos - 1, nonzero.size, 0.5))


def _signrank_greater(values: np.ndarray) -> float:
    nonzero = values[values != 0]
    if nonzero.size == 0:
        return 1.0
    return float(stats.wilcoxon(nonzero, alternative="greater").pvalue)


def influence_summary(pw: PairwiseResult, method: str = "sign") -> InfluenceSummary:
    """Median/quartile influence per variable plus a median-positivity test.

    ``method`` selects the significance test: "sign" (exact sign test,
    distribution-free default) or "signrank" (Wilcoxon signed-rank).
    """
    if method not in ("sign", "signrank"):
        raise ValueError("method must be 'sign' or 'signrank'")
    test = _sign_test_greater if method == "sign" else _signrank_greater
    k = pw.k
    med = np.full(k, np.nan)
    q25 = np.full(k, np.nan)
    q75 = np.full(k, np.nan)
    given = np.full(k, np.nan)
    received = np.full(k, np.nan)
    p_pos = np.full(k, np.nan)
    for f in range(k):
        influences = np.delete(pw.asymmetry[f], f)
        influences = influences[~np.isnan(influences)]
        if influences.size:
            q25[f], med[f], q75[f] = np.percentile(influences, [25, 50, 75])
            p_pos[f] = test(influences)
        row = np.delete(pw.q[f], f)
        col = np.delete(pw.q[:, f], f)
        if np.any(~np.isnan(row)):
            given[f] = np.nanmean(row)
        if np.any(~np.isnan(col)):
            received[f] = np.nanmean(col)
    return InfluenceSummary(
        variables=pw.variables,
        median_influence=med,
        q25_influence=q25,
        q75_influence=q75,
        mean_influence_given=given,
        mean_influence_received=received,
        p_median_positive=p_pos,
        method=method,
    )


@dataclass(frozen=True)
class DependencyNetwork:
    """Thresholded directed dependence graph with node centrality metrics."""

    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]  # (source, target, q-weight)
    degree: dict
    betweenness: dict
    hub_score: dict
    q_threshold: float
    alpha: float


def _hub_scores(weights: np.ndarray, tol: float = 1e-10, max_iter: int = 10000):
    """Principal eigenvector of W W^T by power iteration, scaled to max 1."""
    k = weights.shape[0]
    m = weights @ weights.T
    if not m.any():
        return np.zeros(k)
    x = np.full(k, 1.0 / k)
    for _ in range(max_iter):
        nxt = m @ x
        norm = np.linalg.norm(nxt)
        if norm == 0:
            return np.zeros(k)
        nxt /= norm
        if np.max(np.abs(nxt - x)) < tol:
            x = nxt
            break
        x = nxt
    return x / x.max()


def build_network(
    pw: PairwiseResult, q_threshold: float = 0.325, alpha: float = 0.05
) -> DependencyNetwork:
    """Keep edges f -> j with q[f][j] >= q_threshold and p_q[f][j] < alpha.

    Node metrics: degree = in+out edge count, betweenness over shortest paths
    with edge length 1/weight, hub score from the principal eigenvector of
    the weighted adjacency product A A^T (power iteration, max-normalized).
    """
    if not pw.has_p_values():
        raise DataError("network construction needs p-values; run with permutations")
    import networkx as nx

    k = pw.k
    names = pw.variables
    weights = np.zeros((k, k))
    edges = []
    for f in range(k):
        for j in range(k):
            if f == j:
                continue
            qv, pv = pw.q[f, j], pw.p_q[f, j]
            if not np.isnan(qv) and not np.isnan(pv) and qv >= q_threshold and pv < alpha:
                weights[f, j] = qv
                edges.append((names[f], names[j], float(qv)))

    graph = nx.DiGraph()
    graph.add_nodes_from(names)
    for src, dst, w in edges:
        graph.add_edge(src, dst, weight=w, length=1.0 / w)
    betweenness = nx.betweenness_centrality(graph, normalized=False, weight="length")
    degree = {name: graph.in_degree(name) + graph.out_degree(name) for name in names}
    hub = _hub_scores(weights)
    return DependencyNetwork(
        nodes=names,
        edges=tuple(edges),
        degree=degree,
        betweenness={n: float(betweenness[n]) for n in names},
        hub_score={n: float(h) for n, h in zip(names, hub)},
        q_threshold=q_threshold,
        alpha=alpha,
    )


@dataclass(frozen=True)
class Correlations:
    """Classical pairwise-complete correlation baselines."""

    variables: tuple[str, ...]
    pearson_r: np.ndarray
    r_squared: np.ndarray
    spearman_rho: np.ndarray


def baseline_correlations(table: DataTable) -> Correlations:
    """Pearson r, r^2 and Spearman rho over all column pairs.

    Pairwise-complete; a pair with a zero-variance margin yields NaN.
    """
    k = table.n_columns
    r = np.full((k, k), np.nan)
    rho = np.full((k, k), np.nan)
    for f in range(k):
        for j in range(f + 1, k):
            cols = table.values[:, (f, j)]
            complete = ~np.isnan(cols).any(axis=1)
            xs, ys = cols[complete, 0], cols[complete, 1]
            if xs.size < 2 or np.ptp(xs) == 0 or np.ptp(ys) == 0:
                continue
            r[f, j] = r[j, f] = stats.pearsonr(xs, ys).statistic
            rho[f, j] = rho[j, f] = stats.spearmanr(xs, ys).statistic
    return Correlations(table.names, r, r * r, rho)
