"""Measurement of generated graphs and confrontation with theory.

Single-graph analyses are pure; the experiment runners farm trials out to a
thread pool (each trial owns its generator and RNG stream, aggregation is
order-independent), so results do not depend on scheduling.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import theory
from .errors import GraphTooLarge, InsufficientTail, InvalidParameters, KMismatch
from .generator import KTree, ProcessParams, generate, stream_seed

BRUTE_FORCE_VERTEX_LIMIT = 30
DEFAULT_FIT_D_MIN = 10
_MIN_DISTINCT_TAIL_DEGREES = 10


def resolve_threads(threads: int | None = None) -> int:
    """Trial parallelism: explicit argument, else KTREE_LAB_THREADS, else
    available cores."""
    if threads is not None:
        if threads < 1:
            raise InvalidParameters(f"threads must be >= 1 (got {threads})")
        return threads
    env = os.environ.get("KTREE_LAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# -- histograms ----------------------------------------------------------------


@dataclass
class DegreeHistogram:
    """Degree counts X_d, possibly summed over several same-size trials."""

    k: int
    n: int
    counts: dict[int, int]
    trials: int = 1

    @classmethod
    def from_degrees(cls, k: int, degrees: np.ndarray) -> "DegreeHistogram":
        values, freq = np.unique(np.asarray(degrees), return_counts=True)
        return cls(k=k, n=int(len(degrees)), counts={int(d): int(c) for d, c in zip(values, freq)})

    def add(self, other: "DegreeHistogram") -> None:
        if (other.k, other.n) != (self.k, self.n):
            raise KMismatch(f"cannot merge histograms for (k={other.k}, n={other.n}) "
                            f"into (k={self.k}, n={self.n})")
        for d, c in other.counts.items():
            self.counts[d] = self.counts.get(d, 0) + c
        self.trials += other.trials

    def total(self) -> int:
        return self.n * self.trials

    def max_degree(self) -> int:
        return max(self.counts)

    def fraction(self, d: int) -> float:
        return self.counts.get(d, 0) / self.total()


def degree_histogram(graph) -> DegreeHistogram:
    """Exact per-degree counts of one generated graph."""
    return DegreeHistogram.from_degrees(graph.k, graph.degrees())


# -- structural oracles ----------------------------------------------------------


def brute_force_k_cliques(graph, k: int | None = None, limit: int = BRUTE_FORCE_VERTEX_LIMIT):
    """Enumerate every k-subset of the vertices and keep the complete ones.

    Independent of the clique store (works off edges only); the oracle the
    store is checked against.  Refuses graphs above ``limit`` vertices.
    """
    if k is None:
        k = graph.k
    n = graph.n
    if n > limit:
        raise GraphTooLarge(f"brute-force clique enumeration limited to {limit} vertices (got {n})")
    adj = np.zeros((n, n), dtype=bool)
    edges = graph.edge_array()
    adj[edges[:, 0], edges[:, 1]] = True
    adj[edges[:, 1], edges[:, 0]] = True
    combos = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
    if combos.size == 0:
        return set()
    complete = np.ones(len(combos), dtype=bool)
    for i, j in itertools.combinations(range(k), 2):
        complete &= adj[combos[:, i], combos[:, j]]
    return {frozenset(row) for row in combos[complete]}


def stored_cliques_as_sets(tree: KTree):
    return {frozenset(int(v) for v in row) for row in tree.clique_store}


@dataclass(frozen=True)
class Lemma1Report:
    """Outcome of the minimum-degree / one-low-degree-vertex-per-clique check."""

    passed: bool
    failure: str | None = None
    witness: tuple | None = None


def verify_lemma1(graph, k: int | None = None) -> Lemma1Report:
    """Check that every vertex has degree >= k and that no stored k-clique
    contains two or more vertices of degree exactly k.

    Failure is reported (with the first counterexample), not raised: a
    failing report on a generator-produced graph means a generator bug.
    The second check applies only to graphs carrying a clique store, and
    only from n >= k+2 (in the bare seed clique every vertex has degree k).
    """
    if k is None:
        k = graph.k
    deg = np.asarray(graph.degrees())
    low = np.flatnonzero(deg < k)
    if low.size:
        v = int(low[0])
        return Lemma1Report(False, f"vertex {v} has degree {int(deg[v])} < k={k}", (v, int(deg[v])))
    store = getattr(graph, "clique_store", None)
    if store is not None and len(store) and graph.n >= k + 2:
        at_min = deg[store] == k
        per_clique = at_min.sum(axis=1)
        bad = np.flatnonzero(per_clique >= 2)
        if bad.size:
            i = int(bad[0])
            members = tuple(int(v) for v in store[i])
            return Lemma1Report(
                False,
                f"clique #{i} {members} contains {int(per_clique[i])} vertices of degree k",
                (i, members),
            )
    return Lemma1Report(True)


@dataclass(frozen=True)
class DecompositionReport:
    passed: bool
    failure: str | None = None


def validate_tree_decomposition(td, graph) -> DecompositionReport:
    """Check the three decomposition invariants against a graph: every edge
    inside some bag, connected bag-set per vertex (running intersection,
    which also requires the bag edges to form a tree), width == k."""
    bags = [set(int(v) for v in row) for row in td.bags]
    nbags = len(bags)
    if max(len(s) for s in bags) - 1 != td.width or td.width != graph.k:
        return DecompositionReport(False, f"width {td.width} != max bag size - 1 or != k={graph.k}")

    edges = [(int(a), int(b)) for a, b in np.asarray(td.tree_edges).reshape(-1, 2)]
    if len(edges) != nbags - 1:
        return DecompositionReport(False, f"{len(edges)} bag edges cannot form a tree on {nbags} bags")
    parent = list(range(nbags))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return DecompositionReport(False, f"bag edges contain a cycle through ({a}, {b})")
        parent[ra] = rb

    holding = {}
    for i, s in enumerate(bags):
        for v in s:
            holding.setdefault(v, set()).add(i)

    for u, v in graph.edge_array():
        if not holding.get(int(u), set()) & holding.get(int(v), set()):
            return DecompositionReport(False, f"edge ({u}, {v}) not contained in any bag")

    for v, ids in holding.items():
        internal = sum(1 for a, b in edges if a in ids and b in ids)
        if internal != len(ids) - 1:  # acyclic overall, so connected iff spanning count
            return DecompositionReport(False, f"bags holding vertex {v} are not connected")
    return DecompositionReport(True)


# -- theory comparison -----------------------------------------------------------


@dataclass(frozen=True)
class DeviationReport:
    """Per-degree empirical fraction vs beta_d, plus summary distances.

    The total-variation distance is taken on the partition
    {k, ..., d_max(theory), everything above}, using the exact analytic
    beta tail for the last cell.
    """

    k: int
    n: int
    trials: int
    d_cut: int
    d: np.ndarray
    empirical_fraction: np.ndarray
    beta: np.ndarray
    abs_error: np.ndarray
    rel_error: np.ndarray
    max_abs_error: float
    total_variation_distance: float


def deviation_report(
    hist: DegreeHistogram, dist: theory.TheoreticalDistribution, d_cut: int
) -> DeviationReport:
    """Compare empirical degree fractions against beta_d for d <= d_cut.

    With aggregated trials the empirical fraction equals the average of the
    per-trial fractions (equal n), so per-trial variance stays visible to
    the concentration harness rather than being folded in here.
    """
    if hist.k != dist.k:
        raise KMismatch(f"histogram k={hist.k} vs theory k={dist.k}")
    if not dist.k <= d_cut <= dist.d_max:
        raise InvalidParameters(f"d_cut={d_cut} outside theory range [{dist.k}, {dist.d_max}]")
    k = hist.k
    ds = np.arange(k, d_cut + 1)
    emp = np.array([hist.fraction(int(d)) for d in ds])
    beta = dist.beta[: d_cut - k + 1]
    abs_err = np.abs(emp - beta)
    rel_err = abs_err / beta

    full = np.array([hist.fraction(int(d)) for d in dist.degrees()])
    emp_tail = 1.0 - full.sum()
    beta_tail = theory.beta_tail_mass(k, dist.d_max + 1)
    tvd = 0.5 * (np.abs(full - dist.beta).sum() + abs(emp_tail - beta_tail))
    return DeviationReport(
        k=k,
        n=hist.n,
        trials=hist.trials,
        d_cut=d_cut,
        d=ds,
        empirical_fraction=emp,
        beta=beta,
        abs_error=abs_err,
        rel_error=rel_err,
        max_abs_error=float(abs_err.max()),
        total_variation_distance=float(tvd),
    )


@dataclass(frozen=True)
class ExponentFit:
    """Discrete power-law tail fit over degrees >= d_min."""

    gamma_hat: float
    d_min: int
    method: str
    stderr: float
    gamma_ccdf: float
    tail_count: int


def fit_tail_exponent(hist: DegreeHistogram, d_min: int = DEFAULT_FIT_D_MIN) -> ExponentFit:
    """Hill-type discrete maximum-likelihood tail exponent,

        gamma_hat = 1 + m / sum_i ln(d_i / (d_min - 1/2)),

    over the m observations with degree >= d_min, with a least-squares
    log-log CCDF slope as an independent cross-check.  Raises
    InsufficientTail for degenerate inputs instead of returning NaN.
    """
    if d_min <= 1:
        raise InvalidParameters(f"d_min must be > 1 (got {d_min})")
    tail = {d: c for d, c in hist.counts.items() if d >= d_min and c > 0}
    if len(tail) < _MIN_DISTINCT_TAIL_DEGREES:
        raise InsufficientTail(
            f"{len(tail)} distinct degrees >= {d_min}; need {_MIN_DISTINCT_TAIL_DEGREES}"
        )
    ds = np.array(sorted(tail), dtype=np.float64)
    cs = np.array([tail[int(d)] for d in ds], dtype=np.float64)
    m = cs.sum()
    log_sum = float((cs * np.log(ds / (d_min - 0.5))).sum())
    gamma_hat = 1.0 + m / log_sum
    stderr = (gamma_hat - 1.0) / np.sqrt(m)

    ccdf = np.cumsum(cs[::-1])[::-1] / m
    slope = np.polyfit(np.log(ds), np.log(ccdf), 1)[0]
    return ExponentFit(
        gamma_hat=float(gamma_hat),
        d_min=d_min,
        method="discrete-mle",
        stderr=float(stderr),
        gamma_ccdf=float(1.0 - slope),
        tail_count=int(m),
    )


# -- multi-trial experiments -------------------------------------------------------


def _map_trials(fn, n_tasks: int, threads: int | None):
    workers = min(resolve_threads(threads), n_tasks)
    if workers <= 1:
        return [fn(i) for i in range(n_tasks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_tasks)))


def collect_degree_counts(
    k: int, n: int, d: int, seeds, threads: int | None = None
) -> np.ndarray:
    """X_d(n) for one independently generated graph per seed."""
    seeds = list(seeds)

    def one(i: int) -> int:
        deg = generate(ProcessParams(k=k, n=n, seed=seeds[i])).degrees()
        return int((deg == d).sum())

    return np.array(_map_trials(one, len(seeds), threads), dtype=np.int64)


def run_trials_histogram(
    k: int, n: int, trials: int, seed: int, threads: int | None = None
) -> DegreeHistogram:
    """Aggregate histogram over ``trials`` generations, trial t seeded with
    stream_seed(seed, t)."""
    if trials < 1:
        raise InvalidParameters(f"trials must be >= 1 (got {trials})")

    def one(t: int) -> np.ndarray:
        deg = generate(ProcessParams(k=k, n=n, seed=stream_seed(seed, t))).degrees()
        return np.bincount(deg)

    counts_per_trial = _map_trials(one, trials, threads)
    width = max(len(c) for c in counts_per_trial)
    total = np.zeros(width, dtype=np.int64)
    for c in counts_per_trial:
        total[: len(c)] += c
    counts = {int(d): int(c) for d, c in enumerate(total) if c}
    return DegreeHistogram(k=k, n=n, counts=counts, trials=trials)


@dataclass(frozen=True)
class ConcentrationReport:
    """Spread of X_d(n) over independent trials vs the Azuma tail bound.

    ``mean`` is the expectation proxy deviations are measured against: the
    exact DP expectation when n is small enough to afford it
    (mean_source == "expectation-dp"), otherwise the sample mean.
    """

    k: int
    n: int
    d: int
    trials: int
    seed: int
    mean: float
    sample_mean: float
    sample_std: float
    max_abs_deviation: float
    azuma_lambda_at_1pct: float
    violations: int
    mean_source: str
    values: np.ndarray = field(repr=False)


def concentration_experiment(
    k: int,
    n: int,
    d: int | None,
    trials: int,
    seed: int,
    threads: int | None = None,
) -> ConcentrationReport:
    """Generate ``trials`` independent graphs (streams derived from ``seed``),
    collect X_d(n), and count deviations beyond the 1% Azuma lambda."""
    if trials < 2:
        raise InvalidParameters(f"trials must be >= 2 (got {trials})")
    if d is None:
        d = k
    if d < k:
        raise InvalidParameters(f"d must be >= k (got d={d}, k={k})")
    seeds = [stream_seed(seed, t) for t in range(trials)]
    X = collect_degree_counts(k, n, d, seeds, threads)

    sample_mean = float(X.mean())
    mean, source = sample_mean, "sample-mean"
    if n <= theory.DP_EXACT_MAX_N:
        dp = theory.expected_histogram_dp(k, n)
        if d <= dp.d_max:
            mean, source = dp.value(d), "expectation-dp"
    lam = theory.azuma_lambda(k, n, 0.01)
    dev = np.abs(X - mean)
    return ConcentrationReport(
        k=k,
        n=n,
        d=d,
        trials=trials,
        seed=seed,
        mean=mean,
        sample_mean=sample_mean,
        sample_std=float(X.std(ddof=1)),
        max_abs_deviation=float(dev.max()),
        azuma_lambda_at_1pct=lam,
        violations=int((dev > lam).sum()),
        mean_source=source,
        values=X,
    )
