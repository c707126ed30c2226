"""Exact and asymptotic theory of the k-tree process degree distribution.

Everything here is a pure function of its arguments.  The central objects:

  * attachment probability of a degree-d vertex, ratio of exact clique
    counts: (a*d - b) / (k*n - k^2 + 1) with a = k-1, b = k(k-2);
  * the limiting degree fractions beta_d, the unique solution of
        beta_d = (a(d-1) - b) / (a*d - b + k) * beta_{d-1},  beta_k = 1/2,
    with tail exponent gamma = 1 + k/(k-1);
  * a Gamma-ratio closed form for beta_d, carrying a 1/2 prefactor (the
    bare Gamma form normalizes to 2, not 1 -- see closed_form_unnormalized);
  * the exact expected-histogram recurrence solved as a dynamic program,
    the deterministic oracle Monte Carlo runs are checked against;
  * the Azuma concentration bound exp(-lambda^2 / (8kn)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from .errors import DMaxTooSmall, InvalidParameters

#: largest n for which the expectation DP is used as an exact reference
#: (cost grows like n * d_max)
DP_EXACT_MAX_N = 10_000

_DMAX_CAP = 100_000
_DMAX_MASS_CUTOFF = 1e-4


def _check_kn(k: int, n: int) -> None:
    if k < 2:
        raise InvalidParameters(f"k must be >= 2 (got {k})")
    if n < k + 1:
        raise InvalidParameters(f"n must be >= k+1 (got n={n}, k={k})")


@dataclass(frozen=True)
class TheoryCoefficients:
    """Attachment-probability coefficients for one (k, n)."""

    k: int
    n: int
    a_k: int
    b_k: int
    c_k: Fraction  # k - (k^2 - 1)/n; c_k * n equals the clique count exactly

    @classmethod
    def for_process(cls, k: int, n: int) -> "TheoryCoefficients":
        _check_kn(k, n)
        return cls(k=k, n=n, a_k=k - 1, b_k=k * (k - 2), c_k=Fraction(k * n - k * k + 1, n))


def total_k_cliques(k: int, n: int) -> int:
    """Number of k-cliques in the n-vertex k-tree: (n-k-1)*k + (k+1)."""
    _check_kn(k, n)
    return (n - k - 1) * k + (k + 1)


def cliques_containing(k: int, d: int) -> int:
    """Number of stored k-cliques containing a vertex of degree d.

    k cliques are created with the vertex at its arrival, k-1 more per
    edge it gains afterwards: k + (k-1)(d-k).
    """
    if k < 2:
        raise InvalidParameters(f"k must be >= 2 (got {k})")
    if d < k:
        raise InvalidParameters(f"degree {d} below the minimum degree k={k}")
    return k + (k - 1) * (d - k)


def attachment_probability_fraction(k: int, d: int, n: int) -> Fraction:
    """Exact rational attachment probability; equals
    cliques_containing(k, d) / total_k_cliques(k, n)."""
    _check_kn(k, n)
    if d < k:
        raise InvalidParameters(f"degree {d} below the minimum degree k={k}")
    return Fraction((k - 1) * d - k * (k - 2), k * n - k * k + 1)


def attachment_probability(k: int, d: int, n: int) -> float:
    """Probability that a degree-d vertex of the n-vertex graph is joined
    to the next arrival: (a_k d - b_k) / (c_k n)."""
    frac = attachment_probability_fraction(k, d, n)
    return frac.numerator / frac.denominator


def tail_exponent(k: int) -> float:
    """Power-law exponent gamma = 1 + k/(k-1) of the degree distribution."""
    if k < 2:
        raise InvalidParameters(f"k must be >= 2 (got {k})")
    return 1.0 + k / (k - 1)


@dataclass(frozen=True)
class TheoreticalDistribution:
    """Limiting degree fractions beta_d for d = k..d_max, plus the tail
    exponent; beta solves the degree recurrence with beta_k = 1/2."""

    k: int
    beta: np.ndarray
    gamma: float

    @property
    def d_max(self) -> int:
        return self.k + len(self.beta) - 1

    def value(self, d: int) -> float:
        if not self.k <= d <= self.d_max:
            raise InvalidParameters(f"d={d} outside table range [{self.k}, {self.d_max}]")
        return float(self.beta[d - self.k])

    def degrees(self) -> np.ndarray:
        return np.arange(self.k, self.d_max + 1)


def beta_table(k: int, d_max: int) -> TheoreticalDistribution:
    """Evaluate the beta recurrence up to d_max (64-bit floats; every
    factor lies in (0,1) so the iteration is numerically stable)."""
    if k < 2:
        raise InvalidParameters(f"k must be >= 2 (got {k})")
    if d_max < k:
        raise InvalidParameters(f"d_max must be >= k (got {d_max})")
    a, b = k - 1, k * (k - 2)
    beta = np.empty(d_max - k + 1)
    beta[0] = 0.5
    if d_max > k:
        d = np.arange(k + 1, d_max + 1, dtype=np.float64)
        beta[1:] = 0.5 * np.cumprod((a * (d - 1) - b) / (a * d - b + k))
    return TheoreticalDistribution(k=k, beta=beta, gamma=tail_exponent(k))


def beta_closed_form(k: int, d) -> float | np.ndarray:
    """beta_d in closed form via log-Gamma (overflow-safe for any d):

        1/2 * G(3 + 2/(k-1)) / G(1 + 1/(k-1))
            * G(d - b/a) / G(d - b/a + k/a + 1)

    with a = k-1, b = k(k-2).  The 1/2 prefactor is what makes the values
    sum to one; see closed_form_unnormalized.
    """
    return 0.5 * closed_form_unnormalized(k, d)


def closed_form_unnormalized(k: int, d) -> float | np.ndarray:
    """The bare Gamma-ratio form, exactly 2 * beta_d.

    Summed over d >= k it gives 2, which cannot be a fraction-of-vertices
    distribution; it equals the recurrence solution rebased at 1 instead of
    1/2.  Kept callable so the factor-2 normalization stays visible and
    testable rather than silently folded in.
    """
    if k < 2:
        raise InvalidParameters(f"k must be >= 2 (got {k})")
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < k):
        raise InvalidParameters(f"d must be >= k={k}")
    a = k - 1.0
    shift = k * (k - 2.0) / a  # b/a
    log_pref = gammaln(3.0 + 2.0 / a) - gammaln(1.0 + 1.0 / a)
    out = np.exp(log_pref + gammaln(d - shift) - gammaln(d - shift + k / a + 1.0))
    return out if out.ndim else float(out)


def beta_tail_mass(k: int, d_from: int) -> float:
    """Exact sum of beta_d over d >= d_from.

    The Gamma-ratio form telescopes: sum_{d>=D} G(d-B)/G(d-B+s+1)
    = G(D-B) / (s * G(D-B+s)) with B = b/a and s = k/a = gamma - 1.
    """
    if k < 2:
        raise InvalidParameters(f"k must be >= 2 (got {k})")
    if d_from < k:
        raise InvalidParameters(f"d_from must be >= k={k}")
    a = k - 1.0
    B = k * (k - 2.0) / a
    s = k / a
    log_pref = math.log(0.5) + gammaln(3.0 + 2.0 / a) - gammaln(1.0 + 1.0 / a)
    return math.exp(log_pref - math.log(s) + gammaln(d_from - B) - gammaln(d_from - B + s))


def beta_tail_degree_mass(k: int, d_from: int) -> float:
    """Exact sum of d * beta_d over d >= d_from (same telescoping applied
    to d*G(d-B) = G(d-B+1) + B*G(d-B))."""
    if k < 2:
        raise InvalidParameters(f"k must be >= 2 (got {k})")
    if d_from < k:
        raise InvalidParameters(f"d_from must be >= k={k}")
    a = k - 1.0
    B = k * (k - 2.0) / a
    s = k / a
    log_pref = math.log(0.5) + gammaln(3.0 + 2.0 / a) - gammaln(1.0 + 1.0 / a)
    first = math.exp(
        log_pref - math.log(s - 1.0) + gammaln(d_from - B + 1.0) - gammaln(d_from - B + s)
    )
    second = 0.0
    if B:
        second = B * math.exp(
            log_pref - math.log(s) + gammaln(d_from - B) - gammaln(d_from - B + s)
        )
    return first + second


def default_d_max(k: int, n: int) -> int:
    """Smallest d with beta_d * n < 1e-4, capped at 100000: degrees beyond
    it carry negligible expected count and may be truncated."""
    _check_kn(k, n)
    a, b = k - 1, k * (k - 2)
    d, beta = k, 0.5
    while beta * n >= _DMAX_MASS_CUTOFF and d < _DMAX_CAP:
        d += 1
        beta *= (a * (d - 1) - b) / (a * d - b + k)
    return max(d, k + 1)


@dataclass(frozen=True)
class ExpectedDegreeTable:
    """Exact E[X_d(n)] for d = k..d_max; overflow holds the expected count
    of vertices whose degree grew past d_max."""

    k: int
    n: int
    expected: np.ndarray
    overflow: float

    @property
    def d_max(self) -> int:
        return self.k + len(self.expected) - 1

    def value(self, d: int) -> float:
        if not self.k <= d <= self.d_max:
            raise InvalidParameters(f"d={d} outside table range [{self.k}, {self.d_max}]")
        return float(self.expected[d - self.k])

    def degrees(self) -> np.ndarray:
        return np.arange(self.k, self.d_max + 1)


def expected_histogram_dp(
    k: int,
    n: int,
    d_max: int | None = None,
    overflow_tol: float = 1e-3,
) -> ExpectedDegreeTable:
    """Solve the expectation recurrence exactly, from the deterministic
    (k+2)-vertex graph (two degree-k vertices, k of degree k+1) up to n:

        Y_k(m+1) = 1 + (1 - P(k, m)) Y_k(m)
        Y_d(m+1) = P(d-1, m) Y_{d-1}(m) + (1 - P(d, m)) Y_d(m),  d > k

    Mass that would move past d_max accumulates in ``overflow``; if it
    exceeds overflow_tol * n the table was cut too short and DMaxTooSmall
    is raised.  Values at d < d_max are unaffected by truncation (the
    recurrence only moves mass upward).
    """
    if k < 2:
        raise InvalidParameters(f"k must be >= 2 (got {k})")
    if n < k + 2:
        raise InvalidParameters(f"the DP starts at n = k+2 (got n={n}, k={k})")
    if d_max is None:
        d_max = default_d_max(k, n)
    if d_max < k + 1:
        raise InvalidParameters(f"d_max must be >= k+1 (got {d_max})")

    a, b = k - 1, k * (k - 2)
    num = a * np.arange(k, d_max + 1, dtype=np.float64) - b
    Y = np.zeros(d_max - k + 1)
    Y[0] = 2.0
    Y[1] = float(k)
    overflow = 0.0
    for m in range(k + 2, n):
        P = num / (k * m - k * k + 1)
        overflow += P[-1] * Y[-1]
        Y[1:] = P[:-1] * Y[:-1] + (1.0 - P[1:]) * Y[1:]
        Y[0] = 1.0 + (1.0 - P[0]) * Y[0]
    if overflow > overflow_tol * n:
        raise DMaxTooSmall(
            f"overflow mass {overflow:.3g} exceeds {overflow_tol:g} * n = {overflow_tol * n:.3g}; "
            f"raise d_max (got {d_max})"
        )
    return ExpectedDegreeTable(k=k, n=n, expected=Y, overflow=overflow)


# -- concentration -------------------------------------------------------------


def azuma_bound(k: int, n: int, lam: float) -> float:
    """Tail bound P(|X_d(n) - E X_d(n)| > lambda) <= exp(-lambda^2/(8kn))."""
    _check_kn(k, n)
    if lam < 0:
        raise InvalidParameters(f"lambda must be >= 0 (got {lam})")
    return math.exp(-(lam * lam) / (8.0 * k * n))


def azuma_bound_conservative(k: int, n: int, lam: float) -> float:
    """Variant with denominator 8*k^2*n (one-step differences bounded by 2k
    over ~n steps give this directly); weaker, hence always >= azuma_bound."""
    _check_kn(k, n)
    if lam < 0:
        raise InvalidParameters(f"lambda must be >= 0 (got {lam})")
    return math.exp(-(lam * lam) / (8.0 * k * k * n))


def azuma_lambda(k: int, n: int, prob: float) -> float:
    """Deviation lambda at which azuma_bound equals ``prob``."""
    _check_kn(k, n)
    if not 0 < prob <= 1:
        raise InvalidParameters(f"prob must lie in (0, 1] (got {prob})")
    return math.sqrt(8.0 * k * n * math.log(1.0 / prob))
