from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ktree_lab as kl
from ktree_lab import theory


# -- clique counting -----------------------------------------------------------


def test_total_k_cliques_values():
    assert kl.total_k_cliques(2, 4) == 5
    assert kl.total_k_cliques(3, 10) == 22
    for k in range(2, 8):
        assert kl.total_k_cliques(k, k + 1) == k + 1


def test_total_k_cliques_validates():
    with pytest.raises(kl.InvalidParameters):
        kl.total_k_cliques(1, 5)
    with pytest.raises(kl.InvalidParameters):
        kl.total_k_cliques(2, 2)


def test_cliques_containing_values():
    assert kl.cliques_containing(2, 2) == 2
    assert kl.cliques_containing(3, 5) == 7
    with pytest.raises(kl.InvalidParameters):
        kl.cliques_containing(3, 2)


def test_cliques_containing_matches_generated_store():
    tree = kl.generate(kl.ProcessParams(k=3, n=60, seed=31))
    deg = tree.degrees()
    membership = np.bincount(tree.clique_store.ravel().astype(np.int64), minlength=tree.n)
    for v in range(tree.n):
        assert membership[v] == kl.cliques_containing(3, int(deg[v]))


# -- attachment probability -------------------------------------------------------


def test_attachment_probability_example():
    assert kl.attachment_probability(2, 2, 10) == pytest.approx(2 / 17, abs=0)
    assert kl.attachment_probability_fraction(2, 2, 10) == Fraction(2, 17)


@pytest.mark.parametrize("k", range(2, 9))
def test_attachment_probability_at_start(k):
    # a seed vertex (degree k) of the (k+1)-clique is hit with prob k/(k+1)
    assert kl.attachment_probability_fraction(k, k, k + 1) == Fraction(k, k + 1)


def test_attachment_probability_affine_increasing_in_d():
    probs = [kl.attachment_probability(4, d, 100) for d in range(4, 30)]
    diffs = np.diff(probs)
    assert (diffs > 0).all()
    assert np.allclose(diffs, diffs[0])


@settings(max_examples=200)
@given(k=st.integers(2, 12), dd=st.integers(0, 500), extra=st.integers(0, 10_000))
def test_attachment_probability_is_exact_clique_ratio(k, dd, extra):
    n = k + 1 + extra
    d = min(k + dd, n - 1)
    frac = kl.attachment_probability_fraction(k, d, n)
    assert frac * kl.total_k_cliques(k, n) == kl.cliques_containing(k, d)
    assert 0 < frac <= 1


def test_one_step_balance_on_generated_histogram():
    # summing the attachment probability against any valid histogram gives
    # exactly k: the new vertex connects to exactly k old vertices
    k, n = 3, 400
    tree = kl.generate(kl.ProcessParams(k=k, n=n, seed=19))
    hist = kl.degree_histogram(tree)
    total = sum(
        kl.attachment_probability_fraction(k, d, n) * c for d, c in hist.counts.items()
    )
    assert total == Fraction(k)
    as_float = sum(kl.attachment_probability(k, d, n) * c for d, c in hist.counts.items())
    assert as_float == pytest.approx(k, rel=1e-12)


def test_coefficients_identity():
    for k, n in [(2, 10), (3, 11), (5, 100), (7, 8)]:
        co = kl.TheoryCoefficients.for_process(k, n)
        assert co.a_k == k - 1 and co.b_k == k * (k - 2)
        assert co.a_k >= 1 and co.c_k > 0
        assert co.c_k * n == kl.total_k_cliques(k, n)  # exact rational identity


# -- beta tables --------------------------------------------------------------------


def test_beta_values_k2():
    dist = kl.beta_table(2, 5)
    assert dist.value(2) == 0.5
    assert dist.value(3) == pytest.approx(1 / 5, rel=1e-15)
    assert dist.value(4) == pytest.approx(1 / 10, rel=1e-15)
    assert dist.value(5) == pytest.approx(2 / 35, rel=1e-15)


@pytest.mark.parametrize("k", range(2, 9))
def test_beta_first_ratio(k):
    dist = kl.beta_table(k, k + 1)
    assert dist.value(k) == 0.5
    assert dist.value(k + 1) / dist.value(k) == pytest.approx(k / (3 * k - 1), rel=1e-15)


def test_beta_strictly_decreasing_in_unit_interval():
    for k in (2, 3, 6):
        beta = kl.beta_table(k, 500).beta
        assert (np.diff(beta) < 0).all()
        assert ((beta > 0) & (beta < 1)).all()


def test_beta_sum_telescopes_to_one_k2():
    beta = kl.beta_table(2, 10**6).beta
    assert beta.sum() == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_beta_normalization_and_mean_with_tail(k):
    dist = kl.beta_table(k, 10_000)
    total = dist.beta.sum() + kl.beta_tail_mass(k, 10_001)
    assert total == pytest.approx(1.0, abs=1e-10)
    mean = (dist.degrees() * dist.beta).sum() + kl.beta_tail_degree_mass(k, 10_001)
    assert mean == pytest.approx(2 * k, abs=1e-8)


def test_beta_tail_mass_matches_partial_sums():
    for k in (2, 5):
        beta = kl.beta_table(k, 4000).beta
        partial = beta[100 - k:].sum()
        tail_estimate = kl.beta_tail_mass(k, 100) - kl.beta_tail_mass(k, 4001)
        assert partial == pytest.approx(tail_estimate, rel=1e-12)


# -- closed form ---------------------------------------------------------------------


def test_closed_form_k2_is_inverse_cubic():
    for d in (2, 5, 17, 1000):
        assert kl.beta_closed_form(2, d) == pytest.approx(12 / (d * (d + 1) * (d + 2)), rel=1e-12)


@pytest.mark.parametrize("k", range(2, 9))
def test_closed_form_agrees_with_recurrence(k):
    dist = kl.beta_table(k, 10_000)
    closed = kl.beta_closed_form(k, dist.degrees())
    assert np.abs(closed - dist.beta).max() < 1e-10


def test_unnormalized_form_is_twice_beta():
    # the bare Gamma-ratio form at k=2, d=2 gives 1, not beta_2 = 1/2
    assert kl.closed_form_unnormalized(2, 2) == pytest.approx(1.0, rel=1e-12)
    for k in (2, 3, 5):
        for d in (k, k + 7):
            assert kl.closed_form_unnormalized(k, d) == pytest.approx(
                2 * kl.beta_table(k, d).value(d), rel=1e-10
            )


def test_power_law_ratio_doubling():
    dist = kl.beta_table(2, 1200)
    for d in (100, 250, 500):
        ratio = dist.value(2 * d) / dist.value(d)
        assert abs(ratio - 2**-3) < 0.02
    dist3 = kl.beta_table(3, 5000)
    assert dist3.value(2 * 2000) / dist3.value(2000) == pytest.approx(2**-2.5, abs=0.02)


def test_tail_exponent_values():
    assert kl.tail_exponent(2) == 3.0
    assert kl.tail_exponent(3) == 2.5
    ks = np.array([2, 3, 5, 10, 10**6])
    vals = [kl.tail_exponent(int(k)) for k in ks]
    assert (np.diff(vals) < 0).all()
    assert vals[-1] == pytest.approx(2.0, abs=1e-5)  # approaches 2 from above
    assert vals[-1] > 2.0


# -- expectation DP -------------------------------------------------------------------


@pytest.mark.parametrize("k", [2, 3, 5])
def test_dp_base_case_is_deterministic_graph(k):
    table = kl.expected_histogram_dp(k, k + 2, d_max=k + 6)
    assert table.value(k) == 2.0
    assert table.value(k + 1) == float(k)
    assert table.expected[2:].sum() == 0.0


def test_dp_half_mass_at_min_degree():
    table = kl.expected_histogram_dp(2, 10_000)
    assert abs(table.value(2) / 10_000 - 0.5) < 1e-3


def test_dp_conserves_vertex_count():
    for k, n in [(2, 3000), (3, 1500), (4, 800)]:
        table = kl.expected_histogram_dp(k, n)
        assert table.expected.sum() + table.overflow == pytest.approx(n, abs=1e-6 * n)
        assert (table.expected >= 0).all()


def test_dp_truncation_error_raised():
    with pytest.raises(kl.DMaxTooSmall):
        kl.expected_histogram_dp(2, 2000, d_max=3, overflow_tol=1e-6)


@pytest.mark.parametrize("k", [2, 3])
def test_dp_converges_to_beta_like_one_over_n(k):
    # |Y_d(n)/n - beta_d| <= C/n; observed n*err plateaus well under C=2.5
    dist = kl.beta_table(k, 60)
    errs = {}
    for n in (1000, 10_000, 100_000):
        table = kl.expected_histogram_dp(k, n, d_max=60, overflow_tol=1.0)
        for d in (k, k + 1, k + 5):
            err = abs(table.value(d) / n - dist.value(d))
            assert err <= 2.5 / n, (k, n, d, err * n)
            errs[(d, n)] = err * n
    for d in (k, k + 1, k + 5):
        assert errs[(d, 100_000)] <= errs[(d, 1000)] + 0.05  # bounded, not growing


def test_dp_validates_inputs():
    with pytest.raises(kl.InvalidParameters):
        kl.expected_histogram_dp(2, 3)  # DP starts at n = k+2
    with pytest.raises(kl.InvalidParameters):
        kl.expected_histogram_dp(2, 100, d_max=2)


def test_default_d_max_rule():
    d_max = kl.default_d_max(2, 10_000)
    dist = kl.beta_table(2, d_max)
    assert dist.value(d_max) * 10_000 < 1e-4
    assert dist.value(d_max - 1) * 10_000 >= 1e-4
    assert kl.default_d_max(2, 10**30) == 100_000  # capped


# -- concentration bound ----------------------------------------------------------------


def test_azuma_bound_basics():
    assert kl.azuma_bound(2, 100, 0.0) == 1.0
    lam = kl.azuma_lambda(2, 10**5, 0.01)
    assert lam == pytest.approx(np.sqrt(8 * 2 * 10**5 * np.log(100)), rel=1e-12)
    assert kl.azuma_bound(2, 10**5, lam) == pytest.approx(0.01, rel=1e-9)


@settings(max_examples=100)
@given(
    k=st.integers(2, 10),
    extra=st.integers(0, 10**6),
    lam=st.floats(0, 50, allow_nan=False),
    dlam=st.floats(0.001, 50),
)
def test_azuma_bound_monotonicity(k, extra, lam, dlam):
    n = k + 1 + extra
    b = kl.azuma_bound(k, n, lam)
    assert 0 < b <= 1
    assert kl.azuma_bound(k, n, lam + dlam) < b or lam + dlam == lam
    assert kl.azuma_bound(k, 4 * n, lam) >= b
    # the variant with the extra k in the denominator is the weaker claim
    assert kl.azuma_bound_conservative(k, n, lam) >= b
