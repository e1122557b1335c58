"""Target pmfs, certified truncation, and the total-variation interval."""

import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from tiebound.approximants import (
    TruncatedPMF,
    log_pmf,
    negbin_pmf,
    poisson_pmf,
    truncate_law,
    truncated_geometric,
    truncated_log,
    truncated_negbin,
    truncated_poisson,
    tv_distance,
)
from tiebound.errors import DomainError, TruncationError


class TestLogPMF:
    def test_values(self):
        # oracle: 40-digit evaluation of -alpha^k / (k log(1-alpha))
        assert log_pmf(0.5, 1) == pytest.approx(0.7213475204444817, rel=1e-14)
        assert log_pmf(0.5, 2) == pytest.approx(0.18033688011112042, rel=1e-14)

    @pytest.mark.parametrize("alpha", [0.1, 0.37, 0.8])
    def test_normalization(self, alpha):
        kmax = int(math.log(1e-17) / math.log(alpha)) + 10
        total = math.fsum(log_pmf(alpha, k) for k in range(1, kmax))
        assert abs(total - 1.0) < 1e-13

    def test_mean_identity(self):
        # mean of L(alpha) is -alpha / ((1-alpha) log(1-alpha))
        alpha = 0.37
        kmax = 2000
        mean = math.fsum(k * log_pmf(alpha, k) for k in range(1, kmax))
        assert mean == pytest.approx(1.2711179956066767, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_pmf(1.0, 1)
        with pytest.raises(DomainError):
            log_pmf(0.5, 0)


class TestPoissonPMF:
    def test_values(self):
        assert poisson_pmf(1.0, 0) == pytest.approx(math.exp(-1.0), rel=1e-15)
        assert poisson_pmf(2.0, 2) == pytest.approx(0.2706705664732254, rel=1e-14)

    def test_normalization(self):
        total = math.fsum(poisson_pmf(1.0, k) for k in range(0, 51))
        assert abs(total - 1.0) < 1e-15

    def test_domain(self):
        with pytest.raises(DomainError):
            poisson_pmf(0.0, 1)
        with pytest.raises(DomainError):
            poisson_pmf(1.0, -1)


class TestNegBinPMF:
    def test_values(self):
        assert negbin_pmf(1.0, 0.5, 0) == 0.5
        assert negbin_pmf(1.0, 0.5, 3) == 0.0625
        assert negbin_pmf(2.0, 0.5, 1) == pytest.approx(0.25, rel=1e-14)

    def test_unit_shape_is_exactly_geometric(self):
        beta = 0.73
        for k in range(65):
            assert negbin_pmf(1.0, beta, k) == (1.0 - beta) * beta**k

    def test_recurrence(self):
        # P(k+1) = P(k) * beta (ell + k) / (k + 1)
        ell, beta = 2.5, 0.4
        prev = negbin_pmf(ell, beta, 0)
        for k in range(60):
            nxt = negbin_pmf(ell, beta, k + 1)
            assert nxt == pytest.approx(prev * beta * (ell + k) / (k + 1), rel=1e-12)
            prev = nxt

    def test_matches_scipy(self):
        ell, beta = 3.2, 0.6
        ks = np.arange(0, 40)
        ours = np.array([negbin_pmf(ell, beta, int(k)) for k in ks])
        ref = stats.nbinom.pmf(ks, ell, 1.0 - beta)
        np.testing.assert_allclose(ours, ref, rtol=1e-12)


class TestTruncation:
    def test_poisson_certificate(self):
        law = truncated_poisson(1.0, 1e-10)
        assert law.tail_mass_bound <= 1e-10
        # certificate must dominate the true omitted mass
        assert stats.poisson.sf(law.k_max, 1.0) <= law.tail_mass_bound
        assert law.k_max >= 12

    def test_geometric_certificate(self):
        law = truncated_negbin(1.0, 0.5, 1e-12)
        assert law.tail_mass_bound <= 1e-12
        assert law.k_max == pytest.approx(40, abs=2)
        assert 0.5 ** (law.k_max + 1) <= law.tail_mass_bound

    def test_finite_law_truncates_with_zero_tail(self):
        weights = [0.2, 0.3, 0.5]
        law = truncate_law(
            pmf=lambda k: weights[k - 1] if k <= 3 else 0.0,
            tail_after=lambda k: 0.0 if k >= 3 else 1.0,
            tol=1e-15,
            k_min=1,
        )
        assert law.tail_mass_bound == 0.0
        assert law.total() == pytest.approx(1.0, abs=0)

    def test_unreachable_tolerance_raises(self):
        with pytest.raises(TruncationError) as exc:
            truncate_law(lambda k: 0.0, lambda k: 0.5, tol=1e-3, max_terms=50)
        assert exc.value.best_bound == 0.5

    def test_shifted_geometric(self):
        law = truncated_geometric(0.5, 1e-12)
        assert law.k_min == 1
        assert law.prob(1) == 0.5
        assert law.prob(3) == 0.125

    def test_mass_plus_tail_covers_one(self):
        for law in (truncated_log(0.6, 1e-12), truncated_poisson(2.5, 1e-12),
                    truncated_negbin(1.5, 0.4, 1e-12), truncated_geometric(0.7, 1e-12)):
            total = law.total() + law.tail_mass_bound
            assert 1.0 - 1e-12 <= total <= 1.0 + 1e-12


def _subset_tv(p: TruncatedPMF, q: TruncatedPMF) -> float:
    """Oracle: supremum of |P(E) - Q(E)| over all outcome subsets."""
    k_lo = min(p.k_min, q.k_min)
    k_hi = max(p.k_max, q.k_max)
    outcomes = range(k_lo, k_hi + 1)
    best = 0.0
    for size in range(len(list(outcomes)) + 1):
        for subset in combinations(outcomes, size):
            diff = abs(sum(p.prob(k) - q.prob(k) for k in subset))
            best = max(best, diff)
    return best


class TestTVDistance:
    def test_identical(self):
        law = truncated_poisson(2.0, 1e-12)
        lo, hi = tv_distance(law, law)
        assert lo == 0.0
        assert hi <= 1e-12

    def test_disjoint_point_masses(self):
        p = TruncatedPMF(k_min=0, probs=np.array([1.0]), tail_mass_bound=0.0)
        q = TruncatedPMF(k_min=1, probs=np.array([1.0]), tail_mass_bound=0.0)
        assert tv_distance(p, q) == (1.0, 1.0)

    def test_hand_value(self):
        p = TruncatedPMF(k_min=1, probs=np.array([0.5, 0.5]), tail_mass_bound=0.0)
        q = TruncatedPMF(k_min=1, probs=np.array([0.25, 0.75]), tail_mass_bound=0.0)
        lo, hi = tv_distance(p, q)
        assert lo == pytest.approx(0.25, abs=0)
        assert hi == pytest.approx(0.25, abs=0)

    def test_halved_l1_equals_subset_supremum(self):
        rng = np.random.default_rng(3)
        for _ in range(12):
            size = int(rng.integers(2, 9))
            w1 = rng.random(size)
            w2 = rng.random(size)
            p = TruncatedPMF(0, w1 / w1.sum(), 0.0)
            q = TruncatedPMF(0, w2 / w2.sum(), 0.0)
            lo, _ = tv_distance(p, q)
            assert lo == pytest.approx(_subset_tv(p, q), abs=1e-12)

    def test_subset_supremum_support_twelve(self):
        rng = np.random.default_rng(11)
        w1 = rng.random(12)
        w2 = rng.random(12)
        p = TruncatedPMF(0, w1 / w1.sum(), 0.0)
        q = TruncatedPMF(0, w2 / w2.sum(), 0.0)
        lo, _ = tv_distance(p, q)
        # exhaustive 2^12 subsets via bit masks
        pv, qv = p.probs, q.probs
        best = 0.0
        for mask in range(1 << 12):
            sel = np.array([(mask >> i) & 1 for i in range(12)], dtype=bool)
            best = max(best, abs(pv[sel].sum() - qv[sel].sum()))
        assert lo == pytest.approx(best, abs=1e-12)

    def test_interval_width_bounded_by_tails(self):
        p = truncated_log(0.6, 1e-6)
        q = truncated_poisson(1.3, 1e-7)
        lo, hi = tv_distance(p, q)
        assert hi - lo <= 0.5 * (p.tail_mass_bound + q.tail_mass_bound) + 1e-18


@st.composite
def _small_pmf(draw):
    size = draw(st.integers(min_value=1, max_value=5))
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=size, max_size=size))
    w = np.array(raw)
    return TruncatedPMF(k_min=draw(st.integers(0, 3)), probs=w / w.sum(),
                        tail_mass_bound=0.0)


@settings(max_examples=150, deadline=None)
@given(_small_pmf(), _small_pmf(), _small_pmf())
def test_tv_metric_properties(p, q, r):
    """Symmetry, range, and the triangle inequality on exact pmfs."""
    pq = tv_distance(p, q).lo
    qp = tv_distance(q, p).lo
    assert pq == qp
    assert 0.0 <= pq <= 1.0
    assert pq <= tv_distance(p, r).lo + tv_distance(r, q).lo + 1e-12
