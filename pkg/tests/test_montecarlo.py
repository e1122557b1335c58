"""Seeded samplers against exact laws, and the empirical distance radius."""

import numpy as np
import pytest
from scipy import stats

from tiebound.approximants import TruncatedPMF, truncated_poisson
from tiebound.bounds_continuous import NearOrderSpec, near_order_count_pmf
from tiebound.distributions import geometric_law, gumbel_law, tabulated_law, uniform_law
from tiebound.maxima import (
    KnSpec,
    size_biased_tie_pmf,
    tie_count_factorial_moment,
    tie_count_law,
)
from tiebound.montecarlo import (
    EmpiricalPMF,
    RngStream,
    empirical_tv,
    sample_near_order_count,
    sample_size_biased_ties,
    sample_tie_count,
)

N_UNIT = 100_000  # moderate sample size keeps the unit suite fast


def _assert_within_standard_errors(emp: EmpiricalPMF, exact: TruncatedPMF, z=4.0):
    freqs = emp.frequencies()
    n = emp.sample_size
    for k in range(exact.k_min, exact.k_max + 1):
        p = exact.prob(k)
        idx = k - emp.k_min
        f = freqs[idx] if 0 <= idx < freqs.size else 0.0
        se = max(np.sqrt(p * (1 - p) / n), 1.0 / n)
        assert abs(f - p) <= z * se + 5.0 / n, f"k={k}: {f} vs {p}"


class TestReproducibility:
    def test_same_key_same_sequence(self):
        spec = KnSpec(law=geometric_law(0.4), n=6)
        a = sample_tie_count(spec, RngStream(seed=90, stream_id=3), size=500)
        b = sample_tie_count(spec, RngStream(seed=90, stream_id=3), size=500)
        np.testing.assert_array_equal(a, b)

    def test_distinct_streams_differ(self):
        spec = KnSpec(law=geometric_law(0.4), n=6)
        a = sample_tie_count(spec, RngStream(seed=90, stream_id=0), size=500)
        b = sample_tie_count(spec, RngStream(seed=90, stream_id=1), size=500)
        assert not np.array_equal(a, b)

    def test_merge_is_order_independent(self):
        spec = KnSpec(law=geometric_law(0.4), n=6)
        streams = RngStream(seed=11).split(4)
        parts = [sample_tie_count(spec, s, size=200) for s in streams]
        forward = np.bincount(np.concatenate(parts))
        backward = np.bincount(np.concatenate(parts[::-1]))
        np.testing.assert_array_equal(forward, backward)

    def test_scalar_draw(self):
        spec = KnSpec(law=geometric_law(0.4), n=6)
        value = sample_tie_count(spec, RngStream(seed=5))
        assert isinstance(value, int) and 1 <= value <= 6


class TestTieCountSampler:
    def test_single_observation(self):
        spec = KnSpec(law=geometric_law(0.3), n=1)
        assert np.all(sample_tie_count(spec, RngStream(seed=1), size=100) == 1)

    def test_degenerate_law_everything_ties(self):
        spec = KnSpec(law=tabulated_law([1.0]), n=7)
        assert np.all(sample_tie_count(spec, RngStream(seed=2), size=100) == 7)

    def test_matches_exact_law(self):
        spec = KnSpec(law=geometric_law(0.5), n=10)
        samples = sample_tie_count(spec, RngStream(seed=33), size=N_UNIT)
        emp = EmpiricalPMF.from_samples(samples)
        _assert_within_standard_errors(emp, tie_count_law(spec, 1e-11))

    def test_tabulated_law_matches(self):
        spec = KnSpec(law=tabulated_law([0.2, 0.3, 0.5]), n=4)
        samples = sample_tie_count(spec, RngStream(seed=34), size=N_UNIT)
        emp = EmpiricalPMF.from_samples(samples)
        _assert_within_standard_errors(emp, tie_count_law(spec, 1e-11))


class TestSizeBiasedSampler:
    def test_single_observation(self):
        spec = KnSpec(law=geometric_law(0.3), n=1)
        assert np.all(sample_size_biased_ties(spec, RngStream(seed=3), size=50) == 1)

    def test_two_point_frequencies(self):
        spec = KnSpec(law=tabulated_law([0.5, 0.5]), n=2)
        samples = sample_size_biased_ties(spec, RngStream(seed=4), size=N_UNIT)
        freq1 = float(np.mean(samples == 1))
        assert freq1 == pytest.approx(1.0 / 3.0, abs=4 * np.sqrt(2.0 / 9.0 / N_UNIT))

    def test_mean_matches_size_bias_identity(self):
        # E[K*] = E[K^2] / E[K]; frozen oracle value 1.4285734212204726
        spec = KnSpec(law=geometric_law(0.3), n=10)
        samples = sample_size_biased_ties(spec, RngStream(seed=5), size=N_UNIT)
        e1 = tie_count_factorial_moment(spec, 1)
        e2 = tie_count_factorial_moment(spec, 2)
        expected = (e2 + e1) / e1
        assert expected == pytest.approx(1.4285734212204726, rel=1e-10)
        se = float(np.std(samples)) / np.sqrt(N_UNIT)
        assert float(np.mean(samples)) == pytest.approx(expected, abs=4 * se)

    def test_goodness_of_fit(self):
        spec = KnSpec(law=geometric_law(0.3), n=10)
        samples = sample_size_biased_ties(spec, RngStream(seed=6), size=N_UNIT)
        exact = [size_biased_tie_pmf(spec, k, 1e-12) for k in range(1, 11)]
        pvalue = _chi_square_pvalue(samples, k_min=1, pmf=exact)
        assert pvalue >= 1e-3


def _chi_square_pvalue(samples, k_min, pmf, min_expected=5.0):
    """Chi-square goodness of fit with tail bins merged to keep cells full."""
    n = samples.size
    counts = np.bincount(np.asarray(samples) - k_min, minlength=len(pmf))[: len(pmf)]
    expected = np.asarray(pmf) * n
    # fold sparse high-k cells into the last kept bin
    keep = expected >= min_expected
    cut = int(np.argmax(~keep)) if not keep.all() else len(pmf)
    cut = max(cut, 2)
    obs = np.append(counts[:cut], counts[cut:].sum() + (n - counts.sum()))
    exp = np.append(expected[:cut], max(n - expected[:cut].sum(), 1e-9))
    chi2 = float(((obs - exp) ** 2 / exp).sum())
    return float(stats.chi2.sf(chi2, df=len(obs) - 1))


class TestNearOrderSampler:
    def test_threshold_wider_than_support(self):
        # every point below the order statistic lies inside the window
        spec = NearOrderSpec(law=uniform_law(1.0), n=6, ell=2, a=2.0)
        samples = sample_near_order_count(spec, RngStream(seed=7), size=200)
        assert np.all(samples == 6 - 2)

    def test_uniform_mean(self):
        # E[count] = (n - ell) M1 = a n / b = 1.0 at these parameters
        spec = NearOrderSpec(law=uniform_law(1.0), n=10, ell=1, a=0.1)
        samples = sample_near_order_count(spec, RngStream(seed=8), size=N_UNIT)
        se = float(np.std(samples)) / np.sqrt(N_UNIT)
        assert float(np.mean(samples)) == pytest.approx(1.0, abs=4 * se)

    def test_gumbel_matches_mixture_pmf(self):
        spec = NearOrderSpec(law=gumbel_law(), n=20, ell=2, a=0.5)
        samples = sample_near_order_count(spec, RngStream(seed=9), size=N_UNIT)
        emp = EmpiricalPMF.from_samples(samples)
        _assert_within_standard_errors(emp, near_order_count_pmf(spec, 1e-9))


class TestEmpiricalTV:
    def test_same_point_mass(self):
        emp = EmpiricalPMF(k_min=3, counts=np.array([50]), sample_size=50)
        target = TruncatedPMF(k_min=3, probs=np.array([1.0]), tail_mass_bound=0.0)
        estimate, _ = empirical_tv(emp, target)
        assert estimate == 0.0

    def test_disjoint_supports(self):
        emp = EmpiricalPMF(k_min=0, counts=np.array([10]), sample_size=10)
        target = TruncatedPMF(k_min=5, probs=np.array([1.0]), tail_mass_bound=0.0)
        estimate, _ = empirical_tv(emp, target)
        assert estimate == 1.0

    def test_self_consistency(self):
        """Samples drawn from the target stay within the stated radius."""
        target = truncated_poisson(2.0, 1e-9)
        failures = 0
        for rep in range(30):
            gen = RngStream(seed=1234, stream_id=rep).generator()
            samples = gen.poisson(2.0, size=50_000)
            emp = EmpiricalPMF.from_samples(samples)
            estimate, radius = empirical_tv(emp, target)
            failures += estimate > radius
        assert failures == 0

    def test_counts_must_sum(self):
        from tiebound.errors import DomainError

        with pytest.raises(DomainError):
            EmpiricalPMF(k_min=0, counts=np.array([3, 4]), sample_size=10)
