"""Discrete-case bounds: frozen hand values, parameter identities, dominance."""

import math

import pytest

from tiebound.approximants import (
    TruncatedPMF,
    truncated_geometric,
    truncated_log,
    truncated_poisson,
    tv_distance,
)
from tiebound.bounds_discrete import (
    geometric_link_bound,
    log_bound_from_moments,
    log_bound_second_moment,
    log_bound_singleton,
    poisson_bound,
)
from tiebound.distributions import geometric_law, tabulated_law
from tiebound.errors import DegenerateParameterError, DomainError
from tiebound.maxima import (
    KnSpec,
    size_biased_tie_pmf,
    tie_count_factorial_moment,
    tie_count_law,
    tie_count_pmf,
)

TOL = 1e-12


class TestLogBoundSingleton:
    def test_geometric_parameter_identity(self):
        for p in (0.05, 0.2, 0.5):
            for n in (5, 20, 50):
                report = log_bound_singleton(KnSpec(law=geometric_law(p), n=n), TOL)
                assert abs(report.params["alpha"] - p) <= 1e-10

    def test_two_point_hand_value(self):
        # alpha = 1 - 0.5/1.5 = 2/3; two-term sum gives -2 log(1/3)
        report = log_bound_singleton(KnSpec(law=tabulated_law([0.5, 0.5]), n=2), TOL)
        assert report.params["alpha"] == pytest.approx(2.0 / 3.0, rel=1e-12)
        assert report.bound == pytest.approx(-2.0 * math.log(1.0 / 3.0), rel=1e-12)

    def test_four_point_frozen_value(self):
        # oracle: exact fractions for the uniform four-point law, n = 4
        report = log_bound_singleton(KnSpec(law=tabulated_law([0.25] * 4), n=4), TOL)
        assert report.params["alpha"] == pytest.approx(0.64, rel=1e-13)
        assert report.bound == pytest.approx(2.4383941884454714, rel=1e-12)

    def test_agreement_with_moment_form(self):
        """Series evaluation equals the closed form fed with exact moments."""
        for law, n in ((geometric_law(0.3), 12), (tabulated_law([0.2, 0.3, 0.5]), 7)):
            spec = KnSpec(law=law, n=n)
            report = log_bound_singleton(spec, TOL)
            e1 = tie_count_factorial_moment(spec, 1, TOL)
            pk2 = tie_count_pmf(spec, 2, TOL)
            closed = log_bound_from_moments(e1, pk2, report.params["alpha"])
            assert report.bound == pytest.approx(closed, rel=2e-11)

    def test_dominates_exact_tv(self):
        # one spot check here; the full grid runs in the acceptance suite
        spec = KnSpec(law=geometric_law(0.2), n=20)
        report = log_bound_singleton(spec, TOL)
        exact = tie_count_law(spec, 1e-11)
        target = truncated_log(report.params["alpha"], 1e-12)
        assert report.bound >= tv_distance(exact, target).hi

    def test_degenerate_cases(self):
        with pytest.raises(DegenerateParameterError):
            log_bound_singleton(KnSpec(law=geometric_law(0.5), n=1))
        with pytest.raises(DegenerateParameterError):
            # all observations always tie, so P(K = 1) = 0 and alpha = 1
            log_bound_singleton(KnSpec(law=tabulated_law([1.0]), n=3))


class TestLogBoundFromMoments:
    def test_no_pair_mass(self):
        alpha = 0.4
        assert log_bound_from_moments(1.3, 0.0, alpha) == pytest.approx(
            -2.0 * math.log1p(-alpha) * 1.3, rel=1e-14
        )

    def test_two_point_hand_value(self):
        value = log_bound_from_moments(1.5, 0.5, 2.0 / 3.0)
        assert value == pytest.approx(-2.0 * math.log(1.0 / 3.0), rel=1e-14)
        assert value == pytest.approx(2.1972245773362196, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            log_bound_from_moments(1.0, 0.1, 1.0)
        with pytest.raises(DomainError):
            log_bound_from_moments(0.0, 0.1, 0.5)


class TestLogBoundSecondMoment:
    def test_four_point_frozen_value(self):
        # oracle: exact fractions give beta = 9/19 and this bound value
        report = log_bound_second_moment(KnSpec(law=tabulated_law([0.25] * 4), n=4), TOL)
        assert report.params["beta"] == pytest.approx(9.0 / 19.0, rel=1e-12)
        assert report.bound == pytest.approx(3.7441476693389686, rel=1e-11)

    def test_dominates_exact_tv(self):
        spec = KnSpec(law=geometric_law(0.3), n=20)
        report = log_bound_second_moment(spec, TOL)
        exact = tie_count_law(spec, 1e-11)
        target = truncated_log(report.params["beta"], 1e-12)
        assert report.bound >= tv_distance(exact, target).hi

    def test_singleton_variant_is_tighter_for_geometric(self):
        spec = KnSpec(law=geometric_law(0.2), n=20)
        a = log_bound_singleton(spec, TOL).bound
        b = log_bound_second_moment(spec, TOL).bound
        assert a < b

    def test_small_samples_rejected(self):
        for n in (1, 2, 3):
            with pytest.raises(DomainError):
                log_bound_second_moment(KnSpec(law=geometric_law(0.4), n=n))


class TestGeometricLinkBound:
    def test_zero_distance_gives_zero(self):
        assert geometric_link_bound(2.0, 0.5, 0.0) == 0.0

    def test_hand_value(self):
        value = geometric_link_bound(2.0, 0.5, 0.1)
        assert value == pytest.approx(1.2 * math.log(2), rel=1e-13)
        assert value == pytest.approx(0.8317766166719343, rel=1e-12)

    def test_consistency_with_exact_distances(self):
        """Feeding the exact size-biased-vs-geometric distance through the link
        dominates the exact count-vs-logarithmic distance."""
        spec = KnSpec(law=geometric_law(0.3), n=10)
        e1 = tie_count_factorial_moment(spec, 1, TOL)
        e2 = tie_count_factorial_moment(spec, 2, TOL)
        beta = e2 / (e2 + e1)
        star = TruncatedPMF(
            k_min=1,
            probs=[size_biased_tie_pmf(spec, k, TOL) for k in range(1, spec.n + 1)],
            tail_mass_bound=spec.n * 8 * TOL,
        )
        geom = truncated_geometric(beta, 1e-12)
        tv_star = tv_distance(star, geom).hi
        linked = geometric_link_bound(e1, beta, tv_star)
        exact = tie_count_law(spec, 1e-11)
        target = truncated_log(beta, 1e-12)
        assert linked >= tv_distance(exact, target).lo - 1e-9

    def test_domain(self):
        with pytest.raises(DomainError):
            geometric_link_bound(1.0, 0.5, 1.5)
        with pytest.raises(DomainError):
            geometric_link_bound(1.0, 0.0, 0.1)


class TestPoissonBound:
    @pytest.mark.parametrize(
        "mu,n,expected",
        [(100, 10**5, 0.330), (500, 10**8, 0.058), (900, 10**9, 0.039)],
    )
    def test_large_sample_spot_cells(self, mu, n, expected):
        law = geometric_law(1.0 - mu / n)
        report = poisson_bound(KnSpec(law=law, n=n), TOL)
        assert abs(report.bound - expected) <= 5e-4
        assert report.informative

    def test_uninformative_cell(self):
        law = geometric_law(1.0 - 300.0 / 10**5)
        report = poisson_bound(KnSpec(law=law, n=10**5), TOL)
        assert report.bound > 1.0
        assert not report.informative

    def test_variance_identity_nonnegative(self):
        for p in (0.05, 0.2, 0.5):
            for n in (5, 10, 50):
                spec = KnSpec(law=geometric_law(p), n=n)
                e1 = tie_count_factorial_moment(spec, 1, TOL)
                e2 = tie_count_factorial_moment(spec, 2, TOL)
                assert e2 - e1 * (e1 - 1.0) >= -1e-9

    def test_dominates_exact_tv(self):
        spec = KnSpec(law=geometric_law(0.3), n=10)
        report = poisson_bound(spec, TOL)
        exact = tie_count_law(spec, 1e-11)
        target = truncated_poisson(report.params["lambda"], 1e-12)
        assert report.bound >= tv_distance(exact, target).hi

    def test_small_samples_rejected(self):
        with pytest.raises(DomainError):
            poisson_bound(KnSpec(law=geometric_law(0.4), n=2))


def test_reports_expose_moments_and_flags():
    spec = KnSpec(law=geometric_law(0.2), n=20)
    report = poisson_bound(spec, TOL)
    assert set(report.moments) >= {"EK", "EK2_factorial", "EK3_factorial"}
    assert report.method == "thm2"
    doc = report.as_dict()
    assert doc["bound"] == report.bound
    assert doc["informative"] == (report.bound < 1.0)
    assert all(v >= 0.0 for v in report.moments.values())


def test_bounds_finite_and_nonnegative_on_grid():
    for p in (0.05, 0.2, 0.5):
        for n in (5, 10, 20):
            spec = KnSpec(law=geometric_law(p), n=n)
            values = [log_bound_singleton(spec, TOL).bound, poisson_bound(spec, TOL).bound]
            if n >= 4:
                values.append(log_bound_second_moment(spec, TOL).bound)
            for v in values:
                assert math.isfinite(v) and v >= 0.0
