"""Exact law of the number of sample maxima, and its size-biased companions.

For n i.i.d. draws from a discrete law with mass function p and distribution
function F, the number K of observations tied with the sample maximum has

    P(K = k)            = C(n, k) * sum_j p(j)**k * F(j-1)**(n-k)
    E[(K)_ell]          = (n)_ell * sum_j p(j)**ell * F(j)**(n-ell)

where (k)_ell is the falling factorial.  This module evaluates those series
with certified truncation remainders derived from the law's geometric tail
certificate, entirely in log space so that n may be as large as 1e9.

It also exposes the law of the argmax value M (P(M = m) proportional to
p(m) * F(m)**(n-1)), the conditional tie probability q(m) = p(m) / F(m),
and the size-biased tie count, which is a binomial mixture over q(M).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .approximants import TruncatedPMF
from .distributions import DiscreteLaw
from .errors import DomainError, TruncationError

__all__ = [
    "KnSpec",
    "tie_count_pmf",
    "tie_count_factorial_moment",
    "tie_count_law",
    "size_biased_tie_pmf",
    "argmax_value_law",
    "tie_given_max_prob",
    "tie_given_max_moment",
]

DEFAULT_TOL = 1e-12

_SERIES_CAP = 2_000_000


@dataclass
class KnSpec:
    """Sample description: a discrete law and the number of observations."""

    law: DiscreteLaw
    n: int

    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"sample size must be a positive integer, got {self.n!r}")


def _log_comb(n: int, k: int) -> float:
    """log C(n, k); accurate for huge n as long as k stays moderate."""
    if k < 0 or k > n:
        return -math.inf
    k = min(k, n - k)
    if k <= 100_000:
        return math.fsum(math.log((n - k + i) / i) for i in range(1, k + 1))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_falling(n: int, ell: int) -> float:
    """log of the falling factorial n (n-1) ... (n-ell+1)."""
    return math.fsum(math.log(n - i) for i in range(ell))


def _series(law: DiscreteLaw, power: int, expo: int, shifted: bool,
            rel_tol: Optional[float] = None,
            log_abs_tol: Optional[float] = None) -> tuple[float, float]:
    """Certified sum_{j>=1} p(j)**power * F(j - 1 or j)**expo.

    Returns ``(log_sum, log_remainder)`` where ``log_remainder`` bounds the
    omitted mass of the series.  Terms are accumulated by streaming
    log-sum-exp, so the result is meaningful even when every term underflows
    a plain double.  The remainder certificate uses p(j) <= C * r**(j-1) and
    F <= 1:

        sum_{j>J} p(j)**power <= C**power * r**(power*J) / (1 - r**power).

    Stops once the remainder meets ``rel_tol`` relative to the partial sum
    and/or ``log_abs_tol`` absolutely (at least one must be given).
    """
    if expo < 0:
        raise DomainError("series exponent must be non-negative")
    if rel_tol is None and log_abs_tol is None:
        raise ValueError("need a stopping tolerance")
    pmf, cdf = law.pmf, law.cdf

    if law.support_max is not None:
        # finite support: exact sum, zero remainder
        terms = []
        for j in range(1, law.support_max + 1):
            pj = pmf(j)
            if pj <= 0.0:
                continue
            F = cdf(j - 1) if shifted else cdf(j)
            if F <= 0.0:
                if expo > 0:
                    continue
                F = 1.0  # F**0
                terms.append(power * math.log(pj))
                continue
            terms.append(power * math.log(pj) + expo * math.log(F))
        if not terms:
            return -math.inf, -math.inf
        m = max(terms)
        s = math.fsum(math.exp(t - m) for t in terms)
        return m + math.log(s), -math.inf

    r = law.tail_ratio
    log_r = math.log(r)
    log_c = math.log(law.tail_const)
    log_one_minus_rp = math.log1p(-r**power) if r**power < 1.0 else -math.inf
    m = -math.inf  # running log-sum-exp scale
    s = 0.0
    for j in range(1, _SERIES_CAP + 1):
        pj = pmf(j)
        if pj > 0.0:
            lt = power * math.log(pj)
            F = cdf(j - 1) if shifted else cdf(j)
            if F <= 0.0:
                lt = -math.inf if expo > 0 else lt
            elif expo > 0:
                lt += expo * math.log(F)
            if lt > -math.inf:
                if lt > m:
                    s = s * math.exp(m - lt) + 1.0
                    m = lt
                else:
                    s += math.exp(lt - m)
        log_rem = power * (log_c + j * log_r) - log_one_minus_rp
        done = False
        if log_abs_tol is not None and log_rem <= log_abs_tol:
            done = True
        if rel_tol is not None and s > 0.0 and log_rem <= math.log(rel_tol) + m + math.log(s):
            done = True
        if done:
            log_sum = (m + math.log(s)) if s > 0.0 else -math.inf
            return log_sum, log_rem
    raise TruncationError(
        f"tie-count series did not certify its tolerance within {_SERIES_CAP} terms",
        best_bound=math.exp(power * (log_c + _SERIES_CAP * log_r) - log_one_minus_rp),
    )


def _tie_pmf_with_error(spec: KnSpec, k: int, tol: float) -> tuple[float, float]:
    n = spec.n
    log_binom = _log_comb(n, k)
    log_sum, log_rem = _series(
        spec.law, power=k, expo=n - k, shifted=True,
        log_abs_tol=math.log(tol) - log_binom,
    )
    value = math.exp(log_binom + log_sum) if log_sum > -math.inf else 0.0
    err = math.exp(log_binom + log_rem) if log_rem > -math.inf else 0.0
    return value, err


def tie_count_pmf(spec: KnSpec, k: int, tol: float = DEFAULT_TOL) -> float:
    """P(K = k), certified within ``tol`` absolutely."""
    if not isinstance(k, int) or not (1 <= k <= spec.n):
        raise DomainError(f"tie count must be an integer in [1, {spec.n}], got {k!r}")
    if not (tol > 0.0):
        raise DomainError("tolerance must be positive")
    return _tie_pmf_with_error(spec, k, tol)[0]


def tie_count_factorial_moment(spec: KnSpec, ell: int, tol: float = DEFAULT_TOL) -> float:
    """E[(K)_ell] = E[K (K-1) ... (K-ell+1)], certified within ``tol`` relatively."""
    if not isinstance(ell, int) or not (1 <= ell <= spec.n):
        raise DomainError(f"moment order must be an integer in [1, {spec.n}], got {ell!r}")
    if not (tol > 0.0):
        raise DomainError("tolerance must be positive")
    key = ("fmom", ell, tol)
    if key not in spec._cache:
        log_sum, _ = _series(spec.law, power=ell, expo=spec.n - ell, shifted=False,
                             rel_tol=tol)
        spec._cache[key] = math.exp(_log_falling(spec.n, ell) + log_sum)
    return spec._cache[key]


def tie_count_law(spec: KnSpec, tol: float = DEFAULT_TOL) -> TruncatedPMF:
    """The full law of K as a TruncatedPMF whose tail certificate meets ``tol``.

    For moderate n the entire support {1, ..., n} is materialized and the
    tail budget consists purely of accumulated per-entry certificates.  For
    large n the support is cut once the certified unaccounted mass
    (1 - partial sum, plus per-entry errors) drops below ``tol``.
    """
    if not (tol > 0.0):
        raise DomainError("tolerance must be positive")
    n = spec.n
    e1 = tie_count_factorial_moment(spec, 1, min(tol, 1e-9))
    if n >= 2:
        e2 = tie_count_factorial_moment(spec, 2, min(tol, 1e-9))
        lam = e2 / e1
    else:
        lam = 1.0
    k_hint = min(n, int(lam + 12.0 * math.sqrt(lam) + 30.0))
    per_tol = tol / (8.0 * k_hint)

    probs = []
    errs = 0.0
    running = 0.0
    k_cap = min(n, 200_000)
    for k in range(1, k_cap + 1):
        v, e = _tie_pmf_with_error(spec, k, per_tol)
        probs.append(v)
        errs += e
        running += v
        if k == n:
            return TruncatedPMF(k_min=1, probs=np.array(probs), tail_mass_bound=errs)
        if k >= k_hint:
            # omitted mass <= (1 - certified partial sum); the budget also
            # covers the per-entry errors of the stored probabilities
            deficit = max(0.0, 1.0 - running) + 2.0 * errs
            if deficit <= tol:
                return TruncatedPMF(k_min=1, probs=np.array(probs), tail_mass_bound=deficit)
    raise TruncationError(
        f"tie-count law did not certify tail {tol!r} within {k_cap} outcomes",
        best_bound=max(0.0, 1.0 - running) + 2.0 * errs,
    )


def size_biased_tie_pmf(spec: KnSpec, k: int, tol: float = DEFAULT_TOL) -> float:
    """P(K* = k) = k P(K = k) / E[K] for the size-biased tie count."""
    if not isinstance(k, int) or not (1 <= k <= spec.n):
        raise DomainError(f"tie count must be an integer in [1, {spec.n}], got {k!r}")
    e1 = tie_count_factorial_moment(spec, 1, tol / 4.0)
    v = tie_count_pmf(spec, k, tol * e1 / (4.0 * k))
    return k * v / e1


def argmax_value_law(spec: KnSpec) -> DiscreteLaw:
    """Law of the value M at which the maximum is attained, size-bias weighted.

    P(M = m) = p(m) F(m)**(n-1) / Z with Z = sum_j p(j) F(j)**(n-1); Z equals
    E[K] / n.  The returned law inherits a valid geometric tail certificate
    from the base law (constant scaled by 1/Z) and memoizes its cdf.
    """
    n = spec.n
    base = spec.law
    if n == 1:
        return base
    log_z, _ = _series(base, power=1, expo=n - 1, shifted=False, rel_tol=1e-14)
    z = math.exp(log_z)

    def pmf(m):
        scalar = np.ndim(m) == 0
        m = np.atleast_1d(np.asarray(m))
        pm = np.asarray(base.pmf(m), dtype=float)
        Fm = np.asarray(base.cdf(m), dtype=float)
        out = np.zeros_like(pm)
        ok = (pm > 0.0) & (Fm > 0.0)
        out[ok] = np.exp(np.log(pm[ok]) + (n - 1) * np.log(Fm[ok]) - log_z)
        return float(out[0]) if scalar else out

    cum = [0.0]  # cum[j] = P(M <= j)

    def cdf(m):
        scalar = np.ndim(m) == 0
        marr = np.atleast_1d(np.asarray(m)).astype(np.int64)
        top = int(marr.max(initial=0))
        if base.support_max is not None:
            top = min(top, base.support_max)
        while len(cum) <= top:
            cum.append(min(1.0, cum[-1] + float(pmf(len(cum)))))
        idx = np.clip(marr, 0, len(cum) - 1)
        out = np.array([cum[i] for i in idx])
        if base.support_max is not None:
            out = np.where(marr >= base.support_max, 1.0, out)
        return float(out[0]) if scalar else out

    return DiscreteLaw(
        pmf=pmf,
        cdf=cdf,
        tail_ratio=base.tail_ratio,
        tail_const=base.tail_const / z,
        support_max=base.support_max,
        quantile=None,
        descriptor=None,
    )


def tie_given_max_prob(law: DiscreteLaw, m: int) -> float:
    """q(m) = P(X = m) / P(X <= m), the tie chance given the maximum sits at m."""
    F = law.cdf(m)
    if F <= 0.0:
        raise DomainError(f"cdf vanishes at {m!r}; conditional tie probability undefined")
    return min(1.0, law.pmf(m) / F)


def tie_given_max_moment(spec: KnSpec, j: int, tol: float = DEFAULT_TOL) -> float:
    """E[q(M)**j] for j in {1, 2}, certified within ``tol`` relatively.

    Computed directly as sum_m P(M = m) q(m)**j, which collapses to the
    tie-count series with mass exponent 1 + j:

        E[q(M)**j] = sum_m p(m)**(1+j) F(m)**(n-1-j) / Z.

    Requires n >= 2 for j = 1 and n >= 3 for j = 2 (the cdf exponent must
    stay non-negative, and the matching factorial-moment identities divide
    by n - 1 and n - 2).
    """
    if j not in (1, 2):
        raise DomainError(f"moment order must be 1 or 2, got {j!r}")
    if spec.n < j + 1:
        raise DomainError(f"need at least {j + 1} observations for moment order {j}")
    log_num, _ = _series(spec.law, power=1 + j, expo=spec.n - 1 - j, shifted=False,
                         rel_tol=tol / 2.0)
    log_z, _ = _series(spec.law, power=1, expo=spec.n - 1, shifted=False,
                       rel_tol=min(tol / 2.0, 1e-14))
    if log_num == -math.inf:
        return 0.0
    return math.exp(log_num - log_z)
