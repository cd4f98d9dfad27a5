"""Segmented Moebius sieve and the arithmetic facts used by the entropy argument."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ._validation import check_positive_int

#: Largest segment the sieve will allocate (cells); raise it for bigger machines.
MAX_SEGMENT_SIZE = 1 << 26
#: Largest bound accepted by :func:`primes_upto`.
PRIME_CAP = 10**8
#: Default cutoff for the partial product in :func:`tail_product_bound`.
TAIL_CUTOFF = 10**6


@dataclass(frozen=True, eq=False)
class MobiusTable:
    """Values ``mu(n)`` for ``1 <= n <= n_max``; ``values[0]`` is a zero pad."""

    n_max: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, n):
        if isinstance(n, slice):
            return self.values[n]
        if not 1 <= n <= self.n_max:
            raise IndexError(f"mu({n}) outside 1..{self.n_max}")
        return int(self.values[n])

    def symbols(self, n=None):
        """``mu(1), ..., mu(n)`` as an int8 array."""
        n = self.n_max if n is None else n
        self._check(n)
        return self.values[1 : n + 1]

    def mertens(self, n):
        self._check(n)
        return int(self.values[1 : n + 1].sum(dtype=np.int64))

    def _check(self, n):
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n={n} outside 1..{self.n_max}")


def primes_upto(n):
    """All primes ``<= n`` (plain Eratosthenes on a byte array)."""
    if n > PRIME_CAP:
        raise ValueError(f"prime bound {n} exceeds PRIME_CAP={PRIME_CAP}")
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


@lru_cache(maxsize=8)
def _cached_primes(n):
    primes = primes_upto(n)
    primes.setflags(write=False)
    return primes


def _mobius_segment(lo, hi, primes):
    # mu on [lo, hi); prod collects the squarefree part over the small primes
    size = hi - lo
    mu = np.ones(size, dtype=np.int8)
    prod = np.ones(size, dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p >= hi:
            break
        start = (-lo) % p
        mu[start::p] *= -1
        prod[start::p] *= p
        pp = p * p
        mu[(-lo) % pp :: pp] = 0
    n = np.arange(lo, hi, dtype=np.int64)
    # one prime factor above sqrt(hi) remains wherever prod falls short of n
    mu[(prod < n) & (mu != 0)] *= -1
    return mu


def mobius_sieve(n_max, segment_size=1 << 20, n_jobs=1):
    """Tabulate ``mu`` on ``[1, n_max]`` segment by segment.

    The result does not depend on ``segment_size`` or ``n_jobs``; segments are
    independent and merged in order.
    """
    n_max = check_positive_int(n_max, "n_max")
    segment_size = check_positive_int(segment_size, "segment_size")
    if segment_size > MAX_SEGMENT_SIZE:
        raise ValueError(
            f"segment_size {segment_size} exceeds MAX_SEGMENT_SIZE={MAX_SEGMENT_SIZE}"
        )
    primes = _cached_primes(math.isqrt(n_max) + 1)
    bounds = [
        (lo, min(lo + segment_size, n_max + 1))
        for lo in range(1, n_max + 1, segment_size)
    ]
    if n_jobs == 1 or len(bounds) == 1:
        parts = [_mobius_segment(lo, hi, primes) for lo, hi in bounds]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(lambda b: _mobius_segment(b[0], b[1], primes), bounds))
    values = np.concatenate([np.zeros(1, dtype=np.int8)] + parts)
    return MobiusTable(n_max, values)


def squarefree_density(table, n):
    """Fraction of squarefree integers in ``[1, n]``."""
    table._check(n)
    return Fraction(int(np.count_nonzero(table.values[1 : n + 1])), n)


def periodic_correlation(table, pattern, n, schedule="geometric"):
    """Cesaro correlation of ``mu`` with ``pattern`` repeated periodically."""
    from .correlation import correlate

    table._check(n)
    pattern = np.asarray(pattern)
    if pattern.ndim != 1 or pattern.size == 0:
        raise ValueError("pattern must be a nonempty 1-d sequence")
    eta = np.resize(pattern, n)
    return correlate(table.symbols(n), eta, schedule)


class TailBound(NamedTuple):
    lower_estimate: float
    bound: float
    holds: bool


# below this many factors the product is evaluated in exact rationals
_EXACT_SPAN = 256


def tail_product_bound(k, n_partial=None, cutoff=TAIL_CUTOFF):
    """Check ``prod_{j>=k} (1 - 1/q_j^2) >= 1 - 1/q_k`` over the primes ``q_j``.

    The infinite product is bounded below by the partial product up to the
    ``n_partial``-th prime times ``prod_{n > q} (1 - 1/n^2) = q / (q + 1)``,
    ``q`` being that prime.  ``n_partial`` defaults to every prime below
    ``cutoff``.
    """
    k = check_positive_int(k, "k")
    primes = _cached_primes(cutoff)
    if n_partial is None:
        n_partial = len(primes)
    n_partial = check_positive_int(n_partial, "n_partial")
    if n_partial < k:
        raise ValueError(f"n_partial={n_partial} must be >= k={k}")
    if n_partial > len(primes):
        raise ValueError(f"only {len(primes)} primes below cutoff={cutoff}")
    qs = primes[k - 1 : n_partial]
    q_last = int(qs[-1])
    q_k = int(qs[0])
    if len(qs) <= _EXACT_SPAN:
        est = Fraction(q_last, q_last + 1)
        for q in qs:
            q = int(q)
            est *= Fraction(q * q - 1, q * q)
        bound = Fraction(q_k - 1, q_k)
        return TailBound(float(est), float(bound), est >= bound)
    qf = qs.astype(np.float64)
    est = float(np.prod(1.0 - 1.0 / (qf * qf))) * (q_last / (q_last + 1))
    bound = 1.0 - 1.0 / q_k
    return TailBound(est, bound, est >= bound)


def progression_hit_density(M, r, progressions, n):
    """Share of ``k <= n`` with ``k*M + r`` in a union of progressions.

    Each progression ``(p_j, r_j)`` stands for ``{k*p_j + r_j : k >= 0}``.
    Returns ``(empirical, bound)`` where the bound is ``sum_j gcd(p_j, M) / p_j``.
    """
    M = check_positive_int(M, "M")
    n = check_positive_int(n, "n")
    if r < 0:
        raise ValueError("r must be nonnegative")
    if not progressions:
        return Fraction(0), Fraction(0)
    values = np.arange(1, n + 1, dtype=np.int64) * M + r
    hit = np.zeros(n, dtype=bool)
    bound = Fraction(0)
    for p, rj in progressions:
        p = check_positive_int(p, "p_j")
        if rj < 0:
            raise ValueError("progression offsets must be nonnegative")
        hit |= (values >= rj) & ((values - rj) % p == 0)
        bound += Fraction(math.gcd(p, M), p)
    return Fraction(int(hit.sum()), n), bound


def density_independence_check(periods, residues):
    """Exact test that progressions with coprime periods are independent.

    Scans one full period ``prod p_i`` and compares the density of the
    intersection with ``prod 1/p_i``.
    """
    periods = [check_positive_int(p, "period") for p in periods]
    if len(periods) != len(residues):
        raise ValueError("need one residue per period")
    for i, a in enumerate(periods):
        for b in periods[i + 1 :]:
            if math.gcd(a, b) != 1:
                raise ValueError(f"periods {a} and {b} are not coprime")
    total = math.prod(periods)
    # scan the first progression only; the others are membership tests
    first = periods[0]
    start = (residues[0] - 1) % first + 1
    candidates = np.arange(start, total + 1, first, dtype=np.int64)
    mask = np.ones(candidates.size, dtype=bool)
    for p, res in zip(periods[1:], residues[1:]):
        mask &= candidates % p == res % p
    density = Fraction(int(mask.sum()), total)
    expected = Fraction(1, total)
    return density == expected
