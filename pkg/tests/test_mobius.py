import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import mu_trial
from toeplitz_sarnak.mobius import (
    density_independence_check,
    mobius_sieve,
    periodic_correlation,
    primes_upto,
    progression_hit_density,
    squarefree_density,
    tail_product_bound,
)


def test_first_values():
    t = mobius_sieve(12)
    assert [t[n] for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


def test_matches_trial_division_to_10k():
    t = mobius_sieve(10**4, segment_size=997)
    ref = np.array([mu_trial(n) for n in range(1, 10**4 + 1)])
    assert np.array_equal(t.symbols(), ref)


def test_segments_and_threads_do_not_change_values():
    a = mobius_sieve(50_000).values
    b = mobius_sieve(50_000, segment_size=1234, n_jobs=4).values
    assert np.array_equal(a, b)


def test_divisor_sum_identity():
    # sum_{d | n} mu(d) is 1 for n = 1 and 0 otherwise
    t = mobius_sieve(3000)
    acc = np.zeros(3001, dtype=np.int64)
    for d in range(1, 3001):
        acc[d::d] += t[d]
    assert acc[1] == 1 and not acc[2:].any()


def test_mertens_and_density(derived):
    t = mobius_sieve(10**6)
    assert t.mertens(10**6) == derived["mertens_1e6"]
    assert squarefree_density(t, 10**6) == Fraction(derived["squarefree_1e6"])


def test_table_bounds():
    t = mobius_sieve(10)
    with pytest.raises(IndexError):
        t[11]
    with pytest.raises(ValueError):
        t.symbols(11)
    with pytest.raises(ValueError):
        mobius_sieve(0)


def test_primes():
    assert primes_upto(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_upto(1).size == 0


def test_periodic_correlation_constant_pattern_is_mertens_average():
    t = mobius_sieve(1000)
    s = periodic_correlation(t, [1], 1000, [10, 1000])
    assert s.at(1000) == t.mertens(1000) / 1000


def test_tail_product_first_levels():
    r = tail_product_bound(1)
    assert r.holds and abs(r.lower_estimate - 6 / math.pi**2) < 1e-5
    assert r.bound == 0.5
    assert tail_product_bound(2).holds


def test_tail_product_needs_enough_primes():
    with pytest.raises(ValueError):
        tail_product_bound(10, n_partial=5)


def test_progression_density_examples():
    assert progression_hit_density(6, 0, [(2, 1)], 100) == (0, 1)
    assert progression_hit_density(5, 1, [], 10) == (0, 0)
    emp, bound = progression_hit_density(1, 0, [(3, 0)], 99)
    assert emp == Fraction(1, 3) and bound == Fraction(1, 3)


@settings(max_examples=30, deadline=None)
@given(
    st.integers(1, 60),
    st.integers(0, 60),
    st.lists(st.tuples(st.integers(2, 40), st.integers(0, 40)), min_size=1, max_size=6),
)
def test_progression_density_below_bound(M, r, progs):
    # over whole periods of lcm the density never exceeds the gcd bound
    n = math.lcm(*[p for p, _ in progs]) * 4
    emp, bound = progression_hit_density(M, r, progs, n)
    assert emp <= bound + Fraction(max(rj for _, rj in progs) + 1, n)


def test_independence_examples():
    assert density_independence_check([4, 9], [1, 2])
    assert density_independence_check([3, 5, 7], [0, 1, 2])
    with pytest.raises(ValueError):
        density_independence_check([4, 6], [0, 0])


@given(st.integers(2, 40), st.integers(2, 40), st.integers(0, 100), st.integers(0, 100))
def test_independence_property(a, b, ra, rb):
    if math.gcd(a, b) != 1:
        return
    assert density_independence_check([a, b], [ra, rb])
