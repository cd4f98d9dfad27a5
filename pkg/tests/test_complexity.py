from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import NaiveReadout, naive_census, naive_claim_indices, periods_of
from toeplitz_sarnak.builder import build_sparse_readout, build_readout, initial_indicator
from toeplitz_sarnak.complexity import (
    block_census,
    block_zero_frequencies,
    census_csv,
    claim_profile,
    entropy_contrast,
    find_claim_indices,
    sparse_pattern_search,
    verify_replacement,
    verify_zero_frequency,
    zero_frequency_formula,
)
from toeplitz_sarnak.odometer import parse_scale


def readout(spec, window):
    s = parse_scale(spec, bound=window)
    return build_readout(np.zeros(window, dtype=np.int64), s, window)


def test_census_constant_and_full():
    assert block_census(np.zeros(100, dtype=np.int64), 5).count == 1
    x = np.array([0, 0, 0, 1, 1, 1, 0, 1, 0, 0])
    assert block_census(x, 3).count == 8


def test_census_too_long_block():
    with pytest.raises(ValueError):
        block_census([0, 1], 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-1, 2), min_size=1, max_size=300), st.integers(1, 12))
def test_census_matches_oracle(xs, n):
    if n > len(xs):
        return
    assert block_census(np.array(xs), n).count == naive_census(xs, n)


def test_fingerprint_path_matches_oracle():
    rng = np.random.default_rng(3)
    x = rng.integers(0, 5, 4000)
    r = block_census(x, 40)  # 5**40 does not fit in 64 bits
    assert r.method == "fingerprint"
    assert r.count == naive_census(x.tolist(), 40)


def test_zero_cap_filter():
    x = np.array([0, 0, 0, 1, 0, 1, 1, 1])
    kept = [tuple(x[i : i + 3]) for i in range(6) if (x[i : i + 3] == 0).sum() <= 1]
    assert block_census(x, 3, zero_cap=1 / 3).count == len(set(kept))


def test_threaded_census_agrees():
    x = np.random.default_rng(0).integers(0, 2, 1 << 21)
    assert block_census(x, 18, n_jobs=4).count == block_census(x, 18).count


def test_entropy_estimate_and_csv():
    r = block_census(np.array([0, 1, 1, 0, 0, 1, 0, 1]), 2)
    assert r.entropy_estimate == 1.0
    assert census_csv([r]).splitlines() == ["n,count,entropy_estimate", "2,4,1"]


def test_zero_frequency_examples():
    f = readout("3^k", 81)
    assert verify_zero_frequency(f, 3) == (Fraction(10, 27), Fraction(10, 27), True)
    assert verify_zero_frequency(f, 1)[0] == 0
    g = readout("10^k", 1000)
    assert verify_zero_frequency(g, 2)[1] == Fraction(9, 100)


def test_zero_frequency_frozen_counts(derived):
    f = readout("3^k", 3**9)
    for p, zeros in derived["z_3k_zero_counts"].items():
        k = len(str(int(p))) and int(round(np.log(int(p)) / np.log(3)))
        assert verify_zero_frequency(f, k)[0] == Fraction(zeros, int(p))


def test_zero_frequency_rises_towards_rho():
    s = parse_scale("3^k", bound=3**12)
    vals = [zero_frequency_formula(s, k) for k in range(1, 12)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < Fraction(1, 2)


def test_replacement_examples():
    f = readout("3^k", 81)
    assert verify_replacement(f, 2, 8)
    assert verify_replacement(f, 1, 26)
    with pytest.raises(ValueError):
        verify_replacement(f, 2, 9)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["3^k", "4^k", "3*2^k", "5*5^k"]), st.integers(1, 4))
def test_block_zero_frequency_never_below_first(spec, k):
    f = readout(spec, 4000)
    pk = f.scale.period(k)
    if pk is None or pk > 2000:
        return
    freqs = block_zero_frequencies(f, k)
    assert all(v >= freqs[0] for v in freqs)
    assert verify_replacement(f, k, len(freqs) - 1)


def test_sparse_pattern_examples():
    z = initial_indicator(readout("3^k", 10**4))
    assert sparse_pattern_search(z, 1) == 12
    assert sparse_pattern_search(np.ones(50, dtype=np.int8), 1) is None
    w = 30000
    s = parse_scale(",".join(str(3 * 2**j) for j in range(15)), bound=w)
    z2 = initial_indicator(build_readout(np.zeros(w, dtype=np.int64), s, w))
    pos = sparse_pattern_search(z2, 2)
    assert pos == 6168
    assert sparse_pattern_search(z2, 1) <= pos


@given(st.lists(st.integers(0, 1), min_size=1, max_size=200), st.integers(1, 4))
def test_sparse_pattern_monotone(zs, m):
    z = np.array(zs)
    hi = sparse_pattern_search(z, m + 1)
    lo = sparse_pattern_search(z, m)
    if hi is not None:
        assert lo is not None and lo <= hi
    if lo is not None:
        ones = np.flatnonzero(z) + 1
        i = int(np.searchsorted(ones, lo))
        picked = ones[i : i + m]
        assert picked.size == m
        gaps = np.diff(np.concatenate([[0], picked, [z.size + 1]])) - 1
        assert np.all(gaps >= m)


def test_claim_indices_frozen(derived):
    s = parse_scale("3^k", bound=10**6)
    with pytest.warns(UserWarning):
        ks = find_claim_indices(s, 5, 10**6)
    assert ks == derived["claim_3k_1e6"]
    assert ks[0] == 1
    assert all(b > a + m for m, (a, b) in enumerate(zip(ks, ks[1:]), start=1))
    t = parse_scale("10^k", bound=10**5)
    with pytest.warns(UserWarning):
        assert find_claim_indices(t, 3, 10**5) == derived["claim_10k_1e5"]


@pytest.mark.parametrize("spec,window", [("3^k", 2000), ("4^k", 3000), ("5*2^k", 2500)])
def test_claim_profile_matches_oracle(spec, window):
    prof = claim_profile(parse_scale(spec, bound=window), window)
    _, ref = naive_claim_indices(periods_of(spec, window), window, 1, 10**9)
    assert prof.tolist() == ref


def test_entropy_contrast(derived):
    s = parse_scale("3^k", bound=10**6)
    y, f, _ = build_sparse_readout(s, 10**6, 4)
    c = entropy_contrast(y, f, lengths=[1, 4, 8, 12])
    assert c.census_x == [derived["words_census_x"][k] for k in ("1", "4", "8", "12")]
    assert c.ratio_x[-1] < c.ratio_x[1]
    assert set(np.unique(f.symbols())) <= {0, 1}
    assert c.to_text().startswith("n,census_y,census_x,ratio_x")
