import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import NaiveReadout, naive_block_scheme, periods_of
from toeplitz_sarnak.builder import (
    ConstructionError,
    PartialFilling,
    block_lengths,
    build_block_scheme,
    build_sparse_readout,
    build_readout,
    initial_indicator,
    mobius_fill,
    schedule_ones,
    shortlex_blocks,
)
from toeplitz_sarnak.mobius import mobius_sieve
from toeplitz_sarnak.odometer import parse_scale

B1 = [0, 1, 0, 0]
B2 = [0, 0, 0, 1, 0, 0, 0, 0, 0]


def test_first_block_prefix(derived):
    f = build_block_scheme([7], [B1], 74)
    assert f.render() == derived["block_7"]
    assert f.record(1).period == 7


def test_second_block_prefix(derived):
    f = build_block_scheme([7, 6], [B1, B2], 67)
    assert f.render() == derived["block_42"]
    assert f.render(length=42).count("*") == 9


def test_block_lengths():
    lengths, Q = block_lengths([7, 6], [4, 3])
    assert lengths == [4, 9] and Q == [1, 3, 9]
    with pytest.raises(ConstructionError):
        block_lengths([7], [7])


def test_block_length_must_be_multiple_of_free_count():
    with pytest.raises(ConstructionError):
        build_block_scheme([7, 6], [B1, [0, 1]], 100)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(3, 6), st.integers(1, 2)), min_size=1, max_size=4), st.integers(1, 3))
def test_block_scheme_matches_oracle(params, reps):
    qs = [q for q, _ in params]
    rs = [min(r, q - 1) for q, r in params]
    blocks = schedule_ones(qs, rs)
    window = int(np.prod(qs)) * reps
    got = build_block_scheme(qs, blocks, window).render()
    assert got == naive_block_scheme(qs, blocks, window)


def test_unfilled_density_is_the_product():
    qs, rs = [5, 4, 3], [2, 1, 1]
    f = build_block_scheme(qs, schedule_ones(qs, rs), 60 * 5)
    free = len(f.unfilled_positions()) / f.window
    assert free == pytest.approx((3 / 5) * (3 / 4) * (2 / 3))


def test_schedule_ones_single_one_per_block():
    blocks = schedule_ones([7, 6, 6, 6], [4, 5, 5, 5])
    assert all(int(b.sum()) == 1 for b in blocks)
    assert blocks[0][0] == 1


def test_readout_diagram_positions():
    s = parse_scale("3^k", bound=35)
    f = build_readout(np.arange(1, 36), s, 35)
    assert f.first_positions[:6].tolist() == [1, 2, 3, 5, 6, 8]
    assert f.symbols()[:12].tolist() == [1, 2, 3, 1, 4, 5, 1, 6, 7, 1, 2, 8]


def test_initial_indicator_prefix(derived):
    s = parse_scale("3^k", bound=3**9)
    f = build_readout(np.zeros(3**9, dtype=np.int64), s, 3**9)
    z = initial_indicator(f)
    assert z[:12].tolist() == [1, 1, 1, 0, 1, 1, 0, 1, 1, 0, 0, 1]
    assert int((z[:27] == 0).sum()) == 10
    assert (np.flatnonzero(z[:59]) + 1)[:20].tolist() == derived["z_3k_first_positions"]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["3^k", "4^k", "5*2^k", "3*3^k", "6,12,36,72,144,720"]), st.integers(10, 600))
def test_readout_matches_oracle(spec, window):
    s = parse_scale(spec, bound=window)
    f = build_readout(np.arange(window) + 1, s, window)
    ref = NaiveReadout(periods_of(spec, window), window).run()
    assert f.step.tolist() == [ref.cell[i][0] for i in range(1, window + 1)]
    assert f.initial.tolist() == [ref.cell[i][1] for i in range(1, window + 1)]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["3^k", "10^k", "4*2^k"]), st.integers(50, 3000))
def test_readout_invariants(spec, window):
    s = parse_scale(spec, bound=window)
    f = build_readout(np.zeros(window, dtype=np.int64), s, window)
    assert f.is_complete
    # every in-window step occupies its progression and nothing else
    for rec in f.records[:10]:
        if rec.period is None:
            assert rec.cells == 1
            continue
        cells = np.flatnonzero(f.step == rec.step) + 1
        assert np.all(np.diff(cells) == rec.period)
        assert cells[0] == rec.first_position <= rec.period
    # first positions increase
    assert np.all(np.diff(f.first_positions) > 0)


def test_place_refuses_overwrite():
    f = PartialFilling(10)
    f.place([1, 4, 7], [1, 1, 1], period=3)
    with pytest.raises(ConstructionError):
        f.place([4], [0])
    with pytest.raises(ConstructionError):
        f.symbols()


def test_readout_needs_p1_at_least_3():
    with pytest.raises((ConstructionError, ValueError)):
        build_readout(np.zeros(20, dtype=np.int64), parse_scale("2^k", bound=20), 20)


def test_mobius_fill_initials_carry_mu():
    n = 10**4
    t = mobius_sieve(n)
    f = mobius_fill(parse_scale("3^k", bound=n), n, t)
    x = f.symbols()
    assert x[:4].tolist() == [1, -1, -1, 1]
    assert np.array_equal(x[f.initial], t.symbols()[f.initial])


def test_shortlex_stream():
    it = shortlex_blocks()
    assert [next(it) for _ in range(10)] == [0, 1, 0, 0, 0, 1, 1, 0, 1, 1]


def test_sparse_readout_places_blocks(derived):
    s = parse_scale("3^k", bound=10**6)
    y, f, ks = build_sparse_readout(s, 10**6, 4)
    assert ks == derived["claim_3k_1e6"]
    assert y[ks[1] : ks[1] + 2].tolist() == [1, 0]
    assert int(y.sum()) == 5
    with pytest.raises(ConstructionError):
        with pytest.warns(UserWarning):
            build_sparse_readout(parse_scale("3^k", bound=10**4), 10**4, 5)
