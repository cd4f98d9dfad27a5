"""Block census, entropy estimates and the combinatorics of the initial pattern.

The initial pattern ``z`` of a readout filling marks the first placement of
every ``y_k``.  Functions here check the zero frequency of ``z[1, p_k]``, the
replacement property of the blocks ``z[j p_k + 1, (j + 1) p_k]``, search for
sparse patterns of isolated ones, and locate the steps ``k_m`` at which the
filling starts with ``m`` shrinking filled runs.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._validation import check_positive_int, check_symbols
from .builder import UNFILLED, ReadoutEngine, initial_indicator

_MASK64 = (1 << 64) - 1


@dataclass
class CensusReport:
    n: int
    count: int
    prefix_length: int
    zero_cap: float | None = None
    method: str = "packed"

    @property
    def entropy_estimate(self):
        """``log2(count) / n`` in bits per symbol."""
        return math.log2(self.count) / self.n if self.count else 0.0


def census_csv(reports):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "count", "entropy_estimate"])
    for r in reports:
        writer.writerow([r.n, r.count, f"{r.entropy_estimate:.12g}"])
    return buf.getvalue()


def _window_codes(idx, n, base):
    """Exact base-``base`` code of every length-``n`` window (fits in uint64)."""
    m = idx.size - n + 1
    codes = np.zeros(m, dtype=np.uint64)
    b = np.uint64(base)
    for t in range(n):
        codes *= b
        codes += idx[t : t + m]
    return codes


def _window_hashes(idx, n, seed):
    # polynomial hash mod 2**64 with a random odd multiplier; audited later
    rng = np.random.default_rng(seed)
    mult = np.uint64(int(rng.integers(1 << 62)) * 2 + 1)
    m = idx.size - n + 1
    h = np.zeros(m, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for t in range(n):
            h *= mult
            h += idx[t : t + m] + np.uint64(1)
    return h


def _distinct(codes, n_jobs):
    if n_jobs == 1 or codes.size < 1 << 20:
        return np.unique(codes)
    shards = np.array_split(codes, n_jobs)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        parts = list(pool.map(np.unique, shards))
    return np.unique(np.concatenate(parts))


def block_census(x, n, zero_cap=None, n_jobs=1, audit=4096, seed=0):
    """Number of distinct length-``n`` blocks in ``x``.

    Blocks are packed exactly into 64-bit codes when ``|alphabet|**n``
    allows it.  Otherwise a 64-bit polynomial fingerprint is used; a sample of
    ``audit`` windows is compared symbol by symbol with the first window of
    the same fingerprint, and any collision triggers an exact recount.
    ``zero_cap`` keeps only blocks whose share of zeros is at most the cap.
    """
    x = check_symbols(x)
    n = check_positive_int(n, "n")
    if n > x.size:
        raise ValueError(f"block length {n} exceeds prefix length {x.size}")
    alphabet, idx = np.unique(x, return_inverse=True)
    idx = idx.astype(np.uint64)
    base = max(int(alphabet.size), 2)
    mask = None
    if zero_cap is not None:
        zeros = np.concatenate([[0], np.cumsum(x == 0, dtype=np.int64)])
        zcount = zeros[n:] - zeros[:-n]
        mask = zcount <= zero_cap * n + 1e-12
    if n * math.log2(base) <= 64:
        codes = _window_codes(idx, n, base)
        method = "packed"
    else:
        codes = _window_hashes(idx, n, seed)
        method = "fingerprint"
    if mask is not None:
        positions = np.flatnonzero(mask)
        codes = codes[mask]
    else:
        positions = None
    distinct = _distinct(codes, n_jobs)
    if method == "fingerprint" and codes.size:
        if _collision_found(x, n, codes, positions, audit, seed):
            method = "exact-fallback"
            starts = positions if positions is not None else range(x.size - n + 1)
            distinct = {x[i : i + n].tobytes() for i in starts}
            return CensusReport(n, len(distinct), int(x.size), zero_cap, method)
    return CensusReport(n, int(distinct.size), int(x.size), zero_cap, method)


def _collision_found(x, n, codes, positions, audit, seed):
    _, first = np.unique(codes, return_index=True)
    lookup = dict(zip(codes[first].tolist(), first.tolist()))
    rng = np.random.default_rng(seed + 1)
    picks = rng.choice(codes.size, size=min(audit, codes.size), replace=False)
    for i in picks:
        j = lookup[int(codes[i])]
        a = i if positions is None else positions[i]
        b = j if positions is None else positions[j]
        if not np.array_equal(x[a : a + n], x[b : b + n]):
            return True
    return False


# -- the initial pattern z ------------------------------------------------------------


def _z_and_scale(filling):
    if filling.kind != "readout":
        raise ValueError("expected a readout filling")
    return initial_indicator(filling), filling.scale


def zero_frequency_formula(scale, k):
    """``sum_{k'<k} 1/p_{k'} - (k - 1)/p_k``."""
    pk = scale.period(k)
    return sum((Fraction(1, scale.period(j)) for j in range(1, k)), Fraction(0)) - Fraction(
        k - 1, pk
    )


def verify_zero_frequency(filling, k):
    """Zero frequency of ``z[1, p_k]`` against the closed formula (exact)."""
    z, scale = _z_and_scale(filling)
    pk = scale.period(k)
    if pk is None or pk > z.size:
        raise ValueError(f"p_{k} exceeds the window {z.size}")
    measured = Fraction(int(pk - z[:pk].sum()), pk)
    formula = zero_frequency_formula(scale, k)
    return measured, formula, measured == formula


def verify_replacement(filling, k, j_max):
    """True iff every zero of ``z[1, p_k]`` is a zero of each ``z[j p_k + 1, (j+1) p_k]``."""
    z, scale = _z_and_scale(filling)
    pk = scale.period(k)
    if pk is None or (j_max + 1) * pk > z.size:
        raise ValueError(f"(j_max + 1) p_{k} exceeds the window {z.size}")
    blocks = z[: (j_max + 1) * pk].reshape(j_max + 1, pk)
    zeros0 = blocks[0] == 0
    return bool(np.all(blocks[1:, zeros0] == 0))


def block_zero_frequencies(filling, k):
    """Zero frequency of each full block ``z[j p_k + 1, (j+1) p_k]`` in the window."""
    z, scale = _z_and_scale(filling)
    pk = scale.period(k)
    nb = z.size // pk
    blocks = z[: nb * pk].reshape(nb, pk)
    return [Fraction(int(pk - b.sum()), pk) for b in blocks]


def sparse_pattern_search(z, m):
    """First position of ``m`` isolated ones with at least ``m`` zeros around each.

    Returns the 1-based position of the first of those ones, or ``None``.
    """
    m = check_positive_int(m, "m")
    z = check_symbols(z)
    ones = np.flatnonzero(z != 0)
    if ones.size < m:
        return None
    # zeros before each one (to the previous one or the window start) and after
    before = np.diff(np.concatenate([[-1], ones])) - 1
    after = np.diff(np.concatenate([ones, [z.size]])) - 1
    good = (before >= m) & (after >= m)
    if m == 1:
        hits = np.flatnonzero(good)
    else:
        run = np.convolve(good.astype(np.int64), np.ones(m, dtype=np.int64), mode="valid")
        hits = np.flatnonzero(run == m)
    return int(ones[hits[0]]) + 1 if hits.size else None


# -- configuration C and the steps k_m --------------------------------------------------


def _runs_after_frontier(step, frontier, window):
    """Count the shrinking runs after the frontier; see :func:`claim_profile`."""
    m = 1
    prev = frontier - 1
    pos = frontier + 1  # cell after the first hole
    while True:
        start = pos
        while pos <= window and step[pos - 1] != UNFILLED:
            pos += 1
        length = pos - start
        if pos > window or length == 0 or length >= prev:
            return m
        m += 1
        prev = length
        pos += 1


def claim_profile(scale, window):
    """Number of runs of the pattern C present after each readout step.

    Entry ``k - 1`` is 0 unless, after step ``k``, the window starts with a
    filled block ending at the initial cell of step ``k`` followed by a free
    cell.  Otherwise it is the number ``m`` of filled runs of strictly
    decreasing lengths, each followed by a single free cell (the last free
    cell may be followed by more).  A run touching the window end is not
    counted.
    """
    engine = ReadoutEngine(scale, window)
    profile = []
    while engine.periodic_phase:
        n_k = engine.step(0)
        f = engine._advance()
        if f > window or f != n_k + 1:
            profile.append(0)
        else:
            profile.append(_runs_after_frontier(engine.filling.step, f, window))
    holes = engine.filling.unfilled_positions()
    if holes.size == 0:
        return np.asarray(profile, dtype=np.int64)
    # from here on step k fills holes[i] only; runs are the gaps between holes
    gaps = np.diff(holes) - 1
    dec = np.zeros(gaps.size + 1, dtype=np.int64)
    for j in range(gaps.size - 1, -1, -1):
        g = gaps[j]
        if g <= 0:
            continue
        nxt = gaps[j + 1] if j + 1 < gaps.size else 0
        dec[j] = 1 + (dec[j + 1] if 0 < nxt < g else 0)
    tail = np.zeros(holes.size, dtype=np.int64)
    for i in range(holes.size - 1):
        if gaps[i] != 0:
            continue
        m = 1
        if i + 1 < gaps.size and 0 < gaps[i + 1] < holes[i]:
            m += dec[i + 1]
        tail[i] = m
    return np.concatenate([np.asarray(profile, dtype=np.int64), tail])


def find_claim_indices(scale, m_max, window):
    """Steps ``k_1 < k_2 < ...`` at which the pattern C has at least ``m`` runs.

    ``k_m`` is the first step beyond ``k_{m-1} + m - 1`` with at least ``m``
    runs, which enforces ``k_{m+1} > k_m + m``.  If the window runs out the
    partial list is returned with a warning.
    """
    m_max = check_positive_int(m_max, "m_max")
    profile = claim_profile(scale, window)
    found = []
    lo = 0
    for m in range(1, m_max + 1):
        hits = np.flatnonzero(profile[lo:] >= m)
        if hits.size == 0:
            warnings.warn(
                f"window {window} exhibits the pattern C only up to m={len(found)}; "
                f"k_{m} needs a longer window",
                stacklevel=2,
            )
            break
        k = lo + int(hits[0]) + 1
        found.append(k)
        lo = k + m  # next index must exceed k_m + m
    return found


@dataclass
class EntropyContrast:
    lengths: list
    census_y: list
    census_x: list

    @property
    def ratio_x(self):
        return [c / 2**n for n, c in zip(self.lengths, self.census_x)]

    def to_text(self):
        rows = ["n,census_y,census_x,ratio_x"]
        for n, cy, cx, r in zip(self.lengths, self.census_y, self.census_x, self.ratio_x):
            rows.append(f"{n},{cy},{cx},{r:.6g}")
        return "\n".join(rows) + "\n"


def entropy_contrast(y, filling, lengths=range(1, 13), y_prefix=None):
    """Block counts of ``y`` and of its readout sequence at the same lengths.

    ``y_prefix`` limits the census of ``y`` (default: the whole ``y``).
    """
    y = np.asarray(y)
    if y_prefix is not None:
        y = y[:y_prefix]
    x = filling.symbols()
    lengths = list(lengths)
    cy = [block_census(y, n).count if n <= y.size else 0 for n in lengths]
    cx = [block_census(x, n).count for n in lengths]
    return EntropyContrast(lengths, cy, cx)
