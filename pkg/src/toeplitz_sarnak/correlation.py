"""Cesaro correlations ``A_n = (1/n) sum_{i<=n} xi(i) conj(eta(i))``."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from ._validation import check_positive_int, check_symbols

SQUAREFREE_DENSITY = 6 / math.pi**2


def sample_schedule(schedule, n):
    """Sample points ``<= n``: ``"geometric"`` (1, 2, 4, ..., n), ``"all"``, or a list."""
    if isinstance(schedule, str):
        if schedule == "geometric":
            pts = [1 << j for j in range(n.bit_length()) if (1 << j) <= n]
            if pts[-1] != n:
                pts.append(n)
            return np.asarray(pts, dtype=np.int64)
        if schedule == "all":
            return np.arange(1, n + 1, dtype=np.int64)
        raise ValueError(f"unknown schedule {schedule!r}")
    pts = np.asarray(sorted(set(int(s) for s in schedule)), dtype=np.int64)
    if pts.size == 0 or pts[0] < 1:
        raise ValueError("sample points must be positive")
    if pts[-1] > n:
        raise ValueError(f"sample point {pts[-1]} beyond available length {n}")
    return pts


@dataclass
class CorrelationSeries:
    samples: np.ndarray
    averages: list  # float, complex or Fraction per sample point
    tail_fraction: float = 0.5

    def __len__(self):
        return len(self.samples)

    @property
    def last(self):
        return self.averages[-1]

    def at(self, n):
        idx = np.flatnonzero(self.samples == n)
        if idx.size == 0:
            raise KeyError(f"{n} is not a sample point")
        return self.averages[int(idx[0])]

    def _tail(self):
        start = int(len(self.samples) * (1 - self.tail_fraction))
        return self.averages[min(start, len(self.averages) - 1) :]

    @property
    def tail_min(self):
        tail = self._tail()
        return min(tail, key=abs) if isinstance(tail[0], complex) else min(tail)

    @property
    def tail_max(self):
        tail = self._tail()
        return max(tail, key=abs) if isinstance(tail[0], complex) else max(tail)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "A_n"])
        for n, a in zip(self.samples, self.averages):
            writer.writerow([int(n), _fmt(a)])
        return buf.getvalue()


def _fmt(a):
    if isinstance(a, Fraction):
        return str(a)
    if isinstance(a, complex):
        return f"{a.real:.15g}{a.imag:+.15g}j"
    return f"{a:.15g}"


def correlate(xi, eta, schedule="geometric", rational=False):
    """Stream ``A_n`` at the sample points in one pass.

    Integer inputs accumulate exactly in int64.  Real or complex inputs are
    summed with ``math.fsum`` segment by segment, so every partial sum is
    correctly rounded.  ``rational=True`` returns :class:`Fraction` values.
    """
    xi = check_symbols(xi, "xi")
    eta = check_symbols(eta, "eta")
    n = min(xi.size, eta.size)
    pts = sample_schedule(schedule, n)
    if xi.size != eta.size and pts[-1] > n:
        raise ValueError("sequences too short for the schedule")
    m = int(pts[-1])
    xi, eta = xi[:m], eta[:m]
    if rational:
        if m > 10**5 and xi.dtype.kind not in "iub":
            raise ValueError("rational mode is limited to 10**5 non-integer terms")
        prod = [Fraction(a) * Fraction(b) for a, b in zip(xi.tolist(), np.conj(eta).tolist())]
        out, s, prev = [], Fraction(0), 0
        for p in pts:
            s += sum(prod[prev:p], Fraction(0))
            prev = int(p)
            out.append(s / int(p))
        return CorrelationSeries(pts, out)
    if xi.dtype.kind in "iub" and eta.dtype.kind in "iub":
        partial = np.cumsum(xi.astype(np.int64) * eta.astype(np.int64), dtype=np.int64)
        sums = partial[pts - 1]
        return CorrelationSeries(pts, [int(s) / int(p) for s, p in zip(sums, pts)])
    prod = xi * np.conj(eta)
    is_complex = np.iscomplexobj(prod)
    re_parts, im_parts, out, prev = [], [], [], 0
    for p in pts:
        seg = prod[prev:p]
        re_parts.append(math.fsum(seg.real))
        if is_complex:
            im_parts.append(math.fsum(seg.imag))
        prev = int(p)
        re = math.fsum(re_parts)
        out.append(complex(re, math.fsum(im_parts)) / int(p) if is_complex else re / int(p))
    return CorrelationSeries(pts, out)


class StrongCorrelation(NamedTuple):
    average: float
    bound: float
    holds: bool
    rho_interval: tuple


def strong_correlation_bound(scale):
    """``6/pi^2 - 2 rho`` using the upper end of the certified interval for ``rho``.

    Refuses scales with ``rho >= 3/pi^2``, for which the bound is not positive.
    """
    lo, hi = scale.rho_interval()
    if hi >= SQUAREFREE_DENSITY / 2:
        raise ValueError(
            f"rho in [{float(lo):.6g}, {float(hi):.6g}] is not below 3/pi^2; no positive bound"
        )
    return SQUAREFREE_DENSITY - 2 * float(hi), (lo, hi)


def strong_correlation_check(filling, table, n, tolerance=0.0):
    """Correlation of a Moebius-filled readout sequence with ``mu`` at ``n``."""
    n = check_positive_int(n, "n")
    if filling.scale is None:
        raise ValueError("filling carries no scale")
    bound, interval = strong_correlation_bound(filling.scale)
    if n > filling.window or n > table.n_max:
        raise ValueError("n exceeds the filling window or the table")
    series = correlate(filling.symbols()[:n], table.symbols(n), [n])
    avg = float(series.last)
    return StrongCorrelation(avg, bound, avg >= bound - tolerance, interval)


def correlation_split(filling, table, n):
    """``n A_n`` split into initial and repeated cells.

    Returns ``(initial_sum, initial_abs_mu, repeated_sum)``; for a Moebius
    fill the first two agree.
    """
    x = filling.symbols()[:n]
    mu = table.symbols(n).astype(np.int64)
    init = filling.initial[:n]
    prod = x * mu
    return int(prod[init].sum()), int(np.abs(mu[init]).sum()), int(prod[~init].sum())
