"""Periodic and aperiodic parts, their densities and the regularity defect."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._validation import check_positive_int, check_symbols
from .builder import ConstructionError, PartialFilling


def periodic_part(x, p, mode="declared"):
    """Positions ``n`` (1-based) with ``x(n) = x(n + m p)`` for every ``m``.

    ``declared`` reads the construction: the cells placed by steps whose
    period divides ``p``.  ``empirical`` compares symbols inside the window,
    so it can only add accidental repetitions to the declared set.
    """
    p = check_positive_int(p, "p")
    if mode == "declared":
        if not isinstance(x, PartialFilling):
            raise TypeError("declared mode needs a PartialFilling")
        periods = x.periods
        steps = np.flatnonzero((periods > 0) & (p % np.where(periods > 0, periods, 1) == 0)) + 1
        return np.flatnonzero(np.isin(x.step, steps)) + 1
    if mode != "empirical":
        raise ValueError(f"unknown mode {mode!r}")
    if isinstance(x, PartialFilling):
        # unfilled cells get distinct sentinels so they never match anything
        values = x.symbol.copy()
        free = np.flatnonzero(~x.filled)
        values[free] = values.min(initial=0) - 1 - np.arange(free.size)
    else:
        values = check_symbols(x)
    n = values.size
    if p >= n:
        raise ValueError(f"period {p} leaves no repetition inside a window of {n}")
    keep = np.zeros(n, dtype=bool)
    for r in range(p):
        column = values[r::p]
        if np.all(column == column[0]):
            keep[r::p] = True
    return np.flatnonzero(keep) + 1


def aperiodic_part(filling, max_period=None):
    """Cells outside every declared periodic part.

    By default every filled cell counts as periodic (its own step period), so
    only unfilled cells remain.  With ``max_period`` only steps whose period
    is at most that value count, which is how the window sees the
    construction.
    """
    if max_period is None:
        return filling.unfilled_positions()
    periods = filling.periods
    ok = np.flatnonzero((periods > 0) & (periods <= max_period)) + 1
    return np.flatnonzero(~np.isin(filling.step, ok)) + 1


def aperiodic_readout(x, aper):
    """Symbols of ``x`` read along the aperiodic positions, in increasing order."""
    aper = np.asarray(aper, dtype=np.int64)
    if aper.size == 0:
        return np.zeros(0, dtype=np.int64)
    if np.any(np.diff(aper) <= 0):
        raise ValueError("aperiodic positions must be strictly increasing")
    if isinstance(x, PartialFilling):
        if not np.all(x.filled[aper - 1]):
            raise ConstructionError("aperiodic positions include unfilled cells")
        return x.symbol[aper - 1].copy()
    return check_symbols(x)[aper - 1].copy()


@dataclass
class DensityReport:
    subject: str
    window: int
    full_period: int  # densities are exact counts on [1, full_period]
    levels: list = field(default_factory=list)  # (k, p_k, dens Per_{p_k})
    step_densities: list = field(default_factory=list)
    defect: Fraction = Fraction(1)
    unfilled_density: Fraction = Fraction(0)
    banach_length: int | None = None
    banach_max: float | None = None
    banach_min: float | None = None

    @property
    def remainder(self):
        return self.window - self.full_period

    def to_text(self):
        lines = [
            f"subject={self.subject}",
            f"window={self.window}",
            f"full_period={self.full_period}",
            f"remainder={self.remainder}",
            f"defect={self.defect}",
            f"defect_float={float(self.defect):.12g}",
            f"unfilled_density={self.unfilled_density}",
        ]
        for k, p, dens in self.levels:
            lines.append(f"per[{k}]: p={p} density={dens}")
        if self.banach_length is not None:
            lines.append(f"banach_length={self.banach_length}")
            lines.append(f"banach_max={self.banach_max:.12g}")
            lines.append(f"banach_min={self.banach_min:.12g}")
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "p_k", "density", "density_float"])
        for k, p, dens in self.levels:
            writer.writerow([k, p, str(dens), f"{float(dens):.12g}"])
        return buf.getvalue()


def regularity_defect(filling, banach_length=None, subject=None):
    """Exact densities of the declared periodic parts and ``d = 1 - sup``.

    Counts are taken on the longest prefix that is a whole number of periods
    of the deepest in-window step, so each density is exact.
    """
    periods = filling.periods
    in_window = np.flatnonzero(periods > 0)
    if in_window.size:
        top = int(periods[in_window].max())
        L = (filling.window // top) * top
    else:
        L = filling.window
    steps = filling.step[:L]
    counts = np.bincount(steps, minlength=filling.n_steps + 1)
    report = DensityReport(
        subject=subject or filling.kind,
        window=filling.window,
        full_period=L,
    )
    total = Fraction(0)
    level = 0
    for k0 in in_window:
        k = int(k0) + 1
        dens = Fraction(int(counts[k]), L)
        report.step_densities.append((k, int(periods[k0]), dens))
        total += dens
        level += 1
        report.levels.append((level, int(periods[k0]), total))
    report.defect = 1 - total
    report.unfilled_density = Fraction(int(counts[0]), L)
    if banach_length is not None:
        b = check_positive_int(banach_length, "banach_length")
        if b > filling.window:
            raise ValueError("banach_length exceeds the window")
        periodic = np.isin(filling.step, in_window + 1).astype(np.int64)
        c = np.concatenate([[0], np.cumsum(periodic)])
        sums = c[b:] - c[:-b]
        report.banach_length = b
        report.banach_max = float(sums.max()) / b
        report.banach_min = float(sums.min()) / b
    return report
