"""Scales (divisibility chains of periods) and truncated odometer arithmetic."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ._validation import check_positive_int

# Stand-in for a period that is larger than every window under analysis.
BEYOND = None


class ScaleError(ValueError):
    """Malformed or inconsistent scale."""


class Scale:
    """Increasing chain ``p_1 | p_2 | ...`` of periods.

    The chain is either an explicit finite list or a rule ``c * b**k``.  Rule
    scales are materialized only up to the first period exceeding ``bound``;
    deeper levels report :data:`BEYOND`.
    """

    def __init__(self, periods=None, rule=None, bound=None):
        if (periods is None) == (rule is None):
            raise ScaleError("give exactly one of an explicit period list or a rule")
        self.rule = None
        self.bound = None if bound is None else check_positive_int(bound, "bound")
        if rule is not None:
            c, b = rule
            c = check_positive_int(c, "rule coefficient")
            b = check_positive_int(b, "rule base", minimum=2)
            if self.bound is None:
                raise ScaleError("a rule scale needs a window bound")
            self.rule = (c, b)
            periods = []
            k = 1
            while True:
                p = c * b**k
                periods.append(p)
                if p > self.bound:
                    break
                k += 1
        periods = tuple(int(p) for p in periods)
        if not periods:
            raise ScaleError("scale must have at least one period")
        for p in periods:
            if p < 2:
                raise ScaleError(f"periods must be >= 2, got {p}")
        for a, b in zip(periods, periods[1:]):
            if b <= a:
                raise ScaleError(f"periods must be strictly increasing ({a}, {b})")
            if b % a:
                raise ScaleError(f"{a} does not divide {b}")
        self.periods = periods

    def __repr__(self):
        if self.rule is not None:
            c, b = self.rule
            return f"Scale(rule={c}*{b}^k, bound={self.bound})"
        return f"Scale({list(self.periods)})"

    def __eq__(self, other):
        return (
            isinstance(other, Scale)
            and self.periods == other.periods
            and self.rule == other.rule
            and self.bound == other.bound
        )

    def __hash__(self):
        return hash((self.periods, self.rule, self.bound))

    def __len__(self):
        return len(self.periods)

    @property
    def descriptor(self):
        if self.rule is not None:
            c, b = self.rule
            return f"{b}^k" if c == 1 else f"{c}*{b}^k"
        return ",".join(str(p) for p in self.periods)

    @property
    def open_ended(self):
        """True when every level past the materialized list exceeds the bound."""
        return self.rule is not None or (
            self.bound is not None and self.periods[-1] > self.bound
        )

    def period(self, k):
        """Return ``p_k`` (1-based), or :data:`BEYOND` past the known levels."""
        if k < 1:
            raise IndexError(f"scale levels start at 1, got {k}")
        if k <= len(self.periods):
            return self.periods[k - 1]
        if self.open_ended:
            return BEYOND
        raise ScaleError(
            f"explicit scale has {len(self.periods)} levels and level {k} was requested"
        )

    def q(self, k):
        """Ratio ``p_k / p_{k-1}`` with ``p_0 = 1``."""
        p = self.period(k)
        if p is BEYOND:
            return BEYOND
        return p if k == 1 else p // self.periods[k - 2]

    def periods_upto(self, n):
        return [p for p in self.periods if p <= n]

    def levels_upto(self, n):
        """Number of levels whose period is at most ``n``."""
        return len(self.periods_upto(n))

    def index_of(self, p):
        """1-based level of period ``p``; raises if ``p`` is not in the scale."""
        try:
            return self.periods.index(p) + 1
        except ValueError:
            raise ScaleError(f"{p} is not a period of {self!r}") from None

    def rho(self, upto=None):
        """Exact ``sum 1/p_k`` over known periods (``p_k <= upto`` if given)."""
        ps = self.periods if upto is None else self.periods_upto(upto)
        return sum((Fraction(1, p) for p in ps), Fraction(0))

    def rho_interval(self):
        """Certified enclosure ``(lo, hi)`` of the full series ``sum_k 1/p_k``.

        ``lo`` sums the materialized levels.  The tail uses the geometric rule
        when there is one, else ``p_{k+1} >= 2 p_k``.
        """
        lo = self.rho()
        last = self.periods[-1]
        if self.rule is not None:
            b = self.rule[1]
            tail = Fraction(1, last * (b - 1))
        elif self.open_ended:
            tail = Fraction(1, last)
        else:
            tail = Fraction(0)
        return lo, lo + tail


_RULE = re.compile(r"^\s*(?:(\d+)\s*\*\s*)?(\d+)\s*\^\s*k\s*$")


def parse_scale(spec, bound=None):
    """Parse ``"3,9,27"``, ``"3^k"`` or ``"5*2^k"`` into a :class:`Scale`."""
    if not isinstance(spec, str) or not spec.strip():
        raise ScaleError(f"empty scale spec {spec!r}")
    m = _RULE.match(spec)
    if m:
        c = int(m.group(1)) if m.group(1) else 1
        return Scale(rule=(c, int(m.group(2))), bound=bound)
    try:
        periods = [int(tok) for tok in spec.split(",")]
    except ValueError:
        raise ScaleError(f"cannot parse scale spec {spec!r}") from None
    return Scale(periods=periods, bound=bound)


def scale_from_q(qs, bound=None):
    """Scale with ``p_k = q_1 * ... * q_k``."""
    periods = []
    p = 1
    for q in qs:
        q = check_positive_int(q, "q_k", minimum=2)
        p *= q
        periods.append(p)
    return Scale(periods=periods, bound=bound)


@dataclass(frozen=True)
class OdometerPoint:
    """Point of the adding machine truncated to ``K`` levels."""

    residues: tuple

    def validate(self, scale):
        if len(self.residues) > len(scale):
            raise ValueError("more residues than scale levels")
        for k, g in enumerate(self.residues, start=1):
            p = scale.period(k)
            if not 0 <= g < p:
                raise ValueError(f"residue g_{k}={g} outside [0, {p})")
            if k > 1 and g % scale.period(k - 1) != self.residues[k - 2]:
                raise ValueError(f"g_{k} is not compatible with g_{k - 1}")
        return self

    @classmethod
    def zero(cls, scale, levels=None):
        levels = len(scale) if levels is None else levels
        return cls((0,) * levels)

    @classmethod
    def from_integer(cls, n, scale, levels=None):
        levels = len(scale) if levels is None else levels
        return cls(tuple(n % scale.period(k) for k in range(1, levels + 1)))


def successor(point, scale):
    """Add the generator ``(1, 1, ...)``."""
    point.validate(scale)
    return OdometerPoint(
        tuple((g + 1) % scale.period(k) for k, g in enumerate(point.residues, start=1))
    )


def project(point, k):
    """Residue of ``point`` modulo ``p_k``."""
    if not 1 <= k <= len(point.residues):
        raise IndexError(f"level {k} outside 1..{len(point.residues)}")
    return point.residues[k - 1]
