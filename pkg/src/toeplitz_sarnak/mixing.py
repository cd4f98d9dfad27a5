"""Window-shift modifications of a Toeplitz prefix.

Step ``k`` takes a central block of the current sequence, finds the scale
period ``p_k`` of its repetitions, keeps every ``q_k``-th repetition (never
the central one) and rotates each of those windows one cell to the left.
Only one-sided prefixes are handled; the central block sits at an anchor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._validation import check_positive_int, check_symbols


class PlanError(ValueError):
    pass


@dataclass
class WindowPlan:
    k: int
    r: int
    p: int
    q: int
    starts: list = field(default_factory=list)  # 1-based window starts
    length: int | None = None  # defaults to 2r + 1
    anchor: int = 1

    def __post_init__(self):
        if self.length is None:
            self.length = 2 * self.r + 1

    @property
    def rho(self):
        """Share of cells touched per period: ``(2 r + 1) / (p q)``."""
        return Fraction(self.length, self.p * self.q)

    def windows(self):
        return [(s, s + self.length - 1) for s in self.starts]


def _anchor_block(x, anchor, length):
    if anchor < 1 or anchor + length - 1 > x.size:
        raise PlanError(f"central block [{anchor}, {anchor + length - 1}] leaves the prefix")
    return x[anchor - 1 : anchor - 1 + length]


def _occurrence_offsets(n, anchor, length, p):
    # every m (possibly negative) with the translated block inside [1, n]
    lo = -((anchor - 1) // p)
    hi = (n - anchor - length + 1) // p
    return np.arange(lo, hi + 1, dtype=np.int64)


def _recurs(x, block, anchor, p, ms):
    # compare translates in chunks of about 4M cells
    chunk = max(1, (1 << 22) // block.size)
    offs = np.arange(block.size)
    for i in range(0, ms.size, chunk):
        starts = anchor - 1 + ms[i : i + chunk] * p
        if not np.all(x[starts[:, None] + offs] == block):
            return False
    return True


def detect_period(x, r, scale, anchor=1, length=None):
    """Least scale period at which the central block recurs throughout ``x``.

    The block is ``x[anchor, anchor + 2r]`` (or ``length`` cells).  Every
    translate by a multiple of the period that fits in ``x`` must match, and
    at least one translate must fit.
    """
    x = check_symbols(x)
    length = 2 * r + 1 if length is None else check_positive_int(length, "length")
    block = _anchor_block(x, anchor, length)
    for p in scale.periods_upto(x.size):
        ms = _occurrence_offsets(x.size, anchor, length, p)
        ms = ms[ms != 0]
        if ms.size and _recurs(x, block, anchor, p, ms):
            return int(p)
    raise PlanError(f"no scale period confirms the central block within {x.size} cells")


def _check_disjoint(plan, n):
    starts = np.sort(np.asarray(plan.starts, dtype=np.int64))
    if starts.size == 0:
        return starts
    if starts[0] < 1 or starts[-1] + plan.length - 1 > n:
        raise PlanError("window outside the prefix")
    if np.any(np.diff(starts) < plan.length):
        raise PlanError("overlapping windows")
    return starts


def apply_window_shift(x, plan, inverse=False):
    """Rotate the contents of every plan window one cell left (right if ``inverse``)."""
    x = check_symbols(x, allow_empty=True)
    starts = _check_disjoint(plan, x.size)
    out = x.copy()
    if starts.size == 0 or plan.length == 1:
        return out
    offs = np.arange(plan.length)
    src = np.roll(offs, -1 if not inverse else 1)
    base = (starts - 1)[:, None]
    out[base + offs] = x[base + src]
    return out


def _distance_to_windows(points, windows):
    # 0 inside a window, else distance to the nearest window end
    if not windows:
        return np.full(len(points), np.iinfo(np.int64).max, dtype=np.int64)
    w = np.asarray(sorted(windows), dtype=np.int64)
    pts = np.asarray(points, dtype=np.int64)
    i = np.searchsorted(w[:, 0], pts, side="right") - 1
    dist = np.full(pts.size, np.iinfo(np.int64).max, dtype=np.int64)
    left = i >= 0
    inside = left & (pts <= w[np.maximum(i, 0), 1])
    dist[left] = pts[left] - w[i[left], 1]
    right = i + 1 < len(w)
    dist[right] = np.minimum(dist[right], w[i[right] + 1, 0] - pts[right])
    dist[inside] = 0
    return dist


def default_anchor(previous):
    """Cell 1 for the first step, else midway past the first two earlier windows.

    Later central blocks must avoid every earlier central block, which stays
    unmodified while all its repetitions are rotated.
    """
    if not previous:
        return 1
    prev = previous[-1]
    return prev.anchor + (3 * prev.p * prev.q) // 2


def plan_step(x, k, r, q, scale, previous=(), anchor=None, length=None):
    """Windows for step ``k``: every ``q``-th repetition of the central block.

    ``p q`` must be a scale period and the gap ``p q - (2 r + 1)`` must hold
    at least one full period ``p`` so the modification can be undone.  Both
    ends of the central block and of every window keep a distance of at least
    ``floor(p' q' / 4)`` from the windows of each earlier plan, and the
    central block may not cover an earlier central block.
    """
    x = check_symbols(x)
    r = check_positive_int(r, "r", minimum=0)
    q = check_positive_int(q, "q", minimum=2)
    length = 2 * r + 1 if length is None else check_positive_int(length, "length")
    anchor = default_anchor(previous) if anchor is None else anchor
    for prev in previous:
        if anchor <= prev.anchor + prev.length - 1:
            raise PlanError(f"step {k}: central block overlaps the step-{prev.k} central block")
    p = detect_period(x, r, scale, anchor, length)
    if p * q not in scale.periods:
        raise PlanError(f"p*q = {p * q} is not a scale period")
    if p * q - length < p:
        raise PlanError(f"q={q} too small: gap {p * q - length} is shorter than p={p}")
    ms = _occurrence_offsets(x.size, anchor, length, p)
    ms = ms[(ms != 0) & (ms % q == 0)]
    starts = (anchor + ms * p).tolist()
    plan = WindowPlan(k, r, p, q, starts, length, anchor)
    ends = np.asarray(starts + [anchor], dtype=np.int64)
    pts = np.concatenate([ends, ends + length - 1])
    for prev in previous:
        margin = prev.p * prev.q // 4
        d = _distance_to_windows(pts, prev.windows())
        if d.size and d.min() < margin:
            raise PlanError(
                f"step {k}: a window end lies within {int(d.min())} < {margin} "
                f"cells of a step-{prev.k} window"
            )
    return plan


def run_plans(x, scale, pairs, anchors=None):
    """Plan and apply one step per ``(r, q)`` pair; returns ``(x_K, plans)``."""
    cur = check_symbols(x).copy()
    plans = []
    for k, (r, q) in enumerate(pairs, start=1):
        anchor = None if anchors is None else anchors[k - 1]
        plan = plan_step(cur, k, r, q, scale, plans, anchor)
        cur = apply_window_shift(cur, plan)
        plans.append(plan)
    return cur, plans


def auto_plan(x, scale, steps, budget=Fraction(1, 20), r1=1):
    """Pick the central blocks and ``q_k`` greedily and apply ``steps`` shifts.

    Step 1 uses radius ``r1`` at cell 1.  Step ``k`` starts a quarter spacing
    before the first ``(k-1)``-window and ends a quarter spacing after it.
    Each ``q_k`` is the least admissible quotient with ``rho_k <= budget /
    steps``.  Returns ``(x_K, plans)``.
    """
    cur = check_symbols(x).copy()
    cap = Fraction(budget) / steps
    plans = []
    for k in range(1, steps + 1):
        if plans:
            prev = plans[-1]
            if not prev.starts:
                raise PlanError(f"step {k - 1} left no window inside {cur.size} cells")
            spacing = prev.p * prev.q
            anchor = prev.starts[0] - spacing // 4
            length = spacing // 2 + prev.length
        else:
            anchor, length = 1, 2 * r1 + 1
        length |= 1
        r = (length - 1) // 2
        p = detect_period(cur, r, scale, anchor)
        plan = None
        for big in scale.periods_upto(cur.size):
            if big <= p or big % p or big - length < p or Fraction(length, big) > cap:
                continue
            plan = plan_step(cur, k, r, big // p, scale, plans, anchor)
            break
        if plan is None:
            raise PlanError(f"step {k}: no scale quotient meets rho <= {cap} inside {cur.size} cells")
        cur = apply_window_shift(cur, plan)
        plans.append(plan)
    return cur, plans


def modified_fraction(x, y):
    """Exact share of positions where ``x`` and ``y`` differ."""
    x, y = check_symbols(x), check_symbols(y)
    if x.size != y.size:
        raise ValueError("sequences differ in length")
    return Fraction(int(np.count_nonzero(x != y)), x.size)


def plans_to_text(plans):
    lines = []
    for pl in plans:
        starts = ",".join(str(s) for s in pl.starts)
        lines.append(
            f"k={pl.k} r={pl.r} p={pl.p} q={pl.q} length={pl.length} "
            f"anchor={pl.anchor} starts={starts}"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def plans_from_text(text):
    plans = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            fields = dict(tok.split("=", 1) for tok in line.split())
            starts = [int(s) for s in fields.get("starts", "").split(",") if s]
            plans.append(
                WindowPlan(
                    int(fields["k"]),
                    int(fields["r"]),
                    int(fields["p"]),
                    int(fields["q"]),
                    starts,
                    int(fields["length"]) if "length" in fields else None,
                    int(fields.get("anchor", 1)),
                )
            )
        except (KeyError, ValueError) as exc:
            raise PlanError(f"malformed plan line: {line!r}") from exc
    return plans
