"""Finite-window constructions of Toeplitz sequences.

Two schemes are provided: the block scheme, where step ``k`` writes a block
into the leftmost free cells of ``[1, p_k]`` and repeats it with period
``p_k``, and the readout scheme, where ``y_k`` goes to the first free cell and
is repeated with period ``p_k``.  Positions are 1-based throughout; arrays are
stored 0-based (index ``i`` is position ``i + 1``).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count

import numpy as np

from ._validation import check_positive_int
from .odometer import BEYOND, Scale, scale_from_q

UNFILLED = 0


class ConstructionError(ValueError):
    """Raised when a construction cannot be carried out on the window."""


@dataclass(frozen=True)
class StepRecord:
    step: int
    first_position: int
    period: int | None  # None: period exceeds the window
    cells: int


class PartialFilling:
    """A window ``[1, N]`` whose cells are unfilled or carry (symbol, step, initial).

    Cells are written through :meth:`place`, which refuses to overwrite.
    Per-step records keep the first position ``n_k`` and the period (or
    ``None`` when the period exceeds the window).
    """

    def __init__(self, window, scale=None, kind="custom"):
        self.window = check_positive_int(window, "window")
        self.scale = scale
        self.kind = kind
        self.symbol = np.zeros(self.window, dtype=np.int64)
        self.step = np.zeros(self.window, dtype=np.int64)
        self.initial = np.zeros(self.window, dtype=bool)
        self._first = []
        self._period = []
        self._cells = []

    # -- writing -----------------------------------------------------------------
    def place(self, positions, symbols, period=None, initial=None):
        """Fill ``positions`` (1-based, increasing) as the next construction step."""
        pos = np.asarray(positions, dtype=np.int64)
        if pos.size == 0:
            raise ConstructionError("a step must fill at least one cell")
        idx = pos - 1
        if idx[0] < 0 or idx[-1] >= self.window:
            raise ConstructionError("positions outside the window")
        if np.any(self.step[idx] != UNFILLED):
            raise ConstructionError("refusing to overwrite a filled cell")
        k = len(self._first) + 1
        self.symbol[idx] = symbols
        self.step[idx] = k
        if initial is None:
            self.initial[idx[0]] = True
        else:
            self.initial[idx[np.asarray(initial, dtype=bool)]] = True
        self._first.append(int(pos[0]))
        self._period.append(None if period is None or period > self.window else int(period))
        self._cells.append(int(pos.size))
        return k

    def _place_singletons(self, positions, symbols, first_step):
        # one-cell steps with beyond-window periods, in increasing position order
        idx = np.asarray(positions, dtype=np.int64) - 1
        self.symbol[idx] = symbols
        self.step[idx] = np.arange(first_step, first_step + idx.size)
        self.initial[idx] = True
        self._first.extend((idx + 1).tolist())
        self._period.extend([None] * idx.size)
        self._cells.extend([1] * idx.size)

    # -- reading -----------------------------------------------------------------
    @property
    def n_steps(self):
        return len(self._first)

    def record(self, k):
        if not 1 <= k <= self.n_steps:
            raise IndexError(f"step {k} outside 1..{self.n_steps}")
        return StepRecord(k, self._first[k - 1], self._period[k - 1], self._cells[k - 1])

    @property
    def records(self):
        return [self.record(k) for k in range(1, self.n_steps + 1)]

    @property
    def first_positions(self):
        return np.asarray(self._first, dtype=np.int64)

    @property
    def periods(self):
        """Per-step period, ``-1`` where it exceeds the window."""
        return np.asarray([-1 if p is None else p for p in self._period], dtype=np.int64)

    @property
    def filled(self):
        return self.step != UNFILLED

    @property
    def is_complete(self):
        return bool(self.filled.all())

    def unfilled_positions(self):
        return np.flatnonzero(~self.filled) + 1

    def first_unfilled(self):
        free = np.flatnonzero(~self.filled)
        return int(free[0]) + 1 if free.size else self.window + 1

    def symbols(self):
        """Filled symbols as a 0-based array; raises if a cell is unfilled."""
        if not self.is_complete:
            raise ConstructionError(
                f"{int((~self.filled).sum())} unfilled cells, first at {self.first_unfilled()}"
            )
        return self.symbol.copy()

    def render(self, unfilled="*", length=None, alphabet=None):
        """Text rendering, e.g. ``0100***0100...`` for the block scheme."""
        n = self.window if length is None else min(length, self.window)
        out = []
        for i in range(n):
            if self.step[i] == UNFILLED:
                out.append(unfilled)
            elif alphabet is not None:
                out.append(alphabet[self.symbol[i]])
            else:
                out.append(str(self.symbol[i]))
        return "".join(out)

    def copy(self):
        other = PartialFilling(self.window, self.scale, self.kind)
        other.symbol = self.symbol.copy()
        other.step = self.step.copy()
        other.initial = self.initial.copy()
        other._first = list(self._first)
        other._period = list(self._period)
        other._cells = list(self._cells)
        return other

    def completed(self, fill_value=0):
        """Copy with every free cell filled by ``fill_value``, one step per cell."""
        other = self.copy()
        free = other.unfilled_positions()
        if free.size:
            other._place_singletons(free, fill_value, other.n_steps + 1)
        return other


# -- block scheme -----------------------------------------------------------------


def block_lengths(qs, rs):
    """Block lengths ``r_k * Q_{k-1}`` and the counts ``Q_k = prod (q_i - r_i)``."""
    lengths, Q = [], [1]
    for q, r in zip(qs, rs):
        if not 1 <= r < q:
            raise ConstructionError(f"need 1 <= r_k < q_k, got r={r}, q={q}")
        lengths.append(r * Q[-1])
        Q.append(Q[-1] * (q - r))
    return lengths, Q


def build_block_scheme(qs, blocks, window):
    """Write ``B_k`` into the leftmost free cells of ``[1, p_k]``, period ``p_k``.

    ``p_k = q_1 ... q_k``; the block length fixes ``r_k = len(B_k) / Q_{k-1}``.
    Steps whose period exceeds the window write their block once into the
    leftmost free cells of the window (truncated at the window end).
    """
    qs = [check_positive_int(q, "q_k", minimum=2) for q in qs]
    blocks = [np.asarray(b, dtype=np.int64) for b in blocks]
    if len(blocks) != len(qs):
        raise ConstructionError("need one block per q_k")
    scale = scale_from_q(qs, bound=window)
    window = check_positive_int(window, "window")
    if window < scale.period(1):
        raise ConstructionError(f"window {window} is shorter than p_1={scale.period(1)}")
    filling = PartialFilling(window, scale, kind="block")
    Q = 1
    for k, (q, block) in enumerate(zip(qs, blocks), start=1):
        if block.ndim != 1 or block.size == 0 or block.size % Q:
            raise ConstructionError(
                f"len(B_{k})={block.size} is not a positive multiple of Q_{k-1}={Q}"
            )
        r = block.size // Q
        if r >= q:
            raise ConstructionError(f"r_{k}={r} must be < q_{k}={q}")
        p = scale.period(k)
        free = np.flatnonzero(~filling.filled[: min(p, window)]) + 1
        if p <= window:
            # the free cells of [1, p_k] are the Q_{k-1} q_k survivors of step k-1
            first = free[: block.size]
            reps = np.arange(0, window, p, dtype=np.int64)
            pos = (first[None, :] + reps[:, None]).ravel()
            keep = pos <= window
            syms = np.broadcast_to(block, (reps.size, block.size)).ravel()
            init = np.zeros((reps.size, block.size), dtype=bool)
            init[0] = True
            filling.place(pos[keep], syms[keep], period=p, initial=init.ravel()[keep])
        else:
            first = free[: block.size]
            if first.size == 0:
                raise ConstructionError(f"window already full before step {k}")
            filling.place(first, block[: first.size], period=p, initial=np.ones(first.size, bool))
        Q *= q - r
    return filling


def schedule_ones(qs, rs, K=None):
    """Blocks of zeros with a single 1 whose offsets visit every residue class.

    The 1 in ``B_k`` (``k >= 2``) sits at an offset ``s`` chosen for a target
    level ``j < k``; target levels follow the diagonal order 1; 1,2; 1,2,3; ...
    and each level cycles through its residues ``0 .. Q_j - 1``.  ``B_1`` has
    its 1 at offset 0.
    """
    K = len(qs) if K is None else K
    lengths, Q = block_lengths(qs[:K], rs[:K])
    counters = {}
    levels = (j for row in count(1) for j in range(1, row + 1))
    blocks = []
    for k, length in enumerate(lengths, start=1):
        block = np.zeros(length, dtype=np.int64)
        if k == 1:
            block[0] = 1
        else:
            j = next(levels)
            s = counters.get(j, 0)
            counters[j] = (s + 1) % Q[j]
            block[s] = 1
        blocks.append(block)
    return blocks


# -- readout scheme ---------------------------------------------------------------


class ReadoutEngine:
    """Step-by-step state of the readout scheme on ``[1, N]``.

    Steps whose period fits in the window fill a progression; once the next
    period exceeds the window every remaining step fills a single cell, so
    the tail of the construction is done in one vectorized pass.
    """

    def __init__(self, scale, window):
        if not isinstance(scale, Scale):
            raise TypeError("scale must be a Scale")
        if scale.period(1) < 3:
            raise ConstructionError("the readout scheme needs p_1 >= 3")
        self.scale = scale
        self.filling = PartialFilling(window, scale, kind="readout")
        self.frontier = 1

    @property
    def window(self):
        return self.filling.window

    @property
    def k(self):
        return self.filling.n_steps

    def _advance(self):
        step = self.filling.step
        f = self.frontier
        while f <= self.window and step[f - 1] != UNFILLED:
            f += 1
        self.frontier = f
        return f

    @property
    def done(self):
        return self._advance() > self.window

    def next_period(self):
        p = self.scale.period(self.k + 1)
        return None if p is BEYOND or p > self.window else p

    @property
    def periodic_phase(self):
        return not self.done and self.next_period() is not None

    def step(self, symbol):
        f = self._advance()
        if f > self.window:
            raise ConstructionError("window already filled")
        p = self.next_period()
        if p is None:
            pos = np.array([f], dtype=np.int64)
        else:
            pos = np.arange(f, self.window + 1, p, dtype=np.int64)
        self.filling.place(pos, symbol, period=p)
        return f

    def finish(self, symbols):
        """Fill every remaining cell, one step each; ``symbols`` may be callable."""
        free = self.filling.unfilled_positions()
        if free.size == 0:
            return
        if self.periodic_phase:
            raise ConstructionError("finish() called before the periodic phase ended")
        if callable(symbols):
            symbols = symbols(free)
        symbols = np.asarray(symbols, dtype=np.int64)
        if symbols.size < free.size:
            raise ConstructionError(
                f"y exhausted: {free.size} more symbols needed, {symbols.size} given"
            )
        self.filling._place_singletons(free, symbols[: free.size], self.k + 1)
        self.frontier = self.window + 1


def _readout(scale, window, symbol_at_step, tail_symbols, steps=None):
    engine = ReadoutEngine(scale, window)
    while engine.periodic_phase:
        if steps is not None and engine.k >= steps:
            return engine.filling
        engine.step(symbol_at_step(engine.k + 1, engine._advance()))
    if steps is None:
        engine.finish(tail_symbols(engine))
    else:
        remaining = steps - engine.k
        free = engine.filling.unfilled_positions()[: max(remaining, 0)]
        if free.size:
            syms = tail_symbols(engine)
            syms = syms(free) if callable(syms) else np.asarray(syms)[: free.size]
            if syms.size < free.size:
                raise ConstructionError("y exhausted before the requested steps")
            engine.filling._place_singletons(free, syms, engine.k + 1)
    return engine.filling


def build_readout(y, scale, window, steps=None):
    """Place ``y_k`` at the first free cell and repeat it with period ``p_k``.

    ``y`` is 0-based (``y[0]`` is ``y_1``).  With ``steps`` the construction
    stops early and the filling may be partial.
    """
    y = np.asarray(y, dtype=np.int64)

    def symbol_at_step(k, pos):
        if k > y.size:
            raise ConstructionError(f"y exhausted at step {k}")
        return y[k - 1]

    def tail(engine):
        return y[engine.k :]

    return _readout(scale, window, symbol_at_step, tail, steps)


def initial_indicator(filling):
    """The 0/1 sequence ``z``: 1 exactly at initial (first-placement) cells."""
    if not filling.is_complete:
        raise ConstructionError("initial indicator needs a complete filling")
    return filling.initial.astype(np.int8)


def mobius_fill(scale, window, table):
    """Readout scheme with ``y_k = mu(n_k)``, so initial cells agree with ``mu``."""
    if table.n_max < window:
        raise ValueError(f"table covers {table.n_max} < window {window}")
    mu = table.values  # mu[n] at index n
    return _readout(
        scale,
        window,
        lambda k, pos: int(mu[pos]),
        lambda engine: (lambda free: mu[free].astype(np.int64)),
    )


def shortlex_blocks():
    """Binary symbols of every word in shortlex order: 0,1,00,01,10,11,000,..."""
    for n in count(1):
        for v in range(2**n):
            yield from (int(c) for c in format(v, f"0{n}b"))


def build_sparse_readout(scale, window, m_max, block_source=None, k_indices=None):
    """Readout of a ``y`` that is zero except ``A_m`` at ``y[k_m+1 .. k_m+m]``.

    ``A_m`` is the next ``m`` symbols of ``block_source`` (default: the
    shortlex stream of all binary words).  ``k_m`` come from the pattern-C
    search on the same scale unless given.  Returns ``(y, filling, k_indices)``.
    """
    from .complexity import find_claim_indices

    if k_indices is None:
        k_indices = find_claim_indices(scale, m_max, window)
    if len(k_indices) < m_max:
        raise ConstructionError(
            f"window {window} determines only {len(k_indices)} of {m_max} pattern-C indices"
        )
    k_indices = list(k_indices[:m_max])
    source = iter(shortlex_blocks() if block_source is None else block_source)
    y = np.zeros(window, dtype=np.int64)
    for m, k in enumerate(k_indices, start=1):
        block = [next(source) for _ in range(m)]
        if k + m > y.size:
            raise ConstructionError(f"A_{m} does not fit in y")
        y[k : k + m] = block
    filling = build_readout(y, scale, window)
    return y[: filling.n_steps], filling, k_indices
