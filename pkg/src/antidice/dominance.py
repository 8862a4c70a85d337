"""Who rolls higher: exact dominance relations under repeated summed rolls.

For dice A and B, form the difference die A - B (all pairwise face
differences).  After k rolls the sign of the summed difference decides the
round, so the whole comparison collapses to one question about the k-fold
self-convolution of a single lattice distribution: how much weight sits
above zero versus below.

The tilt of a distribution X about a center c is
    T = P(X > c) - P(X < c),
computed here as exact integer tallies.  WIN means positive tilt about 0
from the first die's viewpoint, LOSS negative, TIE exactly zero (no
epsilon: a tie is an exact integer equality).

Label sequences over k = 1..kmax are the package's central object.  They
serialize as strings like "LLLWLL" and as trinary codes (L,T,W) -> (0,1,2)
with the earliest roll as the most significant digit, which turns every
die pair into a single integer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import core
from .core import CancelFlag, Die, LatticeDistribution, _check_cancel
from .errors import SingletonSupportError

try:
    import numpy as _np
except ImportError:  # pragma: no cover
    _np = None


class RelationLabel(Enum):
    """Round outcome from the first die's viewpoint."""

    LOSS = 0
    TIE = 1
    WIN = 2

    @property
    def char(self) -> str:
        return "LTW"[self.value]

    @property
    def digit(self) -> int:
        return self.value

    @classmethod
    def from_char(cls, c: str) -> "RelationLabel":
        try:
            return cls("LTW".index(c))
        except ValueError:
            raise ValueError(f"unknown relation label {c!r}") from None

    def opposite(self) -> "RelationLabel":
        if self is RelationLabel.TIE:
            return RelationLabel.TIE
        return RelationLabel.WIN if self is RelationLabel.LOSS else RelationLabel.LOSS


class TiltCounts(NamedTuple):
    above: int
    equal: int
    below: int

    @property
    def total(self) -> int:
        return self.above + self.equal + self.below

    @property
    def tilt(self) -> Fraction:
        return Fraction(self.above - self.below, self.total)

    @property
    def label(self) -> RelationLabel:
        if self.above > self.below:
            return RelationLabel.WIN
        if self.above < self.below:
            return RelationLabel.LOSS
        return RelationLabel.TIE


class SpanShift(NamedTuple):
    shift: int
    span: int


class TrinaryCode(NamedTuple):
    digits: str
    value: int


def tilt_counts(
    d: LatticeDistribution, center: Fraction | int | None = None
) -> TiltCounts:
    """Exact weight above / at / below a rational center (default: the mean)."""
    c = d.mean() if center is None else Fraction(center)
    t = c - d.offset
    n = len(d.weights)
    # first index strictly above the center
    i_gt = math.floor(t) + 1
    i_gt = max(0, min(n, i_gt))
    above = sum(d.weights[i_gt:])
    equal = 0
    if t.denominator == 1 and 0 <= t <= n - 1:
        equal = d.weights[int(t)]
    below = d.total - above - equal
    return TiltCounts(above, equal, below)


@dataclass(frozen=True)
class DominanceSequence:
    """Labels for rolls 1..kmax, first die's viewpoint, 1-indexed access."""

    labels: tuple[RelationLabel, ...]

    @property
    def kmax(self) -> int:
        return len(self.labels)

    def label(self, k: int) -> RelationLabel:
        if not 1 <= k <= len(self.labels):
            raise IndexError(f"roll count {k} outside 1..{len(self.labels)}")
        return self.labels[k - 1]

    def __str__(self) -> str:
        return "".join(lb.char for lb in self.labels)


def trinary_code(seq: DominanceSequence | Sequence[RelationLabel]) -> TrinaryCode:
    """Digits 0/1/2 for L/T/W, earliest roll most significant."""
    labels = seq.labels if isinstance(seq, DominanceSequence) else tuple(seq)
    if not labels:
        raise ValueError("empty label sequence has no code")
    digits = "".join(str(lb.digit) for lb in labels)
    return TrinaryCode(digits, int(digits, 3))


# ----------------------------------------------------------------------
# sequence engines
# ----------------------------------------------------------------------

def _labels_machine(d: LatticeDistribution, kmax: int) -> list[RelationLabel] | None:
    """int64 incremental walk; exact while total^kmax fits under 2^62."""
    if _np is None or d.total ** kmax >= core._MACHINE_CAP:
        return None
    base = _np.array(d.weights, dtype=_np.int64)
    nz = _np.flatnonzero(base)
    step = len(base) - 1
    cur = base.copy()
    cur_off = d.offset
    out = []
    for k in range(1, kmax + 1):
        if k > 1:
            nxt = _np.zeros(len(cur) + step, dtype=_np.int64)
            for i in nz:
                nxt[i : i + len(cur)] += base[i] * cur
            cur = nxt
            cur_off += d.offset
        i0 = -cur_off
        if i0 < 0:
            above, equal = int(cur.sum()), 0
        elif i0 >= len(cur):
            above, equal = 0, 0
        else:
            above = int(cur[i0 + 1 :].sum())
            equal = int(cur[i0])
        below = int(cur.sum()) - above - equal
        out.append(TiltCounts(above, equal, below).label)
    return out


def sequence_from_lattice(
    d: LatticeDistribution,
    kmax: int,
    kernel: str = "auto",
    cancel: CancelFlag | None = None,
) -> DominanceSequence:
    """Labels of d's k-fold self-convolutions about 0, k = 1..kmax.

    Incremental: one convolution per step.  A machine-word fast path covers
    shallow walks whose totals stay below 2^62; it is validated against the
    generic engine in the tests.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    if kernel == "auto":
        fast = _labels_machine(d, kmax)
        if fast is not None:
            return DominanceSequence(tuple(fast))
    out = []
    cur = d
    for k in range(1, kmax + 1):
        if k > 1:
            _check_cancel(cancel)
            cur = core.convolve(cur, d, kernel)
        out.append(tilt_counts(cur, 0).label)
    return DominanceSequence(tuple(out))


def compare(a: Die, b: Die, k: int, kernel: str = "auto") -> RelationLabel:
    """Outcome of summing k rolls, a's viewpoint: tilt of (a-b)^[k] about 0."""
    if k < 1:
        raise ValueError("roll count must be at least 1")
    d = core.to_lattice(core.difference_die(a, b)).dist
    return tilt_counts(core.power(d, k, kernel), 0).label


def dominance_sequence(
    a: Die,
    b: Die,
    kmax: int,
    kernel: str = "auto",
    cancel: CancelFlag | None = None,
) -> DominanceSequence:
    d = core.to_lattice(core.difference_die(a, b)).dist
    return sequence_from_lattice(d, kmax, kernel, cancel)


# ----------------------------------------------------------------------
# structure of label sequences
# ----------------------------------------------------------------------

def first_inversion_of(
    seq: DominanceSequence | Sequence[RelationLabel],
) -> int | None:
    """Smallest k whose label flips a uniform non-tie prefix, else None.

    Requires labels 1..k-1 to share one non-TIE value and label k to be the
    opposite one.  A tie anywhere before the flip aborts the search: ties
    are not part of a strict inversion.  The flip needs at least one prior
    roll, so the result is always >= 2.
    """
    labels = seq.labels if isinstance(seq, DominanceSequence) else tuple(seq)
    if not labels or labels[0] is RelationLabel.TIE:
        return None
    v = labels[0]
    for i in range(1, len(labels)):
        if labels[i] is v:
            continue
        if labels[i] is v.opposite():
            return i + 1
        return None
    return None


def first_inversion(
    a: Die,
    b: Die,
    kmax: int,
    kernel: str = "auto",
    cancel: CancelFlag | None = None,
) -> int | None:
    """First roll count at which a's uniform win/loss streak against b flips."""
    return first_inversion_of(dominance_sequence(a, b, kmax, kernel, cancel))


def period_hint(
    seq: DominanceSequence | Sequence[RelationLabel], max_period: int
) -> int | None:
    """Smallest p <= max_period making the observed labels p-periodic.

    Purely a consistency check on the window that was computed; it proves
    nothing about rolls beyond kmax.
    """
    labels = seq.labels if isinstance(seq, DominanceSequence) else tuple(seq)
    for p in range(1, max_period + 1):
        if p >= len(labels):
            break
        if all(labels[i] is labels[i + p] for i in range(len(labels) - p)):
            return p
    return None


def is_intransitive_cycle(dice: Sequence[Die], k: int, kernel: str = "auto") -> bool:
    """True iff every die beats its successor (cyclically) at k rolls."""
    if len(dice) < 3:
        raise ValueError("a cycle needs at least three dice")
    return all(
        compare(dice[i], dice[(i + 1) % len(dice)], k, kernel) is RelationLabel.WIN
        for i in range(len(dice))
    )


def span_shift(d: LatticeDistribution) -> SpanShift:
    """Arithmetic progression a + bZ carrying the support.

    span b is the gcd of pairwise support differences, shift a the common
    residue in [0, b).  Undefined (raises) for singleton support.
    """
    values = [v for v, _ in d.items()]
    if len(values) < 2:
        raise SingletonSupportError("span needs at least two support points")
    b = 0
    for i in range(1, len(values)):
        b = math.gcd(b, values[i] - values[0])
    return SpanShift(values[0] % b, b)
