"""Exact arithmetic for dice and their repeated-roll sum distributions.

A die is a finite multiset of rational faces, rolled uniformly.  Summing k
independent rolls convolves the face distribution with itself k times.  All
questions asked downstream (who is more likely to roll higher, where exact
ties sit) are decided by comparing huge integer tallies, so every routine
here works over arbitrary-precision integers and fractions.Fraction; floats
never enter.

The bridge between the two worlds is the lattice form: rescale the faces by
the least common denominator so they become integers, then store the sum
distribution as a dense weight vector over a contiguous integer range.
Weights are outcome counts (total = m^k for an m-faced die after k rolls),
not normalized probabilities, which keeps everything in Z.

Convolution kernels are pluggable:

  schoolbook  two nested loops over nonzero weights, the reference kernel
  machine     numpy int64 vector arithmetic, exact while the product of the
              two weight totals stays below 2^62 (counts are nonnegative,
              so every partial sum is bounded by the final total)
  packed      both weight vectors are packed into one huge integer, one
              slot per coefficient with enough guard bits that carries
              cannot bleed, and the convolution becomes a single big-int
              multiply (gmpy2 accelerates it when installed)
  auto        picks between the above by operand size

The fast kernels are validated against schoolbook in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple

from .errors import DieParseError, OperationCancelled

try:
    import numpy as _np
except ImportError:  # pragma: no cover - numpy is a hard dependency
    _np = None

try:
    from gmpy2 import mpz as _mpz
except ImportError:
    _mpz = None

Rational = Fraction
CancelFlag = Callable[[], bool]

# machine-word kernel is exact while total1*total2 stays under this
_MACHINE_CAP = 1 << 62
# below this many big-int multiplies, schoolbook beats packing overhead
_SCHOOLBOOK_WORK_CAP = 1 << 15
# hand packed integers this large to gmpy2 when available
_GMP_BITS = 1 << 14


# ======================================================================
# dice
# ======================================================================

@dataclass(frozen=True)
class Die:
    """Multiset of rational faces; face order carries no meaning."""

    faces: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.faces) == 0:
            raise DieParseError("a die needs at least one face")
        object.__setattr__(self, "faces", tuple(Fraction(f) for f in self.faces))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Die):
            return NotImplemented
        return sorted(self.faces) == sorted(other.faces)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.faces)))

    def __len__(self) -> int:
        return len(self.faces)

    def __str__(self) -> str:
        return "{" + ",".join(format_rational(f) for f in sorted(self.faces)) + "}"


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_die(text: str) -> Die:
    """Parse a comma-separated list of integers or p/q fractions.

    Whitespace around tokens is ignored; a leading sign is allowed on the
    numerator.  Raises DieParseError on an empty list, a malformed token,
    or a zero denominator.
    """
    tokens = [t.strip() for t in text.split(",")]
    if tokens == [""]:
        raise DieParseError("empty die literal")
    faces = []
    for tok in tokens:
        if not tok:
            raise DieParseError(f"empty face token in {text!r}")
        try:
            faces.append(Fraction(tok))
        except (ValueError, ZeroDivisionError) as exc:
            raise DieParseError(f"bad face token {tok!r}: {exc}") from None
    return Die(tuple(faces))


def die(faces: Iterable[int | str | Fraction]) -> Die:
    """Convenience constructor accepting ints, fraction strings, Fractions."""
    return Die(tuple(Fraction(f) for f in faces))


def negate(d: Die) -> Die:
    return Die(tuple(-f for f in d.faces))


def shift(d: Die, c: Fraction | int) -> Die:
    c = Fraction(c)
    return Die(tuple(f + c for f in d.faces))


def scale(d: Die, c: Fraction | int) -> Die:
    c = Fraction(c)
    if c == 0:
        raise DieParseError("scale factor must be nonzero")
    return Die(tuple(f * c for f in d.faces))


def difference_die(a: Die, b: Die) -> Die:
    """All pairwise face differences x - y; one face per ordered pair."""
    return Die(tuple(x - y for x in a.faces for y in b.faces))


def mean(d: Die) -> Fraction:
    return Fraction(sum(d.faces), len(d.faces))


def raw_moment(d: Die, k: int) -> Fraction:
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    return Fraction(sum(f ** k for f in d.faces), len(d.faces))


# ======================================================================
# lattice distributions
# ======================================================================

@dataclass(frozen=True)
class LatticeDistribution:
    """Integer-valued distribution as a dense vector of big-int weights.

    weights[i] is the count at value offset + i.  The vector is trimmed
    (first and last entries nonzero), every weight is >= 0, and total is
    the exact sum of all weights (>= 1).
    """

    offset: int
    weights: tuple[int, ...]
    total: int

    def __post_init__(self) -> None:
        w = self.weights
        if not w:
            raise ValueError("empty weight vector")
        if w[0] == 0 or w[-1] == 0:
            raise ValueError("weight vector must be trimmed to its support")
        if any(c < 0 for c in w):
            raise ValueError("negative weight")
        if self.total != sum(w) or self.total < 1:
            raise ValueError("stored total disagrees with weights")

    # --- constructors -------------------------------------------------

    @classmethod
    def from_weights(cls, offset: int, weights: Iterable[int]) -> "LatticeDistribution":
        w = list(weights)
        lo = 0
        while lo < len(w) and w[lo] == 0:
            lo += 1
        hi = len(w)
        while hi > lo and w[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            raise ValueError("distribution has no support")
        w = w[lo:hi]
        return cls(offset + lo, tuple(w), sum(w))

    @classmethod
    def from_weight_map(cls, pairs: dict[int, int]) -> "LatticeDistribution":
        if not pairs:
            raise ValueError("distribution has no support")
        lo = min(pairs)
        hi = max(pairs)
        w = [0] * (hi - lo + 1)
        for v, c in pairs.items():
            w[v - lo] = c
        return cls.from_weights(lo, w)

    @classmethod
    def delta(cls, value: int = 0) -> "LatticeDistribution":
        return cls(value, (1,), 1)

    # --- inspection ---------------------------------------------------

    @property
    def support_min(self) -> int:
        return self.offset

    @property
    def support_max(self) -> int:
        return self.offset + len(self.weights) - 1

    def weight_at(self, value: int) -> int:
        i = value - self.offset
        if 0 <= i < len(self.weights):
            return self.weights[i]
        return 0

    def items(self) -> Iterable[tuple[int, int]]:
        for i, c in enumerate(self.weights):
            if c:
                yield self.offset + i, c

    def support_size(self) -> int:
        return sum(1 for c in self.weights if c)

    def mean(self) -> Fraction:
        s = sum((self.offset + i) * c for i, c in enumerate(self.weights))
        return Fraction(s, self.total)

    def raw_moment(self, k: int) -> Fraction:
        if k < 0:
            raise ValueError("moment order must be nonnegative")
        s = sum((self.offset + i) ** k * c for i, c in enumerate(self.weights))
        return Fraction(s, self.total)

    def central_moment(self, k: int) -> Fraction:
        mu = self.mean()
        s = sum(
            (Fraction(self.offset + i) - mu) ** k * c
            for i, c in enumerate(self.weights)
        )
        return s / self.total

    def variance(self) -> Fraction:
        return self.central_moment(2)

    # --- exact transforms ----------------------------------------------

    def negated(self) -> "LatticeDistribution":
        return LatticeDistribution(
            -(self.offset + len(self.weights) - 1), tuple(reversed(self.weights)), self.total
        )

    def shifted(self, c: int) -> "LatticeDistribution":
        return LatticeDistribution(self.offset + c, self.weights, self.total)


class LatticeForm(NamedTuple):
    scale: int
    dist: LatticeDistribution


def to_lattice(d: Die) -> LatticeForm:
    """Rescale faces by the least common denominator and tally them.

    Returns (scale, dist) with dist the counting distribution of
    scale * face over the integers; scale is the smallest positive
    integer that clears every denominator.
    """
    s = 1
    for f in d.faces:
        s = s * f.denominator // math.gcd(s, f.denominator)
    pairs: dict[int, int] = {}
    for f in d.faces:
        v = int(f * s)
        pairs[v] = pairs.get(v, 0) + 1
    return LatticeForm(s, LatticeDistribution.from_weight_map(pairs))


# ======================================================================
# convolution kernels
# ======================================================================

def _conv_schoolbook(w1: tuple[int, ...], w2: tuple[int, ...]) -> list[int]:
    # iterate the sparser vector on the outside
    nnz1 = sum(1 for c in w1 if c)
    nnz2 = sum(1 for c in w2 if c)
    if nnz1 < nnz2:
        w1, w2 = w2, w1
    out = [0] * (len(w1) + len(w2) - 1)
    for i, c in enumerate(w2):
        if not c:
            continue
        for j, d in enumerate(w1):
            if d:
                out[i + j] += c * d
    return out


def _conv_machine(w1: tuple[int, ...], w2: tuple[int, ...]) -> list[int]:
    # caller guarantees total1*total2 < 2^62; counts are nonnegative, so
    # every partial sum is bounded by the final total and int64 is exact
    a1 = _np.array(w1, dtype=_np.int64)
    a2 = _np.array(w2, dtype=_np.int64)
    if len(a2) > len(a1):
        a1, a2 = a2, a1
    nz = _np.flatnonzero(a2)
    if len(nz) <= 64:
        out = _np.zeros(len(a1) + len(a2) - 1, dtype=_np.int64)
        for i in nz:
            out[i : i + len(a1)] += a2[i] * a1
        return out.tolist()
    return _np.convolve(a1, a2).tolist()


def _big_mul(a: int, b: int) -> int:
    if _mpz is not None and max(a.bit_length(), b.bit_length()) >= _GMP_BITS:
        return int(_mpz(a) * _mpz(b))
    return a * b


def _conv_packed(
    w1: tuple[int, ...], w2: tuple[int, ...], t1: int, t2: int
) -> list[int]:
    # every convolution coefficient is <= t1*t2, so slots this wide never carry
    slot = ((t1 * t2).bit_length() + 7) // 8
    n_out = len(w1) + len(w2) - 1
    a = int.from_bytes(b"".join(c.to_bytes(slot, "little") for c in w1), "little")
    b = int.from_bytes(b"".join(c.to_bytes(slot, "little") for c in w2), "little")
    p = _big_mul(a, b).to_bytes(slot * n_out, "little")
    return [
        int.from_bytes(p[i * slot : (i + 1) * slot], "little") for i in range(n_out)
    ]


KERNELS = ("auto", "schoolbook", "machine", "packed")


def _pick_kernel(d1: LatticeDistribution, d2: LatticeDistribution) -> str:
    if _np is not None and d1.total * d2.total < _MACHINE_CAP:
        return "machine"
    nnz = min(d1.support_size(), d2.support_size())
    if nnz * max(len(d1.weights), len(d2.weights)) <= _SCHOOLBOOK_WORK_CAP:
        return "schoolbook"
    return "packed"


def convolve(
    d1: LatticeDistribution, d2: LatticeDistribution, kernel: str = "auto"
) -> LatticeDistribution:
    """Distribution of the sum of independent draws from d1 and d2.

    The result total is exactly d1.total * d2.total.  kernel picks the
    multiplication strategy; every kernel returns identical weights.
    """
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if kernel == "auto":
        kernel = _pick_kernel(d1, d2)
    if kernel == "machine" and (
        _np is None or d1.total * d2.total >= _MACHINE_CAP
    ):
        kernel = "packed"
    if kernel == "schoolbook":
        out = _conv_schoolbook(d1.weights, d2.weights)
    elif kernel == "machine":
        out = _conv_machine(d1.weights, d2.weights)
    else:
        out = _conv_packed(d1.weights, d2.weights, d1.total, d2.total)
    return LatticeDistribution(
        d1.offset + d2.offset, tuple(out), d1.total * d2.total
    )


def _check_cancel(cancel: CancelFlag | None) -> None:
    if cancel is not None and cancel():
        raise OperationCancelled("cancelled between convolution steps")


def power(
    d: LatticeDistribution,
    k: int,
    kernel: str = "auto",
    cancel: CancelFlag | None = None,
) -> LatticeDistribution:
    """k-fold self-convolution by binary exponentiation; power(d, 0) = delta_0."""
    if k < 0:
        raise ValueError("power must be nonnegative")
    if k == 0:
        return LatticeDistribution.delta(0)
    acc: LatticeDistribution | None = None
    sq = d
    while True:
        if k & 1:
            _check_cancel(cancel)
            acc = sq if acc is None else convolve(acc, sq, kernel)
        k >>= 1
        if not k:
            break
        _check_cancel(cancel)
        sq = convolve(sq, sq, kernel)
    return acc


class PowerCache:
    """Memo of 2^i-fold self-convolutions for one base distribution.

    get(k) composes cached squarings, so walking an arbitrary set of
    exponents costs O(log k) convolutions each and repeated squarings are
    shared.  Used to seed long incremental runs mid-range.
    """

    def __init__(self, base: LatticeDistribution, kernel: str = "auto") -> None:
        self.base = base
        self.kernel = kernel
        self._squares = [base]

    def square(self, i: int, cancel: CancelFlag | None = None) -> LatticeDistribution:
        while len(self._squares) <= i:
            _check_cancel(cancel)
            top = self._squares[-1]
            self._squares.append(convolve(top, top, self.kernel))
        return self._squares[i]

    def get(self, k: int, cancel: CancelFlag | None = None) -> LatticeDistribution:
        if k < 0:
            raise ValueError("power must be nonnegative")
        if k == 0:
            return LatticeDistribution.delta(0)
        acc: LatticeDistribution | None = None
        i = 0
        while k:
            if k & 1:
                sq = self.square(i, cancel)
                _check_cancel(cancel)
                acc = sq if acc is None else convolve(acc, sq, self.kernel)
            k >>= 1
            i += 1
        return acc
