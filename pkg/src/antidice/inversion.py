"""The late-inversion family Delta(x) = {x, 5, 3, -9, 1-x}.

Every member is balanced, and for integer x the lattice span is 1, so
each die's fate against {0} is governed by its third moment: positive
mu3 means the walk must eventually flip from winning to losing.  The
family's signature trick is the conditional reduction: when comparing
tallies about 0 for k rolls with x > 9k, the outcomes where the x-face
and the (1-x)-face counts differ cancel in (above - below) exactly, so
the net tilt equals that of a single x-free distribution E[k] built from
{5, 3, -9} rolls plus a +1 residue per x/(1-x) pair.  That makes the
pre-inversion tilt constant in x and lets inversion be delayed
arbitrarily by growing x.

first_inversion_scan walks each die exactly until the win prefix breaks;
quadratic_fit summarizes the (x, inversion time) cloud.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import checkpoint as _ckpt
from . import core, dominance
from .core import CancelFlag, Die, LatticeDistribution
from .dominance import TiltCounts
from .errors import DegenerateFitError

try:
    import numpy as _np
except ImportError:  # pragma: no cover
    _np = None


def family_die(x: Fraction | int) -> Die:
    """{x, 5, 3, -9, 1-x}; face sum is identically zero."""
    x = Fraction(x)
    return Die((x, Fraction(5), Fraction(3), Fraction(-9), 1 - x))


#: the x-free core of the family: one roll conditioned on avoiding the
#: x and 1-x faces
_CORE3 = LatticeDistribution.from_weight_map({5: 1, 3: 1, -9: 1})


def conditional_pair_distribution(k: int) -> LatticeDistribution:
    """E[k]: k-roll sums given equally many x-faces and (1-x)-faces.

    Each such outcome is A pairs contributing +1 apiece (x + (1-x) = 1)
    plus k-2A rolls of {5, 3, -9}; the multinomial k!/(A! A! (k-2A)!)
    counts the arrangements.  Exact integer weights out of the 5^k total;
    independent of x by construction.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    acc: dict[int, int] = {}
    for pairs in range(k // 2 + 1):
        free = k - 2 * pairs
        ways = math.factorial(k) // (
            math.factorial(pairs) ** 2 * math.factorial(free)
        )
        part = core.power(_CORE3, free) if free else LatticeDistribution.delta(0)
        for v, c in part.items():
            acc[v + pairs] = acc.get(v + pairs, 0) + ways * c
    return LatticeDistribution.from_weight_map(acc)


@dataclass(frozen=True)
class TiltInvariance:
    """Outcome of the constant-tilt comparison at two x values."""

    x1: Fraction
    x2: Fraction
    k: int
    counts1: TiltCounts
    counts2: TiltCounts
    conditional_net: int
    ok: bool

    def __bool__(self) -> bool:
        return self.ok


def tilt_invariance_check(
    x1: Fraction | int, x2: Fraction | int, k: int, kernel: str = "auto"
) -> TiltInvariance:
    """Exact check that the k-roll tilt tallies at x1 and x2 coincide and
    that their (above - below) equals the conditional distribution's.

    Requires min(x1, x2) > 9k strictly: only then is every unequal-pair
    outcome's sign decided by the x faces alone, making the cancellation
    argument airtight.
    """
    x1, x2 = Fraction(x1), Fraction(x2)
    if k < 1:
        raise ValueError("k must be at least 1")
    if not min(x1, x2) > 9 * k:
        raise ValueError(
            f"constant-tilt region needs min(x1, x2) > 9k = {9 * k}, "
            f"got min = {min(x1, x2)}"
        )

    def tallies(x: Fraction) -> TiltCounts:
        lat = core.to_lattice(family_die(x))
        return dominance.tilt_counts(core.power(lat.dist, k, kernel), 0)

    t1, t2 = tallies(x1), tallies(x2)
    cond = conditional_pair_distribution(k)
    tc = dominance.tilt_counts(cond, 0)
    net = tc.above - tc.below
    ok = t1 == t2 and (t1.above - t1.below) == net
    return TiltInvariance(x1, x2, k, t1, t2, net, ok)


@dataclass(frozen=True)
class FamilyPoint:
    """Scan result at one x.

    first_inversion is the first k whose label is LOSS after a pure WIN
    prefix, if found within kmax_searched.  A tie breaks the prefix
    without an inversion and is reported through tie_at.  span_one and
    third_moment_positive record the hypotheses under which an eventual
    inversion is guaranteed; a False value flags the point rather than
    failing the scan.
    """

    x: Fraction
    first_inversion: int | None
    kmax_searched: int
    tie_at: int | None = None
    span_one: bool = True
    third_moment_positive: bool = True


def default_family_grid() -> list[Fraction]:
    """Integer x from 10 to 200 step 2."""
    return [Fraction(x) for x in range(10, 201, 2)]


def _scan_one(args) -> FamilyPoint:
    x, kmax, kernel, cp_dir = args
    d = family_die(x)
    lat = core.to_lattice(d)
    span_one = lat.scale == 1 and dominance.span_shift(lat.dist).span == 1
    mu3_pos = core.raw_moment(d, 3) > 0
    cp = None
    if cp_dir is not None:
        fp = _ckpt.distribution_fingerprint(lat.dist, 1)
        cp = _ckpt.WalkCheckpoint(
            os.path.join(cp_dir, f"family-{fp[:16]}.json"), fp
        )
    labels = _ckpt.walk_labels(
        lat.dist, 1, kmax, kernel,
        checkpoint=cp, stop=lambda s: s[-1] != "W",
    )
    first_inv = None
    tie_at = None
    head = labels.rstrip("W")
    if head:
        k = len(head)
        if labels[k - 1] == "L":
            first_inv = k
        else:
            tie_at = k
    return FamilyPoint(x, first_inv, kmax, tie_at, span_one, mu3_pos)


def first_inversion_scan(
    xs: Iterable[Fraction | int] | None = None,
    kmax: int = 512,
    kernel: str = "auto",
    jobs: int = 1,
    checkpoint_dir: str | None = None,
    cancel: CancelFlag | None = None,
) -> list[FamilyPoint]:
    """First inversion of Delta(x) vs {0} for each x, in ascending x order.

    Each die is walked exactly, one convolution per roll count, stopping
    at the first non-WIN label (or kmax).  Points are independent; jobs
    spreads them over a process pool, and a checkpoint directory makes
    individual long walks resumable.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    grid = sorted(Fraction(x) for x in (default_family_grid() if xs is None else xs))
    if checkpoint_dir is not None:
        os.makedirs(checkpoint_dir, exist_ok=True)
    plan = [(x, kmax, kernel, checkpoint_dir) for x in grid]
    if jobs <= 1 or len(plan) <= 1:
        out = []
        for a in plan:
            core._check_cancel(cancel)
            out.append(_scan_one(a))
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(plan))) as pool:
            out = list(pool.map(_scan_one, plan))
    return out


@dataclass(frozen=True)
class QuadraticFit:
    c2: float
    c1: float
    c0: float
    residual: float


def quadratic_fit(points: Sequence[tuple[Fraction | float, int]]) -> QuadraticFit:
    """Least-squares k_inv ~ c2 x^2 + c1 x + c0 over the scan output.

    Reporting aid only; needs at least 3 distinct x values.
    """
    xs = [float(x) for x, _ in points]
    ks = [float(k) for _, k in points]
    if len(set(xs)) < 3:
        raise DegenerateFitError("quadratic fit needs 3 distinct x values")
    v = _np.vander(_np.asarray(xs), 3)
    coef, *_ = _np.linalg.lstsq(v, _np.asarray(ks), rcond=None)
    resid = float(_np.linalg.norm(v @ coef - _np.asarray(ks)))
    return QuadraticFit(float(coef[0]), float(coef[1]), float(coef[2]), resid)
