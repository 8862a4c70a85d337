"""Tail machinery for lattice random walks: leading term, explicit error
bound, certified dominance threshold, and the exhaustive small-k verifier.

For a balanced (mean zero) lattice variable X with span b and shift a, the
tilt of the n-fold sum X[n] about 0 admits the expansion

    T(X[n]) = -nu3 / (3 sqrt(2 pi n)) + E(n),

where nu3 is the standardized third moment and E(n) is controlled by an
explicit bound built from the moments alone:

    |E(n)| <= 2 q2/n
            + e^(-n r/2) / (n r)
            + 2 q5 / sqrt(2 pi n^3)
            + e^(-2 sqrt(n/q1)) * ( (1+p0) / (2 sqrt(n/q1))
                                    + 4 p0 q1 / n
                                    + (q3+q4) / (2 sqrt(n/q1) pi (q1 n)^(1/4))
                                    + 2 q4 / (pi (q1 n)^(1/4)) )

with constants

    p0 = e - 1                      p1 = 3 (pi - 3) / pi^3
    q1 = 1/5 + nu4/24               q2 = p0 q1 / 2 + b^2 p1 / mu2
    q3 = |beta|,  beta = (b/2 - (n a mod b)) / sigma   (constant when a = 0)
    q4 = |nu3| / 6
    q5 = q3^3/6 + 3 q3^2 q4 / 2 + 15 q3 q4^2 / 2 + 35 q4^3 / 2
    r  = 16 b^2 m / (pi C sigma)^2
    n_min = max{ q1/4, 1/q1, 81 b^4 / (q1 pi^4 mu2^2) },

valid for n >= n_min.  m is the smallest outcome probability and C the
l1-norm of a certificate vector; C = 2b is used throughout (see
compute_params).  Once n is large enough that the leading term dominates
the bound, the sign of the tilt is locked to the sign of -nu3 forever; the
crossover roll count is what certified_threshold pins down.

Everything irrationa is carried in mpmath arithmetic at >= 50 significant
digits.  Certified comparisons apply an outward rounding envelope: bound
values are nudged up and leading-term magnitudes down by a relative margin
enormously larger than the arithmetic error yet enormously smaller than
any decision gap, so a certificate can only be pessimistic.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import mpmath as mp

from . import checkpoint as _ckpt
from . import core, dominance
from .core import CancelFlag, Die, LatticeDistribution
from .dominance import RelationLabel
from .errors import (
    CertificateUnavailableError,
    NoLeadingTermError,
    SingletonSupportError,
    UnbalancedDistributionError,
)

try:
    import numpy as _np
except ImportError:  # pragma: no cover
    _np = None

#: working precision (decimal digits) for all real-valued constants
PRECISION_DPS = 60

#: relative width of the outward rounding envelope used in certificates;
#: dwarfs accumulated arithmetic error at PRECISION_DPS, vanishes next to
#: every decision margin that actually occurs
_ENVELOPE = mp.mpf("1e-50")


def _mpf_of(x: Fraction | int) -> mp.mpf:
    x = Fraction(x)
    return mp.mpf(x.numerator) / x.denominator


def truncate_decimal(x, places: int) -> str:
    """Decimal string of x truncated (not rounded) toward zero.

    Matches trailing-ellipsis prints: 2.0687987 at 6 places is "2.068798".
    A sign is emitted only when surviving digits are nonzero.
    """
    if places < 0:
        raise ValueError("places must be nonnegative")
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        scaled = abs(x.numerator) * 10 ** places // x.denominator
        neg = x < 0
    else:
        with mp.workdps(PRECISION_DPS):
            scaled = int(mp.floor(abs(mp.mpf(x)) * mp.mpf(10) ** places))
            neg = x < 0
    sign = "-" if neg and scaled != 0 else ""
    if places == 0:
        return f"{sign}{scaled}"
    return f"{sign}{scaled // 10 ** places}.{scaled % 10 ** places:0{places}d}"


# ======================================================================
# constants
# ======================================================================

@dataclass(frozen=True)
class EdgeworthParams:
    """Every constant the expansion needs, derived from one distribution.

    Exact fields (int / Fraction): a, b, m_min, C, mu1..mu4.  The rest are
    mpmath reals computed at `dps` digits.  beta and q3 store the a = 0
    value b/(2 sigma); for a != 0 that is still the exact upper envelope
    of |beta| over n (the bound only ever uses beta through |beta|), and
    beta_at gives the per-n value.
    """

    a: int
    b: int
    m_min: Fraction
    C: Fraction
    mu1: Fraction
    mu2: Fraction
    mu3: Fraction
    mu4: Fraction
    sigma: mp.mpf
    nu3: mp.mpf
    nu4: mp.mpf
    beta: mp.mpf
    p0: mp.mpf
    p1: mp.mpf
    q1: mp.mpf
    q2: mp.mpf
    q3: mp.mpf
    q4: mp.mpf
    q5: mp.mpf
    r: mp.mpf
    n_min: mp.mpf
    dps: int


def compute_params(
    d: LatticeDistribution,
    C: Fraction | int | None = None,
    dps: int = PRECISION_DPS,
) -> EdgeworthParams:
    """Derive all expansion constants for a balanced lattice distribution.

    C defaults to 2b: a certificate vector c with cX = b, sum(c) = 0 always
    exists with l1-norm 2b, and the canonical printed r value is the one
    this choice produces.  Pass C explicitly to override.
    """
    if d.support_size() < 2:
        raise SingletonSupportError("expansion needs at least two support points")
    if d.mean() != 0:
        raise UnbalancedDistributionError(
            f"distribution mean is {d.mean()}, expansion requires exact mean 0"
        )
    mu1 = Fraction(0)
    mu2 = d.raw_moment(2)
    mu3 = d.raw_moment(3)
    mu4 = d.raw_moment(4)
    shift_a, span_b = dominance.span_shift(d)
    m_min = Fraction(min(c for c in d.weights if c), d.total)
    C = Fraction(2 * span_b) if C is None else Fraction(C)
    if C <= 0:
        raise ValueError("C must be positive")

    with mp.workdps(dps):
        sigma = mp.sqrt(_mpf_of(mu2))
        nu3 = _mpf_of(mu3) / sigma ** 3
        nu4 = _mpf_of(mu4) / sigma ** 4
        beta = (span_b / mp.mpf(2)) / sigma
        p0 = mp.e - 1
        p1 = 3 * (mp.pi - 3) / mp.pi ** 3
        q1 = mp.mpf(1) / 5 + nu4 / 24
        q2 = p0 * q1 / 2 + span_b ** 2 * p1 / _mpf_of(mu2)
        q3 = abs(beta)
        q4 = abs(nu3) / 6
        q5 = q3 ** 3 / 6 + 3 * q3 ** 2 * q4 / 2 + 15 * q3 * q4 ** 2 / 2 + 35 * q4 ** 3 / 2
        r = 16 * span_b ** 2 * _mpf_of(m_min) / (mp.pi * _mpf_of(C) * sigma) ** 2
        n_min = max(q1 / 4, 1 / q1, 81 * span_b ** 4 / (q1 * mp.pi ** 4 * _mpf_of(mu2) ** 2))

    return EdgeworthParams(
        a=shift_a, b=span_b, m_min=m_min, C=C,
        mu1=mu1, mu2=mu2, mu3=mu3, mu4=mu4,
        sigma=sigma, nu3=nu3, nu4=nu4, beta=beta,
        p0=p0, p1=p1, q1=q1, q2=q2, q3=q3, q4=q4, q5=q5,
        r=r, n_min=n_min, dps=dps,
    )


def beta_at(p: EdgeworthParams, n: int) -> mp.mpf:
    """Per-n oscillation offset (b/2 - (n a mod b)) / sigma."""
    with mp.workdps(p.dps):
        return (mp.mpf(p.b) / 2 - (n * p.a) % p.b) / p.sigma


def L_function(p: EdgeworthParams, c: int) -> mp.mpf:
    """Lattice-corrected limit numerator ((-c) mod b - c mod b)/sigma - nu3."""
    with mp.workdps(p.dps):
        return (((-c) % p.b) - (c % p.b)) / p.sigma - p.nu3


def leading_coefficient(p: EdgeworthParams) -> mp.mpf:
    """Coefficient of 1/sqrt(n) in the leading term: -nu3/(3 sqrt(2 pi))."""
    with mp.workdps(p.dps):
        return -p.nu3 / (3 * mp.sqrt(2 * mp.pi))


def leading_term(p: EdgeworthParams, n) -> mp.mpf:
    """-nu3 / (3 sqrt(2 pi n)); magnitude nudged down so certificates
    never lean on an optimistic leading term."""
    if n < 1:
        raise ValueError("n must be at least 1")
    with mp.workdps(p.dps):
        return (-p.nu3 / (3 * mp.sqrt(2 * mp.pi * mp.mpf(n)))) * (1 - _ENVELOPE)


def bound_terms(p: EdgeworthParams, n) -> tuple[mp.mpf, mp.mpf, mp.mpf, mp.mpf]:
    """The four closed-form pieces of the error bound at n, rounded up."""
    with mp.workdps(p.dps):
        n = mp.mpf(n)
        up = 1 + _ENVELOPE
        t1 = 2 * p.q2 / n
        t2 = mp.e ** (-n * p.r / 2) / (n * p.r)
        t3 = 2 * p.q5 / mp.sqrt(2 * mp.pi * n ** 3)
        u = mp.sqrt(n / p.q1)
        t4 = mp.e ** (-2 * u) * (
            (1 + p.p0) / (2 * u)
            + 4 * p.p0 * p.q1 / n
            + (1 / (mp.pi * (p.q1 * n) ** mp.mpf("0.25")))
            * ((p.q3 + p.q4) / (2 * u) + 2 * p.q4)
        )
        return t1 * up, t2 * up, t3 * up, t4 * up


def error_bound(p: EdgeworthParams, n) -> mp.mpf:
    """Rigorous upper bound on |E(n)|, valid from ceil(n_min) upward."""
    with mp.workdps(p.dps):
        if n < mp.ceil(p.n_min):
            raise ValueError(
                f"n = {n} is below the validity floor ceil(n_min) = {mp.ceil(p.n_min)}"
            )
        return sum(bound_terms(p, n))


def expanded_coefficients(p: EdgeworthParams) -> dict[str, mp.mpf]:
    """The error bound with all constants folded in, as named coefficients.

    Reading them back:
        bound(n) = inv_n / n
                 + exp_n_amp * e^(-exp_n_rate * n) / n
                 + inv_n32 / n^(3/2)
                 + e^(-exp_sqrt_rate * sqrt(n)) * ( sqrt_amp / sqrt(n)
                     + inv_n_amp / n
                     + quarter_amp * n^(-1/4) * (quarter_sqrt / sqrt(n)
                                                 + quarter_const) )
    """
    with mp.workdps(p.dps):
        return {
            "inv_n": 2 * p.q2,
            "exp_n_amp": 1 / p.r,
            "exp_n_rate": p.r / 2,
            "inv_n32": 2 * p.q5 / mp.sqrt(2 * mp.pi),
            "exp_sqrt_rate": 2 / mp.sqrt(p.q1),
            "sqrt_amp": (1 + p.p0) * mp.sqrt(p.q1) / 2,
            "inv_n_amp": 4 * p.p0 * p.q1,
            "quarter_amp": 1 / (mp.pi * p.q1 ** mp.mpf("0.25")),
            "quarter_sqrt": (p.q3 + p.q4) * mp.sqrt(p.q1) / 2,
            "quarter_const": 2 * p.q4,
        }


# ======================================================================
# certified threshold
# ======================================================================

@dataclass(frozen=True)
class ThresholdCertificate:
    """Outcome of the crossover search.

    For every n in [threshold, checked_to] the leading term strictly
    dominates the error bound (pointwise scan, outward rounding), and on
    [monotone_from, infinity) every bound term times sqrt(n) is a product
    of factors that are individually nonincreasing there, while the
    leading term times sqrt(n) is constant; so domination extends to all
    n >= threshold.  limit_sign is the locked tilt sign, sign(-nu3).
    """

    threshold: int
    checked_to: int
    monotone_from: int
    limit_sign: int

    def __int__(self) -> int:
        return self.threshold


def _margin_hp(p: EdgeworthParams, n: int) -> mp.mpf:
    """leading magnitude minus bound, both with outward rounding."""
    with mp.workdps(p.dps):
        return abs(leading_term(p, n)) - sum(bound_terms(p, n))


def _bound_vector(p: EdgeworthParams, ns):
    """float64 evaluation of the bound over an integer vector (prescan only)."""
    cs = {k: float(v) for k, v in expanded_coefficients(p).items()}
    n = ns.astype(float)
    with _np.errstate(under="ignore"):
        t12 = cs["inv_n"] / n + cs["exp_n_amp"] * _np.exp(-cs["exp_n_rate"] * n) / n
        t3 = cs["inv_n32"] / n ** 1.5
        t4 = _np.exp(-cs["exp_sqrt_rate"] * _np.sqrt(n)) * (
            cs["sqrt_amp"] / _np.sqrt(n)
            + cs["inv_n_amp"] / n
            + cs["quarter_amp"] * n ** -0.25 * (cs["quarter_sqrt"] / _np.sqrt(n) + cs["quarter_const"])
        )
    return t12 + t3 + t4


def certified_threshold(
    p: EdgeworthParams, check_factor: int = 20
) -> ThresholdCertificate:
    """Smallest N with |leading| > bound for every n in [N, check_factor*N].

    Restricted to span 1, shift 0 (the only case with n-independent beta).
    A float64 prescan locates the crossover; every decision within a
    relative whisker of zero, plus the boundary pair itself, is re-decided
    in high-precision arithmetic with the outward rounding envelope.  The
    scan is followed by the term-wise monotone-decay certificate described
    on ThresholdCertificate.
    """
    if p.nu3 == 0:
        raise NoLeadingTermError("third moment vanishes; no leading term")
    if p.b != 1 or p.a != 0:
        raise CertificateUnavailableError(
            f"certificate requires span 1 and shift 0, got b={p.b}, a={p.a}"
        )
    if check_factor < 2:
        raise ValueError("check_factor must be at least 2")
    with mp.workdps(p.dps):
        n0 = int(mp.ceil(p.n_min))
    c_lead = abs(float(leading_coefficient(p)))

    cap = max(8 * n0, 1 << 12)
    while True:
        ns = _np.arange(n0, cap + 1, dtype=_np.int64)
        lead = c_lead / _np.sqrt(ns.astype(float))
        margin = lead - _bound_vector(p, ns)
        # relative margin too close to zero for float64 to be trusted
        unsure = _np.abs(margin) < 1e-9 * lead
        nonpos = margin <= 0
        for i in _np.flatnonzero(unsure):
            nonpos[i] = _margin_hp(p, int(ns[i])) <= 0
        idx = _np.flatnonzero(nonpos)
        if len(idx) == 0:
            candidate = n0
        else:
            candidate = int(ns[idx[-1]]) + 1
        if candidate * check_factor <= cap:
            break
        cap *= 4
        if cap > 1 << 34:
            raise CertificateUnavailableError(
                "no crossover found within the scan budget"
            )

    # high-precision confirmation of the boundary itself
    if _margin_hp(p, candidate) <= 0:
        raise CertificateUnavailableError(
            "float prescan and high-precision evaluation disagree at the boundary"
        )
    if candidate > n0 and _margin_hp(p, candidate - 1) > 0:
        raise CertificateUnavailableError(
            "float prescan missed an earlier crossover"
        )

    checked_to = candidate * check_factor
    _certify_monotone_tail(p, checked_to)
    with mp.workdps(p.dps):
        limit_sign = 1 if p.nu3 < 0 else -1
    return ThresholdCertificate(
        threshold=candidate,
        checked_to=checked_to,
        monotone_from=checked_to,
        limit_sign=limit_sign,
    )


def _certify_monotone_tail(p: EdgeworthParams, n_from: int) -> None:
    """Check bound(n)*sqrt(n) decays beyond n_from and sits below the
    leading coefficient there, so the scan's verdict extends to infinity.

    Term by term, bound(n)*sqrt(n) is a sum of products of factors of the
    forms const > 0, n^(-alpha) with alpha >= 0, e^(-cn), and
    e^(-c sqrt(n)) * n^p; the first three are nonincreasing everywhere and
    the last is nonincreasing once sqrt(n) >= 2p/c.  With p <= 1/4 and
    c = 2/sqrt(q1) the switchover sits far below any realistic n_from, but
    it is checked, not assumed.
    """
    with mp.workdps(p.dps):
        c = 2 / mp.sqrt(p.q1)
        p_max = mp.mpf(1) / 4
        if mp.sqrt(n_from) < 2 * p_max / c:
            raise CertificateUnavailableError(
                "monotone tail certificate needs a larger check radius"
            )
        envelope_at_start = sum(bound_terms(p, n_from)) * mp.sqrt(n_from)
        if envelope_at_start >= abs(leading_term(p, n_from)) * mp.sqrt(n_from):
            raise CertificateUnavailableError(
                "bound does not sit below the leading term at the tail handoff"
            )


# ======================================================================
# exhaustive verifier
# ======================================================================

def _walk_shard(args) -> tuple[int, str]:
    offset, weights, k_first, k_last, kernel, cp_path, fingerprint = args
    d = LatticeDistribution(offset, tuple(weights), sum(weights))
    cp = None
    if cp_path is not None:
        cp = _ckpt.WalkCheckpoint(cp_path, fingerprint)
    return k_first, _ckpt.walk_labels(d, k_first, k_last, kernel, None, cp)


def _shard_plan(
    dist: LatticeDistribution, lo: int, hi: int, jobs: int, kernel: str,
    checkpoint_dir: str | None,
):
    count = hi - lo + 1
    jobs = max(1, min(jobs, count))
    chunk = -(-count // jobs)
    plan = []
    start = lo
    while start <= hi:
        end = min(start + chunk - 1, hi)
        fp = _ckpt.distribution_fingerprint(dist, start)
        cp_path = None
        if checkpoint_dir is not None:
            cp_path = os.path.join(checkpoint_dir, f"verify-{fp[:16]}.json")
        plan.append(
            (dist.offset, tuple(dist.weights), start, end, kernel, cp_path, fp)
        )
        start = end + 1
    return plan


def exhaustive_verify(
    a: Die,
    b: Die,
    k_range: tuple[int, int],
    expected: Callable[[int], RelationLabel],
    kernel: str = "auto",
    checkpoint_dir: str | None = None,
    jobs: int = 1,
    cancel: CancelFlag | None = None,
) -> list[int]:
    """Exact per-roll check of a-vs-b labels against an expectation.

    Walks every k in the inclusive range with the exact engine and returns
    the sorted list of roll counts whose label differs from expected(k).
    With a checkpoint directory the walk persists at power-of-two roll
    counts and resumes after interruption.  jobs > 1 shards the range into
    contiguous blocks, each seeded by binary exponentiation; results merge
    deterministically (cancellation is honored on the in-process path).
    """
    lo, hi = k_range
    if not 1 <= lo <= hi:
        raise ValueError("need 1 <= k_lo <= k_hi")
    if checkpoint_dir is not None:
        os.makedirs(checkpoint_dir, exist_ok=True)
    dist = core.to_lattice(core.difference_die(a, b)).dist
    plan = _shard_plan(dist, lo, hi, jobs, kernel, checkpoint_dir)
    if len(plan) == 1:
        (_, _, start, end, _, cp_path, fp) = plan[0]
        cp = _ckpt.WalkCheckpoint(cp_path, fp) if cp_path is not None else None
        labels = _ckpt.walk_labels(dist, start, end, kernel, cancel, cp)
        pieces = [(start, labels)]
    else:
        with ProcessPoolExecutor(max_workers=len(plan)) as pool:
            pieces = sorted(pool.map(_walk_shard, plan))
    mismatches = []
    for start, labels in pieces:
        for i, ch in enumerate(labels):
            k = start + i
            if RelationLabel.from_char(ch) is not expected(k):
                mismatches.append(k)
    return mismatches


def uniform_expectation(
    base: RelationLabel, exceptions: dict[int, RelationLabel] | None = None
) -> Callable[[int], RelationLabel]:
    """Expectation function: `base` everywhere except the listed rolls."""
    table = dict(exceptions or {})
    return lambda k: table.get(k, base)
