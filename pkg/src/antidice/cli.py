"""Command-line surface.

Ten subcommands over the exact engine:

    compare    labels of A vs B over a roll range
    sequence   label walk of A vs B plus its trinary code
    tilt       exact tally triple of a die's k-roll sum about a center
    span       lattice shift/span of a die
    edgeworth  expansion constants, error-bound coefficients, threshold
    verify     exhaustive per-roll check against an expectation
    map3       3-sided parameter sweep with CSV/PGM/plot artifacts
    map4       4-sided parameter sweep (fundamental or full domain)
    family     late-inversion family scan with optional quadratic fit
    cycle      intransitivity check around a list of dice

Output formats: human (default), json (schema-stable, sorted keys), csv.
Exit codes: 0 success, 1 domain error (bad dice, bad ranges, I/O), 2
verification mismatch.  Malformed input never raises out of run().

Potentially huge integers (tallies out of m^k) are emitted as decimal
strings in JSON so consumers without bignum JSON parsers stay safe;
rationals are "p/q" strings.  All decimals printed by `edgeworth` are
truncated, not rounded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, TextIO

from . import __version__, core, dominance, edgeworth, inversion, mapper
from .dominance import RelationLabel
from .errors import AntidiceError
from .mapper import Domain, GridSpec

FORMATS = ("human", "json", "csv")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports errors instead of calling sys.exit."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class CommandSpec:
    subcommand: str
    options: argparse.Namespace
    output: str


def _add_format(p: _Parser) -> None:
    p.add_argument("--format", choices=FORMATS, default="human",
                   help="output format (default: human)")


def _add_jobs(p: _Parser) -> None:
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: ANTIDICE_JOBS or 1)")


def build_parser() -> _Parser:
    top = _Parser(prog="antidice",
                  description="Exact dice dominance, tail certificates, and parameter maps.")
    top.add_argument("--version", action="version", version=f"antidice {__version__}")
    sub = top.add_subparsers(dest="subcommand", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("compare",
                       help="labels of A vs B over a roll range")
    p.add_argument("--a", required=True, help='first die, e.g. "1,1,4,4,5,6"')
    p.add_argument("--b", required=True, help="second die")
    p.add_argument("--rolls", required=True, help='roll count or inclusive range "lo..hi"')
    p.add_argument("--kernel", choices=core.KERNELS, default="auto")
    _add_format(p)

    p = sub.add_parser("sequence",
                       help="label walk of A vs B plus trinary code")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--kernel", choices=core.KERNELS, default="auto")
    _add_format(p)

    p = sub.add_parser("tilt",
                       help="exact tally triple of a die's k-roll sum")
    p.add_argument("--die", required=True)
    p.add_argument("--rolls", default="1", help="roll count (default 1)")
    p.add_argument("--center", default="mean",
                   help='tally center: rational or "mean" (default)')
    p.add_argument("--kernel", choices=core.KERNELS, default="auto")
    _add_format(p)

    p = sub.add_parser("span",
                       help="lattice shift/span of a die")
    p.add_argument("--die", required=True)
    _add_format(p)

    p = sub.add_parser("edgeworth",
                       help="expansion constants and certified threshold")
    p.add_argument("--a", help="first die (with --b; the difference die is analyzed)")
    p.add_argument("--b", help="second die")
    p.add_argument("--die", help="analyze this die directly instead of a difference")
    p.add_argument("--digits", type=int, default=6,
                   help="printed decimal places, truncated (default 6)")
    p.add_argument("--no-threshold", action="store_true",
                   help="skip the certified threshold scan")
    p.add_argument("--check-factor", type=int, default=20,
                   help="scan radius multiplier for the certificate (default 20)")
    _add_format(p)

    p = sub.add_parser("verify",
                       help="exhaustive per-roll label check")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--min-k", type=int, default=1)
    p.add_argument("--max-k", type=int, required=True)
    p.add_argument("--expect-base", choices=("win", "loss", "tie"), default="loss",
                   help="expected label everywhere (default loss)")
    p.add_argument("--expect-win-at", default="",
                   help="comma-separated rolls expected WIN instead")
    p.add_argument("--expect-loss-at", default="")
    p.add_argument("--expect-tie-at", default="")
    p.add_argument("--checkpoint-dir", default=None,
                   help="persist/resume walk state here")
    p.add_argument("--resume", action="store_true",
                   help="resume from --checkpoint-dir (same behavior; documents intent)")
    p.add_argument("--kernel", choices=core.KERNELS, default="auto")
    _add_jobs(p)
    _add_format(p)

    p = sub.add_parser("map3",
                       help="3-sided sweep: die {1, x, -1-x} vs {0}")
    p.add_argument("--resolution", type=int, required=True,
                   help="grid denominator q; default sweep x = -p/(2q)")
    p.add_argument("--kmax", type=int, default=mapper.DEFAULT_KMAX)
    p.add_argument("--x-min", default=None, help="alternate range lower bound (rational)")
    p.add_argument("--x-max", default=None, help="alternate range upper bound (rational)")
    p.add_argument("--out", default=None, help="CSV file path")
    p.add_argument("--pgm", default=None, help="PGM image path")
    p.add_argument("--depth", type=int, default=None,
                   help="code prefix length for PGM shade (default kmax)")
    p.add_argument("--slice-k", type=int, default=None,
                   help="shade a single roll's label instead of a prefix")
    p.add_argument("--plot", default=None, help="figure path (PNG)")
    _add_jobs(p)
    _add_format(p)

    p = sub.add_parser("map4",
                       help="4-sided sweep: die {1, x, y, -1-x-y} vs {0}")
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--kmax", type=int, default=mapper.DEFAULT_KMAX)
    p.add_argument("--domain", choices=("fundamental", "full"), default="fundamental")
    p.add_argument("--out", default=None, help="CSV file path")
    p.add_argument("--pgm", default=None, help="PGM image path")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--slice-k", type=int, default=None)
    p.add_argument("--plot", default=None, help="figure path (PNG)")
    _add_jobs(p)
    _add_format(p)

    p = sub.add_parser("family",
                       help="late-inversion family {x, 5, 3, -9, 1-x} scan")
    p.add_argument("--x-min", default="10")
    p.add_argument("--x-max", default="200")
    p.add_argument("--x-step", default="2")
    p.add_argument("--kmax", type=int, default=512)
    p.add_argument("--fit", action="store_true", help="report a quadratic fit")
    p.add_argument("--out", default=None, help="CSV file path")
    p.add_argument("--plot", default=None, help="figure path (PNG)")
    p.add_argument("--checkpoint-dir", default=None)
    p.add_argument("--kernel", choices=core.KERNELS, default="auto")
    _add_jobs(p)
    _add_format(p)

    p = sub.add_parser("cycle",
                       help="intransitive cycle check over 3+ dice")
    p.add_argument("--die", action="append", required=True, dest="dice",
                   help="repeat for each die in cycle order (3 or more)")
    p.add_argument("--rolls", default="1")
    p.add_argument("--kernel", choices=core.KERNELS, default="auto")
    _add_format(p)

    return top


def parse(argv: Sequence[str]) -> CommandSpec:
    ns = build_parser().parse_args(list(argv))
    if ns.subcommand is None:
        raise _UsageError("antidice: a subcommand is required (see --help)")
    return CommandSpec(ns.subcommand, ns, getattr(ns, "format", "human"))


# ----------------------------------------------------------------------
# shared helpers
# ----------------------------------------------------------------------

def _parse_rolls(text: str) -> tuple[int, int]:
    s = text.strip()
    try:
        if ".." in s:
            lo_s, hi_s = s.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
        else:
            lo = hi = int(s)
    except ValueError:
        raise ValueError(f'bad roll range {text!r}; use "k" or "lo..hi"') from None
    if not 1 <= lo <= hi:
        raise ValueError(f"roll range must satisfy 1 <= lo <= hi, got {text!r}")
    return lo, hi


def _parse_k_list(text: str) -> list[int]:
    if not text.strip():
        return []
    out = []
    for tok in text.split(","):
        k = int(tok)
        if k < 1:
            raise ValueError(f"roll counts must be positive, got {k}")
        out.append(k)
    return out


def _jobs_of(ns: argparse.Namespace) -> int:
    v = getattr(ns, "jobs", None)
    if v is None:
        env = os.environ.get("ANTIDICE_JOBS", "").strip()
        v = int(env) if env else 1
    if v < 1:
        raise ValueError("--jobs must be at least 1")
    return v


def _emit_json(obj, out: TextIO) -> None:
    out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _die_json(d: core.Die) -> list[str]:
    return [str(f) for f in d.faces]


# ----------------------------------------------------------------------
# subcommand handlers
# ----------------------------------------------------------------------

def _cmd_compare(ns, out, err) -> int:
    a, b = core.parse_die(ns.a), core.parse_die(ns.b)
    lo, hi = _parse_rolls(ns.rolls)
    seq = dominance.dominance_sequence(a, b, hi, ns.kernel)
    labels = str(seq)[lo - 1 : hi]
    if ns.format == "json":
        _emit_json({
            "a": _die_json(a), "b": _die_json(b),
            "k_first": lo, "k_last": hi, "labels": labels,
        }, out)
    elif ns.format == "csv":
        out.write("k,label\n")
        for i, ch in enumerate(labels):
            out.write(f"{lo + i},{ch}\n")
    else:
        out.write(labels + "\n")
    return 0


def _cmd_sequence(ns, out, err) -> int:
    a, b = core.parse_die(ns.a), core.parse_die(ns.b)
    if ns.kmax < 1:
        raise ValueError("--kmax must be at least 1")
    seq = dominance.dominance_sequence(a, b, ns.kmax, ns.kernel)
    code = dominance.trinary_code(seq)
    if ns.format == "json":
        _emit_json({
            "a": _die_json(a), "b": _die_json(b), "kmax": ns.kmax,
            "labels": str(seq), "code": code.digits, "value": str(code.value),
        }, out)
    elif ns.format == "csv":
        out.write("k,label,digit\n")
        for k in range(1, ns.kmax + 1):
            lb = seq.label(k)
            out.write(f"{k},{lb.char},{lb.digit}\n")
    else:
        out.write(f"labels: {seq}\n")
        out.write(f"code:   {code.digits} (base-3 value {code.value})\n")
    return 0


def _cmd_tilt(ns, out, err) -> int:
    d = core.parse_die(ns.die)
    lo, hi = _parse_rolls(ns.rolls)
    if lo != hi:
        raise ValueError("tilt takes a single roll count")
    lat = core.to_lattice(d)
    dist = core.power(lat.dist, lo, ns.kernel)
    if ns.center.strip() == "mean":
        center = None
    else:
        center = Fraction(ns.center) / lat.scale
    tc = dominance.tilt_counts(dist, center)
    if ns.format == "json":
        _emit_json({
            "die": _die_json(d), "rolls": lo,
            "above": str(tc.above), "equal": str(tc.equal), "below": str(tc.below),
            "tilt": str(tc.tilt), "label": tc.label.char,
        }, out)
    elif ns.format == "csv":
        out.write("above,equal,below,tilt,label\n")
        out.write(f"{tc.above},{tc.equal},{tc.below},{tc.tilt},{tc.label.char}\n")
    else:
        out.write(f"above: {tc.above}\nequal: {tc.equal}\nbelow: {tc.below}\n")
        out.write(f"tilt:  {tc.tilt}\nlabel: {tc.label.char}\n")
    return 0


def _cmd_span(ns, out, err) -> int:
    d = core.parse_die(ns.die)
    lat = core.to_lattice(d)
    ss = dominance.span_shift(lat.dist)
    if ns.format == "json":
        _emit_json({
            "die": _die_json(d), "shift": ss.shift, "span": ss.span,
            "lattice_scale": str(lat.scale),
        }, out)
    elif ns.format == "csv":
        out.write("shift,span,lattice_scale\n")
        out.write(f"{ss.shift},{ss.span},{lat.scale}\n")
    else:
        out.write(f"shift: {ss.shift}\nspan:  {ss.span}\nlattice scale: {lat.scale}\n")
    return 0


_EXACT_PARAM_FIELDS = ("a", "b", "m_min", "C", "mu1", "mu2", "mu3", "mu4")
_REAL_PARAM_FIELDS = ("sigma", "nu3", "nu4", "beta", "p0", "p1",
                      "q1", "q2", "q3", "q4", "q5", "r", "n_min")


def _cmd_edgeworth(ns, out, err) -> int:
    if ns.die is not None:
        if ns.a is not None or ns.b is not None:
            raise ValueError("give either --die or --a/--b, not both")
        dist = core.to_lattice(core.parse_die(ns.die)).dist
    elif ns.a is not None and ns.b is not None:
        dist = core.to_lattice(
            core.difference_die(core.parse_die(ns.a), core.parse_die(ns.b))
        ).dist
    else:
        raise ValueError("edgeworth needs --die or both --a and --b")
    if ns.digits < 1:
        raise ValueError("--digits must be at least 1")
    p = edgeworth.compute_params(dist)
    trunc = edgeworth.truncate_decimal

    rows: list[tuple[str, str, str]] = []
    for name in _EXACT_PARAM_FIELDS:
        v = getattr(p, name)
        rows.append((name, str(v), trunc(Fraction(v), ns.digits)))
    for name in _REAL_PARAM_FIELDS:
        rows.append((name, "", trunc(getattr(p, name), ns.digits)))
    rows.append(("leading_coefficient", "", trunc(edgeworth.leading_coefficient(p), ns.digits)))
    for name, v in edgeworth.expanded_coefficients(p).items():
        rows.append((f"bound.{name}", "", trunc(v, ns.digits)))

    cert = None
    cert_error = None
    if not ns.no_threshold:
        try:
            cert = edgeworth.certified_threshold(p, ns.check_factor)
        except AntidiceError as exc:
            cert_error = str(exc)

    if ns.format == "json":
        obj = {
            "params": {n: {"exact": e or None, "decimal": dec} for n, e, dec in rows},
            "digits": ns.digits,
            "threshold": None if cert is None else {
                "threshold": cert.threshold, "checked_to": cert.checked_to,
                "monotone_from": cert.monotone_from, "limit_sign": cert.limit_sign,
            },
            "threshold_error": cert_error,
        }
        _emit_json(obj, out)
    elif ns.format == "csv":
        out.write("name,exact,decimal\n")
        for n, e, dec in rows:
            out.write(f"{n},{e},{dec}\n")
        if cert is not None:
            out.write(f"threshold,{cert.threshold},{cert.threshold}\n")
            out.write(f"checked_to,{cert.checked_to},{cert.checked_to}\n")
    else:
        width = max(len(n) for n, _, _ in rows)
        for n, e, dec in rows:
            exact = f"  (= {e})" if e else ""
            out.write(f"{n:<{width}}  {dec}{exact}\n")
        if cert is not None:
            out.write(f"threshold      {cert.threshold}\n")
            out.write(f"checked_to     {cert.checked_to}\n")
            out.write(f"monotone_from  {cert.monotone_from}\n")
            out.write(f"limit_sign     {cert.limit_sign:+d}\n")
        elif cert_error is not None:
            out.write(f"threshold      unavailable: {cert_error}\n")
    return 0


def _cmd_verify(ns, out, err) -> int:
    a, b = core.parse_die(ns.a), core.parse_die(ns.b)
    if not 1 <= ns.min_k <= ns.max_k:
        raise ValueError("need 1 <= --min-k <= --max-k")
    if ns.resume and ns.checkpoint_dir is None:
        raise ValueError("--resume needs --checkpoint-dir")
    base = {"win": RelationLabel.WIN, "loss": RelationLabel.LOSS,
            "tie": RelationLabel.TIE}[ns.expect_base]
    exceptions: dict[int, RelationLabel] = {}
    for text, lb in ((ns.expect_win_at, RelationLabel.WIN),
                     (ns.expect_loss_at, RelationLabel.LOSS),
                     (ns.expect_tie_at, RelationLabel.TIE)):
        for k in _parse_k_list(text):
            if exceptions.get(k, lb) is not lb:
                raise ValueError(f"conflicting expectations for roll {k}")
            exceptions[k] = lb
    expected = edgeworth.uniform_expectation(base, exceptions)
    mismatches = edgeworth.exhaustive_verify(
        a, b, (ns.min_k, ns.max_k), expected, kernel=ns.kernel,
        checkpoint_dir=ns.checkpoint_dir, jobs=_jobs_of(ns),
    )
    if ns.format == "json":
        _emit_json({
            "a": _die_json(a), "b": _die_json(b),
            "k_first": ns.min_k, "k_last": ns.max_k,
            "mismatches": mismatches,
        }, out)
    elif ns.format == "csv":
        out.write("mismatch_k\n")
        for k in mismatches:
            out.write(f"{k}\n")
    else:
        out.write(f"{len(mismatches)} mismatches\n")
        for k in mismatches:
            out.write(f"  roll {k}\n")
    return 2 if mismatches else 0


def _map_artifacts(records, spec, ns, err) -> dict:
    files = {"csv": None, "pgm": None, "plot": None}
    if ns.out is not None:
        mapper.write_csv(records, ns.out)
        files["csv"] = ns.out
    if ns.pgm is not None:
        mapper.write_pgm(records, spec, ns.pgm, depth=ns.depth, slice_k=ns.slice_k)
        files["pgm"] = ns.pgm
    elif ns.depth is not None or ns.slice_k is not None:
        raise ValueError("--depth/--slice-k need --pgm")
    if ns.plot is not None:
        from . import plots

        plots.render_map(records, spec, ns.plot,
                         depth=ns.depth, slice_k=ns.slice_k)
        files["plot"] = ns.plot
    return files


def _records_csv(records, out) -> None:
    dim = len(records[0].coords) if records else 2
    out.write(("x,labels,code" if dim == 1 else "x,y,labels,code") + "\n")
    for r in records:
        cs = ",".join(str(c) for c in r.coords)
        out.write(f"{cs},{r.labels},{r.code}\n")


def _cmd_map3(ns, out, err) -> int:
    spec = GridSpec(ns.resolution, ns.kmax, Domain.THREE_SIDED)
    if (ns.x_min is None) != (ns.x_max is None):
        raise ValueError("give both --x-min and --x-max or neither")
    x_values = None
    if ns.x_min is not None:
        lo, hi = Fraction(ns.x_min), Fraction(ns.x_max)
        if lo > hi:
            raise ValueError("--x-min must not exceed --x-max")
        q = ns.resolution
        i_lo = -((-lo * q).__floor__())  # ceil(lo*q)
        i_hi = (hi * q).__floor__()
        x_values = [Fraction(i, q) for i in range(i_lo, i_hi + 1)]
        if not x_values:
            raise ValueError("alternate range contains no grid points")
    records = mapper.sweep3(spec, x_values=x_values, jobs=_jobs_of(ns))
    anomalies = [str(r.coords[0]) for r in records
                 if any(lb is RelationLabel.TIE for lb in r.labels.labels)]
    for x in anomalies:
        err.write(f"warning: exact tie in 3-sided record at x = {x}\n")
    files = _map_artifacts(records, spec, ns, err)
    if ns.format == "json":
        _emit_json({
            "points": len(records), "kmax": ns.kmax, "resolution": ns.resolution,
            "tie_anomalies": anomalies, "files": files,
        }, out)
    elif ns.format == "csv":
        _records_csv(records, out)
    else:
        out.write(f"points: {len(records)}\n")
        out.write(f"tie anomalies: {len(anomalies)}\n")
        for kind in ("csv", "pgm", "plot"):
            if files[kind]:
                out.write(f"wrote {kind}: {files[kind]}\n")
    return 0


def _cmd_map4(ns, out, err) -> int:
    domain = Domain.FOUR_SIDED_FUNDAMENTAL if ns.domain == "fundamental" else Domain.FOUR_SIDED_FULL
    spec = GridSpec(ns.resolution, ns.kmax, domain)
    records = mapper.sweep4(spec, jobs=_jobs_of(ns))
    files = _map_artifacts(records, spec, ns, err)
    if ns.format == "json":
        _emit_json({
            "points": len(records), "kmax": ns.kmax, "resolution": ns.resolution,
            "domain": ns.domain, "files": files,
        }, out)
    elif ns.format == "csv":
        _records_csv(records, out)
    else:
        out.write(f"points: {len(records)}\n")
        for kind in ("csv", "pgm", "plot"):
            if files[kind]:
                out.write(f"wrote {kind}: {files[kind]}\n")
    return 0


def _cmd_family(ns, out, err) -> int:
    lo, hi, step = Fraction(ns.x_min), Fraction(ns.x_max), Fraction(ns.x_step)
    if step <= 0:
        raise ValueError("--x-step must be positive")
    if lo > hi:
        raise ValueError("--x-min must not exceed --x-max")
    if ns.kmax < 1:
        raise ValueError("--kmax must be at least 1")
    xs = []
    x = lo
    while x <= hi:
        xs.append(x)
        x += step
    points = inversion.first_inversion_scan(
        xs, ns.kmax, kernel=ns.kernel, jobs=_jobs_of(ns),
        checkpoint_dir=ns.checkpoint_dir,
    )
    for pt in points:
        if not pt.span_one:
            err.write(f"warning: x = {pt.x} does not have lattice span 1\n")
        if not pt.third_moment_positive:
            err.write(f"warning: x = {pt.x} has nonpositive third moment\n")
        if pt.tie_at is not None:
            err.write(f"warning: x = {pt.x} hit an exact tie at roll {pt.tie_at}\n")

    fit = None
    if ns.fit:
        data = [(pt.x, pt.first_inversion) for pt in points if pt.first_inversion]
        fit = inversion.quadratic_fit(data)

    if ns.out is not None:
        with open(ns.out, "w", encoding="ascii", newline="\n") as fh:
            _family_csv(points, fh)
    if ns.plot is not None:
        from . import plots

        plots.render_family(points, ns.plot, fit)

    if ns.format == "json":
        _emit_json({
            "points": [{
                "x": str(pt.x),
                "first_inversion": pt.first_inversion,
                "kmax_searched": pt.kmax_searched,
                "tie_at": pt.tie_at,
                "span_one": pt.span_one,
                "third_moment_positive": pt.third_moment_positive,
            } for pt in points],
            "fit": None if fit is None else {
                "c2": fit.c2, "c1": fit.c1, "c0": fit.c0, "residual": fit.residual,
            },
        }, out)
    elif ns.format == "csv":
        _family_csv(points, out)
    else:
        for pt in points:
            found = pt.first_inversion if pt.first_inversion is not None else "-"
            out.write(f"x = {pt.x}: first inversion {found} (searched to {pt.kmax_searched})\n")
        if fit is not None:
            out.write(f"fit.c2: {fit.c2!r}\nfit.c1: {fit.c1!r}\n")
            out.write(f"fit.c0: {fit.c0!r}\nfit.residual: {fit.residual!r}\n")
    return 0


def _family_csv(points, out) -> None:
    out.write("x,first_inversion,kmax_searched\n")
    for pt in points:
        inv = "" if pt.first_inversion is None else pt.first_inversion
        out.write(f"{pt.x},{inv},{pt.kmax_searched}\n")


def _cmd_cycle(ns, out, err) -> int:
    dice = [core.parse_die(t) for t in ns.dice]
    if len(dice) < 3:
        raise ValueError("cycle needs at least 3 dice")
    lo, hi = _parse_rolls(ns.rolls)
    if lo != hi:
        raise ValueError("cycle takes a single roll count")
    labels = []
    for i, d in enumerate(dice):
        nxt = dice[(i + 1) % len(dice)]
        labels.append(dominance.compare(d, nxt, lo, ns.kernel))
    is_cycle = all(lb is RelationLabel.WIN for lb in labels)
    if ns.format == "json":
        _emit_json({
            "dice": [_die_json(d) for d in dice], "rolls": lo,
            "pairs": [{"first": i, "second": (i + 1) % len(dice), "label": lb.char}
                      for i, lb in enumerate(labels)],
            "cycle": is_cycle,
        }, out)
    elif ns.format == "csv":
        out.write("first,second,label\n")
        for i, lb in enumerate(labels):
            out.write(f"{i},{(i + 1) % len(dice)},{lb.char}\n")
    else:
        for i, lb in enumerate(labels):
            rel = {"W": "beats", "L": "loses to", "T": "ties"}[lb.char]
            out.write(f"die {i} {rel} die {(i + 1) % len(dice)}\n")
        out.write(f"intransitive cycle: {'yes' if is_cycle else 'no'}\n")
    return 0


_HANDLERS = {
    "compare": _cmd_compare,
    "sequence": _cmd_sequence,
    "tilt": _cmd_tilt,
    "span": _cmd_span,
    "edgeworth": _cmd_edgeworth,
    "verify": _cmd_verify,
    "map3": _cmd_map3,
    "map4": _cmd_map4,
    "family": _cmd_family,
    "cycle": _cmd_cycle,
}


def run(
    args: Sequence[str] | CommandSpec,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """Execute one command; returns the process exit code.

    Callable in-process: pass an argv list (or a pre-parsed CommandSpec)
    and optional output streams.
    """
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    try:
        spec = args if isinstance(args, CommandSpec) else parse(args)
    except _UsageError as exc:
        err.write(f"{exc}\n")
        return 1
    except SystemExit as exc:  # argparse --help/--version
        return int(exc.code or 0)
    try:
        return _HANDLERS[spec.subcommand](spec.options, out, err)
    except (AntidiceError, ValueError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))
