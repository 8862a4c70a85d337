"""Parameter-space sweeps for balanced normalized 3- and 4-sided dice.

A balanced 3-sided die with largest face normalized to 1 is {1, x, -1-x};
a 4-sided one is {1, x, y, -1-x-y}.  Each grid point is matched against
the one-sided zero die over kmax rolls, yielding a label string and its
trinary code.  Records stream out in coordinate order and can be written
as CSV (one row per point) or as a 16-bit grayscale PGM whose shade is
the base-3 value of the first `depth` labels, so earlier rolls carry the
most weight.

Grid coordinates are exact rationals with a shared denominator, keeping
every label an exact integer tally.  The 4-sided fundamental domain is
the closed region

    -1/3 <= x <= 1,    -(1+x)/2 <= y <= -|x|,

equivalent to the ordering constraints 1 >= x >= y >= -1-x-y >= -1 on
the sorted faces; boundary points stay in so symmetric-die tie lines are
visible in maps.
"""

from __future__ import annotations

import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum, unique
from fractions import Fraction
from typing import Iterable, Sequence

from . import core, dominance
from .core import CancelFlag, Die
from .dominance import DominanceSequence, RelationLabel
from .errors import GridError

#: labels per grid point unless overridden; deep enough to separate the
#: visible structure yet cheap enough for dense grids
DEFAULT_KMAX = 20


@unique
class Domain(Enum):
    THREE_SIDED = "three"
    FOUR_SIDED_FUNDAMENTAL = "fundamental"
    FOUR_SIDED_FULL = "full"


@dataclass(frozen=True)
class GridSpec:
    """Sweep geometry: denominator `resolution`, walk depth, and domain."""

    resolution: int
    kmax: int = DEFAULT_KMAX
    domain: Domain = Domain.FOUR_SIDED_FUNDAMENTAL

    def __post_init__(self) -> None:
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        if self.kmax < 1:
            raise ValueError("kmax must be at least 1")


@dataclass(frozen=True)
class OutcomeRecord:
    """One grid point: exact coordinates, label sequence, trinary code."""

    coords: tuple[Fraction, ...]
    labels: DominanceSequence
    code: str


def die3(x: Fraction | int) -> Die:
    x = Fraction(x)
    return Die((Fraction(1), x, -1 - x))


def die4(x: Fraction | int, y: Fraction | int) -> Die:
    x, y = Fraction(x), Fraction(y)
    return Die((Fraction(1), x, y, -1 - x - y))


def in_fundamental_domain(x: Fraction | int, y: Fraction | int) -> bool:
    """Closed non-redundant region for 4-sided dice: face order
    1 >= x >= y >= -1-x-y >= -1 after sorting and sign normalization."""
    x, y = Fraction(x), Fraction(y)
    return (
        Fraction(-1, 3) <= x <= 1
        and -(1 + x) / 2 <= y <= -abs(x)
    )


def point_record(d: Die, kmax: int, kernel: str = "auto") -> tuple[DominanceSequence, str]:
    """Label walk of d against the zero die plus its trinary digits."""
    lat = core.to_lattice(d)
    seq = dominance.sequence_from_lattice(lat.dist, kmax, kernel)
    return seq, dominance.trinary_code(seq).digits


def _sweep3_chunk(args) -> list[tuple[tuple[Fraction, ...], str]]:
    xs, kmax = args
    out = []
    for x in xs:
        seq, code = point_record(die3(x), kmax)
        out.append(((x,), str(seq)))
    return out


def _sweep4_chunk(args) -> list[tuple[tuple[Fraction, ...], str]]:
    pts, kmax = args
    out = []
    for x, y in pts:
        seq, code = point_record(die4(x, y), kmax)
        out.append(((x, y), str(seq)))
    return out


def _labels_from_str(text: str) -> DominanceSequence:
    return DominanceSequence(tuple(RelationLabel.from_char(c) for c in text))


def _record_of(coords: tuple[Fraction, ...], label_str: str) -> OutcomeRecord:
    seq = _labels_from_str(label_str)
    return OutcomeRecord(coords, seq, dominance.trinary_code(seq).digits)


def _run_points(worker, chunks_args, jobs: int, cancel: CancelFlag | None):
    """Evaluate chunk args serially or on a process pool, preserving order."""
    if jobs <= 1 or len(chunks_args) <= 1:
        pieces = []
        for a in chunks_args:
            core._check_cancel(cancel)
            pieces.append(worker(a))
        return pieces
    with ProcessPoolExecutor(max_workers=min(jobs, len(chunks_args))) as pool:
        return list(pool.map(worker, chunks_args))


def _chunked(seq: Sequence, n_chunks: int) -> list[list]:
    n_chunks = max(1, min(n_chunks, len(seq)))
    size = -(-len(seq) // n_chunks)
    return [list(seq[i : i + size]) for i in range(0, len(seq), size)]


def default_xs3(q: int) -> list[Fraction]:
    """Default 3-sided abscissas -p/(2q), p = 1..q-1, covering (-1/2, 0)."""
    return [Fraction(-p, 2 * q) for p in range(1, q)]


def sweep3(
    spec: GridSpec,
    x_values: Iterable[Fraction] | None = None,
    jobs: int = 1,
    cancel: CancelFlag | None = None,
) -> list[OutcomeRecord]:
    """Records for 3-sided dice at x = -p/(2q) by default, sorted by x.

    x_values overrides the abscissa list (e.g. to probe positive x)."""
    if spec.domain is not Domain.THREE_SIDED:
        raise ValueError("sweep3 requires a THREE_SIDED grid spec")
    xs = sorted(
        Fraction(x) for x in (default_xs3(spec.resolution) if x_values is None else x_values)
    )
    chunk_args = [(c, spec.kmax) for c in _chunked(xs, _n_chunks(len(xs), jobs))]
    pieces = _run_points(_sweep3_chunk, chunk_args, jobs, cancel)
    return sorted(
        (_record_of(coords, s) for piece in pieces for coords, s in piece),
        key=lambda r: r.coords,
    )


def _n_chunks(n_points: int, jobs: int) -> int:
    if jobs <= 1:
        return max(1, n_points // 256)
    return max(jobs * 4, 1)


def grid_axes(spec: GridSpec) -> tuple[list[Fraction], list[Fraction]]:
    """Bounding-box lattice axes (xs ascending, ys ascending) for 4-sided
    domains; THREE_SIDED has no fixed box (its axis is the record set)."""
    q = spec.resolution
    if spec.domain is Domain.FOUR_SIDED_FUNDAMENTAL:
        xs = [Fraction(i, q) for i in range(-((q + 2) // 3), q + 1) if Fraction(i, q) >= Fraction(-1, 3)]
        ys = [Fraction(j, q) for j in range(-q, 1)]
    elif spec.domain is Domain.FOUR_SIDED_FULL:
        xs = [Fraction(i, q) for i in range(-q, q + 1)]
        ys = [Fraction(j, q) for j in range(-q, q + 1)]
    else:
        raise ValueError("grid_axes needs a 4-sided domain")
    return xs, ys


def sweep4(
    spec: GridSpec,
    jobs: int = 1,
    cancel: CancelFlag | None = None,
) -> list[OutcomeRecord]:
    """Records for 4-sided dice over the domain's grid points, sorted by
    (x, y).  FUNDAMENTAL keeps only points inside the fundamental domain;
    FULL keeps the whole box [-1, 1]^2."""
    xs, ys = grid_axes(spec)
    if spec.domain is Domain.FOUR_SIDED_FUNDAMENTAL:
        pts = [(x, y) for x in xs for y in ys if in_fundamental_domain(x, y)]
    else:
        pts = [(x, y) for x in xs for y in ys]
    chunk_args = [(c, spec.kmax) for c in _chunked(pts, _n_chunks(len(pts), jobs))]
    pieces = _run_points(_sweep4_chunk, chunk_args, jobs, cancel)
    return sorted(
        (_record_of(coords, s) for piece in pieces for coords, s in piece),
        key=lambda r: r.coords,
    )


# ----------------------------------------------------------------------
# artifacts
# ----------------------------------------------------------------------

def write_csv(records: Sequence[OutcomeRecord], path: str) -> None:
    """One row per record: x[,y],labels,code with exact rational coords."""
    if not records:
        raise ValueError("no records to write")
    dim = len(records[0].coords)
    header = ("x,labels,code" if dim == 1 else "x,y,labels,code") + "\n"
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header)
        for r in records:
            if len(r.coords) != dim:
                raise GridError("mixed coordinate dimensions in record set")
            cs = ",".join(str(c) for c in r.coords)
            fh.write(f"{cs},{r.labels},{r.code}\n")


def read_csv(path: str) -> list[OutcomeRecord]:
    """Inverse of write_csv (round-trips exactly)."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header not in ("x,labels,code", "x,y,labels,code"):
            raise GridError(f"unrecognized header {header!r}")
        dim = 1 if header == "x,labels,code" else 2
        out = []
        for line in fh:
            parts = line.strip().split(",")
            if len(parts) != dim + 2:
                raise GridError(f"bad row {line!r}")
            coords = tuple(Fraction(p) for p in parts[:dim])
            out.append(_record_of(coords, parts[dim]))
    return out


#: PGM pixel for grid points outside the swept domain
BACKGROUND_GRAY = 65535


def _gray_of(code_prefix: str) -> int:
    depth = len(code_prefix)
    return int(code_prefix, 3) * 65535 // (3 ** depth - 1)


def pixel_grid(
    records: Sequence[OutcomeRecord],
    spec: GridSpec,
    depth: int | None = None,
    slice_k: int | None = None,
) -> tuple[list[Fraction], list[Fraction], list[list[int]]]:
    """Gray matrix behind the PGM/plot renderers.

    Returns (xs ascending, ys ascending, rows indexed [y][x]) with gray
    in [0, 65535]: base-3 value of the first `depth` labels (depth
    defaults to kmax), or a single roll's label with slice_k (loss 0,
    tie mid, win full).  Grid points without a record render background.
    """
    if not records:
        raise GridError("no records to render")
    if (depth is None) == (slice_k is None):
        if depth is not None:
            raise GridError("give either depth or slice_k, not both")
        depth = spec.kmax
    if depth is not None and not 1 <= depth <= spec.kmax:
        raise GridError(f"depth {depth} outside 1..kmax={spec.kmax}")
    if slice_k is not None and not 1 <= slice_k <= spec.kmax:
        raise GridError(f"slice_k {slice_k} outside 1..kmax={spec.kmax}")

    dim = len(records[0].coords)
    if dim == 1:
        xs = sorted({r.coords[0] for r in records})
        ys = [Fraction(0)]
        index = {(r.coords[0], Fraction(0)): r for r in records}
    else:
        xs, ys = grid_axes(spec)
        index = {}
        for r in records:
            key = (r.coords[0], r.coords[1])
            if key in index:
                raise GridError(f"duplicate record at {key}")
            index[key] = r
    if len(index) != len(records):
        raise GridError("duplicate records in set")
    xpos = {x: i for i, x in enumerate(xs)}
    ypos = {y: i for i, y in enumerate(ys)}
    rows = [[BACKGROUND_GRAY] * len(xs) for _ in ys]
    for (x, y), r in index.items():
        if x not in xpos or y not in ypos:
            raise GridError(f"record at ({x}, {y}) is off the grid")
        if slice_k is not None:
            gray = r.labels.label(slice_k).digit * 65535 // 2
        else:
            if len(r.code) < depth:
                raise GridError("record shallower than requested depth")
            gray = _gray_of(r.code[:depth])
        rows[ypos[y]][xpos[x]] = gray
    return xs, ys, rows


def write_pgm(
    records: Sequence[OutcomeRecord],
    spec: GridSpec,
    path: str,
    depth: int | None = None,
    slice_k: int | None = None,
) -> None:
    """Binary 16-bit P5 grayscale map of the record set.

    Shading as in pixel_grid.  Rows run top-to-bottom in decreasing y,
    columns left-to-right in increasing x.
    """
    xs, ys, rows = pixel_grid(records, spec, depth, slice_k)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{len(xs)} {len(ys)}\n65535\n".encode("ascii"))
        for row in reversed(rows):
            fh.write(struct.pack(f">{len(row)}H", *row))


def read_pgm(path: str) -> tuple[int, int, list[list[int]]]:
    """Parse a P5 16-bit PGM back into (width, height, row-major grays)."""
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P5":
        raise GridError("not a binary PGM written by this module")
    w, h = map(int, parts[1].split())
    if parts[2] != b"65535":
        raise GridError("expected 16-bit grayscale")
    raw = parts[3]
    if len(raw) != w * h * 2:
        raise GridError("pixel payload size mismatch")
    rows = [
        list(struct.unpack(f">{w}H", raw[r * w * 2 : (r + 1) * w * 2]))
        for r in range(h)
    ]
    return w, h, rows
