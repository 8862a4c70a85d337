"""Figure rendering for the report path: parameter-space maps and the
inversion-delay scatter, written to image files next to the CSV/PGM
artifacts.  Headless backend; no interactivity.
"""

from __future__ import annotations

from typing import Sequence

from .inversion import FamilyPoint, QuadraticFit
from .mapper import Domain, GridSpec, OutcomeRecord, pixel_grid


#: per-format savefig metadata that strips volatile fields (dates, library
#: versions) so repeated runs emit byte-identical files
_METADATA = {
    "png": {"Software": "antidice"},
    "svg": {"Date": None},
    "pdf": {"CreationDate": None},
}


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_map(
    records: Sequence[OutcomeRecord],
    spec: GridSpec,
    path: str,
    depth: int | None = None,
    slice_k: int | None = None,
    dpi: int = 150,
) -> None:
    """Raster the sweep's gray matrix (same data as the PGM) to an image.

    Shade encodes the trinary code prefix so earlier rolls dominate;
    out-of-domain grid points render as the background shade.
    """
    plt = _plt()
    xs, ys, rows = pixel_grid(records, spec, depth, slice_k)
    import numpy as np

    arr = np.asarray(rows, dtype=np.float64) / 65535.0
    fig, ax = plt.subplots(figsize=(7, 6 if len(ys) > 1 else 2))
    extent = (float(xs[0]), float(xs[-1]), float(ys[0]), float(ys[-1]))
    if len(ys) == 1:
        arr = np.repeat(arr, 2, axis=0)
        extent = (float(xs[0]), float(xs[-1]), 0.0, 1.0)
        ax.get_yaxis().set_visible(False)
    else:
        ax.set_ylabel("y")
    ax.imshow(
        arr,
        cmap="viridis",
        vmin=0.0,
        vmax=1.0,
        origin="lower",
        extent=extent,
        aspect="auto",
        interpolation="nearest",
    )
    ax.set_xlabel("x")
    what = f"first {depth or spec.kmax} rolls" if slice_k is None else f"roll {slice_k}"
    kind = "3-sided" if spec.domain is Domain.THREE_SIDED else "4-sided"
    ax.set_title(f"{kind} outcome map, {what}")
    fig.savefig(path, dpi=dpi, bbox_inches="tight", metadata=_METADATA.get(path.rsplit(".", 1)[-1].lower()))
    plt.close(fig)


def render_family(
    points: Sequence[FamilyPoint],
    path: str,
    fit: QuadraticFit | None = None,
    dpi: int = 150,
) -> None:
    """Scatter of first-inversion roll counts over x, with the optional
    least-squares parabola overlaid."""
    plt = _plt()
    found = [(float(p.x), p.first_inversion) for p in points if p.first_inversion]
    fig, ax = plt.subplots(figsize=(7, 5))
    if found:
        ax.scatter([x for x, _ in found], [k for _, k in found], s=14, label="first inversion")
    if fit is not None and found:
        import numpy as np

        gx = np.linspace(min(x for x, _ in found), max(x for x, _ in found), 256)
        ax.plot(gx, fit.c2 * gx ** 2 + fit.c1 * gx + fit.c0, lw=1.2,
                label=f"{fit.c2:.4g} x^2 + {fit.c1:.4g} x + {fit.c0:.4g}")
        ax.legend()
    ax.set_xlabel("x")
    ax.set_ylabel("first inversion (rolls)")
    ax.set_title("Inversion delay across the family")
    fig.savefig(path, dpi=dpi, bbox_inches="tight", metadata=_METADATA.get(path.rsplit(".", 1)[-1].lower()))
    plt.close(fig)
