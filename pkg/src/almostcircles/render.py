"""Figure emission: SVG paths for curve families and matplotlib reports."""

from __future__ import annotations

from fractions import Fraction

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .curves import (
    AlmostCircle,
    build_almost_circle,
    good_function_float_coeffs,
    sector_affine_map,
)
from .hull_engine import SingletonCurve

PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
]


def _exaggerate(pts: np.ndarray, factor: float) -> np.ndarray:
    """Scale radial deviation from the unit circle to make tiny gaps visible."""
    if factor == 1.0:
        return pts
    r = np.hypot(pts[:, 0], pts[:, 1])
    safe = np.where(r == 0.0, 1.0, r)
    stretched = np.maximum(1.0 + factor * (r - 1.0), 0.02)
    return pts * (stretched / safe)[:, None]


def _curve_polylines(curves, samples_per_arc: int, exaggerate: float):
    polylines, dots = [], []
    for idx, curve in enumerate(curves):
        color = PALETTE[idx % len(PALETTE)]
        if isinstance(curve, SingletonCurve):
            dots.append((curve.point, color))
        else:
            pts = curve.sample_points(per_arc=samples_per_arc)
            pts = np.vstack([pts, pts[:1]])
            polylines.append((_exaggerate(pts, exaggerate), color))
    return polylines, dots


def _triangle_segments(curve: AlmostCircle):
    segs = []
    for i in range(1, curve.m + 1):
        for j in range(1, curve.t + 1):
            psi = sector_affine_map(curve.m, curve.t, i, j)
            corners = [psi.apply(0, 0), psi.apply(1, 0), psi.apply(0.5, 0.5)]
            segs.append(corners)
    return segs


def render_svg(
    curves,
    out_path: str,
    *,
    labels=None,
    samples_per_arc: int = 256,
    triangles: bool = False,
    exaggerate: float = 1.0,
    size: int = 640,
) -> None:
    """Write the family as an SVG of path polylines, one per member."""
    polylines, dots = _curve_polylines(curves, samples_per_arc, exaggerate)
    all_pts = [p for pts, _ in polylines for p in pts] + [p for p, _ in dots]
    if not all_pts:
        raise ValueError("nothing to render")
    arr = np.asarray(all_pts)
    lo = arr.min(axis=0)
    hi = arr.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    margin = 0.05 * span
    lo -= margin
    span += 2 * margin

    def to_px(p):
        x = (p[0] - lo[0]) / span * size
        y = size - (p[1] - lo[1]) / span * size
        return x, y

    def path_d(pts):
        cmds = ["M {:.3f},{:.3f}".format(*to_px(pts[0]))]
        cmds += ["L {:.3f},{:.3f}".format(*to_px(p)) for p in pts[1:]]
        return " ".join(cmds) + " Z"

    lines = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{size}' height='{size}' "
        f"viewBox='0 0 {size} {size}'>",
        "  <rect width='100%' height='100%' fill='white'/>",
    ]
    if triangles:
        first = next((c for c in curves if isinstance(c, AlmostCircle)), None)
        if first is not None:
            for corners in _triangle_segments(first):
                pts = " ".join("{:.3f},{:.3f}".format(*to_px(c)) for c in corners)
                lines.append(
                    f"  <polygon points='{pts}' fill='#dddddd' fill-opacity='0.5' "
                    "stroke='#aaaaaa' stroke-width='0.5'/>"
                )
    names = list(labels) if labels else [str(i + 1) for i in range(len(curves))]
    for (pts, color), name in zip(polylines, [n for c, n in zip(curves, names) if isinstance(c, AlmostCircle)]):
        lines.append(
            f"  <path d='{path_d(pts)}' fill='none' stroke='{color}' "
            f"stroke-width='1.2'><title>{name}</title></path>"
        )
    for (p, color) in dots:
        x, y = to_px(p)
        lines.append(f"  <circle cx='{x:.3f}' cy='{y:.3f}' r='3' fill='{color}'/>")
    lines.append("</svg>")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def render_matplotlib(
    curves,
    out_path: str,
    *,
    labels=None,
    samples_per_arc: int = 256,
    triangles: bool = False,
    exaggerate: float = 1.0,
) -> None:
    """Render the family to any matplotlib-supported raster/vector format."""
    polylines, dots = _curve_polylines(curves, samples_per_arc, exaggerate)
    names = list(labels) if labels else [str(i + 1) for i in range(len(curves))]
    fig, ax = plt.subplots(figsize=(6, 6))
    if triangles:
        first = next((c for c in curves if isinstance(c, AlmostCircle)), None)
        if first is not None:
            for corners in _triangle_segments(first):
                xs = [c[0] for c in corners] + [corners[0][0]]
                ys = [c[1] for c in corners] + [corners[0][1]]
                ax.fill(xs, ys, color="0.9", zorder=0)
                ax.plot(xs, ys, color="0.7", lw=0.5, zorder=1)
    poly_names = [n for c, n in zip(curves, names) if isinstance(c, AlmostCircle)]
    for (pts, color), name in zip(polylines, poly_names):
        ax.plot(pts[:, 0], pts[:, 1], color=color, lw=1.2, label=name)
    for p, color in dots:
        ax.plot([p[0]], [p[1]], "o", color=color, ms=4)
    ax.set_aspect("equal")
    if poly_names:
        ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


# -- report figures ----------------------------------------------------------------


def figure_function_family(out_path: str) -> None:
    """The arch family for a few parameters inside its bounding triangle."""
    xs = np.linspace(0.0, 1.0, 400)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot([0, 0.5, 1], [0, 0.5, 0], color="0.6", lw=1, ls="--")
    for k, alpha in enumerate((0.1, 0.3, 0.5, 0.7, 0.9)):
        ys = np.polyval(good_function_float_coeffs(alpha), xs)
        ax.plot(xs, ys, lw=1.0, color=PALETTE[k % len(PALETTE)], label=f"{alpha:.1f}")
    ax.set_xlabel("x")
    ax.set_ylabel("arch value")
    ax.legend(title="parameter", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def figure_accuracy(out_path: str) -> None:
    """Measured radius ratio against its lower bound as sectors increase."""
    counts = np.arange(3, 61)
    ratio = np.cos(np.pi / counts) ** 2
    bound = 1.0 - (np.pi / counts) ** 2
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(counts, ratio, label="radius ratio cos^2(pi/(mt))")
    ax.plot(counts, bound, ls="--", label="bound 1-(pi/(mt))^2")
    ax.set_xlabel("sector count mt")
    ax.set_ylabel("accuracy")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def figure_rigidity(out_path: str, same_errors, cross_residuals) -> None:
    """Separation between round-trip noise and cross-parameter residuals."""
    fig, ax = plt.subplots(figsize=(6, 4))
    bins = np.logspace(-14, 0, 57)
    ax.hist(np.clip(same_errors, 1e-14, None), bins=bins, alpha=0.7, label="same parameter")
    ax.hist(np.clip(cross_residuals, 1e-14, None), bins=bins, alpha=0.7, label="distinct parameters")
    ax.axvline(1e-3, color="k", ls=":", label="decision threshold")
    ax.set_xscale("log")
    ax.set_xlabel("recovered parameter discrepancy")
    ax.set_ylabel("count")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def reference_figure_curve() -> AlmostCircle:
    """The two-parameter reference almost-circle (m=2, t=3)."""
    a, b = Fraction(3, 10), Fraction(6, 10)
    return build_almost_circle([[a, a, b], [a, b, b]])
