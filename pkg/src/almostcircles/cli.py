"""Command-line interface.

Subcommands: represent, verify, dim, render, props.  Exit codes: 0 success,
2 invalid input, 3 verification failure.  Diagnostics go to standard error
as JSON lines; primary results go to standard output.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import random
import sys
from fractions import Fraction

from . import __version__
from .combinatorics import (
    GeometryError,
    convex_dimension,
    geometry_from_dict,
    orderings_from_geometry,
    verify_convex_geometry,
)
from .curves import (
    AffineMap,
    ArcSamples,
    CurveError,
    PolynomialArc,
    accuracy,
    arc_equivalence_residual,
    auxiliary_max_check,
    build_almost_circle,
    canonical_arc_parameters,
    eval_good_function,
    good_function_derivatives,
)
from .hull_engine import DEFAULT_DIRECTIONS
from .representation import (
    certificate_to_json,
    family_from_certificate,
    represent_geometry,
    verify_certificate,
)
from .render import (
    figure_accuracy,
    figure_function_family,
    figure_rigidity,
    reference_figure_curve,
    render_matplotlib,
    render_svg,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_VERIFICATION_FAILED = 3


def diag(**fields) -> None:
    print(json.dumps(fields, sort_keys=True), file=sys.stderr)


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise GeometryError(f"cannot read {path}: {exc}")


def _load_geometry(path: str):
    sys_, labels = geometry_from_dict(_load_json(path))
    return sys_, labels


def cmd_represent(args) -> int:
    if args.multiplicity is None and not 0.0 < args.epsilon < 1.0:
        diag(level="error", check="input", detail=f"epsilon must lie in (0,1), got {args.epsilon}")
        return EXIT_INVALID_INPUT
    if args.multiplicity is not None and args.multiplicity < 1:
        diag(level="error", check="input", detail="multiplicity must be >= 1")
        return EXIT_INVALID_INPUT
    try:
        system, labels = _load_geometry(args.geometry)
        report = verify_convex_geometry(system)
        if not report.is_convex_geometry:
            witness = report.witnesses[0] if report.witnesses else None
            diag(
                level="error",
                check="convex-geometry",
                detail="input fails the anti-exchange or closure axioms",
                witness=None
                if witness is None
                else {"A": sorted(witness[0]), "x": witness[1], "y": witness[2]},
            )
            return EXIT_INVALID_INPUT
    except GeometryError as exc:
        diag(level="error", check="input", detail=str(exc))
        return EXIT_INVALID_INPUT
    try:
        _family, cert = represent_geometry(
            system,
            epsilon=args.epsilon,
            multiplicity=args.multiplicity,
            family_id=args.family_id,
            directions=args.directions,
            labels=labels,
        )
    except (GeometryError, CurveError) as exc:
        diag(level="error", check="verification", detail=str(exc))
        return EXIT_VERIFICATION_FAILED
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(certificate_to_json(cert))
    print(
        json.dumps(
            {
                "certificate": args.out,
                "n": system.n,
                "orders": len(cert["orders"]),
                "multiplicity": cert["multiplicity"],
                "accuracy": cert["accuracy"]["ratio"],
                "verdict": "pass",
            },
            sort_keys=True,
        )
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cert = _load_json(args.certificate)
    except GeometryError as exc:
        diag(level="error", check="input", detail=str(exc))
        return EXIT_INVALID_INPUT
    report = verify_certificate(cert, directions=args.directions)
    for check in report.checks:
        diag(
            level="info" if check.ok else "error",
            check=check.name,
            ok=check.ok,
            detail=check.detail,
        )
    verdict = "pass" if report.ok else "fail"
    out = {"verdict": verdict}
    if not report.ok:
        out["first_failure"] = report.first_failure.name
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK if report.ok else EXIT_VERIFICATION_FAILED


def cmd_dim(args) -> int:
    try:
        system, _labels = _load_geometry(args.geometry)
        report = verify_convex_geometry(system)
        if not report.is_convex_geometry:
            diag(level="error", check="convex-geometry", detail="not a convex geometry")
            return EXIT_INVALID_INPUT
        dim = convex_dimension(system)
        orders = orderings_from_geometry(system)
    except GeometryError as exc:
        diag(level="error", check="input", detail=str(exc))
        return EXIT_INVALID_INPUT
    print(
        json.dumps(
            {
                "n": system.n,
                "convex_dimension": dim,
                "maximal_chains": len(orders.orders),
                "orderings": [list(o) for o in orders.orders],
            },
            sort_keys=True,
        )
    )
    return EXIT_OK


def cmd_render(args) -> int:
    try:
        cert = _load_json(args.certificate)
        system, _padded, family = family_from_certificate(cert)
    except (GeometryError, CurveError, KeyError) as exc:
        diag(level="error", check="input", detail=str(exc))
        return EXIT_INVALID_INPUT
    labels = cert.get("geometry", {}).get("labels") or [
        str(e) for e in range(1, system.n + 1)
    ]
    ext = os.path.splitext(args.out)[1].lower()
    kwargs = dict(
        labels=labels,
        samples_per_arc=args.samples_per_arc,
        triangles=args.triangles,
        exaggerate=args.exaggerate,
    )
    if ext == ".svg":
        render_svg(family.curves, args.out, **kwargs)
    else:
        render_matplotlib(family.curves, args.out, **kwargs)
    diag(level="info", check="render", out=args.out, members=system.n)
    return EXIT_OK


# -- props battery -----------------------------------------------------------------


def _props_rows(seed: int):
    rng = random.Random(seed)
    rows = []

    def row(check, metric, value, threshold, ok):
        rows.append(
            {
                "check": check,
                "metric": metric,
                "value": repr(value),
                "threshold": threshold,
                "status": "pass" if ok else "fail",
            }
        )

    def rational():
        return Fraction(rng.randint(1, 996), 997)

    # Endpoint identities, exact.
    bad = 0
    for _ in range(10_000):
        a = rational()
        if eval_good_function(a, 0) != 0 or eval_good_function(a, 1) != 0:
            bad += 1
        d0, _ = good_function_derivatives(a, 0)
        d1, _ = good_function_derivatives(a, 1)
        if d0 != 1 or d1 != -1:
            bad += 1
    row("endpoint-identities", "violations", bad, "0 (exact)", bad == 0)

    # Concavity and the triangle bound at rational samples.
    bad_conc = bad_tri = 0
    for _ in range(40):
        a = rational()
        for _ in range(250):
            x = rational()
            _, second = good_function_derivatives(a, x)
            if second >= 0:
                bad_conc += 1
            v = eval_good_function(a, x)
            if not 0 < v < Fraction(1, 2) - abs(x - Fraction(1, 2)):
                bad_tri += 1
    row("strict-concavity", "violations", bad_conc, "0", bad_conc == 0)
    row("triangle-bound", "violations", bad_tri, "0", bad_tri == 0)

    # Pointwise monotonicity in the parameter.
    bad_mono = 0
    for _ in range(100):
        a, b = sorted((rational(), rational()))
        if a == b:
            continue
        for _ in range(100):
            x = rational()
            if eval_good_function(a, x) <= eval_good_function(b, x):
                bad_mono += 1
    row("parameter-monotonicity", "violations", bad_mono, "0", bad_mono == 0)

    peak = auxiliary_max_check()
    row(
        "auxiliary-peak",
        "a(4/5)",
        float(peak),
        "1.6384 exactly",
        peak == Fraction(1024, 625),
    )

    # Rigidity battery: round trips and cross fits.
    same_errors, cross_residuals = [], []
    ok_same = ok_cross = True
    for _ in range(30):
        a = Fraction(rng.randint(100, 899), 1000)
        psi = _random_affine(rng)
        samples = ArcSamples.from_arc(PolynomialArc(a, psi))
        rec_alpha, rec_map = canonical_arc_parameters(samples)
        err = abs(rec_alpha - float(a))
        map_err = max(
            abs(x - y) for x, y in zip(rec_map.as_tuple(), psi.as_tuple())
        )
        same_errors.append(max(err, 1e-16))
        if err > 1e-9 or map_err > 1e-9:
            ok_same = False
    for _ in range(30):
        a = Fraction(rng.randint(100, 800), 1000)
        gap = Fraction(rng.randint(50, 199), 1000)
        b = a + gap
        s1 = ArcSamples.from_arc(PolynomialArc(a, _random_affine(rng)))
        s2 = ArcSamples.from_arc(PolynomialArc(b, _random_affine(rng)))
        residual = arc_equivalence_residual(s1, s2)
        cross_residuals.append(residual)
        if residual <= 1e-3:
            ok_cross = False
    row(
        "rigidity-round-trip",
        "max recovery error",
        max(same_errors),
        "<= 1e-9",
        ok_same,
    )
    row(
        "rigidity-cross-fit",
        "min residual",
        min(cross_residuals),
        "> 1e-3",
        ok_cross,
    )

    # Accuracy table.
    for mt in (6, 12, 24):
        m = mt // 3
        circle = build_almost_circle([[Fraction(1, 2)] * 3 for _ in range(m)])
        rep = accuracy(circle)
        expected = math.cos(math.pi / mt) ** 2
        ok = abs(rep.ratio - expected) < 1e-12 and rep.ratio >= rep.bound
        row(f"accuracy-mt{mt}", "r1/r2", rep.ratio, f">= {rep.bound:.6f}", ok)

    # Joint differentiability of the reference curve.
    circle = reference_figure_curve()
    worst = 0.0
    for k, arc in enumerate(circle.arcs):
        succ = circle.arcs[(k + 1) % len(circle.arcs)]
        v1, v2 = arc.tangent_end(), succ.tangent_start()
        cross = v1[0] * v2[1] - v1[1] * v2[0]
        dot = v1[0] * v2[0] + v1[1] * v2[1]
        worst = max(worst, abs(math.atan2(cross, dot)))
    row("joint-tangency", "max angle gap", worst, "< 1e-9", worst < 1e-9)

    return rows, same_errors, cross_residuals


def _random_affine(rng, scale=2.0):
    while True:
        entries = [rng.uniform(-scale, scale) for _ in range(4)]
        if abs(entries[0] * entries[3] - entries[1] * entries[2]) > 0.1:
            return AffineMap(*entries, rng.uniform(-4, 4), rng.uniform(-4, 4))


def cmd_props(args) -> int:
    rows, same_errors, cross_residuals = _props_rows(args.seed)
    width = max(len(r["check"]) for r in rows) + 2
    print(f"{'check'.ljust(width)}{'metric'.ljust(24)}{'threshold'.ljust(18)}status")
    for r in rows:
        print(
            f"{r['check'].ljust(width)}{r['metric'].ljust(24)}"
            f"{str(r['threshold']).ljust(18)}{r['status']}"
        )
    failures = [r for r in rows if r["status"] != "pass"]
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        csv_path = os.path.join(args.out_dir, "props.csv")
        with open(csv_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=["check", "metric", "value", "threshold", "status"]
            )
            writer.writeheader()
            writer.writerows(rows)
        figure_function_family(os.path.join(args.out_dir, "function_family.png"))
        figure_accuracy(os.path.join(args.out_dir, "accuracy.png"))
        figure_rigidity(
            os.path.join(args.out_dir, "rigidity.png"), same_errors, cross_residuals
        )
        diag(level="info", check="props", out_dir=args.out_dir, rows=len(rows))
    for r in failures:
        diag(level="error", check=r["check"], detail="property failed", value=r["value"])
    return EXIT_OK if not failures else EXIT_VERIFICATION_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="almostcircles",
        description=(
            "Represent finite convex geometries by families of almost-circle "
            "curves and verify them with an independent convex-hull engine."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("represent", help="build a certified curve family from a geometry")
    p.add_argument("geometry", help="geometry JSON ({'n': ..., 'closed_sets': ...})")
    p.add_argument("--epsilon", type=float, default=0.5, help="accuracy target 1-epsilon")
    p.add_argument(
        "--multiplicity", type=int, default=None, help="override the derived multiplicity"
    )
    p.add_argument("--family-id", default="default", help="allocation identifier")
    p.add_argument("--directions", type=int, default=DEFAULT_DIRECTIONS)
    p.add_argument("--out", default="certificate.json")
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("verify", help="re-check a certificate from scratch")
    p.add_argument("certificate")
    p.add_argument("--directions", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dim", help="convex dimension and chain orderings of a geometry")
    p.add_argument("geometry")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("render", help="draw the curve family of a certificate")
    p.add_argument("certificate")
    p.add_argument("--out", default="figure.svg", help=".svg for paths, else matplotlib")
    p.add_argument("--triangles", action="store_true", help="overlay sector triangles")
    p.add_argument(
        "--exaggerate",
        type=float,
        default=1.0,
        help="radial gap exaggeration factor (1 = true shape)",
    )
    p.add_argument("--samples-per-arc", type=int, default=256)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("props", help="run the function-family property battery")
    p.add_argument("--seed", type=int, default=20160823)
    p.add_argument("--out-dir", default=None, help="write props.csv and figures here")
    p.set_defaults(func=cmd_props)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GeometryError, CurveError) as exc:
        diag(level="error", check="input", detail=str(exc))
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
