"""SVG and matplotlib emission."""

from fractions import Fraction

import numpy as np
import pytest

from almostcircles.curves import build_almost_circle
from almostcircles.hull_engine import SingletonCurve
from almostcircles.render import (
    _exaggerate,
    reference_figure_curve,
    render_matplotlib,
    render_svg,
)


def test_exaggerate_identity_and_scaling():
    pts = np.array([[1.0, 0.0], [0.0, 0.97], [0.9, 0.1]])
    assert np.array_equal(_exaggerate(pts, 1.0), pts)
    scaled = _exaggerate(pts, 10.0)
    r_before = np.hypot(pts[:, 0], pts[:, 1])
    r_after = np.hypot(scaled[:, 0], scaled[:, 1])
    assert np.allclose(r_after, 1.0 + 10.0 * (r_before - 1.0))
    # Deeply interior points clamp instead of flipping through the origin.
    deep = _exaggerate(np.array([[0.0, 0.5]]), 10.0)
    assert np.hypot(*deep[0]) == pytest.approx(0.02)


def test_reference_curve_matches_two_parameter_matrix():
    curve = reference_figure_curve()
    a, b = Fraction(3, 10), Fraction(6, 10)
    assert curve.S == ((a, a, b), (a, b, b))
    assert curve.m == 2 and curve.t == 3


def test_svg_mixed_family(tmp_path):
    out = tmp_path / "mixed.svg"
    curves = [
        build_almost_circle([[Fraction(1, 2)] * 3]),
        SingletonCurve(0.2, 0.1),
        SingletonCurve(-0.4, 0.3),
    ]
    render_svg(curves, str(out), labels=["c", "p1", "p2"])
    text = out.read_text()
    assert text.count("<path") == 1
    assert text.count("<circle") == 2


def test_svg_singleton_only_family(tmp_path):
    out = tmp_path / "dots.svg"
    render_svg([SingletonCurve(0.0, 0.0), SingletonCurve(1.0, 2.0)], str(out))
    text = out.read_text()
    assert text.count("<circle") == 2
    assert "<path" not in text


def test_svg_empty_family_rejected(tmp_path):
    with pytest.raises(ValueError):
        render_svg([], str(tmp_path / "empty.svg"))


def test_matplotlib_render(tmp_path):
    out = tmp_path / "fig.png"
    render_matplotlib(
        [reference_figure_curve(), SingletonCurve(0.0, 0.0)],
        str(out),
        triangles=True,
    )
    assert out.stat().st_size > 1000
