"""The concave arch family and almost-circle curves assembled from it.

The arch with parameter ``alpha`` in (0,1) is the polynomial

    f_alpha(x) = -alpha*x^7 + 2*alpha*x^6 - alpha*x^5 - x^2 + x      on [0, 1],

a convex combination ``alpha*p1 + (1-alpha)*p0`` of
``p1(x) = x(1-x)(x^5 - x^4 + 1)`` and ``p0(x) = x(1-x)``.  Every member is
strictly concave, vanishes at both endpoints, and leaves them with slopes +1
and -1, so its graph fits the triangle with corners (0,0), (1,0) and
(1/2,1/2), tangent to the two upper legs.  Members are strictly decreasing in
``alpha`` pointwise, and no two distinct members (nor two distinct affine
placements of one member) share an open sub-arc, which is what makes
recovered parameters a fingerprint of an arc.

An almost-circle is built from an m-by-t matrix of parameters: the unit
circle is cut into ``m*t`` equal sectors, each sector's chord/tangent
triangle receives the affine image of one arch graph, and the images join
with matching tangents at the circle points.

Polynomial arithmetic sticks to exact rationals; circle geometry and affine
maps live in IEEE-754 doubles.  The two regimes meet at the AffineMap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

#: Joints of a well-formed almost-circle must agree in tangent direction to
#: this angular tolerance (radians).
JOINT_TANGENT_TOL = 1e-9

#: Normalized samples must fit some family member this closely (max vertical
#: deviation) to count as an arch arc at all.
MEMBERSHIP_RESIDUAL_TOL = 1e-3

#: Bisection width at which parameter recovery stops.
ALPHA_BISECTION_TOL = 1e-12

#: Default number of sample points drawn from one arc.
SAMPLES_PER_ARC = 256


class CurveError(ValueError):
    """Bad curve data: parameters, matrices or maps outside their domain."""


class ArcRecoveryError(CurveError):
    """Sampled arc does not normalize onto any family member."""


def _as_fraction(value, name: str) -> Fraction:
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise CurveError(f"{name} is not rational: {value!r} ({exc})")


def _check_alpha(alpha: Fraction) -> Fraction:
    if not 0 < alpha < 1:
        raise CurveError(f"parameter must lie strictly inside (0,1), got {alpha}")
    return alpha


def eval_good_function(alpha, x) -> Fraction:
    """Exact value of the arch ``f_alpha`` at ``x``.

    Both arguments may be anything ``Fraction`` accepts; floats convert
    exactly (they are binary rationals).
    """
    a = _check_alpha(_as_fraction(alpha, "alpha"))
    xf = _as_fraction(x, "x")
    if not 0 <= xf <= 1:
        raise CurveError(f"x must lie in [0,1], got {xf}")
    return -a * xf**7 + 2 * a * xf**6 - a * xf**5 - xf**2 + xf


def good_function_derivatives(alpha, x) -> tuple[Fraction, Fraction]:
    """Exact first and second derivative of ``f_alpha`` at ``x``."""
    a = _check_alpha(_as_fraction(alpha, "alpha"))
    xf = _as_fraction(x, "x")
    if not 0 <= xf <= 1:
        raise CurveError(f"x must lie in [0,1], got {xf}")
    first = -7 * a * xf**6 + 12 * a * xf**5 - 5 * a * xf**4 - 2 * xf + 1
    second = -42 * a * xf**5 + 60 * a * xf**4 - 20 * a * xf**3 - 2
    return first, second


def auxiliary_max_check() -> Fraction:
    """Peak of the auxiliary quintic ``a(x) = -20x^5 + 20x^4`` on [0,1].

    Its derivative ``-100x^4 + 80x^3`` has 4/5 as its only root in (0,1), so
    the maximum sits there; the exact value 1024/625 = 1.6384 stays below
    the 2 needed by the concavity bound of the arch family.
    """
    x = Fraction(4, 5)
    return -20 * x**5 + 20 * x**4


def standard_triangle() -> tuple[tuple[Fraction, Fraction], ...]:
    """Corners (U, V, W) of the triangle every arch graph is inscribed in.

    U = (0,0) and W = (1,0) are the graph endpoints; V = (1/2,1/2) is where
    the endpoint tangents y = x and y = 1 - x meet.
    """
    return (
        (Fraction(0), Fraction(0)),
        (Fraction(1, 2), Fraction(1, 2)),
        (Fraction(1), Fraction(0)),
    )


def good_function_float_coeffs(alpha: float) -> tuple[float, ...]:
    """Coefficients (c7..c0) of f_alpha for fast float evaluation."""
    a = float(alpha)
    return (-a, 2 * a, -a, 0.0, 0.0, -1.0, 1.0, 0.0)


@dataclass(frozen=True)
class AffineMap:
    """Plane map ``(x, y) -> (a11*x + a12*y + b1, a21*x + a22*y + b2)``.

    The linear part must be invertible.
    """

    a11: float
    a12: float
    a21: float
    a22: float
    b1: float = 0.0
    b2: float = 0.0

    def __post_init__(self):
        if self.det == 0.0:
            raise CurveError("affine map is degenerate (zero determinant)")

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def linear(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    @property
    def offset(self) -> np.ndarray:
        return np.array([self.b1, self.b2])

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (
            self.a11 * x + self.a12 * y + self.b1,
            self.a21 * x + self.a22 * y + self.b2,
        )

    def apply_points(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.linear.T + self.offset

    def apply_vector(self, vx: float, vy: float) -> tuple[float, float]:
        return (self.a11 * vx + self.a12 * vy, self.a21 * vx + self.a22 * vy)

    def compose(self, other: "AffineMap") -> "AffineMap":
        """self after other: ``(self @ other)(p) = self(other(p))``."""
        lin = self.linear @ other.linear
        off = self.linear @ other.offset + self.offset
        return AffineMap(lin[0, 0], lin[0, 1], lin[1, 0], lin[1, 1], off[0], off[1])

    def inverse(self) -> "AffineMap":
        d = self.det
        inv = np.array([[self.a22, -self.a12], [-self.a21, self.a11]]) / d
        off = -inv @ self.offset
        return AffineMap(inv[0, 0], inv[0, 1], inv[1, 0], inv[1, 1], off[0], off[1])

    def as_tuple(self) -> tuple[float, ...]:
        return (self.a11, self.a12, self.a21, self.a22, self.b1, self.b2)

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

    @classmethod
    def from_triangle(cls, p0, p1, apex) -> "AffineMap":
        """The map sending (0,0) -> p0, (1,0) -> p1, (1/2,1/2) -> apex."""
        p0 = np.asarray(p0, dtype=float)
        p1 = np.asarray(p1, dtype=float)
        apex = np.asarray(apex, dtype=float)
        col1 = p1 - p0
        col2 = 2.0 * (apex - p0) - col1
        return cls(col1[0], col2[0], col1[1], col2[1], p0[0], p0[1])

    def almost_equal(self, other: "AffineMap", tol: float) -> bool:
        return all(
            abs(a - b) <= tol for a, b in zip(self.as_tuple(), other.as_tuple())
        )


def sector_affine_map(m: int, t: int, i: int, j: int) -> AffineMap:
    """Affine placement of the standard triangle into sector (i, j).

    The unit circle is split into ``m*t`` arcs; sector (i, j) occupies slot
    ``t*(i-1) + (j-1)`` counted counterclockwise from angle 0, one slot per
    (row, column) of the parameter matrix.  The graph start (0,0) lands on
    the slot's first circle point, the graph end (1,0) on the second, and
    the apex (1/2,1/2) on the intersection of the two circle tangents, so
    consecutive sectors share endpoints and tangent lines.
    """
    if t < 3:
        raise CurveError(f"the construction needs t >= 3 sectors, got t={t}")
    if m < 1:
        raise CurveError(f"multiplicity must be >= 1, got m={m}")
    if not (1 <= i <= m and 1 <= j <= t):
        raise CurveError(f"sector index ({i},{j}) outside 1..{m} x 1..{t}")
    slot = t * (i - 1) + (j - 1)
    delta = math.pi / (m * t)
    theta0 = 2.0 * math.pi * slot / (m * t)
    theta1 = theta0 + 2.0 * delta
    mid = 0.5 * (theta0 + theta1)
    p0 = (math.cos(theta0), math.sin(theta0))
    p1 = (math.cos(theta1), math.sin(theta1))
    apex = (math.cos(mid) / math.cos(delta), math.sin(mid) / math.cos(delta))
    return AffineMap.from_triangle(p0, p1, apex)


@dataclass(frozen=True)
class PolynomialArc:
    """The image of one arch graph under an affine map."""

    alpha: Fraction
    map: AffineMap

    def endpoints(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return self.map.apply(0.0, 0.0), self.map.apply(1.0, 0.0)

    def tangent_start(self) -> tuple[float, float]:
        return self.map.apply_vector(1.0, 1.0)

    def tangent_end(self) -> tuple[float, float]:
        return self.map.apply_vector(1.0, -1.0)

    def sample_points(self, count: int = SAMPLES_PER_ARC) -> np.ndarray:
        if count < 2:
            raise CurveError("need at least two sample points")
        xs = np.linspace(0.0, 1.0, count)
        ys = np.polyval(good_function_float_coeffs(float(self.alpha)), xs)
        return np.column_stack([xs, ys]) @ self.map.linear.T + self.map.offset


@dataclass(frozen=True)
class AlmostCircle:
    """Closed convex curve of ``m*t`` arch arcs glued around the unit circle.

    ``S[i][j]`` is the parameter of the arc in sector (i+1, j+1);
    ``outer_map`` transforms the whole assembled curve.
    """

    m: int
    t: int
    S: tuple[tuple[Fraction, ...], ...]
    outer_map: AffineMap = field(default_factory=AffineMap.identity)
    arcs: tuple[PolynomialArc, ...] = field(default=(), compare=False)

    @property
    def parameters(self) -> tuple[Fraction, ...]:
        return tuple(v for row in self.S for v in row)

    def sample_points(self, per_arc: int = 64) -> np.ndarray:
        """Points along the closed curve, in traversal order."""
        parts = [arc.sample_points(per_arc)[:-1] for arc in self.arcs]
        return np.vstack(parts)

    def affine_image(self, psi: AffineMap) -> "AlmostCircle":
        return build_almost_circle(self.S, outer_map=psi.compose(self.outer_map))


def build_almost_circle(S, outer_map: AffineMap | None = None) -> AlmostCircle:
    """Assemble the closed curve for an m-by-t parameter matrix.

    Entries must be rationals strictly inside (0,1); rows need t >= 3.  The
    construction is checked: consecutive arcs must share endpoints and agree
    in tangent direction at every joint.
    """
    rows = [tuple(_check_alpha(_as_fraction(v, "matrix entry")) for v in row) for row in S]
    if not rows:
        raise CurveError("parameter matrix is empty")
    m, t = len(rows), len(rows[0])
    if any(len(r) != t for r in rows):
        raise CurveError("parameter matrix is ragged")
    if t < 3:
        raise CurveError(f"the construction needs t >= 3 sectors, got t={t}")
    outer = outer_map if outer_map is not None else AffineMap.identity()
    arcs = []
    for i in range(1, m + 1):
        for j in range(1, t + 1):
            sector = sector_affine_map(m, t, i, j)
            arcs.append(PolynomialArc(rows[i - 1][j - 1], outer.compose(sector)))
    _check_joints(arcs)
    return AlmostCircle(m=m, t=t, S=tuple(rows), outer_map=outer, arcs=tuple(arcs))


def _check_joints(arcs) -> None:
    scale = max(
        max(abs(c) for c in arc.map.as_tuple()) for arc in arcs
    )
    for k, arc in enumerate(arcs):
        succ = arcs[(k + 1) % len(arcs)]
        end = arc.endpoints()[1]
        start = succ.endpoints()[0]
        gap = math.hypot(end[0] - start[0], end[1] - start[1])
        if gap > 1e-9 * max(scale, 1.0):
            raise CurveError(f"arcs {k} and {k+1} do not share an endpoint (gap {gap:g})")
        if _tangent_angle_gap(arc.tangent_end(), succ.tangent_start()) > JOINT_TANGENT_TOL:
            raise CurveError(f"arcs {k} and {k+1} meet with a corner")


def _tangent_angle_gap(v1, v2) -> float:
    cross = v1[0] * v2[1] - v1[1] * v2[0]
    dot = v1[0] * v2[0] + v1[1] * v2[1]
    return abs(math.atan2(cross, dot))


@dataclass(frozen=True)
class AccuracyReport:
    """Certified inscribed/circumscribed radii of an unscaled almost-circle."""

    r1: float
    r2: float
    ratio: float
    bound: float


def accuracy(circle: AlmostCircle) -> AccuracyReport:
    """Radius ratio of the curve against its roundness bound.

    The curve stays outside the chord polygon of its ``m*t`` circle points
    (apothem cos(pi/(mt))) and inside the tangent-triangle apexes (radius
    1/cos(pi/(mt))), giving the exact ratio cos^2(pi/(mt)), which always
    beats ``1 - (pi/(mt))^2``.  Only the unscaled construction is measured.
    """
    if not circle.outer_map.almost_equal(AffineMap.identity(), 1e-12):
        raise CurveError("accuracy is defined for the unscaled construction only")
    delta = math.pi / (circle.m * circle.t)
    r1 = math.cos(delta)
    r2 = 1.0 / math.cos(delta)
    return AccuracyReport(
        r1=r1, r2=r2, ratio=r1 / r2, bound=1.0 - delta * delta
    )


# -- canonical-form recovery ---------------------------------------------------


@dataclass(frozen=True)
class ArcSamples:
    """A sampled arc: points in traversal order plus endpoint tangents."""

    points: np.ndarray
    start_tangent: tuple[float, float]
    end_tangent: tuple[float, float]

    @classmethod
    def from_arc(cls, arc: PolynomialArc, count: int = SAMPLES_PER_ARC) -> "ArcSamples":
        return cls(
            points=arc.sample_points(count),
            start_tangent=arc.tangent_start(),
            end_tangent=arc.tangent_end(),
        )

    def reversed(self) -> "ArcSamples":
        return ArcSamples(
            points=self.points[::-1].copy(),
            start_tangent=(-self.end_tangent[0], -self.end_tangent[1]),
            end_tangent=(-self.start_tangent[0], -self.start_tangent[1]),
        )


def _tangent_intersection(p0, t0, p1, t1):
    det = t0[0] * (-t1[1]) - (-t1[0]) * t0[1]
    norm = math.hypot(*t0) * math.hypot(*t1)
    if abs(det) < 1e-12 * norm:
        return None
    rhs = (p1[0] - p0[0], p1[1] - p0[1])
    s = (rhs[0] * (-t1[1]) - (-t1[0]) * rhs[1]) / det
    return (p0[0] + s * t0[0], p0[1] + s * t0[1])


def _fit_orientation(samples: ArcSamples):
    """Normalize one traversal orientation; return (alpha, map, residual)."""
    pts = samples.points
    if len(pts) < 20:
        raise ArcRecoveryError("need at least 20 sample points")
    p0, p1 = pts[0], pts[-1]
    apex = _tangent_intersection(p0, samples.start_tangent, p1, samples.end_tangent)
    if apex is None:
        raise ArcRecoveryError("endpoint tangents are parallel; not an arch arc")
    placement = AffineMap.from_triangle(p0, p1, apex)
    norm = placement.inverse().apply_points(pts)
    xs, ys = norm[:, 0], norm[:, 1]
    if xs.min() < -1e-6 or xs.max() > 1 + 1e-6:
        return None, placement, math.inf
    # Probe the sample closest to x = 1/2, where the family separates best,
    # and bisect on the parameter; members decrease pointwise in alpha.
    interior = np.where((xs > 0.2) & (xs < 0.8))[0]
    if len(interior) == 0:
        return None, placement, math.inf
    probe = interior[np.argmin(np.abs(xs[interior] - 0.5))]
    xp, yp = float(xs[probe]), float(ys[probe])
    lo, hi = 0.0, 1.0
    f_lo = _f_float(0.0, xp) - yp
    f_hi = _f_float(1.0, xp) - yp
    if f_lo < 0.0 or f_hi > 0.0:
        return None, placement, math.inf
    while hi - lo > ALPHA_BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if _f_float(mid, xp) - yp > 0.0:
            lo = mid
        else:
            hi = mid
    alpha = 0.5 * (lo + hi)
    clamped = np.clip(xs, 0.0, 1.0)
    residual = float(
        np.max(np.abs(np.polyval(good_function_float_coeffs(alpha), clamped) - ys))
    )
    return alpha, placement, residual


def _f_float(alpha: float, x: float) -> float:
    return ((((((-alpha) * x + 2 * alpha) * x - alpha) * x) * x) * x - 1.0) * x * x + x


def canonical_arc_parameters(
    samples: ArcSamples, *, residual_tol: float = MEMBERSHIP_RESIDUAL_TOL
) -> tuple[float, AffineMap]:
    """Recover (alpha, placement map) from a sampled arc.

    Both traversal orientations are normalized onto the standard triangle;
    the one whose samples fit a family member wins.  Raises
    :class:`ArcRecoveryError` when neither orientation fits within
    ``residual_tol`` — the arc is not an affine image of any member.
    """
    best = (None, None, math.inf)
    for cand in (samples, samples.reversed()):
        try:
            alpha, placement, residual = _fit_orientation(cand)
        except ArcRecoveryError:
            continue
        if alpha is not None and residual < best[2]:
            best = (alpha, placement, residual)
    alpha, placement, residual = best
    if alpha is None or residual > residual_tol:
        raise ArcRecoveryError(
            f"samples deviate from every family member (best residual {residual:g})"
        )
    return alpha, placement


def arcs_affinely_equivalent(
    arc1: ArcSamples, arc2: ArcSamples, tol: float = MEMBERSHIP_RESIDUAL_TOL
) -> bool:
    """Whether two sampled arcs are affine images of the same family member.

    Each arc is reduced to its canonical parameter; rigidity of the family
    means equivalence holds exactly when the parameters agree, so the
    decision compares recovered parameters within ``tol``.  Recovery
    failures propagate.
    """
    a1, m1 = canonical_arc_parameters(arc1)
    a2, m2 = canonical_arc_parameters(arc2)
    if abs(a1 - a2) > tol:
        return False
    connecting = m2.compose(m1.inverse())
    return connecting.det != 0.0


def arc_equivalence_residual(arc1: ArcSamples, arc2: ArcSamples) -> float:
    """Distance between recovered parameters; > tol means inequivalent."""
    a1, _ = canonical_arc_parameters(arc1)
    a2, _ = canonical_arc_parameters(arc2)
    return abs(a1 - a2)


# -- JSON ----------------------------------------------------------------------


def fraction_to_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def fraction_from_str(text: str) -> Fraction:
    return Fraction(text)


def curve_to_dict(circle: AlmostCircle) -> dict:
    return {
        "m": circle.m,
        "t": circle.t,
        "S": [[fraction_to_str(v) for v in row] for row in circle.S],
        "outer_map": list(circle.outer_map.as_tuple()),
    }


def curve_from_dict(data: dict) -> AlmostCircle:
    try:
        S = [[fraction_from_str(v) for v in row] for row in data["S"]]
        outer = AffineMap(*data.get("outer_map", (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise CurveError(f"bad curve JSON: {exc}")
    circle = build_almost_circle(S, outer_map=outer)
    if circle.m != data.get("m", circle.m) or circle.t != data.get("t", circle.t):
        raise CurveError("curve JSON dimensions disagree with the matrix")
    return circle
