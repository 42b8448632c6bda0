"""Convex-hull decisions for finite curve families via support functions.

A curve D belongs to the hull of a family subset X exactly when its support
function is dominated by the upper envelope of the supports of X in every
direction.  Decisions run over a dense direction grid; near-ties get a local
refinement pass with golden-ratio spaced probes around the minimal-margin
direction.  The hull of X is never materialized as a region.

Support of a polynomial arc: with linear part L, offset b and direction u,
``<u, L(x, f(x)) + b> = v1*x + v2*f(x) + <u, b>`` where ``v = L^T u``.  Since
f is strictly concave, the derivative ``v1 + v2*f'(x)`` is strictly monotone,
so the maximizer is an endpoint or the single root of the derivative, found
by bisection.  f(0) = f(1) = 0 collapses the endpoint candidates to
``max(0, v1)``.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import ClosureSystem, GeometryError
from .curves import AlmostCircle, PolynomialArc

logger = logging.getLogger(__name__)

#: Default number of grid directions for hull decisions.
DEFAULT_DIRECTIONS = 4096

#: |margin| below this is classified as membership (closed hull) and logged
#: as a near-tie.
MEMBERSHIP_TOL = 1e-9

#: Families larger than this would need more than 2^10 subset evaluations.
MAX_FAMILY_SIZE = 10

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# 30 halvings put the critical point within 1e-9 of the true maximizer; the
# derivative vanishes there, so the support value error is ~1e-18.
_BISECTION_STEPS = 30


@dataclass(frozen=True)
class SingletonCurve:
    """A degenerate member: one point of the plane."""

    x: float
    y: float

    @property
    def point(self) -> tuple[float, float]:
        return (self.x, self.y)


PlaneCurve = SingletonCurve | AlmostCircle


@dataclass(frozen=True)
class HullDecision:
    member: bool
    margin: float
    witness_direction: tuple[float, float] | None


@dataclass(frozen=True)
class LocalAntiExchangeReport:
    holds: bool
    violation: tuple[tuple[int, ...], int, int] | None


def direction_grid(count: int) -> np.ndarray:
    theta = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
    return np.column_stack([np.cos(theta), np.sin(theta)])


def _arc_arrays(circle: AlmostCircle):
    lin = np.stack([arc.map.linear for arc in circle.arcs])
    off = np.stack([arc.map.offset for arc in circle.arcs])
    alpha = np.array([float(arc.alpha) for arc in circle.arcs])
    return lin, off, alpha


def _fprime(x, alpha):
    # f'(x) = -7a x^6 + 12a x^5 - 5a x^4 - 2x + 1, Horner form.
    t = -7.0 * alpha * x + 12.0 * alpha
    t = t * x - 5.0 * alpha
    t = t * x
    t = t * x
    t = t * x - 2.0
    return t * x + 1.0


def _fvalue(x, alpha):
    # f(x) = -a x^7 + 2a x^6 - a x^5 - x^2 + x, Horner form.
    t = -alpha * x + 2.0 * alpha
    t = t * x - alpha
    t = t * x
    t = t * x
    t = t * x - 1.0
    return (t * x + 1.0) * x


def _arc_supports(lin, off, alpha, U):
    """Support of each arc in each direction; shapes (A,2,2),(A,2),(A,),(D,2) -> (A,D)."""
    u1, u2 = U[:, 0], U[:, 1]
    v1 = lin[:, 0, 0, None] * u1 + lin[:, 1, 0, None] * u2
    v2 = lin[:, 0, 1, None] * u1 + lin[:, 1, 1, None] * u2
    c = off[:, 0, None] * u1 + off[:, 1, None] * u2
    base = np.maximum(0.0, v1)
    # Interior critical point exists only for v2 > 0 with a sign change of
    # the derivative across [0,1]; f' runs from +1 down to -1.
    valid = (v2 > 0.0) & (v1 + v2 > 0.0) & (v1 - v2 < 0.0)
    safe_v2 = np.where(valid, v2, 1.0)
    target = np.where(valid, -v1 / safe_v2, 0.0)
    a = alpha[:, None]
    lo = np.zeros_like(v1)
    hi = np.ones_like(v1)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        go_right = _fprime(mid, a) > target
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    x = 0.5 * (lo + hi)
    interior = v1 * x + v2 * _fvalue(x, a)
    return c + np.where(valid, np.maximum(base, interior), base)


class _Evaluator:
    """Batched support evaluation for one curve."""

    def __init__(self, curve: PlaneCurve):
        self.curve = curve
        if isinstance(curve, SingletonCurve):
            self._point = np.array(curve.point)
            self._arcs = None
        elif isinstance(curve, AlmostCircle):
            self._point = None
            self._arcs = _arc_arrays(curve)
        else:
            raise GeometryError(f"not a plane curve: {curve!r}")

    def supports(self, U: np.ndarray) -> np.ndarray:
        if self._point is not None:
            return U @ self._point
        lin, off, alpha = self._arcs
        return _arc_supports(lin, off, alpha, U).max(axis=0)


def _support_table(curves, evals, U: np.ndarray) -> np.ndarray:
    """Supports of every curve in every direction, arcs batched across curves."""
    table = np.empty((len(curves), len(U)))
    batches, spans = [], []
    for idx, curve in enumerate(curves):
        if isinstance(curve, SingletonCurve):
            table[idx] = U @ np.array(curve.point)
        else:
            arrs = evals[idx]._arcs
            batches.append(arrs)
            spans.append((idx, arrs[2].shape[0]))
    if batches:
        lin = np.concatenate([b[0] for b in batches])
        off = np.concatenate([b[1] for b in batches])
        alpha = np.concatenate([b[2] for b in batches])
        supports = _arc_supports(lin, off, alpha, U)
        row = 0
        for idx, count in spans:
            table[idx] = supports[row : row + count].max(axis=0)
            row += count
    return table


def arc_support(arc: PolynomialArc, u) -> float:
    """Maximum of ``<u, p>`` over the arc, for a unit direction u."""
    U = np.asarray(u, dtype=float).reshape(1, 2)
    lin = arc.map.linear[None, :, :]
    off = arc.map.offset[None, :]
    alpha = np.array([float(arc.alpha)])
    return float(_arc_supports(lin, off, alpha, U)[0, 0])


def curve_support(curve: PlaneCurve, u) -> float:
    """Support of a singleton point or a whole almost-circle."""
    U = np.asarray(u, dtype=float).reshape(1, 2)
    return float(_Evaluator(curve).supports(U)[0])


class FamilyHull:
    """Cached support tables and hull decisions for one curve family."""

    def __init__(
        self,
        curves,
        directions: int = DEFAULT_DIRECTIONS,
        tol: float = MEMBERSHIP_TOL,
    ):
        self.curves = list(curves)
        self.tol = tol
        self.directions = directions
        self._grid = direction_grid(directions)
        self._evals = [_Evaluator(c) for c in self.curves]
        self.table = _support_table(self.curves, self._evals, self._grid)
        self._closure_table: list[int] | None = None

    @property
    def n(self) -> int:
        return len(self.curves)

    def _envelope(self, mask: int) -> np.ndarray:
        rows = [i for i in range(self.n) if mask & (1 << i)]
        return self.table[rows].max(axis=0)

    def _refine(self, d_index: int, mask: int, theta0: float, width: float) -> float:
        """Golden-spaced local probes of the margin around a direction."""
        rows = [i for i in range(self.n) if mask & (1 << i)]
        involved = [d_index] + rows
        curves = [self.curves[i] for i in involved]
        evals = [self._evals[i] for i in involved]
        best = math.inf
        lo, hi = theta0 - width, theta0 + width
        for _ in range(2):
            offs = (np.arange(48) * _GOLDEN) % 1.0
            theta = lo + (hi - lo) * offs
            U = np.column_stack([np.cos(theta), np.sin(theta)])
            sub = _support_table(curves, evals, U)
            margins = sub[1:].max(axis=0) - sub[0]
            k = int(np.argmin(margins))
            best = min(best, float(margins[k]))
            center = theta[k]
            span = (hi - lo) / 24.0
            lo, hi = center - span, center + span
        return best

    def _decide(self, d_index: int, mask: int, margins: np.ndarray) -> HullDecision:
        k = int(np.argmin(margins))
        gmin = float(margins[k])
        theta = 2.0 * math.pi * k / self.directions
        step = 2.0 * math.pi / self.directions
        if gmin < -self.tol:
            return HullDecision(
                member=False,
                margin=gmin,
                witness_direction=(math.cos(theta), math.sin(theta)),
            )
        # Tentative member: guard against an escape window the grid skipped.
        # A parabola through the neighbors estimates the off-grid minimum;
        # only a dip below tolerance forces a real refinement pass.
        gl = float(margins[(k - 1) % self.directions])
        gr = float(margins[(k + 1) % self.directions])
        curvature = gl + gr - 2.0 * gmin
        estimate = gmin if curvature <= 0 else gmin - (gr - gl) ** 2 / (8.0 * curvature)
        if estimate < -self.tol:
            refined = self._refine(d_index, mask, theta, step)
            if refined < -self.tol:
                return HullDecision(
                    member=False,
                    margin=refined,
                    witness_direction=(math.cos(theta), math.sin(theta)),
                )
            gmin = min(gmin, refined)
        if gmin < 0.0:
            logger.debug(
                "near-tie: curve %d vs mask %#x at margin %.3e", d_index, mask, gmin
            )
        return HullDecision(member=True, margin=gmin, witness_direction=None)

    def membership(self, d_index: int, mask: int) -> HullDecision:
        """Is curve ``d_index`` inside the hull of the members in ``mask``?"""
        if mask == 0:
            return HullDecision(member=False, margin=-math.inf, witness_direction=None)
        if mask & (1 << d_index):
            return HullDecision(member=True, margin=0.0, witness_direction=None)
        margins = self._envelope(mask) - self.table[d_index]
        return self._decide(d_index, mask, margins)

    def hull_mask(self, mask: int) -> int:
        if mask == 0:
            return 0
        envelope = self._envelope(mask)
        margins = envelope[None, :] - self.table
        mins = margins.min(axis=1)
        out = mask
        for d in range(self.n):
            if mask & (1 << d):
                continue
            if mins[d] < -self.tol:
                continue
            if self._decide(d, mask, margins[d]).member:
                out |= 1 << d
        return out

    def closure_table(self) -> list[int]:
        """Hull of every subset mask; index = subset mask."""
        if self._closure_table is None:
            if self.n > MAX_FAMILY_SIZE:
                raise GeometryError(
                    f"family of size {self.n} exceeds the exhaustive limit "
                    f"{MAX_FAMILY_SIZE}"
                )
            self._closure_table = [self.hull_mask(m) for m in range(1 << self.n)]
        return self._closure_table


def hull_membership(d: PlaneCurve, X, directions: int = DEFAULT_DIRECTIONS) -> HullDecision:
    """Decide ``d in Hull(X)`` for a finite iterable of curves ``X``."""
    others = list(X)
    fam = FamilyHull([d] + others, directions=directions)
    mask = ((1 << len(others)) - 1) << 1
    return fam.membership(0, mask)


def hull_operator(family, X, directions: int = DEFAULT_DIRECTIONS) -> tuple[int, ...]:
    """Members of ``family`` (by index) inside the hull of the indices ``X``."""
    fam = family if isinstance(family, FamilyHull) else FamilyHull(family, directions)
    mask = 0
    for i in X:
        if not 0 <= i < fam.n:
            raise GeometryError(f"index {i} outside the family")
        mask |= 1 << i
    out = fam.hull_mask(mask)
    return tuple(i for i in range(fam.n) if out & (1 << i))


def closure_system_of_family(
    family, directions: int = DEFAULT_DIRECTIONS, tol: float = MEMBERSHIP_TOL
) -> ClosureSystem:
    """The closure system the hull operator induces on the family.

    Member index i (0-based) becomes ground element i+1.
    """
    fam = family if isinstance(family, FamilyHull) else FamilyHull(family, directions, tol)
    table = fam.closure_table()
    closed = {m for m in range(1 << fam.n) if table[m] == m}
    return ClosureSystem.from_masks(fam.n, closed, validate=False)


def verify_local_anti_exchange(
    family, directions: int = DEFAULT_DIRECTIONS
) -> LocalAntiExchangeReport:
    """Exhaustive local anti-exchange check over all subsets of the family.

    For every subset X and distinct members d, d' outside Hull(X), the hulls
    of X+{d} and X+{d'} must differ.  Returns the first violating triple
    (X indices, d, d') otherwise.
    """
    fam = family if isinstance(family, FamilyHull) else FamilyHull(family, directions)
    table = fam.closure_table()
    for mask in range(1 << fam.n):
        hx = table[mask]
        outside = [d for d in range(fam.n) if not hx & (1 << d)]
        for d, dp in itertools.combinations(outside, 2):
            if table[mask | (1 << d)] == table[mask | (1 << dp)]:
                x_indices = tuple(i for i in range(fam.n) if mask & (1 << i))
                return LocalAntiExchangeReport(holds=False, violation=(x_indices, d, dp))
    return LocalAntiExchangeReport(holds=True, violation=None)
