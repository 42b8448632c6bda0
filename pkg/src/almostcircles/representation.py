"""Encoding a finite convex geometry as a family of concentric almost-circles.

Each ground element ``e`` receives the curve built from the m-by-t matrix
``S(e)`` whose (i, j) entry is the allocated value ``a[i, j, r]``, where
``r`` is the position of ``e`` counted from the top of the j-th linear
order.  Elements high in an order get small parameters, hence arcs further
from the center, and hull membership among the curves reproduces the
combinatorial closure system exactly.

Parameter allocation is deterministic: a family identifier (together with
the shape n, t, m) hashes to one of 256 equal slices of (0.1, 0.9), and the
``m*t*n`` values are equally spaced rationals inside that slice, indexed
lexicographically by (i, j, k).  Distinct identifiers land in distinct
slices (up to hash collisions of the 8-byte digest), so their value sets
are disjoint and the resulting families share no arc under any affine map.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .combinatorics import (
    ClosureSystem,
    GeometryError,
    LinearOrderTuple,
    closure_from_orderings,
    geometry_from_dict,
    geometry_to_dict,
    mask_to_set,
    orderings_from_geometry,
    verify_convex_geometry,
)
from .curves import (
    AlmostCircle,
    accuracy,
    build_almost_circle,
    fraction_from_str,
    fraction_to_str,
)
from .hull_engine import (
    DEFAULT_DIRECTIONS,
    FamilyHull,
    closure_system_of_family,
    verify_local_anti_exchange,
)

#: Number of disjoint allocation slices inside (0.1, 0.9).
ALLOCATION_SLICES = 256

#: Curve construction needs at least this many sectors.
MIN_SECTORS = 3

CERTIFICATE_FORMAT = "almostcircles-certificate"
CERTIFICATE_VERSION = 1


@dataclass(frozen=True)
class ParameterSet:
    """Strictly increasing rationals in (0,1) backing one curve family.

    ``values[((i-1)*t + (j-1))*n + (k-1)]`` is the entry ``a[i, j, k]``; the
    flat ordering realizes the lexicographic order on (i, j, k).
    """

    m: int
    t: int
    n: int
    family_id: str
    slice_index: int
    values: tuple[Fraction, ...]

    def value(self, i: int, j: int, k: int) -> Fraction:
        if not (1 <= i <= self.m and 1 <= j <= self.t and 1 <= k <= self.n):
            raise GeometryError(f"index ({i},{j},{k}) outside the allocation")
        return self.values[((i - 1) * self.t + (j - 1)) * self.n + (k - 1)]


def _slice_for(family_id: str, n: int, t: int, m: int) -> int:
    digest = hashlib.blake2b(
        f"{family_id}\x00{n}\x00{t}\x00{m}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big") % ALLOCATION_SLICES


def allocate_parameters(n: int, t: int, m: int, family_id: str = "default") -> ParameterSet:
    """Deterministic disjoint parameter values for one family.

    The slice is picked by hashing (family_id, n, t, m); values are spaced
    evenly inside it with a guard gap at both ends so neighbouring slices
    never touch.
    """
    if n < 1 or t < 1 or m < 1:
        raise GeometryError("allocation needs n, t, m >= 1")
    count = m * t * n
    slice_index = _slice_for(family_id, n, t, m)
    lo = Fraction(1, 10) + Fraction(8, 10) * Fraction(slice_index, ALLOCATION_SLICES)
    width = Fraction(8, 10) / ALLOCATION_SLICES
    values = tuple(lo + width * Fraction(k, count + 1) for k in range(1, count + 1))
    return ParameterSet(
        m=m, t=t, n=n, family_id=family_id, slice_index=slice_index, values=values
    )


def backward_rank(order, e: int) -> int:
    """Position of ``e`` counted from the top of the order; the maximum is 1."""
    order = tuple(order)
    if e not in order:
        raise GeometryError(f"{e} does not occur in the order {order}")
    return len(order) - order.index(e)


def parameter_matrix(
    m: int, orders: LinearOrderTuple, params: ParameterSet, e: int
) -> tuple[tuple[Fraction, ...], ...]:
    """The m-by-t matrix S(e): entry (i, j) is ``a[i, j, rank_j(e)]``."""
    if (params.n, params.t, params.m) != (orders.n, orders.t, m):
        raise GeometryError(
            f"allocation shape ({params.m},{params.t},{params.n}) does not match "
            f"m={m}, t={orders.t}, n={orders.n}"
        )
    if not 1 <= e <= orders.n:
        raise GeometryError(f"element {e} outside 1..{orders.n}")
    ranks = [backward_rank(order, e) for order in orders.orders]
    return tuple(
        tuple(params.value(i, j, ranks[j - 1]) for j in range(1, params.t + 1))
        for i in range(1, m + 1)
    )


def pad_orders(orders: LinearOrderTuple, min_t: int = MIN_SECTORS) -> LinearOrderTuple:
    """Repeat orders cyclically until there are at least ``min_t`` of them.

    Duplicating an order never changes the generated closure system, and the
    curve construction needs at least three sectors per multiplicity block.
    """
    if orders.t >= min_t:
        return orders
    padded = tuple(orders.orders[k % orders.t] for k in range(min_t))
    return LinearOrderTuple(orders.n, padded)


@dataclass(frozen=True)
class RepresentationFamily:
    """The concentric curves representing one geometry.

    ``members[e - 1]`` is the almost-circle of ground element ``e``.
    """

    orders: LinearOrderTuple
    m: int
    params: ParameterSet
    members: tuple[AlmostCircle, ...]

    @property
    def n(self) -> int:
        return self.orders.n

    @property
    def t(self) -> int:
        return self.orders.t

    def member(self, e: int) -> AlmostCircle:
        return self.members[e - 1]

    @property
    def curves(self) -> list[AlmostCircle]:
        return list(self.members)


def build_family(
    orders: LinearOrderTuple, m: int, params: ParameterSet
) -> RepresentationFamily:
    """Build the n member curves from an already padded ordering tuple."""
    if orders.t < MIN_SECTORS:
        raise GeometryError(
            f"curve construction needs t >= {MIN_SECTORS} orders; pad first"
        )
    members = []
    seen: set[Fraction] = set()
    for e in range(1, orders.n + 1):
        S = parameter_matrix(m, orders, params, e)
        members.append(build_almost_circle(S))
        for row in S:
            for v in row:
                if v in seen:
                    raise AssertionError("allocation reused a parameter value")
                seen.add(v)
    return RepresentationFamily(orders=orders, m=m, params=params, members=tuple(members))


def combinatorial_membership(orders: LinearOrderTuple, X, y: int) -> bool:
    """Hull membership read off the orders: y is captured unless some order
    puts all of X below y."""
    Xset = set(X)
    if y in Xset:
        raise GeometryError(f"element {y} already belongs to X")
    pos = orders.positions()
    for p in pos:
        if all(p[x] < p[y] for x in Xset):
            return False
    return True


def multiplicity_for_accuracy(t: int, epsilon: float) -> int:
    """Smallest multiplicity giving accuracy at least 1 - epsilon.

    With mt sectors the accuracy is ``1 - (pi/(mt))^2`` at worst, so any
    ``m >= pi / (t * sqrt(epsilon))`` suffices.
    """
    if not 0.0 < epsilon < 1.0:
        raise GeometryError(f"epsilon must lie in (0,1), got {epsilon}")
    if t < MIN_SECTORS:
        raise GeometryError(f"need t >= {MIN_SECTORS}")
    m = max(1, math.ceil(math.pi / (t * math.sqrt(epsilon))))
    while (math.pi / (m * t)) ** 2 > epsilon:
        m += 1
    return m


@dataclass(frozen=True)
class IsomorphismReport:
    """Outcome of comparing geometric and combinatorial closure."""

    isomorphic: bool
    geometric_system: ClosureSystem
    mismatch: tuple[frozenset[int], int] | None

    @property
    def ok(self) -> bool:
        return self.isomorphic and self.mismatch is None


def verify_isomorphism(
    sys: ClosureSystem,
    fam: RepresentationFamily,
    directions: int = DEFAULT_DIRECTIONS,
    hull: FamilyHull | None = None,
) -> IsomorphismReport:
    """Recompute the closure system geometrically and compare it with ``sys``.

    Walks every subset: the hull-engine closure table must coincide with the
    combinatorial membership rule on every pair (X, y), and the closed sets
    must match exactly.  Returns the first disagreeing (X, y) otherwise.
    """
    if sys.n != fam.n:
        raise GeometryError("geometry and family sizes differ")
    if hull is None:
        hull = FamilyHull(fam.curves, directions=directions)
    table = hull.closure_table()
    geometric = closure_system_of_family(hull)
    mismatch = None
    for mask in range(1 << fam.n):
        hull_set = table[mask]
        for y in range(1, fam.n + 1):
            bit = 1 << (y - 1)
            if mask & bit:
                continue
            geo = bool(hull_set & bit)
            comb = combinatorial_membership(fam.orders, mask_to_set(mask), y)
            if geo != comb:
                mismatch = (mask_to_set(mask), y)
                break
        if mismatch:
            break
    return IsomorphismReport(
        isomorphic=(geometric == sys) and mismatch is None,
        geometric_system=geometric,
        mismatch=mismatch,
    )


def affine_disjoint_families(
    sys: ClosureSystem,
    count: int,
    *,
    base_family_id: str = "family",
    epsilon: float | None = None,
    multiplicity: int | None = None,
    directions: int = DEFAULT_DIRECTIONS,
) -> list[RepresentationFamily]:
    """Several representations of one geometry with pairwise disjoint values.

    Distinct family identifiers land in distinct allocation slices, so no
    arc of one family is an affine image of an arc of another.
    """
    if count < 2:
        raise GeometryError("need at least two families")
    families = []
    for k in range(count):
        fam, _cert = represent_geometry(
            sys,
            epsilon=epsilon,
            multiplicity=multiplicity,
            family_id=f"{base_family_id}-{k}",
            directions=directions,
        )
        families.append(fam)
    ids = {f.params.slice_index for f in families}
    if len(ids) != count:
        raise GeometryError(
            "allocation hash collision between family identifiers; "
            "choose different identifiers"
        )
    return families


# -- certificates -----------------------------------------------------------------


def represent_geometry(
    sys: ClosureSystem,
    *,
    epsilon: float | None = 0.5,
    multiplicity: int | None = None,
    family_id: str = "default",
    directions: int = DEFAULT_DIRECTIONS,
    labels=None,
) -> tuple[RepresentationFamily, dict]:
    """Full pipeline: orders, padding, multiplicity, curves, verification.

    Returns the family plus a certificate carrying everything needed to
    rebuild and re-check it.  Raises if the input fails the convex-geometry
    axioms; the certificate stores the verification verdict.
    """
    report = verify_convex_geometry(sys)
    if not report.is_convex_geometry:
        witness = report.witnesses[0] if report.witnesses else None
        raise GeometryError(
            "input is not a convex geometry"
            + (f"; anti-exchange fails at {_witness_str(witness)}" if witness else "")
        )
    orders = orderings_from_geometry(sys)
    padded = pad_orders(orders)
    if multiplicity is not None:
        m = multiplicity
        if m < 1:
            raise GeometryError("multiplicity must be >= 1")
        if epsilon is not None and (math.pi / (m * padded.t)) ** 2 > epsilon:
            raise GeometryError(
                f"multiplicity {m} with t={padded.t} gives accuracy "
                f"{1 - (math.pi / (m * padded.t)) ** 2:.4f}, below the "
                f"1-epsilon target {1 - epsilon}"
            )
    else:
        if epsilon is None:
            raise GeometryError("need either epsilon or an explicit multiplicity")
        m = multiplicity_for_accuracy(padded.t, epsilon)
    params = allocate_parameters(sys.n, padded.t, m, family_id)
    fam = build_family(padded, m, params)
    hull = FamilyHull(fam.curves, directions=directions)
    iso = verify_isomorphism(sys, fam, hull=hull)
    lae = verify_local_anti_exchange(hull)
    acc = accuracy(fam.members[0])
    cert = {
        "format": CERTIFICATE_FORMAT,
        "version": CERTIFICATE_VERSION,
        "geometry": geometry_to_dict(sys, labels=labels),
        "orders": [list(o) for o in orders.orders],
        "padded_orders": [list(o) for o in padded.orders],
        "multiplicity": m,
        "epsilon": epsilon,
        "family_id": family_id,
        "parameters": {
            "slice_index": params.slice_index,
            "values": [fraction_to_str(v) for v in params.values],
        },
        "members": [
            {
                "element": e,
                "matrix": [
                    [fraction_to_str(v) for v in row]
                    for row in fam.member(e).S
                ],
            }
            for e in range(1, sys.n + 1)
        ],
        "accuracy": {
            "r1": acc.r1,
            "r2": acc.r2,
            "ratio": acc.ratio,
            "bound": acc.bound,
        },
        "verification": {
            "isomorphic": iso.ok,
            "local_anti_exchange": lae.holds,
            "directions": directions,
        },
    }
    if not iso.ok:
        raise GeometryError(
            f"geometric verification failed: hull and orders disagree at "
            f"{iso.mismatch}"
        )
    if not lae.holds:
        raise GeometryError(
            f"local anti-exchange failed on the built family at {lae.violation}"
        )
    return fam, cert


def _witness_str(witness) -> str:
    A, x, y = witness
    return f"(A={sorted(A)}, x={x}, y={y})"


@dataclass(frozen=True)
class CertificateCheck:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class CertificateReport:
    checks: tuple[CertificateCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def first_failure(self) -> CertificateCheck | None:
        for c in self.checks:
            if not c.ok:
                return c
        return None


def family_from_certificate(cert: dict) -> tuple[ClosureSystem, LinearOrderTuple, RepresentationFamily]:
    """Rebuild geometry, padded orders, and curves from the stored matrices."""
    sys, _labels = geometry_from_dict(cert["geometry"])
    padded = LinearOrderTuple(sys.n, tuple(tuple(o) for o in cert["padded_orders"]))
    m = int(cert["multiplicity"])
    params = ParameterSet(
        m=m,
        t=padded.t,
        n=sys.n,
        family_id=cert["family_id"],
        slice_index=int(cert["parameters"]["slice_index"]),
        values=tuple(fraction_from_str(v) for v in cert["parameters"]["values"]),
    )
    members = []
    by_element = {int(entry["element"]): entry["matrix"] for entry in cert["members"]}
    for e in range(1, sys.n + 1):
        if e not in by_element:
            raise GeometryError(f"certificate misses member {e}")
        S = [[fraction_from_str(v) for v in row] for row in by_element[e]]
        members.append(build_almost_circle(S))
    fam = RepresentationFamily(orders=padded, m=m, params=params, members=tuple(members))
    return sys, padded, fam


def verify_certificate(cert: dict, directions: int | None = None) -> CertificateReport:
    """Re-derive and re-check everything a certificate claims.

    All checks run from (geometry, orders, parameters) alone; stored verdict
    fields are ignored.  The curve family is rebuilt from the stored
    matrices so that tampering flips a geometric check, and the matrices are
    additionally re-derived from the allocation to pin down provenance.
    """
    checks: list[CertificateCheck] = []

    def run(name, fn):
        try:
            ok, detail = fn()
        except Exception as exc:  # noqa: BLE001 - report, do not crash
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        checks.append(CertificateCheck(name=name, ok=ok, detail=detail))
        return ok

    if cert.get("format") != CERTIFICATE_FORMAT:
        return CertificateReport(
            checks=(CertificateCheck("format", False, "unknown certificate format"),)
        )
    if directions is None:
        directions = int(cert.get("verification", {}).get("directions", DEFAULT_DIRECTIONS))

    state: dict = {}

    def check_geometry():
        sys, padded, fam = family_from_certificate(cert)
        state.update(sys=sys, padded=padded, fam=fam)
        report = verify_convex_geometry(sys)
        return report.is_convex_geometry, "anti-exchange and closure axioms"

    def check_orders():
        sys = state["sys"]
        orders = LinearOrderTuple(sys.n, tuple(tuple(o) for o in cert["orders"]))
        padded = state["padded"]
        if closure_from_orderings(orders) != sys:
            return False, "stored orders do not generate the stored geometry"
        if closure_from_orderings(padded) != sys:
            return False, "padded orders do not generate the stored geometry"
        return True, ""

    def check_accuracy():
        fam = state["fam"]
        acc = accuracy(fam.members[0])
        stored = cert["accuracy"]
        if abs(acc.ratio - stored["ratio"]) > 1e-12:
            return False, f"accuracy ratio drifted: {acc.ratio} vs {stored['ratio']}"
        eps = cert.get("epsilon")
        if eps is not None and acc.ratio < 1.0 - eps:
            return False, f"accuracy {acc.ratio} misses the 1-epsilon target"
        return True, f"ratio {acc.ratio:.6f} >= bound {acc.bound:.6f}"

    def check_isomorphism():
        state["hull"] = FamilyHull(state["fam"].curves, directions=directions)
        iso = verify_isomorphism(state["sys"], state["fam"], hull=state["hull"])
        if not iso.ok:
            return False, f"hull and geometry disagree at {iso.mismatch}"
        return True, "geometric closure system matches"

    def check_local_anti_exchange():
        hull = state.get("hull") or FamilyHull(
            state["fam"].curves, directions=directions
        )
        lae = verify_local_anti_exchange(hull)
        return lae.holds, "" if lae.holds else f"violation {lae.violation}"

    def check_parameters():
        sys, padded = state["sys"], state["padded"]
        m = int(cert["multiplicity"])
        rederived = allocate_parameters(sys.n, padded.t, m, cert["family_id"])
        stored = state["fam"].params
        if rederived != stored:
            return False, "stored values differ from the deterministic allocation"
        return True, ""

    def check_matrices():
        padded, fam = state["padded"], state["fam"]
        for e in range(1, fam.n + 1):
            expected = parameter_matrix(fam.m, padded, fam.params, e)
            if expected != fam.member(e).S:
                return False, f"matrix of member {e} is not the rank-derived one"
        return True, ""

    if not run("geometry", check_geometry):
        return CertificateReport(tuple(checks))
    run("orders-generate-geometry", check_orders)
    run("accuracy", check_accuracy)
    run("isomorphism", check_isomorphism)
    run("local-anti-exchange", check_local_anti_exchange)
    run("parameter-allocation", check_parameters)
    run("rank-matrices", check_matrices)
    return CertificateReport(tuple(checks))


def certificate_to_json(cert: dict) -> str:
    """Canonical serialization; identical inputs give identical bytes."""
    return json.dumps(cert, sort_keys=True, indent=2) + "\n"
