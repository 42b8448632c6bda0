"""Finite convex geometries as intersection-closed set systems on {1, ..., n}.

A geometry is stored as the family of its closed sets, each set encoded as a
bitmask over the ground set.  Generation from linear-ordering tuples, the
anti-exchange check, maximal-chain extraction and the minimal-ordering search
all run exhaustively, so ground sets are capped at a configurable size.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

#: Largest ground set for which the exhaustive operations are allowed to run.
MAX_GROUND_SIZE = 12

#: Chain enumeration aborts beyond this many maximal chains.
MAX_CHAINS = 500_000


class GeometryError(ValueError):
    """Ill-formed system, ordering tuple, or input outside the supported range."""


class NotAConvexGeometryError(GeometryError):
    """Raised when an operation needs the anti-exchange property and it fails."""


def set_to_mask(elements) -> int:
    mask = 0
    for e in elements:
        mask |= 1 << (e - 1)
    return mask


def mask_to_set(mask: int) -> frozenset[int]:
    out = []
    e = 1
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return frozenset(out)


def _check_ground_size(n: int) -> None:
    if n > MAX_GROUND_SIZE:
        raise GeometryError(
            f"ground set of size {n} exceeds the exhaustive limit {MAX_GROUND_SIZE}"
        )


@dataclass(frozen=True)
class LinearOrderTuple:
    """A tuple of strict total orders on {1..n}.

    Each order is a permutation ``(e_1, ..., e_n)`` read as
    ``e_1 < e_2 < ... < e_n``.
    """

    n: int
    orders: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise GeometryError("ground set must have n >= 1")
        orders = tuple(tuple(o) for o in self.orders)
        object.__setattr__(self, "orders", orders)
        if not orders:
            raise GeometryError("an ordering tuple needs at least one order (t >= 1)")
        full = frozenset(range(1, self.n + 1))
        for o in orders:
            if len(o) != self.n or frozenset(o) != full:
                raise GeometryError(f"{o!r} is not a permutation of 1..{self.n}")

    @property
    def t(self) -> int:
        return len(self.orders)

    def positions(self) -> list[dict[int, int]]:
        """Per order, element -> 0-based position."""
        return [{e: i for i, e in enumerate(o)} for o in self.orders]


@dataclass(frozen=True)
class ClosureSystem:
    """A zero-preserving closure system: closed sets under intersection.

    ``masks`` holds every closed set as a bitmask.  The empty set and the full
    ground set are always members; the family is closed under pairwise
    intersection.  ``n == 0`` is allowed as the degenerate system ``{empty}``
    produced by restricting to the empty subset.
    """

    n: int
    masks: frozenset[int]

    @classmethod
    def from_masks(cls, n: int, masks, *, validate: bool = True) -> "ClosureSystem":
        masks = frozenset(int(m) for m in masks)
        if validate:
            _validate_masks(n, masks)
        return cls(n, masks)

    @classmethod
    def from_closed_sets(cls, n: int, sets, *, validate: bool = True) -> "ClosureSystem":
        return cls.from_masks(n, (set_to_mask(s) for s in sets), validate=validate)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def closed_sets(self) -> tuple[tuple[int, ...], ...]:
        """Closed sets as sorted tuples, ordered by size then lexicographically."""
        sets = [tuple(sorted(mask_to_set(m))) for m in self.masks]
        return tuple(sorted(sets, key=lambda s: (len(s), s)))

    def __contains__(self, subset) -> bool:
        if isinstance(subset, int):
            return subset in self.masks
        return set_to_mask(subset) in self.masks


def _validate_masks(n: int, masks: frozenset[int]) -> None:
    if n < 0:
        raise GeometryError("n must be >= 0")
    full = (1 << n) - 1
    if 0 not in masks:
        raise GeometryError("the empty set must be closed")
    if full not in masks:
        raise GeometryError("the full ground set must be closed")
    for m in masks:
        if m & ~full:
            raise GeometryError(f"closed-set mask {m:b} uses elements outside 1..{n}")
    arr = np.fromiter(masks, dtype=np.int64)
    members = set(masks)
    for m in masks:
        inter = arr & np.int64(m)
        for v in np.unique(inter):
            if int(v) not in members:
                raise GeometryError(
                    f"not intersection-closed: {sorted(mask_to_set(m))} meets some "
                    f"member in the non-member {sorted(mask_to_set(int(v)))}"
                )


def closure_from_orderings(orders: LinearOrderTuple) -> ClosureSystem:
    """Closed sets generated by an ordering tuple.

    A set ``X`` is closed when every outside element ``y`` is beaten in some
    order: there is an ``i`` with ``x <_i y`` for all ``x`` in ``X``.  The
    empty set is always included.
    """
    n, t = orders.n, orders.t
    _check_ground_size(n)
    pos = orders.positions()
    # maxpos[i][mask]: largest position (in order i) of an element of mask.
    maxpos = []
    for i in range(t):
        table = np.full(1 << n, -1, dtype=np.int64)
        for mask in range(1, 1 << n):
            low = mask & -mask
            e = low.bit_length()
            table[mask] = max(table[mask ^ low], pos[i][e])
        maxpos.append(table)
    closed = []
    for mask in range(1 << n):
        ok = True
        for y in range(1, n + 1):
            if mask & (1 << (y - 1)):
                continue
            if not any(maxpos[i][mask] < pos[i][y] for i in range(t)):
                ok = False
                break
        if ok:
            closed.append(mask)
    return ClosureSystem.from_masks(n, closed, validate=False)


def closure_mask(sys: ClosureSystem, xmask: int) -> int:
    """Smallest closed superset of ``xmask``, as a mask."""
    out = sys.full_mask
    for m in sys.masks:
        if m & xmask == xmask:
            out &= m
    return out


def closure_of(sys: ClosureSystem, X) -> frozenset[int]:
    """Closure of a subset: intersection of all closed supersets."""
    xmask = set_to_mask(X)
    if xmask & ~sys.full_mask:
        raise GeometryError(f"{sorted(X)} is not a subset of 1..{sys.n}")
    return mask_to_set(closure_mask(sys, xmask))


def closure_table(sys: ClosureSystem) -> list[int]:
    """Closure of every subset mask; index = subset mask."""
    _check_ground_size(sys.n)
    arr = np.fromiter(sys.masks, dtype=np.int64)
    table = [0] * (1 << sys.n)
    for mask in range(1 << sys.n):
        sup = arr[(arr & mask) == mask]
        table[mask] = int(np.bitwise_and.reduce(sup))
    return table


@dataclass(frozen=True)
class GeometryReport:
    """Outcome of the exhaustive convex-geometry check."""

    is_closure_operator: bool
    is_zero_preserving: bool
    anti_exchange_holds: bool
    witnesses: tuple[tuple[frozenset[int], int, int], ...]

    @property
    def is_convex_geometry(self) -> bool:
        return (
            self.is_closure_operator
            and self.is_zero_preserving
            and self.anti_exchange_holds
        )


def verify_convex_geometry(sys: ClosureSystem) -> GeometryReport:
    """Exhaustively check the convex-geometry axioms.

    Confirms the induced operator is extensive, monotone and idempotent, that
    it preserves the empty set, and that no pair x != y outside a closure has
    equal closures when adjoined.  Witness triples (A, x, y) are collected for
    every anti-exchange failure.
    """
    _check_ground_size(sys.n)
    table = closure_table(sys)
    zero_preserving = table[0] == 0
    closure_op = True
    for mask, c in enumerate(table):
        if c & mask != mask or table[c] != c:
            closure_op = False
            break
    if closure_op:
        # Monotonicity on covers implies monotonicity everywhere.
        for mask in range(1 << sys.n):
            c = table[mask]
            for e in range(sys.n):
                bit = 1 << e
                if mask & bit:
                    continue
                if c & table[mask | bit] != c:
                    closure_op = False
                    break
            if not closure_op:
                break
    witnesses = []
    for mask in range(1 << sys.n):
        c = table[mask]
        outside = [e for e in range(1, sys.n + 1) if not c & (1 << (e - 1))]
        for x, y in itertools.combinations(outside, 2):
            if table[mask | (1 << (x - 1))] == table[mask | (1 << (y - 1))]:
                witnesses.append((mask_to_set(mask), x, y))
    return GeometryReport(
        is_closure_operator=closure_op,
        is_zero_preserving=zero_preserving,
        anti_exchange_holds=not witnesses,
        witnesses=tuple(witnesses),
    )


def maximal_chains(sys: ClosureSystem) -> tuple[tuple[frozenset[int], ...], ...]:
    """All maximal chains of closed sets, each step adding one element.

    Chains are listed in the order induced by always trying the smallest new
    element first, so the result is deterministic.  If a chain gets stuck
    before reaching the full set, some cover adds two or more elements at
    once, which means the system is not a convex geometry.
    """
    _check_ground_size(sys.n)
    members = sys.masks
    full = sys.full_mask
    chains: list[tuple[frozenset[int], ...]] = []
    # DFS over singleton extensions; element order makes chains lexicographic
    # in the sequence of added elements.
    stack: list[tuple[int, list[int]]] = [(0, [0])]
    while stack:
        mask, path = stack.pop()
        if mask == full:
            chains.append(tuple(mask_to_set(m) for m in path))
            if len(chains) > MAX_CHAINS:
                raise GeometryError(
                    f"more than {MAX_CHAINS} maximal chains; refusing to enumerate"
                )
            continue
        succs = []
        for e in range(sys.n, 0, -1):
            bit = 1 << (e - 1)
            if not mask & bit and (mask | bit) in members:
                succs.append(mask | bit)
        if not succs:
            raise NotAConvexGeometryError(
                f"no singleton extension of closed set {sorted(mask_to_set(mask))}: "
                "some cover adds two or more elements, so this is not a convex geometry"
            )
        for s in succs:
            stack.append((s, path + [s]))
    return tuple(chains)


def orderings_from_geometry(sys: ClosureSystem) -> LinearOrderTuple:
    """One linear order per maximal chain, reading elements as they appear.

    Feeding the result back through :func:`closure_from_orderings` reproduces
    the original system.
    """
    chains = maximal_chains(sys)
    orders = []
    for chain in chains:
        seq = []
        for prev, cur in zip(chain, chain[1:]):
            (added,) = cur - prev
            seq.append(added)
        orders.append(tuple(seq))
    return LinearOrderTuple(sys.n, tuple(orders))


def convex_dimension(sys: ClosureSystem) -> int:
    """Minimum number of orders that generate the system.

    Every order of a generating tuple has all its initial segments closed, so
    it must read off a maximal chain; the search therefore ranges over
    subsets of the chain-induced orders only.
    """
    report = verify_convex_geometry(sys)
    if not report.is_convex_geometry:
        raise NotAConvexGeometryError("convex dimension needs a convex geometry")
    candidates = orderings_from_geometry(sys).orders
    for t in range(1, len(candidates) + 1):
        for combo in itertools.combinations(candidates, t):
            if closure_from_orderings(LinearOrderTuple(sys.n, combo)) == sys:
                return t
    raise AssertionError("the full chain tuple always generates the system")


def restrict_system(sys: ClosureSystem, E0) -> ClosureSystem:
    """Restriction to a subset, relabelled to {1..|E0|} in increasing order.

    Closed sets of the restriction are exactly the traces ``E0 & C`` of the
    original closed sets.
    """
    e0 = sorted(set(E0))
    if any(e < 1 or e > sys.n for e in e0):
        raise GeometryError(f"{e0} is not a subset of 1..{sys.n}")
    if not e0:
        return ClosureSystem.from_masks(0, [0], validate=False)
    compress = {e: i for i, e in enumerate(e0)}
    e0mask = set_to_mask(e0)
    traces = set()
    for m in sys.masks:
        tm = m & e0mask
        out = 0
        for e in mask_to_set(tm):
            out |= 1 << compress[e]
        traces.add(out)
    return ClosureSystem.from_masks(len(e0), traces, validate=False)


# -- JSON formats -----------------------------------------------------------
#
# Geometry: {"n": int, "closed_sets": [[int, ...], ...]}, each set ascending.
# Orderings: {"n": int, "orders": [[int, ...], ...]}.
# An optional "labels" list (length n) names elements 1..n for display.


def geometry_to_dict(sys: ClosureSystem, labels=None) -> dict:
    out = {"n": sys.n, "closed_sets": [list(s) for s in sys.closed_sets]}
    if labels is not None:
        out["labels"] = list(labels)
    return out


def geometry_from_dict(data: dict) -> tuple[ClosureSystem, list | None]:
    try:
        n = int(data["n"])
        sets = data["closed_sets"]
    except (KeyError, TypeError) as exc:
        raise GeometryError(f"geometry JSON needs 'n' and 'closed_sets': {exc}")
    labels = data.get("labels")
    if labels is not None and len(labels) != n:
        raise GeometryError("'labels' must list one name per element")
    return ClosureSystem.from_closed_sets(n, sets), labels


def orderings_to_dict(orders: LinearOrderTuple) -> dict:
    return {"n": orders.n, "orders": [list(o) for o in orders.orders]}


def orderings_from_dict(data: dict) -> LinearOrderTuple:
    try:
        return LinearOrderTuple(int(data["n"]), tuple(tuple(o) for o in data["orders"]))
    except (KeyError, TypeError) as exc:
        raise GeometryError(f"ordering JSON needs 'n' and 'orders': {exc}")
