"""Acceptance criteria, one test per criterion, at their stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.
"""

import itertools
import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from almostcircles.combinatorics import (
    ClosureSystem,
    LinearOrderTuple,
    closure_from_orderings,
    convex_dimension,
    orderings_from_geometry,
)
from almostcircles.curves import (
    AffineMap,
    ArcSamples,
    PolynomialArc,
    accuracy,
    arc_equivalence_residual,
    auxiliary_max_check,
    build_almost_circle,
    canonical_arc_parameters,
    eval_good_function,
    good_function_derivatives,
)
from almostcircles.hull_engine import (
    FamilyHull,
    SingletonCurve,
    closure_system_of_family,
    verify_local_anti_exchange,
)
from almostcircles.representation import (
    affine_disjoint_families,
    allocate_parameters,
    build_family,
    multiplicity_for_accuracy,
)


@contextmanager
def criterion(num, label):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {num} ({label}): FAIL")
        raise
    print(f"ACCEPTANCE {num} ({label}): PASS")


def powerset_system(n):
    sets = []
    for r in range(n + 1):
        sets.extend(itertools.combinations(range(1, n + 1), r))
    return ClosureSystem.from_closed_sets(n, sets)


@pytest.fixture(scope="module")
def family_suite():
    """100 random ordering tuples with their built and verified families."""
    rng = random.Random(20160823)
    records = []
    start = time.perf_counter()
    for case in range(100):
        n = rng.randint(1, 5)
        t = rng.choice((3, 4))
        m = rng.choice((1, 2))
        orders = []
        for _ in range(t):
            perm = list(range(1, n + 1))
            rng.shuffle(perm)
            orders.append(tuple(perm))
        tup = LinearOrderTuple(n, tuple(orders))
        system = closure_from_orderings(tup)
        params = allocate_parameters(n, t, m, f"acceptance-{case}")
        family = build_family(tup, m, params)
        hull = FamilyHull(family.curves)
        geometric = closure_system_of_family(hull)
        records.append(
            {
                "orders": tup,
                "system": system,
                "family": family,
                "hull": hull,
                "geometric": geometric,
            }
        )
    elapsed = time.perf_counter() - start
    return records, elapsed


def test_criterion_1_oracle_equivalence(family_suite):
    records, elapsed = family_suite
    with criterion(1, "oracle equivalence of hull engine and orderings"):
        assert len(records) == 100
        for rec in records:
            assert rec["geometric"] == rec["system"]
        assert elapsed < 60.0, f"suite took {elapsed:.1f}s"
    print(f"    100 families built and compared in {elapsed:.1f}s")


def test_criterion_2_accuracy_lemma(family_suite):
    records, _ = family_suite
    with criterion(2, "accuracy ratio cos^2(pi/(mt))"):
        reference = build_almost_circle(
            [[Fraction(3, 10)] * 3, [Fraction(6, 10)] * 3]
        )
        rep = accuracy(reference)
        assert abs(rep.ratio - 0.75) < 1e-12
        assert rep.ratio >= 0.7258
        for rec in records:
            for curve in rec["family"].members:
                rep = accuracy(curve)
                mt = curve.m * curve.t
                assert abs(rep.ratio - math.cos(math.pi / mt) ** 2) < 1e-12
                assert rep.ratio >= 1.0 - (math.pi / mt) ** 2


def test_criterion_3_multiplicity_bound():
    with criterion(3, "multiplicity from the accuracy target"):
        expected = {0.5: 2, 0.1: 4, 0.01: 11}
        for eps, m_expected in expected.items():
            m = multiplicity_for_accuracy(3, eps)
            assert m == math.ceil(math.pi / (3 * math.sqrt(eps)))
            assert m == m_expected
            acc = 1.0 - (math.pi / (m * 3)) ** 2
            assert acc >= 1.0 - eps
        assert abs((1.0 - (math.pi / 33) ** 2) - 0.99094) < 5e-5


def test_criterion_4_exact_function_suite():
    with criterion(4, "exact rational function-family suite"):
        rng = random.Random(4)

        def rational(den=997):
            return Fraction(rng.randint(1, den - 1), den)

        for _ in range(10_000):
            a = rational()
            assert eval_good_function(a, 0) == 0
            assert eval_good_function(a, 1) == 0
            d0, _ = good_function_derivatives(a, 0)
            d1, _ = good_function_derivatives(a, 1)
            assert d0 == 1
            assert d1 == -1

        xs = [rational(9973) for _ in range(1000)]
        half = Fraction(1, 2)
        cache = {}

        def values(alpha):
            if alpha not in cache:
                cache[alpha] = [eval_good_function(alpha, x) for x in xs]
            return cache[alpha]

        for _ in range(100):
            a, b = sorted((rational(), rational()))
            if a == b:
                b = a + Fraction(1, 997 * 2)
            va, vb = values(a), values(b)
            for x, fa, fb in zip(xs, va, vb):
                assert fa > fb
                assert 0 < fa < half - abs(x - half)
                assert 0 < fb < half - abs(x - half)
            for x in xs[:10]:
                _, second = good_function_derivatives(a, x)
                assert second < 0
                _, second = good_function_derivatives(b, x)
                assert second < 0

        assert auxiliary_max_check() == Fraction(1024, 625)
        assert auxiliary_max_check() == Fraction("1.6384")


def _random_affine(rng, scale=2.0):
    while True:
        entries = [rng.uniform(-scale, scale) for _ in range(4)]
        if abs(entries[0] * entries[3] - entries[1] * entries[2]) > 0.1:
            return AffineMap(*entries, rng.uniform(-4, 4), rng.uniform(-4, 4))


def test_criterion_5_rigidity_falsification():
    with criterion(5, "rigidity: round trips and cross fits"):
        rng = random.Random(5)
        for _ in range(100):
            alpha = Fraction(rng.randint(50, 950), 1000)
            psi = _random_affine(rng)
            samples = ArcSamples.from_arc(PolynomialArc(alpha, psi))
            rec_alpha, rec_map = canonical_arc_parameters(samples)
            assert abs(rec_alpha - float(alpha)) < 1e-9
            assert rec_map.almost_equal(psi, 1e-9)
        hits = 0
        for _ in range(100):
            a = Fraction(rng.randint(50, 900), 1000)
            gap = Fraction(rng.randint(50, 200), 1000)
            b = min(a + gap, Fraction(949, 950))
            s1 = ArcSamples.from_arc(PolynomialArc(a, _random_affine(rng)))
            s2 = ArcSamples.from_arc(PolynomialArc(b, _random_affine(rng)))
            if arc_equivalence_residual(s1, s2) > 1e-3:
                hits += 1
        assert hits == 100


def test_criterion_6_affine_disjoint_families():
    with criterion(6, "affine-disjoint families share no arc"):
        chain2 = ClosureSystem.from_closed_sets(2, [[], [1], [1, 2]])
        fams = affine_disjoint_families(
            chain2, 2, base_family_id="acceptance-disjoint", epsilon=0.5
        )
        recovered = []
        for fam in fams:
            alphas = []
            for curve in fam.members:
                for arc in curve.arcs:
                    alpha, _ = canonical_arc_parameters(ArcSamples.from_arc(arc))
                    alphas.append(alpha)
            recovered.append(alphas)
        matches = sum(
            1
            for a1 in recovered[0]
            for a2 in recovered[1]
            if abs(a1 - a2) <= 1e-3
        )
        assert matches == 0


# -- criterion 7: local anti-exchange plus the classical singleton check ------------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _on_segment(p, a, b):
    if _cross(a, b, p) != 0:
        return False
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _in_triangle(p, a, b, c):
    d1 = _cross(a, b, p)
    d2 = _cross(b, c, p)
    d3 = _cross(c, a, p)
    has_neg = (d1 < 0) or (d2 < 0) or (d3 < 0)
    has_pos = (d1 > 0) or (d2 > 0) or (d3 > 0)
    return not (has_neg and has_pos)


def _exact_in_hull(p, pts):
    """Exact rational membership, via Caratheodory in the plane."""
    if not pts:
        return False
    if any(p == q for q in pts):
        return True
    for a, b in itertools.combinations(pts, 2):
        if _on_segment(p, a, b):
            return True
    for a, b, c in itertools.combinations(pts, 3):
        if _cross(a, b, c) != 0 and _in_triangle(p, a, b, c):
            return True
    return False


def _classical_closure_system(points):
    n = len(points)
    closed = []
    for mask in range(1 << n):
        subset = [points[i] for i in range(n) if mask & (1 << i)]
        outside = [points[i] for i in range(n) if not mask & (1 << i)]
        if all(not _exact_in_hull(p, subset) for p in outside):
            closed.append(mask)
    return ClosureSystem.from_masks(n, closed, validate=False)


def _scipy_cross_check(points, system):
    from scipy.spatial import Delaunay

    arr = np.array(points, dtype=float)
    if len(points) < 4:
        return
    for mask in range(1, 1 << len(points)):
        rows = [i for i in range(len(points)) if mask & (1 << i)]
        if len(rows) < 3:
            continue
        sub = arr[rows]
        span = sub - sub[0]
        if np.abs(np.linalg.det(np.cov(span.T))) < 1e-12 and len(rows) >= 3:
            continue
        try:
            tri = Delaunay(sub)
        except Exception:
            continue  # degenerate subset; exact oracle already covered it
        outside = [i for i in range(len(points)) if not mask & (1 << i)]
        closed = all(tri.find_simplex(arr[o]) < 0 for o in outside)
        assert closed == (mask in system.masks)


def test_criterion_7_local_anti_exchange(family_suite):
    records, _ = family_suite
    with criterion(7, "local anti-exchange and the classical plane"):
        for rec in records:
            report = verify_local_anti_exchange(rec["hull"])
            assert report.holds, report.violation
        rng = random.Random(7)
        for _ in range(20):
            size = rng.randint(1, 7)
            points = []
            while len(points) < size:
                p = (rng.randint(0, 60), rng.randint(0, 60))
                if p not in points:
                    points.append(p)
            singletons = [SingletonCurve(float(x), float(y)) for x, y in points]
            geometric = closure_system_of_family(singletons)
            classical = _classical_closure_system(points)
            assert geometric == classical
            assert verify_local_anti_exchange(singletons).holds
            _scipy_cross_check(points, classical)


def test_criterion_8_ordering_round_trip(family_suite):
    records, _ = family_suite
    with criterion(8, "ordering extraction round trip and convex dimension"):
        for rec in records:
            extracted = orderings_from_geometry(rec["system"])
            assert closure_from_orderings(extracted) == rec["system"]
        assert convex_dimension(powerset_system(3)) == 3
