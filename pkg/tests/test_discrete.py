"""Discrete curve model: energies, bounds, multiplicity, CSV interchange."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.random import default_rng

from elastica.curves import canonical_leaf, varpi_star
from elastica.discrete import (
    FOUR_PI_SQ,
    DiscreteCurve,
    bending_energy,
    curvature_data,
    curve_from_csv,
    curve_to_csv,
    detect_multiplicity,
    edge_lengths,
    fenchel_floor_check,
    length,
    liyau_check,
    load_curve_csv,
    normalized_energy,
    resample_arclength,
    save_curve_csv,
    total_curvature,
    turning_angles,
    vertex_arclengths,
)
from elastica.errors import DomainError

TWO_PI = 2.0 * math.pi


def regular_polygon(n: int, folds: int = 1, radius: float = 1.0) -> DiscreteCurve:
    th = TWO_PI * folds * np.arange(n) / n
    return DiscreteCurve(radius * np.column_stack([np.cos(th), np.sin(th)]), closed=True)


def leaf_vertices(n: int) -> DiscreteCurve:
    # open arc with zero endpoint curvature; smooth everywhere
    leaf = canonical_leaf()
    return DiscreteCurve(leaf.point(np.linspace(0.0, leaf.length, n + 1)), closed=False)


def random_closed(rng, n: int) -> DiscreteCurve:
    return DiscreteCurve(rng.normal(size=(n, 2)), closed=True)


class TestValidation:
    def test_needs_three_vertices(self):
        with pytest.raises(DomainError):
            DiscreteCurve([[0.0, 0.0], [1.0, 0.0]])

    def test_dim_must_be_2_or_3(self):
        with pytest.raises(DomainError):
            DiscreteCurve(np.zeros((4, 4)))
        with pytest.raises(DomainError):
            DiscreteCurve(np.arange(4.0)[:, None])

    def test_consecutive_duplicates_rejected(self):
        with pytest.raises(DomainError):
            DiscreteCurve([[0, 0], [0, 0], [1, 0]])

    def test_closing_edge_checked(self):
        # last vertex equal to the first is a zero-length wrap edge
        with pytest.raises(DomainError):
            DiscreteCurve([[0, 0], [1, 0], [0, 1], [0, 0]], closed=True)

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            DiscreteCurve([[0, 0], [1, np.nan], [0, 1]])

    def test_vertices_read_only(self):
        c = regular_polygon(8)
        with pytest.raises(ValueError):
            c.vertices[0, 0] = 5.0

    def test_open_curve_may_touch_endpoints(self):
        # non-adjacent coincidence is allowed (only edges must be nonzero)
        DiscreteCurve([[0, 0], [1, 0], [1, 1], [0, 0]], closed=False)


class TestLength:
    def test_unit_square(self):
        c = DiscreteCurve([[0, 0], [1, 0], [1, 1], [0, 1]], closed=True)
        assert length(c) == pytest.approx(4.0, abs=1e-15)

    def test_regular_ngon_chord_formula(self):
        for n in (3, 7, 64):
            c = regular_polygon(n)
            assert length(c) == pytest.approx(2 * n * math.sin(math.pi / n), rel=1e-14)

    def test_10000gon_close_to_circle(self):
        # series: 2pi - 2N sin(pi/N) = pi^3/(3 N^2) + O(N^-4) = 1.034e-7
        L = length(regular_polygon(10000))
        assert abs(L - TWO_PI) < 1.04e-7
        assert abs((TWO_PI - L) - math.pi**3 / 3e8) < 1e-12

    def test_open_vs_closed(self):
        v = [[0, 0], [1, 0], [1, 1]]
        assert length(DiscreteCurve(v, closed=False)) == pytest.approx(2.0)
        assert length(DiscreteCurve(v, closed=True)) == pytest.approx(2.0 + math.sqrt(2))

    def test_vertex_arclengths(self):
        c = DiscreteCurve([[0, 0], [3, 0], [3, 4]], closed=False)
        assert vertex_arclengths(c) == pytest.approx([0.0, 3.0, 7.0])


class TestBendingEnergy:
    def test_straight_polyline_zero(self):
        x = np.linspace(0, 1, 17) ** 2
        c = DiscreteCurve(np.column_stack([x, np.zeros_like(x)]), closed=False)
        assert bending_energy(c) == 0.0

    def test_circle_4096(self):
        B = bending_energy(regular_polygon(4096))
        assert B == pytest.approx(TWO_PI, rel=1e-5)
        # exact discrete value is 2 pi^2 / (N sin(pi/N))
        assert B == pytest.approx(2 * math.pi**2 / (4096 * math.sin(math.pi / 4096)), rel=1e-13)

    def test_radius_scaling(self):
        # B[Lambda c] = B[c] / Lambda
        c1, c7 = regular_polygon(512), regular_polygon(512, radius=7.0)
        assert bending_energy(c7) == pytest.approx(bending_energy(c1) / 7.0, rel=1e-12)

    def test_two_fold_cover(self):
        c = regular_polygon(8192, folds=2)
        assert bending_energy(c) == pytest.approx(2 * TWO_PI, rel=1e-5)
        assert normalized_energy(c).Bbar == pytest.approx(16 * math.pi**2, rel=1e-6)

    def test_endpoints_carry_no_energy(self):
        # open L-shape: only the corner vertex contributes
        c = DiscreteCurve([[0, 0], [1, 0], [1, 1]], closed=False)
        theta = math.pi / 2
        assert bending_energy(c) == pytest.approx(2 * theta**2 / 2.0, rel=1e-14)


class TestNormalizedEnergy:
    def test_circle_hits_floor(self):
        rep = normalized_energy(regular_polygon(4096))
        assert rep.Bbar == pytest.approx(FOUR_PI_SQ, rel=1e-9)
        assert rep.Bbar == pytest.approx(rep.L * rep.B, rel=1e-15)

    def test_scale_invariance_exact(self):
        c = regular_polygon(600, folds=3)
        scaled = DiscreteCurve(7.0 * c.vertices, closed=True)
        assert normalized_energy(scaled).Bbar == pytest.approx(
            normalized_energy(c).Bbar, rel=1e-12
        )

    def test_isometry_invariance(self):
        rng = default_rng(7)
        c = random_closed(rng, 40)
        a = 0.83
        R = np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        moved = DiscreteCurve(c.vertices @ R.T + np.array([3.0, -1.5]), closed=True)
        r0, r1 = normalized_energy(c), normalized_energy(moved)
        assert r1.L == pytest.approx(r0.L, rel=1e-12)
        assert r1.B == pytest.approx(r0.B, rel=1e-12)
        assert r1.TC == pytest.approx(r0.TC, rel=1e-12)

    def test_report_formats(self):
        rep = normalized_energy(regular_polygon(64))
        text = rep.to_text()
        assert "length" in text and "normalized" in text
        import json

        parsed = json.loads(rep.to_json_line())
        assert parsed["Bbar"] == rep.Bbar
        assert set(parsed) == {"L", "B", "Bbar", "TC"}


class TestTotalCurvature:
    def test_triangle(self):
        c = DiscreteCurve([[0, 0], [2, 0], [0.3, 1.1]], closed=True)
        assert total_curvature(c) == pytest.approx(TWO_PI, abs=1e-12)

    def test_circle_4096(self):
        assert total_curvature(regular_polygon(4096)) == pytest.approx(TWO_PI, abs=1e-10)

    def test_matches_abs_kappa_sum(self):
        rng = default_rng(3)
        c = random_closed(rng, 50)
        kappa, lbar, _ = curvature_data(c)
        assert total_curvature(c) == pytest.approx(np.sum(np.abs(kappa) * lbar), rel=1e-14)

    def test_signed_angles_planar_only(self):
        c = DiscreteCurve(np.eye(3), closed=True)
        with pytest.raises(DomainError):
            turning_angles(c, signed=True)

    def test_signed_sum_counts_winding(self):
        for folds in (1, 2, 3):
            c = regular_polygon(1200, folds=folds)
            signed = turning_angles(c, signed=True)
            assert np.sum(signed) == pytest.approx(TWO_PI * folds, abs=1e-9)


class TestFenchel:
    def test_circle_equality(self):
        rep = fenchel_floor_check(regular_polygon(4096))
        assert rep.passed
        assert rep.Bbar == pytest.approx(rep.TC**2, rel=1e-6)
        assert rep.TC == pytest.approx(TWO_PI, abs=1e-10)

    def test_jittered_circle_strict(self):
        rng = default_rng(11)
        for _ in range(20):
            th = np.sort(rng.uniform(0, TWO_PI, size=64))
            th = th[np.concatenate([[True], np.diff(th) > 1e-6])]
            r = 1.0 + 0.2 * rng.standard_normal(len(th))
            c = DiscreteCurve(np.column_stack([r * np.cos(th), r * np.sin(th)]), closed=True)
            rep = fenchel_floor_check(c)
            assert rep.passed
            assert rep.Bbar > rep.TC**2

    def test_triangle_passes(self):
        rep = fenchel_floor_check(DiscreteCurve([[0, 0], [1, 0], [0.2, 0.5]], closed=True))
        assert rep.passed and rep.TC == pytest.approx(TWO_PI, abs=1e-12)
        # Bbar = (sum of weighted turning angles)^2-like; floor still holds
        assert rep.Bbar > FOUR_PI_SQ

    def test_open_curve_rejected(self):
        with pytest.raises(DomainError):
            fenchel_floor_check(DiscreteCurve([[0, 0], [1, 0], [1, 1]]))

    @given(st.integers(min_value=3, max_value=40), st.integers(0, 2**31 - 1))
    @settings(max_examples=60, deadline=None)
    def test_cauchy_schwarz_property(self, n, seed):
        c = random_closed(default_rng(seed), n)
        rep = normalized_energy(c)
        assert rep.B * rep.L >= rep.TC**2 * (1.0 - 1e-12)


class TestConvergence:
    def test_circle_and_leaf_second_order(self):
        leaf = canonical_leaf()
        B_leaf = varpi_star() / leaf.length  # Bbar = L B with L = 2K
        cases = [
            (lambda n: regular_polygon(n), TWO_PI),
            (leaf_vertices, B_leaf),
        ]
        for build, exact in cases:
            errs = [abs(bending_energy(build(n)) - exact) / exact for n in (256, 512, 1024, 2048)]
            orders = [math.log2(errs[i] / errs[i + 1]) for i in range(3)]
            assert min(orders) >= 1.9


class TestResample:
    def test_regular_polygon_unchanged(self):
        c = regular_polygon(256)
        r = resample_arclength(c, 256)
        assert np.max(np.abs(r.vertices - c.vertices)) < 1e-12

    def test_geometric_line_made_uniform(self):
        x = np.concatenate([[0.0], np.cumsum(0.5 ** np.arange(9))])
        c = DiscreteCurve(np.column_stack([x, np.zeros_like(x)]), closed=False)
        r = resample_arclength(c, 12)
        gaps = np.diff(r.vertices[:, 0])
        assert np.allclose(gaps, gaps[0], atol=1e-12)
        assert r.vertices[0, 0] == c.vertices[0, 0]
        assert r.vertices[-1, 0] == c.vertices[-1, 0]

    def test_leaf_energy_stable_under_refinement(self):
        c = leaf_vertices(100)
        refined = resample_arclength(c, 300)
        B0, B1 = bending_energy(c), bending_energy(refined)
        assert abs(B1 - B0) / B0 < 1e-3

    def test_counts(self):
        c = regular_polygon(64)
        assert resample_arclength(c, 100).n_vertices == 100
        o = leaf_vertices(64)
        assert resample_arclength(o, 100).n_vertices == 101

    def test_needs_three(self):
        with pytest.raises(DomainError):
            resample_arclength(regular_polygon(16), 2)


class TestMultiplicity:
    def test_embedded_circle(self):
        rep = detect_multiplicity(regular_polygon(4096))
        assert rep.r == 1

    def test_two_fold_cover(self):
        rep = detect_multiplicity(regular_polygon(8192, folds=2))
        assert rep.r == 2
        assert len(rep.witnesses) == 2

    def test_witness_separation(self):
        c = regular_polygon(8192, folds=2)
        eps = 1e-3 * length(c)
        rep = detect_multiplicity(c, eps)
        w = sorted(rep.witnesses)
        assert w[1] - w[0] > 2 * eps  # at least one cluster diameter apart

    def test_eps_must_be_positive(self):
        with pytest.raises(DomainError):
            detect_multiplicity(regular_polygon(16), eps=0.0)


def petal_curve(rng, r: int, n: int = 96) -> DiscreteCurve:
    # r circles through the origin, random radii and headings
    loops = []
    for _ in range(r):
        rho = rng.uniform(0.7, 1.5)
        phi = rng.uniform(0, TWO_PI)
        center = rho * np.array([math.cos(phi), math.sin(phi)])
        ang = phi + math.pi + TWO_PI * np.arange(n) / n
        loops.append(center + rho * np.column_stack([np.cos(ang), np.sin(ang)]))
    return DiscreteCurve(np.vstack(loops), closed=True)


class TestLiYau:
    def test_circle_falls_back_to_fenchel(self):
        rep = liyau_check(regular_polygon(4096))
        assert rep.r == 1
        assert rep.bound_kind == "fenchel"
        assert rep.bound == FOUR_PI_SQ
        assert rep.satisfied

    def test_double_cover_uses_r2_bound(self):
        rep = liyau_check(regular_polygon(8192, folds=2))
        assert rep.r == 2 and rep.bound_kind == "liyau"
        assert rep.bound == pytest.approx(4 * varpi_star(), rel=1e-15)
        assert rep.satisfied and rep.slack > 0

    def test_open_rejected(self):
        with pytest.raises(DomainError):
            liyau_check(leaf_vertices(32))

    def test_random_petal_curves_always_satisfy(self):
        # universal bound: 200 random curves forced through an r-fold point
        rng = default_rng(2024)
        for i in range(200):
            r = 2 + (i % 2)
            rep = liyau_check(petal_curve(rng, r))
            assert rep.r == r
            assert rep.bound_kind == "liyau"
            assert rep.satisfied and rep.slack > 0


class TestCsv:
    def test_round_trip_closed(self, tmp_path):
        c = regular_polygon(17, folds=1, radius=0.9)
        path = tmp_path / "c.csv"
        save_curve_csv(c, path)
        back = load_curve_csv(path)
        assert back.closed
        assert np.array_equal(back.vertices, c.vertices)  # 17 sig digits round-trip

    def test_round_trip_open_3d(self):
        v = default_rng(0).normal(size=(9, 3))
        c = DiscreteCurve(v, closed=False)
        back = curve_from_csv(curve_to_csv(c))
        assert not back.closed and back.dim == 3
        assert np.array_equal(back.vertices, c.vertices)

    def test_marker_written(self):
        text = curve_to_csv(regular_polygon(5))
        assert text.splitlines()[0] == "# closed=true"
        assert text.splitlines()[1] == "s,x,y"

    def test_endpoint_coincidence_detected(self):
        # no marker: duplicated seam vertex implies a closed curve
        text = "s,x,y\n0,0,0\n1,1,0\n2,1,1\n3,0,1\n4,0,0\n"
        c = curve_from_csv(text)
        assert c.closed and c.n_vertices == 4

    def test_unmarked_open_stays_open(self):
        text = "s,x,y\n0,0,0\n1,1,0\n2,1,1\n"
        c = curve_from_csv(text)
        assert not c.closed

    def test_extra_columns_ignored(self):
        text = "# closed=false\ns,x,y,k\n0,0,0,1\n1,1,0,2\n2,1,1,3\n"
        c = curve_from_csv(text)
        assert c.n_vertices == 3 and c.dim == 2

    def test_parse_errors(self):
        for bad in (
            "x,y\n0,0\n1,1\n2,2\n",  # header must start with s,x,y
            "s,x,y\n0,0\n",  # column count mismatch
            "s,x,y\n0,zero,0\n1,1,0\n2,2,0\n",  # bad number
            "# closed=maybe\ns,x,y\n0,0,0\n1,1,0\n2,1,1\n",  # bad marker
            "# closed=true\n",  # no rows
        ):
            with pytest.raises(DomainError):
                curve_from_csv(bad)


class TestCurvatureData:
    def test_circle_signed_positive_ccw(self):
        kappa, lbar, s = curvature_data(regular_polygon(512), signed=True)
        assert np.all(kappa > 0)
        assert np.mean(kappa) == pytest.approx(1.0, rel=1e-4)
        assert np.sum(lbar) == pytest.approx(length(regular_polygon(512)), rel=1e-12)

    def test_open_interior_only(self):
        c = DiscreteCurve([[0, 0], [1, 0], [2, 0.1], [3, 0]], closed=False)
        kappa, lbar, s = curvature_data(c)
        assert len(kappa) == 2  # two interior vertices
        assert s[0] == pytest.approx(1.0)

    def test_edge_lengths_roll(self):
        c = DiscreteCurve([[0, 0], [2, 0], [2, 1]], closed=True)
        assert edge_lengths(c) == pytest.approx([2.0, 1.0, math.sqrt(5)])
