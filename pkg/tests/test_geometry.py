import math

import numpy as np
import pytest

from schrodlab.geometry import (
    GeometryError,
    analyze_surface,
    check_convex,
    curvature_zeros,
    detect_type,
    gauss_map_inverse,
    gaussian_curvature,
    radial_scale,
    sample_surface,
    surface_point,
)
from schrodlab.symbols import PolySymbol, axis_powers, radial_power

QUARTIC = axis_powers(2, 4)                      # type 4
ROUND4 = radial_power(2, 2)                      # type 2 (round)
SEXTIC = PolySymbol(n=2, m=6, terms=(((6, 0), 1.0), ((2, 4), 5.0), ((0, 6), 1.0)))
CROSS = PolySymbol(n=2, m=4, terms=(((4, 0), 1.0), ((2, 2), 6.0), ((0, 4), 1.0)))
NONCONVEX = PolySymbol(n=2, m=4, terms=(((4, 0), 1.0), ((2, 2), -1.0), ((0, 4), 1.0)))

RNG = np.random.default_rng(42)


def brute_type_sums(symbol, xi, eta):
    """Test-local oracle: directional derivative sums via polynomial fitting
    of P along the line, independent of the symbol module's term calculus.
    P is exactly polynomial in the line parameter, so a unit-span fit has no
    truncation error."""
    s = np.linspace(-1.0, 1.0, 4 * (symbol.m + 1))
    vals = [symbol.evaluate(np.asarray(xi) + si * np.asarray(eta)) for si in s]
    coeffs = np.polyfit(s, vals, symbol.m)[::-1]
    derivs = [abs(math.factorial(j) * coeffs[j]) for j in range(1, symbol.m + 1)]
    return np.cumsum(derivs)


class TestSampling:
    def test_round_surface_is_circle(self):
        samples = sample_surface(ROUND4, 128)
        assert np.allclose(np.linalg.norm(samples.points, axis=1), 1.0, atol=1e-12)

    def test_on_surface_by_substitution(self):
        for sym in (QUARTIC, SEXTIC, CROSS):
            samples = sample_surface(sym, 512)
            assert np.allclose(sym.evaluate(samples.points), 1.0, atol=1e-12)

    def test_diagonal_point_quartic(self):
        # P(omega) = 1/2, rho = 2^{1/4}, xi = 2^{-1/4} (1, 1); substitute back
        omega = np.array([1.0, 1.0]) / math.sqrt(2.0)
        xi = radial_scale(QUARTIC, omega) * omega
        assert QUARTIC.evaluate(xi) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(xi, 2.0 ** (-0.25) * np.ones(2), atol=1e-14)

    def test_single_term_axis(self):
        sym = PolySymbol(n=2, m=4, terms=(((4, 0), 16.0), ((0, 4), 1.0)))
        sp = surface_point(sym, [1.0, 0.0])
        assert sp.point[0] == pytest.approx(16.0 ** (-1 / 4), rel=1e-14)

    def test_normal_and_phi_gradient_consistency(self):
        sp = surface_point(QUARTIC, [0.6, 0.8])
        g = QUARTIC.gradient(np.array(sp.point))
        assert np.allclose(sp.normal, g / np.linalg.norm(g))
        assert sp.grad_norm_phi == pytest.approx(np.linalg.norm(g) / 4.0, rel=1e-14)

    def test_nonelliptic_rejected(self):
        bad = PolySymbol(n=2, m=4, terms=(((4, 0), 1.0), ((0, 4), -1.0)))
        with pytest.raises(GeometryError):
            sample_surface(bad, 256)


class TestTypeDetection:
    def test_quartic_axis_powers_is_type_m(self):
        rep = detect_type(QUARTIC, density=1024)
        assert rep.k == 4 and rep.certified

    def test_sextic_is_type_4_below_degree(self):
        rep = detect_type(SEXTIC, density=1024)
        assert rep.k == 4 and rep.certified
        assert SEXTIC.m == 6

    def test_round_is_type_2_with_delta_4(self):
        # oracle: |g'| + |g''| = |4c| + |4 + 8c^2| >= 4 on the unit circle,
        # attained when the direction is tangent (c = <xi, eta> = 0)
        rep = detect_type(ROUND4, density=1024)
        assert rep.k == 2
        assert rep.delta == pytest.approx(4.0, rel=1e-6)

    def test_monotone_in_order(self):
        rep = detect_type(SEXTIC, density=512)
        sums = rep.grid_min_per_order
        assert all(a <= b + 1e-15 for a, b in zip(sums, sums[1:]))

    def test_k_at_most_m_and_delta_bound(self):
        for sym in (QUARTIC, ROUND4, SEXTIC, CROSS):
            rep = detect_type(sym, density=512)
            assert rep.k is not None and 2 <= rep.k <= sym.m
            # the order-m sum dominates m! * min_sphere P
            from schrodlab.symbols import check_elliptic

            min_p = check_elliptic(sym, density=2048).min_value
            assert rep.grid_min_per_order[sym.m - 1] >= math.factorial(sym.m) * min_p - 1e-6

    def test_grid_sums_match_polyfit_oracle(self):
        samples = sample_surface(SEXTIC, 64)
        etas = sample_surface(ROUND4, 8).points  # 8 unit directions
        for i in (0, 17, 40):
            for eta in etas[:3]:
                ours = SEXTIC.line_coefficients(samples.points[i], eta)
                ours_sums = np.cumsum(
                    [abs(math.factorial(j) * ours[j]) for j in range(1, 7)])
                oracle = brute_type_sums(SEXTIC, samples.points[i], eta)
                assert np.allclose(ours_sums, oracle, rtol=1e-5, atol=1e-5)

    def test_impossible_delta_min_reports_witness(self):
        rep = detect_type(ROUND4, density=256, delta_min=1e9)
        assert not rep.certified and rep.k is None and rep.witness is not None


class TestConvexity:
    def test_round_convex_zero_margin(self):
        rep = check_convex(ROUND4, density=512)
        assert rep.convex
        assert abs(rep.margin) <= 1e-9

    def test_cross_quartic_convex(self):
        # Hessian determinant 144(x^2-y^2)^2 >= 0 with positive diagonal:
        # P convex, so the sublevel set is convex
        rep = check_convex(CROSS, density=1024)
        assert rep.convex

    def test_saddle_symbol_not_convex(self):
        rep = check_convex(NONCONVEX, density=1024)
        assert not rep.convex
        assert rep.margin < -1e-3
        assert rep.witness is not None

    def test_verdict_invariant_under_coefficient_scaling(self):
        for sym, scaled in ((QUARTIC, 16.0), (NONCONVEX, 16.0)):
            bigger = PolySymbol(n=2, m=4,
                                terms=tuple((a, scaled * c) for a, c in sym.terms))
            assert check_convex(sym, 512).convex == check_convex(bigger, 512).convex

    def test_quartic_and_sextic_convex(self):
        assert check_convex(QUARTIC, density=1024).convex
        assert check_convex(SEXTIC, density=1024).convex


class TestCurvature:
    def test_round_curvature_one_everywhere(self):
        samples = sample_surface(ROUND4, 64)
        for i in range(len(samples)):
            k = gaussian_curvature(ROUND4, samples.points[i])
            assert k == pytest.approx(1.0, abs=1e-8)

    def test_quartic_flat_on_axis(self):
        assert gaussian_curvature(QUARTIC, [1.0, 0.0]) == pytest.approx(0.0, abs=1e-12)

    def test_cross_flat_on_diagonal(self):
        xi = 8.0 ** (-0.25) * np.array([1.0, 1.0])
        assert gaussian_curvature(CROSS, xi) == pytest.approx(0.0, abs=1e-10)

    def test_zero_scan_finds_axis_points(self):
        zeros = curvature_zeros(QUARTIC, density=512, threshold=1e-8)
        assert len(zeros) == 4
        for z in zeros:
            assert min(abs(abs(z[0]) - 1.0), abs(abs(z[1]) - 1.0)) < 1e-6

    def test_zero_scan_empty_for_round(self):
        assert curvature_zeros(ROUND4, density=256) == []

    def test_n3_round_curvature(self):
        round3 = radial_power(3, 2)
        samples = sample_surface(round3, 128)
        for i in range(0, len(samples), 16):
            k = gaussian_curvature(round3, samples.points[i])
            assert k == pytest.approx(1.0, abs=1e-8)


class TestGaussMap:
    def test_round_support_points(self):
        conv = check_convex(ROUND4, density=512)
        eta = np.array([0.6, -0.8])
        plus, minus = gauss_map_inverse(ROUND4, eta, convexity=conv)
        assert np.allclose(plus.point, eta, atol=1e-9)
        assert np.allclose(minus.point, -eta, atol=1e-9)

    def test_quartic_axis_support(self):
        conv = check_convex(QUARTIC, density=512)
        plus, _ = gauss_map_inverse(QUARTIC, [1.0, 0.0], convexity=conv)
        assert plus.point[0] == pytest.approx(1.0, abs=1e-10)
        assert abs(plus.point[1]) < 1e-10

    def test_support_height_identity(self):
        # <eta, xi_plus> * |grad phi(xi_plus)| = 1
        conv = check_convex(CROSS, density=512)
        for _ in range(10):
            eta = RNG.standard_normal(2)
            eta /= np.linalg.norm(eta)
            plus, minus = gauss_map_inverse(CROSS, eta, convexity=conv)
            assert np.dot(eta, plus.point) * plus.grad_norm_phi == pytest.approx(1.0, abs=1e-8)
            assert np.dot(eta, minus.point) * minus.grad_norm_phi == pytest.approx(-1.0, abs=1e-8)

    def test_round_trip_through_gauss_map(self):
        # inverse followed by the Gauss map recovers eta to 1e-6 angular error
        for sym in (QUARTIC, CROSS):
            conv = check_convex(sym, density=512)
            for _ in range(25):
                eta = RNG.standard_normal(2)
                eta /= np.linalg.norm(eta)
                plus, _ = gauss_map_inverse(sym, eta, convexity=conv)
                nv = np.array(plus.normal)
                sin_err = abs(nv[0] * eta[1] - nv[1] * eta[0])
                assert sin_err < 1e-6
                assert np.dot(nv, eta) > 0

    def test_nonconvex_refused(self):
        with pytest.raises(GeometryError, match="convex"):
            gauss_map_inverse(NONCONVEX, [1.0, 0.0])

    def test_n3_support(self):
        q3 = axis_powers(3, 4)
        conv = check_convex(q3, density=512)
        eta = np.array([0.3, -0.5, 0.81])
        eta /= np.linalg.norm(eta)
        plus, _ = gauss_map_inverse(q3, eta, convexity=conv, density=2048)
        nv = np.array(plus.normal)
        assert np.linalg.norm(np.cross(nv, eta)) < 1e-8
        assert np.dot(eta, plus.point) * plus.grad_norm_phi == pytest.approx(1.0, abs=1e-8)


class TestReport:
    def test_analyze_surface_round_trip(self):
        rep = analyze_surface(QUARTIC, density=512, curvature_density=512)
        d = rep.to_dict()
        assert d["k"] == 4 and d["convex"] is True
        assert len(d["curvature_zeros"]) == 4
        assert d["density"] == 512

    def test_classical_flag_passthrough(self):
        classical = radial_power(2, 1)  # |xi|^2, m = 2
        rep = analyze_surface(classical, density=512, curvature_density=256)
        assert rep.classical_regime
        assert rep.k == 2
