"""Polynomial core: frozen expansions, companion-matrix oracle, sphere evaluation."""

import cmath
import math

import numpy as np
import pytest

from newtongraph.errors import DegreeTooLow, MultipleRoot
from newtongraph.poly import (
    NewtonMap,
    Polynomial,
    make_newton_map,
    roots_of,
    verify_newton_conditions,
)
from newtongraph.sphere import INF, SpherePoint, chordal_distance
from newtongraph.tolerances import DEFAULT_TOL


def P(*coeffs):
    """Lowest-order first."""
    return Polynomial(tuple(complex(c) for c in coeffs))


CUBIC_UNITY = P(-1, 0, 0, 1)      # z^3 - 1
CUBIC_ODD = P(0, -1, 0, 1)        # z^3 - z


class TestChordal:
    def test_basic_values(self):
        assert chordal_distance(INF, INF) == 0.0
        assert chordal_distance(0, INF) == pytest.approx(2.0)
        assert chordal_distance(0, 0) == 0.0
        # d(1, -1) = 2*2/ (sqrt(2)*sqrt(2)) = 2
        assert chordal_distance(1, -1) == pytest.approx(2.0)

    def test_symmetry_and_inversion_invariance(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a, b = (complex(*rng.normal(size=2)) for _ in range(2))
            d1 = chordal_distance(a, b)
            assert d1 == pytest.approx(chordal_distance(b, a))
            if a != 0 and b != 0:
                assert d1 == pytest.approx(chordal_distance(1 / a, 1 / b), abs=1e-12)

    def test_large_values_do_not_overflow(self):
        assert chordal_distance(1e200, INF) < 1e-150
        assert 0 <= chordal_distance(1e200, -1e200) <= 2.0


class TestPolynomial:
    def test_normalization_strips_leading_zeros(self):
        q = Polynomial((1, 2, 0, 0))
        assert q.degree == 1
        assert q.coeffs == (1 + 0j, 2 + 0j)

    def test_eval_and_derivative(self):
        q = P(1, -2, 3)  # 3z^2 - 2z + 1
        assert q(2) == 3 * 4 - 4 + 1
        assert q.derivative().coeffs == (-2 + 0j, 6 + 0j)

    def test_arithmetic(self):
        a, b = P(1, 1), P(-1, 1)
        assert (a * b).coeffs == (-1 + 0j, 0j, 1 + 0j)
        assert (a - b).coeffs == (2 + 0j,)
        assert a.shift_up().coeffs == (0j, 1 + 0j, 1 + 0j)

    def test_from_roots_round_trip(self):
        roots = [1, -2, 3j]
        q = Polynomial.from_roots(roots, leading=2)
        for r in roots:
            assert abs(q(r)) < 1e-12
        assert q.coeffs[-1] == 2 + 0j

    def test_reversed_coeffs_identity(self):
        q = P(1, 0, 0, 2)  # 2z^3 + 1
        rev = q.reversed_coeffs(3)
        # w^3 * q(1/w) = w^3 + 2 evaluated at w = 0.5 -> 2.125
        acc = 0j
        for a in rev:
            acc = acc * 0.5 + a
        assert acc == pytest.approx(2.125)


class TestRootsOf:
    def test_against_companion_matrix_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(40):
            deg = int(rng.integers(2, 8))
            coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            q = Polynomial(tuple(coeffs))
            mine = sorted(
                (r for r, m in roots_of(q) for _ in range(m)),
                key=lambda z: (z.real, z.imag),
            )
            oracle = sorted(np.roots(coeffs[::-1]), key=lambda z: (z.real, z.imag))
            assert len(mine) == len(oracle)
            for a, b in zip(mine, oracle):
                assert abs(a - b) < 1e-7 * (1 + abs(b))

    def test_multiplicities(self):
        # (z-1)^2 (2z+1) = 2z^3 - 3z^2 + 1
        q = P(1, 0, -3, 2)
        got = dict()
        for r, m in roots_of(q):
            got[round(r.real, 6) + 1j * round(r.imag, 6)] = m
        assert got[(1 + 0j)] == 2
        assert got[(-0.5 + 0j)] == 1

    def test_monomial(self):
        assert roots_of(P(0, 0, 3)) == ((0j, 2),)

    def test_triple_root(self):
        q = Polynomial.from_roots([2, 2, 2, -1])
        got = sorted(roots_of(q), key=lambda t: t[0].real)
        assert got[0][1] == 1 and abs(got[0][0] + 1) < 1e-6
        assert got[1][1] == 3 and abs(got[1][0] - 2) < 1e-4

    def test_zero_roots_mixed(self):
        q = P(0, 0, -1, 0, 1)  # z^2 (z^2 - 1)
        got = {(round(r.real, 8), round(r.imag, 8)): m for r, m in roots_of(q)}
        assert got[(0.0, 0.0)] == 2
        assert got[(1.0, 0.0)] == 1
        assert got[(-1.0, 0.0)] == 1

    def test_residuals_certified(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            roots = rng.normal(size=5) + 1j * rng.normal(size=5)
            q = Polynomial.from_roots(roots)
            for r, m in roots_of(q):
                assert abs(q(r)) <= 1e-8 * q.eval_scale(r)


class TestMakeNewtonMap:
    def test_frozen_expansion_cubic_unity(self):
        f = make_newton_map(CUBIC_UNITY)
        assert f.numerator.coeffs == (1 + 0j, 0j, 0j, 2 + 0j)
        assert f.denominator.coeffs == (0j, 0j, 3 + 0j)
        assert f.degree == 3
        assert f.poles == ((0j, 2),)
        roots = sorted(f.roots, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        expected = sorted(
            [1, cmath.exp(2j * cmath.pi / 3), cmath.exp(-2j * cmath.pi / 3)],
            key=lambda z: (round(z.real, 9), round(z.imag, 9)),
        )
        for a, b in zip(roots, expected):
            assert abs(a - b) < 1e-10

    def test_frozen_expansion_cubic_odd(self):
        f = make_newton_map(CUBIC_ODD)
        assert f.numerator.coeffs == (0j, 0j, 0j, 2 + 0j)
        assert f.denominator.coeffs == (-1 + 0j, 0j, 3 + 0j)
        pole_locs = sorted(q.real for q, m in f.poles)
        assert pole_locs == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)])
        assert all(m == 1 for _, m in f.poles)

    def test_critical_points_cubic_unity(self):
        f = make_newton_map(CUBIC_UNITY)
        # three roots (branching 1 each) + the double pole 0 (branching 1)
        assert sum(m for _, m in f.critical_points) == 4
        locs = sorted(
            (round(c.real, 6), round(c.imag, 6)) for c, _ in f.critical_points
        )
        assert (0.0, 0.0) in locs
        assert (1.0, 0.0) in locs

    def test_critical_points_cubic_odd(self):
        f = make_newton_map(CUBIC_ODD)
        table = {(round(c.real, 8), round(c.imag, 8)): m for c, m in f.critical_points}
        assert table[(0.0, 0.0)] == 2  # local degree 3 at the root 0
        assert table[(1.0, 0.0)] == 1
        assert table[(-1.0, 0.0)] == 1
        assert f.local_degree(0j) == 3
        assert f.local_degree(1 + 0j) == 2
        assert f.local_degree(INF) == 1
        assert f.local_degree(0.5 + 0.5j) == 1

    def test_riemann_hurwitz_on_random_maps(self):
        rng = np.random.default_rng(11)
        built = 0
        for _ in range(60):
            deg = int(rng.integers(3, 7))
            coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
            try:
                f = make_newton_map(Polynomial(tuple(coeffs)))
            except MultipleRoot:
                continue
            built += 1
            assert sum(m for _, m in f.critical_points) == 2 * f.degree - 2
            # poles really are zeros of the denominator and not roots
            for q, m in f.poles:
                assert abs(f.denominator(q)) < 1e-6 * f.denominator.eval_scale(q)
        assert built >= 30

    def test_degree_gate(self):
        with pytest.raises(DegreeTooLow):
            make_newton_map(P(-1, 0, 1))

    def test_multiple_root_gate(self):
        q = Polynomial.from_roots([1, 1, -2, 3])
        with pytest.raises(MultipleRoot):
            make_newton_map(q)


class TestEvaluate:
    def test_fixed_points_and_poles(self):
        f = make_newton_map(CUBIC_UNITY)
        assert f.evaluate(INF) == INF
        assert f.evaluate(0j) == INF  # double pole at 0
        img = f.evaluate(1 + 0j)
        assert img.finite and abs(img.value - 1) < 1e-12

    def test_chart_consistency(self):
        # w-chart path (|z| > 1000) must agree with the plain rational formula.
        f = make_newton_map(CUBIC_UNITY)
        for z in [2e3 + 0j, -5e3 + 7e3j, 1e5j]:
            direct = f.numerator(z) / f.denominator(z)
            via_chart = f.evaluate(z)
            assert via_chart.finite
            assert abs(via_chart.value - direct) < 1e-8 * abs(direct)

    def test_near_infinity_contraction_factor(self):
        # f(z) ~ (d-1)/d * z for large z (cubic: 2/3)
        f = make_newton_map(CUBIC_UNITY)
        z = 1e5 + 3e4j
        img = f.evaluate(z)
        assert abs(img.value / z - 2 / 3) < 1e-4

    def test_array_matches_scalar(self):
        f = make_newton_map(CUBIC_ODD)
        rng = np.random.default_rng(5)
        z = rng.normal(size=64) + 1j * rng.normal(size=64)
        z[0] = 2e4  # chart branch
        arr = f.evaluate_array(z)
        for zi, ai in zip(z, arr):
            sp = f.evaluate(complex(zi))
            if sp.is_infinity:
                assert not np.isfinite(ai)
            else:
                assert abs(ai - sp.value) < 1e-9 * (1 + abs(sp.value))


class TestVerifyNewtonConditions:
    def test_passes_on_newton_map(self):
        rep = verify_newton_conditions(make_newton_map(CUBIC_UNITY))
        assert rep.ok
        assert all(r < 1e-10 for r in rep.fixed_residuals)
        assert all(m < 1e-10 for m in rep.multiplier_moduli)
        assert rep.extra_fixed_points == ()
        # derived multiplier d/(d-1) = 1.5; only modulus > 1 is asserted
        assert abs(rep.infinity_multiplier) > 1
        assert abs(abs(rep.infinity_multiplier) - 1.5) < 1e-3

    def test_fails_on_hand_built_squaring_map(self):
        fake = NewtonMap(
            p=P(0, 0, 1),
            numerator=P(0, 0, 1),
            denominator=P(1),
            degree=2,
            roots=(0j, 1 + 0j),
            poles=(),
            critical_points=(),
        )
        rep = verify_newton_conditions(fake)
        assert not rep.ok
        assert not rep.infinity_repelling_ok  # infinity superattracts for z^2
        assert not rep.superattracting_ok  # f'(1) = 2
