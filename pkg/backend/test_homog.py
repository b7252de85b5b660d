"""
Tests for the momentum maps and commuting integrals on T*(S^5 x S^3) and T*SU(3).
"""

import os
import sys

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest
from numpy.testing import assert_allclose

from symplectic import homog, lie
from symplectic.config import default_tolerances, override
from symplectic.errors import InputError, NonCoprimeError, OffShellError
from symplectic.topo7 import EschenburgQuartet, WKSPair


def unit(n, k=0):
    e = np.zeros(n, dtype=complex)
    e[k] = 1.0
    return e


class TestSphereMomentum:
    def setup_method(self):
        self.rng = np.random.default_rng(41)
        self.point = homog.SphereCotangentPoint(unit(3), 1j * unit(3), unit(2), 1j * unit(2))

    def test_psi_G_example(self):
        value = homog.psi_G(self.point)
        expected = np.zeros((3, 3), dtype=complex)
        expected[0, 0] = -1j
        assert_allclose(value.xi.entries, expected, atol=1e-15)
        assert_allclose(value.eta.entries, expected[:2, :2], atol=1e-15)

    def test_zero_momenta(self):
        p = homog.SphereCotangentPoint(unit(3, 1), np.zeros(3), unit(2, 1), np.zeros(2))
        value = homog.psi_G(p)
        assert np.all(value.xi.entries == 0)
        assert np.all(value.eta.entries == 0)

    def test_psi_V_example(self):
        assert homog.psi_V(WKSPair(2, 3), self.point) == pytest.approx(-5j)

    def test_psi_V_large_weights(self):
        kl = WKSPair(897, 4)
        for _ in range(10):
            value = homog.psi_V(kl, homog.SphereCotangentPoint.random(self.rng))
            assert abs(value.real) < 1e-8 * (897 + 4)

    def test_psi_V_follows_the_shell_tolerance(self):
        p = homog.SphereCotangentPoint(unit(3), (1j + 1e-7) * unit(3), unit(2), 1j * unit(2))
        tol = default_tolerances().merged({"on_shell_atol": 1e-6})
        with override(tol):
            assert homog.psi_V(WKSPair(2, 3), p).imag == pytest.approx(-5.0)
        with pytest.raises(OffShellError):
            homog.psi_V(WKSPair(2, 3), p)

    def test_f_example(self):
        value = homog.psi_G(self.point)
        assert homog.f_functions(1, value) == pytest.approx(0.0)
        assert homog.f_functions(3, value) == pytest.approx(-1.0)
        assert homog.f_functions(5, value) == pytest.approx(-0.5)

    def test_f_index_range(self):
        with pytest.raises(InputError):
            homog.f_functions(9, homog.psi_G(self.point))

    def test_off_shell(self):
        p = homog.SphereCotangentPoint(unit(3), unit(3), unit(2), 1j * unit(2))
        with pytest.raises(OffShellError):
            homog.psi_G(p)

    def test_equivariance(self):
        for _ in range(10):
            p = homog.SphereCotangentPoint.random(self.rng)
            u3, u2 = lie.random_unitary(3, self.rng), lie.random_unitary(2, self.rng)
            assert homog.momentum_equivariance_residual(p, u3, u2) < 1e-9

    def test_vector_round_trip(self):
        p = homog.SphereCotangentPoint.random(self.rng)
        q = homog.SphereCotangentPoint.from_vector(p.to_vector())
        assert_allclose(q.x, p.x)
        assert_allclose(q.z, p.z)

    def test_identities(self):
        kl = WKSPair(1, 4)
        for _ in range(50):
            residuals = homog.identity_residuals(kl, homog.SphereCotangentPoint.random(self.rng))
            assert max(residuals.values()) < 1e-9

    def test_base_point(self):
        base = homog.SphereCotangentPoint.base().validate_on_shell()
        for kl in (WKSPair(1, 4), WKSPair(3, 8)):
            assert abs(homog.psi_V(kl, base)) < 1e-12


class TestWKSSystem:
    def setup_method(self):
        self.rng = np.random.default_rng(42)
        self.system = homog.WKSIntegrableSystem(WKSPair(1, 4))

    def test_involution(self):
        result = self.system.involution(self.system.sample_points(10, self.rng))
        assert result.max_abs < 1e-5

    def test_ranks_at_base_point(self):
        base = homog.SphereCotangentPoint.base()
        assert self.system.independence_rank(base) == 8
        assert self.system.reduced_rank(base) == 7

    def test_circle_commutes(self):
        assert self.system.circle_brackets(self.system.sample_points(5, self.rng)) < 1e-5

    def test_reduced_rank_needs_zero_level(self):
        p = homog.SphereCotangentPoint(unit(3), 1j * unit(3), unit(2), np.zeros(2))
        with pytest.raises(OffShellError):
            self.system.reduced_rank(p)

    def test_conservation(self):
        drift = self.system.conservation(homog.SphereCotangentPoint.base(), T=1.0, steps=200)
        assert max(v for k, v in drift.items() if k != "constraint_residual") < 1e-5
        assert drift["constraint_residual"] < 1e-7

    def test_circle_action_must_be_free(self):
        with pytest.raises(NonCoprimeError):
            homog.WKSIntegrableSystem(WKSPair(2, 4))

    def test_mp_hypothesis(self):
        report = homog.mp_hypothesis_check(WKSPair(1, 4))
        assert report["success"], report["errors"]
        assert report["stabilizer_dimension"] == 7
        assert report["lie_u_dimension"] == 6


class TestTrivializedCotangent:
    def setup_method(self):
        self.rng = np.random.default_rng(43)
        self.P = homog.TrivializedCotangentPoint.random(self.rng)

    def test_rejects_non_special_unitary(self):
        with pytest.raises(InputError):
            homog.TrivializedCotangentPoint(2 * np.eye(3), np.zeros((3, 3)))

    def test_equivariance(self):
        h1 = lie.random_unitary(3, self.rng, special=True)
        h2 = lie.random_unitary(3, self.rng, special=True)
        assert homog.equivariance_residual(self.P, h1, h2) < 1e-9

    def test_casimirs_agree(self):
        for kind in ("trace-square", "trace-cube", "determinant"):
            spec = lie.CasimirSpec(kind)
            plus = lie.casimir_value(spec, homog.psi_Gplus(self.P))
            minus = lie.casimir_value(spec, homog.psi_Gminus(self.P))
            assert plus == pytest.approx(minus, abs=1e-10)

    def test_two_sides_commute(self):
        algebra = lie.LieAlgebra([(3, "su")])
        a, b = algebra.random(self.rng).entries, algebra.random(self.rng).entries

        def left(g, x):
            return lie.pairing(a, g @ x @ g.conj().T)

        def right(g, x):
            return lie.pairing(b, x)

        assert abs(homog.trivialized_bracket(left, right, self.P)) < 1e-8

    def test_fiber_bracket(self):
        algebra = lie.LieAlgebra([(3, "su")])
        a, b = algebra.random(self.rng).entries, algebra.random(self.rng).entries
        value = homog.trivialized_bracket(lambda g, x: lie.pairing(a, x), lambda g, x: lie.pairing(b, x), self.P)
        assert value == pytest.approx(lie.pairing(self.P.x, a @ b - b @ a), abs=1e-8)

    def test_analytic_derivatives_match_differences(self):
        fields = homog.pulled_back_family(homog.eschenburg_family())
        fields.append(homog.psi_U_field(EschenburgQuartet(0, 0, 1, 2)))
        for F in fields:
            analytic = homog.trivialized_derivative(F, self.P).row()
            numeric = homog.trivialized_derivative(homog.GroupFunction(F.fn), self.P).row()
            assert_allclose(analytic, numeric, atol=1e-4 * max(1.0, float(np.max(np.abs(analytic)))))

    def test_integral_set(self):
        values = homog.su3_integral_set(self.P)
        assert len(values) == 10
        assert values["F5+"] == pytest.approx(values["F5-"])
        assert values["Fdet+"] == pytest.approx(values["Fdet-"], abs=1e-10)


class TestEschenburg:
    def setup_method(self):
        self.rng = np.random.default_rng(44)

    def test_zero_level_point(self):
        U = EschenburgQuartet(0, 0, 1, 2)
        P = homog.regular_point_in_zero_level(U, self.rng)
        assert abs(homog.psi_U(U, P)) < 1e-9
        assert lie.stabilizer_dimension(lie.LieAlgebraElement(P.x, "su")) == 2

    def test_aloff_wallach_report(self):
        report = homog.eschenburg_integral_report(EschenburgQuartet(0, 0, 1, 2), self.rng)
        assert report["success"], report["errors"]
        assert report["ddim"] == 8
        assert report["reduced_rank"] == 7
        assert report["coalgebra_ddim"] == 10
        assert report["coalgebra_drank"] == 6
        assert report["involution_max"] < 1e-5

    def test_inadmissible_quartet(self):
        with pytest.raises(InputError):
            homog.eschenburg_integral_report(EschenburgQuartet(1, 1, 1, 0), self.rng)

    def test_generic_quartet_report(self):
        report = homog.eschenburg_integral_report(EschenburgQuartet(-1, -1, -2, 0), self.rng)
        assert report["success"], report["errors"]
        assert report["ddim"] == 8
        assert report["reduced_rank"] == 7

    def test_su3_integrals_commute_and_are_torus_invariant(self):
        report = homog.su3_integral_report(self.rng)
        assert report["success"], report["errors"]
        assert report["integrals"] == 10
        assert report["involution_max"] < 1e-5
        assert report["torus_invariance_max"] < 1e-9

    def test_su3_integrals_are_part_of_the_report(self):
        report = homog.eschenburg_integral_report(EschenburgQuartet(0, 0, 1, 2), self.rng, points=1)
        assert report["su3_integrals"]["success"]

    def test_torus_element(self):
        t = homog.random_torus_element(3, self.rng)
        assert np.linalg.det(t) == pytest.approx(1.0)
        assert_allclose(t, np.diag(np.diag(t)))
