"""
Tests for the canonical and Dirac brackets and the constrained flow.
"""

import os
import sys

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest
from numpy.testing import assert_allclose

from symplectic.errors import ConstraintDegeneracyError, EnergyDriftError, OffShellError, ProjectionError
from symplectic.poisson import (
    ConstraintSet,
    ScalarField,
    canonical_bracket,
    constraint_matrix,
    convexity_probe,
    coordinate_field,
    dirac_bracket,
    hamiltonian_flow,
    hamiltonian_vector_field,
    independence_rank,
    involution_matrix,
    numerical_rank,
    project_to_constraints,
    quadratic_kinetic,
    sphere_constraints,
)


def on_sphere(rng, n):
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    y = rng.standard_normal(n)
    y -= (x @ y) * x
    return np.concatenate([x, y])


def oscillator(n):
    return ScalarField(lambda p: 0.5 * float(p @ p), 2 * n, lambda p: p.copy(), "oscillator")


class TestCanonicalBracket:
    def setup_method(self):
        self.rng = np.random.default_rng(7)

    def test_coordinate_brackets(self):
        n = 3
        p = self.rng.standard_normal(2 * n)
        for i in range(n):
            for j in range(n):
                xy = canonical_bracket(coordinate_field(i, 2 * n), coordinate_field(n + j, 2 * n), p)
                assert xy == pytest.approx(-1.0 if i == j else 0.0)
                xx = canonical_bracket(coordinate_field(i, 2 * n), coordinate_field(j, 2 * n), p)
                assert xx == 0.0

    def test_bracket_with_position_is_velocity(self):
        n = 2
        H = oscillator(n).without_gradient()
        p = self.rng.standard_normal(2 * n)
        for i in range(n):
            assert canonical_bracket(H, coordinate_field(i, 2 * n), p) == pytest.approx(p[n + i], abs=1e-8)

    def test_vector_field_convention(self):
        p = np.array([0.3, -1.2])
        assert_allclose(hamiltonian_vector_field(oscillator(1), p), [-1.2, -0.3])

    def test_kinetic_energy_is_convex(self):
        p = self.rng.standard_normal(6)
        assert convexity_probe(quadratic_kinetic(3), p) == pytest.approx(1.0, abs=1e-4)

    def test_rank_of_zero_matrix(self):
        assert numerical_rank(np.zeros((3, 3))) == 0
        assert numerical_rank(np.eye(4)) == 4


class TestDiracBracket:
    def setup_method(self):
        self.rng = np.random.default_rng(11)
        self.n = 3
        self.C = sphere_constraints(self.n)

    def test_constraint_bracket_matrix(self):
        p = on_sphere(self.rng, self.n)
        M = constraint_matrix(self.C, p)
        assert M[0, 1] == pytest.approx(-2.0)
        assert M[1, 0] == pytest.approx(2.0)

    def test_constraints_are_casimirs(self):
        p = on_sphere(self.rng, self.n)
        H = quadratic_kinetic(self.n)
        for c in self.C.constraints:
            assert abs(dirac_bracket(H, c, p, self.C)) < 1e-10
            assert abs(dirac_bracket(coordinate_field(4, 2 * self.n), c, p, self.C)) < 1e-10

    def test_positions_commute(self):
        p = on_sphere(self.rng, self.n)
        for i in range(self.n):
            for j in range(self.n):
                value = dirac_bracket(coordinate_field(i, 6), coordinate_field(j, 6), p, self.C)
                assert abs(value) < 1e-10

    def test_antisymmetry(self):
        p = on_sphere(self.rng, self.n)
        f = ScalarField(lambda v: float(np.sin(v[0]) * v[4] + v[2] ** 2), 6)
        g = ScalarField(lambda v: float(v[1] * v[3] - v[5]), 6)
        assert dirac_bracket(f, g, p, self.C) == pytest.approx(-dirac_bracket(g, f, p, self.C), abs=1e-8)

    def test_empty_constraint_set_is_canonical(self):
        p = self.rng.standard_normal(4)
        f = ScalarField(lambda v: float(v[0] * v[3]), 4)
        g = ScalarField(lambda v: float(v[1] ** 2 + v[2]), 4)
        assert dirac_bracket(f, g, p, ConstraintSet()) == pytest.approx(canonical_bracket(f, g, p), abs=1e-9)

    def test_constrained_field_is_tangent(self):
        p = on_sphere(self.rng, self.n)
        X = hamiltonian_vector_field(quadratic_kinetic(self.n), p, self.C)
        assert_allclose(self.C.jacobian(p) @ X, 0.0, atol=1e-12)

    def test_off_shell_point_rejected(self):
        p = on_sphere(self.rng, self.n)
        p[0] += 0.1
        with pytest.raises(OffShellError):
            dirac_bracket(quadratic_kinetic(self.n), coordinate_field(0, 6), p, self.C)

    def test_degenerate_constraints_rejected(self):
        p = on_sphere(self.rng, self.n)
        c = self.C.constraints[0]
        with pytest.raises(ConstraintDegeneracyError):
            dirac_bracket(quadratic_kinetic(self.n), coordinate_field(0, 6), p, ConstraintSet((c, c)))


class TestInvolutionAndRank:
    def setup_method(self):
        self.rng = np.random.default_rng(3)

    def test_separable_integrals_commute(self):
        n = 3
        fields = [
            ScalarField((lambda i: lambda v: 0.5 * float(v[i] ** 2 + v[n + i] ** 2))(i), 2 * n)
            for i in range(n)
        ]
        points = [self.rng.standard_normal(2 * n) for _ in range(5)]
        result = involution_matrix(fields, points)
        assert result.max_abs < 1e-8
        assert independence_rank(fields, points[0]) == n

    def test_rank_respects_constraints(self):
        n = 3
        C = sphere_constraints(n)
        p = on_sphere(self.rng, n)
        # |x|^2 is constant on the sphere, so it adds nothing to the rank
        norm = ScalarField(lambda v: float(v[:n] @ v[:n]), 2 * n)
        assert independence_rank([norm], p, C) == 0
        assert independence_rank([quadratic_kinetic(n)], p, C) == 1


class TestFlow:
    def setup_method(self):
        self.rng = np.random.default_rng(5)

    def test_great_circle(self):
        n = 3
        C = sphere_constraints(n)
        p0 = on_sphere(self.rng, n)
        p0[n:] /= np.linalg.norm(p0[n:])
        trajectory = hamiltonian_flow(quadratic_kinetic(n), p0, np.pi, 1000, C)
        assert_allclose(trajectory.final_state[:n], -p0[:n], atol=1e-6)
        assert trajectory.max_energy_drift < 1e-8
        assert trajectory.max_constraint_residual < 1e-12

    def test_long_sphere_flow_stays_on_shell(self):
        n = 4
        C = sphere_constraints(n)
        trajectory = hamiltonian_flow(quadratic_kinetic(n), on_sphere(self.rng, n), 10.0, 10_000, C)
        assert trajectory.max_energy_drift < 1e-5
        assert trajectory.max_constraint_residual < 1e-7
        assert trajectory.states.shape == (10_001, 2 * n)

    def test_coarse_steps_raise(self):
        with pytest.raises(EnergyDriftError):
            hamiltonian_flow(oscillator(1), np.array([1.0, 0.0]), 100.0, 10)

    def test_coarse_step_leaves_the_constraint_set(self):
        n = 3
        with pytest.raises(ProjectionError):
            hamiltonian_flow(quadratic_kinetic(n), on_sphere(self.rng, n), 10.0, 5, sphere_constraints(n), projection_iter=1)

    def test_projection_must_converge(self):
        n = 3
        p = on_sphere(self.rng, n)
        p[:n] *= 1.5
        with pytest.raises(ProjectionError):
            project_to_constraints(sphere_constraints(n), p, max_iter=1)
        q = project_to_constraints(sphere_constraints(n), p)
        assert np.max(np.abs(sphere_constraints(n).residuals(q))) < 1e-7
