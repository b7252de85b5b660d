"""
Tests for Lagrangian frames, the det^2 winding and signed crossings.
"""

import os
import sys

sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import numpy as np
import pytest

from symplectic.errors import ConsistencyError, InputError, NonUnitaryFrameError, SamplingTooCoarseError
from symplectic.lie import random_unitary
from symplectic.maslov import (
    LagrangianFrame,
    LagrangianLoop,
    canonical_loop,
    concatenate_loops,
    constant_loop,
    crossing_signs,
    det_squared,
    frame_from_tangent_vectors,
    intersection_dimension,
    maslov_index,
    random_unitary_loop,
    regauge,
    reverse_loop,
    signed_crossings,
)


class TestFrames:
    def setup_method(self):
        self.rng = np.random.default_rng(21)

    def test_non_unitary_frame(self):
        with pytest.raises(NonUnitaryFrameError):
            LagrangianFrame(2 * np.eye(2))

    def test_horizontal_and_vertical(self):
        for n in (1, 2, 4):
            h, v = LagrangianFrame.horizontal(n), LagrangianFrame.vertical(n)
            assert intersection_dimension(h, v) == 0
            assert intersection_dimension(v, v) == n
            assert intersection_dimension(h, h) == n

    def test_partial_intersection(self):
        frame = LagrangianFrame(np.diag([1.0, 1j, 1j]))
        assert intersection_dimension(frame, LagrangianFrame.vertical(3)) == 2

    def test_det_squared_is_gauge_invariant(self):
        u = np.linalg.qr(self.rng.standard_normal((3, 3)) + 1j * self.rng.standard_normal((3, 3)))[0]
        frame = LagrangianFrame(u)
        for _ in range(5):
            assert det_squared(regauge(frame, self.rng)) == pytest.approx(det_squared(frame), abs=1e-12)

    def test_frame_from_horizontal_vectors(self):
        vectors = np.vstack([np.eye(2), np.zeros((2, 2))])
        frame = frame_from_tangent_vectors(vectors)
        assert intersection_dimension(frame, LagrangianFrame.horizontal(2)) == 2

    def test_frame_from_vertical_vectors(self):
        vectors = np.vstack([np.zeros((2, 2)), np.array([[1.0, 1.0], [0.0, 2.0]])])
        frame = frame_from_tangent_vectors(vectors)
        assert intersection_dimension(frame, LagrangianFrame.vertical(2)) == 2

    def test_non_isotropic_vectors(self):
        # e_1 and f_1 pair to one under the symplectic form
        vectors = np.zeros((4, 2))
        vectors[0, 0] = 1.0
        vectors[2, 1] = 1.0
        with pytest.raises(ConsistencyError):
            frame_from_tangent_vectors(vectors)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_random_plane_meets_itself(self, n):
        for _ in range(10):
            frame = LagrangianFrame(random_unitary(n, self.rng))
            assert intersection_dimension(frame, frame) == n
            assert intersection_dimension(frame, regauge(frame, self.rng)) == n

    def test_intersection_dimension_is_symmetric(self):
        for n in (1, 2, 3):
            for _ in range(10):
                p = LagrangianFrame(random_unitary(n, self.rng))
                q = LagrangianFrame(random_unitary(n, self.rng))
                assert intersection_dimension(p, q) == intersection_dimension(q, p)

    def test_one_common_line(self):
        frame = LagrangianFrame(np.diag([np.exp(1j * np.pi / 4), 1.0]))
        assert intersection_dimension(frame, LagrangianFrame.horizontal(2)) == 1

    @pytest.mark.parametrize(
        "u, expected",
        [
            (np.eye(3), 1.0),
            (1j * np.eye(2), 1.0),
            (1j * np.eye(3), -1.0),
            (np.diag([np.exp(1j * np.pi / 4), 1j]), -1j),
        ],
    )
    def test_det_squared_values(self, u, expected):
        assert det_squared(LagrangianFrame(u)) == pytest.approx(expected, abs=1e-12)

    def test_det_squared_under_many_gauges(self):
        for n in (1, 2, 4):
            frame = LagrangianFrame(random_unitary(n, self.rng))
            values = [det_squared(regauge(frame, self.rng)) for _ in range(50)]
            assert np.allclose(values, det_squared(frame), atol=1e-12)


class TestMaslovIndex:
    def setup_method(self):
        self.rng = np.random.default_rng(8)

    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_canonical_loop(self, n):
        loop = canonical_loop(n)
        assert maslov_index(loop) == 1
        assert signed_crossings(loop) == 1

    def test_canonical_loop_turns(self):
        assert maslov_index(canonical_loop(2, turns=3)) == 3

    def test_reverse_negates(self):
        assert maslov_index(reverse_loop(canonical_loop(3))) == -1
        assert signed_crossings(reverse_loop(canonical_loop(3))) == -1

    def test_concatenation_adds(self):
        loop = canonical_loop(2)
        assert maslov_index(concatenate_loops(loop, loop)) == 2

    def test_constant_loop(self):
        assert maslov_index(constant_loop(LagrangianFrame.vertical(3))) == 0

    @pytest.mark.parametrize("windings", [(1, 0, -2), (2, 1, 1), (0, 0, 0)])
    def test_random_unitary_loop(self, windings):
        loop = random_unitary_loop(3, windings, 400, self.rng)
        assert maslov_index(loop) == 2 * sum(windings)

    def test_index_is_gauge_invariant(self):
        loop = random_unitary_loop(2, (1, 2), 300, self.rng)
        regauged = LagrangianLoop(tuple(regauge(f, self.rng) for f in loop.samples))
        assert maslov_index(regauged) == maslov_index(loop) == 6

    def test_coarse_sampling(self):
        with pytest.raises(SamplingTooCoarseError):
            maslov_index(canonical_loop(1, samples=2))

    def test_open_path_rejected(self):
        half = LagrangianLoop(canonical_loop(2).samples[:20])
        with pytest.raises(InputError):
            maslov_index(half)

    def test_crossings_agree_with_index_on_random_loops(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            n = int(rng.integers(1, 4))
            windings = rng.integers(-2, 3, n)
            loop = random_unitary_loop(n, windings, 400, rng)
            assert signed_crossings(loop) == maslov_index(loop) == 2 * int(windings.sum())


class TestCrossings:
    def test_canonical_crossing_is_positive(self):
        for n in (1, 2):
            assert crossing_signs(canonical_loop(n).samples, LagrangianFrame.vertical(n)) == [1]

    def test_stationary_intersection_ignored(self):
        frames = [LagrangianFrame(np.diag([np.exp(1j * t), 1j])) for t in np.linspace(0.3, 0.9, 30)]
        assert crossing_signs(frames, LagrangianFrame.vertical(2)) == []

    def test_crossings_against_another_reference(self):
        loop = canonical_loop(1, samples=64, turns=2)
        reference = LagrangianFrame(np.array([[np.exp(0.4j)]]))
        assert signed_crossings(loop, reference) == maslov_index(loop) == 2
