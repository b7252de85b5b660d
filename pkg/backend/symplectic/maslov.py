"""
Lagrangian planes in C^n, the det^2 map and Maslov indices of sampled loops.

A plane is stored as a unitary frame u whose columns span it over R. Real
tangent vectors (dx, dy) of T*R^n are identified with dx - i dy, which sends
the vertical plane to iR^n.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .config import tolerances
from .errors import (
    ConsistencyError,
    DegenerateCrossingError,
    DimensionMismatchError,
    InputError,
    NonUnitaryFrameError,
    ResampleError,
    SamplingTooCoarseError,
)
from .poisson import numerical_rank

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LagrangianFrame:
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        object.__setattr__(self, "u", u)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionMismatchError(f"frame must be square, got shape {u.shape}")
        deviation = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if deviation > tolerances().unitary_atol:
            raise NonUnitaryFrameError(f"frame deviates from unitary by {deviation:.3e}")

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @classmethod
    def horizontal(cls, n: int) -> "LagrangianFrame":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def vertical(cls, n: int) -> "LagrangianFrame":
        return cls(1j * np.eye(n))


@dataclass(frozen=True)
class LagrangianLoop:
    samples: tuple

    def __post_init__(self):
        samples = tuple(self.samples)
        object.__setattr__(self, "samples", samples)
        if len(samples) < 2:
            raise InputError("a loop needs at least two samples")
        if len({s.n for s in samples}) != 1:
            raise DimensionMismatchError("loop samples have different dimensions")

    @property
    def n(self) -> int:
        return self.samples[0].n

    def __len__(self) -> int:
        return len(self.samples)


def det_squared(frame: LagrangianFrame) -> complex:
    return complex(np.linalg.det(frame.u) ** 2)


def intersection_dimension(p: LagrangianFrame, q: LagrangianFrame) -> int:
    """dim_R of the intersection of the two planes"""
    if p.n != q.n:
        raise DimensionMismatchError(f"planes in C^{p.n} and C^{q.n}")
    # unitary frames: entries of q* p are O(1), so rank is judged against 1
    return p.n - numerical_rank(np.imag(q.u.conj().T @ p.u), scale=1.0)


def _phase_steps(values: np.ndarray) -> np.ndarray:
    steps = np.angle(values[1:] / values[:-1])
    limit = tolerances().phase_step_max
    worst = np.max(np.abs(steps), initial=0.0)
    if worst >= limit:
        raise SamplingTooCoarseError(
            f"phase step {worst:.3f} rad between adjacent samples (limit {limit:.3f}); resample the loop"
        )
    return steps


def _check_closed(loop: LagrangianLoop):
    if intersection_dimension(loop.samples[0], loop.samples[-1]) != loop.n:
        raise InputError("loop is not closed: first and last samples span different planes")


def maslov_index(loop: LagrangianLoop) -> int:
    """Winding number of det^2 along the loop"""
    _check_closed(loop)
    values = np.array([det_squared(s) for s in loop.samples])
    total = float(np.sum(_phase_steps(values)))
    winding = total / (2 * np.pi)
    index = int(round(winding))
    if abs(winding - index) > 1e-6:
        raise ConsistencyError(f"accumulated phase {total:.6f} is not a multiple of 2*pi")
    return index


def _relative_eigenphases(frames: Sequence[LagrangianFrame], reference: LagrangianFrame) -> np.ndarray:
    """
    Continuous eigenphase tracks of W = V V^T, V = reference* u.
    An eigenvalue of W equals 1 exactly when the planes meet.
    """
    limit = tolerances().phase_step_max
    tracks = np.empty((len(frames), reference.n))
    prev_vals = None
    older_vals = None
    for k, frame in enumerate(frames):
        if frame.n != reference.n:
            raise DimensionMismatchError("frame and reference have different dimensions")
        v = reference.u.conj().T @ frame.u
        vals = np.linalg.eigvals(v @ v.T)
        vals = vals / np.abs(vals)
        if prev_vals is None:
            tracks[0] = np.angle(vals)
        else:
            # match against a linear extrapolation so tracks keep their identity
            # through samples where several eigenvalues coincide
            predicted = prev_vals if older_vals is None else prev_vals * (prev_vals / older_vals)
            cost = np.abs(predicted[:, None] - vals[None, :])
            _, cols = linear_sum_assignment(cost)
            vals = vals[cols]
            step = np.angle(vals / prev_vals)
            if np.max(np.abs(step)) >= limit:
                raise SamplingTooCoarseError(f"eigenphase step {np.max(np.abs(step)):.3f} rad at sample {k}")
            tracks[k] = tracks[k - 1] + step
        older_vals, prev_vals = prev_vals, vals
    return tracks


def crossing_signs(frames: Sequence[LagrangianFrame], reference: LagrangianFrame) -> List[int]:
    """
    Signed crossings of a frame path through the planes meeting `reference`.
    +1 when an eigenphase of the relative unitary passes 0 (mod 2pi) upwards.
    Eigenphases resting on 0 along the whole path are stationary intersections
    and do not count.
    """
    band = tolerances().crossing_band
    tracks = _relative_eigenphases(frames, reference)
    turns = tracks / (2 * np.pi)
    in_band = np.abs(turns - np.round(turns)) * 2 * np.pi < band
    stationary = np.all(in_band, axis=0)
    moving_in_band = in_band[:, ~stationary]
    if moving_in_band.size and (moving_in_band[0].any() or moving_in_band[-1].any()):
        raise ResampleError("a crossing sits on an endpoint sample")
    if moving_in_band.size and np.max(moving_in_band.sum(axis=1)) >= 2:
        k = int(np.argmax(moving_in_band.sum(axis=1)))
        raise DegenerateCrossingError(f"non-simple crossing at sample {k}")

    signs: List[int] = []
    for j in np.flatnonzero(~stationary):
        outside = ~in_band[:, j]
        branch = np.floor(turns[outside, j]).astype(int)
        for delta in np.diff(branch):
            signs.extend([int(np.sign(delta))] * abs(int(delta)))
    return signs


def signed_crossings(loop: LagrangianLoop, reference: Optional[LagrangianFrame] = None) -> int:
    reference = reference or LagrangianFrame.vertical(loop.n)
    return int(sum(crossing_signs(loop.samples, reference)))


def canonical_loop(n: int, samples: int = 64, turns: int = 1) -> LagrangianLoop:
    """t -> e^{it}R + iR^{n-1}, t in [0, turns*pi]"""
    if n < 1 or samples < 2 or turns < 1:
        raise InputError("canonical loop needs n >= 1, turns >= 1 and at least two samples")
    frames = []
    for t in np.linspace(0.0, turns * np.pi, samples * turns + 1):
        d = np.full(n, 1j)
        d[0] = np.exp(1j * t)
        frames.append(LagrangianFrame(np.diag(d)))
    return LagrangianLoop(tuple(frames))


def reverse_loop(loop: LagrangianLoop) -> LagrangianLoop:
    return LagrangianLoop(tuple(reversed(loop.samples)))


def concatenate_loops(first: LagrangianLoop, second: LagrangianLoop) -> LagrangianLoop:
    if intersection_dimension(first.samples[-1], second.samples[0]) != first.n:
        raise InputError("loops do not meet: end of the first differs from start of the second")
    return LagrangianLoop(first.samples + second.samples[1:])


def constant_loop(frame: LagrangianFrame, samples: int = 8) -> LagrangianLoop:
    return LagrangianLoop(tuple([frame] * (samples + 1)))


def random_unitary_loop(n: int, windings: Sequence[int], samples: int, rng: np.random.Generator) -> LagrangianLoop:
    """
    Closed loop t -> exp(tA) u0 over [0, 2pi] with A = Q diag(i k_j) Q*.
    Its Maslov index is 2 * sum(k_j).
    """
    from .lie import random_unitary

    if len(windings) != n:
        raise DimensionMismatchError(f"need {n} winding numbers, got {len(windings)}")
    q = random_unitary(n, rng)
    u0 = random_unitary(n, rng)
    k = np.asarray(windings, dtype=float)
    frames = []
    for t in np.linspace(0.0, 2 * np.pi, samples + 1):
        frames.append(LagrangianFrame((q * np.exp(1j * k * t)) @ q.conj().T @ u0))
    return LagrangianLoop(tuple(frames))


def regauge(frame: LagrangianFrame, rng: np.random.Generator) -> LagrangianFrame:
    """Same plane, frame multiplied on the right by a random O(n) matrix"""
    o, _ = np.linalg.qr(rng.standard_normal((frame.n, frame.n)))
    return LagrangianFrame(frame.u @ o)


def frame_from_tangent_vectors(vectors: np.ndarray) -> LagrangianFrame:
    """
    Orthonormalise real tangent vectors (columns, (dx, dy) layout) of an
    isotropic subspace of R^{2n} into a Lagrangian frame.
    """
    vectors = np.asarray(vectors, dtype=float)
    two_n, n = vectors.shape
    if two_n != 2 * n:
        raise DimensionMismatchError(f"need {2 * n} x {n} tangent vectors, got {vectors.shape}")
    q, _ = np.linalg.qr(vectors)
    omega = q[:n].T @ q[n:] - q[n:].T @ q[:n]
    residual = float(np.max(np.abs(omega)))
    if residual > 1e-8:
        raise ConsistencyError(f"tangent vectors are not isotropic (symplectic residual {residual:.3e})")
    u = q[:n] - 1j * q[n:]
    # nearest unitary, removes rounding left by the isotropy residual
    w, _, vh = np.linalg.svd(u)
    return LagrangianFrame(w @ vh)
