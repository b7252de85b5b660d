"""
Momentum maps and commuting integrals on homogeneous spaces.

Two phase spaces live here:

* T*(S^5 x S^3) inside R^20, coordinates (Re x, Im x, Re w, Im w) followed
  by the momenta (Re y, Im y, Re z, Im z). U(3) x U(2) acts diagonally and
  the weighted circle z.(x, w) = (z^k x, z^l w) gives the Witten-Kreck-Stolz
  quotient.
* T*SU(3) in the left trivialization SU(3) x su(3), with SU(3) x SU(3)
  acting by (h1, h2).(g, x) = (h1 g h2^-1, h2 x h2^-1). A circle U of the
  maximal torus of that product gives the Eschenburg quotients.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm, null_space

from . import lie
from .config import tolerances
from .errors import (
    ConsistencyError,
    DimensionMismatchError,
    InputError,
    NonCoprimeError,
    OffShellError,
    RegularPointNotFoundError,
)
from .poisson import (
    ConstraintSet,
    ScalarField,
    gradient,
    hamiltonian_flow,
    independence_rank,
    involution_matrix,
    numerical_rank,
    tangent_rank,
)
from .topo7 import EschenburgQuartet, WKSPair, admissible, wks_free_action

logger = logging.getLogger(__name__)

EschenburgU = EschenburgQuartet

PHASE_DIM = 20
_N = PHASE_DIM // 2

# (2/9, 1/9, 2/9) has norm 1/3; this is its rescaling onto S^5
BASE_X = np.array([2 / 3, 1 / 3, 2 / 3], dtype=complex)
BASE_Y = np.array([1j, -4j, 1j])
BASE_W = np.array([3 / 5, 4 / 5], dtype=complex)
BASE_Z = np.array([4j, -3j])


# ---------------------------------------------------------------------------
# T*(S^5 x S^3)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphereCotangentPoint:
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        for name, size in (("x", 3), ("y", 3), ("w", 2), ("z", 2)):
            value = np.asarray(getattr(self, name), dtype=complex)
            if value.shape != (size,):
                raise DimensionMismatchError(f"{name} must have {size} complex entries, got shape {value.shape}")
            object.__setattr__(self, name, value)

    def residuals(self) -> np.ndarray:
        return np.array([
            np.vdot(self.x, self.x).real - 1.0,
            np.vdot(self.y, self.x).real,
            np.vdot(self.w, self.w).real - 1.0,
            np.vdot(self.z, self.w).real,
        ])

    def validate_on_shell(self) -> "SphereCotangentPoint":
        residual = float(np.max(np.abs(self.residuals())))
        if residual > tolerances().on_shell_atol:
            raise OffShellError(f"point is off T*(S^5 x S^3) (residual {residual:.3e})")
        return self

    def to_vector(self) -> np.ndarray:
        return np.concatenate([
            self.x.real, self.x.imag, self.w.real, self.w.imag,
            self.y.real, self.y.imag, self.z.real, self.z.imag,
        ])

    @classmethod
    def from_vector(cls, v) -> "SphereCotangentPoint":
        v = np.asarray(v, dtype=float)
        if v.shape != (PHASE_DIM,):
            raise DimensionMismatchError(f"expected {PHASE_DIM} real coordinates, got shape {v.shape}")
        return cls(*_unpack(v))

    @classmethod
    def base(cls) -> "SphereCotangentPoint":
        return cls(BASE_X, BASE_Y, BASE_W, BASE_Z)

    @classmethod
    def random(cls, rng: np.random.Generator, momentum_scale: float = 1.0) -> "SphereCotangentPoint":
        def sphere(n):
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            return v / np.linalg.norm(v)

        def tangent(base):
            v = momentum_scale * (rng.standard_normal(base.size) + 1j * rng.standard_normal(base.size))
            return v - np.vdot(base, v).real * base

        x, w = sphere(3), sphere(2)
        return cls(x, tangent(x), w, tangent(w))

    def act(self, u3: np.ndarray, u2: np.ndarray) -> "SphereCotangentPoint":
        return SphereCotangentPoint(u3 @ self.x, u3 @ self.y, u2 @ self.w, u2 @ self.z)

    def rotate(self, kl: WKSPair, angle: float) -> "SphereCotangentPoint":
        a, b = np.exp(1j * kl.k * angle), np.exp(1j * kl.l * angle)
        return SphereCotangentPoint(a * self.x, a * self.y, b * self.w, b * self.z)


def _unpack(v: np.ndarray):
    q, m = v[:_N], v[_N:]
    x = q[0:3] + 1j * q[3:6]
    w = q[6:8] + 1j * q[8:10]
    y = m[0:3] + 1j * m[3:6]
    z = m[6:8] + 1j * m[8:10]
    return x, y, w, z


@dataclass(frozen=True)
class MomentumValue:
    xi: lie.LieAlgebraElement
    eta: lie.LieAlgebraElement


def _momentum(x, y, w, z) -> Tuple[np.ndarray, np.ndarray]:
    xi = 0.5 * (np.outer(x, y.conj()) - np.outer(y, x.conj()))
    eta = 0.5 * (np.outer(w, z.conj()) - np.outer(z, w.conj()))
    return xi, eta


def psi_G(p: SphereCotangentPoint) -> MomentumValue:
    p.validate_on_shell()
    xi, eta = _momentum(p.x, p.y, p.w, p.z)
    return MomentumValue(lie.LieAlgebraElement(xi, "u"), lie.LieAlgebraElement(eta, "u"))


def psi_V(kl: WKSPair, p: SphereCotangentPoint) -> complex:
    p.validate_on_shell()
    value = kl.k * np.vdot(p.y, p.x) + kl.l * np.vdot(p.z, p.w)
    # Re(y* x) and Re(z* w) are constraints, so the real part is bounded by the shell tolerance
    if abs(value.real) > tolerances().on_shell_atol * max(1, abs(kl.k) + abs(kl.l)):
        raise ConsistencyError(f"circle momentum has real part {value.real:.3e} on shell")
    return complex(value)


def _f(a: int, xi: np.ndarray, eta: np.ndarray) -> float:
    corner = xi[1:, 1:]
    if a == 1:
        return float((-1j * xi[2, 2]).real)
    if a == 2:
        return float((-1j * np.trace(corner)).real)
    if a == 3:
        return float((-1j * np.trace(xi)).real)
    if a == 4:
        return 0.5 * float(np.trace(corner @ corner).real)
    if a == 5:
        return 0.5 * float(np.trace(xi @ xi).real)
    if a == 6:
        return float((-1j * eta[1, 1]).real)
    if a == 7:
        return float((-1j * np.trace(eta)).real)
    if a == 8:
        return 0.5 * float(np.trace(eta @ eta).real)
    raise InputError(f"integral index must lie in 1..8, got {a}")


def f_functions(a: int, value: MomentumValue) -> float:
    return _f(a, value.xi.entries, value.eta.entries)


def h_functions(a: int, p: SphereCotangentPoint) -> float:
    return f_functions(a, psi_G(p))


def h_field(a: int) -> ScalarField:
    """H_a = f_a o Psi_G on R^20 (finite-difference gradient)"""
    _f(a, np.zeros((3, 3)), np.zeros((2, 2)))

    def fn(v):
        xi, eta = _momentum(*_unpack(v))
        return _f(a, xi, eta)

    return ScalarField(fn, PHASE_DIM, None, f"H{a}")


def circle_field(kl: WKSPair) -> ScalarField:
    """k H_3 + l H_7, the real form of the circle momentum -i Psi_V"""
    h3, h7 = h_field(3), h_field(7)
    return ScalarField(lambda v: kl.k * h3(v) + kl.l * h7(v), PHASE_DIM, None, f"phi[{kl.k},{kl.l}]")


def sphere_pair_constraints() -> ConstraintSet:
    """|x|^2 - 1, Re(y*x), |w|^2 - 1, Re(z*w) with analytic gradients"""

    def block(pos: slice, im: slice, label: str) -> Tuple[ScalarField, ScalarField]:
        def norm(v):
            return float(v[pos] @ v[pos] + v[im] @ v[im] - 1.0)

        def norm_grad(v):
            g = np.zeros(PHASE_DIM)
            g[pos], g[im] = 2 * v[pos], 2 * v[im]
            return g

        mpos = slice(pos.start + _N, pos.stop + _N)
        mim = slice(im.start + _N, im.stop + _N)

        def pairing(v):
            return float(v[mpos] @ v[pos] + v[mim] @ v[im])

        def pairing_grad(v):
            g = np.zeros(PHASE_DIM)
            g[pos], g[im] = v[mpos], v[mim]
            g[mpos], g[mim] = v[pos], v[im]
            return g

        return (
            ScalarField(norm, PHASE_DIM, norm_grad, f"|{label}|^2-1"),
            ScalarField(pairing, PHASE_DIM, pairing_grad, f"Re<{label}>"),
        )

    return ConstraintSet(block(slice(0, 3), slice(3, 6), "x") + block(slice(6, 8), slice(8, 10), "w"))


def momentum_equivariance_residual(p: SphereCotangentPoint, u3: np.ndarray, u2: np.ndarray) -> float:
    before = psi_G(p)
    after = psi_G(p.act(u3, u2))
    return max(
        float(np.max(np.abs(after.xi.entries - u3 @ before.xi.entries @ u3.conj().T))),
        float(np.max(np.abs(after.eta.entries - u2 @ before.eta.entries @ u2.conj().T))),
    )


def identity_residuals(kl: WKSPair, p: SphereCotangentPoint) -> Dict[str, float]:
    """Residuals of the closed forms of H_5 + H_8, Psi_V and H' at an on-shell point"""
    h = {a: h_functions(a, p) for a in range(1, 9)}
    yx, zw = np.vdot(p.y, p.x), np.vdot(p.z, p.w)
    y2, z2 = np.vdot(p.y, p.y).real, np.vdot(p.z, p.z).real
    kinetic = -0.25 * (y2 + z2 - yx**2 - zw**2)
    return {
        "kinetic": float(abs(h[5] + h[8] - kinetic)),
        "circle": float(abs(psi_V(kl, p) - (1j * kl.k * h[3] + 1j * kl.l * h[7]))),
        "h_prime": float(abs(h[5] + h[8] + 0.25 * (h[3] ** 2 + h[7] ** 2) + 0.25 * (y2 + z2))),
    }


class WKSIntegrableSystem:
    """
    Eight commuting integrals H_1..H_8 on T*(S^5 x S^3) under the Dirac
    bracket of the sphere constraints, and the seven that descend to the
    quotient by the (k, l) circle.
    """

    def __init__(self, kl: WKSPair):
        if not wks_free_action(kl.k, kl.l):
            raise NonCoprimeError(f"(k, l) = ({kl.k}, {kl.l}) needs gcd 1 and k*l != 0")
        self.kl = kl
        self.constraints = sphere_pair_constraints()
        self.hamiltonians = [h_field(a) for a in range(1, 9)]
        self.circle = circle_field(kl)

    @property
    def descending(self) -> List[ScalarField]:
        return [h for a, h in enumerate(self.hamiltonians, start=1) if a != 3]

    def kinetic_energy(self) -> ScalarField:
        h5, h8 = self.hamiltonians[4], self.hamiltonians[7]
        return ScalarField(lambda v: -(h5(v) + h8(v)), PHASE_DIM, None, "-(H5+H8)")

    def sample_points(self, count: int, rng: np.random.Generator) -> List[SphereCotangentPoint]:
        return [SphereCotangentPoint.random(rng) for _ in range(count)]

    def involution(self, points: Sequence[SphereCotangentPoint]):
        return involution_matrix(self.hamiltonians, [p.to_vector() for p in points], self.constraints)

    def circle_brackets(self, points: Sequence[SphereCotangentPoint]) -> float:
        fields = self.hamiltonians + [self.circle]
        result = involution_matrix(fields, [p.to_vector() for p in points], self.constraints)
        return float(np.max(result.matrix[-1, :-1]))

    def independence_rank(self, point: SphereCotangentPoint) -> int:
        return independence_rank(self.hamiltonians, point.to_vector(), self.constraints)

    def reduced_rank(self, point: SphereCotangentPoint) -> int:
        """Rank of the seven descending integrals on the zero level of the circle momentum"""
        v = point.validate_on_shell().to_vector()
        if abs(self.circle(v)) > tolerances().on_shell_atol:
            raise OffShellError("point is not on the zero level of the circle momentum")
        grads = np.array([gradient(h, v) for h in self.descending])
        normals = np.vstack([self.constraints.jacobian(v), gradient(self.circle, v)])
        return tangent_rank(grads, normals)

    def conservation(self, point: SphereCotangentPoint, T: float = 1.0, steps: int = 200) -> Dict[str, float]:
        """Largest drift of every H_a and of |y|^2 + |z|^2 along the Dirac flow of -(H_5 + H_8)"""
        trajectory = hamiltonian_flow(self.kinetic_energy(), point.to_vector(), T, steps, self.constraints)
        drift = {}
        for h in self.hamiltonians:
            values = np.array([h(s) for s in trajectory.states])
            drift[h.name] = float(np.max(np.abs(values - values[0])))
        speed = np.array([s[_N:] @ s[_N:] for s in trajectory.states])
        drift["|y|^2+|z|^2"] = float(np.max(np.abs(speed - speed[0])))
        drift["constraint_residual"] = trajectory.max_constraint_residual
        return drift

    def report(self, rng: np.random.Generator, samples: int = 10, T: float = 1.0, steps: int = 200) -> Dict:
        tol = tolerances()
        base = SphereCotangentPoint.base().validate_on_shell()
        points = self.sample_points(samples, rng)
        report: Dict = {"success": True, "k": self.kl.k, "l": self.kl.l, "errors": []}
        report["base_point"] = {
            "x": [2 / 3, 1 / 3, 2 / 3],
            "note": "printed point (2/9, 1/9, 2/9) rescaled to satisfy |x| = 1",
        }
        logger.warning("using the rescaled base point (2/3, 1/3, 2/3) in place of (2/9, 1/9, 2/9)")
        inv = self.involution(points)
        report["involution_max"] = inv.max_abs
        report["independence_rank"] = self.independence_rank(base)
        report["circle_momentum_at_base"] = abs(psi_V(self.kl, base))
        report["reduced_rank"] = self.reduced_rank(base)
        report["circle_bracket_max"] = self.circle_brackets(points)
        worst = {"kinetic": 0.0, "circle": 0.0, "h_prime": 0.0}
        for p in points:
            for key, value in identity_residuals(self.kl, p).items():
                worst[key] = max(worst[key], value)
        report["identity_residuals"] = worst
        report["conservation"] = self.conservation(base, T, steps)
        report["mp_hypothesis"] = mp_hypothesis_check(self.kl)

        if inv.max_abs >= tol.involution_atol:
            report["errors"].append(f"integrals not in involution: {inv.max_abs:.3e}")
        if report["independence_rank"] != 8:
            report["errors"].append(f"independence rank {report['independence_rank']} at the base point, expected 8")
        if report["reduced_rank"] != 7:
            report["errors"].append(f"reduced rank {report['reduced_rank']}, expected 7")
        if report["circle_bracket_max"] >= tol.involution_atol:
            report["errors"].append("circle momentum does not commute with the integrals")
        for key, value in worst.items():
            if value > 1e-9:
                report["errors"].append(f"identity {key} violated by {value:.3e}")
        drift = max(v for k, v in report["conservation"].items() if k != "constraint_residual")
        if drift >= tol.energy_drift_max:
            report["errors"].append(f"integral drift {drift:.3e} along the kinetic flow")
        if not report["mp_hypothesis"]["success"]:
            report["errors"].extend(report["mp_hypothesis"]["errors"])
        report["success"] = not report["errors"]
        logger.info("WKS (%d, %d) report: %s", self.kl.k, self.kl.l, "pass" if report["success"] else "fail")
        return report


def wks_integrable_system(kl: WKSPair, rng: Optional[np.random.Generator] = None, samples: int = 10) -> Dict:
    rng = rng or np.random.default_rng(tolerances().seed)
    return WKSIntegrableSystem(kl).report(rng, samples)


def mp_hypothesis_check(kl: WKSPair) -> Dict:
    """
    Stabilizer of e = diag(i, 0, 0) + diag(i, -i) in u(3) + u(2) against the
    Lie algebra of the group generated by the (k, l) circle, U(2) in the
    lower corner of U(3) and the circle diag(1, z) in U(2).
    """
    algebra = lie.LieAlgebra([(3, "u"), (2, "u")])
    e = (np.diag([1j, 0, 0]), np.diag([1j, -1j]))
    generators = [(kl.k * 1j * np.eye(3), kl.l * 1j * np.eye(2))]
    for (a,) in lie.LieAlgebra([(2, "u")]).basis:
        block = np.zeros((3, 3), dtype=complex)
        block[1:, 1:] = a
        generators.append((block, np.zeros((2, 2), dtype=complex)))
    generators.append((np.zeros((3, 3), dtype=complex), np.diag([0, 1j])))
    lie_u = np.array([algebra.coords(g) for g in generators])

    ad = algebra.ad_matrix(e)
    stab = null_space(ad, rcond=tolerances().rank_rtol).T
    stab_dim = stab.shape[0]
    u_dim = numerical_rank(lie_u)
    inside = float(np.max(np.abs(lie_u @ ad.T))) < tolerances().equivariance_atol
    derived = []
    blocks = [algebra.blocks_from(v) for v in stab]
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            derived.append(algebra.coords(lie.commutator(blocks[i], blocks[j])))
    derived = np.array(derived) if derived else np.zeros((0, algebra.dim))
    derived_inside = numerical_rank(np.vstack([lie_u, derived])) == u_dim

    report = {
        "success": True,
        "stabilizer_dimension": stab_dim,
        "lie_u_dimension": u_dim,
        "u_in_stabilizer": bool(inside),
        "derived_in_lie_u": bool(derived_inside),
        "derived_dimension": numerical_rank(derived),
        "errors": [],
    }
    if stab_dim != 7:
        report["errors"].append(f"stabilizer dimension {stab_dim}, expected 7")
    if not inside:
        report["errors"].append("U is not contained in the stabilizer")
    if not derived_inside:
        report["errors"].append("[stab, stab] is not contained in Lie(U)")
    report["success"] = not report["errors"]
    return report


# ---------------------------------------------------------------------------
# T*SU(3), left trivialization
# ---------------------------------------------------------------------------

GroupField = Callable[[np.ndarray, np.ndarray], float]
GroupDerivative = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]

DEFAULT_SHIFT = (np.diag([1j, 2j, -3j]), np.diag([5j, 7j, -12j]))


@dataclass(frozen=True)
class GroupFunction:
    """
    Function F(g, x) on SU(n) x su(n). derivative, when given, returns the
    pair (D_g F, D_x F) as matrices in su(n); without it the derivatives are
    taken by central differences.
    """

    fn: GroupField
    derivative: Optional[GroupDerivative] = None
    name: str = ""

    def __call__(self, g: np.ndarray, x: np.ndarray) -> float:
        return float(self.fn(g, x))


@dataclass(frozen=True)
class TrivializedCotangentPoint:
    g: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex)
        x = self.x.entries if isinstance(self.x, lie.LieAlgebraElement) else np.asarray(self.x, dtype=complex)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "x", x)
        if g.ndim != 2 or g.shape != x.shape or g.shape[0] != g.shape[1]:
            raise DimensionMismatchError("g and x must be square matrices of the same size")
        atol = tolerances().unitary_atol
        if np.max(np.abs(g.conj().T @ g - np.eye(g.shape[0]))) > atol or abs(np.linalg.det(g) - 1) > atol:
            raise InputError("g is not special unitary")
        lie.LieAlgebraElement(x, "su")

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @classmethod
    def random(cls, rng: np.random.Generator, n: int = 3) -> "TrivializedCotangentPoint":
        algebra = lie.LieAlgebra([(n, "su")])
        return cls(lie.random_unitary(n, rng, special=True), algebra.random(rng).entries)

    def act(self, h1: np.ndarray, h2: np.ndarray) -> "TrivializedCotangentPoint":
        h2_inv = h2.conj().T
        return TrivializedCotangentPoint(h1 @ self.g @ h2_inv, h2 @ self.x @ h2_inv)


def psi_Gplus(P: TrivializedCotangentPoint) -> np.ndarray:
    return P.g @ P.x @ P.g.conj().T


def psi_Gminus(P: TrivializedCotangentPoint) -> np.ndarray:
    return P.x


def psi_H(P: TrivializedCotangentPoint) -> lie.Blocks:
    return psi_Gplus(P), -psi_Gminus(P)


def equivariance_residual(P: TrivializedCotangentPoint, h1: np.ndarray, h2: np.ndarray) -> float:
    Q = P.act(h1, h2)
    plus = np.max(np.abs(psi_Gplus(Q) - h1 @ psi_Gplus(P) @ h1.conj().T))
    minus = np.max(np.abs(psi_Gminus(Q) - h2 @ psi_Gminus(P) @ h2.conj().T))
    return float(max(plus, minus))


@lru_cache(maxsize=None)
def _su_basis(n: int) -> Tuple[np.ndarray, ...]:
    return tuple(b[0] for b in lie.LieAlgebra([(n, "su")]).basis)


@lru_cache(maxsize=None)
def _exp_steps(n: int, h: float) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    return tuple((expm(h * e), expm(-h * e)) for e in _su_basis(n))


@dataclass
class TrivializedDerivative:
    """Group (left) and fiber derivatives as coordinate vectors in su(n)"""

    dg: np.ndarray
    dx: np.ndarray

    def row(self) -> np.ndarray:
        return np.concatenate([self.dg, self.dx])


def trivialized_derivative(F: GroupField, P: TrivializedCotangentPoint) -> TrivializedDerivative:
    basis = _su_basis(P.n)
    derivative = getattr(F, "derivative", None)
    if derivative is not None:
        dg_m, dx_m = derivative(P.g, P.x)
        return TrivializedDerivative(
            np.array([lie.pairing(e, dg_m) for e in basis]),
            np.array([lie.pairing(e, dx_m) for e in basis]),
        )
    h = tolerances().fd_step
    dg = np.array([(F(P.g @ plus, P.x) - F(P.g @ minus, P.x)) / (2 * h) for plus, minus in _exp_steps(P.n, h)])
    dx = np.array([(F(P.g, P.x + h * e) - F(P.g, P.x - h * e)) / (2 * h) for e in basis])
    return TrivializedDerivative(dg, dx)


def _bracket_from_derivatives(a: TrivializedDerivative, b: TrivializedDerivative, P: TrivializedCotangentPoint) -> float:
    basis = _su_basis(P.n)
    ax = sum(c * e for c, e in zip(a.dx, basis))
    bx = sum(c * e for c, e in zip(b.dx, basis))
    fiber = lie.pairing(P.x, ax @ bx - bx @ ax)
    return float(-a.dg @ b.dx + b.dg @ a.dx + fiber)


def trivialized_bracket(F: GroupField, K: GroupField, P: TrivializedCotangentPoint) -> float:
    """
    Canonical bracket on T*G in the left trivialization:
    {F,K} = -<D_g F, D_x K> + <D_g K, D_x F> + <x, [D_x F, D_x K]>
    """
    return _bracket_from_derivatives(trivialized_derivative(F, P), trivialized_derivative(K, P), P)


def trivialized_bracket_matrix(fields: Sequence[GroupField], P: TrivializedCotangentPoint) -> np.ndarray:
    derivatives = [trivialized_derivative(F, P) for F in fields]
    m = len(fields)
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = _bracket_from_derivatives(derivatives[i], derivatives[j], P)
            out[j, i] = -out[i, j]
    return out


def family_rank(fields: Sequence[GroupField], P: TrivializedCotangentPoint, normals: Optional[Sequence[GroupField]] = None) -> int:
    rows = np.array([trivialized_derivative(F, P).row() for F in fields])
    if not normals:
        return numerical_rank(rows)
    normal_rows = np.array([trivialized_derivative(F, P).row() for F in normals])
    return tangent_rank(rows, normal_rows)


def _weights_to_algebra(U: EschenburgU) -> Tuple[np.ndarray, np.ndarray]:
    left, right = U.weights
    return np.diag(1j * np.array(left, dtype=float)), np.diag(1j * np.array(right, dtype=float))


def circle_action(U: EschenburgU, angle: float) -> Tuple[np.ndarray, np.ndarray]:
    x1, x2 = _weights_to_algebra(U)
    return np.diag(np.exp(np.diag(x1) * angle)), np.diag(np.exp(np.diag(x2) * angle))


def psi_U(U: EschenburgU, P: TrivializedCotangentPoint) -> float:
    """<x, g^-1 X_1 g - X_2>, the momentum of the circle U"""
    x1, x2 = _weights_to_algebra(U)
    return lie.pairing(P.x, P.g.conj().T @ x1 @ P.g - x2)


def psi_U_field(U: EschenburgU) -> GroupFunction:
    x1, x2 = _weights_to_algebra(U)

    def fn(g, x):
        return lie.pairing(x, g.conj().T @ x1 @ g - x2)

    def derivative(g, x):
        m = g.conj().T @ x1 @ g
        return x @ m - m @ x, lie.project(m - x2, "su")

    return GroupFunction(fn, derivative, f"psi_U{U.as_tuple()}")


def pulled_back_family(family: lie.ShiftFamily) -> List[GroupFunction]:
    """
    Members of a shift family on su(3) + su(3) composed with Psi_H. With
    (A, B) the gradient of a member at (gxg*, -x), D_x = g*Ag - B and
    D_g = [x, g*Ag].
    """

    def pull(member):
        def fn(g, x):
            return member((g @ x @ g.conj().T, -x))

        grad = member.grad
        if grad is None:
            return GroupFunction(fn, None, member.name)

        def derivative(g, x):
            gi = g.conj().T
            a, b = grad((g @ x @ gi, -x))
            pulled = gi @ a @ g
            return lie.project(x @ pulled - pulled @ x, "su"), lie.project(pulled - b, "su")

        return GroupFunction(fn, derivative, member.name)

    return [pull(m) for m in family]


def eschenburg_family(a: Optional[Tuple[np.ndarray, np.ndarray]] = None, lambdas: Sequence[float] = (0.0, 1.0, 2.0)) -> lie.ShiftFamily:
    a = a if a is not None else DEFAULT_SHIFT
    shift = lie.ProductAlgebraElement(lie.LieAlgebraElement(a[0], "su"), lie.LieAlgebraElement(a[1], "su"))
    casimirs = [lie.CasimirSpec(kind, block=b) for kind in ("trace-square", "trace-cube") for b in (0, 1)]
    return lie.mf_shift_family(casimirs, shift, lambdas)


def regular_point_in_zero_level(
    U: EschenburgU,
    rng: np.random.Generator,
    fields: Optional[Sequence[GroupField]] = None,
) -> TrivializedCotangentPoint:
    """
    Random point of Psi_U^-1(0) whose fiber component is regular and where the
    pulled-back family has full rank.
    """
    fields = list(fields) if fields is not None else pulled_back_family(eschenburg_family())
    x1, x2 = _weights_to_algebra(U)
    draws = tolerances().regular_search_draws
    for attempt in range(1, draws + 1):
        P = TrivializedCotangentPoint.random(rng)
        normal = lie.project(P.g.conj().T @ x1 @ P.g - x2, "su")
        size = lie.pairing(normal, normal)
        if size < 1e-6:
            continue
        x = P.x - lie.pairing(P.x, normal) / size * normal
        P = TrivializedCotangentPoint(P.g, lie.project(x, "su"))
        if lie.stabilizer_dimension(lie.LieAlgebraElement(P.x, "su")) != 2:
            continue
        if family_rank(fields, P) == P.n**2 - 1:
            return P
        if attempt == 100:
            logger.warning("no regular point on the zero level of U = %s after 100 draws", U.as_tuple())
    raise RegularPointNotFoundError(f"no regular point on Psi_U^-1(0) after {draws} draws")


def eschenburg_integral_report(
    U: EschenburgU,
    rng: Optional[np.random.Generator] = None,
    points: int = 3,
    a: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> Dict:
    if not admissible(U):
        raise InputError(f"quartet {U.as_tuple()} is not admissible")
    rng = rng or np.random.default_rng(tolerances().seed)
    tol = tolerances()
    family = eschenburg_family(a)
    fields = pulled_back_family(family)
    report: Dict = {"success": True, "quartet": list(U.as_tuple()), "shift_regular": family.regular, "errors": []}

    algebra = lie.LieAlgebra([(3, "su"), (3, "su")])
    x = algebra.random(rng)
    report["coalgebra_ddim"] = lie.differential_dimension(family, x)
    report["coalgebra_drank"] = lie.differential_rank(family, x, seed=tol.seed)

    involution = 0.0
    for _ in range(points):
        involution = max(involution, float(np.max(np.abs(trivialized_bracket_matrix(fields, TrivializedCotangentPoint.random(rng))))))
    report["involution_max"] = involution

    sample = TrivializedCotangentPoint.random(rng)
    report["ddim"] = family_rank(fields, sample)

    P = regular_point_in_zero_level(U, rng, fields)
    report["psi_U_at_point"] = psi_U(U, P)
    report["reduced_rank"] = family_rank(fields, P, normals=[psi_U_field(U)])
    report["casimir_agreement"] = abs(
        lie.casimir_value(lie.CasimirSpec("trace-square"), psi_Gplus(P))
        - lie.casimir_value(lie.CasimirSpec("trace-square"), psi_Gminus(P))
    )

    if report["coalgebra_ddim"] != 10 or report["coalgebra_drank"] != 6:
        report["errors"].append(
            f"shift family on su(3)+su(3) has ddim {report['coalgebra_ddim']}, drank {report['coalgebra_drank']}; expected 10, 6"
        )
    if involution >= tol.involution_atol:
        report["errors"].append(f"pulled-back family not in involution: {involution:.3e}")
    if report["ddim"] != 8:
        report["errors"].append(f"pulled-back ddim {report['ddim']}, expected 8")
    if report["reduced_rank"] != 7:
        report["errors"].append(f"reduced rank {report['reduced_rank']}, expected 7")
    if report["casimir_agreement"] > tol.equivariance_atol:
        report["errors"].append("Casimirs differ between the two momentum maps")
    report["su3_integrals"] = su3_integral_report(rng, points)
    report["errors"].extend(report["su3_integrals"]["errors"])
    report["success"] = not report["errors"]
    logger.info("Eschenburg %s: ddim %d, reduced rank %d", U.as_tuple(), report["ddim"], report["reduced_rank"])
    return report


INTEGRAL_NAMES = ("F1", "F2", "F4", "F5", "Fdet")


def _su3_integral(name: str, xi: np.ndarray) -> float:
    if name == "F1":
        return float((-1j * xi[2, 2]).real)
    if name == "F2":
        return float((-1j * np.trace(xi[1:, 1:])).real)
    if name == "F4":
        corner = xi[1:, 1:]
        return 0.5 * float(np.trace(corner @ corner).real)
    if name == "F5":
        return 0.5 * float(np.trace(xi @ xi).real)
    return lie.casimir_value(lie.CasimirSpec("determinant"), xi)


def su3_integral_fields() -> Dict[str, GroupField]:
    """F_{i,+} = f_i o Psi_{G+} and F_{i,-} = f_i o Psi_{G-}"""
    fields: Dict[str, GroupField] = {}
    for name in INTEGRAL_NAMES:
        fields[f"{name}+"] = (lambda nm: lambda g, x: _su3_integral(nm, g @ x @ g.conj().T))(name)
        fields[f"{name}-"] = (lambda nm: lambda g, x: _su3_integral(nm, x))(name)
    return fields


def su3_integral_set(P: TrivializedCotangentPoint) -> Dict[str, float]:
    return {name: F(P.g, P.x) for name, F in su3_integral_fields().items()}


def random_torus_element(n: int, rng: np.random.Generator) -> np.ndarray:
    """Diagonal element of the maximal torus of SU(n)"""
    theta = rng.uniform(0.0, 2 * np.pi, n)
    theta[-1] = -theta[:-1].sum()
    return np.diag(np.exp(1j * theta))


def su3_integral_report(rng: Optional[np.random.Generator] = None, points: int = 3) -> Dict:
    """Pairwise brackets of the ten integrals and their invariance under T x T"""
    tol = tolerances()
    rng = rng or np.random.default_rng(tol.seed)
    fields = su3_integral_fields()
    report: Dict = {"success": True, "integrals": len(fields), "errors": []}
    involution = 0.0
    torus = 0.0
    for _ in range(points):
        P = TrivializedCotangentPoint.random(rng)
        involution = max(involution, float(np.max(np.abs(trivialized_bracket_matrix(list(fields.values()), P)))))
        Q = P.act(random_torus_element(3, rng), random_torus_element(3, rng))
        for F in fields.values():
            value = F(P.g, P.x)
            torus = max(torus, abs(F(Q.g, Q.x) - value) / max(1.0, abs(value)))
    report["involution_max"] = involution
    report["torus_invariance_max"] = torus
    if involution >= tol.involution_atol:
        report["errors"].append(f"integrals on T*SU(3) not in involution: {involution:.3e}")
    if torus > tol.equivariance_atol:
        report["errors"].append(f"integrals on T*SU(3) not torus invariant: {torus:.3e}")
    report["success"] = not report["errors"]
    return report
