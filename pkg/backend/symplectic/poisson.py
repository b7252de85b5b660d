"""
Poisson-geometry engine on coordinate cotangent spaces R^{2N}.

Points are flat arrays (x^1..x^N, y_1..y_N). The bracket convention is
{f,g} = sum_i (df/dy_i dg/dx^i - df/dx^i dg/dy_i), so the flow of H is
x' = dH/dy, y' = -dH/dx and {H, x^i} = dH/dy_i.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import null_space

from .config import tolerances
from .errors import (
    ConstraintDegeneracyError,
    DimensionMismatchError,
    EnergyDriftError,
    FlowDivergenceError,
    OffShellError,
    ProjectionError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScalarField:
    """Smooth function on R^{2N}, optionally with an analytic gradient"""

    fn: Callable[[np.ndarray], float]
    arity: int
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    def __post_init__(self):
        if self.arity % 2:
            raise DimensionMismatchError(f"phase space arity must be even, got {self.arity}")

    def __call__(self, p) -> float:
        return float(self.fn(np.asarray(p, dtype=float)))

    def without_gradient(self) -> "ScalarField":
        return ScalarField(self.fn, self.arity, None, self.name)


@dataclass(frozen=True)
class ConstraintSet:
    constraints: Sequence[ScalarField] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.constraints)

    def residuals(self, p: np.ndarray) -> np.ndarray:
        return np.array([c(p) for c in self.constraints])

    def jacobian(self, p: np.ndarray) -> np.ndarray:
        if not self.constraints:
            return np.zeros((0, len(p)))
        return np.array([gradient(c, p) for c in self.constraints])

    def extended(self, *extra: ScalarField) -> "ConstraintSet":
        return ConstraintSet(tuple(self.constraints) + tuple(extra))


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    energy_drift: np.ndarray
    constraint_residual: np.ndarray

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def max_energy_drift(self) -> float:
        return float(np.max(self.energy_drift)) if len(self.energy_drift) else 0.0

    @property
    def max_constraint_residual(self) -> float:
        return float(np.max(self.constraint_residual)) if len(self.constraint_residual) else 0.0


@dataclass
class InvolutionResult:
    matrix: np.ndarray
    max_abs: float


def numerical_rank(matrix: np.ndarray, rtol: Optional[float] = None, scale: float = 0.0) -> int:
    """
    Rank with singular values below rtol * max(largest, scale) counted as zero.
    scale lets a projected matrix be judged against the size of the original.
    """
    rtol = tolerances().rank_rtol if rtol is None else rtol
    matrix = np.atleast_2d(matrix)
    if matrix.size == 0:
        return 0
    s = np.linalg.svd(matrix, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * max(s[0], scale)))


def _check_point(f: ScalarField, p: np.ndarray):
    if p.shape != (f.arity,):
        raise DimensionMismatchError(f"field {f.name or '<anon>'} expects {f.arity} coordinates, got {p.shape}")


def gradient(f, p) -> np.ndarray:
    """Analytic gradient when the field has one, central differences otherwise"""
    p = np.asarray(p, dtype=float)
    if isinstance(f, ScalarField):
        _check_point(f, p)
        if f.grad is not None:
            g = np.asarray(f.grad(p), dtype=float)
            if not np.all(np.isfinite(g)):
                raise FlowDivergenceError(f"non-finite analytic gradient of {f.name or '<anon>'}")
            return g
    h0 = tolerances().fd_step
    g = np.empty_like(p)
    for i in range(p.size):
        h = h0 * max(1.0, abs(p[i]))
        step = np.zeros_like(p)
        step[i] = h
        fp, fm = float(f(p + step)), float(f(p - step))
        g[i] = (fp - fm) / (2.0 * h)
    if not np.all(np.isfinite(g)):
        raise FlowDivergenceError("non-finite value while differencing a scalar field")
    return g


def poisson_tensor(n_dof: int) -> np.ndarray:
    """Matrix P with {f,g} = grad(f) . P . grad(g)"""
    eye = np.eye(n_dof)
    zero = np.zeros((n_dof, n_dof))
    return np.block([[zero, -eye], [eye, zero]])


def _bracket_of_gradients(da: np.ndarray, db: np.ndarray) -> float:
    n = da.size // 2
    return float(da[n:] @ db[:n] - da[:n] @ db[n:])


def canonical_bracket(f: ScalarField, g: ScalarField, p) -> float:
    p = np.asarray(p, dtype=float)
    return _bracket_of_gradients(gradient(f, p), gradient(g, p))


def hamiltonian_vector_field(H: ScalarField, p, C: Optional[ConstraintSet] = None) -> np.ndarray:
    """X_H, Dirac-corrected when a constraint set is given"""
    p = np.asarray(p, dtype=float)
    dH = gradient(H, p)
    P = poisson_tensor(p.size // 2)
    # X_f = grad(f) . P as a column vector, i.e. P^T grad f
    field_H = P.T @ dH
    if C is None or len(C) == 0:
        return field_H
    K = C.jacobian(p)
    M = K @ P @ K.T
    _check_invertible(M)
    h_c = dH @ P @ K.T
    coeffs = np.linalg.solve(M.T, h_c)
    return field_H - (P.T @ K.T) @ coeffs


def constraint_matrix(C: ConstraintSet, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    K = C.jacobian(p)
    return K @ poisson_tensor(p.size // 2) @ K.T


def _check_invertible(M: np.ndarray):
    if M.size == 0:
        return
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= tolerances().rank_rtol * max(s[0], 1.0):
        raise ConstraintDegeneracyError(f"constraint bracket matrix is singular (smallest singular value {s[-1]:.3e})")


def _check_on_shell(C: Optional[ConstraintSet], p: np.ndarray):
    if C is None or len(C) == 0:
        return
    residual = np.max(np.abs(C.residuals(p)))
    if residual > tolerances().on_shell_atol:
        raise OffShellError(f"point is off the constraint set (residual {residual:.3e})")


def bracket_matrix(grads: np.ndarray, constraint_grads: Optional[np.ndarray] = None) -> np.ndarray:
    """All pairwise (Dirac) brackets from stacked gradient rows"""
    P = poisson_tensor(grads.shape[1] // 2)
    B = grads @ P @ grads.T
    if constraint_grads is None or len(constraint_grads) == 0:
        return B
    M = constraint_grads @ P @ constraint_grads.T
    _check_invertible(M)
    FC = grads @ P @ constraint_grads.T
    CG = constraint_grads @ P @ grads.T
    return B - FC @ np.linalg.solve(M, CG)


def dirac_bracket(f: ScalarField, g: ScalarField, p, C: ConstraintSet) -> float:
    p = np.asarray(p, dtype=float)
    _check_on_shell(C, p)
    grads = np.array([gradient(f, p), gradient(g, p)])
    K = C.jacobian(p) if C is not None else None
    return float(bracket_matrix(grads, K)[0, 1])


def involution_matrix(fns: Sequence[ScalarField], points, C: Optional[ConstraintSet] = None) -> InvolutionResult:
    """Entry (i,j) is the largest |{f_i, f_j}| over the points"""
    out = np.zeros((len(fns), len(fns)))
    for p in points:
        p = np.asarray(p, dtype=float)
        _check_on_shell(C, p)
        grads = np.array([gradient(f, p) for f in fns])
        K = C.jacobian(p) if C is not None and len(C) else None
        out = np.maximum(out, np.abs(bracket_matrix(grads, K)))
    max_abs = float(out.max()) if out.size else 0.0
    logger.debug("involution matrix over %d points: max %.3e", len(points), max_abs)
    return InvolutionResult(matrix=out, max_abs=max_abs)


def tangent_rank(gradient_rows: np.ndarray, constraint_rows: Optional[np.ndarray] = None) -> int:
    """Rank of gradients after projection onto the kernel of the constraint Jacobian"""
    rows = np.atleast_2d(gradient_rows)
    if rows.size == 0:
        return 0
    if constraint_rows is not None and len(constraint_rows):
        scale = float(np.linalg.norm(rows, 2))
        basis = null_space(np.atleast_2d(constraint_rows), rcond=tolerances().rank_rtol)
        return numerical_rank(rows @ basis, scale=scale)
    return numerical_rank(rows)


def independence_rank(fns: Sequence[ScalarField], p, C: Optional[ConstraintSet] = None) -> int:
    p = np.asarray(p, dtype=float)
    _check_on_shell(C, p)
    grads = np.array([gradient(f, p) for f in fns])
    K = C.jacobian(p) if C is not None and len(C) else None
    return tangent_rank(grads, K)


def project_to_constraints(C: ConstraintSet, p, max_iter: int = 20) -> np.ndarray:
    """Gauss-Newton projection along the constraint normals"""
    p = np.array(p, dtype=float)
    if C is None or len(C) == 0:
        return p
    for _ in range(max_iter):
        r = C.residuals(p)
        if np.max(np.abs(r)) < 1e-14:
            break
        K = C.jacobian(p)
        p = p - K.T @ np.linalg.solve(K @ K.T, r)
    residual = float(np.max(np.abs(C.residuals(p))))
    limit = tolerances().constraint_residual_max
    if residual > limit:
        raise ProjectionError(
            f"projection left constraint residual {residual:.3e} after {max_iter} iterations (limit {limit:.1e})"
        )
    return p


def hamiltonian_flow(
    H: ScalarField,
    p0,
    T: float,
    steps: int,
    C: Optional[ConstraintSet] = None,
    projection_iter: int = 20,
) -> Trajectory:
    """
    Integrate X_H (Dirac-corrected under constraints) with classical RK4 and
    project back onto the constraint set after each step. A projection that
    stays above constraint_residual_max raises ProjectionError.
    """
    tol = tolerances()
    p = np.asarray(p0, dtype=float).copy()
    _check_on_shell(C, p)
    dt = T / steps
    e0 = H(p)
    states = np.empty((steps + 1, p.size))
    drift = np.zeros(steps + 1)
    residual = np.zeros(steps + 1)
    states[0] = p
    if C is not None and len(C):
        residual[0] = np.max(np.abs(C.residuals(p)))

    def velocity(q):
        return hamiltonian_vector_field(H, q, C)

    for k in range(1, steps + 1):
        k1 = velocity(p)
        k2 = velocity(p + 0.5 * dt * k1)
        k3 = velocity(p + 0.5 * dt * k2)
        k4 = velocity(p + dt * k3)
        p = p + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if C is not None and len(C):
            try:
                p = project_to_constraints(C, p, projection_iter)
            except ProjectionError as exc:
                raise ProjectionError(f"{exc} at step {k}; increase the step count") from exc
            residual[k] = np.max(np.abs(C.residuals(p)))
        if not np.all(np.isfinite(p)):
            raise FlowDivergenceError(f"non-finite state at step {k}")
        drift[k] = abs(H(p) - e0)
        if drift[k] > tol.energy_drift_max:
            raise EnergyDriftError(
                f"energy drift {drift[k]:.3e} exceeds {tol.energy_drift_max:.1e} at step {k}; "
                "increase the step count"
            )
        states[k] = p
    logger.debug("flow of %s: %d steps, max drift %.3e", H.name or "<anon>", steps, drift.max())
    return Trajectory(
        times=np.linspace(0.0, T, steps + 1),
        states=states,
        energy_drift=drift,
        constraint_residual=residual,
    )


def convexity_probe(H: ScalarField, p) -> float:
    """Smallest eigenvalue of the fiber Hessian d^2H/dy^2 at p (diagnostic only)"""
    p = np.asarray(p, dtype=float)
    n = p.size // 2
    h = tolerances().fd_step ** 0.5
    hess = np.empty((n, n))
    for j in range(n):
        step = np.zeros_like(p)
        step[n + j] = h
        hess[:, j] = (gradient(H, p + step)[n:] - gradient(H, p - step)[n:]) / (2 * h)
    return float(np.linalg.eigvalsh(0.5 * (hess + hess.T))[0])


def quadratic_kinetic(n_dof: int) -> ScalarField:
    """H = 1/2 |y|^2 on R^{2N}"""

    def grad(p):
        return np.concatenate([np.zeros(n_dof), p[n_dof:]])

    return ScalarField(lambda p: 0.5 * float(p[n_dof:] @ p[n_dof:]), 2 * n_dof, grad, "kinetic")


def sphere_constraints(n_dof: int) -> ConstraintSet:
    """T*S^{N-1} in R^{2N}: |x|^2 - 1 and x.y"""

    def c1(p):
        return float(p[:n_dof] @ p[:n_dof] - 1.0)

    def c1_grad(p):
        return np.concatenate([2 * p[:n_dof], np.zeros(n_dof)])

    def c2(p):
        return float(p[:n_dof] @ p[n_dof:])

    def c2_grad(p):
        return np.concatenate([p[n_dof:], p[:n_dof]])

    return ConstraintSet((
        ScalarField(c1, 2 * n_dof, c1_grad, "|x|^2-1"),
        ScalarField(c2, 2 * n_dof, c2_grad, "x.y"),
    ))


def coordinate_field(index: int, arity: int) -> ScalarField:
    def grad(p):
        g = np.zeros(arity)
        g[index] = 1.0
        return g

    return ScalarField(lambda p: float(p[index]), arity, grad, f"coord[{index}]")
