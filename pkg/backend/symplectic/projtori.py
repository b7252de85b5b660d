"""
Integrable geodesic flows of projectively equivalent model metrics on the n-torus.

The eigenvalue functions lambda_i(x_i) are trigonometric polynomials with
period 1 and must be strictly separated, hi_i < lo_{i+1}, with lo_1 > 0.
Pi_i = prod_{j != i} |lambda_i - lambda_j| is taken positive, so
g = sum Pi_i dx_i^2 is a riemannian metric.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq, minimize_scalar

from .config import tolerances
from .errors import (
    ConsistencyError,
    DegenerateCrossingError,
    DimensionMismatchError,
    InputError,
    NoRealSolutionError,
    SingularParameterError,
)
from .maslov import (
    LagrangianFrame,
    LagrangianLoop,
    crossing_signs,
    frame_from_tangent_vectors,
    maslov_index,
    signed_crossings,
)
from .poisson import ScalarField, hamiltonian_flow, involution_matrix, numerical_rank

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TrigPolynomial:
    """c + sum_m (a_m cos 2 pi m x + b_m sin 2 pi m x), m = 1, 2, ..."""

    constant: float
    cos: Tuple[float, ...] = ()
    sin: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(s) for s in self.sin))

    @property
    def is_constant(self) -> bool:
        return not any(self.cos) and not any(self.sin)

    def _harmonics(self):
        m = max(len(self.cos), len(self.sin))
        a = np.zeros(m)
        b = np.zeros(m)
        a[: len(self.cos)] = self.cos
        b[: len(self.sin)] = self.sin
        return np.arange(1, m + 1), a, b

    def __call__(self, x):
        k, a, b = self._harmonics()
        x = np.asarray(x, dtype=float)
        arg = TWO_PI * np.multiply.outer(x, k)
        return self.constant + np.cos(arg) @ a + np.sin(arg) @ b

    def derivative(self, x):
        k, a, b = self._harmonics()
        x = np.asarray(x, dtype=float)
        arg = TWO_PI * np.multiply.outer(x, k)
        return (np.cos(arg) @ (TWO_PI * k * b)) - (np.sin(arg) @ (TWO_PI * k * a))

    def extrema(self, grid_points: int) -> Tuple[float, float]:
        if self.is_constant:
            return float(self.constant), float(self.constant)
        xs = np.arange(grid_points) / grid_points
        vals = self(xs)
        h = 1.0 / grid_points
        lo_x = xs[np.argmin(vals)]
        hi_x = xs[np.argmax(vals)]
        lo = minimize_scalar(lambda t: float(self(t)), bounds=(lo_x - h, lo_x + h), method="bounded")
        hi = minimize_scalar(lambda t: -float(self(t)), bounds=(hi_x - h, hi_x + h), method="bounded")
        return min(float(lo.fun), float(vals.min())), max(-float(hi.fun), float(vals.max()))

    def critical_values(self, grid_points: int) -> List[float]:
        if self.is_constant:
            return [float(self.constant)]
        xs = np.arange(grid_points + 1) / grid_points
        d = self.derivative(xs)
        values = []
        for k in range(grid_points):
            if d[k] == 0.0:
                values.append(float(self(xs[k])))
            elif d[k] * d[k + 1] < 0:
                root = brentq(lambda t: float(self.derivative(t)), xs[k], xs[k + 1])
                values.append(float(self(root)))
        return values


@dataclass(frozen=True)
class SeparatedEigenFunctions:
    functions: Tuple[TrigPolynomial, ...]
    lo: Tuple[float, ...] = field(init=False)
    hi: Tuple[float, ...] = field(init=False)

    def __post_init__(self):
        functions = tuple(self.functions)
        if not functions:
            raise InputError("need at least one eigenvalue function")
        object.__setattr__(self, "functions", functions)
        self.validate()

    def validate(self):
        grid = tolerances().grid_points
        bounds = [f.extrema(grid) for f in self.functions]
        object.__setattr__(self, "lo", tuple(b[0] for b in bounds))
        object.__setattr__(self, "hi", tuple(b[1] for b in bounds))
        if self.lo[0] <= 0:
            raise InputError(f"eigenvalues must be positive, min lambda_1 = {self.lo[0]:.6g}")
        for i in range(self.n - 1):
            if not self.hi[i] < self.lo[i + 1]:
                raise InputError(
                    f"lambda_{i + 1} and lambda_{i + 2} are not separated "
                    f"(max {self.hi[i]:.6g} >= min {self.lo[i + 1]:.6g})"
                )

    @classmethod
    def constant(cls, values: Sequence[float]) -> "SeparatedEigenFunctions":
        return cls(tuple(TrigPolynomial(float(v)) for v in values))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, harmonics: int = 2, amplitude: float = 0.3):
        polys = []
        for i in range(n):
            a = rng.uniform(-1, 1, harmonics) * amplitude / harmonics
            b = rng.uniform(-1, 1, harmonics) * amplitude / harmonics
            polys.append(TrigPolynomial(1.0 + 2.0 * i, tuple(a), tuple(b)))
        return cls(tuple(polys))

    @property
    def n(self) -> int:
        return len(self.functions)

    def values(self, x) -> np.ndarray:
        return np.array([float(f(xi)) for f, xi in zip(self.functions, x)])

    def derivatives(self, x) -> np.ndarray:
        return np.array([float(f.derivative(xi)) for f, xi in zip(self.functions, x)])

    def gaps(self) -> List[Tuple[float, float]]:
        return [(self.hi[i], self.lo[i + 1]) for i in range(self.n - 1)]


@dataclass(frozen=True)
class ModelMetricPair:
    eig: SeparatedEigenFunctions

    @property
    def n(self) -> int:
        return self.eig.n

    def pi(self, x) -> np.ndarray:
        lam = self.eig.values(x)
        return _pi_from_values(lam)

    def rho(self, x) -> np.ndarray:
        lam = self.eig.values(x)
        return 1.0 / (lam * np.prod(lam))

    def g_matrix(self, x) -> np.ndarray:
        return np.diag(self.pi(x))

    def gbar_matrix(self, x) -> np.ndarray:
        return np.diag(self.rho(x) * self.pi(x))


def _pi_from_values(lam: np.ndarray) -> np.ndarray:
    n = lam.size
    return np.array([np.prod([abs(lam[i] - lam[j]) for j in range(n) if j != i]) for i in range(n)])


def _mu(lam: np.ndarray, tau: float) -> np.ndarray:
    """mu_i(tau) = prod_{j != i} (lambda_j - tau)"""
    n = lam.size
    return np.array([np.prod([lam[j] - tau for j in range(n) if j != i]) for i in range(n)])


def adjugate(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    if n == 1:
        return np.ones((1, 1))
    cof = np.empty_like(m, dtype=float)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, i, axis=0), j, axis=1)
            cof[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return cof.T


def tensor_G_from_metrics(g: np.ndarray, gbar: np.ndarray) -> np.ndarray:
    """(det gbar / det g)^{1/(n+1)} gbar^{-1} g"""
    g = np.asarray(g, dtype=float)
    gbar = np.asarray(gbar, dtype=float)
    if g.shape != gbar.shape or g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatchError("metrics must be square matrices of equal size")
    for m in (g, gbar):
        if not np.allclose(m, m.T) or np.linalg.eigvalsh(m)[0] <= 0:
            raise InputError("metrics must be symmetric positive definite")
    n = g.shape[0]
    scale = (np.linalg.det(gbar) / np.linalg.det(g)) ** (1.0 / (n + 1))
    return scale * np.linalg.solve(gbar, g)


def tensor_G(metrics: ModelMetricPair, x) -> np.ndarray:
    return tensor_G_from_metrics(metrics.g_matrix(x), metrics.gbar_matrix(x))


def S_tau(metrics: ModelMetricPair, x, tau: float) -> np.ndarray:
    G = tensor_G(metrics, x)
    return adjugate(G - tau * np.eye(metrics.n))


def I_tau(metrics: ModelMetricPair, x, v, tau: float) -> float:
    v = np.asarray(v, dtype=float)
    if v.shape != (metrics.n,):
        raise DimensionMismatchError(f"tangent vector must have {metrics.n} components")
    return float(v @ metrics.g_matrix(x) @ S_tau(metrics, x, tau) @ v)


def _j_coordinates(metrics: ModelMetricPair, x, y, tau: float) -> float:
    lam = metrics.eig.values(x)
    return float(np.sum(_mu(lam, tau) * np.asarray(y) ** 2 / _pi_from_values(lam)))


def J_tau(metrics: ModelMetricPair, x, y, tau: float) -> float:
    """
    sum_i mu_i(tau) y_i^2 / Pi_i, cross-checked against I_tau pulled back
    through the Legendre map v = g^{-1} y.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (metrics.n,):
        raise DimensionMismatchError(f"covector must have {metrics.n} components")
    value = _j_coordinates(metrics, x, y, tau)
    pulled_back = I_tau(metrics, x, np.linalg.solve(metrics.g_matrix(x), y), tau)
    if abs(value - pulled_back) > tolerances().consistency_rtol * max(1.0, abs(value)):
        raise ConsistencyError(
            f"J_tau coordinate formula {value:.12g} disagrees with the tensor pipeline {pulled_back:.12g}"
        )
    return value


def vector_field_XJ(metrics: ModelMetricPair, state, tau: float) -> np.ndarray:
    """Phase velocity (x', y') of the Hamiltonian J_tau"""
    x, y = (np.asarray(s, dtype=float) for s in state)
    n = metrics.n
    lam = metrics.eig.values(x)
    if np.min(np.abs(lam - tau)) < tolerances().singular_param_atol:
        raise SingularParameterError(f"tau = {tau:.12g} coincides with an eigenvalue at x")
    dlam = metrics.eig.derivatives(x)
    pi = _pi_from_values(lam)
    mu = _mu(lam, tau)
    w = mu * y**2 / pi
    xdot = 2.0 * mu * y / pi
    ydot = np.zeros(n)
    for i in range(n):
        if dlam[i] == 0.0:
            continue
        others = [j for j in range(n) if j != i]
        cross = sum((lam[j] - tau) / ((lam[i] - tau) * (lam[j] - lam[i])) * w[j] for j in others)
        diagonal = w[i] * sum(1.0 / (lam[i] - lam[k]) for k in others)
        ydot[i] = -dlam[i] * (cross - diagonal)
    return np.concatenate([xdot, ydot])


def j_tau_field(metrics: ModelMetricPair, tau: float, analytic: bool = True) -> ScalarField:
    n = metrics.n

    def fn(p):
        return _j_coordinates(metrics, p[:n], p[n:], tau)

    def grad(p):
        v = vector_field_XJ(metrics, (p[:n], p[n:]), tau)
        return np.concatenate([-v[n:], v[:n]])

    return ScalarField(fn, 2 * n, grad if analytic else None, f"J[{tau:g}]")


def geodesic_hamiltonian(metrics: ModelMetricPair) -> ScalarField:
    """E = sum y_i^2 / Pi_i, the metric Hamiltonian of g"""
    n = metrics.n

    def fn(p):
        lam = metrics.eig.values(p[:n])
        return float(np.sum(p[n:] ** 2 / _pi_from_values(lam)))

    def grad(p):
        x, y = p[:n], p[n:]
        lam = metrics.eig.values(x)
        dlam = metrics.eig.derivatives(x)
        e = y**2 / _pi_from_values(lam)
        dx = np.zeros(n)
        for i in range(n):
            dx[i] = dlam[i] * sum((e[j] + e[i]) / (lam[j] - lam[i]) for j in range(n) if j != i)
        return np.concatenate([dx, 2.0 * y / _pi_from_values(lam)])

    return ScalarField(fn, 2 * n, grad, "E")


@dataclass(frozen=True)
class FirstIntegralPolynomial:
    """
    q(tau) = leading * prod_i (tau_i - tau), the value of J on a level set.
    `real_rooted` is False for complex roots or for a degree below n-1.
    """

    leading: float
    roots: Tuple[float, ...]
    real_rooted: bool = True

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(sorted(float(r) for r in self.roots)))

    @property
    def n(self) -> int:
        return len(self.roots) + 1

    @property
    def is_zero(self) -> bool:
        return self.leading == 0.0

    def __call__(self, tau: float) -> float:
        return float(self.leading * np.prod([r - tau for r in self.roots]))

    @classmethod
    def from_coefficients(cls, coefficients: Sequence[float]) -> "FirstIntegralPolynomial":
        """Coefficients in increasing powers of tau, length n"""
        c = np.asarray(coefficients, dtype=float)
        n = c.size
        if n == 0:
            raise InputError("empty coefficient list")
        if c[-1] == 0.0:
            if np.any(c):
                return cls(0.0, (0.0,) * (n - 1), real_rooted=False)
            return cls(0.0, (0.0,) * (n - 1))
        roots = np.roots(c[::-1]) if n > 1 else np.array([])
        real = bool(np.all(np.abs(np.imag(roots)) <= 1e-9 * max(1.0, np.max(np.abs(roots), initial=0.0))))
        return cls(float(c[-1] * (-1) ** (n - 1)), tuple(np.real(roots)), real_rooted=real)

    def coefficients(self) -> np.ndarray:
        poly = np.poly1d([1.0])
        for r in self.roots:
            poly = poly * np.poly1d([-1.0, r])
        return self.leading * poly.coeffs[::-1]


@dataclass
class InterlacingCoefficients:
    a: np.ndarray
    t: np.ndarray
    roots: np.ndarray
    interlaced: bool

    @property
    def all_nonnegative(self) -> bool:
        return bool(np.all(self.a >= 0))

    def polynomial(self, tau: float) -> float:
        return float(np.sum(self.a * _mu(self.t, tau)))


def claim1_coefficients(t: Sequence[float], roots: Sequence[float]) -> InterlacingCoefficients:
    """a_i = sigma(t_i) / mu_i(t_i) with sigma(tau) = prod (tau_k - tau)"""
    t = np.asarray(t, dtype=float)
    roots = np.sort(np.asarray(roots, dtype=float))
    n = t.size
    if roots.size != n - 1:
        raise DimensionMismatchError(f"need {n - 1} roots for {n} values, got {roots.size}")
    if n > 1 and np.min(np.abs(np.subtract.outer(t, t)) + np.eye(n) * np.inf) == 0.0:
        raise InputError("values t_i must be pairwise distinct")
    a = np.array([np.prod(roots - t[i]) / _mu(t, t[i])[i] for i in range(n)])
    order = np.sort(t)
    interlaced = bool(np.all((roots >= order[:-1]) & (roots <= order[1:])))
    return InterlacingCoefficients(a=a, t=t, roots=roots, interlaced=interlaced)


class ImageClass(str, Enum):
    INTERIOR_DIFFEO = "interior-diffeo"
    BOUNDARY = "boundary"
    NONTRIVIAL_MASLOV = "nontrivial-maslov"
    OUTSIDE = "outside"


def is_regular_value(metrics: ModelMetricPair, q: FirstIntegralPolynomial) -> bool:
    """No double root and no root at a critical value of any lambda_i"""
    atol = tolerances().singular_param_atol
    roots = np.asarray(q.roots)
    if roots.size > 1 and np.min(np.diff(roots)) <= atol:
        return False
    grid = tolerances().grid_points
    critical = [v for f in metrics.eig.functions for v in f.critical_values(grid)]
    return not any(abs(r - c) <= atol for r in roots for c in critical)


def image_membership(metrics: ModelMetricPair, q: FirstIntegralPolynomial) -> ImageClass:
    eig = metrics.eig
    if q.n != metrics.n:
        raise DimensionMismatchError(f"polynomial of degree {q.n - 1} for an {metrics.n}-torus")
    if not q.real_rooted or q.leading < 0:
        return ImageClass.OUTSIDE
    if q.is_zero:
        return ImageClass.BOUNDARY
    roots = q.roots
    for i, r in enumerate(roots):
        if not eig.lo[i] <= r <= eig.hi[i + 1]:
            return ImageClass.OUTSIDE
    if all(eig.hi[i] < r < eig.lo[i + 1] for i, r in enumerate(roots)):
        return ImageClass.INTERIOR_DIFFEO
    in_range = any(
        eig.lo[i] <= r <= eig.hi[i] or eig.lo[i + 1] <= r <= eig.hi[i + 1] for i, r in enumerate(roots)
    )
    if in_range and is_regular_value(metrics, q):
        return ImageClass.NONTRIVIAL_MASLOV
    return ImageClass.BOUNDARY


def _probe_values(metrics: ModelMetricPair) -> List[float]:
    eig = metrics.eig
    return [0.0] + [0.5 * (lo + hi) for lo, hi in eig.gaps()]


def liouville_torus_point(metrics: ModelMetricPair, q: FirstIntegralPolynomial, x) -> np.ndarray:
    """Covector y >= 0 over x on the level set J = q"""
    x = np.asarray(x, dtype=float)
    lam = metrics.eig.values(x)
    coeffs = claim1_coefficients(lam, q.roots).a * q.leading
    if np.min(coeffs) < -1e-10 * max(1.0, np.max(np.abs(coeffs))):
        raise NoRealSolutionError(f"level set misses the fiber over x (coefficients {np.round(coeffs, 12)})")
    y = np.sqrt(np.clip(coeffs, 0.0, None) * _pi_from_values(lam))
    for tau in _probe_values(metrics):
        value = J_tau(metrics, x, y, tau)
        if abs(value - q(tau)) > 1e-8 * max(1.0, abs(q(tau))):
            raise ConsistencyError(f"J_{tau:g} = {value:.12g} but q({tau:g}) = {q(tau):.12g}")
    return y


def nondegeneracy_determinant(metrics: ModelMetricPair, x, probes: Sequence[float]) -> float:
    """det [mu_j(t_i)]"""
    probes = np.asarray(probes, dtype=float)
    if probes.size != metrics.n:
        raise DimensionMismatchError(f"need {metrics.n} probes")
    if len(set(probes.tolist())) != probes.size:
        raise InputError("probes must be pairwise distinct")
    lam = metrics.eig.values(x)
    return float(np.linalg.det(np.array([_mu(lam, t) for t in probes])))


def default_probes(metrics: ModelMetricPair) -> List[float]:
    return [metrics.eig.hi[-1] + 1.0 + k for k in range(metrics.n)]


def _complete_isotropic(vectors: np.ndarray) -> np.ndarray:
    """Extend an isotropic span to a Lagrangian one with projected horizontal vectors"""
    two_n, n = vectors.shape
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    r = numerical_rank(vectors)
    basis = u[:, :r]
    while basis.shape[1] < n:
        # complex structure for the dx - i dy identification: (dx, dy) -> (dy, -dx)
        rotated = np.vstack([basis[n:], -basis[:n]])
        complement = null_space(np.hstack([basis, rotated]).T)
        horizontal = complement @ complement[:n].T
        k = int(np.argmax(np.linalg.norm(horizontal, axis=0)))
        v = horizontal[:, k]
        basis = np.hstack([basis, (v / np.linalg.norm(v))[:, None]])
    return basis


def torus_tangent_frame(metrics: ModelMetricPair, state, probes: Optional[Sequence[float]] = None) -> LagrangianFrame:
    """Lagrangian frame spanned by the fields X_{J_t} at the probes"""
    probes = list(probes) if probes is not None else default_probes(metrics)
    if len(probes) != metrics.n:
        raise DimensionMismatchError(f"need {metrics.n} probes")
    vectors = np.array([vector_field_XJ(metrics, state, t) for t in probes]).T
    if numerical_rank(vectors) < metrics.n:
        logger.debug("tangent span has rank %d, completing it", numerical_rank(vectors))
        vectors = _complete_isotropic(vectors)
    return frame_from_tangent_vectors(vectors)


def _allowed_margin(metrics: ModelMetricPair, q: FirstIntegralPolynomial, i: int):
    roots = q.roots
    lower = roots[i - 1] if i >= 1 else -np.inf
    upper = roots[i] if i < len(roots) else np.inf
    f = metrics.eig.functions[i]

    def margin(t: float) -> float:
        value = float(f(t))
        return min(value - lower, upper - value)

    return margin


def torus_base_point(metrics: ModelMetricPair, q: FirstIntegralPolynomial) -> np.ndarray:
    """Grid point deepest inside the allowed set of every coordinate"""
    grid = np.arange(tolerances().grid_points) / tolerances().grid_points
    x = np.empty(metrics.n)
    for i in range(metrics.n):
        margin = _allowed_margin(metrics, q, i)
        values = np.array([margin(t) for t in grid])
        if values.max() < 0:
            raise NoRealSolutionError(f"level set is empty in coordinate {i + 1}")
        x[i] = grid[int(np.argmax(values))]
    return x


def fold_interval(metrics: ModelMetricPair, q: FirstIntegralPolynomial, i: int, x_i: float) -> Optional[Tuple[float, float]]:
    """Component [alpha, beta] of the allowed x_i around x_i, or None for a full circle"""
    margin = _allowed_margin(metrics, q, i)
    if margin(x_i) <= 0:
        raise DegenerateCrossingError(f"base point sits on a fold of coordinate {i + 1}")
    m = tolerances().grid_points
    steps = np.arange(1, m + 1) / m
    forward = np.array([margin(x_i + s) for s in steps])
    if np.all(forward > 0):
        return None
    k = int(np.argmax(forward <= 0))
    lo_s = steps[k - 1] if k else 0.0
    beta = brentq(margin, x_i + lo_s, x_i + steps[k])
    backward = np.array([margin(x_i - s) for s in steps])
    k = int(np.argmax(backward <= 0))
    lo_s = steps[k - 1] if k else 0.0
    alpha = brentq(margin, x_i - steps[k], x_i - lo_s)
    f = metrics.eig.functions[i]
    slope_floor = np.sqrt(tolerances().singular_param_atol)
    for end in (alpha, beta):
        if abs(float(f.derivative(end))) < slope_floor:
            raise DegenerateCrossingError(f"non-simple fold of coordinate {i + 1} at x = {end:.9f}")
    return alpha, beta


def coordinate_loop(
    metrics: ModelMetricPair,
    q: FirstIntegralPolynomial,
    i: int,
    samples: int = 256,
    base: Optional[Sequence[float]] = None,
) -> LagrangianLoop:
    """
    Tangent planes of J^{-1}(q) along the lift of the i-th coordinate circle.
    On a fold interval the lift runs x_i = alpha + (beta - alpha)(1 - cos phi)/2
    with sign(y_i) = sign(sin phi); samples avoid the folds themselves.
    """
    if image_membership(metrics, q) == ImageClass.OUTSIDE:
        raise InputError("polynomial is outside the image of J")
    if not 0 <= i < metrics.n:
        raise InputError(f"coordinate index {i} out of range")
    x0 = np.asarray(base, dtype=float) if base is not None else torus_base_point(metrics, q)
    interval = fold_interval(metrics, q, i, float(x0[i]))
    points: List[Tuple[float, float]] = []
    if interval is None:
        points = [(x0[i] + s / samples, 1.0) for s in range(samples + 1)]
    else:
        alpha, beta = interval
        count = samples + (samples % 2)
        for k in range(count + 1):
            phi = TWO_PI * (k + 0.5) / count
            points.append((alpha + (beta - alpha) * (1 - np.cos(phi)) / 2, float(np.sign(np.sin(phi)))))
    frames = []
    for xi, sign in points:
        x = x0.copy()
        x[i] = xi
        y = liouville_torus_point(metrics, q, x)
        y[i] *= sign
        frames.append(torus_tangent_frame(metrics, (x, y)))
    return LagrangianLoop(tuple(frames))


def coordinate_loop_maslov(
    metrics: ModelMetricPair,
    q: FirstIntegralPolynomial,
    i: int,
    samples: int = 256,
    base: Optional[Sequence[float]] = None,
) -> int:
    return maslov_index(coordinate_loop(metrics, q, i, samples, base))


def orbit_crossing_signs(
    metrics: ModelMetricPair,
    q: FirstIntegralPolynomial,
    x,
    T: float,
    steps: int,
    stride: int = 1,
) -> List[int]:
    """Signs of the vertical crossings of torus tangent planes along a geodesic orbit"""
    y = liouville_torus_point(metrics, q, x)
    n = metrics.n
    trajectory = hamiltonian_flow(geodesic_hamiltonian(metrics), np.concatenate([x, y]), T, steps)
    frames = [torus_tangent_frame(metrics, (p[:n], p[n:])) for p in trajectory.states[::stride]]
    return crossing_signs(frames, LagrangianFrame.vertical(n))


def random_states(metrics: ModelMetricPair, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    n = metrics.n
    return [np.concatenate([rng.uniform(0, 1, n), rng.normal(0, 1, n)]) for _ in range(count)]


def involution_check(metrics: ModelMetricPair, taus: Sequence[float], states, analytic: bool = False):
    fields = [j_tau_field(metrics, t, analytic=analytic) for t in taus]
    return involution_matrix(fields, states)


def conservation_check(
    metrics: ModelMetricPair,
    p0,
    taus: Sequence[float],
    T: float = 10.0,
    steps: int = 10_000,
    flow_tau: float = 0.0,
) -> Dict[str, float]:
    """Largest drift of every J_tau along the flow of J_{flow_tau}"""
    trajectory = hamiltonian_flow(j_tau_field(metrics, flow_tau), p0, T, steps)
    n = metrics.n
    drift = {}
    for tau in taus:
        values = np.array([_j_coordinates(metrics, p[:n], p[n:], tau) for p in trajectory.states])
        drift[f"{tau:g}"] = float(np.max(np.abs(values - values[0])))
    return drift


def torus_report(
    metrics: ModelMetricPair,
    q: FirstIntegralPolynomial,
    rng: np.random.Generator,
    samples: int = 256,
    states: int = 20,
    taus: Optional[Sequence[float]] = None,
) -> Dict:
    """Classification, coordinate-loop indices and involution check for one level"""
    report: Dict = {"success": True, "errors": []}
    cls = image_membership(metrics, q)
    report["classification"] = cls.value
    report["regular_value"] = is_regular_value(metrics, q) if q.real_rooted else False
    taus = list(taus) if taus is not None else [0.0] + [0.5 * (a + b) for a, b in metrics.eig.gaps()] + default_probes(metrics)
    inv = involution_check(metrics, taus, random_states(metrics, states, rng))
    report["involution_max"] = inv.max_abs
    if inv.max_abs >= tolerances().involution_atol:
        report["errors"].append(f"J_tau family not in involution: {inv.max_abs:.3e}")
    if cls == ImageClass.OUTSIDE:
        report["success"] = not report["errors"]
        return report
    base = torus_base_point(metrics, q)
    report["base_point"] = base.tolist()
    report["covector"] = liouville_torus_point(metrics, q, base).tolist()
    indices, crossings = [], []
    for i in range(metrics.n):
        loop = coordinate_loop(metrics, q, i, samples, base)
        indices.append(maslov_index(loop))
        crossings.append(signed_crossings(loop))
    report["coordinate_loop_indices"] = indices
    report["coordinate_loop_crossings"] = crossings
    if indices != crossings:
        report["errors"].append("signed crossings disagree with the winding index")
    if cls == ImageClass.INTERIOR_DIFFEO and any(indices):
        report["errors"].append("interior level with a non-zero coordinate-loop index")
    if cls == ImageClass.NONTRIVIAL_MASLOV and not any(indices):
        report["errors"].append("range-crossing level with trivial Maslov class")
    report["success"] = not report["errors"]
    logger.info("torus report: %s, indices %s", cls.value, indices)
    return report


def image_report(metrics: ModelMetricPair, polynomials: Sequence[FirstIntegralPolynomial]) -> Dict:
    rows = []
    for q in polynomials:
        rows.append({"leading": q.leading, "roots": list(q.roots), "classification": image_membership(metrics, q).value})
    return {
        "success": True,
        "lo": list(metrics.eig.lo),
        "hi": list(metrics.eig.hi),
        "table": rows,
        "errors": [],
    }
