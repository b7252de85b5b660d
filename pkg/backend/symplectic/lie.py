"""
Matrix Lie algebras u(n), su(n) and their products.

The dual is identified with the algebra through the Ad-invariant pairing
<A, B> = -Re tr(AB). Gradients, Lie-Poisson brackets and Casimirs are all
taken with respect to that pairing.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space

from . import poisson
from .config import tolerances
from .errors import DimensionMismatchError, FlowDivergenceError, InputError

logger = logging.getLogger(__name__)

FLAVORS = ("u", "su")
CASIMIR_KINDS = ("trace-square", "trace-cube", "trace-k", "determinant", "linear-trace")

Blocks = Tuple[np.ndarray, ...]


@dataclass(frozen=True)
class LieAlgebraElement:
    entries: np.ndarray
    flavor: str = "u"

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"expected a square matrix, got shape {entries.shape}")
        if self.flavor not in FLAVORS:
            raise InputError(f"unknown flavor {self.flavor!r}")
        atol = tolerances().unitary_atol
        if np.max(np.abs(entries + entries.conj().T), initial=0.0) > atol:
            raise InputError("entries are not skew-Hermitian")
        if self.flavor == "su" and abs(np.trace(entries)) > atol:
            raise InputError("su(n) element must be trace-free")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def blocks(self) -> Blocks:
        return (self.entries,)

    @property
    def structure(self) -> Tuple[Tuple[int, str], ...]:
        return ((self.n, self.flavor),)


@dataclass(frozen=True)
class ProductAlgebraElement:
    plus: LieAlgebraElement
    minus: LieAlgebraElement

    @property
    def blocks(self) -> Blocks:
        return (self.plus.entries, self.minus.entries)

    @property
    def structure(self) -> Tuple[Tuple[int, str], ...]:
        return self.plus.structure + self.minus.structure


AlgebraPoint = Union[LieAlgebraElement, ProductAlgebraElement]


def blocks_of(x) -> Blocks:
    if isinstance(x, (LieAlgebraElement, ProductAlgebraElement)):
        return x.blocks
    if isinstance(x, np.ndarray):
        return (x,)
    return tuple(np.asarray(b, dtype=complex) for b in x)


def project(entries: np.ndarray, flavor: str) -> np.ndarray:
    """Orthogonal projection of a square matrix onto u(n) or su(n)"""
    skew = 0.5 * (entries - entries.conj().T)
    if flavor == "su":
        n = skew.shape[0]
        skew = skew - np.trace(skew) / n * np.eye(n)
    return skew


def _as_element(blocks: Blocks, structure) -> AlgebraPoint:
    elements = [LieAlgebraElement(project(b, flavor), flavor) for b, (_, flavor) in zip(blocks, structure)]
    if len(elements) == 1:
        return elements[0]
    return ProductAlgebraElement(*elements)


@lru_cache(maxsize=None)
def _block_basis(n: int, flavor: str) -> Tuple[np.ndarray, ...]:
    basis: List[np.ndarray] = []
    if flavor == "u":
        for k in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[k, k] = 1j
            basis.append(e)
    else:
        for v in null_space(np.ones((1, n))).T:
            basis.append(np.diag(1j * v).astype(complex))
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[j, k], e[k, j] = 1.0, -1.0
            basis.append(e / np.sqrt(2))
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = e[k, j] = 1j
            basis.append(e / np.sqrt(2))
    return tuple(basis)


class LieAlgebra:
    """Direct sum of u(n)/su(n) blocks with an orthonormal real basis"""

    def __init__(self, structure: Sequence[Tuple[int, str]]):
        self.structure = tuple((int(n), str(f)) for n, f in structure)
        for n, flavor in self.structure:
            if flavor not in FLAVORS or n < 1:
                raise InputError(f"unsupported block {(n, flavor)}")
        self._basis: List[Blocks] = []
        for idx, (n, flavor) in enumerate(self.structure):
            for e in _block_basis(n, flavor):
                blocks = [np.zeros((m, m), dtype=complex) for m, _ in self.structure]
                blocks[idx] = e
                self._basis.append(tuple(blocks))

    @classmethod
    def of(cls, x) -> "LieAlgebra":
        if isinstance(x, (LieAlgebraElement, ProductAlgebraElement)):
            return cls(x.structure)
        return cls([(b.shape[0], "u") for b in blocks_of(x)])

    @property
    def dim(self) -> int:
        return len(self._basis)

    @property
    def rank(self) -> int:
        return sum(n if flavor == "u" else n - 1 for n, flavor in self.structure)

    @property
    def basis(self) -> List[Blocks]:
        return self._basis

    def coords(self, x) -> np.ndarray:
        blocks = blocks_of(x)
        return np.array([sum(_pair(a, b) for a, b in zip(e, blocks)) for e in self._basis])

    def blocks_from(self, v) -> Blocks:
        out = [np.zeros((n, n), dtype=complex) for n, _ in self.structure]
        for c, e in zip(v, self._basis):
            for i, b in enumerate(e):
                out[i] = out[i] + c * b
        return tuple(out)

    def element(self, v) -> AlgebraPoint:
        return _as_element(self.blocks_from(v), self.structure)

    def random(self, rng: np.random.Generator) -> AlgebraPoint:
        return self.element(rng.standard_normal(self.dim))

    def random_group_element(self, rng: np.random.Generator) -> Blocks:
        return tuple(random_unitary(n, rng, special=(flavor == "su")) for n, flavor in self.structure)

    def ad_matrix(self, a) -> np.ndarray:
        """Matrix of ad_a = [a, .] in the orthonormal basis"""
        a = blocks_of(a)
        cols = [self.coords(tuple(x @ e - e @ x for x, e in zip(a, basis_el))) for basis_el in self._basis]
        return np.array(cols).T

    def stabilizer_dimension(self, a) -> int:
        # a central a gives an ad matrix of pure rounding noise
        return self.dim - poisson.numerical_rank(self.ad_matrix(a), scale=2 * np.sqrt(pairing(a, a)))


def _pair(a: np.ndarray, b: np.ndarray) -> float:
    return float(-np.real(np.trace(a @ b)))


def pairing(A, B) -> float:
    """-Re tr(AB), summed over blocks"""
    a, b = blocks_of(A), blocks_of(B)
    if len(a) != len(b) or any(x.shape != y.shape for x, y in zip(a, b)):
        raise DimensionMismatchError("pairing of elements of different algebras")
    if isinstance(A, LieAlgebraElement) and isinstance(B, LieAlgebraElement) and A.flavor != B.flavor:
        raise DimensionMismatchError(f"pairing of {A.flavor}({A.n}) with {B.flavor}({B.n})")
    return sum(_pair(x, y) for x, y in zip(a, b))


def commutator(A, B) -> Blocks:
    return tuple(x @ y - y @ x for x, y in zip(blocks_of(A), blocks_of(B)))


def adjoint_action(u: Blocks, x) -> Blocks:
    """Ad_u x = u x u*, blockwise"""
    return tuple(g @ b @ g.conj().T for g, b in zip(u, blocks_of(x)))


def random_unitary(n: int, rng: np.random.Generator, special: bool = False) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    if special:
        q = q / np.linalg.det(q) ** (1.0 / n)
    return q


@dataclass(frozen=True)
class AlgebraField:
    """Scalar function on the (dual) algebra with an optional analytic gradient"""

    fn: Callable[[Blocks], float]
    grad: Optional[Callable[[Blocks], Blocks]] = None
    name: str = ""

    def __call__(self, x) -> float:
        return float(self.fn(blocks_of(x)))


def linear_form(a) -> AlgebraField:
    """x -> <a, x>"""
    a_blocks = blocks_of(a)
    return AlgebraField(
        lambda x: sum(_pair(p, q) for p, q in zip(a_blocks, x)),
        lambda x: a_blocks,
        "linear",
    )


def field_gradient(f, x, algebra: Optional[LieAlgebra] = None) -> Blocks:
    """Gradient of f at x with respect to the pairing, projected into the algebra"""
    algebra = algebra or LieAlgebra.of(x)
    blocks = blocks_of(x)
    grad = getattr(f, "grad", None)
    if grad is not None:
        g = tuple(project(b, flavor) for b, (_, flavor) in zip(grad(blocks), algebra.structure))
        if not all(np.all(np.isfinite(b)) for b in g):
            raise FlowDivergenceError(f"non-finite gradient of {getattr(f, 'name', '') or '<anon>'}")
        return g
    v0 = algebra.coords(blocks)
    shift = tuple(b - e for b, e in zip(blocks, algebra.blocks_from(v0)))

    def in_coords(v):
        return f(tuple(s + e for s, e in zip(shift, algebra.blocks_from(v))))

    return algebra.blocks_from(poisson.gradient(in_coords, v0))


def lie_poisson_bracket(f, g, x) -> float:
    """<x, [grad f(x), grad g(x)]>"""
    algebra = LieAlgebra.of(x)
    df = field_gradient(f, x, algebra)
    dg = field_gradient(g, x, algebra)
    value = sum(_pair(b, c) for b, c in zip(blocks_of(x), commutator(df, dg)))
    if not np.isfinite(value):
        raise FlowDivergenceError("non-finite Lie-Poisson bracket")
    return value


@dataclass(frozen=True)
class CasimirSpec:
    kind: str
    power: int = 2
    block: Optional[int] = None

    def __post_init__(self):
        if self.kind not in CASIMIR_KINDS:
            raise InputError(f"unknown Casimir kind {self.kind!r}")
        if self.kind == "trace-cube":
            object.__setattr__(self, "power", 3)
        if self.kind == "trace-k" and self.power < 1:
            raise InputError("trace-k needs a positive power")

    @property
    def label(self) -> str:
        suffix = "" if self.block is None else f"[{self.block}]"
        if self.kind == "trace-k":
            return f"trace-{self.power}{suffix}"
        return f"{self.kind}{suffix}"


def _block_indices(spec: CasimirSpec, blocks: Blocks) -> range:
    if spec.block is None:
        return range(len(blocks))
    if not 0 <= spec.block < len(blocks):
        raise DimensionMismatchError(f"Casimir block {spec.block} out of range")
    return range(spec.block, spec.block + 1)


def _casimir_block_value(spec: CasimirSpec, x: np.ndarray) -> float:
    n = x.shape[0]
    if spec.kind == "trace-square":
        return 0.5 * float(np.real(np.trace(x @ x)))
    if spec.kind in ("trace-cube", "trace-k"):
        h = -1j * x
        return float(np.real(np.trace(np.linalg.matrix_power(h, spec.power))))
    if spec.kind == "determinant":
        return float(np.real((-1j) ** n * np.linalg.det(x)))
    return float(np.real(-1j * np.trace(x)))


def casimir_value(spec: CasimirSpec, x) -> float:
    blocks = blocks_of(x)
    return sum(_casimir_block_value(spec, blocks[i]) for i in _block_indices(spec, blocks))


def casimir_gradient(spec: CasimirSpec, x) -> Blocks:
    """Analytic gradient where available, finite differences for the determinant"""
    blocks = blocks_of(x)
    if spec.kind == "determinant":
        return field_gradient(AlgebraField(lambda b: casimir_value(spec, b)), x)
    out = [np.zeros_like(b) for b in blocks]
    for i in _block_indices(spec, blocks):
        b = blocks[i]
        n = b.shape[0]
        if spec.kind == "trace-square":
            out[i] = -b
        elif spec.kind == "linear-trace":
            out[i] = 1j * np.eye(n)
        else:
            h = -1j * b
            out[i] = 1j * spec.power * np.linalg.matrix_power(h, spec.power - 1)
    return tuple(out)


def casimir_field(spec: CasimirSpec) -> AlgebraField:
    grad = None if spec.kind == "determinant" else (lambda b: casimir_gradient(spec, b))
    return AlgebraField(lambda b: casimir_value(spec, b), grad, spec.label)


@dataclass(frozen=True)
class ShiftFamilyMember:
    casimir: CasimirSpec
    lam: float
    a: AlgebraPoint

    @property
    def name(self) -> str:
        return f"{self.casimir.label}(x+{self.lam:g}a)"

    def _shifted(self, x) -> Blocks:
        return tuple(b + self.lam * s for b, s in zip(blocks_of(x), blocks_of(self.a)))

    def __call__(self, x) -> float:
        return casimir_value(self.casimir, self._shifted(x))

    def fn(self, x) -> float:
        return self(x)

    @property
    def grad(self):
        if self.casimir.kind == "determinant":
            return None
        return lambda x: casimir_gradient(self.casimir, self._shifted(x))


@dataclass
class ShiftFamily:
    members: List[ShiftFamilyMember]
    regular: bool

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, i):
        return self.members[i]


def is_regular(a) -> bool:
    algebra = LieAlgebra.of(a)
    return algebra.stabilizer_dimension(a) == algebra.rank


def stabilizer_dimension(a) -> int:
    return LieAlgebra.of(a).stabilizer_dimension(a)


def mf_shift_family(casimirs: Sequence[CasimirSpec], a, lambdas: Sequence[float]) -> ShiftFamily:
    """Argument-shift family x -> g(x + lam a) for every Casimir g and shift lam"""
    regular = is_regular(a)
    if not regular:
        logger.warning(
            "shift direction is not regular (stabilizer dimension %d); the family still commutes "
            "but need not be complete",
            stabilizer_dimension(a),
        )
    members = [ShiftFamilyMember(c, float(lam), a) for c in casimirs for lam in lambdas]
    return ShiftFamily(members=members, regular=regular)


def differential_dimension(family: Sequence, x) -> int:
    """Rank of the gradients of the family at x"""
    if len(family) == 0:
        return 0
    algebra = LieAlgebra.of(x)
    rows = np.array([algebra.coords(field_gradient(f, x, algebra)) for f in family])
    return poisson.numerical_rank(rows)


def _centre(family: Sequence, x, rng: np.random.Generator, probes: int = 3) -> List:
    algebra = LieAlgebra.of(x)
    atol = tolerances().involution_atol
    base = blocks_of(x)
    points = [base] + [
        tuple(b + 0.1 * d for b, d in zip(base, blocks_of(algebra.random(rng)))) for _ in range(probes)
    ]
    central = []
    for f in family:
        if all(abs(lie_poisson_bracket(f, g, p)) < atol for g in family for p in points):
            central.append(f)
    return central


def differential_rank(family: Sequence, x, seed: int = 0) -> int:
    """Dimension of the span of the Hamiltonian fields [x, grad f] of the centre of the family"""
    if len(family) == 0:
        return 0
    algebra = LieAlgebra.of(x)
    centre = _centre(family, x, np.random.default_rng(seed))
    if not centre:
        return 0
    gradients = [field_gradient(f, x, algebra) for f in centre]
    rows = np.array([algebra.coords(commutator(x, grad)) for grad in gradients])
    # fields commuting with x leave only rounding noise in their rows
    scale = 2 * np.sqrt(pairing(x, x) * max(pairing(grad, grad) for grad in gradients))
    return poisson.numerical_rank(rows, scale=scale)


def default_shift(n: int = 3) -> LieAlgebraElement:
    """diag(i, 2i, ..., -(n(n-1)/2) i) normalised to unit length"""
    d = np.arange(1, n, dtype=float)
    d = np.append(d, -d.sum())
    a = np.diag(1j * d)
    return LieAlgebraElement(a / np.sqrt(pairing(a, a)), "su")
