"""Structural invariants of finite-dimensional real Lie algebras given by structure constants.

An algebra is a `StructureConstants` table over a fixed basis e_0..e_{m-1}:
``table[i][j]`` holds the coordinates of [e_i, e_j]. The invariants computed
here (derived series, Killing inertia, the eigenvalue triple of a
five-dimensional graded algebra) are the ones used to tell the computed
algebras apart; none of them claims an isomorphism.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import DEFAULT_TOL, TRIPLE_TOL
from .errors import ClosureViolation, InputError, NotApplicable
from .numeric_kernel import (
    EXACT,
    NUMERIC,
    Matrix,
    Scalar,
    Vector,
    as_vector,
    char_poly_and_eigs,
    data_scale,
    format_scalar,
    row_basis,
)

if TYPE_CHECKING:
    from .hol_solver import GradedLieAlgebra


logger = logging.getLogger(__name__)

# Jacobi and antisymmetry residuals allowed for numeric tables, relative to the largest constant
NUMERIC_CLOSURE_TOL = 1e-6


def _zero(mode: str) -> Scalar:
    return Fraction(0) if mode == EXACT else 0.0


@dataclass(frozen=True)
class StructureConstants:
    dim: int
    table: Tuple[Tuple[Vector, ...], ...]
    mode: str = EXACT
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if len(self.table) != self.dim or any(len(row) != self.dim for row in self.table):
            raise InputError("structure table must be dim x dim", module="lie_analysis")
        if any(len(c) != self.dim for row in self.table for c in row):
            raise InputError("structure constants must have dim coordinates", module="lie_analysis")
        table = tuple(tuple(as_vector(c, self.mode) for c in row) for row in self.table)
        object.__setattr__(self, "table", table)
        limit = self.closure_tolerance
        for i in range(self.dim):
            for j in range(i, self.dim):
                worst = max((abs(float(a + b)) for a, b in zip(table[i][j], table[j][i])), default=0.0)
                if worst > limit:
                    raise ClosureViolation(f"[e_{i}, e_{j}] + [e_{j}, e_{i}] != 0", module="lie_analysis")
        residual = self.jacobi_residual()
        if residual > limit:
            raise ClosureViolation(f"Jacobi identity fails (residual {residual:.3g})", module="lie_analysis")

    @classmethod
    def from_array(cls, array: Any, mode: str = NUMERIC, tol: float = DEFAULT_TOL) -> "StructureConstants":
        """Build from c[i][j][k] = k-th coordinate of [e_i, e_j]."""
        arr = array if mode == EXACT else np.asarray(array, dtype=np.float64)
        dim = len(arr)
        return cls(dim, tuple(tuple(tuple(arr[i][j]) for j in range(dim)) for i in range(dim)), mode, tol)

    @property
    def closure_tolerance(self) -> float:
        if self.mode == EXACT:
            return 0.0
        return max(self.tol, NUMERIC_CLOSURE_TOL) * data_scale(*self.table)

    def bracket(self, u: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
        out = [_zero(self.mode)] * self.dim
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, vj in enumerate(v):
                if not vj:
                    continue
                c = ui * vj
                for k, t in enumerate(self.table[i][j]):
                    if t:
                        out[k] += c * t
        return tuple(out)

    def ad(self, x: Sequence[Scalar]) -> Matrix:
        """Matrix of ad(x); column j holds [x, e_j]."""
        columns = [self.bracket(x, self.basis_vector(j)) for j in range(self.dim)]
        return Matrix.build([[columns[j][i] for j in range(self.dim)] for i in range(self.dim)], self.mode, self.dim)

    def ad_basis(self, i: int) -> Matrix:
        return Matrix.build([[self.table[i][j][k] for j in range(self.dim)] for k in range(self.dim)], self.mode, self.dim)

    def basis_vector(self, i: int) -> Vector:
        return as_vector([1 if k == i else 0 for k in range(self.dim)], self.mode)

    def jacobi_residual(self) -> float:
        worst = 0.0
        for i, j, k in combinations(range(self.dim), 3):
            ei, ej, ek = self.basis_vector(i), self.basis_vector(j), self.basis_vector(k)
            total = [
                a + b + c
                for a, b, c in zip(
                    self.bracket(self.table[i][j], ek),
                    self.bracket(self.table[j][k], ei),
                    self.bracket(self.table[k][i], ej),
                )
            ]
            worst = max([worst] + [abs(float(t)) for t in total])
        return worst

    def to_dict(self) -> Dict[str, Any]:
        nonzero = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                coords = self.table[i][j]
                if any(coords):
                    nonzero.append({"i": i, "j": j, "coords": [format_scalar(x) for x in coords]})
        return {"dim": self.dim, "mode": self.mode, "brackets": nonzero}


@dataclass(frozen=True)
class DerivedSeries:
    dims: Tuple[int, ...]

    @property
    def solvable(self) -> bool:
        return self.dims[-1] == 0

    @property
    def commutator_dim(self) -> int:
        return self.dims[1] if len(self.dims) > 1 else self.dims[0]

    def to_dict(self) -> Dict[str, Any]:
        return {"dims": list(self.dims), "solvable": self.solvable}


def derived_series(L: StructureConstants) -> DerivedSeries:
    """dims of L, [L, L], [[L, L], [L, L]], ... until the dimension stops changing or hits 0."""
    current: List[Vector] = [L.basis_vector(i) for i in range(L.dim)]
    dims = [L.dim]
    while current:
        brackets = [L.bracket(u, v) for i, u in enumerate(current) for v in current[i + 1:]]
        if not brackets:
            nxt: List[Vector] = []
        else:
            atol = L.closure_tolerance
            nxt = [tuple(r) for r in row_basis(Matrix.build(brackets, L.mode, L.dim), L.tol, atol).entries]
        dims.append(len(nxt))
        if len(nxt) == len(current):
            break
        current = nxt
    logger.debug("derived series dims %s", dims)
    return DerivedSeries(tuple(dims))


def killing_form(L: StructureConstants) -> Matrix:
    ads = [L.ad_basis(i) for i in range(L.dim)]
    return Matrix.build([[(ads[i] @ ads[j]).trace() for j in range(L.dim)] for i in range(L.dim)], L.mode, L.dim)


@dataclass(frozen=True)
class KillingInertia:
    plus: int
    minus: int
    zero: int

    @property
    def nondegenerate(self) -> bool:
        return self.zero == 0

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.plus, self.minus, self.zero)

    def to_dict(self) -> Dict[str, Any]:
        return {"plus": self.plus, "minus": self.minus, "zero": self.zero}


def _exact_inertia(form: Matrix) -> KillingInertia:
    """Inertia of a rational symmetric matrix by congruence (symmetric Gaussian elimination)."""
    s = [list(row) for row in form.entries]
    plus = minus = 0
    while s:
        size = len(s)
        pivot = next((i for i in range(size) if s[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in range(size) for j in range(i + 1, size) if s[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            # row_i += row_j, col_i += col_j makes s[i][i] = 2 s[i][j] != 0
            for c in range(size):
                s[i][c] += s[j][c]
            for r in range(size):
                s[r][i] += s[r][j]
            continue
        d = s[pivot][pivot]
        if d > 0:
            plus += 1
        else:
            minus += 1
        rest = [r for r in range(size) if r != pivot]
        s = [[s[r][c] - s[r][pivot] * s[pivot][c] / d for c in rest] for r in rest]
    return KillingInertia(plus, minus, form.rows - plus - minus)


def killing_signature(L: StructureConstants) -> KillingInertia:
    form = killing_form(L)
    if L.mode == EXACT:
        return _exact_inertia(form)
    eigs = np.linalg.eigvalsh(form.to_numpy()) if L.dim else np.zeros(0)
    cut = max(L.tol, NUMERIC_CLOSURE_TOL) * max(1.0, float(np.abs(eigs).max(initial=0.0)))
    return KillingInertia(int(np.sum(eigs > cut)), int(np.sum(eigs < -cut)), int(np.sum(np.abs(eigs) <= cut)))


def so_pq_structure_constants(p: int, q: int) -> StructureConstants:
    """so(p, q) = {X : X^T J + J X = 0}, J = diag(1_p, -1_q), on the basis X_ij = J (E_ij - E_ji), i < j."""
    n = p + q
    if p < 0 or q < 0 or n < 2:
        raise InputError("so(p, q) needs p, q >= 0 and p + q >= 2", module="lie_analysis")
    signs = [1] * p + [-1] * q
    pairs = list(combinations(range(n), 2))

    def element(i: int, j: int) -> Matrix:
        rows = [[0] * n for _ in range(n)]
        rows[i][j] = signs[i]
        rows[j][i] = -signs[j]
        return Matrix.exact(rows, n)

    def coords(x: Matrix) -> Vector:
        # J X is antisymmetric and (J X)_ij is the coefficient of X_ij
        return tuple(signs[i] * x.entries[i][j] for i, j in pairs)

    basis = [element(i, j) for i, j in pairs]
    table = tuple(tuple(coords((a @ b) - (b @ a)) for b in basis) for a in basis)
    return StructureConstants(len(basis), table, EXACT)


@dataclass(frozen=True)
class CanonicalTriple:
    """Eigenvalue triple modulo lambda -> r lambda + s (r real nonzero, s real).

    Normal form: mean 0, largest modulus 1 (or all zero), sorted by (Re, Im).
    The sign of r is fixed by Re(l1 l2 l3) > 0; when that product vanishes the
    lexicographically smaller of the two sorted tuples is kept.
    """

    values: Tuple[complex, complex, complex]

    def key(self) -> Tuple[Tuple[float, float], ...]:
        return tuple((round(z.real, 9), round(z.imag, 9)) for z in self.values)

    def close_to(self, other: "CanonicalTriple", tol: float = TRIPLE_TOL) -> bool:
        return all(abs(a.real - b.real) <= tol and abs(a.imag - b.imag) <= tol for a, b in zip(self.values, other.values))

    @property
    def real(self) -> bool:
        return all(abs(z.imag) <= TRIPLE_TOL for z in self.values)

    def to_dict(self) -> Dict[str, Any]:
        return {"values": [[z.real, z.imag] for z in self.values], "real": self.real}


def _clean(z: complex) -> complex:
    re = 0.0 if abs(z.real) < 1e-12 else z.real
    im = 0.0 if abs(z.imag) < 1e-12 else z.imag
    return complex(re, im)


def _sorted_triple(z: Sequence[complex]) -> Tuple[complex, ...]:
    return tuple(sorted((_clean(complex(w)) for w in z), key=lambda w: (round(w.real, 9), round(w.imag, 9))))


def canonical_triple(values: Sequence[complex], tol: float = 1e-9) -> CanonicalTriple:
    if len(values) != 3:
        raise InputError("canonical triple needs exactly three values", module="lie_analysis")
    z = np.asarray([complex(v) for v in values], dtype=np.complex128)
    z = z - z.mean()
    m = float(np.abs(z).max())
    if m <= tol * max(1.0, float(np.abs(np.asarray(values, dtype=np.complex128)).max())):
        return CanonicalTriple((0j, 0j, 0j))
    z = z / m
    prod = complex(np.prod(z)).real
    if prod < -tol:
        z = -z
    elif abs(prod) <= tol:
        first, second = _sorted_triple(z), _sorted_triple(-z)
        key = lambda t: [(round(w.real, 9), round(w.imag, 9)) for w in t]  # noqa: E731
        z = np.asarray(first if key(first) <= key(second) else second)
    out = _sorted_triple(z)
    return CanonicalTriple((out[0], out[1], out[2]))


def sigma_invariant(G: "GradedLieAlgebra", xi: Optional[Sequence[Scalar]] = None) -> CanonicalTriple:
    """Canonical eigenvalue triple of ad(xi) on g_{-1} for a graded algebra with dims (3, 2).

    `xi` defaults to the g_0 basis element after the Euler field; any element
    with a nonzero component off the Euler field in g_0 gives the same triple.
    """
    if G.n != 3 or G.graded_dims != {-1: 3, 0: 2}:
        raise NotApplicable(f"sigma needs n = 3 and graded dims (3, 2), got {G.graded_dims}")
    L = G.structure
    minus = list(G.block(-1))
    if xi is None:
        zero_block = list(G.block(0))
        other = next(i for i in zero_block if i != G.euler_index)
        xi = L.basis_vector(other)
    ad = L.ad(as_vector(xi, L.mode))
    block = Matrix.build([[ad.entries[i][j] for j in minus] for i in minus], L.mode, len(minus))
    _, eigs = char_poly_and_eigs(block)
    logger.debug("ad(xi) on g_-1: eigenvalues %s", eigs)
    return canonical_triple(eigs)


@dataclass(frozen=True)
class InvariantReport:
    dim: int
    derived: DerivedSeries
    killing: KillingInertia
    graded_dims: Optional[Dict[int, int]] = None
    sigma: Optional[CanonicalTriple] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def solvable(self) -> bool:
        return self.derived.solvable

    @property
    def commutator_dim(self) -> int:
        return self.derived.commutator_dim

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "dim": self.dim,
            "derived_dims": list(self.derived.dims),
            "solvable": self.solvable,
            "killing": self.killing.to_dict(),
            "graded_dims": None if self.graded_dims is None else {str(k): v for k, v in sorted(self.graded_dims.items())},
            "sigma": None if self.sigma is None else self.sigma.to_dict()["values"],
        }
        out.update(self.extras)
        return out


def analyze_structure(L: StructureConstants, G: Optional["GradedLieAlgebra"] = None) -> InvariantReport:
    sigma = None
    graded = None
    if G is not None:
        graded = dict(G.graded_dims)
        try:
            sigma = sigma_invariant(G)
        except NotApplicable:
            logger.debug("sigma invariant not applicable for graded dims %s", graded)
    return InvariantReport(L.dim, derived_series(L), killing_signature(L), graded, sigma)


def analyze(G: "GradedLieAlgebra") -> InvariantReport:
    return analyze_structure(G.structure, G)


@dataclass(frozen=True)
class ComparisonVerdict:
    distinct: bool
    reasons: Tuple[str, ...] = ()

    @property
    def verdict(self) -> str:
        return "distinct" if self.distinct else "indistinguishable_by_suite"

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": self.verdict, "reasons": list(self.reasons)}


def compare_algebras(r1: InvariantReport, r2: InvariantReport, tol: float = TRIPLE_TOL) -> ComparisonVerdict:
    """Every invariant on which the two reports differ; never claims an isomorphism."""
    reasons: List[str] = []
    if r1.dim != r2.dim:
        reasons.append("dimension")
    if r1.derived.dims != r2.derived.dims:
        reasons.append("derived_series")
    if r1.killing.as_tuple() != r2.killing.as_tuple():
        reasons.append("killing")
    if r1.graded_dims is not None and r2.graded_dims is not None and r1.graded_dims != r2.graded_dims:
        reasons.append("graded_dims")
    if r1.sigma is not None and r2.sigma is not None and not r1.sigma.close_to(r2.sigma, tol):
        reasons.append("sigma")
    return ComparisonVerdict(bool(reasons), tuple(reasons))
