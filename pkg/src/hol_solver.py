"""Graded components g_k of hol(M, a) for tubes M = F + iR^n over cones F, and the algebra they span.

Every element of g_k is f = i^(k mod 2) q(z, ..., z) d/dz with q a real symmetric
(k+1)-linear map. Writing A_I for the matrix (q(e_I, e_j))_{p, j}, tangency of f
along M reduces to A_I in L for every multi-index I of length k, where

    L = {A in gl(n) : A x in T_xF for every x in F}.

So g_0 = L and g_k is the k-th prolongation of L. The backends differ only in
how they produce linear conditions C vec(A) = 0 cutting out L.
"""
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from sympy import QQ, RR
from sympy.polys.rings import PolyElement, ring

from .config import (
    BACKENDS,
    DEFAULT_BACKEND,
    DEFAULT_MAX_DEGREE,
    DEFAULT_SEED,
    DEFAULT_TOL,
    JET_ORDER_CAP,
    JET_START_OFFSET,
    JET_STEP,
    JET_VERIFY_POINTS,
    JET_VERIFY_SCALE,
    JET_VERIFY_TOL,
    OVERDETERMINATION,
)
from .errors import BackendError, ClosureViolation, InputError, RefusedInput, UndecidedError
from .lie_analysis import NUMERIC_CLOSURE_TOL, StructureConstants
from .numeric_kernel import (
    EXACT,
    NUMERIC,
    Matrix,
    Scalar,
    Vector,
    as_vector,
    coordinates,
    data_scale,
    format_scalar,
    in_span,
    independent_subset,
    nullspace,
    rank,
    row_basis,
)
from .presentations import (
    AffineField,
    LevelSetPresentation,
    OrbitPresentation,
    Presentation,
    is_conical,
    minimality_report,
    point_mode,
    sample_points,
    sample_surface_points,
)
from .nondegeneracy import nondegeneracy_order


logger = logging.getLogger(__name__)

FieldKey = Tuple[int, Tuple[int, ...]]
CoefficientKey = Tuple[str, int, Tuple[int, ...]]


@lru_cache(maxsize=None)
def field_keys(n: int, degree: int) -> Tuple[FieldKey, ...]:
    """Unknowns of level `degree`: component p and a sorted multi-index of length degree + 1."""
    return tuple((p, m) for p in range(n) for m in combinations_with_replacement(range(n), degree + 1))


@lru_cache(maxsize=None)
def _key_index(n: int, degree: int) -> Dict[FieldKey, int]:
    return {key: i for i, key in enumerate(field_keys(n, degree))}


def multiplicity(m: Sequence[int]) -> int:
    """Number of orderings of the multi-index m."""
    return math.factorial(len(m)) // math.prod(math.factorial(c) for c in Counter(m).values())


def exponents(m: Sequence[int], n: int) -> Tuple[int, ...]:
    counts = Counter(m)
    return tuple(counts.get(i, 0) for i in range(n))


@lru_cache(maxsize=None)
def _field_ring(n: int, mode: str) -> Tuple[Any, Tuple[PolyElement, ...]]:
    names = ",".join(f"z{i + 1}" for i in range(n))
    R, *Z = ring(names, QQ if mode == EXACT else RR)
    return R, tuple(Z)


def _domain_value(c: Scalar, mode: str) -> Any:
    if mode == EXACT:
        frac = Fraction(c)
        return QQ(frac.numerator, frac.denominator)
    return RR(float(c))


def _scalar_of(c: Any, mode: str) -> Scalar:
    if mode == EXACT:
        return Fraction(int(c.numerator), int(c.denominator))
    return float(c)


@dataclass(frozen=True, eq=False)
class VectorField:
    """Holomorphic polynomial field unit * sum_p P_p(z) d/dz_p with real P_p and unit i when `imaginary`."""

    imaginary: bool
    components: Tuple[PolyElement, ...]
    mode: str = EXACT

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def from_affine(cls, g: AffineField, imaginary: bool = False) -> "VectorField":
        R, Z = _field_ring(g.n, g.mode)
        comps = []
        for p in range(g.n):
            poly = R(_domain_value(g.constant[p], g.mode))
            for j in range(g.n):
                if g.linear.entries[p][j]:
                    poly += _domain_value(g.linear.entries[p][j], g.mode) * Z[j]
            comps.append(poly)
        return cls(imaginary, tuple(comps), g.mode)

    @classmethod
    def constant(cls, v: Sequence[Scalar], imaginary: bool = True, mode: str = EXACT) -> "VectorField":
        R, _ = _field_ring(len(v), mode)
        return cls(imaginary, tuple(R(_domain_value(x, mode)) for x in v), mode)

    def bracket(self, other: "VectorField") -> "VectorField":
        # [f d, g d] = (Dg f - Df g) d; the units multiply, i * i = -1
        _, Z = _field_ring(self.n, self.mode)
        out = []
        for r in range(self.n):
            term = sum((other.components[r].diff(Z[s]) * self.components[s] for s in range(self.n)), Z[0].ring.zero)
            term -= sum((self.components[r].diff(Z[s]) * other.components[s] for s in range(self.n)), Z[0].ring.zero)
            out.append(-term if (self.imaginary and other.imaginary) else term)
        return VectorField(self.imaginary != other.imaginary, tuple(out), self.mode)

    def coefficients(self, tol: float = 0.0) -> Dict[CoefficientKey, Scalar]:
        """Nonzero coefficients keyed by (re|im, component, exponent vector); numeric ones below tol dropped."""
        part = "im" if self.imaginary else "re"
        out: Dict[CoefficientKey, Scalar] = {}
        for p, poly in enumerate(self.components):
            for mon, c in poly.terms():
                value = _scalar_of(c, self.mode)
                if value == 0 or (self.mode == NUMERIC and abs(value) <= tol):
                    continue
                out[(part, p, tuple(int(e) for e in mon))] = value
        return out

    def degrees(self) -> List[int]:
        """Sorted homogeneous degrees (monomial degree minus one) present in the field."""
        return sorted({sum(key[2]) - 1 for key in self.coefficients()})

    def __call__(self, z: Sequence[complex]) -> NDArray[np.complex128]:
        unit = 1j if self.imaginary else 1.0
        vals = [sum(float(_scalar_of(c, self.mode)) * math.prod(complex(zi) ** e for zi, e in zip(z, mon)) for mon, c in poly.terms()) for poly in self.components]
        return unit * np.asarray(vals, dtype=np.complex128)


@dataclass(frozen=True)
class PolyField:
    """Element of g_k: i^(k mod 2) q(z, ..., z) d/dz, `coeffs` holding q over field_keys(n, degree)."""

    degree: int
    n: int
    coeffs: Vector
    mode: str = EXACT

    def __post_init__(self):
        if self.degree < -1:
            raise InputError("field degree must be at least -1", module="hol_solver")
        if len(self.coeffs) != len(field_keys(self.n, self.degree)):
            raise InputError("coefficient count does not match the level", module="hol_solver")
        object.__setattr__(self, "coeffs", as_vector(self.coeffs, self.mode))

    @property
    def imaginary(self) -> bool:
        return self.degree % 2 == 1

    @property
    def parity(self) -> str:
        return "i_real" if self.imaginary else "real"

    def tensor(self) -> Dict[FieldKey, Scalar]:
        return {key: c for key, c in zip(field_keys(self.n, self.degree), self.coeffs) if c}

    def polynomial(self) -> Dict[Tuple[int, Tuple[int, ...]], Scalar]:
        """Coefficients of q(z, ..., z) by (component, exponent vector)."""
        return {(p, exponents(m, self.n)): multiplicity(m) * c for (p, m), c in self.tensor().items()}

    def vector_field(self) -> VectorField:
        R, _ = _field_ring(self.n, self.mode)
        polys: Dict[int, Dict[Tuple[int, ...], Any]] = defaultdict(dict)
        for (p, exps), c in self.polynomial().items():
            polys[p][exps] = _domain_value(c, self.mode)
        return VectorField(self.imaginary, tuple(R.from_dict(polys[p]) if polys[p] else R.zero for p in range(self.n)), self.mode)

    def value_at_real(self, x: Sequence[Scalar]) -> Tuple[Vector, Vector]:
        """(Re f(x), Im f(x)) at a real point."""
        zero: Scalar = Fraction(0) if self.mode == EXACT and all(isinstance(v, Fraction) for v in x) else 0.0
        q = [zero] * self.n
        for (p, exps), c in self.polynomial().items():
            q[p] += c * math.prod(xi ** e for xi, e in zip(x, exps) if e)
        zeros = tuple(zero for _ in range(self.n))
        return (zeros, tuple(q)) if self.imaginary else (tuple(q), zeros)

    def evaluate(self, z: Sequence[complex]) -> NDArray[np.complex128]:
        return self.vector_field()(z)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "parity": self.parity,
            "terms": [{"component": p, "index": list(m), "coeff": format_scalar(c)} for (p, m), c in self.tensor().items()],
        }


def euler_field(n: int, mode: str = EXACT) -> PolyField:
    return PolyField(0, n, as_vector([1 if p == j else 0 for p, (j,) in field_keys(n, 0)], mode), mode)


# --- constraint backends ------------------------------------------------------

def resolve_backend(p: Presentation, backend: str = DEFAULT_BACKEND) -> str:
    if backend not in BACKENDS:
        raise InputError(f"unknown backend {backend!r}; choose from {', '.join(BACKENDS)}", module="hol_solver")
    if backend == "auto":
        if isinstance(p, LevelSetPresentation):
            return "exact-levelset"
        return "exact-jet" if p.mode == EXACT else "numeric"
    if backend == "exact-levelset" and not isinstance(p, LevelSetPresentation):
        raise BackendError("exact-levelset needs a level-set presentation")
    if backend == "exact-jet" and not (isinstance(p, OrbitPresentation) and p.mode == EXACT):
        raise BackendError("exact-jet needs an orbit presentation with rational generators and base point")
    return backend


def backend_mode(backend: str) -> str:
    return EXACT if backend.startswith("exact") else NUMERIC


def _dense_rows(rows: Sequence[Dict[int, Fraction]], width: int) -> List[List[Fraction]]:
    out = []
    for row in rows:
        dense = [Fraction(0)] * width
        for col, c in row.items():
            dense[col] = c
        if any(dense):
            out.append(dense)
    return out


def _levelset_constraints(p: LevelSetPresentation) -> Matrix:
    """grad h(x) . A x = sum_ij A_ij x_j dh/dx_i must reduce to 0 modulo h."""
    R, X, h = p.polynomial
    n = p.n
    by_monomial: Dict[Tuple[int, ...], Dict[int, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    for i in range(n):
        dh = h.diff(X[i])
        for j in range(n):
            remainder = (dh * X[j]).rem(h)
            for mon, c in remainder.terms():
                by_monomial[mon][i * n + j] += Fraction(int(c.numerator), int(c.denominator))
    rows = _dense_rows(list(by_monomial.values()), n * n)
    logger.debug("level-set backend: %d condition rows", len(rows))
    return row_basis(Matrix.exact(rows, n * n))


def _truncate(poly: PolyElement, order: int) -> PolyElement:
    return poly.ring.from_dict({m: c for m, c in poly.items() if sum(m) <= order})


def _truncated_det(m: Sequence[Sequence[PolyElement]], order: int) -> PolyElement:
    size = len(m)
    if size == 1:
        return _truncate(m[0][0], order)
    total = m[0][0].ring.zero
    for col in range(size):
        if not m[0][col]:
            continue
        minor = [row[:col] + row[col + 1:] for row in m[1:]]
        term = _truncate(m[0][col] * _truncated_det(minor, order), order)
        total += term if col % 2 == 0 else -term
    return total


def _jet_rows(p: OrbitPresentation, order: int) -> Matrix:
    """Coefficients up to total degree `order` of det[g_1(x(t)) .. g_r(x(t)) | A x(t)] over row subsets."""
    n = p.n
    idx = p.independent_generators
    r = len(idx)
    gens = [p.generators[i] for i in idx]
    R, *T = ring(",".join(f"t{j + 1}" for j in range(r)), QQ)

    def q(c: Scalar) -> Any:
        frac = Fraction(c)
        return QQ(frac.numerator, frac.denominator)

    # sum_j t_j g_j acting on (x, 1)
    flow = [[R.zero] * (n + 1) for _ in range(n + 1)]
    for t, g in zip(T, gens):
        for row in range(n):
            for col in range(n):
                if g.linear.entries[row][col]:
                    flow[row][col] += q(g.linear.entries[row][col]) * t
            if g.constant[row]:
                flow[row][n] += q(g.constant[row]) * t
    term = [R(q(c)) for c in p.base_point] + [R.one]
    x = list(term)
    for k in range(1, order + 1):
        term = [sum((flow[row][col] * term[col] for col in range(n + 1) if flow[row][col]), R.zero) * QQ(1, k) for row in range(n + 1)]
        x = [xi + ti for xi, ti in zip(x, term)]
    x = x[:n]
    frame = [
        [sum((q(g.linear.entries[row][col]) * x[col] for col in range(n) if g.linear.entries[row][col]), R(q(g.constant[row]))) for row in range(n)]
        for g in gens
    ]

    by_key: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Dict[int, Fraction]] = defaultdict(lambda: defaultdict(Fraction))
    for subset in combinations(range(n), r + 1):
        for pos, s in enumerate(subset):
            minor = [[frame[j][row] for j in range(r)] for row in subset if row != s]
            cofactor = _truncated_det(minor, order) if r else R.one
            if (pos + r) % 2:
                cofactor = -cofactor
            if not cofactor:
                continue
            for j in range(n):
                prod = _truncate(x[j] * cofactor, order)
                for mon, c in prod.terms():
                    by_key[(subset, mon)][s * n + j] += Fraction(int(c.numerator), int(c.denominator))
    rows = _dense_rows(list(by_key.values()), n * n)
    return row_basis(Matrix.exact(rows, n * n))


def _orbit_residual(p: OrbitPresentation, basis: Sequence[Vector], points: Sequence[Vector]) -> float:
    """Largest relative distance of A x from T_xF over the candidate matrices and points."""
    n = p.n
    worst = 0.0
    mats = [np.array([float(c) for c in v]).reshape(n, n) for v in basis]
    for x in points:
        xv = np.array(x, dtype=np.float64)
        values = np.array([g.as_mode(NUMERIC)(x) for g in p.generators], dtype=np.float64).T
        u, _, _ = np.linalg.svd(values)
        frame = u[:, : p.dimension]
        for a in mats:
            w = a @ xv
            resid = w - frame @ (frame.T @ w)
            scale = max(1.0, float(np.linalg.norm(a)) * float(np.linalg.norm(xv)))
            worst = max(worst, float(np.linalg.norm(resid)) / scale)
    return worst


def _jet_constraints(p: OrbitPresentation, start: int, seed: int) -> Matrix:
    n = p.n
    order = start
    previous: Optional[int] = None
    while order <= JET_ORDER_CAP:
        rows = _jet_rows(p, order)
        dim = n * n - rows.rows
        logger.debug("exact-jet: order %d leaves %d free directions", order, dim)
        if previous is not None and dim == previous:
            points = sample_points(p, JET_VERIFY_POINTS, seed + 1, scale=JET_VERIFY_SCALE)
            residual = _orbit_residual(p, nullspace(rows), points)
            if residual <= JET_VERIFY_TOL:
                return rows
            logger.debug("exact-jet: stabilized at order %d but sample residual %.3g", order, residual)
        previous = dim
        order += JET_STEP
    raise BackendError(f"jet truncation did not stabilize by order {JET_ORDER_CAP}")


def _normals(p: Presentation, x: Vector) -> List[NDArray[np.float64]]:
    if isinstance(p, LevelSetPresentation):
        grad = np.array([float(g) for g in p.gradient(x)])
        return [grad / np.linalg.norm(grad)]
    values = np.array([g.as_mode(NUMERIC)(x) for g in p.generators], dtype=np.float64).T
    u, _, _ = np.linalg.svd(values)
    return [u[:, k] for k in range(p.dimension, p.n)]


def _numeric_constraints(p: Presentation, tol: float, seed: int) -> Matrix:
    n = p.n
    codim = n - p.dimension
    if codim == 0:
        return Matrix.numeric(np.zeros((0, n * n)), n * n)
    count = math.ceil(OVERDETERMINATION * n * n / codim)
    points = [tuple(float(v) for v in p.base_point)] + sample_surface_points(p, count, seed)
    rows = []
    for x in points:
        xv = np.array(x, dtype=np.float64)
        for nu in _normals(p, x):
            row = np.outer(nu, xv).ravel()
            rows.append(row / np.linalg.norm(row))
    logger.debug("numeric backend: %d sampled rows for %d unknowns", len(rows), n * n)
    return row_basis(Matrix.numeric(np.array(rows), n * n), tol)


@lru_cache(maxsize=64)
def tangent_algebra_constraints(p: Presentation, backend: str, tol: float = DEFAULT_TOL, start: int = JET_START_OFFSET, seed: int = DEFAULT_SEED) -> Matrix:
    """Rows C with L = {A : C vec(A) = 0}, vec taken row by row."""
    if backend == "exact-levelset":
        assert isinstance(p, LevelSetPresentation)
        return _levelset_constraints(p)
    if backend == "exact-jet":
        assert isinstance(p, OrbitPresentation)
        return _jet_constraints(p, start, seed)
    return _numeric_constraints(p, tol, seed)


def _prolongation(constraints: Matrix, n: int, k: int) -> Matrix:
    """Conditions C vec(A_I) = 0 on the symmetric tensor, one block per multi-index I of length k."""
    index = _key_index(n, k)
    width = len(index)
    zero: Scalar = Fraction(0) if constraints.mode == EXACT else 0.0
    rows = []
    for I in combinations_with_replacement(range(n), k):
        for c in constraints.entries:
            row = [zero] * width
            for p in range(n):
                for j in range(n):
                    coef = c[p * n + j]
                    if coef:
                        row[index[(p, tuple(sorted(I + (j,))))]] += coef
            rows.append(row)
    return Matrix.build(rows, constraints.mode, width)


def solve_graded_component(
    p: Presentation,
    k: int,
    backend: str = DEFAULT_BACKEND,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> List[PolyField]:
    """Basis of g_k."""
    if k < -1:
        raise InputError("graded level must be at least -1", module="hol_solver")
    name = resolve_backend(p, backend)
    mode = backend_mode(name)
    n = p.n
    if k == -1:
        return [PolyField(-1, n, as_vector([1 if i == j else 0 for i in range(n)], mode), mode) for j in range(n)]
    start = JET_START_OFFSET + k if name == "exact-jet" else JET_START_OFFSET
    constraints = tangent_algebra_constraints(p, name, tol, start, seed)
    if not constraints.rows:
        system = Matrix.build([], mode, len(field_keys(n, k)))
    else:
        system = _prolongation(constraints, n, k)
    basis = nullspace(system, tol)
    logger.debug("g_%d via %s: dim %d", k, name, len(basis))
    return [PolyField(k, n, v, mode) for v in basis]


# --- the assembled algebra -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GradedLieAlgebra:
    n: int
    mode: str
    components: Tuple[Tuple[int, Tuple[PolyField, ...]], ...]
    structure: StructureConstants
    euler_index: int
    backend: str = ""
    evidence: Dict[str, Any] = field(default_factory=dict)

    @property
    def basis(self) -> Tuple[PolyField, ...]:
        return tuple(f for _, fields in self.components for f in fields)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(k for k, fields in self.components for _ in fields)

    @property
    def graded_dims(self) -> Dict[int, int]:
        return {k: len(fields) for k, fields in self.components}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def top_degree(self) -> int:
        return self.components[-1][0]

    def block(self, k: int) -> range:
        start = 0
        for degree, fields in self.components:
            if degree == k:
                return range(start, start + len(fields))
            start += len(fields)
        return range(start, start)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "mode": self.mode,
            "backend": self.backend,
            "dim": self.dim,
            "graded_dims": {str(k): v for k, v in self.graded_dims.items()},
            "euler_index": self.euler_index,
            "basis": {str(k): [f.to_dict() for f in fields] for k, fields in self.components},
            "structure": self.structure.to_dict(),
            "evidence": self.evidence,
        }


def _closure_tol(mode: str, tol: float) -> float:
    return 0.0 if mode == EXACT else max(tol, NUMERIC_CLOSURE_TOL)


def _euler_first(basis: List[PolyField], n: int, mode: str, tol: float) -> List[PolyField]:
    delta = euler_field(n, mode)
    vectors = [delta.coeffs] + [f.coeffs for f in basis]
    if not in_span(vectors[1:], delta.coeffs, mode, _closure_tol(mode, tol) or tol):
        raise RefusedInput("the Euler field is not in g_0; the presentation is not a cone")
    keep = independent_subset(vectors, mode, tol, _closure_tol(mode, tol))
    return [delta] + [basis[i - 1] for i in keep if i > 0]


def _expand(target: Dict[CoefficientKey, Scalar], basis_maps: Sequence[Dict[CoefficientKey, Scalar]], mode: str, tol: float) -> Optional[Vector]:
    keys = sorted(set(target).union(*basis_maps)) if basis_maps else sorted(target)
    zero: Scalar = Fraction(0) if mode == EXACT else 0.0
    columns = [[bm.get(key, zero) for key in keys] for bm in basis_maps]
    return coordinates(columns, [target.get(key, zero) for key in keys], mode, tol)


def structure_from_fields(fields: Sequence[VectorField], mode: str, tol: float = DEFAULT_TOL) -> StructureConstants:
    """Structure constants of the span of `fields`; raises ClosureViolation if a bracket leaves the span."""
    ctol = _closure_tol(mode, tol)
    maps = [f.coefficients(ctol) for f in fields]
    dim = len(fields)
    zero: Scalar = Fraction(0) if mode == EXACT else 0.0
    table: List[List[Vector]] = [[tuple([zero] * dim) for _ in range(dim)] for _ in range(dim)]
    for a in range(dim):
        for b in range(a + 1, dim):
            target = fields[a].bracket(fields[b]).coefficients(ctol)
            coords = _expand(target, maps, mode, ctol or tol) if target else tuple([zero] * dim)
            if coords is None:
                raise ClosureViolation(f"bracket of basis fields {a} and {b} leaves their span")
            table[a][b] = coords
            table[b][a] = tuple(-c for c in coords)
    return StructureConstants(dim, tuple(tuple(row) for row in table), mode, tol)


def _graded_structure(components: Sequence[Tuple[int, Sequence[PolyField]]], mode: str, tol: float) -> StructureConstants:
    ctol = _closure_tol(mode, tol)
    blocks: Dict[int, Tuple[int, List[Dict[CoefficientKey, Scalar]]]] = {}
    fields: List[Tuple[int, VectorField]] = []
    offset = 0
    for k, basis in components:
        vfs = [f.vector_field() for f in basis]
        blocks[k] = (offset, [vf.coefficients(ctol) for vf in vfs])
        fields.extend((k, vf) for vf in vfs)
        offset += len(basis)
    dim = len(fields)
    zero: Scalar = Fraction(0) if mode == EXACT else 0.0
    table: List[List[Vector]] = [[tuple([zero] * dim) for _ in range(dim)] for _ in range(dim)]
    for a in range(dim):
        ka, fa = fields[a]
        for b in range(a + 1, dim):
            kb, fb = fields[b]
            target = fa.bracket(fb).coefficients(ctol)
            if not target:
                continue
            level = ka + kb
            if level not in blocks:
                raise ClosureViolation(f"[g_{ka}, g_{kb}] has a nonzero bracket outside the computed levels")
            start, maps = blocks[level]
            coords = _expand(target, maps, mode, ctol or tol)
            if coords is None:
                raise ClosureViolation(f"bracket of basis fields {a} and {b} is not in g_{level}")
            full = [zero] * dim
            full[start:start + len(coords)] = coords
            table[a][b] = tuple(full)
            table[b][a] = tuple(-c for c in full)
    return StructureConstants(dim, tuple(tuple(row) for row in table), mode, tol)


def check_euler_grading(G: GradedLieAlgebra) -> bool:
    """ad(delta) acts on g_k as multiplication by k."""
    L = G.structure
    delta = L.basis_vector(G.euler_index)
    ctol = _closure_tol(G.mode, L.tol)
    for i, k in enumerate(G.degrees):
        image = L.bracket(delta, L.basis_vector(i))
        expected = [k if j == i else 0 for j in range(G.dim)]
        if any(abs(float(u - e)) > ctol for u, e in zip(image, expected)):
            return False
    return True


def parity_ok(G: GradedLieAlgebra) -> bool:
    """Coefficients are real on even levels and purely imaginary on odd ones."""
    for f in G.basis:
        parts = {key[0] for key in f.vector_field().coefficients()}
        if parts - {"im" if f.degree % 2 else "re"}:
            return False
    return True


def _finiteness_evidence(p: Presentation, max_k: Optional[int], seed: int) -> Dict[str, Any]:
    try:
        verdict = nondegeneracy_order(p, max_k=max_k, seed=seed)
    except UndecidedError as exc:
        raise RefusedInput(f"nondegeneracy order undecided: {exc}") from exc
    minimal = minimality_report(p, seed=seed)
    if not verdict.finite:
        raise RefusedInput(f"finite nondegeneracy order not established ({verdict.status}); hol may be infinite-dimensional")
    if minimal.verdict != "minimal":
        raise RefusedInput(f"tube is not certified minimal ({minimal.verdict})")
    return {"nondegeneracy": verdict.to_dict(), "minimality": minimal.to_dict()}


def assemble_hol(
    p: Presentation,
    max_degree: int = DEFAULT_MAX_DEGREE,
    backend: str = DEFAULT_BACKEND,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    max_k: Optional[int] = None,
    check_finiteness: bool = True,
) -> GradedLieAlgebra:
    """g_{-1} + g_0 + g_1 + ..., stopping at the first k >= 1 with g_k = 0."""
    if not is_conical(p, seed=seed):
        raise RefusedInput("presentation is not conical; hol is only assembled for tubes over cones")
    evidence = _finiteness_evidence(p, max_k, seed) if check_finiteness else {}
    name = resolve_backend(p, backend)
    mode = backend_mode(name)
    components: List[Tuple[int, Tuple[PolyField, ...]]] = []
    k = -1
    while True:
        if k > max_degree:
            raise BackendError(f"g_{max_degree} is still nonzero; raise --max-degree or check the input")
        basis = solve_graded_component(p, k, name, tol, seed)
        if k == 0:
            basis = _euler_first(basis, p.n, mode, tol)
        if k >= 1 and not basis:
            break
        components.append((k, tuple(basis)))
        k += 1
    evidence["stopped_at"] = k
    structure = _graded_structure(components, mode, tol)
    euler_index = len(components[0][1])
    G = GradedLieAlgebra(p.n, mode, tuple(components), structure, euler_index, name, evidence)
    if not check_euler_grading(G):
        raise ClosureViolation("ad(delta) does not act on g_k as multiplication by k")
    logger.info("hol assembled via %s: graded dims %s", name, G.graded_dims)
    return G


def bracket_field(f1: PolyField, f2: PolyField) -> VectorField:
    return f1.vector_field().bracket(f2.vector_field())


def bracket(f1: PolyField, f2: PolyField, G: GradedLieAlgebra) -> Vector:
    """Coordinates of [f1, f2] over the basis of G."""
    mode = G.mode
    ctol = _closure_tol(mode, G.structure.tol)
    level = f1.degree + f2.degree
    zero: Scalar = Fraction(0) if mode == EXACT else 0.0
    target = bracket_field(f1, f2).coefficients(ctol)
    full = [zero] * G.dim
    if not target:
        return tuple(full)
    block = G.block(level)
    if not len(block):
        raise ClosureViolation(f"bracket lands on level {level}, which is zero or not computed")
    maps = [G.basis[i].vector_field().coefficients(ctol) for i in block]
    coords = _expand(target, maps, mode, ctol or G.structure.tol)
    if coords is None:
        raise ClosureViolation(f"bracket is not in the computed g_{level}")
    full[block.start:block.stop] = coords
    return tuple(full)


def verify_termination(p: Presentation, G: GradedLieAlgebra, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> Dict[str, int]:
    """Solve the two levels past the top directly; both must vanish."""
    top = G.top_degree
    return {str(k): len(solve_graded_component(p, k, G.backend, tol, seed)) for k in (top + 1, top + 2)}


@dataclass(frozen=True)
class IsotropyReport:
    dim_g: int
    dim_m: int
    evaluation_rank: int

    @property
    def isotropy_dim(self) -> int:
        return self.dim_g - self.evaluation_rank

    @property
    def locally_homogeneous_possible(self) -> bool:
        return self.dim_g >= self.dim_m

    @property
    def transitive(self) -> bool:
        return self.evaluation_rank == self.dim_m

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim_g": self.dim_g,
            "dim_M": self.dim_m,
            "evaluation_rank": self.evaluation_rank,
            "isotropy_dim": self.isotropy_dim,
            "locally_homogeneous_possible": self.locally_homogeneous_possible,
            "transitive": self.transitive,
        }


def isotropy_dimension(G: GradedLieAlgebra, p: Presentation, a: Optional[Sequence[Scalar]] = None) -> IsotropyReport:
    """Rank of f -> f(a) on g; the kernel is the isotropy algebra at a."""
    point = tuple(p.base_point if a is None else a)
    mode = EXACT if G.mode == EXACT and point_mode(p, point) == EXACT else NUMERIC
    rows = []
    for f in G.basis:
        re, im = f.value_at_real(point)
        rows.append(list(re) + list(im))
    atol = G.structure.tol * data_scale(rows) if mode == NUMERIC else 0.0
    r = rank(Matrix.build(rows, mode, 2 * p.n), G.structure.tol, atol) if rows else 0
    return IsotropyReport(G.dim, p.n + p.dimension, r)


def locally_homogeneous_possible(G: GradedLieAlgebra, p: Presentation) -> bool:
    return G.dim >= p.n + p.dimension


def graded_profile(G: GradedLieAlgebra) -> Dict[str, Any]:
    """dim g_k next to dim g_{-k} for k >= 1; recorded, nothing asserted."""
    dims = G.graded_dims
    profile = {}
    for k in sorted(dims):
        if k < 1:
            continue
        profile[str(k)] = {"dim": dims[k], "dim_minus": dims.get(-k, 0), "exceeds": dims[k] > dims.get(-k, 0)}
    return profile
