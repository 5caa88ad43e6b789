"""Submanifolds F of R^n and their first and second order affine geometry.

A presentation is either an orbit of affine vector fields through a base
point or a homogeneous polynomial level set. Everything downstream (kernel
chains, the hol solver, the catalog) consumes these two types.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any, ClassVar, Dict, List, Optional, Sequence, Tuple, Union, cast

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from sympy import QQ
from sympy.polys.rings import PolyElement, ring

from .config import DEFAULT_SEED, DEFAULT_TOL, SAMPLE_SCALE
from .errors import InputError, PresentationError
from .numeric_kernel import (
    EXACT,
    NUMERIC,
    Matrix,
    Scalar,
    Vector,
    as_vector,
    data_scale,
    format_scalar,
    from_columns,
    in_span,
    independent_subset,
    is_exact_vector,
    nullspace,
    parse_scalar,
    rank,
    solve,
    vectors_close,
)
from .utils import load_json


logger = logging.getLogger(__name__)

Terms = Tuple[Tuple[Tuple[int, ...], Fraction], ...]


@dataclass(frozen=True)
class AffineField:
    """h(x) = linear x + constant; `linear` is the linear part of the field."""

    linear: Matrix
    constant: Vector

    def __post_init__(self):
        if self.linear.rows != self.linear.cols or len(self.constant) != self.linear.rows:
            raise InputError("affine field needs an n x n linear part and an n-vector constant", module="presentations")

    @classmethod
    def build(cls, linear: Sequence[Sequence[object]], constant: Optional[Sequence[object]] = None, mode: str = EXACT) -> "AffineField":
        lin = Matrix.build(linear, mode)
        const = as_vector(constant if constant is not None else [0] * lin.rows, mode)
        return cls(lin, const)

    @property
    def n(self) -> int:
        return self.linear.rows

    @property
    def mode(self) -> str:
        return self.linear.mode

    def __call__(self, x: Sequence[Scalar]) -> Vector:
        return tuple(a + b for a, b in zip(self.linear.apply(x), self.constant))

    def bracket(self, other: "AffineField") -> "AffineField":
        # [X, Y] = DY.X - DX.Y for X = Ax + b, Y = Cx + d
        lin = (other.linear @ self.linear) - (self.linear @ other.linear)
        const = tuple(u - v for u, v in zip(other.linear.apply(self.constant), self.linear.apply(other.constant)))
        return AffineField(lin, const)

    def flatten(self) -> Vector:
        return tuple(x for row in self.linear.entries for x in row) + tuple(self.constant)

    def augmented(self) -> NDArray[np.float64]:
        out = np.zeros((self.n + 1, self.n + 1))
        out[: self.n, : self.n] = self.linear.to_numpy()
        out[: self.n, self.n] = [float(c) for c in self.constant]
        return out

    def as_mode(self, mode: str) -> "AffineField":
        if mode == self.mode:
            return self
        return AffineField(self.linear.as_numeric(), as_vector(self.constant, NUMERIC))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "linear": [[format_scalar(x) for x in row] for row in self.linear.entries],
            "const": [format_scalar(x) for x in self.constant],
        }


def _common_mode(fields: Sequence[AffineField], point: Sequence[object]) -> str:
    if all(g.mode == EXACT for g in fields) and is_exact_vector(point):
        return EXACT
    return NUMERIC


@dataclass(frozen=True)
class OrbitPresentation:
    generators: Tuple[AffineField, ...]
    base_point: Vector
    tol: float = DEFAULT_TOL

    kind: ClassVar[str] = "orbit"

    def __post_init__(self):
        if not self.generators:
            raise InputError("orbit presentation needs at least one generator", module="presentations")
        n = len(self.base_point)
        if any(g.n != n for g in self.generators):
            raise InputError("generator and base point dimensions differ", module="presentations")
        mode = _common_mode(self.generators, self.base_point)
        object.__setattr__(self, "generators", tuple(g.as_mode(mode) for g in self.generators))
        object.__setattr__(self, "base_point", as_vector(self.base_point, mode))
        self._check_closure()
        if self.dimension == 0:
            raise PresentationError("generators vanish at the base point", module="presentations")

    def _check_closure(self) -> None:
        flat = [g.flatten() for g in self.generators]
        span = [flat[i] for i in independent_subset(flat, self.mode, self.tol)]
        for i, g in enumerate(self.generators):
            for h in self.generators[i + 1:]:
                if not in_span(span, g.bracket(h).flatten(), self.mode, self.tol):
                    raise PresentationError("generators are not closed under the bracket", module="presentations")

    @property
    def n(self) -> int:
        return len(self.base_point)

    @property
    def mode(self) -> str:
        return self.generators[0].mode

    @cached_property
    def independent_generators(self) -> Tuple[int, ...]:
        """Indices of generators whose values at the base point form a basis of T_aF."""
        values = [g(self.base_point) for g in self.generators]
        return tuple(independent_subset(values, self.mode, self.tol, self._atol(values)))

    @property
    def dimension(self) -> int:
        return len(self.independent_generators)

    def _atol(self, rows: Sequence[Sequence[Scalar]]) -> float:
        return self.tol * data_scale(rows) if self.mode == NUMERIC else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "n": self.n,
            "generators": [g.to_dict() for g in self.generators],
            "base_point": [format_scalar(x) for x in self.base_point],
        }


def _terms_of(p: PolyElement) -> Terms:
    return tuple((tuple(int(e) for e in m), Fraction(int(c.numerator), int(c.denominator))) for m, c in p.terms())


def _eval_terms(terms: Terms, x: Sequence[Scalar]) -> Scalar:
    total: Scalar = Fraction(0) if is_exact_vector(x) else 0.0
    for exps, c in terms:
        total += c * math.prod(xi ** e for xi, e in zip(x, exps) if e)
    return total


def _polynomial_ring(n: int, terms: Terms) -> Tuple[Any, Tuple[PolyElement, ...], PolyElement]:
    names = ",".join(f"x{i + 1}" for i in range(n))
    R, *X = ring(names, QQ)
    h = R.from_dict({e: QQ(c.numerator, c.denominator) for e, c in terms})
    return R, tuple(X), h


@dataclass(frozen=True)
class PolynomialSurface:
    """Zero set of a rational polynomial with no homogeneity requirement.

    Used to test tangency of vector fields to surfaces that are not cones.
    """

    n: int
    terms: Terms

    def __post_init__(self):
        terms = tuple((tuple(e), Fraction(c)) for e, c in self.terms if c != 0)
        if not terms or any(len(e) != self.n or min(e) < 0 for e, _ in terms):
            raise InputError("surface polynomial needs non-negative exponent vectors of length n", module="presentations")
        object.__setattr__(self, "terms", terms)

    @cached_property
    def _gradient_terms(self) -> Tuple[Terms, ...]:
        _, X, h = _polynomial_ring(self.n, self.terms)
        return tuple(_terms_of(h.diff(x)) for x in X)

    def value(self, x: Sequence[Scalar]) -> Scalar:
        return _eval_terms(self.terms, x)

    def gradient(self, x: Sequence[Scalar]) -> Vector:
        return tuple(_eval_terms(t, x) for t in self._gradient_terms)


@dataclass(frozen=True)
class LevelSetPresentation:
    """F = {h = 0} near `base_point` for a homogeneous polynomial h with rational coefficients."""

    n: int
    terms: Terms
    base_point: Vector
    tol: float = DEFAULT_TOL

    kind: ClassVar[str] = "levelset"

    def __post_init__(self):
        terms = tuple((tuple(e), Fraction(c)) for e, c in self.terms if c != 0)
        if not terms:
            raise InputError("level set polynomial is zero", module="presentations")
        if any(len(e) != self.n or min(e) < 0 for e, _ in terms):
            raise InputError("exponent vectors must have length n and be non-negative", module="presentations")
        if len({sum(e) for e, _ in terms}) != 1 or sum(terms[0][0]) == 0:
            raise InputError("level set polynomial must be homogeneous of positive degree", module="presentations")
        if len(self.base_point) != self.n:
            raise InputError("base point has the wrong dimension", module="presentations")
        object.__setattr__(self, "terms", terms)
        mode = EXACT if is_exact_vector(self.base_point) else NUMERIC
        object.__setattr__(self, "base_point", as_vector(self.base_point, mode))
        self.check_point(self.base_point)

    @property
    def degree(self) -> int:
        return sum(self.terms[0][0])

    @property
    def mode(self) -> str:
        return EXACT if is_exact_vector(self.base_point) else NUMERIC

    @property
    def dimension(self) -> int:
        return self.n - 1

    @cached_property
    def polynomial(self) -> Tuple[Any, Tuple[PolyElement, ...], PolyElement]:
        return _polynomial_ring(self.n, self.terms)

    @cached_property
    def _gradient_terms(self) -> Tuple[Terms, ...]:
        _, X, h = self.polynomial
        return tuple(_terms_of(h.diff(x)) for x in X)

    @cached_property
    def _hessian_terms(self) -> Tuple[Tuple[Terms, ...], ...]:
        _, X, h = self.polynomial
        return tuple(tuple(_terms_of(h.diff(xi).diff(xj)) for xj in X) for xi in X)

    def value(self, x: Sequence[Scalar]) -> Scalar:
        return _eval_terms(self.terms, x)

    def gradient(self, x: Sequence[Scalar]) -> Vector:
        return tuple(_eval_terms(t, x) for t in self._gradient_terms)

    def hessian(self, x: Sequence[Scalar]) -> Matrix:
        mode = EXACT if is_exact_vector(x) else NUMERIC
        return Matrix.build([[_eval_terms(t, x) for t in row] for row in self._hessian_terms], mode, self.n)

    def scale_at(self, x: Sequence[Scalar]) -> float:
        norm = max([1.0] + [abs(float(v)) for v in x])
        return max(1.0, sum(abs(float(c)) for _, c in self.terms) * norm ** self.degree)

    def check_point(self, x: Sequence[Scalar]) -> None:
        val = self.value(x)
        on_f = val == 0 if is_exact_vector(x) else abs(float(val)) <= self.tol * self.scale_at(x)
        if not on_f:
            raise PresentationError(f"point {list(map(float, x))} is not on the level set (h = {float(val):.3g})", module="presentations")
        grad = self.gradient(x)
        if all(float(g) == 0.0 for g in grad) or (not is_exact_vector(x) and max(abs(float(g)) for g in grad) <= self.tol * self.scale_at(x)):
            raise PresentationError("gradient vanishes at the point; h is not a submersion there", module="presentations")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "n": self.n,
            "poly": [{"exps": list(e), "coeff": format_scalar(c)} for e, c in self.terms],
            "base_point": [format_scalar(x) for x in self.base_point],
        }


Presentation = Union[OrbitPresentation, LevelSetPresentation]


def point_mode(p: Presentation, a: Sequence[Scalar]) -> str:
    return EXACT if p.mode == EXACT and is_exact_vector(a) else NUMERIC


def tangent_frame(p: OrbitPresentation, a: Sequence[Scalar]) -> Tuple[List[int], List[Vector], str]:
    mode = point_mode(p, a)
    values = [as_vector(g(a), mode) for g in p.generators]
    idx = independent_subset(values, mode, p.tol, p.tol * data_scale(values) if mode == NUMERIC else 0.0)
    if len(idx) != p.dimension:
        raise PresentationError(
            f"generator evaluations have rank {len(idx)} at {[float(x) for x in a]}, expected {p.dimension}",
            module="presentations",
        )
    return idx, [values[i] for i in idx], mode


def tangent_space(p: Presentation, a: Optional[Sequence[Scalar]] = None) -> List[Vector]:
    """Basis of T_aF (generator values for orbits, the kernel of dh(a) for level sets)."""
    point = p.base_point if a is None else tuple(a)
    if isinstance(p, OrbitPresentation):
        return tangent_frame(p, point)[1]
    p.check_point(point)
    mode = point_mode(p, point)
    grad = as_vector(p.gradient(point), mode)
    return nullspace(Matrix.build([list(grad)], mode, p.n), p.tol)


@dataclass(frozen=True)
class SecondForm:
    """The form l_a on a tangent basis, with values in N_aF given by quotient coordinates.

    `projection` maps R^n onto N_aF and kills exactly T_aF; `values[i][j]` is
    the image of l_a(basis[i], basis[j]). For level sets the quotient is
    identified with R through dh(a) and the values are the Hessian, which is
    the negative of what the orbit formula gives under the same
    identification; kernels and ranks do not see the sign.
    """

    point: Vector
    basis: Tuple[Vector, ...]
    projection: Matrix
    values: Tuple[Tuple[Vector, ...], ...]
    mode: str
    tol: float = DEFAULT_TOL
    scale: float = 1.0

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def codimension(self) -> int:
        return self.projection.rows

    @property
    def _atol(self) -> float:
        return self.tol * self.scale if self.mode == NUMERIC else 0.0

    def stacked(self) -> Matrix:
        """Rows indexed by (i, c), columns by j: the linear map w -> l(basis_i, w)_c."""
        rows = [[self.values[i][j][c] for j in range(self.dimension)] for i in range(self.dimension) for c in range(self.codimension)]
        return Matrix.build(rows, self.mode, self.dimension)

    def tangent_coordinates(self, v: Sequence[Scalar]) -> Vector:
        coords = solve(from_columns(self.basis, self.mode, len(self.point)), v, self.tol)
        if coords is None:
            raise PresentationError("vector is not tangent at the point", module="presentations")
        return coords

    def evaluate(self, v: Sequence[Scalar], w: Sequence[Scalar]) -> Vector:
        cv, cw = self.tangent_coordinates(v), self.tangent_coordinates(w)
        zero: Scalar = Fraction(0) if self.mode == EXACT else 0.0
        out = [zero] * self.codimension
        for i, x in enumerate(cv):
            for j, y in enumerate(cw):
                if x and y:
                    for c in range(self.codimension):
                        out[c] += x * y * self.values[i][j][c]
        return tuple(out)

    def is_symmetric(self) -> bool:
        return all(
            vectors_close(self.values[i][j], self.values[j][i], self.mode, self.tol)
            for i in range(self.dimension)
            for j in range(i + 1, self.dimension)
        )

    def radical(self) -> List[Vector]:
        """Basis (in R^n) of {w in T_aF : l(v, w) = 0 for all v}."""
        if self.dimension == 0:
            return []
        if self.codimension == 0:
            return list(self.basis)
        coeffs = nullspace(self.stacked(), self.tol, self._atol)
        zero: Scalar = Fraction(0) if self.mode == EXACT else 0.0
        return [
            tuple(sum((c * b[k] for c, b in zip(cv, self.basis)), zero) for k in range(len(self.point)))
            for cv in coeffs
        ]

    def image_rank(self) -> int:
        """Dimension of the span of all values l(basis_i, basis_j) in N_aF."""
        vals = [list(self.values[i][j]) for i in range(self.dimension) for j in range(i, self.dimension)]
        if not vals or self.codimension == 0:
            return 0
        return rank(Matrix.build(vals, self.mode, self.codimension), self.tol, self._atol)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": [format_scalar(x) for x in self.point],
            "tangent_basis": [[format_scalar(x) for x in b] for b in self.basis],
            "normal_projection": [[format_scalar(x) for x in row] for row in self.projection.entries],
            "values": [[[format_scalar(x) for x in v] for v in row] for row in self.values],
        }


def _quotient_projection(basis: Sequence[Vector], n: int, mode: str, tol: float) -> Matrix:
    identity = Matrix.identity(n, mode)
    candidates = list(basis) + [identity.entries[i] for i in range(n)]
    idx = independent_subset(candidates, mode, tol)
    complement = [candidates[i] for i in idx if i >= len(basis)]
    frame = from_columns(list(basis) + complement, mode, n)
    inverse_cols = []
    for i in range(n):
        col = solve(frame, identity.entries[i], tol)
        if col is None:
            raise PresentationError("tangent basis could not be completed to a frame", module="presentations")
        inverse_cols.append(col)
    r = len(basis)
    rows = [[inverse_cols[i][r + c] for i in range(n)] for c in range(len(complement))]
    return Matrix.build(rows, mode, n)


def second_fundamental_form(p: Presentation, a: Optional[Sequence[Scalar]] = None) -> SecondForm:
    point = p.base_point if a is None else tuple(a)
    if isinstance(p, OrbitPresentation):
        idx, basis, mode = tangent_frame(p, point)
        q = _quotient_projection(basis, p.n, mode, p.tol)
        lin = [p.generators[i].linear if mode == p.mode else p.generators[i].linear.as_numeric() for i in idx]
        # l(w_i, g_j(a)) = lambda^{g_j}(w_i) mod T_aF
        values = tuple(tuple(q.apply(lin[j].apply(basis[i])) for j in range(len(basis))) for i in range(len(basis)))
        scale = data_scale(*[m.entries for m in lin], basis, q.entries) ** 3 if mode == NUMERIC else 1.0
        form = SecondForm(tuple(point), tuple(basis), q, values, mode, p.tol, scale)
        if not form.is_symmetric():
            raise PresentationError("second fundamental form assembled from generators is not symmetric", module="presentations")
        return form
    basis = tangent_space(p, point)
    mode = point_mode(p, point)
    hess = p.hessian(point) if mode == EXACT else p.hessian(point).as_numeric()
    grad = as_vector(p.gradient(point), mode)
    values = tuple(tuple((sum(
        (basis[i][r] * hess.entries[r][s] * basis[j][s] for r in range(p.n) for s in range(p.n)),
        Fraction(0) if mode == EXACT else 0.0,
    ),) for j in range(len(basis))) for i in range(len(basis)))
    scale = data_scale(hess.entries, basis) ** 3 if mode == NUMERIC else 1.0
    return SecondForm(tuple(point), tuple(basis), Matrix.build([list(grad)], mode, p.n), values, mode, p.tol, scale)


@dataclass(frozen=True)
class LeviForm:
    """Sesquilinear extension of l_a to H_aM = T_aF + i T_aF, in tangent-basis coordinates."""

    second_form: SecondForm

    def _table(self) -> NDArray[np.complex128]:
        sf = self.second_form
        out = np.zeros((sf.dimension, sf.dimension, sf.codimension), dtype=np.complex128)
        for i in range(sf.dimension):
            for j in range(sf.dimension):
                out[i, j, :] = [float(x) for x in sf.values[i][j]]
        return out

    def evaluate(self, u: Sequence[complex], v: Sequence[complex]) -> NDArray[np.complex128]:
        """L(u, v): conjugate-linear in u, complex-linear in v."""
        uu = np.conj(np.asarray(u, dtype=np.complex128))
        vv = np.asarray(v, dtype=np.complex128)
        return np.einsum("i,j,ijc->c", uu, vv, self._table())

    def hermitian(self, u: Sequence[complex]) -> NDArray[np.float64]:
        return np.real(self.evaluate(u, u))

    def kernel(self) -> NDArray[np.complex128]:
        """Columns span {v : L(u, v) = 0 for all u} in C^dim."""
        sf = self.second_form
        if sf.dimension == 0:
            return np.zeros((0, 0), dtype=np.complex128)
        units = np.eye(sf.dimension, dtype=np.complex128)
        rows = [self.evaluate(units[i], units[j]) for i in range(sf.dimension) for j in range(sf.dimension)]
        # entry ((i, c), j) of the map v -> L(e_i, v)
        big = np.array([[rows[i * sf.dimension + j][c] for j in range(sf.dimension)]
                        for i in range(sf.dimension) for c in range(sf.codimension)], dtype=np.complex128)
        if big.size == 0:
            return units
        _, s, vh = scipy.linalg.svd(big)
        cut = max(sf.tol * float(s.max(initial=0.0)), sf._atol, 1e-300)
        r = int(np.sum(s > cut))
        return np.conj(vh[r:]).T

    def kernel_dimension(self) -> int:
        return int(self.kernel().shape[1])


def levi_form(p: Presentation, a: Optional[Sequence[Scalar]] = None) -> LeviForm:
    return LeviForm(second_fundamental_form(p, a))


def _euler_in_generators(p: OrbitPresentation) -> bool:
    euler = AffineField(Matrix.identity(p.n, p.mode), as_vector([0] * p.n, p.mode))
    flat = [g.flatten() for g in p.generators]
    return in_span(flat, euler.flatten(), p.mode, p.tol)


def _position_tangent(p: Presentation, x: Sequence[Scalar]) -> bool:
    basis = tangent_space(p, x)
    mode = point_mode(p, x)
    return in_span(basis, as_vector(x, mode), mode, p.tol)


def is_conical(p: Presentation, samples: int = 8, seed: int = DEFAULT_SEED) -> bool:
    """x in T_xF at the base point and sampled points; orbits containing x d/dx are cones outright."""
    if isinstance(p, OrbitPresentation):
        if _euler_in_generators(p):
            return True
        points = [p.base_point] + sample_points(p, samples, seed)
    else:
        points = [p.base_point] + sample_level_set_points(p, samples, seed)
    return all(_position_tangent(p, x) for x in points)


@dataclass(frozen=True)
class MinimalityReport:
    not_in_hyperplane: bool
    levi_image_spans: bool
    verdict: str

    def to_dict(self) -> Dict[str, Any]:
        return {"not_in_hyperplane": self.not_in_hyperplane, "levi_image_spans": self.levi_image_spans, "verdict": self.verdict}


def minimality_report(p: Presentation, a: Optional[Sequence[Scalar]] = None, samples: int = 0, seed: int = DEFAULT_SEED) -> MinimalityReport:
    count = samples or max(2 * p.n, 8)
    if isinstance(p, OrbitPresentation):
        pts = sample_points(p, count, seed)
    else:
        pts = sample_level_set_points(p, count, seed)
    origin = np.array([float(x) for x in p.base_point])
    diffs = np.array([np.array(x) - origin for x in pts])
    affine_rank = rank(Matrix.numeric(diffs, p.n), p.tol, p.tol * data_scale(diffs.tolist()))
    sf = second_fundamental_form(p, a)
    spans = sf.image_rank() == sf.codimension
    if spans:
        verdict = "minimal"
    elif affine_rank < p.n:
        verdict = "nonminimal"
    else:
        verdict = "unknown"
    logger.debug("minimality: affine rank %d, image rank %d/%d -> %s", affine_rank, sf.image_rank(), sf.codimension, verdict)
    return MinimalityReport(affine_rank == p.n, spans, verdict)


def sample_points(
    p: OrbitPresentation,
    count: int,
    seed: int = DEFAULT_SEED,
    scale: float = SAMPLE_SCALE,
    params: Optional[Sequence[Sequence[float]]] = None,
) -> List[Vector]:
    """Points exp(sum t_j g_j) a of the orbit, t uniform in [-scale, scale] unless `params` is given."""
    if count < 1:
        raise InputError("sample count must be at least 1", module="presentations")
    rng = np.random.default_rng(seed)
    blocks = [g.augmented() for g in p.generators]
    start = np.append(np.array([float(x) for x in p.base_point]), 1.0)
    points: List[Vector] = []
    rejected = 0
    while len(points) < count:
        if params is not None:
            t = np.asarray(params[len(points)], dtype=np.float64)
        else:
            t = rng.uniform(-scale, scale, size=len(blocks))
        x = scipy.linalg.expm(sum(tj * b for tj, b in zip(t, blocks))) @ start
        point = tuple(float(v) for v in x[: p.n])
        if params is None and not _regular_orbit_point(p, point):
            rejected += 1
            if rejected > 10 * count:
                raise PresentationError("could not sample regular orbit points", module="presentations")
            continue
        points.append(point)
    return points


def _regular_orbit_point(p: OrbitPresentation, x: Sequence[float]) -> bool:
    values = [p.generators[i].as_mode(NUMERIC)(x) for i in range(len(p.generators))]
    return rank(Matrix.numeric(values, p.n), p.tol, p.tol * data_scale(values)) == p.dimension


def sample_level_set_points(
    p: LevelSetPresentation,
    count: int,
    seed: int = DEFAULT_SEED,
    scale: float = SAMPLE_SCALE,
    max_newton: int = 60,
) -> List[Vector]:
    """Perturb the base point and project back onto h = 0 by Newton steps along the gradient."""
    if count < 1:
        raise InputError("sample count must be at least 1", module="presentations")
    rng = np.random.default_rng(seed)
    base = np.array([float(x) for x in p.base_point])
    spread = 0.5 * scale * max(1.0, float(np.linalg.norm(base))) / math.sqrt(p.n)
    points: List[Vector] = []
    rejected = 0
    while len(points) < count:
        x = base + rng.normal(scale=spread, size=p.n)
        for _ in range(max_newton):
            val = float(p.value(x.tolist()))
            grad = np.array([float(g) for g in p.gradient(x.tolist())])
            gg = float(grad @ grad)
            if gg == 0.0:
                break
            x = x - val * grad / gg
            if abs(val) <= 1e-15 * p.scale_at(x.tolist()):
                break
        try:
            p.check_point(tuple(float(v) for v in x))
        except PresentationError:
            rejected += 1
            if rejected > 10 * count:
                raise PresentationError("Newton projection onto the level set keeps failing", module="presentations")
            continue
        points.append(tuple(float(v) for v in x))
    return points


def sample_surface_points(p: Presentation, count: int, seed: int = DEFAULT_SEED) -> List[Vector]:
    if isinstance(p, OrbitPresentation):
        return sample_points(p, count, seed)
    return sample_level_set_points(p, count, seed)


# --- JSON -------------------------------------------------------------------

def _scalars(values: Any, what: str) -> List[Scalar]:
    if not isinstance(values, list):
        raise InputError(f"{what} must be a list", module="presentations")
    return [parse_scalar(v) for v in values]


def presentation_from_dict(data: Dict[str, Any], tol: float = DEFAULT_TOL) -> Presentation:
    if not isinstance(data, dict):
        raise InputError("presentation must be a JSON object", module="presentations")
    kind = data.get("kind")
    n = data.get("n")
    if not isinstance(n, int) or n < 1:
        raise InputError("field 'n' must be a positive integer", module="presentations")
    base = _scalars(data.get("base_point"), "base_point")
    if len(base) != n:
        raise InputError("base_point must have n entries", module="presentations")
    if kind == "orbit":
        gens = data.get("generators")
        if not isinstance(gens, list) or not gens:
            raise InputError("orbit presentation needs a non-empty 'generators' list", module="presentations")
        fields = []
        for g in gens:
            if not isinstance(g, dict) or not isinstance(g.get("linear"), list):
                raise InputError("each generator needs a 'linear' matrix", module="presentations")
            linear = [_scalars(row, "linear row") for row in g["linear"]]
            const = _scalars(g.get("const", [0] * n), "const")
            if len(linear) != n or any(len(row) != n for row in linear) or len(const) != n:
                raise InputError("generator shapes do not match n", module="presentations")
            mode = EXACT if all(is_exact_vector(r) for r in linear) and is_exact_vector(const) else NUMERIC
            fields.append(AffineField.build(linear, const, mode))
        return OrbitPresentation(tuple(fields), tuple(base), tol)
    if kind == "levelset":
        poly = data.get("poly")
        if not isinstance(poly, list) or not poly:
            raise InputError("level set presentation needs a non-empty 'poly' list", module="presentations")
        terms = []
        for t in poly:
            if not isinstance(t, dict) or not isinstance(t.get("exps"), list):
                raise InputError("each poly term needs 'exps' and 'coeff'", module="presentations")
            coeff = parse_scalar(t.get("coeff", "1/1"))
            if not isinstance(coeff, Fraction):
                raise InputError("level set coefficients must be exact rationals", module="presentations")
            terms.append((tuple(int(e) for e in t["exps"]), coeff))
        return LevelSetPresentation(n, tuple(terms), tuple(base), tol)
    raise InputError(f"unknown presentation kind {kind!r}", module="presentations")


def presentation_to_dict(p: Presentation) -> Dict[str, Any]:
    return p.to_dict()


def load_presentation(path: str, tol: float = DEFAULT_TOL) -> Presentation:
    return presentation_from_dict(cast(Dict[str, Any], load_json(path)), tol)
