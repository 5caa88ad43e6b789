"""Scalars, matrices and the linear algebra every other module leans on.

Two modes share one `Matrix` type: ``exact`` (entries are `fractions.Fraction`,
always reduced with positive denominator) and ``numeric`` (entries are
floats). Exact elimination is fraction-free; numeric rank decisions use a
singular-value cut relative to the largest singular value.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union, cast

import numpy as np
import scipy.linalg
import sympy
from numpy.typing import NDArray

from .config import DEFAULT_TOL
from .errors import InputError


logger = logging.getLogger(__name__)

EXACT = "exact"
NUMERIC = "numeric"

Scalar = Union[Fraction, float]
Vector = Tuple[Scalar, ...]


def to_scalar(value: object, mode: str) -> Scalar:
    if mode == EXACT:
        if isinstance(value, float):
            raise InputError(f"float {value!r} in exact matrix", module="numeric_kernel")
        if isinstance(value, str):
            return parse_scalar(value)
        return Fraction(cast(int, value))
    if isinstance(value, str):
        return float(parse_scalar(value))
    return float(cast(float, value))


def parse_scalar(text: Union[str, int, float, Fraction]) -> Scalar:
    """Parse "p/q" or integer literals exactly; anything with a decimal point as float."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise InputError(f"not a scalar: {text!r}", module="numeric_kernel")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return text
    raw = text.strip()
    try:
        if any(ch in raw for ch in ".eE") and "/" not in raw:
            return float(raw)
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse scalar {text!r}", module="numeric_kernel") from exc


def format_scalar(value: Scalar) -> Union[str, float]:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return float(f"{float(value):.12g}")


def is_exact_vector(values: Iterable[object]) -> bool:
    return all(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values)


def mode_of(*vectors: Iterable[object]) -> str:
    return EXACT if all(is_exact_vector(v) for v in vectors) else NUMERIC


def as_vector(values: Iterable[object], mode: str) -> Vector:
    return tuple(to_scalar(v, mode) for v in values)


@dataclass(frozen=True)
class Matrix:
    entries: Tuple[Tuple[Scalar, ...], ...]
    cols: int
    mode: str = EXACT

    def __post_init__(self):
        for row in self.entries:
            if len(row) != self.cols:
                raise InputError("matrix rows of unequal length", module="numeric_kernel")
            if self.mode == EXACT and not all(isinstance(x, Fraction) for x in row):
                raise InputError("exact matrix with non-rational entries", module="numeric_kernel")

    @classmethod
    def exact(cls, rows: Sequence[Sequence[object]], cols: Optional[int] = None) -> "Matrix":
        entries = tuple(tuple(to_scalar(x, EXACT) for x in row) for row in rows)
        width = cols if cols is not None else (len(entries[0]) if entries else 0)
        return cls(entries, width, EXACT)

    @classmethod
    def numeric(cls, rows: Union[Sequence[Sequence[object]], NDArray[np.float64]], cols: Optional[int] = None) -> "Matrix":
        arr = np.asarray(rows, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(0, cols or 0) if arr.size == 0 else arr.reshape(1, -1)
        entries = tuple(tuple(float(x) for x in row) for row in arr)
        width = cols if cols is not None else int(arr.shape[1])
        return cls(entries, width, NUMERIC)

    @classmethod
    def build(cls, rows: Sequence[Sequence[object]], mode: str, cols: Optional[int] = None) -> "Matrix":
        return cls.exact(rows, cols) if mode == EXACT else cls.numeric(rows, cols)

    @classmethod
    def identity(cls, n: int, mode: str = EXACT) -> "Matrix":
        return cls.build([[1 if i == j else 0 for j in range(n)] for i in range(n)], mode, n)

    @classmethod
    def zeros(cls, rows: int, cols: int, mode: str = EXACT) -> "Matrix":
        return cls.build([[0] * cols for _ in range(rows)], mode, cols)

    @property
    def rows(self) -> int:
        return len(self.entries)

    def to_numpy(self) -> NDArray[np.float64]:
        if not self.entries:
            return np.zeros((0, self.cols), dtype=np.float64)
        return np.array([[float(x) for x in row] for row in self.entries], dtype=np.float64)

    def as_numeric(self) -> "Matrix":
        return self if self.mode == NUMERIC else Matrix.numeric(self.to_numpy(), self.cols)

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "Matrix":
        return Matrix(tuple(self.column(j) for j in range(self.cols)), self.rows, self.mode)

    def apply(self, v: Sequence[Scalar]) -> Vector:
        return tuple(sum((a * b for a, b in zip(row, v)), _zero(self.mode)) for row in self.entries)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        cols = [other.column(j) for j in range(other.cols)]
        rows = [[sum((a * b for a, b in zip(row, col)), _zero(self.mode)) for col in cols] for row in self.entries]
        return Matrix(tuple(tuple(r) for r in rows), other.cols, self.mode)

    def __add__(self, other: "Matrix") -> "Matrix":
        rows = tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries))
        return Matrix(rows, self.cols, self.mode)

    def __sub__(self, other: "Matrix") -> "Matrix":
        rows = tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries))
        return Matrix(rows, self.cols, self.mode)

    def scale(self, c: Scalar) -> "Matrix":
        return Matrix(tuple(tuple(c * a for a in row) for row in self.entries), self.cols, self.mode)

    def stack(self, other: "Matrix") -> "Matrix":
        if other.cols != self.cols:
            raise InputError("cannot stack matrices of different widths", module="numeric_kernel")
        return Matrix(self.entries + other.entries, self.cols, self.mode)

    def trace(self) -> Scalar:
        return sum((self.entries[i][i] for i in range(min(self.rows, self.cols))), _zero(self.mode))

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        if self.mode == EXACT:
            return all(x == 0 for row in self.entries for x in row)
        return bool(np.all(np.abs(self.to_numpy()) <= tol))


def _zero(mode: str) -> Scalar:
    return Fraction(0) if mode == EXACT else 0.0


def from_columns(columns: Sequence[Sequence[Scalar]], mode: str, n: Optional[int] = None) -> Matrix:
    height = n if n is not None else (len(columns[0]) if columns else 0)
    rows = [[columns[j][i] for j in range(len(columns))] for i in range(height)]
    return Matrix.build(rows, mode, len(columns))


# --- fraction-free elimination -------------------------------------------------

def _integer_rows(m: Matrix) -> List[List[int]]:
    out: List[List[int]] = []
    for row in m.entries:
        den = math.lcm(*[cast(Fraction, x).denominator for x in row]) if row else 1
        out.append([int(cast(Fraction, x) * den) for x in row])
    return out


def _bareiss_echelon(rows: List[List[int]], ncols: int) -> Tuple[List[List[int]], List[int]]:
    a = [r[:] for r in rows]
    pivots: List[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == len(a):
            break
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, len(a)):
            f = a[i][c]
            row_i = a[i]
            row_r = a[r]
            for j in range(c + 1, ncols):
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
            row_i[c] = 0
        prev = p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _primitive(v: List[Fraction]) -> Vector:
    den = math.lcm(*[x.denominator for x in v])
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    if g == 0:
        return tuple(Fraction(0) for _ in v)
    return tuple(Fraction(x, g) for x in ints)


def _exact_nullspace(m: Matrix) -> List[Vector]:
    echelon, pivots = _bareiss_echelon(_integer_rows(m), m.cols)
    free = [c for c in range(m.cols) if c not in pivots]
    basis: List[Vector] = []
    for f in free:
        x = [Fraction(0)] * m.cols
        x[f] = Fraction(1)
        for idx in range(len(pivots) - 1, -1, -1):
            p = pivots[idx]
            row = echelon[idx]
            s = sum((row[j] * x[j] for j in range(p + 1, m.cols) if row[j]), Fraction(0))
            x[p] = -s / row[p]
        basis.append(_primitive(x))
    return basis


def _svd(m: Matrix) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    arr = m.to_numpy()
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        return np.zeros(0), np.eye(m.cols)
    _, s, vh = scipy.linalg.svd(arr, full_matrices=True)
    return s, vh


def _numeric_rank(s: NDArray[np.float64], tol: float, atol: float = 0.0) -> int:
    if s.size == 0:
        return 0
    cut = max(tol * float(s.max()), atol)
    return int(np.sum(s > cut)) if float(s.max()) > 0.0 else 0


def nullspace(m: Matrix, tol: float = DEFAULT_TOL, atol: float = 0.0) -> List[Vector]:
    """Basis of {v : m v = 0}.

    In numeric mode singular values at or below max(tol * s_max, atol) count as zero;
    `atol` guards matrices whose exact value is zero but carry rounding noise.
    """
    if m.mode == EXACT:
        return _exact_nullspace(m)
    if tol <= 0:
        raise InputError("numeric nullspace needs tol > 0", module="numeric_kernel")
    s, vh = _svd(m)
    r = _numeric_rank(s, tol, atol)
    return [tuple(float(x) for x in vh[i]) for i in range(r, m.cols)]


def rank(m: Matrix, tol: float = DEFAULT_TOL, atol: float = 0.0) -> int:
    if m.mode == EXACT:
        return len(_bareiss_echelon(_integer_rows(m), m.cols)[1])
    s, _ = _svd(m)
    return _numeric_rank(s, tol, atol)


def row_basis(m: Matrix, tol: float = DEFAULT_TOL, atol: float = 0.0) -> Matrix:
    """Independent rows spanning the row space of m (echelon rows / leading right-singular vectors)."""
    if m.mode == EXACT:
        echelon, _ = _bareiss_echelon(_integer_rows(m), m.cols)
        return Matrix.exact(echelon, m.cols)
    s, vh = _svd(m)
    r = _numeric_rank(s, tol, atol)
    return Matrix.numeric(vh[:r], m.cols)


def solve(m: Matrix, rhs: Sequence[Scalar], tol: float = DEFAULT_TOL) -> Optional[Vector]:
    """One solution of m x = rhs (free variables set to zero), or None when inconsistent."""
    if m.mode == EXACT:
        aug = Matrix.exact([list(row) + [b] for row, b in zip(m.entries, rhs)], m.cols + 1)
        echelon, pivots = _bareiss_echelon(_integer_rows(aug), aug.cols)
        if pivots and pivots[-1] == m.cols:
            return None
        x = [Fraction(0)] * m.cols
        for idx in range(len(pivots) - 1, -1, -1):
            p = pivots[idx]
            row = echelon[idx]
            s = sum((row[j] * x[j] for j in range(p + 1, m.cols) if row[j]), Fraction(0))
            x[p] = (row[m.cols] - s) / row[p]
        return tuple(x)
    a = m.to_numpy()
    b = np.asarray([float(v) for v in rhs], dtype=np.float64)
    if a.shape[0] == 0:
        return tuple(0.0 for _ in range(m.cols))
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    scale = max(1.0, float(np.linalg.norm(b)), float(np.abs(a).max(initial=0.0)))
    if float(np.linalg.norm(a @ sol - b)) > tol * scale * 10:
        return None
    return tuple(float(x) for x in sol)


# --- subspaces ---------------------------------------------------------------

def independent_subset(vectors: Sequence[Sequence[Scalar]], mode: str, tol: float = DEFAULT_TOL, atol: float = 0.0) -> List[int]:
    """Indices of a greedy maximal independent subfamily, in input order."""
    kept: List[int] = []
    for i, v in enumerate(vectors):
        trial = [list(vectors[j]) for j in kept] + [list(v)]
        if rank(Matrix.build(trial, mode, len(v)), tol, atol) > len(kept):
            kept.append(i)
    return kept


def span_basis(vectors: Sequence[Sequence[Scalar]], mode: str, tol: float = DEFAULT_TOL, atol: float = 0.0) -> List[Vector]:
    return [tuple(vectors[i]) for i in independent_subset(vectors, mode, tol, atol)]


def annihilator(basis: Sequence[Sequence[Scalar]], n: int, mode: str, tol: float = DEFAULT_TOL) -> List[Vector]:
    """Covectors y with y . b = 0 for every b in basis."""
    if not basis:
        return [tuple(Matrix.identity(n, mode).entries[i]) for i in range(n)]
    return nullspace(Matrix.build([list(b) for b in basis], mode, n), tol)


def in_span(basis: Sequence[Sequence[Scalar]], v: Sequence[Scalar], mode: str, tol: float = DEFAULT_TOL) -> bool:
    if not basis:
        return all(abs(x) <= (0 if mode == EXACT else tol) for x in v)
    if mode == EXACT:
        return solve(from_columns(basis, mode, len(v)), v) is not None
    q = scipy.linalg.orth(np.array([[float(x) for x in b] for b in basis]).T, rcond=tol)
    w = np.array([float(x) for x in v])
    resid = w - q @ (q.T @ w)
    return float(np.linalg.norm(resid)) <= tol * max(1.0, float(np.linalg.norm(w))) * 10


def coordinates(basis: Sequence[Sequence[Scalar]], v: Sequence[Scalar], mode: str, tol: float = DEFAULT_TOL) -> Optional[Vector]:
    if not basis:
        return () if all(abs(x) <= (0 if mode == EXACT else tol) for x in v) else None
    return solve(from_columns(basis, mode, len(v)), v, tol)


# --- characteristic polynomial and spectrum ----------------------------------

def faddeev_leverrier(m: Matrix) -> List[Scalar]:
    """Coefficients [1, c_{n-1}, ..., c_0] of det(x I - m)."""
    n = m.rows
    coeffs: List[Scalar] = [_one(m.mode)]
    ident = Matrix.identity(n, m.mode)
    mk = Matrix.zeros(n, n, m.mode)
    for k in range(1, n + 1):
        mk = (m @ mk) + ident.scale(coeffs[-1])
        ck = -(m @ mk).trace() / k
        coeffs.append(ck)
    return coeffs


def _one(mode: str) -> Scalar:
    return Fraction(1) if mode == EXACT else 1.0


_X = sympy.Symbol("x")


def _sympy_poly(coeffs: Sequence[Scalar]) -> sympy.Poly:
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in cast(Sequence[Fraction], coeffs)], _X, domain="QQ")


def rational_roots(coeffs: Sequence[Scalar]) -> Optional[List[Fraction]]:
    """All roots with multiplicity when the polynomial splits over Q, else None."""
    if not all(isinstance(c, Fraction) for c in coeffs):
        return None
    _, factors = _sympy_poly(coeffs).factor_list()
    roots: List[Fraction] = []
    for fac, mult in factors:
        if fac.degree() != 1:
            return None
        a, b = fac.all_coeffs()
        r = sympy.Rational(-b, a)
        roots.extend([Fraction(int(r.p), int(r.q))] * int(mult))
    return sorted(roots)


def _exact_eigenvalues(coeffs: Sequence[Scalar]) -> List[complex]:
    _, factors = _sympy_poly(coeffs).factor_list()
    out: List[complex] = []
    for fac, mult in factors:
        if fac.degree() <= 2:
            found = sympy.roots(fac)
            vals = [complex(sympy.N(r, 30)) for r, k in found.items() for _ in range(int(k))]
        else:
            vals = [complex(r) for r in fac.nroots(n=30)]
        out.extend(vals * int(mult))
    return out


def _clean_conjugates(values: Iterable[complex], scale: float) -> List[complex]:
    out = []
    for z in values:
        re = 0.0 if abs(z.real) <= 1e-12 * scale else z.real
        im = 0.0 if abs(z.imag) <= 1e-12 * scale else z.imag
        out.append(complex(re, im))
    return out


def char_poly_and_eigs(m: Matrix) -> Tuple[List[Scalar], List[complex]]:
    """Characteristic polynomial (highest degree first) and its roots with multiplicity."""
    if m.rows != m.cols:
        raise InputError("characteristic polynomial of a non-square matrix", module="numeric_kernel")
    if m.mode == EXACT:
        coeffs = faddeev_leverrier(m)
        eigs = _exact_eigenvalues(coeffs)
    else:
        arr = m.to_numpy()
        coeffs = [float(c) for c in np.poly(arr)] if m.rows else [1.0]
        eigs = [complex(z) for z in np.linalg.eigvals(arr)] if m.rows else []
    scale = max([1.0] + [abs(z) for z in eigs])
    eigs = _clean_conjugates(eigs, scale)
    return coeffs, sorted(eigs, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def poly_at_matrix(coeffs: Sequence[Scalar], m: Matrix) -> Matrix:
    """Horner evaluation of a polynomial (highest degree first) at a square matrix."""
    acc = Matrix.zeros(m.rows, m.cols, m.mode)
    ident = Matrix.identity(m.rows, m.mode)
    for c in coeffs:
        acc = (acc @ m) + ident.scale(c)
    return acc


def data_scale(*arrays: Iterable[Iterable[Scalar]]) -> float:
    """Largest absolute entry over the given row collections, at least 1."""
    best = 1.0
    for rows in arrays:
        for row in rows:
            for x in row:
                best = max(best, abs(float(x)))
    return best


def vectors_close(u: Sequence[Scalar], v: Sequence[Scalar], mode: str, tol: float = DEFAULT_TOL) -> bool:
    if mode == EXACT:
        return tuple(u) == tuple(v)
    scale = max([1.0] + [abs(float(x)) for x in u] + [abs(float(x)) for x in v])
    return all(abs(float(a) - float(b)) <= 10 * tol * scale for a, b in zip(u, v))


def same_span(u: Sequence[Sequence[Scalar]], v: Sequence[Sequence[Scalar]], mode: str, tol: float = DEFAULT_TOL) -> bool:
    if len(u) != len(v):
        return False
    return all(in_span(v, x, mode, tol) for x in u)
