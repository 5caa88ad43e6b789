"""Cones F = H(a) for H = exp(span{1, phi, ..., phi^d}) and the criteria that predict their hol."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .config import DEFAULT_TOL, EIGEN_MATCH_TOL
from .errors import InconsistencyError, InputError, NotApplicable
from .numeric_kernel import (
    EXACT,
    Matrix,
    Scalar,
    Vector,
    as_vector,
    char_poly_and_eigs,
    format_scalar,
    from_columns,
    nullspace,
    rank,
    rational_roots,
)
from .presentations import AffineField, OrbitPresentation, minimality_report, tangent_space
from .nondegeneracy import kernel_chain


logger = logging.getLogger(__name__)

Eigenvalue = Union[Fraction, complex]


@dataclass(frozen=True)
class EndoCone:
    phi: Matrix
    d: int
    a: Vector

    def __post_init__(self):
        n = self.phi.rows
        if self.phi.cols != n:
            raise InputError("phi must be square", module="endo_cones")
        if n < 3 or not 1 <= self.d <= n - 2:
            raise InputError(f"need n >= 3 and 1 <= d <= n - 2, got n={n}, d={self.d}", module="endo_cones")
        if len(self.a) != n:
            raise InputError("base point has the wrong dimension", module="endo_cones")
        object.__setattr__(self, "a", as_vector(self.a, self.phi.mode))

    @property
    def n(self) -> int:
        return self.phi.rows

    @property
    def mode(self) -> str:
        return self.phi.mode

    def powers(self, upto: Optional[int] = None) -> List[Matrix]:
        out = [Matrix.identity(self.n, self.mode)]
        for _ in range(self.d if upto is None else upto):
            out.append(out[-1] @ self.phi)
        return out

    @cached_property
    def presentation(self) -> OrbitPresentation:
        zero = as_vector([0] * self.n, self.mode)
        return OrbitPresentation(tuple(AffineField(m, zero) for m in self.powers()), self.a)


def krylov_matrix(phi: Matrix, a: Sequence[Scalar]) -> Matrix:
    cols = [tuple(a)]
    for _ in range(phi.rows - 1):
        cols.append(phi.apply(cols[-1]))
    return from_columns(cols, phi.mode, phi.rows)


def is_cyclic(phi: Matrix, a: Sequence[Scalar], tol: float = DEFAULT_TOL) -> bool:
    return rank(krylov_matrix(phi, as_vector(a, phi.mode)), tol) == phi.rows


def eigenvalues(phi: Matrix) -> List[Eigenvalue]:
    """Spectrum with multiplicity; rational when the characteristic polynomial splits over Q."""
    coeffs, eigs = char_poly_and_eigs(phi)
    if phi.mode == EXACT:
        roots = rational_roots(coeffs)
        if roots is not None:
            return list(roots)
    return list(eigs)


def _normalize(values: Sequence[object]) -> Tuple[List[Eigenvalue], bool]:
    exact = all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in values)
    if exact:
        return [Fraction(v) for v in values], True  # type: ignore[arg-type]
    return [complex(v) for v in values], False  # type: ignore[arg-type]


def _same(u: Sequence[Eigenvalue], v: Sequence[Eigenvalue], exact: bool, tol: float) -> bool:
    if exact:
        return tuple(u) == tuple(v)
    scale = max([1.0] + [abs(x) for x in u] + [abs(x) for x in v])
    return all(abs(x - y) <= tol * scale for x, y in zip(u, v))


@dataclass(frozen=True)
class DeltaSet:
    index: Tuple[int, ...]
    vectors: Tuple[Tuple[Eigenvalue, ...], ...]


def delta_set(values: Sequence[Eigenvalue], index: Sequence[int], d: int, exact: bool, tol: float = EIGEN_MATCH_TOL) -> DeltaSet:
    """{(a_k - a_j, a_k^2 - a_j^2, ..., a_k^d - a_j^d) : k any, j in index}."""
    found: List[Tuple[Eigenvalue, ...]] = []
    for j in index:
        for ak in values:
            aj = values[j]
            vec = tuple(ak ** p - aj ** p for p in range(1, d + 1))
            if not any(_same(vec, w, exact, tol) for w in found):
                found.append(vec)
    return DeltaSet(tuple(index), tuple(found))


def du_condition(eigenvalues: Sequence[object], d: int, tol: float = EIGEN_MATCH_TOL) -> bool:
    """True iff the Delta sets over all (d+1)-subsets meet only in the origin."""
    values, exact = _normalize(eigenvalues)
    n = len(values)
    if not 1 <= d <= n - 1:
        raise InputError(f"d={d} out of range for {n} eigenvalues", module="endo_cones")
    for i in range(n):
        for j in range(i + 1, n):
            if _same((values[i],), (values[j],), exact, tol):
                raise InconsistencyError("eigenvalues are not pairwise distinct: not minimal/diagonalizable-distinct")
    deltas = [delta_set(values, idx, d, exact, tol) for idx in combinations(range(n), d + 1)]
    common = [v for v in deltas[0].vectors if all(any(_same(v, w, exact, tol) for w in ds.vectors) for ds in deltas[1:])]
    zero = tuple([Fraction(0) if exact else 0j] * d)
    logger.debug("DU common points: %s", common)
    return all(_same(v, zero, exact, tol) for v in common)


@dataclass(frozen=True)
class HolPrediction:
    applicable: bool
    reason: str = ""
    dims: Optional[Dict[int, int]] = None
    aut_trivial: bool = False

    @property
    def total(self) -> Optional[int]:
        return sum(self.dims.values()) if self.dims else None

    def to_dict(self) -> Dict[str, Any]:
        if not self.applicable:
            return {"status": "not_applicable", "reason": self.reason}
        return {"status": "predicted", "dims": self.dims, "total": self.total, "aut_trivial": self.aut_trivial}


def predicted_hol(ec: EndoCone, tol: float = EIGEN_MATCH_TOL) -> HolPrediction:
    if not is_cyclic(ec.phi, ec.a):
        return HolPrediction(False, "base point is not a cyclic vector")
    values = eigenvalues(ec.phi)
    try:
        if not du_condition(values, ec.d, tol):
            return HolPrediction(False, "condition DU fails")
    except InconsistencyError as exc:
        return HolPrediction(False, str(exc))
    if minimality_report(ec.presentation).verdict != "minimal":
        return HolPrediction(False, "tube is not certified minimal")
    return HolPrediction(True, dims={-1: ec.n, 0: ec.d + 1}, aut_trivial=True)


def eo_linearized(ec: EndoCone, g0_basis: Sequence[Matrix], tol: float = DEFAULT_TOL) -> str:
    """Solve X a = 0, [X, phi] in span(g0_basis) and report whether every solution commutes with phi.

    This is the tangent-level version of the group condition only.
    """
    if not is_cyclic(ec.phi, ec.a):
        return "inconclusive"
    n, m = ec.n, len(g0_basis)
    mode = ec.mode
    basis = [b if b.mode == mode else b.as_numeric() for b in g0_basis]
    phi = ec.phi.entries
    zero: Scalar = Fraction(0) if mode == EXACT else 0.0
    rows: List[List[Scalar]] = []
    for i in range(n):
        row = [zero] * (n * n + m)
        for j in range(n):
            row[i * n + j] = ec.a[j]
        rows.append(row)
    for i in range(n):
        for j in range(n):
            row = [zero] * (n * n + m)
            # ([X, phi])_ij = sum_k X_ik phi_kj - phi_ik X_kj
            for k in range(n):
                row[i * n + k] += phi[k][j]
                row[k * n + j] -= phi[i][k]
            for l, b in enumerate(basis):
                row[n * n + l] = -b.entries[i][j]
            rows.append(row)
    solutions = nullspace(Matrix.build(rows, mode, n * n + m), tol)
    for sol in solutions:
        x = Matrix.build([list(sol[i * n:(i + 1) * n]) for i in range(n)], mode, n)
        if not ((x @ ec.phi) - (ec.phi @ x)).is_zero(tol):
            return "inconclusive"
    return "holds_infinitesimally"


def cr_dimension(ec: EndoCone) -> int:
    if not is_cyclic(ec.phi, ec.a):
        raise NotApplicable("base point is not a cyclic vector", module="endo_cones")
    dim = len(tangent_space(ec.presentation))
    if dim != ec.d + 1:
        raise InconsistencyError(f"tangent space has dimension {dim}, expected {ec.d + 1}")
    return ec.d + 1


def cyclic_vectors_equivalent(phi: Matrix, d: int, a: Sequence[Scalar], b: Sequence[Scalar]) -> bool:
    """Kernel-chain profiles at two cyclic vectors of the same phi agree."""
    if not (is_cyclic(phi, a) and is_cyclic(phi, b)):
        raise NotApplicable("both vectors must be cyclic for phi", module="endo_cones")
    first = kernel_chain(EndoCone(phi, d, tuple(a)).presentation)
    second = kernel_chain(EndoCone(phi, d, tuple(b)).presentation)
    return first.dims == second.dims and first.order == second.order


def endocone_report(ec: EndoCone, g0_basis: Optional[Sequence[Matrix]] = None) -> Dict[str, Any]:
    cyclic = is_cyclic(ec.phi, ec.a)
    values = eigenvalues(ec.phi)
    report: Dict[str, Any] = {
        "n": ec.n,
        "d": ec.d,
        "a": [format_scalar(x) for x in ec.a],
        "cyclic": cyclic,
        "eigenvalues": [format_scalar(v) if isinstance(v, Fraction) else v for v in values],
    }
    try:
        report["du_condition"] = du_condition(values, ec.d)
    except InconsistencyError as exc:
        report["du_condition"] = None
        report["du_error"] = exc.qualified()
    report["predicted_hol"] = predicted_hol(ec).to_dict()
    if cyclic:
        report["cr_dimension"] = cr_dimension(ec)
    report["eo_linearized"] = eo_linearized(ec, g0_basis if g0_basis is not None else ec.powers())
    return report
