import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .config import DEFAULT_SEED, DEFAULT_UNIFORMITY_SAMPLES
from .errors import InconsistencyError, InputError, PresentationError, UndecidedError
from .numeric_kernel import (
    EXACT,
    NUMERIC,
    Matrix,
    Scalar,
    Vector,
    annihilator,
    as_vector,
    data_scale,
    format_scalar,
    in_span,
    nullspace,
    rank,
)
from .presentations import (
    LevelSetPresentation,
    OrbitPresentation,
    Presentation,
    is_conical,
    point_mode,
    sample_surface_points,
    second_fundamental_form,
    tangent_frame,
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelChain:
    """K^0 = T_aF, K^1, ... as bases in R^n; `order` is set iff the chain reached 0."""

    point: Vector
    spaces: Tuple[Tuple[Vector, ...], ...]
    terminal: str
    order: Optional[int] = None
    max_k: int = 0

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.spaces)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": [format_scalar(x) for x in self.point],
            "dims": list(self.dims),
            "terminal": self.terminal,
            "order": self.order,
            "spaces": [[[format_scalar(x) for x in v] for v in s] for s in self.spaces],
        }


def levi_kernel(p: Presentation, a: Optional[Sequence[Scalar]] = None) -> List[Vector]:
    return second_fundamental_form(p, a).radical()


def _refine(current: Sequence[Vector], linear_parts: Sequence[Matrix], n: int, mode: str, tol: float) -> List[Vector]:
    """{v in span(current) : L v in span(current) for every L}."""
    zero: Scalar = Fraction(0) if mode == EXACT else 0.0
    ann = annihilator(current, n, mode, tol)
    if not ann:
        return list(current)
    rows = []
    for lin in linear_parts:
        images = [lin.apply(b) for b in current]
        for y in ann:
            rows.append([sum((yi * wi for yi, wi in zip(y, w)), zero) for w in images])
    atol = tol * data_scale(rows) if mode == NUMERIC else 0.0
    coeffs = nullspace(Matrix.build(rows, mode, len(current)), tol, atol)
    return [tuple(sum((c * b[k] for c, b in zip(cv, current)), zero) for k in range(n)) for cv in coeffs]


def kernel_chain(
    p: Presentation,
    a: Optional[Sequence[Scalar]] = None,
    max_k: Optional[int] = None,
    generator_subset: Optional[Sequence[int]] = None,
) -> KernelChain:
    """Iterate K^{k+1} = {v in K^k : lambda^g(v) in K^k} over an independent generating subset."""
    if not isinstance(p, OrbitPresentation):
        raise UndecidedError("kernel chain needs an orbit presentation; level sets are only certified by the conical corollary")
    point = p.base_point if a is None else tuple(a)
    idx, basis, mode = tangent_frame(p, point)
    if generator_subset is not None:
        idx = list(generator_subset)
        values = [as_vector(p.generators[i](point), mode) for i in idx]
        if len(idx) != p.dimension or rank(Matrix.build(values, mode, p.n), p.tol, p.tol * data_scale(values) if mode == NUMERIC else 0.0) != p.dimension:
            raise PresentationError("generator subset does not evaluate to a basis of the tangent space", module="nondegeneracy")
    limit = p.n if max_k is None else max_k
    if limit < 2:
        raise InputError("max_k must be at least 2", module="nondegeneracy")
    linear_parts = [p.generators[i].linear if mode == p.mode else p.generators[i].linear.as_numeric() for i in idx]

    spaces: List[Tuple[Vector, ...]] = [tuple(basis)]
    terminal = "undecided"
    order = None
    for k in range(limit):
        current = spaces[-1]
        nxt = _refine(current, linear_parts, p.n, mode, p.tol)
        if len(nxt) > len(current):
            raise InconsistencyError(f"kernel chain grew from {len(current)} to {len(nxt)}", module="nondegeneracy")
        spaces.append(tuple(nxt))
        if len(nxt) == len(current):
            terminal = "stabilized_nonzero"
            break
        if not nxt:
            terminal = "zero"
            order = k + 1
            break
    logger.debug("kernel chain at %s: dims %s (%s)", point, [len(s) for s in spaces], terminal)
    return KernelChain(tuple(point), tuple(spaces), terminal, order, limit)


@dataclass(frozen=True)
class UniformityReport:
    points: Tuple[Vector, ...]
    dims: Tuple[Tuple[int, ...], ...]

    @property
    def uniform(self) -> bool:
        return len(set(self.dims)) <= 1

    def to_dict(self) -> Dict[str, Any]:
        return {"uniform": self.uniform, "dims": [list(d) for d in self.dims], "samples": len(self.points) - 1}


def uniformity_check(
    p: Presentation,
    samples: int = DEFAULT_UNIFORMITY_SAMPLES,
    seed: int = DEFAULT_SEED,
    max_k: Optional[int] = None,
) -> UniformityReport:
    """Kernel dimensions at the base point and at sampled points of F."""
    points = [p.base_point] + (sample_surface_points(p, samples, seed) if samples else [])
    if isinstance(p, OrbitPresentation):
        dims = [kernel_chain(p, x, max_k).dims for x in points]
    else:
        dims = [(p.dimension, len(levi_kernel(p, x))) for x in points]
    return UniformityReport(tuple(tuple(x) for x in points), tuple(dims))


def conical_corollary(p: Presentation, samples: int = DEFAULT_UNIFORMITY_SAMPLES, seed: int = DEFAULT_SEED) -> bool:
    """dim F >= 2, F conical and K^1 = R x at the base point and sampled points; then the order is 2."""
    if p.dimension < 2 or not is_conical(p, samples, seed):
        return False
    points = [p.base_point] + sample_surface_points(p, samples, seed)
    for x in points:
        kernel = levi_kernel(p, x)
        mode = point_mode(p, x)
        if len(kernel) != 1 or not in_span(kernel, as_vector(x, mode), mode, p.tol):
            return False
    return True


@dataclass(frozen=True)
class NondegeneracyVerdict:
    status: str
    order: Optional[int] = None
    certificate: Optional[str] = None
    chain: Optional[KernelChain] = None
    uniformity: Optional[UniformityReport] = None
    detail: str = ""

    @property
    def finite(self) -> bool:
        return self.status == "order"

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"status": self.status, "order": self.order, "certificate": self.certificate, "detail": self.detail}
        if self.chain is not None:
            out["kernel_dims"] = list(self.chain.dims)
        if self.uniformity is not None:
            out["uniformity"] = self.uniformity.to_dict()
        return out


def nondegeneracy_order(
    p: Presentation,
    a: Optional[Sequence[Scalar]] = None,
    max_k: Optional[int] = None,
    samples: int = DEFAULT_UNIFORMITY_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> NondegeneracyVerdict:
    if isinstance(p, OrbitPresentation):
        chain = kernel_chain(p, a, max_k)
        uniformity = uniformity_check(p, samples, seed, max_k)
        if not uniformity.uniform:
            raise UndecidedError(f"kernel dimensions differ across sampled points: {[list(d) for d in uniformity.dims]}")
        if chain.terminal == "zero":
            return NondegeneracyVerdict("order", chain.order, "kernel_chain", chain, uniformity)
        if chain.terminal == "stabilized_nonzero":
            return NondegeneracyVerdict("holomorphically_degenerate", None, "kernel_chain", chain, uniformity)
        logger.warning("kernel chain undecided after %d steps", chain.max_k)
        return NondegeneracyVerdict("undecided", None, None, chain, uniformity, f"undecided({chain.max_k})")

    uniformity = uniformity_check(p, samples, seed)
    if conical_corollary(p, samples, seed):
        return NondegeneracyVerdict("order", 2, "conical_corollary", None, uniformity)
    if all(d[1] == 0 for d in uniformity.dims):
        return NondegeneracyVerdict("order", 1, "levi_nondegenerate", None, uniformity)
    if isinstance(p, LevelSetPresentation) and all(d[1] == d[0] for d in uniformity.dims):
        # Levi-flat everywhere sampled: the chain cannot move past K^1
        return NondegeneracyVerdict("holomorphically_degenerate", None, "levi_flat", None, uniformity)
    return NondegeneracyVerdict("unknown", None, None, None, uniformity, "level set without an orbit presentation")
