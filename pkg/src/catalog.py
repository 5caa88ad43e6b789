"""Built-in homogeneous examples, their expected invariants, and the ledger that checks them.

Each entry builds a presentation (orbit or level set) from explicit generators and
carries expected values with a provenance note. `run_expected_checks` computes the
invariants and diffs them against the expectations. The tangent surface of the
twisted cubic (EV) is not a cone, so hol cannot be assembled level by level; for it
the five known fields are checked for tangency and bracket closure instead.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .config import (
    DEFAULT_BACKEND,
    DEFAULT_MAX_DEGREE,
    DEFAULT_SEED,
    DEFAULT_TOL,
    EV_TANGENCY_POINTS,
    EV_TANGENCY_TOL,
    TRIPLE_TOL,
)
from .endo_cones import EndoCone, du_condition, eigenvalues, predicted_hol
from .errors import AnalysisError, ClosureViolation, InconsistencyError, InputError
from .hol_solver import (
    GradedLieAlgebra,
    VectorField,
    assemble_hol,
    check_euler_grading,
    isotropy_dimension,
    parity_ok,
    structure_from_fields,
)
from .lie_analysis import InvariantReport, StructureConstants, analyze, analyze_structure, compare_algebras
from .nondegeneracy import levi_kernel, nondegeneracy_order
from .numeric_kernel import EXACT, Matrix, Scalar, char_poly_and_eigs, parse_scalar
from .presentations import AffineField, LevelSetPresentation, OrbitPresentation, PolynomialSurface, Presentation, sample_points
from .utils import jsonable


logger = logging.getLogger(__name__)

Expected = Dict[str, Tuple[Any, str]]

DEFAULT_PARAMS: Dict[str, Dict[str, Scalar]] = {
    "EI": {},
    "EI-nil": {},
    "EY": {"alpha": Fraction(1)},
    "EZ": {},
    "EX": {"alpha": Fraction(-2)},
    "EV": {},
    "EB": {"p": Fraction(2), "q": Fraction(1), "alpha": Fraction(2)},
    "EB-orbit": {"p": Fraction(2), "q": Fraction(1)},
}

DESCRIPTIONS = {
    "EI": "future light cone x1^2 + x2^2 = x3^2, orbit of delta and a boost",
    "EI-nil": "light cone again, orbit of delta and a nilpotent element of so(2,1)",
    "EY": "cone over a spiral: delta and a rotation plus alpha x3 d/dx3 (alpha > 0)",
    "EZ": "x3 = x1 exp(x2 / x1): delta and x1 d/dx2 + x3 d/dx3",
    "EX": "delta and diag(0, 1, alpha), distinct real eigenvalues (alpha < -1)",
    "EV": "tangent surface of the twisted cubic (not a cone)",
    "EB": "level set sum_j eps_j x_j^alpha over p plus and q minus signs",
    "EB-orbit": "quadric cone of signature (p, q) as the orbit of delta and so(p, q)",
}

DEFAULT_RUN = (
    ("EI", {}),
    ("EI-nil", {}),
    ("EY", {"alpha": Fraction(1, 2)}),
    ("EY", {"alpha": Fraction(1)}),
    ("EY", {"alpha": Fraction(2)}),
    ("EZ", {}),
    ("EX", {"alpha": Fraction(-3, 2)}),
    ("EX", {"alpha": Fraction(-2)}),
    ("EX", {"alpha": Fraction(-3)}),
    ("EV", {}),
    ("EB", {"p": Fraction(2), "q": Fraction(1), "alpha": Fraction(2)}),
    ("EB", {"p": Fraction(2), "q": Fraction(1), "alpha": Fraction(3)}),
    ("EB", {"p": Fraction(3), "q": Fraction(1), "alpha": Fraction(2)}),
    ("EB", {"p": Fraction(2), "q": Fraction(2), "alpha": Fraction(2)}),
    ("EB-orbit", {"p": Fraction(2), "q": Fraction(1)}),
)

# S = 0 contains the tangent surface of (s, s^2, s^3)
TWISTED_CUBIC_TANGENTS = (
    ((0, 0, 2), Fraction(1)),
    ((0, 3, 0), Fraction(4)),
    ((1, 1, 1), Fraction(-6)),
    ((2, 2, 0), Fraction(-3)),
    ((3, 0, 1), Fraction(4)),
)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: Dict[str, Scalar]
    presentation: Presentation
    expected: Expected
    endocone: Optional[EndoCone] = None
    candidates: Tuple[VectorField, ...] = ()
    witnesses: Tuple[Tuple[Tuple[Fraction, ...], int], ...] = ()

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(f'{k}={v}' for k, v in self.params.items())})"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "label": self.label,
            "params": {k: str(v) for k, v in self.params.items()},
            "presentation": self.presentation.to_dict(),
            "expected": {k: {"value": jsonable(v), "note": note} for k, (v, note) in self.expected.items()},
        }


def parse_params(text: Optional[str]) -> Dict[str, Scalar]:
    """"alpha=-2,p=2" -> {"alpha": Fraction(-2), "p": Fraction(2)}."""
    params: Dict[str, Scalar] = {}
    if not text:
        return params
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise InputError(f"malformed parameter {item!r}; expected name=value", module="catalog")
        params[key.strip()] = parse_scalar(value.strip())
    return params


def _identity_field(n: int) -> AffineField:
    return AffineField.build([[1 if i == j else 0 for j in range(n)] for i in range(n)])


def _linear_cone(name: str, phi: Sequence[Sequence[object]], base: Sequence[object]) -> Tuple[OrbitPresentation, EndoCone]:
    ec = EndoCone(Matrix.exact(phi), 1, tuple(Fraction(x) for x in base))  # type: ignore[arg-type]
    logger.debug("%s: generators delta and %s", name, phi)
    return ec.presentation, ec


def _five_dim_expected(sigma_real: bool, note: str, du: Optional[bool]) -> Expected:
    out: Expected = {
        "nondeg_order": (2, f"{note}; uniformly 2-nondegenerate"),
        "graded_dims": ({-1: 3, 0: 2}, f"{note}; g_0 = R delta + R phi and g_k = 0 for k > 0"),
        "dim": (5, f"{note}; five-dimensional hol"),
        "solvable": (True, f"{note}; solvable with [g, g] = g_-1"),
        "derived_dims": ((5, 3, 0), f"{note}; commutator of dimension 3, abelian"),
        "commutator_dim": (3, f"{note}; [g, g] = g_-1"),
        "sigma_real": (sigma_real, f"{note}; eigenvalues of ad(phi) on g_-1"),
    }
    if du is not None:
        out["du_condition"] = (du, f"{note}; condition on eigenvalue differences of phi")
    return out


def _quadric_expected(n: int, p: int, q: int, note: str) -> Expected:
    so_dim = n * (n - 1) // 2
    return {
        "nondeg_order": (2, f"{note}; conical with one-dimensional Levi kernel"),
        "graded_dims": ({-1: n, 0: so_dim + 1, 1: n}, f"{note}; g_0 = R delta + so({p},{q}), g_1 conformal"),
        "dim": (math.comb(n + 2, 2), f"{note}; dim g = (n+2 choose 2)"),
        "solvable": (False, f"{note}; simple, isomorphic to so({p + 1},{q + 1})"),
        "killing_nondegenerate": (True, f"{note}; semisimple"),
    }


def _eb_base_point(n: int, p: int, q: int, alpha: int) -> Tuple[Scalar, ...]:
    """x_j = 1 for j < n and x_n solving the equation, exact when the root is rational.

    With a minus sign on x_n that is x_n^alpha = p - q + 1; with q = 0 (odd alpha)
    it is x_n^alpha = -(n - 1).
    """
    target = p - q + 1 if q > 0 else n - 1
    root = round(target ** (1.0 / alpha))
    last: Scalar = Fraction(root) if root ** alpha == target else float(target) ** (1.0 / alpha)
    if q == 0:
        last = -last
    ones: Tuple[Scalar, ...] = tuple(Fraction(1) for _ in range(n - 1))
    return ones + (last,)


def _eb_witnesses(n: int, p: int, q: int, alpha: int) -> Tuple[Tuple[Tuple[Fraction, ...], int], ...]:
    """Rational points of S with zero coordinates; there dim K = 1 + (number of zero coordinates)."""
    if alpha < 3:
        return ()
    points = []
    if q > 0:
        e1_plus = [Fraction(0)] * n
        e1_plus[0] = Fraction(1)
        e1_plus[p] = Fraction(1)
        points.append(tuple(e1_plus))
    if alpha % 2 == 1 and p >= 2:
        e1_minus = [Fraction(0)] * n
        e1_minus[0], e1_minus[1] = Fraction(1), Fraction(-1)
        points.append(tuple(e1_minus))
    return tuple((x, 1 + sum(1 for v in x if v == 0)) for x in points)


def _int_param(params: Dict[str, Scalar], key: str) -> int:
    value = params[key]
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)) or Fraction(value).denominator != 1:
        raise InputError(f"parameter {key} must be an integer, got {value}", module="catalog")
    return int(value)


def _build_ei(params: Dict[str, Scalar]) -> CatalogEntry:
    pres, ec = _linear_cone("EI", [[0, 0, 0], [0, 0, 1], [0, 1, 0]], (1, 0, 1))
    expected = _quadric_expected(3, 2, 1, "EI light cone")
    expected["killing"] = ((6, 4, 0), "EI; inertia of so(2,3)")
    expected["du_condition"] = (False, "EI; phi has eigenvalues {-1, 0, 1} and the condition fails")
    return CatalogEntry("EI", params, pres, expected, ec)


def _build_ei_nil(params: Dict[str, Scalar]) -> CatalogEntry:
    phi = AffineField.build([[0, 1, 0], [-1, 0, 1], [0, 1, 0]])
    pres = OrbitPresentation((_identity_field(3), phi), (Fraction(0), Fraction(-1), Fraction(1)))
    expected = _quadric_expected(3, 2, 1, "EI-nil light cone piece x2 < x3")
    expected["killing"] = ((6, 4, 0), "EI-nil; same cone as EI")
    return CatalogEntry("EI-nil", params, pres, expected)


def _build_ey(params: Dict[str, Scalar]) -> CatalogEntry:
    alpha = params["alpha"]
    if not alpha > 0:
        raise InputError("EY needs alpha > 0", module="catalog")
    pres, ec = _linear_cone("EY", [[0, -1, 0], [1, 0, 0], [0, 0, alpha]], (1, 0, 1))
    return CatalogEntry("EY", params, pres, _five_dim_expected(False, "EY", True), ec)


def _build_ez(params: Dict[str, Scalar]) -> CatalogEntry:
    pres, ec = _linear_cone("EZ", [[0, 0, 0], [1, 0, 0], [0, 0, 1]], (1, 0, 1))
    expected = _five_dim_expected(True, "EZ", None)
    expected["sigma"] = ((-0.5, -0.5, 1.0), "EZ; raw spectrum {0, 0, 1} normalized")
    return CatalogEntry("EZ", params, pres, expected, ec)


def _build_ex(params: Dict[str, Scalar]) -> CatalogEntry:
    alpha = params["alpha"]
    if not alpha < -1:
        raise InputError("EX needs alpha < -1", module="catalog")
    pres, ec = _linear_cone("EX", [[0, 0, 0], [0, 1, 0], [0, 0, alpha]], (1, 1, 1))
    return CatalogEntry("EX", params, pres, _five_dim_expected(True, "EX", True), ec)


def ev_surface() -> PolynomialSurface:
    # weighted homogeneous for weights (1, 2, 3), so not a level-set presentation
    return PolynomialSurface(3, TWISTED_CUBIC_TANGENTS)


def _build_ev(params: Dict[str, Scalar]) -> CatalogEntry:
    zeta = AffineField.build([[1, 0, 0], [0, 2, 0], [0, 0, 3]])
    eta = AffineField.build([[0, 0, 0], [2, 0, 0], [0, 3, 0]], [1, 0, 0])
    pres = OrbitPresentation((zeta, eta), (Fraction(1), Fraction(0), Fraction(0)))
    candidates = tuple(
        VectorField.constant([1 if i == j else 0 for i in range(3)], imaginary=True) for j in range(3)
    ) + (VectorField.from_affine(eta), VectorField.from_affine(zeta))
    note = "EV tangent surface of the twisted cubic"
    expected: Expected = {
        "nondeg_order": (2, f"{note}; 2-nondegenerate"),
        "dim": (5, f"{note}; five-dimensional, containment only"),
        "solvable": (True, f"{note}; solvable"),
        "commutator_dim": (4, f"{note}; commutator ideal of dimension 4"),
        "derived_dims": ((5, 4, 2, 0), f"{note}; derived series"),
        "ad_zeta_spectrum": ((-3, -2, -1, -1, 0), f"{note}; Z-grading by ad(zeta)"),
        "tangent": (True, f"{note}; candidate fields tangent at sampled points"),
        "bracket_closed": (True, f"{note}; candidate fields closed under the bracket"),
    }
    return CatalogEntry("EV", params, pres, expected, candidates=candidates)


def _build_eb(params: Dict[str, Scalar]) -> CatalogEntry:
    p, q, alpha = _int_param(params, "p"), _int_param(params, "q"), _int_param(params, "alpha")
    n = p + q
    if not (p >= q >= 0 and n >= 3 and alpha >= 2):
        raise InputError("EB needs p >= q >= 0, p + q >= 3 and an integer alpha >= 2", module="catalog")
    if q == 0 and alpha % 2 == 0:
        raise InputError("EB with q = 0 and even alpha has no real points besides 0", module="catalog")
    terms = tuple(
        (tuple(alpha if i == j else 0 for i in range(n)), Fraction(1 if j < p else -1)) for j in range(n)
    )
    pres = LevelSetPresentation(n, terms, _eb_base_point(n, p, q, alpha))
    note = f"EB({p},{q},{alpha})"
    if alpha == 2:
        expected = _quadric_expected(n, p, q, note)
    else:
        expected = {
            "nondeg_order": (2, f"{note}; conical with K = R x at generic points"),
            "graded_dims": ({-1: n, 0: 1}, f"{note}; g_0 = R delta and g_k = 0 for k > 0"),
            "dim": (n + 1, f"{note}; dim g = n + 1"),
            "locally_homogeneous_possible": (False, f"{note}; dim g = n + 1 < dim M"),
        }
    witnesses = _eb_witnesses(n, p, q, alpha)
    if witnesses:
        expected["kernel_profile"] = (tuple(d for _, d in witnesses) + (1,), f"{note}; dim K_x = 1 + d(x)")
    return CatalogEntry("EB", params, pres, expected, witnesses=witnesses)


def _build_eb_orbit(params: Dict[str, Scalar]) -> CatalogEntry:
    p, q = _int_param(params, "p"), _int_param(params, "q")
    n = p + q
    if not (p >= q >= 1 and n >= 3):
        raise InputError("EB-orbit needs p >= q >= 1 and p + q >= 3", module="catalog")
    signs = [1] * p + [-1] * q
    fields = [_identity_field(n)]
    for i in range(n):
        for j in range(i + 1, n):
            rows = [[0] * n for _ in range(n)]
            rows[i][j] = signs[i]
            rows[j][i] = -signs[j]
            fields.append(AffineField.build(rows))
    base = [Fraction(0)] * n
    base[0] = base[p] = Fraction(1)
    pres = OrbitPresentation(tuple(fields), tuple(base))
    return CatalogEntry("EB-orbit", params, pres, _quadric_expected(n, p, q, f"EB-orbit({p},{q})"))


BUILDERS: Dict[str, Callable[[Dict[str, Scalar]], CatalogEntry]] = {
    "EI": _build_ei,
    "EI-nil": _build_ei_nil,
    "EY": _build_ey,
    "EZ": _build_ez,
    "EX": _build_ex,
    "EV": _build_ev,
    "EB": _build_eb,
    "EB-orbit": _build_eb_orbit,
}


def build_entry(name: str, params: Optional[Dict[str, Scalar]] = None) -> CatalogEntry:
    if name not in BUILDERS:
        raise InputError(f"unknown catalog entry {name!r}; choose from {', '.join(BUILDERS)}", module="catalog")
    merged = dict(DEFAULT_PARAMS[name])
    for key, value in (params or {}).items():
        if key not in merged:
            raise InputError(f"{name} takes no parameter {key!r}", module="catalog")
        merged[key] = value
    return BUILDERS[name](merged)


def list_entries() -> pd.DataFrame:
    rows = [
        {"name": name, "defaults": ", ".join(f"{k}={v}" for k, v in DEFAULT_PARAMS[name].items()), "description": DESCRIPTIONS[name]}
        for name in BUILDERS
    ]
    return pd.DataFrame(rows)


# --- the non-conical example ---------------------------------------------------

@dataclass(frozen=True)
class CandidateVerification:
    tangency_residual: float
    structure: Optional[StructureConstants]
    ad_spectrum: Tuple[float, ...]
    closure_error: Optional[str] = None
    completeness: str = "containment verified only"

    @property
    def tangent(self) -> bool:
        return self.tangency_residual <= EV_TANGENCY_TOL

    @property
    def bracket_closed(self) -> bool:
        return self.structure is not None

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "tangency_residual": self.tangency_residual,
            "tangent": self.tangent,
            "bracket_closed": self.bracket_closed,
            "ad_spectrum": list(self.ad_spectrum),
            "completeness": self.completeness,
        }
        if self.closure_error:
            out["closure_error"] = self.closure_error
        return out


def verify_candidate_algebra(
    entry: CatalogEntry, seed: int = DEFAULT_SEED, surface: Optional[PolynomialSurface] = None
) -> CandidateVerification:
    """Tangency of the candidate fields along M, then their structure constants (exact).

    A bracket leaving the span of the candidates is reported, not raised.
    """
    surface = surface or ev_surface()
    rng = np.random.default_rng(seed)
    points = sample_points(entry.presentation, EV_TANGENCY_POINTS, seed)  # type: ignore[arg-type]
    worst = 0.0
    for x in points:
        grad = np.array([float(g) for g in surface.gradient(x)])
        z = np.array(x) + 1j * rng.uniform(-1.0, 1.0, size=3)
        for f in entry.candidates:
            re = f(z).real
            scale = float(np.linalg.norm(grad)) * max(1.0, float(np.linalg.norm(re)))
            worst = max(worst, abs(float(grad @ re)) / scale)
    try:
        structure = structure_from_fields(entry.candidates, EXACT)
    except ClosureViolation as exc:
        logger.warning("%s candidates: %s", entry.label, exc)
        return CandidateVerification(worst, None, (), str(exc))
    _, eigs = char_poly_and_eigs(structure.ad_basis(len(entry.candidates) - 1))
    spectrum = tuple(sorted(round(z.real, 9) for z in eigs))
    logger.debug("EV candidates: tangency residual %.3g, ad(zeta) spectrum %s", worst, spectrum)
    return CandidateVerification(worst, structure, spectrum)


# --- ledgers --------------------------------------------------------------------

@dataclass
class CatalogResult:
    label: str
    ledger: pd.DataFrame
    invariants: Optional[InvariantReport] = None
    report: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.ledger["passed"].all()) if len(self.ledger) else False


def _normalize(value: Any) -> Any:
    if isinstance(value, dict):
        return {int(k): v for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return tuple(_normalize(v) for v in value)
    return value


def _matches(key: str, expected: Any, actual: Any) -> bool:
    if actual is None:
        return False
    if key == "sigma":
        return len(expected) == len(actual) and all(abs(complex(a) - complex(e)) <= TRIPLE_TOL for e, a in zip(expected, actual))
    if key == "ad_zeta_spectrum":
        return len(expected) == len(actual) and all(abs(float(a) - float(e)) <= TRIPLE_TOL for e, a in zip(expected, actual))
    return _normalize(expected) == _normalize(actual)


def _kernel_profile(entry: CatalogEntry) -> Tuple[int, ...]:
    p = entry.presentation
    assert isinstance(p, LevelSetPresentation)
    dims = [len(levi_kernel(replace(p, base_point=x))) for x, _ in entry.witnesses]
    dims.append(len(levi_kernel(p)))
    return tuple(dims)


def _algebra_facts(G: GradedLieAlgebra, inv: InvariantReport, p: Presentation) -> Dict[str, Any]:
    iso = isotropy_dimension(G, p)
    facts = {
        "graded_dims": G.graded_dims,
        "dim": G.dim,
        "solvable": inv.solvable,
        "derived_dims": inv.derived.dims,
        "commutator_dim": inv.commutator_dim,
        "killing": inv.killing.as_tuple(),
        "killing_nondegenerate": inv.killing.nondegenerate,
        "locally_homogeneous_possible": iso.locally_homogeneous_possible,
        "grading_ok": check_euler_grading(G),
        "parity_ok": parity_ok(G),
    }
    if inv.sigma is not None:
        facts["sigma"] = inv.sigma.values
        facts["sigma_real"] = inv.sigma.real
    return facts


def run_expected_checks(
    entry: CatalogEntry,
    backend: str = DEFAULT_BACKEND,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> CatalogResult:
    p = entry.presentation
    verdict = nondegeneracy_order(p, seed=seed)
    actual: Dict[str, Any] = {"nondeg_order": verdict.order}
    report: Dict[str, Any] = {"entry": entry.label, "nondegeneracy": verdict.to_dict()}
    inv: Optional[InvariantReport] = None
    if entry.candidates:
        check = verify_candidate_algebra(entry, seed)
        actual.update({"tangent": check.tangent, "bracket_closed": check.bracket_closed})
        if check.structure is not None:
            inv = analyze_structure(check.structure)
            actual.update(
                {
                    "dim": inv.dim,
                    "solvable": inv.solvable,
                    "commutator_dim": inv.commutator_dim,
                    "derived_dims": inv.derived.dims,
                    "ad_zeta_spectrum": check.ad_spectrum,
                }
            )
        report["candidates"] = check.to_dict()
    else:
        G = assemble_hol(p, max_degree, backend, tol, seed)
        inv = analyze(G)
        actual.update(_algebra_facts(G, inv, p))
        report["hol"] = {"graded_dims": G.graded_dims, "backend": G.backend, "evidence": G.evidence}
        report["isotropy"] = isotropy_dimension(G, p).to_dict()
    if entry.endocone is not None:
        try:
            actual["du_condition"] = du_condition(eigenvalues(entry.endocone.phi), entry.endocone.d)
        except InconsistencyError:
            actual["du_condition"] = None
        report["predicted_hol"] = predicted_hol(entry.endocone).to_dict()
    if entry.witnesses:
        actual["kernel_profile"] = _kernel_profile(entry)
    if inv is not None:
        report["invariants"] = inv.to_dict()

    rows = []
    for key, (value, note) in entry.expected.items():
        got = actual.get(key)
        ok = _matches(key, value, got)
        if not ok:
            logger.warning("%s: %s expected %s, got %s", entry.label, key, value, got)
        rows.append({"entry": entry.label, "check": key, "expected": str(jsonable(value)), "actual": str(jsonable(got)), "passed": ok, "note": note})
    for key in ("grading_ok", "parity_ok"):
        if key in actual:
            rows.append({"entry": entry.label, "check": key, "expected": "True", "actual": str(actual[key]), "passed": bool(actual[key]), "note": "graded structure"})
    return CatalogResult(entry.label, pd.DataFrame(rows), inv, report)


def _failed_result(label: str, exc: Exception) -> CatalogResult:
    message = exc.qualified() if isinstance(exc, AnalysisError) else f"{type(exc).__name__}: {exc}"
    row = {"entry": label, "check": "run", "expected": "completes", "actual": message, "passed": False, "note": "exception"}
    return CatalogResult(label, pd.DataFrame([row]), None, {"entry": label, "error": message})


def _run_one(name: str, params: Dict[str, Scalar], backend: str, tol: float, seed: int, max_degree: int) -> CatalogResult:
    label = name
    try:
        entry = build_entry(name, params)
        label = entry.label
        return run_expected_checks(entry, backend, tol, seed, max_degree)
    except Exception as exc:
        logger.exception("catalog entry %s failed", label)
        return _failed_result(label, exc)


def run_catalog(
    entries: Sequence[Tuple[str, Dict[str, Scalar]]] = DEFAULT_RUN,
    backend: str = DEFAULT_BACKEND,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    max_degree: int = DEFAULT_MAX_DEGREE,
    n_jobs: int = 1,
) -> List[CatalogResult]:
    """Run every entry (in parallel when n_jobs != 1); results sorted by label."""
    results = Parallel(n_jobs=n_jobs)(
        delayed(_run_one)(name, params, backend, tol, seed, max_degree) for name, params in entries
    )
    return sorted((r for r in results if r is not None), key=lambda r: r.label)


def ledger_frame(results: Sequence[CatalogResult]) -> pd.DataFrame:
    if not results:
        return pd.DataFrame(columns=["entry", "check", "expected", "actual", "passed", "note"])
    return pd.concat([r.ledger for r in results], ignore_index=True)


def pairwise_comparison(results: Sequence[CatalogResult]) -> pd.DataFrame:
    rows = []
    usable = [r for r in results if r.invariants is not None]
    for i, first in enumerate(usable):
        for second in usable[i + 1:]:
            verdict = compare_algebras(first.invariants, second.invariants)  # type: ignore[arg-type]
            rows.append({"first": first.label, "second": second.label, "verdict": verdict.verdict, "reasons": ",".join(verdict.reasons)})
    return pd.DataFrame(rows, columns=["first", "second", "verdict", "reasons"])
