from dataclasses import replace
from fractions import Fraction

import pandas as pd
import pytest

from src.catalog import (
    DEFAULT_RUN,
    build_entry,
    ev_surface,
    list_entries,
    pairwise_comparison,
    parse_params,
    run_catalog,
    run_expected_checks,
    verify_candidate_algebra,
)
from src.errors import InputError
from src.numeric_kernel import NUMERIC


def assert_passed(result):
    failed = result.ledger[~result.ledger["passed"]]
    assert failed.empty, failed.to_string()


def test_parse_params():
    assert parse_params("alpha=-2, p=2") == {"alpha": Fraction(-2), "p": Fraction(2)}
    assert parse_params(None) == {}
    with pytest.raises(InputError):
        parse_params("alpha")


@pytest.mark.parametrize(
    "name, params",
    [
        ("EQ", {}),
        ("EY", {"alpha": Fraction(-1)}),
        ("EX", {"alpha": Fraction(-1, 2)}),
        ("EB", {"p": Fraction(1), "q": Fraction(2)}),
        ("EB", {"alpha": Fraction(5, 2)}),
        ("EZ", {"alpha": Fraction(1)}),
        ("EB", {"p": Fraction(3), "q": Fraction(0), "alpha": Fraction(2)}),
        ("EB", {"p": 2, "q": 1, "alpha": True}),
    ],
)
def test_build_entry_rejects(name, params):
    with pytest.raises(InputError):
        build_entry(name, params)


def test_labels():
    assert build_entry("EY").label == "EY(alpha=1)"
    assert build_entry("EZ").label == "EZ"
    assert build_entry("EB", {"alpha": Fraction(3)}).label == "EB(p=2, q=1, alpha=3)"


def test_list_entries():
    frame = list_entries()
    assert isinstance(frame, pd.DataFrame)
    assert len(frame) == 8
    assert set(frame["name"]) >= {"EI", "EY", "EZ", "EX", "EV", "EB"}


def test_eb_base_points():
    exact = build_entry("EB", {"p": Fraction(2), "q": Fraction(2)}).presentation
    assert exact.base_point == (1, 1, 1, 1)
    numeric = build_entry("EB").presentation
    assert numeric.mode == NUMERIC
    assert numeric.base_point[2] == pytest.approx(2 ** 0.5)


def test_eb_witnesses():
    entry = build_entry("EB", {"alpha": Fraction(3)})
    assert entry.witnesses == (
        ((Fraction(1), Fraction(0), Fraction(1)), 2),
        ((Fraction(1), Fraction(-1), Fraction(0)), 2),
    )
    assert build_entry("EB").witnesses == ()


def test_eb_accepts_plain_ints():
    entry = build_entry("EB", {"p": 2, "q": 1, "alpha": 3})
    assert entry.label == "EB(p=2, q=1, alpha=3)"
    assert entry.presentation.n == 3


def test_fermat_cubic():
    # x1^3 + x2^3 + x3^3 = 0, every sign positive
    entry = build_entry("EB", {"p": 3, "q": 0, "alpha": 3})
    assert entry.presentation.base_point[:2] == (1, 1)
    assert entry.presentation.base_point[2] == pytest.approx(-(2 ** (1 / 3)))
    assert entry.witnesses == (((Fraction(1), Fraction(-1), Fraction(0)), 2),)
    result = run_expected_checks(entry)
    assert_passed(result)
    assert result.invariants.dim == 4


def test_twisted_cubic_surface():
    s = ev_surface()
    assert s.value((Fraction(1), Fraction(1), Fraction(1))) == 0
    assert s.value((Fraction(2), Fraction(3), Fraction(4))) == 0
    assert s.gradient((Fraction(1), Fraction(0), Fraction(0))) == (0, 0, 4)


def test_twisted_cubic_candidates():
    check = verify_candidate_algebra(build_entry("EV"))
    assert check.tangent
    assert check.ad_spectrum == pytest.approx((-3, -2, -1, -1, 0))
    assert check.completeness == "containment verified only"
    assert check.bracket_closed
    # [zeta, eta] = -eta
    assert check.structure.table[4][3] == (0, 0, 0, -1, 0)


def test_twisted_cubic_surface_is_weighted_homogeneous():
    s = ev_surface()
    for t in (Fraction(2), Fraction(-1, 3)):
        point = (t * 2, t ** 2 * 3, t ** 3 * 4)
        assert s.value(point) == 0


def test_open_candidate_bracket_is_reported():
    entry = build_entry("EV")
    c = entry.candidates
    # without i d/dz3 the bracket [eta, i d/dz2] leaves the span
    broken = replace(entry, candidates=(c[0], c[1], c[3], c[4]))
    check = verify_candidate_algebra(broken)
    assert check.tangent
    assert not check.bracket_closed
    assert check.closure_error
    result = run_expected_checks(broken)
    assert not result.passed
    row = result.ledger.set_index("check").loc["bracket_closed"]
    assert row["actual"] == "False"
    assert result.invariants is None


@pytest.mark.parametrize(
    "name, params",
    [
        ("EY", {"alpha": Fraction(1)}),
        ("EY", {"alpha": Fraction(2)}),
        ("EZ", {}),
        ("EX", {"alpha": Fraction(-2)}),
        ("EV", {}),
        ("EB", {"alpha": Fraction(2)}),
        ("EB", {"alpha": Fraction(3)}),
    ],
)
def test_expected_checks(name, params):
    result = run_expected_checks(build_entry(name, params))
    assert result.passed
    assert_passed(result)


def test_ledger_columns():
    result = run_expected_checks(build_entry("EZ"))
    assert list(result.ledger.columns) == ["entry", "check", "expected", "actual", "passed", "note"]
    assert {"grading_ok", "parity_ok", "sigma"} <= set(result.ledger["check"])


def test_failures_become_ledger_rows():
    results = run_catalog([("EY", {"alpha": Fraction(-1)})])
    assert len(results) == 1
    assert not results[0].passed
    assert results[0].ledger.iloc[0]["check"] == "run"


@pytest.mark.slow
@pytest.mark.parametrize(
    "name, params",
    [
        ("EI", {}),
        ("EI-nil", {}),
        ("EB", {"p": Fraction(3), "q": Fraction(1), "alpha": Fraction(2)}),
        ("EB", {"p": Fraction(2), "q": Fraction(2), "alpha": Fraction(2)}),
        ("EB-orbit", {}),
    ],
)
def test_expected_checks_slow(name, params):
    assert_passed(run_expected_checks(build_entry(name, params)))


@pytest.mark.slow
def test_light_cone_presentations_agree():
    reports = [run_expected_checks(build_entry(name)).invariants for name in ("EI", "EI-nil", "EB")]
    assert reports[0].to_dict() == reports[1].to_dict() == reports[2].to_dict()


@pytest.mark.slow
def test_five_dimensional_examples_are_pairwise_distinct():
    entries = [
        ("EY", {"alpha": Fraction(1, 2)}),
        ("EY", {"alpha": Fraction(1)}),
        ("EY", {"alpha": Fraction(2)}),
        ("EZ", {}),
        ("EX", {"alpha": Fraction(-3, 2)}),
        ("EX", {"alpha": Fraction(-2)}),
        ("EX", {"alpha": Fraction(-3)}),
    ]
    results = run_catalog(entries)
    assert all(r.passed for r in results)
    comparisons = pairwise_comparison(results)
    assert len(comparisons) == 21
    assert (comparisons["verdict"] == "distinct").all()


@pytest.mark.slow
def test_quadric_spirals_and_twisted_cubic_are_pairwise_distinct():
    entries = [
        ("EI", {}),
        ("EY", {"alpha": Fraction(1)}),
        ("EY", {"alpha": Fraction(2)}),
        ("EZ", {}),
        ("EX", {"alpha": Fraction(-2)}),
        ("EX", {"alpha": Fraction(-3)}),
        ("EV", {}),
    ]
    results = run_catalog(entries)
    for result in results:
        assert_passed(result)
    comparisons = pairwise_comparison(results)
    assert len(comparisons) == 21
    assert (comparisons["verdict"] == "distinct").all()
    ev_rows = comparisons[(comparisons["first"] == "EV") | (comparisons["second"] == "EV")]
    assert len(ev_rows) == 6


@pytest.mark.slow
def test_default_run():
    results = run_catalog(DEFAULT_RUN, n_jobs=2)
    assert len(results) == len(DEFAULT_RUN)
    assert all(r.passed for r in results)
