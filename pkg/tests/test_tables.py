import json

import numpy as np
import pytest

from pdm_spectra.errors import InvalidParameterError
from pdm_spectra.profiles import build_model
from pdm_spectra.tables import (
    TABLES,
    closed_form_spectrum,
    compute_row,
    get_table,
    parabolic_case,
    reproduce_table,
    row_window,
)


def test_presets_are_complete():
    assert sorted(TABLES) == [f"T{i}" for i in range(1, 9)]
    for t in TABLES.values():
        keys = {c.key for c in t.cases}
        for r in t.rows:
            assert r.case in keys
            assert 0 < len(r.values) <= t.columns
            assert list(r.values) == sorted(r.values)
    assert get_table("t4") is TABLES["T4"]
    with pytest.raises(InvalidParameterError):
        get_table("T9")


def test_row_window_pads_and_clips():
    t = get_table("T1")
    case = t.default_case
    model = case.model()
    lo, hi = row_window(case, model, (-8.0, -4.0))
    assert (lo, hi) == pytest.approx((-8.8, -3.2))
    lo, hi = row_window(case, model, (-8.0, -1.0))
    assert hi == model.threshold
    lo, hi = row_window(case, model, (-5.0,))
    assert (lo, hi) == pytest.approx((-6.0, -4.0))


def test_parabolic_case_units():
    c1, c2 = parabolic_case(1.0), parabolic_case(2.0)
    assert c1.unit == "meV"
    m1, m2 = c1.model(), c2.model()
    assert m2.z1 == pytest.approx(m1.z1 / 2)
    np.testing.assert_allclose(c1.to_report(c1.from_report([50.0, 120.0])), [50.0, 120.0], rtol=1e-14)
    # same meV value maps to four times the dimensionless energy at twice L0
    assert c2.from_report(50.0) == pytest.approx(4 * c1.from_report(50.0))


def test_closed_form_rows_of_t8():
    report = reproduce_table("T8", rows=[r for r in get_table("T8").rows if r.method == "closedform"])
    assert report.passed
    assert all(len(r.cells) == 3 for r in report.rows)


def test_closed_form_spectrum_window():
    t = get_table("T7")
    model = t.default_case.model()
    E = closed_form_spectrum(model, "bdd", 0.0, 16.0)
    assert E.size >= 2 and np.all(np.diff(E) > 0) and E.max() <= 16.0


def test_report_formats():
    t = get_table("T4")
    row = next(r for r in t.rows if r.method == "transcendental" and r.ordering == "bdd")
    report = reproduce_table("T4", rows=[row])
    assert report.passed
    doc = json.loads(report.to_json())
    assert doc["table"] == "T4" and doc["passed"] is True
    assert [c["level"] for c in doc["cells"]] == [0, 1, 2]
    csv = report.to_csv().splitlines()
    assert csv[0] == "case,label,ordering,method,level,printed,computed,diff,tol,unit"
    assert len(csv) == 4
    md = report.to_markdown()
    assert md.startswith("## T4") and md.rstrip().endswith("overall: PASS")


def test_compute_row_with_custom_window():
    t = get_table("T4")
    row = next(r for r in t.rows if r.method == "transcendental" and r.ordering == "bdd")
    # a window reaching the threshold finds levels above the printed three
    model = t.default_case.model()
    E = compute_row(t, row, window=(-9.0, model.threshold))
    assert E.size >= 3
    np.testing.assert_allclose(E[:3], row.values, atol=1e-3)
