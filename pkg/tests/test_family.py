import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ahgraph.errors import ConfigError
from ahgraph.family import (COLUMNS, FamilySpec, csv_text, emit_csv, format_cell,
                            frozen_constants, run_family)

HEADER = ("mass,mass_numeric,h0,gap,gap_ratio,penrose_margin,vol_omega,vol_ball,vol_gap,"
          "flat_bound,D0,C0_slack,cap_min_ratio,cap_pass")


@pytest.fixture(scope="module")
def family():
    return run_family(FamilySpec(masses=(1.0, 0.5, 0.1, 0.02), cap_samples=2000))


def test_header_and_shape(family, tmp_path):
    path = tmp_path / "report.csv"
    emit_csv(family, path)
    lines = path.read_text().splitlines()
    assert lines[0] == HEADER and ",".join(COLUMNS) == HEADER
    assert len(lines) == 5


def test_rows_follow_spec_order_and_recover_mass(family):
    assert family.column("mass") == [1.0, 0.5, 0.1, 0.02]
    for m, est in zip(family.column("mass"), family.column("mass_numeric")):
        assert est == pytest.approx(m, rel=1e-3)


def test_out_of_hypothesis_member_keeps_its_row(family):
    first = family.rows[0]
    assert first["vol_omega"] > first["vol_ball"]
    assert first["cap_pass"] is True
    assert all(isinstance(r["vol_gap"], float) for r in family.rows)


def test_volume_gap_shrinks_along_family(family):
    gaps = family.column("vol_gap")
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_constants_frozen_from_largest_mass(family):
    spec = family.spec
    rho0, gamma, depth = frozen_constants(spec)
    assert family.constants == (rho0, gamma, depth)
    assert rho0 <= spec.rho
    assert len(set(family.column("D0"))) == 1


def test_massless_family():
    rep = run_family(FamilySpec(masses=(0.0,)))
    row = rep.rows[0]
    assert row["gap"] == 0.0 and row["flat_bound"] == 0.0 and row["vol_gap"] == 0.0
    assert row["penrose_margin"] == "n/a" and row["cap_pass"] == "n/a"


def test_failed_cap_is_recorded_in_row():
    rep = run_family(FamilySpec(masses=(0.5, 0.1), lam=0.999, L=1e-12, cap_samples=1000))
    assert [r["cap_pass"] for r in rep.rows] == ["violated:2L/eps >= 1"] * 2
    assert all(isinstance(r["vol_omega"], float) for r in rep.rows)


def test_byte_identical_reruns():
    spec = FamilySpec(masses=(0.5, 0.1), cap_samples=1000)
    assert csv_text(run_family(spec)) == csv_text(run_family(spec))


@pytest.mark.parametrize("kwargs", [
    {"masses": ()}, {"masses": (0.1, 0.5)}, {"masses": (0.5, 0.5)}, {"masses": (0.5, -0.1)},
    {"masses": (0.5,), "model": "kerr"}, {"masses": (0.5,), "n": 2},
    {"masses": (0.5,), "beta": 1.0}, {"masses": (0.5,), "lam": 1.0},
    {"masses": (0.5,), "L": 0.0}, {"masses": (0.5,), "rho": -1.0},
])
def test_invalid_specs_rejected_before_work(kwargs):
    with pytest.raises(ConfigError):
        run_family(FamilySpec(**kwargs))


@given(st.floats(allow_nan=False, allow_infinity=False, min_value=-1e300, max_value=1e300))
def test_cells_carry_twelve_significant_digits(x):
    cell = format_cell(x)
    assert float(cell) == pytest.approx(x, rel=1e-11, abs=0.0) or x == 0.0
    assert format_cell(True) == "true" and format_cell(math.nan) == "nan"


def test_unwritable_path_names_the_path(family, tmp_path):
    bad = tmp_path / "missing" / "report.csv"
    with pytest.raises(OSError, match="missing"):
        emit_csv(family, bad)
