"""Benchmark runner: suite layout, row statuses, CSV I/O, power-law fits."""

import csv

import pytest

from latquad import plots
from latquad.bench import (
    CSV_COLUMNS,
    DegenerateDataError,
    FitResult,
    RunRecord,
    SUITES,
    fit_all,
    fit_power_law,
    read_rows,
    run_suite,
    suite_specs,
    _run_row,
)


class TestSuiteSpecs:
    def test_row_counts(self):
        want = {"test1": 36, "test2": 36, "test3": 21, "test4": 10,
                "test5": 42, "test6": 42, "test7": 42}
        for suite in SUITES:
            assert len(suite_specs(suite)) == want[suite]

    def test_unbounded_extends_the_dimension_sweep(self):
        assert len(suite_specs("test4", unbounded=True)) == 14
        dims = {d for _, _, d, _, _ in suite_specs("test4", unbounded=True)}
        assert max(dims) == 1000

    def test_first_accuracy_row(self):
        assert suite_specs("test1")[0] == ("mc", "expxy", 2, 101, 10)

    def test_points_per_axis_rounding(self):
        # a = round(n^(1/3)) for the three-dimensional sweep
        rows = [s for s in suite_specs("test2") if s[0] == "slr" and s[1] == "expsum"]
        assert [a for _, _, _, _, a in rows] == [5, 10, 22, 46, 100, 215]

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            suite_specs("test99")


class TestRunRow:
    def test_enumeration_methods_skip_past_the_cap(self):
        n = 1 + 10**8
        for method in ("slr", "implr"):
            rec = _run_row((method, "gaussian", 8, n, 10), seed=0, unbounded=False)
            assert rec.status == "skipped(cap)"
            assert rec.seconds is None and rec.value is None
            assert rec.reference is not None

    def test_mdi_dimension_cap(self):
        rec = _run_row(("mdilr", "gaussian", 150, 1 + 10**150, 10), seed=0, unbounded=False)
        assert rec.status == "skipped(cap)"

    def test_unbounded_lifts_the_dimension_cap(self):
        rec = _run_row(("mdilr", "gaussian", 120, 1 + 10**120, 10), seed=0, unbounded=True)
        assert rec.status == "ok"
        assert rec.rel_error < 0.05

    def test_seed_recorded_only_for_mc(self):
        mc = _run_row(("mc", "expxy", 2, 101, 10), seed=9, unbounded=False)
        slr = _run_row(("slr", "expxy", 2, 101, 10), seed=9, unbounded=False)
        assert mc.seed == 9 and slr.seed is None


class TestRunSuite:
    def test_accuracy_suite_end_to_end(self, tmp_path):
        out = tmp_path / "test1.csv"
        records = run_suite("test1", out, seed=0)
        assert len(records) == 36
        assert all(rec.status == "ok" for rec in records)
        assert (tmp_path / "test1_error.png").stat().st_size > 0
        assert (tmp_path / "test1_time.png").stat().st_size > 0

        rows = read_rows(out)
        assert len(rows) == 36
        for row in rows:
            assert isinstance(row["d"], int) and isinstance(row["n"], int)
            assert isinstance(row["seconds"], float)
            assert (row["seed"] == 0) == (row["method"] == "mc")

        with open(out, newline="") as fh:
            header = next(csv.reader(fh))
        assert tuple(header) == CSV_COLUMNS

    def test_rerun_is_deterministic_outside_timing(self, tmp_path):
        key = lambda rec: (rec.method, rec.integrand, rec.d, rec.n, rec.a,
                           rec.value, rec.reference, rec.rel_error, rec.status)
        one = run_suite("test1", tmp_path / "a.csv", seed=0, figures=False)
        two = run_suite("test1", tmp_path / "b.csv", seed=0, figures=False)
        assert [key(r) for r in one] == [key(r) for r in two]


def _rows(triples, method="mdilr", integrand="gaussian"):
    return [RunRecord(method=method, integrand=integrand, d=d, n=a**d, a=a, value=1.0,
                      reference=1.0, rel_error=0.0, seconds=t)
            for a, d, t in triples]


class TestFitPowerLaw:
    def test_recovers_cubic_exactly(self):
        rows = _rows([(a, 10, 2.0 * a**3) for a in range(4, 17)])
        fit = fit_power_law(rows, "N^p")
        assert fit.exponent == pytest.approx(3.0, abs=1e-9)
        assert fit.coeff == pytest.approx(2.0, rel=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.count == 13

    def test_recovers_mixed_model(self):
        rows = _rows([(a, d, 5.0 * a**2 * d**1.5)
                      for a in (4, 8, 12, 16) for d in (4, 8, 12, 16)])
        fit = fit_power_law(rows, "N^2*d^q")
        assert fit.exponent == pytest.approx(1.5, abs=1e-9)
        assert fit.coeff == pytest.approx(5.0, rel=1e-9)

    def test_recovers_linear_n_model(self):
        rows = _rows([(a, d, 0.5 * a * d**2.25)
                      for a in (4, 8, 16) for d in (4, 6, 8, 10)])
        fit = fit_power_law(rows, "N*d^q")
        assert fit.exponent == pytest.approx(2.25, abs=1e-9)

    def test_skipped_rows_are_excluded(self):
        rows = _rows([(a, 10, 2.0 * a**3) for a in (4, 6, 8, 10)])
        rows.append(RunRecord(method="mdilr", integrand="gaussian", d=10, n=16**10,
                              a=16, status="skipped(cap)"))
        assert fit_power_law(rows, "N^p").count == 4

    def test_too_few_rows(self):
        rows = _rows([(a, 10, float(a)) for a in (4, 6, 8)])
        with pytest.raises(ValueError):
            fit_power_law(rows, "N^p")

    def test_nonpositive_seconds(self):
        rows = _rows([(a, 10, 0.0) for a in (4, 6, 8, 10)])
        with pytest.raises(ValueError):
            fit_power_law(rows, "N^p")

    def test_no_sweep_variation(self):
        rows = _rows([(8, 10, float(t)) for t in (1, 2, 3, 4)])
        with pytest.raises(DegenerateDataError):
            fit_power_law(rows, "N^p")

    def test_constant_timings(self):
        rows = _rows([(a, 10, 1.0) for a in (4, 6, 8, 10)])
        with pytest.raises(DegenerateDataError):
            fit_power_law(rows, "N^p")

    def test_unknown_model(self):
        rows = _rows([(a, 10, float(a)) for a in (4, 6, 8, 10)])
        with pytest.raises(ValueError):
            fit_power_law(rows, "N^3.7")

    def test_missing_axis_column(self):
        rows = [RunRecord(method="mc", integrand="expxy", d=2, n=101, a=None,
                          seconds=0.5)] * 4
        with pytest.raises(ValueError):
            fit_power_law(rows, "N^p")

    def test_accepts_csv_path(self, tmp_path):
        path = tmp_path / "rows.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for a in (4, 6, 8, 10):
                writer.writerow(["mdilr", "gaussian", 10, a**10, a,
                                 1.0, 1.0, 0.0, 2.0 * a**3, "", "ok"])
        fit = fit_power_law(str(path), "N^p")
        assert fit.exponent == pytest.approx(3.0, abs=1e-9)

    def test_fit_all_ranks_by_r_squared(self):
        rows = _rows([(a, d, 2.0 * a**3)
                      for a in (4, 8, 12, 16) for d in (4, 8, 12, 16)])
        results = fit_all(rows)
        assert results[0].model == "N^p"
        assert results[0].r_squared >= results[-1].r_squared

    def test_formatted_line(self):
        fit = FitResult(model="N^2*d^q", coeff=5.6e-7, exponent=1.8,
                        r_squared=0.9934, count=7)
        line = fit.formatted()
        assert "N^2*d^1.8" in line and "R2=0.9934" in line and "7 rows" in line


class TestFigures:
    def test_render_files(self, tmp_path):
        records = _rows([(a, 10, 0.001 * a**2) for a in (4, 8, 12, 16)])
        for rec in records:
            rec.rel_error = 1.0 / rec.a**2
        csv_path = tmp_path / "sweep.csv"
        paths = plots.render_suite_figures(records, csv_path, suite="test6")
        assert set(paths) == {tmp_path / "sweep_error.png", tmp_path / "sweep_time.png"}
        for p in paths:
            assert p.stat().st_size > 0
