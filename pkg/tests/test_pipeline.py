import csv
import io
import json

import numpy as np
import pytest

from _helpers import DATA
from lagcoh.errors import BandMismatch, ConfigError, SingularCrossSpectrum
from lagcoh.io import AnalysisConfig, load_config, load_epochs
from lagcoh.measures import LaggedResult
from lagcoh.pipeline import (
    CSV_COLUMNS,
    ResultDocument,
    ResultEntry,
    emit_results,
    run_pipeline,
    summary_table,
)
from lagcoh.simulate import GenerativeModel, generate_var
from lagcoh.spectra import EpochedTimeSeries


def combined(model, n_epochs, seed):
    x, y = generate_var(model, n_epochs, seed)
    return EpochedTimeSeries(
        np.concatenate([x.data, y.data], axis=2), x.channel_labels + y.channel_labels
    )


@pytest.fixture(scope="module")
def fixture_data():
    return load_epochs(DATA / "small_p2q1.csv")


class TestRunPipeline:
    def test_null_behaviour(self):
        ts = combined(GenerativeModel([[2.0]], n_samples=16), 200, seed=3)
        doc = run_pipeline(ts, AnalysisConfig(["x0"], ["y0"], frequencies=list(range(1, 8))))
        lag_c = np.array([e.result.lagC for e in doc.entries])
        p_values = np.array([e.tests[0].p_value for e in doc.entries])
        assert lag_c.max() < 0.05
        assert np.all((p_values > 0) & (p_values <= 1))

    def test_all_frequencies_by_default(self, fixture_data):
        doc = run_pipeline(fixture_data, AnalysisConfig(["x0", "x1"], ["y0"]))
        assert [e.label for e in doc.entries] == [str(w) for w in range(9)]
        assert doc.metadata["degenerate"] == ["0", "8"]
        assert doc.entries[0].result.lagA == 0.0

    def test_singleton_band_equals_frequency(self, fixture_data):
        cfg = AnalysisConfig(["x0", "x1"], ["y0"], frequencies=[3], bands={"only3": [3]})
        by_freq, band = run_pipeline(fixture_data, cfg).entries
        assert band.kind == "band" and band.frequencies == (3,)
        assert band.result.lagA == by_freq.result.lagA
        assert band.result.lagB == by_freq.result.lagB
        assert band.tests == by_freq.tests

    def test_band_uses_summed_spectra(self, fixture_data):
        cfg = AnalysisConfig(["x0", "x1"], ["y0"], frequencies=[1, 2], bands={"b": [1, 2]})
        doc = run_pipeline(fixture_data, cfg)
        assert doc.entries[2].result.lagA != doc.entries[0].result.lagA

    def test_every_request_appears_once(self, fixture_data):
        cfg = load_config(DATA / "config_p2q1.json")
        labels = [e.label for e in run_pipeline(fixture_data, cfg).entries]
        assert labels == ["1", "2", "3", "5", "low"]

    def test_deterministic_across_jobs(self, fixture_data):
        cfg = load_config(DATA / "config_p2q1.json")
        outs = {emit_results(run_pipeline(fixture_data, cfg, jobs=j)) for j in (1, 1, 3, 8)}
        assert len(outs) == 1

    def test_phase_only_changes_result(self, fixture_data):
        base = AnalysisConfig(["x0", "x1"], ["y0"], frequencies=[2])
        phase = AnalysisConfig(["x0", "x1"], ["y0"], frequencies=[2], phase_only=True)
        a = run_pipeline(fixture_data, base).entries[0].result.lagA
        b = run_pipeline(fixture_data, phase).entries[0].result.lagA
        assert a != b and b >= 0

    def test_channel_positions(self, fixture_data):
        a = run_pipeline(fixture_data, AnalysisConfig([0, 1], [2], frequencies=[4]))
        b = run_pipeline(fixture_data, AnalysisConfig(["x0", "x1"], ["y0"], frequencies=[4]))
        assert a.entries[0].result == b.entries[0].result

    def test_sampling_rate_labels(self):
        ts = EpochedTimeSeries(np.random.default_rng(0).standard_normal((10, 16, 2)), sampling_rate=128.0)
        doc = run_pipeline(ts, AnalysisConfig([0], [1], frequencies=[2]))
        assert doc.entries[0].hz == (16.0,)

    def test_unknown_channel(self, fixture_data):
        with pytest.raises(ConfigError):
            run_pipeline(fixture_data, AnalysisConfig(["nope"], ["y0"]))

    def test_frequency_beyond_nyquist(self, fixture_data):
        with pytest.raises(BandMismatch):
            run_pipeline(fixture_data, AnalysisConfig(["x0"], ["y0"], frequencies=[9]))

    def test_f_test_needs_four_epochs(self):
        ts = EpochedTimeSeries(np.random.default_rng(1).standard_normal((3, 8, 2)))
        with pytest.raises(ConfigError):
            run_pipeline(ts, AnalysisConfig([0], [1], tests=["f_bivariate"]))

    def test_error_carries_frequency(self):
        ts = load_epochs(DATA / "duplicate_x.csv")
        with pytest.raises(SingularCrossSpectrum, match="frequency 2"):
            run_pipeline(ts, AnalysisConfig(["x0", "x1"], ["y0"], frequencies=[2]))

    def test_ridge_rescues_collinear_inputs(self):
        ts = load_epochs(DATA / "duplicate_x.csv")
        doc = run_pipeline(ts, AnalysisConfig(["x0", "x1"], ["y0"], frequencies=[2], ridge_lambda=1e-3))
        assert np.isfinite(doc.entries[0].result.lagA)


def one_entry(lag_c):
    lag_a = float(-np.log1p(-lag_c))
    result = LaggedResult(lag_a, lag_c, lag_c**2, (1, 1), 1)
    return ResultDocument([ResultEntry("1", "frequency", (1,), result)], {"p": 1, "q": 1})


class TestEmit:
    def test_empty(self):
        doc = json.loads(emit_results(ResultDocument(metadata={"p": 1})))
        assert doc["results"] == []
        rows = list(csv.reader(io.StringIO(emit_results(ResultDocument(), "csv"))))
        assert rows == [list(CSV_COLUMNS)]

    def test_third_round_trips(self):
        text = emit_results(one_entry(1 / 3))
        assert json.loads(text)["results"][0]["measures"]["lagC"] == 1 / 3
        assert "0.33333333333333331" in text

    def test_json_round_trip(self, fixture_data):
        doc = run_pipeline(fixture_data, load_config(DATA / "config_p2q1.json"))
        parsed = json.loads(emit_results(doc))
        for entry, row in zip(doc.entries, parsed["results"]):
            assert row["measures"]["lagA"] == entry.result.lagA
            assert row["measures"]["lagB"] == entry.result.lagB
            assert row["tests"][0]["p_value"] == entry.tests[0].p_value
        assert parsed["metadata"]["config"]["bands"] == {"low": [1, 2, 3]}
        assert list(parsed) == ["metadata", "results"]

    def test_measure_subset(self, fixture_data):
        cfg = AnalysisConfig(["x0", "x1"], ["y0"], frequencies=[1], measures=["C"])
        parsed = json.loads(emit_results(run_pipeline(fixture_data, cfg)))
        assert list(parsed["results"][0]["measures"]) == ["lagC"]

    def test_csv_layout(self, fixture_data):
        cfg = AnalysisConfig(["x0"], ["y0"], frequencies=[0, 1, 2], tests=["lrt", "f_bivariate"])
        rows = list(csv.DictReader(io.StringIO(emit_results(run_pipeline(fixture_data, cfg), "csv"))))
        assert len(rows) == 6
        assert list(rows[0]) == list(CSV_COLUMNS)
        lrt, f = rows[2], rows[3]
        assert lrt["df1"] == "1" and lrt["df2"] == ""
        assert f["df1"] == "1" and f["df2"] == str(40 - 3)
        assert rows[0]["degenerate"] == "1" and lrt["degenerate"] == "0"

    def test_non_finite_refused(self):
        with pytest.raises(ValueError):
            emit_results(one_entry(float("nan")))

    def test_summary_rounds(self, fixture_data):
        doc = run_pipeline(fixture_data, AnalysisConfig(["x0", "x1"], ["y0"]))
        text = summary_table(doc)
        assert "degenerate" in text
        assert len(text.splitlines()) == 1 + 9 + 1
