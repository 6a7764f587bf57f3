import json
import math

import pytest

import scalefit as sf
from scalefit.cli import Report, render_report, run, to_jsonable

from conftest import TRUE_ALPHA, TRUE_LOG_C, ar32_synth


@pytest.fixture()
def runs_file(tmp_path):
    runset, _ = ar32_synth(900)
    path = tmp_path / "runs.jsonl"
    sf.emit(runset.records, path)
    return str(path)


@pytest.fixture()
def two_family_file(tmp_path):
    a, _ = ar32_synth(901, direction="maximize", family="mlm", metric="f1", task="t")
    b, _ = ar32_synth(
        902,
        direction="maximize",
        family="pmi",
        metric="f1",
        task="t",
        log_c=TRUE_LOG_C + 0.02,
    )
    path = tmp_path / "two.jsonl"
    sf.emit(list(a.records) + list(b.records), path)
    return str(path)


def run_json(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured


class TestExitCodes:
    def test_fit_happy_path(self, runs_file, capsys):
        code, captured = run_json(
            capsys,
            ["fit", "--input", runs_file, "--task", "synthetic", "--family", "synthetic",
             "--metric", "score"],
        )
        assert code == 0
        report = json.loads(captured.out)
        assert report["command"] == "fit"
        assert report["schema_version"] == "1"
        assert 0.07 <= report["results"]["fit"]["alpha"] <= 0.09

    def test_missing_input_is_usage_error(self, capsys):
        code, captured = run_json(capsys, ["fit"])
        assert code == 1
        assert "usage error" in captured.err
        assert captured.out == ""

    def test_unknown_subcommand(self, capsys):
        assert run(["frobnicate"]) == 1

    def test_no_subcommand(self, capsys):
        assert run([]) == 1

    def test_missing_file_is_data_error(self, capsys):
        code, captured = run_json(capsys, ["fit", "--input", "/nonexistent/x.jsonl"])
        assert code == 2
        assert "error:" in captured.err

    def test_select_metric_mismatch_names_both(self, tmp_path, capsys):
        a, _ = ar32_synth(903, direction="maximize", family="mlm", metric="f1")
        b, _ = ar32_synth(904, direction="maximize", family="pmi", metric="accuracy")
        path = tmp_path / "mismatch.jsonl"
        sf.emit(list(a.records) + list(b.records), path)
        code, captured = run_json(
            capsys,
            ["select", "--input", str(path), "--family-a", "mlm", "--family-b", "pmi",
             "--target-params", "84934656", "--seed", "1"],
        )
        assert code == 2
        assert "f1" in captured.err and "accuracy" in captured.err

    def test_ambiguous_selection_is_data_error(self, two_family_file, capsys):
        code, captured = run_json(capsys, ["fit", "--input", two_family_file])
        assert code == 2
        assert "ambiguous" in captured.err

    def test_seed_required_for_bootstrap(self, runs_file, capsys):
        code, captured = run_json(capsys, ["bootstrap", "--input", runs_file])
        assert code == 1

    def test_seed_required_for_synth(self, tmp_path, capsys):
        code, _ = run_json(
            capsys,
            ["synth", "--alpha", "0.08", "--log-c", "3.0",
             "--out", str(tmp_path / "x.jsonl")],
        )
        assert code == 1

    def test_band_requires_seed_for_plot(self, runs_file, tmp_path, capsys):
        code, captured = run_json(
            capsys,
            ["plot", "--input", runs_file, "--out", str(tmp_path / "p.svg"), "--band"],
        )
        assert code == 1
        assert "--seed" in captured.err


class TestAgainstLibrary:
    def test_fit_matches_library(self, runs_file, capsys):
        code, captured = run_json(capsys, ["fit", "--input", runs_file])
        assert code == 0
        report = json.loads(captured.out)
        runset = sf.group(sf.ingest(runs_file))[("synthetic", "synthetic", "score")]
        assert report["results"]["fit"] == to_jsonable(sf.fit_runset(runset))

    def test_fit_min_depth_and_space_match_library(self, runs_file, capsys):
        code, captured = run_json(
            capsys, ["fit", "--input", runs_file, "--min-depth", "2", "--r2-space", "linear"]
        )
        assert code == 0
        report = json.loads(captured.out)
        runset = sf.group(sf.ingest(runs_file))[("synthetic", "synthetic", "score")]
        expected = sf.fit_runset(runset, min_layers=2, space="linear")
        assert report["results"]["fit"] == to_jsonable(expected)

    def test_bootstrap_matches_library(self, runs_file, capsys):
        code, captured = run_json(
            capsys, ["bootstrap", "--input", runs_file, "--B", "80", "--seed", "17"]
        )
        assert code == 0
        report = json.loads(captured.out)
        runset = sf.group(sf.ingest(runs_file))[("synthetic", "synthetic", "score")]
        cfg = sf.BootstrapConfig(n_replicates=80, rng_seed=17)
        assert report["results"]["band"] == to_jsonable(sf.bootstrap_band(runset, cfg))

    def test_holdout_matches_library(self, runs_file, capsys):
        code, captured = run_json(
            capsys,
            ["holdout", "--input", runs_file, "--train-layers", "1-6", "--test-layers", "7-8"],
        )
        assert code == 0
        report = json.loads(captured.out)
        runset = sf.group(sf.ingest(runs_file))[("synthetic", "synthetic", "score")]
        assert report["results"] == to_jsonable(sf.holdout_eval(runset, (1, 6), (7, 8)))

    def test_predict_matches_library(self, runs_file, capsys):
        code, captured = run_json(
            capsys,
            ["predict", "--input", runs_file, "--target-layers", "12", "--target-hidden",
             "768", "--B", "60", "--seed", "3", "--actual", "90.0"],
        )
        assert code == 0
        report = json.loads(captured.out)
        runset = sf.group(sf.ingest(runs_file))[("synthetic", "synthetic", "score")]
        cfg = sf.BootstrapConfig(n_replicates=60, rng_seed=3)
        expected = sf.extrapolate(runset, sf.ScaleSpec.from_dims(12, 768), cfg, actual=90.0)
        assert report["results"] == to_jsonable(expected)


class TestDeterminism:
    def test_bootstrap_report_bytes_identical(self, runs_file, capsys):
        argv = ["bootstrap", "--input", runs_file, "--B", "50", "--seed", "9"]
        _, first = run_json(capsys, argv)
        _, second = run_json(capsys, argv)
        assert first.out == second.out

    def test_synth_outputs_byte_identical(self, tmp_path, capsys):
        outs = []
        for name in ("a.jsonl", "b.jsonl"):
            out = tmp_path / name
            code, _ = run_json(
                capsys,
                ["synth", "--alpha", "0.08", "--log-c", "3.0", "--sigma-fin", "0.01",
                 "--seed", "5", "--out", str(out)],
            )
            assert code == 0
            outs.append((out.read_bytes(), (tmp_path / (name + ".truth.json")).read_bytes()))
        assert outs[0] == outs[1]

    def test_plot_bytes_identical(self, runs_file, tmp_path, capsys):
        blobs = []
        for name in ("p1.svg", "p2.svg"):
            out = tmp_path / name
            code, _ = run_json(
                capsys,
                ["plot", "--input", runs_file, "--out", str(out), "--band", "--B", "40",
                 "--seed", "6"],
            )
            assert code == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]
        assert b"<polygon" in blobs[0]


class TestSubcommands:
    def test_flops_params_tokens(self, capsys):
        code, captured = run_json(capsys, ["flops", "--params", "12288", "--tokens", "1000000"])
        assert code == 0
        report = json.loads(captured.out)
        assert report["results"]["estimate"]["flops"] == 73_728_000_000
        assert "note" in report["results"]

    def test_flops_both_sources_rejected(self, runs_file, capsys):
        code, _ = run_json(
            capsys, ["flops", "--params", "1", "--tokens", "1", "--input", runs_file]
        )
        assert code == 1

    def test_flops_from_records_with_baseline(self, runs_file, capsys):
        code, captured = run_json(
            capsys,
            ["flops", "--input", runs_file, "--baseline-layers", "12",
             "--baseline-hidden", "768"],
        )
        assert code == 0
        report = json.loads(captured.out)
        assert report["results"]["total_params"] == 15_925_248
        assert report["results"]["savings_ratio"] == pytest.approx(5.333333333, rel=1e-9)
        assert report["results"]["total_flops"] is None  # no token counts in fixture

    def test_select_happy_path(self, two_family_file, capsys):
        code, captured = run_json(
            capsys,
            ["select", "--input", two_family_file, "--family-a", "mlm", "--family-b", "pmi",
             "--target-params", "84934656", "--B", "60", "--seed", "21",
             "--actual-a", "85.0", "--actual-b", "86.5"],
        )
        assert code == 0
        report = json.loads(captured.out)
        results = report["results"]
        assert results["predicted_gap"] > 0
        assert results["sign_agreement"] is True
        assert results["reliable"] is True

    def test_diagnose_earlystop_single(self, tmp_path, capsys):
        path = tmp_path / "curve.csv"
        path.write_text(
            "step,eval_loss\n0,1.0\n1,0.8\n2,0.79\n3,0.79\n4,0.79\n5,0.79\n", encoding="utf-8"
        )
        code, captured = run_json(
            capsys, ["diagnose", "earlystop", "--curve", str(path), "--patience", "3"]
        )
        assert code == 0
        report = json.loads(captured.out)
        assert report["results"]["early_stop"]["stop_index"] == 5
        assert report["results"]["early_stop"]["best_index"] == 2

    def test_diagnose_earlystop_comparison(self, tmp_path, capsys):
        path = tmp_path / "curve.csv"
        rows = [3.0, 2.5, 2.5, 2.5, 2.5, 2.5, 2.0, 1.5, 1.4]
        path.write_text(
            "step,eval_loss\n" + "".join(f"{i},{v}\n" for i, v in enumerate(rows)),
            encoding="utf-8",
        )
        code, captured = run_json(
            capsys,
            ["diagnose", "earlystop", "--curve", str(path), "--patience", "8", "3"],
        )
        assert code == 0
        report = json.loads(captured.out)
        policies = report["results"]["policies"]
        assert [p["policy"]["patience"] for p in policies] == [3, 8]
        assert policies[1]["loss_at_best"] < policies[0]["loss_at_best"]

    def test_diagnose_fit_outlier(self, tmp_path, capsys):
        runset, truth = ar32_synth(905)
        path = tmp_path / "runs.jsonl"
        sf.emit(runset.records, path)
        observed = truth.value_at(sf.param_count(8, 256)) * 1.5
        code, captured = run_json(
            capsys,
            ["diagnose", "fit-outlier", "--input", str(path), "--holdout-layers", "8",
             "--observed", str(observed), "--B", "100", "--seed", "77"],
        )
        assert code == 0
        report = json.loads(captured.out)
        assert report["results"]["flag"] == "suspect_undertrained"

    def test_synth_fit_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "gen.jsonl"
        code, captured = run_json(
            capsys,
            ["synth", "--alpha", "0.08", "--log-c", str(TRUE_LOG_C), "--seed", "8",
             "--out", str(out)],
        )
        assert code == 0
        report = json.loads(captured.out)
        assert report["results"]["records_written"] == 40
        truth = json.loads((tmp_path / "gen.jsonl.truth.json").read_text())
        assert truth["alpha"] == TRUE_ALPHA
        code, captured = run_json(capsys, ["fit", "--input", str(out)])
        assert code == 0
        fit = json.loads(captured.out)["results"]["fit"]
        assert fit["alpha"] == pytest.approx(TRUE_ALPHA, abs=1e-9)

    def test_table_format(self, runs_file, capsys):
        code, captured = run_json(capsys, ["fit", "--input", runs_file, "--format", "table"])
        assert code == 0
        assert "results.fit.alpha = " in captured.out


class TestReportSerialization:
    def test_roundtrip(self):
        fit = sf.fit_line([(1, 3), (2, 6), (4, 12)])
        report = Report(command="fit", inputs={"input": "x.jsonl"}, results={"fit": fit})
        text = render_report(report)
        parsed = json.loads(text)
        assert parsed == to_jsonable(report)
        assert json.dumps(parsed, sort_keys=True, indent=2) + "\n" == text

    def test_key_sorted_output(self):
        report = Report(command="z", inputs={"b": 1, "a": 2}, results={"y": 1, "x": 2})
        text = render_report(report)
        assert text.index('"a"') < text.index('"b"')
        assert text.index('"x"') < text.index('"y"')
