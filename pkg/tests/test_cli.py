import json

import numpy as np
import pytest

from gbsmock import load_report, load_samples, random_instance, save_instance
from gbsmock.cli import derive_seed, main


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "instance.json"
    save_instance(random_instance(5, seed=30), path)
    return str(path)


def run(*argv):
    return main(list(argv))


class TestDeriveSeed:
    def test_none_passthrough(self):
        assert derive_seed(None, "uniform") is None

    def test_purposes_differ(self):
        a = derive_seed(7, "uniform")
        b = derive_seed(7, "greedy")
        assert a.entropy != b.entropy

    def test_stable(self):
        assert derive_seed(7, "uniform").entropy == derive_seed(7, "uniform").entropy


class TestBuild:
    def test_summary_file(self, instance_file, tmp_path, capsys):
        out = tmp_path / "summary.json"
        assert run("build", "--instance", instance_file, "--out", str(out)) == 0
        summary = json.loads(out.read_text())
        assert summary["n_output"] == 5
        assert 0 < summary["p_all_zeros"] < 1
        assert summary["mean_click_number"] == pytest.approx(
            sum(summary["one_mode_click_probabilities"]), abs=1e-12
        )

    def test_summary_stdout(self, instance_file, capsys):
        assert run("build", "--instance", instance_file) == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["n_input"] == 5 // 2 * 2 or summary["n_input"] >= 2

    def test_missing_instance(self, tmp_path):
        assert run("build", "--instance", str(tmp_path / "nope.json")) == 1


class TestSample:
    @pytest.mark.parametrize(
        "extra",
        [
            ("--method", "uniform"),
            ("--method", "thermal"),
            ("--method", "tap", "--burn-in", "200", "--thinning", "2"),
            ("--method", "greedy", "--order", "2"),
        ],
    )
    def test_methods_produce_files(self, instance_file, tmp_path, extra, capsys):
        out = tmp_path / "samples.txt"
        code = run(
            "sample",
            "--instance",
            instance_file,
            *extra,
            "--samples",
            "200",
            "--seed",
            "1",
            "--out",
            str(out),
        )
        assert code == 0
        loaded = load_samples(out)
        assert loaded.n_modes == 5
        assert loaded.n_samples == 200
        assert loaded.metadata["seed"] == 1

    def test_greedy_requires_order(self, instance_file, tmp_path):
        code = run(
            "sample",
            "--instance",
            instance_file,
            "--method",
            "greedy",
            "--samples",
            "10",
            "--out",
            str(tmp_path / "x.txt"),
        )
        assert code == 2

    def test_determinism(self, instance_file, tmp_path, capsys):
        outs = []
        for name in ("a.txt", "b.txt"):
            out = tmp_path / name
            run(
                "sample",
                "--instance",
                instance_file,
                "--method",
                "greedy",
                "--order",
                "2",
                "--samples",
                "300",
                "--seed",
                "9",
                "--out",
                str(out),
            )
            outs.append(load_samples(out).samples)
        assert np.array_equal(outs[0], outs[1])


class TestAnalyze:
    @pytest.fixture
    def sample_file(self, instance_file, tmp_path, capsys):
        out = tmp_path / "greedy.txt"
        run(
            "sample",
            "--instance",
            instance_file,
            "--method",
            "greedy",
            "--order",
            "2",
            "--samples",
            "2000",
            "--seed",
            "3",
            "--out",
            str(out),
        )
        return str(out)

    def test_tvd_report(self, instance_file, sample_file, tmp_path):
        out = tmp_path / "report.json"
        code = run(
            "analyze",
            "--instance",
            instance_file,
            "--samples",
            sample_file,
            "--metric",
            "tvd",
            "--subset-size",
            "2",
            "--n-subsets",
            "5",
            "--seed",
            "4",
            "--out",
            str(out),
        )
        assert code == 0
        report = load_report(out)
        assert report.metric == "tvd"
        assert len(report.values) == 5
        assert all(0 <= v <= 1 for v in report.values)
        assert report.metadata["log_base"] == "natural"
        assert "per_mode_mean" in report.metadata

    def test_delta_metric_with_self_reference(self, instance_file, sample_file, tmp_path):
        out = tmp_path / "delta.json"
        code = run(
            "analyze",
            "--instance",
            instance_file,
            "--samples",
            sample_file,
            "--reference",
            sample_file,
            "--metric",
            "tvd",
            "--subset-size",
            "2",
            "--n-subsets",
            "4",
            "--seed",
            "4",
            "--out",
            str(out),
        )
        assert code == 0
        report = load_report(out)
        assert report.metric == "delta_tvd"
        assert np.allclose(report.values, 0.0)
        assert len(report.bounds) == 4
        for (lower, upper), value in zip(report.bounds, report.values):
            assert lower <= value <= upper

    def test_ursell_report_with_pearson(self, instance_file, sample_file, tmp_path):
        out = tmp_path / "ursell.json"
        code = run(
            "analyze",
            "--instance",
            instance_file,
            "--samples",
            sample_file,
            "--metric",
            "ursell",
            "--subset-size",
            "2",
            "--n-subsets",
            "8",
            "--seed",
            "5",
            "--out",
            str(out),
        )
        assert code == 0
        report = load_report(out)
        assert -1 <= report.metadata["pearson_r"] <= 1
        assert len(report.metadata["ideal_values"]) == 8

    def test_clicks_report(self, instance_file, sample_file, tmp_path):
        out = tmp_path / "clicks.json"
        code = run(
            "analyze",
            "--instance",
            instance_file,
            "--samples",
            sample_file,
            "--metric",
            "clicks",
            "--out",
            str(out),
        )
        assert code == 0
        report = load_report(out)
        assert len(report.values) == 6  # histogram over 0..5 clicks
        assert sum(report.values) == pytest.approx(1.0, abs=1e-12)
        assert {"A", "B", "C"} <= set(report.metadata["gaussian_fit"])

    def test_csv_output(self, instance_file, sample_file, tmp_path):
        out = tmp_path / "report.csv"
        code = run(
            "analyze",
            "--instance",
            instance_file,
            "--samples",
            sample_file,
            "--metric",
            "kl",
            "--subset-size",
            "2",
            "--n-subsets",
            "3",
            "--seed",
            "4",
            "--format",
            "csv",
            "--out",
            str(out),
        )
        assert code == 0
        assert out.read_text().startswith("subset,value")


class TestCompare:
    def _make_samples(self, instance_file, tmp_path, name, seed, capsys=None):
        out = tmp_path / name
        run(
            "sample",
            "--instance",
            instance_file,
            "--method",
            "greedy",
            "--order",
            "2",
            "--samples",
            "500",
            "--seed",
            str(seed),
            "--out",
            str(out),
        )
        return str(out)

    def test_identical_files(self, instance_file, tmp_path, capsys):
        samples = self._make_samples(instance_file, tmp_path, "s.txt", 1)
        out = tmp_path / "compare.json"
        code = run(
            "compare",
            "--instance",
            instance_file,
            "--samples-a",
            samples,
            "--samples-b",
            samples,
            "--out",
            str(out),
        )
        assert code == 0
        report = load_report(out)
        assert report.values[0] == 0.0
        assert report.metadata["hog_rate"] == 0.5

    def test_click_number_filter(self, instance_file, tmp_path, capsys):
        a = self._make_samples(instance_file, tmp_path, "a.txt", 1)
        b = self._make_samples(instance_file, tmp_path, "b.txt", 2)
        out = tmp_path / "compare.json"
        code = run(
            "compare",
            "--instance",
            instance_file,
            "--samples-a",
            a,
            "--samples-b",
            b,
            "--click-number",
            "2",
            "--max-samples",
            "50",
            "--out",
            str(out),
        )
        assert code == 0
        report = load_report(out)
        assert report.metadata["n_experiment"] <= 50
        assert report.metadata["click_number"] == 2

    def test_prefix_modes(self, instance_file, tmp_path, capsys):
        a = self._make_samples(instance_file, tmp_path, "a.txt", 1)
        b = self._make_samples(instance_file, tmp_path, "b.txt", 2)
        out = tmp_path / "compare.json"
        code = run(
            "compare",
            "--instance",
            instance_file,
            "--samples-a",
            a,
            "--samples-b",
            b,
            "--prefix-modes",
            "3",
            "--out",
            str(out),
        )
        assert code == 0
        report = load_report(out)
        assert report.subsets == [(0, 1, 2)]

    def test_impossible_click_number(self, instance_file, tmp_path, capsys):
        a = self._make_samples(instance_file, tmp_path, "a.txt", 1)
        out = tmp_path / "compare.json"
        code = run(
            "compare",
            "--instance",
            instance_file,
            "--samples-a",
            a,
            "--samples-b",
            a,
            "--click-number",
            "99",
            "--out",
            str(out),
        )
        assert code == 1


class TestImportUstc:
    def test_round_trip(self, tmp_path):
        inst = random_instance(4, seed=40)
        np.savetxt(tmp_path / "sq.txt", inst.squeezing)
        np.savetxt(tmp_path / "re.txt", inst.transformation.real)
        np.savetxt(tmp_path / "im.txt", inst.transformation.imag)
        out = tmp_path / "converted.json"
        code = run(
            "import-ustc",
            "--squeezing",
            str(tmp_path / "sq.txt"),
            "--real",
            str(tmp_path / "re.txt"),
            "--imag",
            str(tmp_path / "im.txt"),
            "--out",
            str(out),
        )
        assert code == 0
        assert run("build", "--instance", str(out), "--out", str(tmp_path / "s.json")) == 0


class TestEnvironment:
    def test_thread_env_variable(self, instance_file, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("GBSMOCK_THREADS", "1")
        out = tmp_path / "samples.txt"
        code = run(
            "sample",
            "--instance",
            instance_file,
            "--method",
            "uniform",
            "--samples",
            "10",
            "--seed",
            "0",
            "--out",
            str(out),
        )
        assert code == 0
