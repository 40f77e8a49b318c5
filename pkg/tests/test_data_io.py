import json

import numpy as np
import pytest

from gbsmock import (
    MetricReport,
    SampleSet,
    import_ustc,
    load_instance,
    load_report,
    load_samples,
    random_instance,
    sample_uniform,
    save_instance,
    save_report,
    save_samples,
)
from gbsmock.errors import ParseError


class TestInstanceRoundTrip:
    def test_exact_round_trip(self, tmp_path):
        inst = random_instance(5, 4, seed=1)
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        loaded = load_instance(path)
        assert loaded.n_output == 5 and loaded.n_input == 4
        assert np.array_equal(loaded.squeezing, inst.squeezing)
        assert np.array_equal(loaded.transformation, inst.transformation)

    def test_full_double_precision(self, tmp_path):
        # A value with no short decimal representation must survive.
        inst = random_instance(2, 2, seed=2)
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        assert load_instance(path).transformation[0, 0] == inst.transformation[0, 0]

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ParseError, match="broken.json"):
            load_instance(path)

    def test_missing_field(self, tmp_path):
        inst = random_instance(2, 2, seed=3)
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        record = json.loads(path.read_text())
        del record["squeezing"]
        path.write_text(json.dumps(record))
        with pytest.raises(ParseError, match="squeezing"):
            load_instance(path)

    def test_unsupported_schema(self, tmp_path):
        inst = random_instance(2, 2, seed=4)
        path = tmp_path / "inst.json"
        save_instance(inst, path)
        record = json.loads(path.read_text())
        record["schema_version"] = 99
        path.write_text(json.dumps(record))
        with pytest.raises(ParseError, match="99"):
            load_instance(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_instance(tmp_path / "absent.json")


class TestSamplesRoundTrip:
    def test_round_trip_with_metadata(self, tmp_path):
        samples = sample_uniform(4, 50, seed=5)
        path = tmp_path / "samples.txt"
        save_samples(samples, path)
        loaded = load_samples(path)
        assert loaded.n_modes == 4
        assert np.array_equal(loaded.samples, samples.samples)
        assert loaded.metadata["sampler"] == "uniform"

    def test_mode_one_leftmost(self, tmp_path):
        samples = SampleSet(3, np.array([[1, 0, 0]], dtype=np.int8))
        path = tmp_path / "samples.txt"
        save_samples(samples, path)
        body = [l for l in path.read_text().splitlines() if not l.startswith("#")]
        assert body == ["100"]

    def test_non_bit_characters(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text('# {"n_modes": 2}\n01\n0x\n')
        with pytest.raises(ParseError, match="bad.txt:3"):
            load_samples(path)

    def test_ragged_lines(self, tmp_path):
        path = tmp_path / "ragged.txt"
        path.write_text("01\n011\n")
        with pytest.raises(ParseError, match="ragged.txt:2"):
            load_samples(path)

    def test_count_mismatch(self, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text('# {"n_modes": 2, "n_samples": 3}\n01\n10\n')
        with pytest.raises(ParseError, match="declares 3"):
            load_samples(path)

    def test_headerless_file(self, tmp_path):
        path = tmp_path / "plain.txt"
        path.write_text("010\n111\n")
        loaded = load_samples(path)
        assert loaded.n_modes == 3
        assert loaded.n_samples == 2

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("")
        with pytest.raises(ParseError, match="no samples"):
            load_samples(path)


class TestReportFormats:
    def _report(self):
        return MetricReport(
            "tvd",
            [(0, 1), (1, 2)],
            [0.125, 0.0625],
            bounds=[(-0.2, 0.125), (-0.1, 0.0625)],
            metadata={"order": 2, "log_base": "natural"},
        )

    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "report.json"
        save_report(self._report(), path)
        loaded = load_report(path)
        assert loaded.metric == "tvd"
        assert loaded.values == [0.125, 0.0625]
        assert loaded.bounds == [(-0.2, 0.125), (-0.1, 0.0625)]
        assert loaded.metadata["order"] == 2

    def test_csv_layout(self, tmp_path):
        path = tmp_path / "report.csv"
        save_report(self._report(), path, fmt="csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "subset,value,lower,upper"
        assert lines[1].split(",")[0] == "0|1"
        assert lines[-1].startswith("# aggregate ")
        agg = json.loads(lines[-1].removeprefix("# aggregate "))
        assert agg["count"] == 2

    def test_csv_full_precision(self, tmp_path):
        report = MetricReport("kl", [(0,)], [1 / 3])
        path = tmp_path / "report.csv"
        save_report(report, path, fmt="csv")
        value = path.read_text().splitlines()[1].split(",")[1]
        assert float(value) == 1 / 3

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            save_report(self._report(), tmp_path / "x", fmt="yaml")


class TestImportUstc:
    def test_conversion(self, tmp_path):
        inst = random_instance(6, 4, seed=6)
        np.savetxt(tmp_path / "sq.txt", inst.squeezing)
        np.savetxt(tmp_path / "re.txt", inst.transformation.real)
        np.savetxt(tmp_path / "im.txt", inst.transformation.imag)
        out = tmp_path / "inst.json"
        converted = import_ustc(
            tmp_path / "sq.txt", tmp_path / "re.txt", tmp_path / "im.txt", out
        )
        assert out.exists()
        loaded = load_instance(out)
        assert loaded.n_output == 6 and loaded.n_input == 4
        assert np.allclose(loaded.transformation, inst.transformation, atol=1e-15)
        assert np.allclose(converted.squeezing, inst.squeezing, atol=1e-15)

    def test_shape_mismatch(self, tmp_path):
        np.savetxt(tmp_path / "sq.txt", [0.5])
        np.savetxt(tmp_path / "re.txt", np.eye(2))
        np.savetxt(tmp_path / "im.txt", np.zeros((3, 3)))
        with pytest.raises(ParseError, match="shape"):
            import_ustc(
                tmp_path / "sq.txt",
                tmp_path / "re.txt",
                tmp_path / "im.txt",
                tmp_path / "out.json",
            )

    def test_unparseable_input(self, tmp_path):
        (tmp_path / "sq.txt").write_text("not a number\n")
        np.savetxt(tmp_path / "re.txt", np.eye(2))
        np.savetxt(tmp_path / "im.txt", np.zeros((2, 2)))
        with pytest.raises(ParseError):
            import_ustc(
                tmp_path / "sq.txt",
                tmp_path / "re.txt",
                tmp_path / "im.txt",
                tmp_path / "out.json",
            )
