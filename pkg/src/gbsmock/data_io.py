"""Canonical on-disk formats: instances (JSON), samples (text), reports.

Complex matrices are stored as separate real/imaginary parts; all reals
round-trip at full double precision.  Sample files carry a single header
line (``# `` + JSON) followed by one ASCII bit string per line, mode 1
leftmost.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ParseError
from .gaussian_state import GBSInstance
from .metrics import MetricReport
from .samplers import SampleSet

INSTANCE_SCHEMA_VERSION = 1


def save_instance(instance: GBSInstance, path) -> None:
    record = {
        "schema_version": INSTANCE_SCHEMA_VERSION,
        "n_output": instance.n_output,
        "n_input": instance.n_input,
        "squeezing": instance.squeezing.tolist(),
        "transformation_real": instance.transformation.real.tolist(),
        "transformation_imag": instance.transformation.imag.tolist(),
    }
    Path(path).write_text(json.dumps(record, sort_keys=True, indent=1) + "\n")


def load_instance(path) -> GBSInstance:
    try:
        record = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse instance file {path}: {exc}") from exc
    try:
        version = record["schema_version"]
        if version != INSTANCE_SCHEMA_VERSION:
            raise ParseError(f"unsupported instance schema version {version}")
        transformation = np.asarray(record["transformation_real"], dtype=float) + 1j * np.asarray(
            record["transformation_imag"], dtype=float
        )
        return GBSInstance(
            n_output=record["n_output"],
            n_input=record["n_input"],
            squeezing=np.asarray(record["squeezing"], dtype=float),
            transformation=transformation,
        )
    except KeyError as exc:
        raise ParseError(f"instance file {path} is missing field {exc}") from exc


def save_samples(sample_set: SampleSet, path) -> None:
    header = {"n_modes": sample_set.n_modes, "n_samples": sample_set.n_samples}
    header.update(
        {key: value for key, value in sample_set.metadata.items() if _jsonable(value)}
    )
    with open(path, "w") as handle:
        handle.write("# " + json.dumps(header, sort_keys=True) + "\n")
        digits = np.char.mod("%d", sample_set.samples)
        for row in digits:
            handle.write("".join(row) + "\n")


def load_samples(path) -> SampleSet:
    """Streaming read: one line at a time, constant memory per line."""
    metadata = {}
    rows = []
    n_modes = None
    with open(path) as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if line_no == 1:
                    try:
                        metadata = json.loads(line.lstrip("# "))
                    except json.JSONDecodeError as exc:
                        raise ParseError(
                            f"{path}:{line_no}: malformed header: {exc}"
                        ) from exc
                    n_modes = metadata.get("n_modes")
                continue
            if set(line) - {"0", "1"}:
                raise ParseError(f"{path}:{line_no}: line contains non-bit characters")
            if n_modes is None:
                n_modes = len(line)
            if len(line) != n_modes:
                raise ParseError(
                    f"{path}:{line_no}: expected {n_modes} bits, got {len(line)}"
                )
            rows.append(np.frombuffer(line.encode(), dtype=np.uint8) - ord("0"))
    if not rows:
        raise ParseError(f"{path}: no samples found")
    declared = metadata.pop("n_samples", None)
    if declared is not None and declared != len(rows):
        raise ParseError(f"{path}: header declares {declared} samples, found {len(rows)}")
    metadata.pop("n_modes", None)
    return SampleSet(n_modes, np.vstack(rows), metadata)


def save_report(report: MetricReport, path, fmt: str = "json") -> None:
    if fmt == "json":
        Path(path).write_text(
            json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n"
        )
    elif fmt == "csv":
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            has_bounds = report.bounds is not None
            header = ["subset", "value"] + (["lower", "upper"] if has_bounds else [])
            writer.writerow(header)
            for i, (subset, value) in enumerate(zip(report.subsets, report.values)):
                row = ["|".join(str(m) for m in subset), repr(float(value))]
                if has_bounds:
                    row += [repr(float(b)) for b in report.bounds[i]]
                writer.writerow(row)
            handle.write("# aggregate " + json.dumps(report.aggregate, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def load_report(path) -> MetricReport:
    try:
        record = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse report file {path}: {exc}") from exc
    return MetricReport.from_dict(record)


def import_ustc(squeezing_path, real_path, imag_path, out_path) -> GBSInstance:
    """Adapter from published plain-text matrix/squeezing files to canonical JSON.

    Expects whitespace-separated reals: a vector of squeezing parameters and
    the real/imaginary parts of the transformation matrix.  The upstream
    row/column convention is validated only through the physicality checks
    on load; verify theoretical mean click numbers before trusting a
    converted dataset.
    """
    try:
        squeezing = np.loadtxt(squeezing_path, dtype=float, ndmin=1)
        real = np.loadtxt(real_path, dtype=float, ndmin=2)
        imag = np.loadtxt(imag_path, dtype=float, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ParseError(f"cannot parse upstream data files: {exc}") from exc
    if real.shape != imag.shape:
        raise ParseError(
            f"real part shape {real.shape} != imaginary part shape {imag.shape}"
        )
    instance = GBSInstance(
        n_output=real.shape[0],
        n_input=real.shape[1],
        squeezing=squeezing,
        transformation=real + 1j * imag,
    )
    save_instance(instance, out_path)
    return instance


def _jsonable(value) -> bool:
    try:
        json.dumps(value)
        return True
    except (TypeError, ValueError):
        return False
