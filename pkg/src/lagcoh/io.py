"""Reading and writing epoched data, analysis configs and model files.

Two data formats are supported:

``csv_long``
    Header ``epoch,sample,<chan1>,<chan2>,...``; one row per (epoch, sample).
    Rows may come in any order; every epoch must have the same samples.
``raw_f64``
    16-byte header: magic ``b"LCH1"`` then little-endian uint32 ``n_epochs``,
    ``n_samples``, ``n_channels``; followed by little-endian float64 values in
    ``[epoch][sample][channel]`` order.
"""

from __future__ import annotations

import csv
import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from lagcoh.errors import ConfigError, FormatError, LagCohError, RaggedData
from lagcoh.simulate import GenerativeModel
from lagcoh.spectra import EpochedTimeSeries

RAW_MAGIC = b"LCH1"
RAW_HEADER = struct.Struct("<4sIII")
FORMATS = ("csv_long", "raw_f64")
MEASURES = ("A", "C", "B_nagao")
TESTS = ("lrt", "f_bivariate")


def infer_format(path) -> str:
    return "csv_long" if Path(path).suffix.lower() == ".csv" else "raw_f64"


def load_epochs(path, format: str | None = None, sampling_rate: float | None = None) -> EpochedTimeSeries:
    """Load epoched data from ``path`` in one of FORMATS."""
    format = format or infer_format(path)
    if format == "csv_long":
        return _load_csv_long(path, sampling_rate)
    if format == "raw_f64":
        return _load_raw_f64(path, sampling_rate)
    raise ConfigError(f"unknown data format {format!r}; expected one of {FORMATS}")


def _load_csv_long(path, sampling_rate):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        if len(header) < 3 or header[:2] != ["epoch", "sample"]:
            raise FormatError(f"{path}: header must start with 'epoch,sample' and name >= 1 channel")
        channels = header[2:]
        rows = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise FormatError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                key = (int(row[0]), int(row[1]))
                values = [float(v) for v in row[2:]]
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
            if key in rows:
                raise FormatError(f"{path}:{lineno}: duplicate (epoch, sample) {key}")
            rows[key] = values
    if not rows:
        raise FormatError(f"{path}: no data rows")

    epochs: dict[int, list[int]] = {}
    for e, t in rows:
        epochs.setdefault(e, []).append(t)
    epoch_ids = sorted(epochs)
    samples = sorted(epochs[epoch_ids[0]])
    for e in epoch_ids:
        if sorted(epochs[e]) != samples:
            raise RaggedData(
                f"{path}: epoch {e} has {len(epochs[e])} samples, "
                f"epoch {epoch_ids[0]} has {len(samples)}"
            )
    data = np.array([[rows[(e, t)] for t in samples] for e in epoch_ids], dtype=float)
    return EpochedTimeSeries(data, channels, sampling_rate)


def _load_raw_f64(path, sampling_rate):
    blob = Path(path).read_bytes()
    if len(blob) < RAW_HEADER.size:
        raise FormatError(f"{path}: truncated header")
    magic, n_epochs, n_samples, n_channels = RAW_HEADER.unpack_from(blob)
    if magic != RAW_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    expected = RAW_HEADER.size + 8 * n_epochs * n_samples * n_channels
    if len(blob) != expected:
        raise FormatError(f"{path}: expected {expected} bytes, found {len(blob)}")
    data = np.frombuffer(blob, dtype="<f8", offset=RAW_HEADER.size)
    data = data.reshape(n_epochs, n_samples, n_channels).astype(float)
    return EpochedTimeSeries(data, [], sampling_rate)


def write_csv_long(ts: EpochedTimeSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["epoch", "sample", *ts.channel_labels])
        for e in range(ts.n_epochs):
            for t in range(ts.n_samples):
                writer.writerow([e, t, *(repr(float(v)) for v in ts.data[e, t])])


def write_raw_f64(ts: EpochedTimeSeries, path) -> None:
    header = RAW_HEADER.pack(RAW_MAGIC, ts.n_epochs, ts.n_samples, ts.n_channels)
    Path(path).write_bytes(header + np.ascontiguousarray(ts.data, dtype="<f8").tobytes())


def save_epochs(ts: EpochedTimeSeries, path, format: str | None = None) -> None:
    format = format or infer_format(path)
    if format == "csv_long":
        write_csv_long(ts, path)
    elif format == "raw_f64":
        write_raw_f64(ts, path)
    else:
        raise ConfigError(f"unknown data format {format!r}; expected one of {FORMATS}")


@dataclass
class AnalysisConfig:
    """What to compute: channel split, frequencies/bands, measures and tests.

    ``frequencies=None`` with no bands means every frequency ``0..N_T//2``.
    Channels may be given as labels or integer positions.
    """

    x_channels: list
    y_channels: list
    frequencies: list[int] | None = None
    bands: dict[str, list[int]] = field(default_factory=dict)
    measures: list[str] = field(default_factory=lambda: list(MEASURES))
    tests: list[str] = field(default_factory=lambda: ["lrt"])
    phase_only: bool = False
    demean: bool = True
    ridge_lambda: float | None = None
    seed: int | None = None

    def __post_init__(self):
        if not self.x_channels or not self.y_channels:
            raise ConfigError("x_channels and y_channels must both be nonempty")
        if set(map(str, self.x_channels)) & set(map(str, self.y_channels)):
            raise ConfigError("x_channels and y_channels must be disjoint")
        for side in (self.x_channels, self.y_channels):
            if len(set(map(str, side))) != len(side):
                raise ConfigError("a channel is listed twice")
        if self.frequencies is not None:
            if any(not _is_int(w) or w < 0 for w in self.frequencies):
                raise ConfigError("frequencies must be nonnegative integers (cycles per epoch)")
            if len(set(self.frequencies)) != len(self.frequencies):
                raise ConfigError("frequencies must be unique")
        for name, band in self.bands.items():
            if not isinstance(name, str) or not name or name.isdigit():
                raise ConfigError(f"band name {name!r} must be a non-numeric string")
            if not band or any(not _is_int(w) or w < 0 for w in band):
                raise ConfigError(f"band {name!r} must list nonnegative integer frequencies")
        bad = set(self.measures) - set(MEASURES)
        if bad:
            raise ConfigError(f"unknown measures {sorted(bad)}; choose from {MEASURES}")
        bad = set(self.tests) - set(TESTS)
        if bad:
            raise ConfigError(f"unknown tests {sorted(bad)}; choose from {TESTS}")
        if "f_bivariate" in self.tests and (len(self.x_channels) != 1 or len(self.y_channels) != 1):
            raise ConfigError("the f_bivariate test needs exactly one x and one y channel")
        if self.ridge_lambda is not None and not self.ridge_lambda >= 0:
            raise ConfigError("ridge_lambda must be nonnegative")

    @classmethod
    def from_dict(cls, doc: dict) -> AnalysisConfig:
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        return asdict(self)


def _is_int(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def load_config(path) -> AnalysisConfig:
    return AnalysisConfig.from_dict(_read_json(path))


def model_from_dict(doc: dict) -> GenerativeModel:
    """Build a GenerativeModel from its JSON form.

    Keys: ``B`` (q x p), ``D_lags`` (list of q x p), ``noise_cov``,
    ``x_cov``, ``n_samples``, ``sampling_rate``.
    """
    if not isinstance(doc, dict) or "B" not in doc:
        raise ConfigError("model must be a JSON object with at least a 'B' matrix")
    allowed = {"B", "D_lags", "noise_cov", "x_cov", "n_samples", "sampling_rate"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown model fields {sorted(unknown)}")
    try:
        return GenerativeModel(
            doc["B"],
            tuple(doc.get("D_lags", ())),
            doc.get("noise_cov"),
            doc.get("x_cov"),
            doc.get("n_samples", 64),
            doc.get("sampling_rate"),
        )
    except (LagCohError, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid model: {exc}") from None


def load_model(path) -> GenerativeModel:
    return model_from_dict(_read_json(path))
