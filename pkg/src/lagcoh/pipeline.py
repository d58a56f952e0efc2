"""End-to-end analysis: data -> spectra -> fits -> measures -> tests."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from lagcoh._version import __version__
from lagcoh.errors import BandMismatch, ConfigError, LagCohError
from lagcoh.inference import TestReport, f_test_bivariate, lrt_chi_square
from lagcoh.io import AnalysisConfig
from lagcoh.measures import LaggedResult, coherency, degenerate_result, lagged_from_spectra
from lagcoh.spectra import (
    CrossSpectra,
    EpochedTimeSeries,
    band_aggregate,
    cross_spectra,
    dft_epochs,
    normalize_to_phase,
)

CSV_COLUMNS = (
    "label", "p", "q", "lagA", "lagC", "lagB",
    "statistic", "df1", "df2", "p_value", "degenerate",
)
MEASURE_KEYS = {"A": "lagA", "C": "lagC", "B_nagao": "lagB"}


@dataclass(frozen=True)
class ResultEntry:
    label: str
    kind: str  # "frequency" or "band"
    frequencies: tuple[int, ...]
    result: LaggedResult
    tests: tuple[TestReport, ...] = ()
    hz: tuple[float, ...] | None = None


@dataclass
class ResultDocument:
    entries: list[ResultEntry] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def _is_real_bin(omega: int, n_samples: int) -> bool:
    return omega == 0 or (n_samples % 2 == 0 and 2 * omega == n_samples)


def _with_context(exc: LagCohError, where: str) -> LagCohError:
    new = type(exc)(f"{where}: {exc}")
    new.__cause__ = exc
    return new


def _analyse(cs: CrossSpectra, degenerate: bool, cfg: AnalysisConfig, p: int, q: int):
    if degenerate:
        result = degenerate_result(p, q, cs.label)
    else:
        result = lagged_from_spectra(cs, cfg.ridge_lambda)
    tests = []
    for kind in cfg.tests:
        if kind == "lrt":
            tests.append(lrt_chi_square(result.lagA, cs.n_epochs, p, q))
        elif kind == "f_bivariate":
            if degenerate:
                tests.append(TestReport(0.0, 1, cs.n_epochs - 3, 1.0, "f_test"))
            else:
                c = coherency(cs.sxx[0, 0].real, cs.syy[0, 0].real, cs.sxy[0, 0])
                tests.append(f_test_bivariate(c, cs.n_epochs))
    return result, tuple(tests)


def run_pipeline(ts: EpochedTimeSeries, cfg: AnalysisConfig, jobs: int = 1) -> ResultDocument:
    """Compute lagged measures for every requested frequency and band.

    Frequencies whose coefficients are all real (DC and, for even N_T, the
    Nyquist bin) are reported as exact zeros and listed as degenerate.
    Work is fanned out over ``jobs`` threads; results are assembled in
    config order so the output does not depend on ``jobs``.
    """
    n_samples = ts.n_samples
    n_nyq = n_samples // 2
    try:
        x_idx = [ts.channel_index(c) for c in cfg.x_channels]
        y_idx = [ts.channel_index(c) for c in cfg.y_channels]
    except (KeyError, IndexError) as exc:
        raise ConfigError(f"channel selection: {exc}") from None
    if set(x_idx) & set(y_idx):
        raise ConfigError("x and y channel selections overlap")
    p, q = len(x_idx), len(y_idx)
    if "f_bivariate" in cfg.tests and ts.n_epochs < 4:
        raise ConfigError("the f_bivariate test needs at least 4 epochs")

    if cfg.frequencies is None and not cfg.bands:
        freqs = list(range(n_nyq + 1))
    else:
        freqs = list(cfg.frequencies or [])
    needed = sorted(set(freqs).union(*cfg.bands.values()))
    out_of_range = [w for w in needed if w > n_nyq]
    if out_of_range:
        raise BandMismatch(f"frequencies {out_of_range} exceed the Nyquist index {n_nyq}")

    spec = dft_epochs(ts, demean=cfg.demean)
    if cfg.phase_only:
        spec = normalize_to_phase(spec)
    xs = spec.select_channels(x_idx)
    ys = spec.select_channels(y_idx)
    per_freq = {cs.label: cs for cs in cross_spectra(xs, ys, needed)}

    tasks = []
    for w in freqs:
        tasks.append((str(w), "frequency", (w,), per_freq[w], _is_real_bin(w, n_samples)))
    for name, band in cfg.bands.items():
        cs = band_aggregate(list(per_freq.values()), band, label=name)
        degenerate = all(_is_real_bin(w, n_samples) for w in band)
        tasks.append((name, "band", tuple(int(w) for w in band), cs, degenerate))

    def work(task):
        label, kind, band, cs, degenerate = task
        try:
            return _analyse(cs, degenerate, cfg, p, q)
        except LagCohError as exc:
            raise _with_context(exc, f"{kind} {label}") from exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(work, tasks))
    else:
        outputs = [work(t) for t in tasks]

    fs = ts.sampling_rate
    entries = []
    for (label, kind, band, _, _), (result, tests) in zip(tasks, outputs):
        hz = tuple(w * fs / n_samples for w in band) if fs else None
        entries.append(ResultEntry(label, kind, band, result, tests, hz))

    metadata = {
        "tool": "lagcoh",
        "version": __version__,
        "n_epochs": ts.n_epochs,
        "n_samples": n_samples,
        "p": p,
        "q": q,
        "x_channels": [ts.channel_labels[i] for i in x_idx],
        "y_channels": [ts.channel_labels[i] for i in y_idx],
        "sampling_rate": fs,
        "degenerate": [e.label for e in entries if e.result.degenerate],
        "zero_modulus_count": spec.zero_modulus_count,
        "config": cfg.to_dict(),
    }
    return ResultDocument(entries, metadata)


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x}")
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _dump(obj) -> str:
    # json.dumps with every float written at 17 significant digits
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_dump(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, np.integer):
        return str(int(obj))
    if isinstance(obj, np.floating):
        return _fmt_float(float(obj))
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _measures_dict(result: LaggedResult, measures) -> dict:
    values = {"lagA": result.lagA, "lagC": result.lagC, "lagB": result.lagB}
    return {MEASURE_KEYS[m]: values[MEASURE_KEYS[m]] for m in ("A", "C", "B_nagao") if m in measures}


def to_json_dict(doc: ResultDocument) -> dict:
    measures = doc.metadata.get("config", {}).get("measures", list(MEASURE_KEYS))
    results = []
    for e in doc.entries:
        results.append({
            "label": e.label,
            "kind": e.kind,
            "frequencies": list(e.frequencies),
            "hz": list(e.hz) if e.hz is not None else None,
            "degenerate": e.result.degenerate,
            "measures": _measures_dict(e.result, measures),
            "tests": [
                {"kind": t.kind, "statistic": float(t.statistic), "df1": t.df1,
                 "df2": t.df2, "p_value": float(t.p_value)}
                for t in e.tests
            ],
        })
    return {"metadata": doc.metadata, "results": results}


def emit_results(doc: ResultDocument, format: str = "json") -> str:
    """Serialise a ResultDocument as JSON or CSV text."""
    if format == "json":
        return _dump(to_json_dict(doc)) + "\n"
    if format != "csv":
        raise ValueError(f"unknown output format {format!r}")
    measures = doc.metadata.get("config", {}).get("measures", list(MEASURE_KEYS))
    p, q = doc.metadata.get("p", ""), doc.metadata.get("q", "")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for e in doc.entries:
        vals = _measures_dict(e.result, measures)
        base = [e.label, p, q, *(_fmt_float(vals[k]) if k in vals else "" for k in ("lagA", "lagC", "lagB"))]
        flag = "1" if e.result.degenerate else "0"
        if not e.tests:
            writer.writerow([*base, "", "", "", "", flag])
        for t in e.tests:
            df2 = "" if t.df2 is None else t.df2
            writer.writerow([*base, _fmt_float(float(t.statistic)), t.df1, df2, _fmt_float(float(t.p_value)), flag])
    return buf.getvalue()


def summary_table(doc: ResultDocument) -> str:
    """Rounded human-readable view of a result document."""
    lines = [f"{'label':>10} {'lagA':>10} {'lagC':>8} {'lagB':>8}  tests"]
    for e in doc.entries:
        r = e.result
        tests = "  ".join(
            f"{t.kind}: stat={t.statistic:.3f} p={t.p_value:.4f}" for t in e.tests
        )
        flag = " *" if r.degenerate else ""
        lines.append(f"{e.label:>10} {r.lagA:10.4f} {r.lagC:8.4f} {r.lagB:8.4f}  {tests}{flag}")
    if any(e.result.degenerate for e in doc.entries):
        lines.append("* degenerate (all coefficients real); reported as zero")
    return "\n".join(lines)
