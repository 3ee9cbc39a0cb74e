"""File formats: line-delimited JSON prediction logs, two-column
trajectory CSVs, and JSON report documents.

Trajectory CSVs and report JSON round floats to six decimals for
diff-stable files; prediction logs keep full-precision floats because
records must survive a parse/serialize round trip unchanged.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .classification import ClassReport, ConfusionMatrix
from .correction import CorrectionOutcome
from .experiment import ExperimentSummary
from .validation import ValidationError


class LogFormatError(ValidationError):
    """Malformed prediction-log input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class PredictionRecord:
    step: int
    y_cont: float
    probs: tuple

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))


def parse_prediction_line(line: str, line_no: int) -> PredictionRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LogFormatError(line_no, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise LogFormatError(line_no, "expected a JSON object")
    try:
        step = obj["step"]
        y_cont = obj["y_cont"]
        probs = obj["probs"]
    except KeyError as exc:
        raise LogFormatError(line_no, f"missing field {exc.args[0]!r}") from exc
    if not isinstance(step, int) or isinstance(step, bool):
        raise LogFormatError(line_no, f"step must be an integer, got {step!r}")
    if not isinstance(y_cont, (int, float)) or isinstance(y_cont, bool):
        raise LogFormatError(line_no, f"y_cont must be a number, got {y_cont!r}")
    if not isinstance(probs, list) or not all(
        isinstance(p, (int, float)) and not isinstance(p, bool) for p in probs
    ):
        raise LogFormatError(line_no, "probs must be an array of numbers")
    return PredictionRecord(step=step, y_cont=float(y_cont), probs=tuple(probs))


def serialize_prediction(record: PredictionRecord) -> str:
    return json.dumps(
        {"step": record.step, "y_cont": record.y_cont, "probs": list(record.probs)}
    )


def read_prediction_log(path) -> list[PredictionRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if line.strip():
                records.append(parse_prediction_line(line, line_no))
    return records


def serialize_corrected(record: PredictionRecord, outcome: CorrectionOutcome) -> str:
    return json.dumps(
        {
            "step": record.step,
            "y_cont": record.y_cont,
            "probs": list(record.probs),
            "y_final": outcome.y_final,
            "case_id": outcome.case_id.value,
            "c_max": outcome.summary.c_max,
            "entropy": outcome.summary.h,
        }
    )


def write_corrected_log(path, rows) -> None:
    """Write (record, outcome) pairs as line-delimited JSON."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record, outcome in rows:
            fh.write(serialize_corrected(record, outcome) + "\n")


def write_trajectory_csv(path, trajectory) -> None:
    pts = np.asarray(getattr(trajectory, "points", trajectory), dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y\n")
        for x, y in pts:
            fh.write(f"{x:.6f},{y:.6f}\n")


def read_trajectory_csv(path) -> np.ndarray:
    """Read an x,y CSV (header optional) into an (n, 2) float array."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, row in enumerate(csv.reader(fh), start=1):
            if not row:
                continue
            if len(row) != 2:
                raise ValidationError(f"{path}: line {line_no}: expected 2 columns, got {len(row)}")
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if line_no == 1:  # header row
                    continue
                raise ValidationError(f"{path}: line {line_no}: non-numeric coordinates {row!r}")
    return np.array(rows, dtype=float).reshape(-1, 2)


def read_labels_csv(path) -> np.ndarray:
    """Read a single-column integer CSV (header optional)."""
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                labels.append(int(text))
            except ValueError:
                if line_no == 1:
                    continue
                raise ValidationError(f"{path}: line {line_no}: expected an integer, got {text!r}")
    return np.array(labels, dtype=np.int64)


def _round6(value):
    if isinstance(value, float):
        return round(value, 6)
    if isinstance(value, dict):
        return {k: _round6(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round6(v) for v in value]
    return value


def similarity_dict(report) -> dict:
    return _round6(report.as_dict())


def experiment_report_dict(summary: ExperimentSummary) -> dict:
    """Plain-JSON view of an experiment summary (floats at 6 decimals)."""
    plan = summary.plan
    doc: dict = {
        "plan": {
            "routes": [r.value for r in plan.routes],
            "trials_per_route": plan.trials_per_route,
            "base_seed": plan.base_seed,
            "modes": list(plan.modes),
        },
        "routes": {},
        "overall": {},
    }
    for tr in summary.trial_reports:
        block = doc["routes"].setdefault(tr.route.value, {})
        block[tr.mode] = {
            "per_trial": [similarity_dict(r) for r in tr.reports],
            "mean": similarity_dict(tr.summary.mean) if tr.summary else None,
            "std": similarity_dict(tr.summary.std) if tr.summary else None,
            "case_histogram": tr.case_histogram,
            "route_lost": list(tr.route_lost),
            "errors": [list(e) for e in tr.errors],
        }
    for mode, agg in summary.overall.items():
        doc["overall"][mode] = {
            "mean": similarity_dict(agg.mean),
            "std": similarity_dict(agg.std),
        }
    return doc


def class_report_dict(matrix: ConfusionMatrix, rep: ClassReport) -> dict:
    return {
        "classes": [
            {
                "class": c,
                "precision": round(float(rep.precision[c]), 6),
                "recall": round(float(rep.recall[c]), 6),
                "f1": round(float(rep.f1[c]), 6),
                "support": int(rep.support[c]),
            }
            for c in range(matrix.n_classes)
        ],
        "accuracy": round(rep.accuracy, 6),
        "macro_avg": _round6(rep.macro_avg),
        "weighted_avg": _round6(rep.weighted_avg),
        "total_support": matrix.total,
        "confusion_matrix": matrix.counts.tolist(),
    }


def write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
