"""Command-line interface.

Subcommands: ``correct`` (offline correction of a prediction log),
``simulate`` (batch closed-loop trials to CSV + JSON report), ``metrics``
(similarity metrics between two trajectory CSVs), and ``classify-report``
(classification metrics from label CSVs). All randomness is seeded via
flags; exit status is 0 on success, 2 on input errors, 3 on environment
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from .binning import make_space
from .classification import confusion, report
from .correction import CorrectionConfig, DualHeadOutput, correct
from .experiment import ExperimentPlan, run_experiment
from .fileio import (
    class_report_dict,
    experiment_report_dict,
    read_labels_csv,
    read_prediction_log,
    read_trajectory_csv,
    similarity_dict,
    write_corrected_log,
    write_json,
    write_trajectory_csv,
)
from .simulation import PredictorStubConfig, RouteKind, TrialSettings
from .trajectory import similarity_report
from .validation import ValidationError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ENV = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steerfuse",
        description="Confidence-guided steering correction, simulation, and metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correct", help="apply the correction to a prediction log")
    p.add_argument("--in", dest="in_path", required=True, help="input JSONL prediction log")
    p.add_argument("--out", dest="out_path", required=True, help="output JSONL corrected log")
    p.add_argument("--bins", type=int, default=11)
    p.add_argument("--tau", type=float, default=0.9)
    p.add_argument("--low-conf", type=float, default=0.5)
    p.add_argument("--entropy-gate", type=float, default=1.5)
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("simulate", help="run seeded closed-loop trials")
    p.add_argument("--routes", default="straight,one-turn,two-turn",
                   help="comma-separated: straight, one-turn, two-turn")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fault-rate", type=float, default=0.05)
    p.add_argument("--reg-noise", type=float, default=0.05)
    p.add_argument("--out", dest="out_dir", required=True)
    p.add_argument("--no-correction", action="store_true",
                   help="run only the uncorrected mode")

    p = sub.add_parser("metrics", help="similarity metrics between two trajectory CSVs")
    p.add_argument("--pred", required=True)
    p.add_argument("--ref", required=True)

    p = sub.add_parser("classify-report", help="classification metrics from label CSVs")
    p.add_argument("--true", dest="true_path", required=True)
    p.add_argument("--pred", dest="pred_path", required=True)
    p.add_argument("--bins", type=int, default=11)
    return parser


def _cmd_correct(args) -> int:
    records = read_prediction_log(args.in_path)
    space = make_space(args.bins)
    cfg = CorrectionConfig(
        tau=args.tau,
        low_conf=args.low_conf,
        entropy_gate=args.entropy_gate,
        sample_count=args.samples,
        rng_seed=args.seed,
    )
    rng = np.random.default_rng(args.seed)
    rows = []
    cases: Counter = Counter()
    for rec in records:
        if len(rec.probs) != space.n_bins:
            raise ValidationError(
                f"record step {rec.step}: probs length {len(rec.probs)} "
                f"does not match --bins {space.n_bins}"
            )
        out = DualHeadOutput(y_cont=rec.y_cont, probs=np.array(rec.probs))
        outcome = correct(out, space, cfg, rng)
        rows.append((rec, outcome))
        cases[outcome.case_id.value] += 1
    write_corrected_log(args.out_path, rows)
    summary = {"steps": len(rows)}
    summary.update({c: cases.get(c, 0) for c in ("Case1", "Case2", "Case3", "Case4")})
    print(json.dumps(summary))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    try:
        kinds = tuple(RouteKind(token.strip()) for token in args.routes.split(",") if token.strip())
    except ValueError:
        raise ValidationError(
            f"unknown route in {args.routes!r}; choose from "
            f"{', '.join(k.value for k in RouteKind)}"
        )
    settings = TrialSettings(
        stub=PredictorStubConfig(reg_noise_std=args.reg_noise, fault_rate=args.fault_rate)
    )
    plan = ExperimentPlan(
        routes=kinds,
        trials_per_route=args.trials,
        base_seed=args.seed,
        run_corrected=not args.no_correction,
        run_uncorrected=True,
        settings=settings,
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    probe = out_dir / ".write_probe"
    probe.touch()
    probe.unlink()
    summary = run_experiment(plan)
    for tr in summary.trial_reports:
        for t, traj in enumerate(tr.trajectories):
            name = f"trial_{tr.route.value}_{tr.mode}_{t:02d}.csv"
            write_trajectory_csv(out_dir / name, traj)
    write_json(out_dir / "report.json", experiment_report_dict(summary))
    print(f"wrote {out_dir / 'report.json'}")
    return EXIT_OK


def _cmd_metrics(args) -> int:
    pred = read_trajectory_csv(args.pred)
    ref = read_trajectory_csv(args.ref)
    print(json.dumps(similarity_dict(similarity_report(pred, ref)), indent=2))
    return EXIT_OK


def _cmd_classify_report(args) -> int:
    true_labels = read_labels_csv(args.true_path)
    pred_labels = read_labels_csv(args.pred_path)
    matrix = confusion(true_labels, pred_labels, args.bins)
    print(json.dumps(class_report_dict(matrix, report(matrix)), indent=2))
    return EXIT_OK


_COMMANDS = {
    "correct": _cmd_correct,
    "simulate": _cmd_simulate,
    "metrics": _cmd_metrics,
    "classify-report": _cmd_classify_report,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENV


if __name__ == "__main__":
    sys.exit(main())
