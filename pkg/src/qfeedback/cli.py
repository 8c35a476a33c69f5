"""Batch experiment runner.

    qfeedback --command pipeline --lambda 10 --slots 1000 --output run.csv
    qfeedback --command sweep --lambda-grid 0,1,2,5 --seed 42 --output sweep.csv
    qfeedback --command verify

Settings come from defaults, then an optional JSON ``--config`` file, then
explicit flags. Each run writes the per-row report to ``--output`` and a
summary with the resolved config next to it as ``<stem>.summary.json``.

Exit status: 0 success, 1 failed check, 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Sequence

import numpy as np

from . import __version__, kernels
from .capacity import lambda_sweep, run_classical_baseline
from .channels import FlipChannelConfig, NoisyChannelConfig, isotropic_shrink_factor
from .invariants import run_all
from .protocol import helper_feedback_round
from .report import ReportError, emit_report, to_json, write_text
from .simulation import FeedbackLinkConfig, run_pipeline

log = logging.getLogger("qfeedback")

COMMANDS = ("verify", "sweep", "pipeline", "baseline", "helper-demo")
EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

BASELINE_STREAM = 7
HELPER_STREAM = 8


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str = "verify"
    lam: float = 10.0
    lambda_grid: list = field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0, 5.0, 10.0])
    trials: int = 10_000
    slots: int = 1000
    samples: int = 100_000
    seed: int = 0
    quantize_bits: int = 0
    feedback: bool = True
    output: Optional[str] = None
    format: str = "csv"

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if not np.isfinite(self.lam) or self.lam < 0:
            raise UsageError("--lambda must be finite and >= 0")
        if not self.lambda_grid or any(not np.isfinite(x) or x < 0 for x in self.lambda_grid):
            raise UsageError("--lambda-grid must be a nonempty list of finite values >= 0")
        if self.trials < 1:
            raise UsageError("--trials must be >= 1")
        if self.slots < 2:
            raise UsageError("--slots must be >= 2")
        if self.samples < 1000:
            raise UsageError("--samples must be >= 1000")
        if self.quantize_bits < 0:
            raise UsageError("--quantize-bits must be >= 0")
        if self.seed < 0:
            raise UsageError("--seed must be >= 0")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")

    def resolved(self) -> dict:
        return {("lambda" if k == "lam" else k): v for k, v in asdict(self).items()}


# keys accepted in a config file, mapped to dataclass fields
_FILE_KEYS = {f.name: f.name for f in fields(ExperimentConfig)}
_FILE_KEYS.update({"lambda": "lam", "lambda-grid": "lambda_grid", "quantize-bits": "quantize_bits"})


def _parse_grid(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad lambda grid {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qfeedback", description="Feedback-assisted quantum channel experiments.")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with default settings; flags override it")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--lambda-grid", dest="lambda_grid", type=_parse_grid)
    p.add_argument("--trials", type=int)
    p.add_argument("--slots", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--quantize-bits", dest="quantize_bits", type=int)
    p.add_argument("--no-feedback", dest="feedback", action="store_const", const=False)
    p.add_argument("--output")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in data.items():
            if key not in _FILE_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            setattr(cfg, _FILE_KEYS[key], value)
    for name in ("command", "lam", "lambda_grid", "trials", "slots", "samples", "seed", "quantize_bits", "feedback", "output", "format"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    try:
        cfg.lam = float(cfg.lam)
        cfg.lambda_grid = [float(x) for x in cfg.lambda_grid]
        for name in ("trials", "slots", "samples", "seed", "quantize_bits"):
            value = getattr(cfg, name)
            if isinstance(value, bool) or int(value) != value:
                raise UsageError(f"{name} must be an integer")
            setattr(cfg, name, int(value))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad config value: {exc}") from exc
    if not isinstance(cfg.feedback, bool):
        raise UsageError("feedback must be true or false")
    cfg.validate()
    return cfg


def summary_path(output: str) -> str:
    stem, _ = os.path.splitext(output)
    return stem + ".summary.json"


def _run_sweep(cfg: ExperimentConfig):
    records = lambda_sweep(cfg.lambda_grid, cfg.samples, cfg.seed)
    rows = [{"lambda": r.lam, "chi_bits": r.chi_bits, "mc_samples": r.mc_samples, "seed": r.seed} for r in records]
    summary = {
        "points": len(records),
        "chi_bits_per_qubit": [r.chi_bits for r in records],
        # closed-form Bloch contraction of the averaged channel, for comparison
        "bloch_shrink_closed_form": [float(isotropic_shrink_factor(r.lam)) for r in records],
    }
    return rows, summary


def _run_pipeline(cfg: ExperimentConfig):
    trial = run_pipeline(
        cfg.slots,
        NoisyChannelConfig(cfg.lam),
        FeedbackLinkConfig(cfg.quantize_bits),
        feedback_enabled=cfg.feedback,
        seed=cfg.seed,
    )
    rows = [
        {"slot": r.slot, "message": r.message, "decoded": r.decoded, "correct": r.correct, "lambda": cfg.lam, "feedback": cfg.feedback}
        for r in trial.rows
    ]
    summary = {
        "slots": trial.slots,
        "bits_sent": trial.bits_sent,
        "bits_decoded_correctly": trial.bits_decoded_correctly,
        "message_errors": sum(not r.correct for r in trial.rows),
        "throughput_bits_per_slot": trial.throughput,
        # two qubit transmissions per slot, one per subchannel
        "throughput_bits_per_qubit": trial.throughput / 2.0,
    }
    return rows, summary


def _run_baseline(cfg: ExperimentConfig):
    rng = np.random.default_rng([cfg.seed, BASELINE_STREAM])
    result = run_classical_baseline(cfg.feedback, cfg.slots, rng)
    rows = [
        {
            "slot": r.slot,
            "noisy_bit_in": r.noisy_bit_in,
            "noisy_bit_out": r.noisy_bit_out,
            "quiet_payload_kind": r.quiet_payload_kind,
            "novel_bits_delivered": r.novel_bits_delivered,
        }
        for r in result.rows
    ]
    summary = {
        "slots": result.n_slots,
        "novel_bits": result.novel_bits,
        "throughput_bits_per_slot": result.throughput,
        "throughput_bits_per_use": result.throughput / 2.0,
    }
    return rows, summary


def _run_helper_demo(cfg: ExperimentConfig):
    rng = np.random.default_rng([cfg.seed, HELPER_STREAM])
    flip_cfg = FlipChannelConfig()
    rows = []
    for i in range(1, cfg.trials + 1):
        info_bit = int(rng.integers(0, 2))
        res = helper_feedback_round(flip_cfg, info_bit, rng)
        rows.append(
            {
                "round": i,
                "true_flip": res.true_flip,
                "inferred_flip": res.inferred_flip,
                "receiver_blind_correct": res.receiver_blind_guess_correct,
            }
        )
    n = len(rows)
    summary = {
        "rounds": n,
        "transmitter_inference_accuracy": sum(r["true_flip"] == r["inferred_flip"] for r in rows) / n,
        "receiver_blind_accuracy": sum(r["receiver_blind_correct"] for r in rows) / n,
    }
    return rows, summary


_RUNNERS = {
    "sweep": _run_sweep,
    "pipeline": _run_pipeline,
    "baseline": _run_baseline,
    "helper-demo": _run_helper_demo,
}


def _run_verify(cfg: ExperimentConfig, out=sys.stdout) -> int:
    def show(res):
        print(f"{'PASS' if res.passed else 'FAIL'}  {res.name}: {res.detail}", file=out, flush=True)

    results = run_all(cfg.seed, progress=show)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=out)
    if cfg.output:
        rows = [{"check": r.name, "passed": r.passed, "detail": r.detail} for r in results]
        emit_report(rows, cfg.output, cfg.format)
        summary = {"command": "verify", "config": cfg.resolved(), "seed": cfg.seed, "failed": failed}
        write_text(summary_path(cfg.output), to_json(summary) + "\n")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run one configured command and write its reports. Returns the exit status."""
    log.info("running %s with %s backend", cfg.command, kernels.BACKEND)
    if cfg.command == "verify":
        return _run_verify(cfg)
    output = cfg.output or f"{cfg.command}.{cfg.format}"
    rows, metrics = _RUNNERS[cfg.command](cfg)
    summary = {"command": cfg.command, "config": cfg.resolved(), "seed": cfg.seed}
    summary.update(metrics)
    emit_report(rows, output, cfg.format)
    write_text(summary_path(output), to_json(summary) + "\n")
    for key, value in metrics.items():
        if not isinstance(value, list):
            print(f"{key}: {value}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qfeedback: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run_experiment(cfg)
    except ReportError as exc:
        print(f"qfeedback: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
