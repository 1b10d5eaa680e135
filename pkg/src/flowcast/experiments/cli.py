"""Command-line entry point: ``flowcast <verb> [options]``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 training divergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..dataset import generate_synthetic, save_csv, series_to_supervised
from ..errors import ConfigError, DataError, FlowcastError, ShapeError, TrainingDivergence
from ..metrics import evaluate
from ..models import load_model, save_model
from ..numcore import make_rng
from .config import ExperimentConfig, load_config
from .runner import (run_comparative, run_encoder_step_sweep, run_epoch_sweep, run_input_ablation,
                     run_models, run_predict_step_sweep, write_run_outputs)

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_DIVERGED = 0, 2, 3, 4

# CLI flag -> config key (flags default to None so only given ones override)
OVERRIDES = {
    "data": "data", "hours": "synthetic_hours", "data_seed": "data_seed", "seed": "seed",
    "encoder_steps": "encoder_steps", "predict_step": "predict_step", "inputs": "inputs",
    "models": "models", "hidden_size": "hidden_size", "optimizer": "optimizer",
    "learning_rate": "learning_rate", "batch_size": "batch_size", "epochs": "epochs", "loss": "loss",
    "train_fraction": "train_fraction", "train_count": "train_count", "scale_fit": "scale_fit",
    "r2_convention": "r2_convention", "svr_cap": "svr_cap", "out": "output_dir",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat 'key = value' configuration file")
    p.add_argument("--data", help="CSV path, or 'synthetic'")
    p.add_argument("--hours", type=int, help="length of the synthetic series")
    p.add_argument("--data-seed", type=int, help="synthetic generator seed (defaults to --seed)")
    p.add_argument("--seed", type=int)
    p.add_argument("--encoder-steps", type=int)
    p.add_argument("--predict-step", type=int)
    p.add_argument("--inputs", help="input groups joined by '+', e.g. flow+rain")
    p.add_argument("--models", help="comma-separated model kinds")
    p.add_argument("--hidden-size", type=int)
    p.add_argument("--optimizer")
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--loss")
    p.add_argument("--train-fraction", type=float)
    p.add_argument("--train-count", type=int)
    p.add_argument("--scale-fit", choices=("train", "all"))
    p.add_argument("--r2-convention", choices=("observed_mean", "predicted_mean"))
    p.add_argument("--svr-cap", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--wall-time", action="store_true", help="record per-epoch wall time in epochs.csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowcast", description="Stream-flow forecasting experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    g = sub.add_parser("generate", help="write a synthetic flow/rain CSV")
    g.add_argument("--hours", type=int, default=8000)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--output", required=True)

    t = sub.add_parser("train", help="train one model and store it")
    _common(t)
    t.add_argument("--model", default="lstm", choices=("svr", "mlp", "lstm", "rnn"))
    t.add_argument("--save", help="model file to write (default <out>/model.txt)")

    for verb, text in (("compare", "SVR/MLP/LSTM comparative run"), ("ablate", "input-combination study")):
        _common(sub.add_parser(verb, help=text))

    s = sub.add_parser("sweep", help="predict-step, encoder-step or epoch sweep")
    _common(s)
    s.add_argument("--param", required=True, choices=("predict_step", "encoder_step", "epochs"))
    s.add_argument("--values", help="comma-separated grid (default from config)")

    e = sub.add_parser("evaluate", help="score a stored model against a CSV")
    e.add_argument("--model-file", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--scaler", help="scaler file (default: next to the model file)")
    e.add_argument("--r2-convention", default="observed_mean", choices=("observed_mean", "predicted_mean"))
    return parser


def _config(args, require_seed: bool) -> ExperimentConfig:
    overrides = {key: getattr(args, flag) for flag, key in OVERRIDES.items() if getattr(args, flag, None) is not None}
    if getattr(args, "wall_time", False):
        overrides["wall_time"] = True
    cfg = load_config(args.config, overrides)
    if require_seed and args.seed is None:
        raise ConfigError("--seed is required for this command")
    return cfg


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2))


def cmd_generate(args) -> int:
    table = generate_synthetic(make_rng(args.seed), args.hours)
    save_csv(table, args.output)
    print(f"wrote {len(table.timestamps)} rows to {args.output}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _config(args, require_seed=False)
    if cfg.seed is None:
        cfg = cfg.replace(seed=0)
    cfg = cfg.replace(models=args.model)
    result = run_models(cfg, label="train")
    run = result.runs[args.model]
    if run.diverged:
        raise TrainingDivergence(run.error)
    if run.error:
        raise ConfigError(run.error)
    out = Path(cfg.output_dir)
    write_run_outputs(result, out, "train")
    model_path = Path(args.save) if args.save else out / "model.txt"
    model_path.parent.mkdir(parents=True, exist_ok=True)
    meta = {"encoder_steps": cfg.encoder_steps, "predict_step": cfg.predict_step, "inputs": cfg.inputs}
    save_model(run.model, model_path, meta)
    result.data.scaler.save(model_path.with_suffix(".scaler.csv"))
    _print_json(run.report.to_dict())
    return EXIT_OK


def _status(result_runs) -> int:
    if any(r.diverged for r in result_runs):
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _config(args, require_seed=True)
    result = run_comparative(cfg, cfg.output_dir)
    for kind, run in result.runs.items():
        print(f"{kind}: {run.report.to_json() if run.report else run.error}")
    return _status(result.runs.values())


def cmd_ablate(args) -> int:
    cfg = _config(args, require_seed=True)
    result = run_input_ablation(cfg, out_dir=cfg.output_dir)
    for label, run in result.combos.items():
        print(f"{label}: {run.report.to_json() if run.report else run.error}")
    return _status(result.combos.values())


def cmd_sweep(args) -> int:
    cfg = _config(args, require_seed=True)
    if args.param == "epochs":
        res = run_epoch_sweep(cfg, args.values, out_dir=cfg.output_dir)
        print(f"minimum test loss at epoch {res.best_epoch}")
        return EXIT_OK
    runner = run_predict_step_sweep if args.param == "predict_step" else run_encoder_step_sweep
    models = cfg.model_list if args.models else ("lstm",)
    res = runner(cfg, args.values, models=models, out_dir=cfg.output_dir)
    for v, cell in res.points:
        for m, r in cell.items():
            print(f"{args.param}={v} {m}: {r.to_json() if hasattr(r, 'to_json') else r}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    from ..dataset import MinMaxScaler, load_csv

    model, meta = load_model(args.model_file)
    scaler_path = Path(args.scaler) if args.scaler else Path(args.model_file).with_suffix(".scaler.csv")
    scaler = MinMaxScaler.load(scaler_path)
    try:
        enc, pred, inputs = meta["encoder_steps"], meta["predict_step"], meta["inputs"]
    except KeyError as exc:
        raise ConfigError(f"model file lacks metadata {exc}") from None
    from .config import parse_combo
    matrix = series_to_supervised(load_csv(args.data), enc, pred, parse_combo(inputs))
    scaled = scaler.scale_matrix(matrix)
    predictions = scaler.inverse_targets(model.predict(scaled.features))
    report = evaluate(predictions, matrix.targets, Path(args.data).name, args.r2_convention)
    _print_json(report.to_dict())
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "train": cmd_train, "compare": cmd_compare, "ablate": cmd_ablate,
            "sweep": cmd_sweep, "evaluate": cmd_evaluate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.verb](args)
    except TrainingDivergence as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (DataError, OSError) as exc:
        print(f"error: data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, ShapeError, FlowcastError) as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
