"""Experiment orchestration: comparative run, input ablation and parameter sweeps."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dataset import (fit_scaler, format_timestamp, generate_synthetic, load_csv, series_to_supervised,
                       split, strided_subsample)
from ..errors import ConfigError, DataError, FlowcastError, TrainingDivergence
from ..metrics import PUBLISHED_COMPARISON, PUBLISHED_INPUT_STUDY, EvalReport, evaluate
from ..models import LstmRegressor, MlpRegressor, RnnRegressor, SvrRegressor
from ..numcore import make_rng
from ..training import train, write_epoch_log
from .config import ABLATION_COMBOS, ExperimentConfig, int_grid, parse_combo

log = logging.getLogger(__name__)

INIT_STREAM = 0


@dataclass
class PreparedData:
    train: object             # scaled SupervisedMatrix
    test: object
    raw_test_targets: np.ndarray
    scaler: object
    digest: str


@dataclass
class ModelRun:
    model: object = None
    report: EvalReport | None = None
    predictions: np.ndarray | None = None
    logs: list = field(default_factory=list)
    error: str | None = None
    diverged: bool = False
    notes: dict = field(default_factory=dict)


@dataclass
class RunResult:
    """Outcome of fitting every configured model on one data preparation."""

    config: ExperimentConfig
    data: PreparedData
    runs: dict

    @property
    def reports(self) -> dict:
        return {k: r.report for k, r in self.runs.items() if r.report is not None}

    @property
    def any_diverged(self) -> bool:
        return any(r.diverged for r in self.runs.values())


def load_table(config: ExperimentConfig):
    if config.data == "synthetic":
        return generate_synthetic(make_rng(config.synthetic_seed), config.synthetic_hours)
    return load_csv(config.data)


def prepare_data(config: ExperimentConfig, table=None) -> PreparedData:
    table = load_table(config) if table is None else table
    matrix = series_to_supervised(table, config.encoder_steps, config.predict_step, config.combo)
    train_m, test_m = split(matrix, config.train_count, config.train_fraction)
    scaler = fit_scaler(train_m if config.scale_fit == "train" else matrix)
    tr, te = scaler.scale_matrix(train_m), scaler.scale_matrix(test_m)
    return PreparedData(tr, te, test_m.targets, scaler, _digest(tr, te))


def _digest(train_m, test_m) -> str:
    return f"{train_m.digest()[:32]}{test_m.digest()[:32]}"


def build_model(kind: str, config: ExperimentConfig, n_variables: int, seed: int):
    rng = make_rng(seed, INIT_STREAM)
    if kind == "lstm":
        return LstmRegressor.initialize(rng, n_variables, config.encoder_steps, config.hidden_size)
    if kind == "rnn":
        return RnnRegressor.initialize(rng, n_variables, config.encoder_steps, config.hidden_size)
    if kind == "mlp":
        return MlpRegressor.initialize(rng, n_variables * config.encoder_steps, config.mlp_hidden_size,
                                       config.mlp_activation)
    if kind == "svr":
        return SvrRegressor(config.svr_c, config.svr_gamma, config.svr_epsilon, config.svr_tol)
    raise ConfigError(f"unknown model kind {kind!r}")


def fit_model(kind: str, config: ExperimentConfig, data: PreparedData, seed: int, run_id: str) -> ModelRun:
    """Train one model and evaluate it in physical units on the test split."""
    if _digest(data.train, data.test) != data.digest:
        raise DataError("prepared matrices changed between models")
    model = build_model(kind, config, data.train.n_variables, seed)
    run = ModelRun(model=model)
    if kind == "svr":
        sub = strided_subsample(data.train, config.svr_cap)
        model.fit(sub.features, sub.targets)
        run.notes = {"svr_train_rows": sub.n_samples, "svr_cap": config.svr_cap,
                     "svr_iterations": model.model.info["iterations"],
                     "svr_support_vectors": model.model.info["n_support"]}
    else:
        _, run.logs = train(model, data.train, data.test, config.train_config(seed=seed))
    run.predictions = data.scaler.inverse_targets(model.predict(data.test.features))
    run.report = evaluate(run.predictions, data.raw_test_targets, run_id, config.r2_convention)
    return run


def run_models(config: ExperimentConfig, models=None, data: PreparedData | None = None,
               seed: int | None = None, label: str = "run", table=None) -> RunResult:
    """Fit each model on identical matrices; failures are recorded per model."""
    data = data or prepare_data(config, table)
    seed = config.run_seed if seed is None else seed
    runs = {}
    for kind in models or config.model_list:
        try:
            runs[kind] = fit_model(kind, config, data, seed, f"{label}/{kind}")
            log.info("%s/%s: %s", label, kind, runs[kind].report)
        except TrainingDivergence as exc:
            runs[kind] = ModelRun(error=f"training diverged: {exc}", diverged=True)
        except FlowcastError as exc:
            runs[kind] = ModelRun(error=f"{type(exc).__name__}: {exc}")
    return RunResult(config, data, runs)


# ---------------------------------------------------------------- comparative


def run_comparative(config: ExperimentConfig, out_dir=None, table=None) -> RunResult:
    result = run_models(config, label="compare", table=table)
    if out_dir is not None:
        write_run_outputs(result, Path(out_dir), "compare")
    return result


def _report_payload(result: RunResult, experiment: str) -> dict:
    models = {}
    for kind, run in result.runs.items():
        entry = {"status": "ok" if run.error is None else "failed"}
        if run.error is not None:
            entry["error"] = run.error
        entry.update(run.notes)
        models[kind] = entry
    ranking = sorted(result.reports, key=lambda k: -result.reports[k].r2)
    return {
        "experiment": experiment,
        "data_digest": result.data.digest,
        "n_train": result.data.train.n_samples,
        "n_test": result.data.test.n_samples,
        "reports": [r.to_dict() for r in result.reports.values()],
        "models": models,
        "ranking_by_r2": ranking,
        "published_reference": {
            "note": "published reference results; source data not public, values not recomputable",
            "table": PUBLISHED_COMPARISON,
        },
    }


def write_run_outputs(result: RunResult, out: Path, experiment: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    (out / "config.resolved").write_text(cfg.resolved(), encoding="utf-8")
    _write_json(out / "report.json", _report_payload(result, experiment))
    with (out / "report.csv").open("w", encoding="utf-8") as fh:
        fh.write(EvalReport.csv_header() + "\n")
        for r in result.reports.values():
            fh.write(r.to_csv_row() + "\n")
    write_trace(result, out / "trace.csv")
    for kind, run in result.runs.items():
        if run.logs:
            name = "epochs.csv" if kind == "lstm" or "lstm" not in result.runs else f"epochs_{kind}.csv"
            write_epoch_log(run.logs, out / name, wall_time=cfg.wall_time)


def write_trace(result: RunResult, path: Path) -> None:
    stamps = result.data.test.target_timestamps
    observed = result.data.raw_test_targets
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "timestamp", "observed", "predicted"])
        for kind, run in result.runs.items():
            if run.predictions is None:
                continue
            for t, o, p in zip(stamps, observed, run.predictions):
                w.writerow([kind, format_timestamp(t), repr(float(o)), repr(float(p))])


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------- ablation


@dataclass
class AblationResult:
    combos: dict              # combo label -> ModelRun
    n_features: dict          # combo label -> feature count

    def table(self, metric: str) -> dict:
        """Grid keyed by (flow | no_flow, none | rain | areal | rain+areal)."""
        grid = {}
        for label, run in self.combos.items():
            parts = parse_combo(label)
            row = "flow" if "flow" in parts else "no_flow"
            col = "+".join(p for p in parts if p != "flow") or "none"
            grid[(row, col)] = None if run.report is None else getattr(run.report, metric)
        return grid


def run_input_ablation(config: ExperimentConfig, combos=ABLATION_COMBOS, out_dir=None, table=None,
                       model: str = "lstm") -> AblationResult:
    """One model per input combination, everything else held fixed."""
    if not combos:
        raise ConfigError("no input combinations given")
    labels = ["+".join(parse_combo(c)) for c in combos]
    table = load_table(config) if table is None else table
    runs, widths = {}, {}
    for label in labels:
        cfg = config.replace(inputs=label)
        try:
            data = prepare_data(cfg, table)
            widths[label] = data.train.features.shape[1]
            runs[label] = run_models(cfg, [model], data=data, label=f"ablate/{label}").runs[model]
        except FlowcastError as exc:
            runs[label] = ModelRun(error=f"{type(exc).__name__}: {exc}")
    result = AblationResult(runs, widths)
    if out_dir is not None:
        _write_ablation(result, config, Path(out_dir))
    return result


def _write_ablation(result: AblationResult, config: ExperimentConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved").write_text(config.resolved(), encoding="utf-8")
    with (out / "ablation.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["inputs", "n_features", "rmse", "mae", "r2", "error"])
        for label, run in result.combos.items():
            r = run.report
            w.writerow([label, result.n_features.get(label, ""), "" if r is None else repr(r.rmse),
                        "" if r is None else repr(r.mae), "" if r is None else repr(r.r2), run.error or ""])
    payload = {
        "experiment": "ablate",
        "reports": [run.report.to_dict() for run in result.combos.values() if run.report],
        "errors": {k: run.error for k, run in result.combos.items() if run.error},
        "tables": {m: {f"{row}|{col}": v for (row, col), v in result.table(m).items()}
                   for m in ("rmse", "mae", "r2")},
        "published_reference": {
            "note": "published reference results; source data not public, values not recomputable",
            "table": {f"{row}|{col}": v for (row, col), v in PUBLISHED_INPUT_STUDY.items()},
        },
    }
    _write_json(out / "report.json", payload)


# ---------------------------------------------------------------- sweeps


@dataclass
class SweepResult:
    parameter: str
    points: list              # [(value, {model: EvalReport | str error})]

    def reports_for(self, model: str) -> list:
        return [(v, cell[model]) for v, cell in self.points if isinstance(cell.get(model), EvalReport)]

    def best(self, model: str, metric: str = "r2"):
        pts = self.reports_for(model)
        if not pts:
            return None
        pick = max if metric == "r2" else min
        return pick(pts, key=lambda vr: getattr(vr[1], metric))[0]


def _check_grid(values) -> tuple[int, ...]:
    values = int_grid(values)
    if not values:
        raise ConfigError("sweep grid is empty")
    if any(v < 1 for v in values):
        raise ConfigError(f"sweep values must be >= 1, got {values}")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"sweep values must be strictly increasing, got {values}")
    return values


def _sweep(config: ExperimentConfig, parameter: str, values, models, out_dir, table) -> SweepResult:
    values = _check_grid(values)
    models = tuple(models)
    table = load_table(config) if table is None else table
    base_seed = config.run_seed
    points = []
    for v in values:
        cfg = config.replace(**{parameter: v, "data_seed": config.synthetic_seed})
        try:
            res = run_models(cfg, models, seed=base_seed + v, label=f"{parameter}={v}", table=table)
            cell = {m: (r.report if r.report is not None else r.error) for m, r in res.runs.items()}
        except FlowcastError as exc:
            cell = {m: f"{type(exc).__name__}: {exc}" for m in models}
        points.append((v, cell))
    result = SweepResult(parameter, points)
    if out_dir is not None:
        write_sweep(result, config, Path(out_dir))
    return result


def run_predict_step_sweep(config: ExperimentConfig, steps=None, models=("lstm",), out_dir=None,
                           table=None) -> SweepResult:
    return _sweep(config, "predict_step", steps or config.predict_steps, models, out_dir, table)


def run_encoder_step_sweep(config: ExperimentConfig, steps=None, models=("lstm",), out_dir=None,
                           table=None) -> SweepResult:
    return _sweep(config, "encoder_steps", steps or config.encoder_grid, models, out_dir, table)


def write_sweep(result: SweepResult, config: ExperimentConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved").write_text(config.resolved(), encoding="utf-8")
    with (out / "sweep.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["param", "value", "model", "run_id", "n", "rmse", "mae", "r2", "error"])
        for v, cell in result.points:
            for m, r in cell.items():
                if isinstance(r, EvalReport):
                    w.writerow([result.parameter, v, m, r.run_id, r.n, repr(r.rmse), repr(r.mae), repr(r.r2), ""])
                else:
                    w.writerow([result.parameter, v, m, "", "", "", "", "", r])
    payload = {"experiment": f"sweep:{result.parameter}",
               "points": [{"value": v, "reports": {m: (r.to_dict() if isinstance(r, EvalReport) else {"error": r})
                                                   for m, r in cell.items()}}
                          for v, cell in result.points]}
    _write_json(out / "report.json", payload)


@dataclass
class EpochSweepResult:
    grid: tuple
    logs: list
    best_epoch: int

    def at_grid(self) -> list:
        return [self.logs[e - 1] for e in self.grid]


def run_epoch_sweep(config: ExperimentConfig, epoch_grid=None, model: str = "lstm", out_dir=None,
                    table=None) -> EpochSweepResult:
    """One training run to max(grid) epochs, logging train/test loss every epoch."""
    grid = _check_grid(epoch_grid or config.epoch_grid)
    cfg = config.replace(epochs=grid[-1])
    data = prepare_data(cfg, table)
    if model not in ("lstm", "rnn", "mlp"):
        raise ConfigError(f"epoch sweep needs a gradient-trained model, got {model!r}")
    m = build_model(model, cfg, data.train.n_variables, cfg.run_seed)
    _, logs = train(m, data.train, data.test, cfg.train_config(seed=cfg.run_seed))
    best = min(logs, key=lambda lg: lg.test_loss).epoch
    result = EpochSweepResult(grid, logs, best)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.resolved").write_text(cfg.resolved(), encoding="utf-8")
        write_epoch_log(logs, out / "epochs.csv", wall_time=cfg.wall_time)
        with (out / "sweep.csv").open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["param", "value", "train_loss", "test_loss"])
            for lg in result.at_grid():
                w.writerow(["epochs", lg.epoch, repr(lg.train_loss), repr(lg.test_loss)])
        _write_json(out / "report.json", {"experiment": "sweep:epochs", "grid": list(grid),
                                          "min_test_loss_epoch": best,
                                          "data_digest": data.digest})
    return result
