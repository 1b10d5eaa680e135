"""Experiment configuration, runners and the command-line interface."""

from .config import (ABLATION_COMBOS, MODEL_KINDS, ExperimentConfig, config_from_mapping, int_grid,
                     load_config, parse_combo, read_config_file)
from .runner import (AblationResult, EpochSweepResult, ModelRun, PreparedData, RunResult, SweepResult,
                     build_model, fit_model, prepare_data, run_comparative, run_encoder_step_sweep,
                     run_epoch_sweep, run_input_ablation, run_models, run_predict_step_sweep)

__all__ = [
    "ABLATION_COMBOS", "MODEL_KINDS", "ExperimentConfig", "config_from_mapping", "int_grid",
    "load_config", "parse_combo", "read_config_file",
    "AblationResult", "EpochSweepResult", "ModelRun", "PreparedData", "RunResult", "SweepResult",
    "build_model", "fit_model", "prepare_data", "run_comparative", "run_encoder_step_sweep",
    "run_epoch_sweep", "run_input_ablation", "run_models", "run_predict_step_sweep",
]
