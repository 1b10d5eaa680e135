"""Experiment configuration and its flat ``key = value`` file format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from ..dataset.windowing import VARIABLE_GROUPS
from ..errors import ConfigError
from ..metrics import R2_CONVENTIONS
from ..training import TrainConfig

MODEL_KINDS = ("svr", "mlp", "lstm", "rnn")

# Every valid input study cell; a selection with neither flow nor rainfall is invalid.
ABLATION_COMBOS = ("flow", "flow+rain", "flow+areal", "flow+rain+areal", "rain", "areal", "rain+areal")


def parse_combo(text: str) -> tuple[str, ...]:
    """``"flow+rain"`` -> ``("flow", "rain")``, validated and in canonical order."""
    parts = [p.strip() for p in text.replace(",", "+").split("+") if p.strip()]
    bad = [p for p in parts if p not in VARIABLE_GROUPS]
    if bad:
        raise ConfigError(f"unknown input group(s) {bad}; choose from {VARIABLE_GROUPS}")
    if not parts:
        raise ConfigError("input combination selects no flow and no rainfall data")
    return tuple(g for g in VARIABLE_GROUPS if g in parts)


def _int_list(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)


@dataclass(frozen=True)
class ExperimentConfig:
    data: str = "synthetic"               # CSV path or "synthetic"
    synthetic_hours: int = 8000
    data_seed: int | None = None          # synthetic generator seed; defaults to seed
    seed: int | None = None
    encoder_steps: int = 12
    predict_step: int = 6
    inputs: str = "flow+rain"
    models: str = "svr,mlp,lstm"
    hidden_size: int = 64
    mlp_hidden_size: int = 64
    mlp_activation: str = "tanh"
    optimizer: str = "adam"
    learning_rate: float = 0.001
    batch_size: int = 72
    epochs: int = 30
    loss: str = "mse"
    clip_norm: float = 5.0
    shuffle_each_epoch: bool = True
    train_fraction: float | None = 0.7
    train_count: int | None = None
    scale_fit: str = "train"
    r2_convention: str = "observed_mean"
    svr_c: float = 0.095
    svr_gamma: float = 0.165
    svr_epsilon: float = 0.01
    svr_tol: float = 1e-3
    svr_cap: int = 4000
    predict_steps: str = "1,3,6,9,12"
    encoder_grid: str = "2,4,8,12,16,20"
    epoch_grid: str = "1,10,20,30,40,50,60,70,80,90,100"
    output_dir: str = "runs/latest"
    wall_time: bool = False

    def __post_init__(self):
        self.combo  # validates
        for m in self.model_list:
            if m not in MODEL_KINDS:
                raise ConfigError(f"unknown model {m!r}; choose from {MODEL_KINDS}")
        if self.encoder_steps < 1 or self.predict_step < 1:
            raise ConfigError("encoder_steps and predict_step must be >= 1")
        if self.scale_fit not in ("train", "all"):
            raise ConfigError(f"scale_fit must be 'train' or 'all', got {self.scale_fit!r}")
        if self.r2_convention not in R2_CONVENTIONS:
            raise ConfigError(f"r2_convention must be one of {R2_CONVENTIONS}")
        if self.train_count is not None and self.train_fraction is not None:
            object.__setattr__(self, "train_fraction", None)
        if self.train_count is None and self.train_fraction is None:
            raise ConfigError("one of train_fraction or train_count is required")
        if self.synthetic_hours < 100:
            raise ConfigError("synthetic_hours must be >= 100")
        if self.svr_cap < 2:
            raise ConfigError("svr_cap must be >= 2")
        self.train_config()

    @property
    def combo(self) -> tuple[str, ...]:
        return parse_combo(self.inputs)

    @property
    def model_list(self) -> tuple[str, ...]:
        return tuple(m.strip() for m in self.models.split(",") if m.strip())

    @property
    def run_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("a seed is required (set 'seed' or pass --seed)")
        return self.seed

    @property
    def synthetic_seed(self) -> int:
        return self.data_seed if self.data_seed is not None else self.run_seed

    def train_config(self, seed: int | None = None, epochs: int | None = None) -> TrainConfig:
        return TrainConfig(optimizer=self.optimizer, learning_rate=self.learning_rate,
                           batch_size=self.batch_size, epochs=epochs or self.epochs, loss=self.loss,
                           seed=(seed if seed is not None else (self.seed or 0)),
                           clip_norm=self.clip_norm, shuffle_each_epoch=self.shuffle_each_epoch)

    def replace(self, **changes) -> "ExperimentConfig":
        if "train_count" in changes and changes["train_count"] is not None:
            changes.setdefault("train_fraction", None)
        return dataclasses.replace(self, **changes)

    def resolved(self) -> str:
        """Every effective setting, one ``key = value`` per line."""
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name} = {'' if v is None else _render(v)}")
        return "\n".join(lines) + "\n"


def _render(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _coerce(name: str, raw: str, ftype):
    raw = raw.strip()
    optional = "None" in str(ftype)
    if raw == "" or raw.lower() == "none":
        if optional:
            return None
        raise ConfigError(f"{name} may not be empty")
    kind = str(ftype)
    try:
        if "bool" in kind:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if "int" in kind:
            return int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r} as {kind}") from None
    return raw


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def config_from_mapping(values: dict, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Build a config from string values (file entries or CLI overrides)."""
    unknown = sorted(set(values) - set(FIELD_TYPES))
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {', '.join(unknown)}")
    typed = {k: (v if not isinstance(v, str) else _coerce(k, v, FIELD_TYPES[k])) for k, v in values.items()}
    if typed.get("train_count") is not None and "train_fraction" not in typed:
        typed["train_fraction"] = None
    try:
        return dataclasses.replace(base, **typed) if base else ExperimentConfig(**typed)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def read_config_file(path) -> dict[str, str]:
    entries = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return entries


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    values = read_config_file(path) if path else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return config_from_mapping(values)


def int_grid(text) -> tuple[int, ...]:
    try:
        return _int_list(text)
    except ValueError:
        raise ConfigError(f"cannot parse integer list {text!r}") from None
