"""Mini-batch training of the neural forecasters."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, ShapeError, TrainingDivergence
from ..numcore import make_rng
from .optim import OPTIMIZERS, clip_by_global_norm, make_optimizer

LOSSES = ("mse", "mae")
# independent substream for minibatch shuffling; initialization uses stream 0
SHUFFLE_STREAM = 1


@dataclass(frozen=True)
class TrainConfig:
    optimizer: str = "adam"
    learning_rate: float = 0.001
    batch_size: int = 72
    epochs: int = 30
    loss: str = "mse"
    seed: int = 0
    clip_norm: float = 5.0
    shuffle_each_epoch: bool = True

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"unknown optimizer {self.optimizer!r}; choose from {OPTIMIZERS}")
        if self.loss not in LOSSES:
            raise ConfigError(f"unknown loss {self.loss!r}; choose from {LOSSES}")
        if self.batch_size < 1 or self.epochs < 1:
            raise ConfigError(f"batch_size and epochs must be >= 1, got {self.batch_size}, {self.epochs}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.clip_norm < 0:
            raise ConfigError(f"clip_norm must be >= 0, got {self.clip_norm}")


@dataclass(frozen=True)
class EpochLog:
    epoch: int
    train_loss: float
    test_loss: float
    wall_time: float


def loss_and_grad(kind: str, predictions, targets) -> tuple[float, np.ndarray]:
    """Mean loss over the batch and its gradient with respect to each prediction."""
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if p.shape != t.shape or p.ndim != 1 or p.size == 0:
        raise ShapeError(f"predictions {p.shape} and targets {t.shape} must be equal non-empty vectors")
    r = p - t
    m = r.size
    if kind == "mse":
        # overflow becomes inf, which the caller reports as divergence
        with np.errstate(over="ignore"):
            return float(np.mean(r * r)), 2.0 * r / m
    if kind == "mae":
        return float(np.mean(np.abs(r))), np.sign(r) / m
    raise ConfigError(f"unknown loss {kind!r}")


def evaluate_loss(model, features, targets, kind: str = "mse") -> float:
    """Loss of ``model`` on a dataset; never mutates parameters."""
    return loss_and_grad(kind, model.predict(features), targets)[0]


def _xy(data):
    if hasattr(data, "features"):
        return data.features, data.targets
    x, y = data
    return np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)


def train(model, train_set, test_set, config: TrainConfig, on_epoch=None):
    """Fit ``model`` in place; returns ``(model, logs)``.

    ``train_set``/``test_set`` are supervised matrices or ``(x, y)`` pairs;
    ``test_set`` may be None. Every epoch runs ceil(n / batch_size) updates,
    the last batch possibly short. ``on_epoch`` receives each :class:`EpochLog`.
    """
    x, y = _xy(train_set)
    n = x.shape[0]
    if n == 0:
        raise ConfigError("empty training set")
    xt, yt = _xy(test_set) if test_set is not None else (None, None)
    rng = make_rng(config.seed, SHUFFLE_STREAM)
    opt = make_optimizer(config.optimizer, config.learning_rate)
    params = model.parameters()
    logs: list[EpochLog] = []
    n_batches = math.ceil(n / config.batch_size)
    t0 = time.perf_counter()
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n) if config.shuffle_each_epoch else np.arange(n)
        total = 0.0
        for b in range(n_batches):
            idx = order[b * config.batch_size:(b + 1) * config.batch_size]
            pred, trace = model.forward(x[idx])
            loss, d_pred = loss_and_grad(config.loss, pred, y[idx])
            if not math.isfinite(loss):
                raise TrainingDivergence(f"non-finite training loss at epoch {epoch}, batch {b + 1}",
                                         epoch=epoch, batch=b + 1, last_good_epoch=epoch - 1)
            total += loss * len(idx)
            grads = model.backward(trace, d_pred)
            clip_by_global_norm(grads, config.clip_norm)
            try:
                opt.step(params, grads)
            except TrainingDivergence as exc:
                raise TrainingDivergence(f"{exc} at epoch {epoch}, batch {b + 1}", epoch=epoch,
                                         batch=b + 1, block=exc.block, last_good_epoch=epoch - 1) from None
        # sample-weighted mean of the batch losses seen during the epoch
        train_loss = total / n
        test_loss = evaluate_loss(model, xt, yt, config.loss) if xt is not None else float("nan")
        if not math.isfinite(train_loss):
            raise TrainingDivergence(f"training diverged in epoch {epoch}", epoch=epoch,
                                     last_good_epoch=epoch - 1)
        log = EpochLog(epoch, train_loss, test_loss, time.perf_counter() - t0)
        logs.append(log)
        if on_epoch is not None:
            on_epoch(log)
    return model, logs


def write_epoch_log(logs, path, wall_time: bool = False) -> None:
    """CSV ``epoch,train_loss,test_loss,seconds``.

    ``seconds`` is left blank unless ``wall_time`` is set, so repeated runs
    produce identical files.
    """
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "train_loss", "test_loss", "seconds"])
        for log in logs:
            w.writerow([log.epoch, repr(log.train_loss), repr(log.test_loss),
                        f"{log.wall_time:.3f}" if wall_time else ""])
