"""Losses, optimizers, the mini-batch loop and gradient checking."""

from .gradcheck import GradCheckReport, gradient_check, relative_error
from .loop import EpochLog, TrainConfig, evaluate_loss, loss_and_grad, train, write_epoch_log
from .optim import (OPTIMIZERS, Adagrad, Adam, Momentum, Optimizer, RMSProp, clip_by_global_norm,
                    make_optimizer)

__all__ = [
    "GradCheckReport", "gradient_check", "relative_error",
    "EpochLog", "TrainConfig", "evaluate_loss", "loss_and_grad", "train", "write_epoch_log",
    "OPTIMIZERS", "Adagrad", "Adam", "Momentum", "Optimizer", "RMSProp", "clip_by_global_norm",
    "make_optimizer",
]
