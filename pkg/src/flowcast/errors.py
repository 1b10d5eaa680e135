"""Exception hierarchy shared by every flowcast module."""


class FlowcastError(Exception):
    """Base class for all package errors."""


class ShapeError(FlowcastError, ValueError):
    """Operands with incompatible dimensions."""


class ConfigError(FlowcastError, ValueError):
    """Invalid configuration or hyperparameter."""


class DataError(FlowcastError, ValueError):
    """Input data that violates the table schema or value constraints."""


class EmptyWindowError(DataError):
    """No segment is long enough to produce a single supervised row."""

    def __init__(self, message, segment_lengths=()):
        super().__init__(message)
        self.segment_lengths = tuple(segment_lengths)


class UndefinedMetricError(FlowcastError, ValueError):
    """A metric whose denominator vanishes (e.g. R2 on a constant series)."""


class ConvergenceError(FlowcastError, RuntimeError):
    """An iterative solver ran out of iterations."""

    def __init__(self, message, worst_violation=float("nan")):
        super().__init__(message)
        self.worst_violation = worst_violation


class TrainingDivergence(FlowcastError, RuntimeError):
    """Non-finite loss or gradient during training."""

    def __init__(self, message, epoch=None, batch=None, block=None, last_good_epoch=None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch
        self.block = block
        self.last_good_epoch = last_good_epoch
