"""Forecasting models: RNN, LSTM, MLP and epsilon-SVR."""

from .lstm import (GateTrace, LstmParams, LstmRegressor, LstmState, SequenceTrace, lstm_backward,
                   lstm_cell_forward, lstm_predict, lstm_sequence_forward)
from .mlp import MlpParams, MlpRegressor, mlp_backward, mlp_forward
from .persist import load_model, save_model
from .rnn import RnnParams, RnnRegressor, rnn_backward, rnn_cell_forward, rnn_sequence_forward
from .svr import (SvrModel, SvrRegressor, rbf_kernel, rbf_matrix, svr_fit, svr_kkt_violation,
                  svr_predict)

__all__ = [
    "GateTrace", "LstmParams", "LstmRegressor", "LstmState", "SequenceTrace", "lstm_backward",
    "lstm_cell_forward", "lstm_predict", "lstm_sequence_forward",
    "MlpParams", "MlpRegressor", "mlp_backward", "mlp_forward",
    "load_model", "save_model",
    "RnnParams", "RnnRegressor", "rnn_backward", "rnn_cell_forward", "rnn_sequence_forward",
    "SvrModel", "SvrRegressor", "rbf_kernel", "rbf_matrix", "svr_fit", "svr_kkt_violation",
    "svr_predict",
]
