"""NARX multilayer perceptron and LSTM networks with a shared Adam trainer."""

from .lstm import CellState, LstmConfig, lstm_cell
from .mlp import MlpConfig, mlp_forward
from .training import NetParams, TrainingError, gradient_check, train, train_arrays
from .windows import SupervisedWindow, window_dataset

__all__ = [
    "CellState", "LstmConfig", "MlpConfig", "NetParams", "SupervisedWindow", "TrainingError",
    "gradient_check", "lstm_cell", "mlp_forward", "train", "train_arrays", "window_dataset",
]
