from __future__ import annotations

import numpy as np

from .config import RunConfig
from .state import TrainState


def learning_rate(cfg: RunConfig, step: int) -> float:
    """Constant rate times lr_decay once per completed decay period."""
    return cfg.learning_rate * cfg.lr_decay ** (step // cfg.decay_period)


def adam_step(state: TrainState, cfg: RunConfig, lr: float) -> None:
    """
    One adaptive-moment update of every parameter, in place.

    Uses the gradients accumulated on the tensors and the bias-corrected
    moments for step t = state.step + 1. A non-zero `weight_decay` shrinks
    the parameter directly (decoupled form) before the moment update.
    """
    t = state.step + 1
    b1, b2 = cfg.beta1, cfg.beta2
    for name, param in state.named_parameters():
        g = param.grad
        m = state.moments.first[name]
        v = state.moments.second[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        if cfg.weight_decay:
            param.values -= lr * cfg.weight_decay * param.values
        param.values -= lr * m_hat / (np.sqrt(v_hat) + cfg.epsilon)
