"""Hand-rolled noise-prediction network: 2 inputs, 32 hidden units, 1 output.

Exact analytic gradients and the optimizers are written out by hand; there is
no autodiff anywhere. Parameters live in one flat float64 vector whose layout
is [W1 rows, b1, W2, b2] - the same order used by the weight-dump format -
with W1/b1/W2 exposed as views into it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .prng import RngStream

N_IN = 2
HIDDEN = 32
N_PARAMS = HIDDEN * N_IN + HIDDEN + HIDDEN + 1  # 129

_W1 = slice(0, HIDDEN * N_IN)
_B1 = slice(HIDDEN * N_IN, HIDDEN * N_IN + HIDDEN)
_W2 = slice(HIDDEN * N_IN + HIDDEN, HIDDEN * N_IN + 2 * HIDDEN)
_B2 = N_PARAMS - 1

# draws consumed by init_params; the evaluation stream skips exactly this many
INIT_DRAWS = HIDDEN * N_IN + HIDDEN  # 96

ACTIVATIONS = ("relu", "tanh")


@dataclass
class MlpParams:
    theta: np.ndarray  # flat (129,) float64

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        if self.theta.shape != (N_PARAMS,):
            raise ValueError(f"theta must have shape ({N_PARAMS},), got {self.theta.shape}")

    @property
    def W1(self) -> np.ndarray:
        return self.theta[_W1].reshape(HIDDEN, N_IN)

    @property
    def b1(self) -> np.ndarray:
        return self.theta[_B1]

    @property
    def W2(self) -> np.ndarray:
        return self.theta[_W2]

    @property
    def b2(self) -> float:
        return float(self.theta[_B2])

    @classmethod
    def zeros(cls) -> "MlpParams":
        return cls(np.zeros(N_PARAMS))

    @classmethod
    def from_parts(cls, W1, b1, W2, b2) -> "MlpParams":
        theta = np.empty(N_PARAMS)
        theta[_W1] = np.asarray(W1, dtype=np.float64).reshape(HIDDEN * N_IN)
        theta[_B1] = np.asarray(b1, dtype=np.float64).reshape(HIDDEN)
        theta[_W2] = np.asarray(W2, dtype=np.float64).reshape(HIDDEN)
        theta[_B2] = float(b2)
        return cls(theta)

    def copy(self) -> "MlpParams":
        return MlpParams(self.theta.copy())


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step_count: int = 0
    beta1_opt: float = 0.9
    beta2_opt: float = 0.999
    epsilon_opt: float = 1e-8

    @classmethod
    def zeros(cls) -> "AdamState":
        return cls(np.zeros(N_PARAMS), np.zeros(N_PARAMS))


@dataclass
class TrainBatch:
    inputs: np.ndarray  # (n, 2), columns [x_t, t_norm]
    targets: np.ndarray  # (n,)

    def __post_init__(self):
        self.inputs = np.atleast_2d(np.asarray(self.inputs, dtype=np.float64))
        self.targets = np.asarray(self.targets, dtype=np.float64).ravel()
        if self.inputs.shape != (len(self.targets), N_IN) or len(self.targets) == 0:
            raise ValueError("batch needs matching, nonempty inputs (n, 2) and targets (n,)")
        if not (np.isfinite(self.inputs).all() and np.isfinite(self.targets).all()):
            raise ValueError("batch contains non-finite values")


def init_params(g: RngStream) -> MlpParams:
    """Glorot-uniform weights, zero biases.

    Draw order is fixed: 64 uniforms for W1 (row-major), then 32 for W2,
    INIT_DRAWS in total. Weights are uniform on +-sqrt(6 / (fan_in + fan_out)).
    """
    lim1 = np.sqrt(6.0 / (N_IN + HIDDEN))
    lim2 = np.sqrt(6.0 / (HIDDEN + 1))
    theta = np.zeros(N_PARAMS)
    theta[_W1] = (2.0 * g.uniforms(HIDDEN * N_IN) - 1.0) * lim1
    theta[_W2] = (2.0 * g.uniforms(HIDDEN) - 1.0) * lim2
    return MlpParams(theta)


def _act(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "tanh":
        return np.tanh(z)
    raise ConfigError(f"unknown activation {kind!r}; expected one of {ACTIVATIONS}")


def _act_grad(z: np.ndarray, h: np.ndarray, kind: str) -> np.ndarray:
    # relu subgradient at 0 is defined as 0
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    return 1.0 - h * h


def forward(p: MlpParams, x_t: float, t_norm: float, activation: str = "relu") -> float:
    """Predicted noise for one (x_t, t_norm) input."""
    if not (np.isfinite(x_t) and np.isfinite(t_norm)):
        raise ValueError(f"non-finite network input ({x_t}, {t_norm})")
    x = np.array([x_t, t_norm])
    h = _act(p.W1 @ x + p.b1, activation)
    return float(p.W2 @ h + p.theta[_B2])


def forward_batch(p: MlpParams, X: np.ndarray, activation: str = "relu") -> np.ndarray:
    """Predicted noise for a (n, 2) input block."""
    h = _act(X @ p.W1.T + p.b1, activation)
    return h @ p.W2 + p.theta[_B2]


def loss_and_grad_arrays(
    p: MlpParams, X: np.ndarray, y: np.ndarray, activation: str = "relu"
) -> tuple[float, np.ndarray]:
    """Mean squared error and its exact gradient in flat parameter layout."""
    n = len(y)
    z1 = X @ p.W1.T + p.b1
    h = _act(z1, activation)
    err = h @ p.W2 + p.theta[_B2] - y
    loss = float(err @ err) / n
    dout = (2.0 / n) * err
    grad = np.empty(N_PARAMS)
    grad[_W2] = dout @ h
    grad[_B2] = dout.sum()
    dz1 = np.outer(dout, p.W2) * _act_grad(z1, h, activation)
    grad[_W1] = (dz1.T @ X).reshape(HIDDEN * N_IN)
    grad[_B1] = dz1.sum(axis=0)
    return loss, grad


def loss_and_grad(
    p: MlpParams, batch: TrainBatch, activation: str = "relu"
) -> tuple[float, np.ndarray]:
    return loss_and_grad_arrays(p, batch.inputs, batch.targets, activation)


def _loss_only(p: MlpParams, X: np.ndarray, y: np.ndarray, activation: str) -> float:
    h = _act(X @ p.W1.T + p.b1, activation)
    err = h @ p.W2 + p.theta[_B2] - y
    return float(err @ err) / len(y)


def adam_step(
    p: MlpParams, s: AdamState, grads: np.ndarray, lr: float
) -> tuple[MlpParams, AdamState]:
    """One bias-corrected Adam update; pure (returns fresh params and state)."""
    if lr <= 0.0:
        raise ValueError(f"learning rate must be > 0, got {lr}")
    t = s.step_count + 1
    m = s.beta1_opt * s.m + (1.0 - s.beta1_opt) * grads
    v = s.beta2_opt * s.v + (1.0 - s.beta2_opt) * (grads * grads)
    m_hat = m / (1.0 - s.beta1_opt**t)
    v_hat = v / (1.0 - s.beta2_opt**t)
    theta = p.theta - lr * m_hat / (np.sqrt(v_hat) + s.epsilon_opt)
    return MlpParams(theta), AdamState(m, v, t, s.beta1_opt, s.beta2_opt, s.epsilon_opt)


def sgd_step(p: MlpParams, grads: np.ndarray, lr: float) -> MlpParams:
    if lr <= 0.0:
        raise ValueError(f"learning rate must be > 0, got {lr}")
    return MlpParams(p.theta - lr * grads)


def finite_diff_check(
    p: MlpParams, batch: TrainBatch, h: float = 1e-6, activation: str = "relu"
) -> float:
    """Worst relative error of the analytic gradient vs central differences.

    Denominators are floored at 1e-8 so zero-gradient components compare cleanly.
    """
    if h <= 0.0:
        raise ValueError(f"step size must be > 0, got {h}")
    _, grad = loss_and_grad(p, batch, activation)
    q = p.copy()
    X, y = batch.inputs, batch.targets
    worst = 0.0
    for i in range(N_PARAMS):
        orig = q.theta[i]
        q.theta[i] = orig + h
        lp = _loss_only(q, X, y, activation)
        q.theta[i] = orig - h
        lm = _loss_only(q, X, y, activation)
        q.theta[i] = orig
        num = (lp - lm) / (2.0 * h)
        denom = max(abs(grad[i]), abs(num), 1e-8)
        worst = max(worst, abs(grad[i] - num) / denom)
    return worst
