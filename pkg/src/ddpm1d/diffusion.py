"""Forward corruption, the DDPM ancestral reverse sampler, and the exact
noise-prediction oracle that exists because the data distribution is a point
mass.

A predictor is any callable ``pred(x_t, t) -> eps_hat`` where ``x_t`` may be
a float or an ndarray of chain states and ``t`` is the 1-based step. The
oracle predictor inverts the forward map exactly; ``mlp_predictor`` wraps
trained weights with the normalized-time input convention t_norm = t / T.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import noise as noise_mod
from .errors import ConfigError, DivergenceError
from .mlp import MlpParams, forward, forward_batch
from .noise import NoiseSpec
from .prng import RngStream
from .schedule import Schedule

Predictor = Callable[..., object]

SIGMA_MODES = ("beta", "beta_tilde")

# any |x_t| beyond this flags the chain as diverged
DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class SamplerOptions:
    """Where the reverse chain gets its randomness and its step variance."""

    reverse_noise: NoiseSpec
    init_noise: NoiseSpec
    sigma_mode: str = "beta"
    final_step_noiseless: bool = True

    def __post_init__(self):
        if self.sigma_mode not in SIGMA_MODES:
            raise ConfigError(
                f"unknown sigma_mode {self.sigma_mode!r}; expected one of {SIGMA_MODES}"
            )


def gaussian_options(
    sigma_mode: str = "beta", final_step_noiseless: bool = True
) -> SamplerOptions:
    g = NoiseSpec("gaussian")
    return SamplerOptions(g, g, sigma_mode, final_step_noiseless)


def q_sample(x0: float, t: int, s: Schedule, eps: float) -> float:
    """Forward corruption: sqrt(ab_t) * x0 + sqrt(1 - ab_t) * eps."""
    s._check_t(t)
    ab = s.alpha_bar[t - 1]
    return float(np.sqrt(ab) * x0 + np.sqrt(1.0 - ab) * eps)


def q_sample_block(x0: float, ts: np.ndarray, s: Schedule, eps: np.ndarray) -> np.ndarray:
    """Vectorized forward corruption; ``ts`` holds 1-based steps."""
    ab = s.alpha_bar[ts - 1]
    return np.sqrt(ab) * x0 + np.sqrt(1.0 - ab) * eps


def oracle_predictor(x0: float, s: Schedule) -> Predictor:
    """Exact inverse of the forward map for point-mass data at x0.

    eps(x_t, t) = (x_t - sqrt(ab_t) * x0) / sqrt(1 - ab_t); exact because every
    clean sample equals x0.
    """
    sqrt_ab = np.sqrt(s.alpha_bar)
    sqrt_1mab = np.sqrt(1.0 - s.alpha_bar)

    def predict(x_t, t: int):
        return (x_t - sqrt_ab[t - 1] * x0) / sqrt_1mab[t - 1]

    return predict


def mlp_predictor(params: MlpParams, T: int, activation: str = "relu") -> Predictor:
    """Wrap trained weights as a predictor with t_norm = t / T."""

    def predict(x_t, t: int):
        if np.ndim(x_t) == 0:
            return forward(params, float(x_t), t / T, activation)
        X = np.column_stack([x_t, np.full(len(x_t), t / T)])
        return forward_batch(params, X, activation)

    return predict


def sigma_sq(s: Schedule, t: int, mode: str) -> float:
    """Reverse-step noise variance: beta_t, or the posterior beta-tilde_t."""
    if mode == "beta":
        return s.beta_at(t)
    if mode == "beta_tilde":
        return s.beta_at(t) * (1.0 - s.alpha_bar_at(t - 1)) / (1.0 - s.alpha_bar_at(t))
    raise ConfigError(f"unknown sigma_mode {mode!r}; expected one of {SIGMA_MODES}")


def reverse_mean(pred: Predictor, x_t, t: int, s: Schedule):
    """Deterministic part of the ancestral step; broadcasts over array x_t."""
    eps_hat = pred(x_t, t)
    coef = s.beta_at(t) / np.sqrt(1.0 - s.alpha_bar_at(t))
    return (x_t - coef * eps_hat) / np.sqrt(s.alpha_at(t))


def reverse_step(
    pred: Predictor, x_t: float, t: int, s: Schedule, opts: SamplerOptions, g: RngStream
) -> float:
    """One ancestral step t -> t-1. At t = 1 with final_step_noiseless no draw
    is consumed."""
    mean = reverse_mean(pred, x_t, t, s)
    if t == 1 and opts.final_step_noiseless:
        x = float(mean)
    else:
        z = noise_mod.sample(opts.reverse_noise, g)
        x = float(mean + np.sqrt(sigma_sq(s, t, opts.sigma_mode)) * z)
    if not np.isfinite(x):
        raise DivergenceError(f"non-finite state leaving step t={t}", step=t)
    return x


def generate(pred: Predictor, s: Schedule, opts: SamplerOptions, g: RngStream) -> float:
    """Draw x_T from init_noise and run the full reverse chain down to x0-hat."""
    x = noise_mod.sample(opts.init_noise, g)
    for t in range(s.T, 0, -1):
        x = reverse_step(pred, x, t, s, opts, g)
        if abs(x) > DIVERGENCE_LIMIT:
            raise DivergenceError(
                f"|x| exceeded {DIVERGENCE_LIMIT:g} leaving step t={t}", step=t
            )
    return x


def generate_block(
    pred: Predictor, n: int, s: Schedule, opts: SamplerOptions, g: RngStream
) -> tuple[np.ndarray, np.ndarray]:
    """``n`` reverse chains advanced in lockstep.

    Per step the chains share one block of reverse-noise draws (init block
    first, then one block per noisy step). Chains that go non-finite or beyond
    DIVERGENCE_LIMIT at any step are flagged in the returned mask and carried
    along without affecting the others.

    Returns ``(x0_hats, diverged_mask)``.
    """
    x = noise_mod.sample_block(opts.init_noise, n, g)
    alive = np.isfinite(x) & (np.abs(x) <= DIVERGENCE_LIMIT)
    with np.errstate(all="ignore"):
        for t in range(s.T, 0, -1):
            mean = reverse_mean(pred, x, t, s)
            if t == 1 and opts.final_step_noiseless:
                x = mean
            else:
                z = noise_mod.sample_block(opts.reverse_noise, n, g)
                x = mean + np.sqrt(sigma_sq(s, t, opts.sigma_mode)) * z
            alive &= np.isfinite(x) & (np.abs(x) <= DIVERGENCE_LIMIT)
    return x, ~alive


def noiseless_reverse_chain(pred: Predictor, x_start: float, s: Schedule) -> float:
    """Deterministic reverse chain (sigma forced to 0) from a given terminal state.

    With the oracle predictor this contracts to the target from any start; it
    validates the sampler independently of any training.
    """
    x = float(x_start)
    for t in range(s.T, 0, -1):
        x = float(reverse_mean(pred, x, t, s))
        if not np.isfinite(x):
            raise DivergenceError(f"non-finite state leaving step t={t}", step=t)
    return x
