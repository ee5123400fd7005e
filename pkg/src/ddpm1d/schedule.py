"""Linear beta schedule and the derived alpha / alpha-bar sequences.

Arrays are stored 0-based: ``beta[i]`` is the rate at diffusion step
``t = i + 1``, so ``beta[0]`` is the first-step rate. All arithmetic is
64-bit; the 500-term cumulative product is not trustworthy in float32.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Schedule:
    T: int
    beta: np.ndarray
    alpha: np.ndarray
    alpha_bar: np.ndarray

    def _check_t(self, t: int) -> None:
        if not 1 <= t <= self.T:
            raise IndexError(f"step t={t} outside 1..{self.T}")

    def beta_at(self, t: int) -> float:
        self._check_t(t)
        return float(self.beta[t - 1])

    def alpha_at(self, t: int) -> float:
        self._check_t(t)
        return float(self.alpha[t - 1])

    def alpha_bar_at(self, t: int) -> float:
        """Cumulative product at 1-based step t; alpha_bar_at(0) = 1 by convention."""
        if t == 0:
            return 1.0
        self._check_t(t)
        return float(self.alpha_bar[t - 1])


def build_linear(beta1: float, betaT: float, T: int) -> Schedule:
    """Linear schedule from beta1 to betaT over T steps (endpoints exact)."""
    if T < 1:
        raise ConfigError(f"steps must be >= 1, got {T}")
    if not (0.0 < beta1 <= betaT < 1.0):
        raise ConfigError(
            f"need 0 < beta_start <= beta_end < 1, got ({beta1}, {betaT})"
        )
    beta = np.linspace(beta1, betaT, T)
    alpha = 1.0 - beta
    alpha_bar = np.cumprod(alpha)
    return Schedule(T=T, beta=beta, alpha=alpha, alpha_bar=alpha_bar)


def retention(s: Schedule, t: int) -> float:
    """sqrt(alpha_bar[t]): the fraction of the signal surviving t forward steps."""
    s._check_t(t)
    return float(np.sqrt(s.alpha_bar[t - 1]))
