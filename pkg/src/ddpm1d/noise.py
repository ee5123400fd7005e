"""Noise family samplers with analytically known moments.

Families (all mean zero):

    gaussian   standard normal
    uniform    uniform on [-sqrt(3), sqrt(3)]  (variance exactly 1)
    arcsine    Beta(1/2, 1/2) standardized to variance 1, support [-sqrt(2), sqrt(2)]
    mixture    Bernoulli(mix_prob) choice between N(0, 1) and N(0, big_variance)

The arcsine family is the bimodal test distribution: among Beta laws (whose
parameters must be positive) it is the one whose density peaks at the two
support endpoints, and standardizing Beta(1/2, 1/2) (mean 1/2, variance 1/8)
gives unit variance on [-sqrt(2), sqrt(2)].

Uniform draws consumed per scalar ``sample()`` call are fixed per family so
sequences survive refactors:

    uniform / arcsine: 1
    gaussian:          2 per Box-Muller pair (second variate cached)
    mixture:           1 selector, then one gaussian from the shared pair cache

``sample_block`` is the vectorized path used by training, evaluation and
``moment_report``. For gaussian / uniform / arcsine it is bit-identical to
repeated ``sample()`` calls. For the mixture the block layout differs: all
``n`` selector uniforms are drawn first, then ``n`` gaussians. Experiments
always sample through the block path, so results are reproducible either way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .prng import RngStream

FAMILIES = ("gaussian", "uniform", "arcsine", "mixture")

_SQRT3 = float(np.sqrt(3.0))
_SQRT8 = float(np.sqrt(8.0))  # 1 / sqrt(1/8): arcsine standardization factor
_HALF_PI = float(np.pi / 2.0)


@dataclass(frozen=True)
class NoiseSpec:
    """Declarative description of one noise distribution.

    ``mix_prob`` and ``big_variance`` only matter for the mixture family;
    ``normalize_to_unit`` rescales the mixture to unit variance (the three
    other families have unit variance by construction).
    """

    family: str = "gaussian"
    mix_prob: float = 0.9
    big_variance: float = 100.0
    normalize_to_unit: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(
                f"unknown noise family {self.family!r}; expected one of {FAMILIES}"
            )
        if not 0.0 <= self.mix_prob <= 1.0:
            raise ConfigError(f"mix_prob must be in [0, 1], got {self.mix_prob}")
        if self.big_variance <= 0.0:
            raise ConfigError(f"big_variance must be > 0, got {self.big_variance}")

    def label(self) -> str:
        if self.family == "mixture":
            return f"mix{self.mix_prob:g}"
        return self.family

    def to_dict(self) -> dict:
        d: dict = {"family": self.family}
        if self.family == "mixture":
            d["mix_prob"] = self.mix_prob
            d["big_variance"] = self.big_variance
            d["normalize"] = self.normalize_to_unit
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseSpec":
        allowed = {"family", "mix_prob", "big_variance", "normalize"}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"unknown noise config key(s): {sorted(unknown)}")
        if "family" not in d:
            raise ConfigError("noise config requires a 'family' key")
        kwargs: dict = {"family": d["family"]}
        if "mix_prob" in d:
            kwargs["mix_prob"] = float(d["mix_prob"])
        if "big_variance" in d:
            kwargs["big_variance"] = float(d["big_variance"])
        if "normalize" in d:
            kwargs["normalize_to_unit"] = bool(d["normalize"])
        return cls(**kwargs)


def _mixture_raw_variance(spec: NoiseSpec) -> float:
    return spec.mix_prob + (1.0 - spec.mix_prob) * spec.big_variance


def analytic_variance(spec: NoiseSpec) -> float:
    """Exact variance of the distribution described by ``spec``."""
    if spec.family != "mixture" or spec.normalize_to_unit:
        return 1.0
    return _mixture_raw_variance(spec)


def sample(spec: NoiseSpec, g: RngStream) -> float:
    """One draw from ``spec``, consuming the per-family draw count documented above."""
    if spec.family == "gaussian":
        return g.next_gaussian()
    if spec.family == "uniform":
        return float((2.0 * g.next_uniform01() - 1.0) * _SQRT3)
    if spec.family == "arcsine":
        b = np.sin(_HALF_PI * g.next_uniform01()) ** 2
        return float((b - 0.5) * _SQRT8)
    # mixture: selector first, then one gaussian from the shared pair cache
    narrow = g.next_uniform01() < spec.mix_prob
    z = g.next_gaussian()
    if not narrow:
        z = float(z * np.sqrt(spec.big_variance))
    if spec.normalize_to_unit:
        z = float(z / np.sqrt(_mixture_raw_variance(spec)))
    return z


def sample_block(spec: NoiseSpec, n: int, g: RngStream) -> np.ndarray:
    """``n`` draws from ``spec`` in the documented block layout."""
    if spec.family == "gaussian":
        return g.gaussians(n)
    if spec.family == "uniform":
        return (2.0 * g.uniforms(n) - 1.0) * _SQRT3
    if spec.family == "arcsine":
        b = np.sin(_HALF_PI * g.uniforms(n)) ** 2
        return (b - 0.5) * _SQRT8
    narrow = g.uniforms(n) < spec.mix_prob
    z = g.gaussians(n)
    z = np.where(narrow, z, z * np.sqrt(spec.big_variance))
    if spec.normalize_to_unit:
        z = z / np.sqrt(_mixture_raw_variance(spec))
    return z


@dataclass(frozen=True)
class MomentReport:
    """Sample moments; ``kurtosis`` is the excess kurtosis (normal = 0)."""

    mean: float
    variance: float
    skewness: float
    kurtosis: float


def moment_report(spec: NoiseSpec, n: int, g: RngStream) -> MomentReport:
    """Sample moments over ``n`` block draws."""
    if n < 2:
        raise ValueError(f"moment_report needs n >= 2, got {n}")
    x = sample_block(spec, n, g)
    mean = float(x.mean())
    d = x - mean
    m2 = float((d * d).mean())
    if m2 == 0.0:
        return MomentReport(mean, 0.0, 0.0, 0.0)
    m3 = float((d * d * d).mean())
    m4 = float((d * d * d * d).mean())
    return MomentReport(mean, m2, m3 / m2**1.5, m4 / (m2 * m2) - 3.0)
