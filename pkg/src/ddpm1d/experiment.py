"""Trial orchestration: train a denoiser per trial, generate, aggregate errors.

Per-trial randomness (see prng module): trial ``i`` draws weight init from
stream ``2i``, training noise from stream ``2i + 1``, and evaluation noise
from stream ``2i`` after skipping the INIT_DRAWS uniforms the init consumed.
Every trial is therefore a pure function of (config, trial index), which makes
results independent of worker count and scheduling order.

Per epoch the training stream is consumed in a fixed layout: first
``samples_per_epoch`` uniforms for the timesteps, then one noise block of the
same length. Batches are consecutive slices of that block; the short remainder
batch (samples_per_epoch mod batch_size) is trained on, not dropped.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import diffusion, mlp
from . import noise as noise_mod
from .diffusion import SamplerOptions
from .errors import ConfigError, DivergenceError
from .noise import NoiseSpec
from .prng import RngStream, seed_stream
from .schedule import Schedule, build_linear

ERROR_METRICS = ("mean_abs", "abs_mean")
OPTIMIZERS = ("adam", "sgd")
REVERSE_NOISE_POLICIES = ("same", "gaussian")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment; defaults are the reference setup
    (target 7, linear schedule 1e-4..0.02 over 500 steps, 3000 epochs of 1000
    samples in batches of 64 at learning rate 1e-3)."""

    x0: float = 7.0
    beta_start: float = 1e-4
    beta_end: float = 0.02
    steps: int = 500
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    epochs: int = 3000
    samples_per_epoch: int = 1000
    batch_size: int = 64
    learning_rate: float = 1e-3
    trials: int = 100
    gens_per_trial: int = 100
    error_metric: str = "mean_abs"
    base_seed: int = 0
    sigma_mode: str = "beta"
    final_step_noiseless: bool = True
    reverse_noise_policy: str = "same"
    normalize_mixture: bool = False
    activation: str = "relu"
    optimizer: str = "adam"

    def __post_init__(self):
        if not math.isfinite(self.x0):
            raise ConfigError(f"x0 must be finite, got {self.x0}")
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if not (0.0 < self.beta_start <= self.beta_end < 1.0):
            raise ConfigError(
                "need 0 < beta_start <= beta_end < 1, got "
                f"({self.beta_start}, {self.beta_end})"
            )
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        for key in ("samples_per_epoch", "batch_size", "trials", "gens_per_trial"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be >= 1, got {getattr(self, key)}")
        if self.batch_size > self.samples_per_epoch:
            raise ConfigError(
                f"batch_size ({self.batch_size}) cannot exceed "
                f"samples_per_epoch ({self.samples_per_epoch})"
            )
        if self.learning_rate <= 0.0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.error_metric not in ERROR_METRICS:
            raise ConfigError(
                f"unknown error_metric {self.error_metric!r}; expected one of {ERROR_METRICS}"
            )
        if self.sigma_mode not in diffusion.SIGMA_MODES:
            raise ConfigError(
                f"unknown sigma_mode {self.sigma_mode!r}; expected one of {diffusion.SIGMA_MODES}"
            )
        if self.reverse_noise_policy not in REVERSE_NOISE_POLICIES:
            raise ConfigError(
                f"unknown reverse_noise {self.reverse_noise_policy!r}; "
                f"expected one of {REVERSE_NOISE_POLICIES}"
            )
        if self.activation not in mlp.ACTIVATIONS:
            raise ConfigError(
                f"unknown activation {self.activation!r}; expected one of {mlp.ACTIVATIONS}"
            )
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(
                f"unknown optimizer {self.optimizer!r}; expected one of {OPTIMIZERS}"
            )
        if self.base_seed < 0:
            raise ConfigError(f"base_seed must be >= 0, got {self.base_seed}")

    def schedule(self) -> Schedule:
        return build_linear(self.beta_start, self.beta_end, self.steps)

    def sampler_options(self) -> SamplerOptions:
        if self.reverse_noise_policy == "same":
            inject = self.noise
        else:
            inject = NoiseSpec("gaussian")
        return SamplerOptions(
            reverse_noise=inject,
            init_noise=inject,
            sigma_mode=self.sigma_mode,
            final_step_noiseless=self.final_step_noiseless,
        )

    def to_dict(self) -> dict:
        return {
            "x0": self.x0,
            "beta_start": self.beta_start,
            "beta_end": self.beta_end,
            "steps": self.steps,
            "noise": self.noise.to_dict(),
            "epochs": self.epochs,
            "samples_per_epoch": self.samples_per_epoch,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "trials": self.trials,
            "gens_per_trial": self.gens_per_trial,
            "error_metric": self.error_metric,
            "base_seed": self.base_seed,
            "sigma_mode": self.sigma_mode,
            "final_step_noiseless": self.final_step_noiseless,
            "reverse_noise": self.reverse_noise_policy,
            "normalize_mixture": self.normalize_mixture,
            "activation": self.activation,
            "optimizer": self.optimizer,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        key_map = {"reverse_noise": "reverse_noise_policy"}
        int_keys = {
            "steps", "epochs", "samples_per_epoch", "batch_size",
            "trials", "gens_per_trial", "base_seed",
        }
        float_keys = {"x0", "beta_start", "beta_end", "learning_rate"}
        bool_keys = {"final_step_noiseless", "normalize_mixture"}
        str_keys = {"error_metric", "sigma_mode", "reverse_noise", "activation", "optimizer"}
        allowed = int_keys | float_keys | bool_keys | str_keys | {"noise"}
        unknown = set(d) - allowed
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        kwargs: dict = {}
        for key, value in d.items():
            attr = key_map.get(key, key)
            try:
                if key == "noise":
                    kwargs[attr] = NoiseSpec.from_dict(value)
                elif key in int_keys:
                    kwargs[attr] = int(value)
                elif key in float_keys:
                    kwargs[attr] = float(value)
                elif key in bool_keys:
                    kwargs[attr] = bool(value)
                else:
                    kwargs[attr] = str(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for config key {key!r}: {value!r}") from exc
        cfg = cls(**kwargs)
        if cfg.normalize_mixture and cfg.noise.family == "mixture":
            cfg = replace(cfg, noise=replace(cfg.noise, normalize_to_unit=True))
        return cfg


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    seed_used: int
    final_epoch_loss: float
    gen_error: float
    diverged: bool


@dataclass(frozen=True)
class SummaryRow:
    label: str
    mean_error: float
    std_error: float
    n_trials: int
    n_diverged: int


def init_stream(cfg: ExperimentConfig, trial: int) -> RngStream:
    return seed_stream(cfg.base_seed, 2 * trial)


def train_stream(cfg: ExperimentConfig, trial: int) -> RngStream:
    return seed_stream(cfg.base_seed, 2 * trial + 1)


def eval_stream(cfg: ExperimentConfig, trial: int) -> RngStream:
    g = seed_stream(cfg.base_seed, 2 * trial)
    g.uniforms(mlp.INIT_DRAWS)
    return g


def train_trial(cfg: ExperimentConfig, trial: int) -> tuple[mlp.MlpParams, float]:
    """Train one denoiser; returns (params, mean loss of the last epoch).

    With epochs = 0 the freshly initialized parameters come back untouched and
    the loss is nan.
    """
    sched = cfg.schedule()
    params = mlp.init_params(init_stream(cfg, trial))
    g = train_stream(cfg, trial)
    state = mlp.AdamState.zeros()
    n = cfg.samples_per_epoch
    T = cfg.steps
    sqrt_ab = np.sqrt(sched.alpha_bar)
    sqrt_1mab = np.sqrt(1.0 - sched.alpha_bar)
    final_loss = math.nan
    # overflow during a diverging trial is expected; it is caught via the
    # finite-loss check and reported as a flagged trial, not a crash
    with np.errstate(all="ignore"):
        for epoch in range(cfg.epochs):
            ts = np.floor(g.uniforms(n) * T).astype(np.int64) + 1  # uniform on {1..T}
            eps = noise_mod.sample_block(cfg.noise, n, g)
            x_t = sqrt_ab[ts - 1] * cfg.x0 + sqrt_1mab[ts - 1] * eps
            X = np.column_stack([x_t, ts / T])
            sq_err = 0.0
            for lo in range(0, n, cfg.batch_size):
                Xb = X[lo : lo + cfg.batch_size]
                yb = eps[lo : lo + cfg.batch_size]
                loss, grad = mlp.loss_and_grad_arrays(params, Xb, yb, cfg.activation)
                if not math.isfinite(loss):
                    raise DivergenceError(
                        f"non-finite training loss in epoch {epoch}", step=epoch
                    )
                sq_err += loss * len(yb)
                if cfg.optimizer == "adam":
                    params, state = mlp.adam_step(params, state, grad, cfg.learning_rate)
                else:
                    params = mlp.sgd_step(params, grad, cfg.learning_rate)
            final_loss = sq_err / n
    return params, final_loss


def evaluate_trial(
    params: mlp.MlpParams | diffusion.Predictor, cfg: ExperimentConfig, trial: int
) -> float:
    """Generation error of a trained model (or any predictor) on this trial's
    evaluation stream.

    mean_abs averages |x0_hat - x0| over the generated samples; abs_mean is
    |mean(x0_hat) - x0|. Diverged generations are excluded; if every one
    diverges the trial itself counts as diverged.
    """
    if isinstance(params, mlp.MlpParams):
        pred = diffusion.mlp_predictor(params, cfg.steps, cfg.activation)
    else:
        pred = params
    g = eval_stream(cfg, trial)
    x0_hats, diverged = diffusion.generate_block(
        pred, cfg.gens_per_trial, cfg.schedule(), cfg.sampler_options(), g
    )
    good = x0_hats[~diverged]
    if good.size == 0:
        raise DivergenceError("all generations diverged")
    if cfg.error_metric == "mean_abs":
        return float(np.mean(np.abs(good - cfg.x0)))
    return float(abs(np.mean(good) - cfg.x0))


def run_trial(cfg: ExperimentConfig, trial: int) -> tuple[TrialResult, mlp.MlpParams | None]:
    """One full train-then-generate trial; never raises on divergence."""
    try:
        params, final_loss = train_trial(cfg, trial)
    except DivergenceError:
        return TrialResult(trial, cfg.base_seed, math.nan, math.nan, True), None
    try:
        gen_error = evaluate_trial(params, cfg, trial)
    except DivergenceError:
        return TrialResult(trial, cfg.base_seed, final_loss, math.nan, True), params
    return TrialResult(trial, cfg.base_seed, final_loss, gen_error, False), params


def run_trials(
    cfg: ExperimentConfig,
    workers: int = 1,
    on_result: Callable[[TrialResult], None] | None = None,
) -> list[tuple[TrialResult, mlp.MlpParams | None]]:
    """All trials of one config, optionally in parallel; output is ordered by
    trial index regardless of completion order."""
    if workers <= 1 or cfg.trials <= 1:
        out = []
        for i in range(cfg.trials):
            pair = run_trial(cfg, i)
            if on_result is not None:
                on_result(pair[0])
            out.append(pair)
        return out
    pairs: list = [None] * cfg.trials
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(run_trial, cfg, i): i for i in range(cfg.trials)}
        for fut in as_completed(futures):
            pair = fut.result()
            pairs[futures[fut]] = pair
            if on_result is not None:
                on_result(pair[0])
    return pairs


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[TrialResult]:
    return [result for result, _ in run_trials(cfg, workers)]


def summarize(results: list[TrialResult], label: str) -> SummaryRow:
    """Mean and sample std of gen_error over non-diverged trials."""
    if not results:
        raise ValueError("no trial results to summarize")
    n_diverged = sum(r.diverged for r in results)
    errors = np.array([r.gen_error for r in results if not r.diverged])
    if errors.size == 0:
        return SummaryRow(label, math.nan, math.nan, len(results), n_diverged)
    std = float(errors.std(ddof=1)) if errors.size > 1 else 0.0
    return SummaryRow(label, float(errors.mean()), std, len(results), n_diverged)


def table1_distributions() -> list[tuple[str, NoiseSpec]]:
    """The three unit-variance families, in reporting order."""
    return [
        ("gaussian", NoiseSpec("gaussian")),
        ("uniform", NoiseSpec("uniform")),
        ("arcsine", NoiseSpec("arcsine")),
    ]


def table2_distributions(normalize: bool = False) -> list[tuple[str, NoiseSpec]]:
    """Gaussian plus the two scale mixtures, in reporting order."""
    return [
        ("gaussian", NoiseSpec("gaussian")),
        ("mix0.9", NoiseSpec("mixture", mix_prob=0.9, big_variance=100.0,
                             normalize_to_unit=normalize)),
        ("mix0.5", NoiseSpec("mixture", mix_prob=0.5, big_variance=100.0,
                             normalize_to_unit=normalize)),
    ]


@dataclass
class DistributionRun:
    label: str
    results: list[TrialResult]
    summary: SummaryRow
    first_trial_params: mlp.MlpParams | None


def run_suite(
    cfg: ExperimentConfig,
    distributions: list[tuple[str, NoiseSpec]],
    workers: int = 1,
    on_result: Callable[[str, TrialResult], None] | None = None,
) -> list[DistributionRun]:
    """Run the same config across several noise distributions (matched seeds)."""
    runs = []
    for label, spec in distributions:
        sub = replace(cfg, noise=spec)
        callback = None
        if on_result is not None:
            callback = lambda r, lab=label: on_result(lab, r)
        pairs = run_trials(sub, workers, callback)
        results = [result for result, _ in pairs]
        runs.append(
            DistributionRun(label, results, summarize(results, label), pairs[0][1])
        )
    return runs


def run_table1(cfg: ExperimentConfig, workers: int = 1) -> list[SummaryRow]:
    return [run.summary for run in run_suite(cfg, table1_distributions(), workers)]


def run_table2(
    cfg: ExperimentConfig, workers: int = 1, normalize: bool | None = None
) -> list[SummaryRow]:
    if normalize is None:
        normalize = cfg.normalize_mixture
    return [
        run.summary for run in run_suite(cfg, table2_distributions(normalize), workers)
    ]
