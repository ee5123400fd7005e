"""Built-in sanity checks behind the ``selftest`` CLI subcommand.

Three groups, each independent of the code path it validates: sampler moments
against analytic values, analytic gradients against central differences, and
the reverse sampler against the exact point-mass oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import diffusion, mlp
from . import noise as noise_mod
from .noise import NoiseSpec
from .prng import seed_stream
from .schedule import build_linear

MOMENT_DRAWS = 1_000_000


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _moment_checks(seed: int) -> list[CheckResult]:
    out = []
    for i, (label, spec) in enumerate(
        [
            ("gaussian", NoiseSpec("gaussian")),
            ("uniform", NoiseSpec("uniform")),
            ("arcsine", NoiseSpec("arcsine")),
        ]
    ):
        rep = noise_mod.moment_report(spec, MOMENT_DRAWS, seed_stream(seed, 100 + i))
        ok = abs(rep.mean) < 0.01 and abs(rep.variance - 1.0) < 0.02
        detail = f"mean={rep.mean:.5f} var={rep.variance:.5f}"
        if label == "arcsine":
            ok = ok and -1.55 < rep.kurtosis < -1.45
            detail += f" excess_kurtosis={rep.kurtosis:.4f}"
        out.append(CheckResult(f"moments[{label}]", ok, detail))
    mix = NoiseSpec("mixture", mix_prob=0.9, big_variance=100.0)
    rep = noise_mod.moment_report(mix, MOMENT_DRAWS, seed_stream(seed, 110))
    ok = 10.6 < rep.variance < 11.2
    out.append(
        CheckResult(
            "moments[mix0.9 unnormalized]", ok, f"var={rep.variance:.4f} (analytic 10.9)"
        )
    )
    return out


def _gradient_checks(seed: int, n_pairs: int = 10) -> list[CheckResult]:
    worst = 0.0
    for i in range(n_pairs):
        g = seed_stream(seed, 200 + i)
        params = mlp.init_params(g)
        inputs = np.column_stack([g.gaussians(8) * 3.0, g.uniforms(8)])
        targets = g.gaussians(8)
        batch = mlp.TrainBatch(inputs, targets)
        worst = max(worst, mlp.finite_diff_check(params, batch, h=1e-6))
    ok = worst < 1e-5
    return [CheckResult("gradient finite-difference", ok, f"worst rel err={worst:.3g}")]


def _oracle_checks(seed: int) -> list[CheckResult]:
    out = []
    sched = build_linear(1e-4, 0.02, 500)
    x0 = 7.0
    pred = diffusion.oracle_predictor(x0, sched)
    worst = max(
        abs(diffusion.noiseless_reverse_chain(pred, start, sched) - x0)
        for start in (-100.0, -7.0, 0.0, 7.0, 100.0)
    )
    out.append(
        CheckResult(
            "oracle noiseless contraction", worst < 1e-6, f"worst |x0_hat - 7|={worst:.3g}"
        )
    )
    opts = diffusion.gaussian_options()
    x0_hats, diverged = diffusion.generate_block(
        pred, 1000, sched, opts, seed_stream(seed, 300)
    )
    mean = float(np.mean(x0_hats[~diverged]))
    ok = not diverged.any() and 6.95 < mean < 7.05
    out.append(CheckResult("oracle noisy chain mean", ok, f"mean of 1000 = {mean:.5f}"))
    return out


def run_selftest(seed: int = 0) -> list[CheckResult]:
    return _moment_checks(seed) + _gradient_checks(seed) + _oracle_checks(seed)
