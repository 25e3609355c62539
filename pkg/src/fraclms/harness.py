"""Monte Carlo system-identification experiments and their result files.

An experiment identifies a fixed or per-round-random FIR system from a
white Gaussian input, optionally through additive Gaussian noise at a
configured SNR, using any of the update rules in :mod:`fraclms.filters`.
Per-iteration mean deviation (l1 distance between true and estimated
weights over the filter length) is averaged across independent rounds
into learning curves.

Reproducibility contract: every round draws from its own counter-based
generator keyed by (master seed, rule, order, round index), and curves
are aggregated in ascending round order, so results are bit-identical
for any degree of parallelism.

Conventions recorded in run metadata:

* SNR is defined against the power of the noise-free desired signal;
  fixed systems use the exact power ``||w*||^2`` (unit-variance white
  input), per-round random systems use the empirical mean of the clean
  desired samples of that round.
* Rule-2 variants initialize weights from a standard Gaussian (their
  stagnation depends on the first weight difference); all other rules
  follow the configured init. ``prev_weights`` always starts at zero.
* Rounds whose weights go non-finite, or whose mean deviation leaves the
  representable range (1e300 cap), keep their last finite mean deviation
  for the remaining iterations (sentinel carry-forward) and are counted
  in ``diverged_rate``.
"""

from __future__ import annotations

import enum
import json
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .filters import AlgorithmSpec, FilterState, UpdateRule, step

__all__ = [
    "SystemKind",
    "SystemSpec",
    "WeightInit",
    "ExperimentConfig",
    "LearningCurve",
    "RoundTrace",
    "ProtocolId",
    "mean_deviation",
    "make_noise",
    "round_generator",
    "run_round",
    "run_experiment",
    "paper_protocol",
    "PAPER_ALPHAS",
    "curves_to_csv_rows",
    "write_results_csv",
    "write_run_metadata",
    "RESULTS_CSV_HEADER",
]

PAPER_ALPHAS: Tuple[float, ...] = (0.9, 0.8, 0.7, 0.6, 0.5, 0.4)

RESULTS_CSV_HEADER = "protocol,algorithm,alpha,iteration,mean_md,complex_fire_rate,diverged_rate"


class SystemKind(enum.Enum):
    NEGATIVE_RAMP = "negative_ramp"
    POSITIVE_RAMP = "positive_ramp"
    RANDOM_GAUSSIAN = "random_gaussian"


@dataclass(frozen=True)
class SystemSpec:
    """The FIR system to identify. Random systems are redrawn every round."""

    kind: SystemKind
    length: int

    @classmethod
    def negative_ramp(cls) -> "SystemSpec":
        return cls(SystemKind.NEGATIVE_RAMP, 15)

    @classmethod
    def positive_ramp(cls) -> "SystemSpec":
        return cls(SystemKind.POSITIVE_RAMP, 15)

    @classmethod
    def random_gaussian(cls, length: int = 30) -> "SystemSpec":
        return cls(SystemKind.RANDOM_GAUSSIAN, length)

    def draw_weights(self, rng: np.random.Generator) -> np.ndarray:
        if self.kind is SystemKind.NEGATIVE_RAMP:
            return -np.arange(self.length, 0.0, -1.0)
        if self.kind is SystemKind.POSITIVE_RAMP:
            return np.arange(1.0, self.length + 1.0)
        return rng.standard_normal(self.length)


class WeightInit(enum.Enum):
    ZEROS = "zeros"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemSpec
    algorithms: Tuple[AlgorithmSpec, ...]
    alphas: Tuple[float, ...] = PAPER_ALPHAS
    snr_db: Optional[float] = None
    iterations: int = 1000
    rounds: int = 1000
    master_seed: int = 0
    init: WeightInit = WeightInit.ZEROS

    def __post_init__(self):
        if self.rounds < 1 or self.iterations < 1:
            raise ValueError("rounds and iterations must be >= 1")
        if not self.algorithms:
            raise ValueError("need at least one algorithm")


@dataclass
class RoundTrace:
    md: np.ndarray
    complex_fired: bool
    diverged: bool


@dataclass
class LearningCurve:
    """Mean deviation per iteration, averaged over rounds, plus flag rates."""

    md: np.ndarray
    complex_fire_rate: float
    diverged_rate: float
    meta: dict


def mean_deviation(w_true: np.ndarray, w_hat: np.ndarray) -> float:
    """l1 distance between weight vectors over the filter length.

    Estimated weights may be complex (raw rules past the pathology); the
    per-tap deviation then uses the complex modulus, which keeps the metric
    defined and plottable after complex outputs appear.
    """
    w_true = np.asarray(w_true)
    w_hat = np.asarray(w_hat)
    if w_true.shape != w_hat.shape:
        raise ValueError(f"length mismatch: {w_true.shape} vs {w_hat.shape}")
    return float(np.mean(np.abs(w_true - w_hat)))


def make_noise(
    signal_power: float, snr_db: float, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Zero-mean Gaussian samples with variance ``signal_power * 10**(-snr_db/10)``."""
    if signal_power <= 0.0:
        raise ValueError("signal_power must be positive")
    sigma = float(np.sqrt(signal_power * 10.0 ** (-snr_db / 10.0)))
    return rng.normal(0.0, sigma, size)


_RULE_IDS = {rule: i for i, rule in enumerate(UpdateRule)}
_RULE2 = (UpdateRule.FLMS2_RAW, UpdateRule.FLMS2_MOD)

# rounds whose mean deviation grows past this are frozen at their last
# finite value; far beyond any physical scale, well inside float range
_MD_SENTINEL_CAP = 1e300


def round_generator(master_seed: int, rule: UpdateRule, alpha: float, round_index: int):
    """Counter-based generator for one round, independent of worker layout."""
    alpha_key = int(np.float64(alpha).view(np.uint64))
    seq = np.random.SeedSequence([master_seed, _RULE_IDS[rule], alpha_key, round_index])
    return np.random.Generator(np.random.Philox(seq))


def run_round(config: ExperimentConfig, algorithm: AlgorithmSpec, round_index: int) -> RoundTrace:
    """One independent round: fresh RNG stream, fresh state, full iteration sweep.

    Draw order is fixed (system weights if random, initial filter weights if
    Gaussian, input signal, noise) so traces are bit-reproducible. The input
    is i.i.d. standard Gaussian; the desired output is the true system's
    response plus calibrated noise when an SNR is configured.
    """
    rng = round_generator(config.master_seed, algorithm.rule, algorithm.alpha, round_index)
    w_true = config.system.draw_weights(rng)
    n_taps = config.system.length

    init = WeightInit.GAUSSIAN if algorithm.rule in _RULE2 else config.init
    if init is WeightInit.GAUSSIAN:
        state = FilterState.from_weights(rng.standard_normal(n_taps))
    else:
        state = FilterState.zeros(n_taps)

    xs = rng.standard_normal(config.iterations)
    d_clean = np.convolve(xs, w_true)[: config.iterations]
    if config.snr_db is not None:
        if config.system.kind is SystemKind.RANDOM_GAUSSIAN:
            signal_power = float(np.mean(d_clean**2))
        else:
            signal_power = float(np.dot(w_true, w_true))
        d = d_clean + make_noise(signal_power, config.snr_db, rng, config.iterations)
    else:
        d = d_clean

    md = np.empty(config.iterations)
    last_md = mean_deviation(w_true, state.weights)
    diverged = False
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for n in range(config.iterations):
            step(state, float(xs[n]), float(d[n]), algorithm)
            if np.all(np.isfinite(state.weights.view(np.float64))):
                value = mean_deviation(w_true, state.weights)
            else:
                value = np.inf
            # the metric cap keeps round sums finite, so mean curves stay
            # well-defined no matter how hard a round diverges
            if value >= _MD_SENTINEL_CAP or not np.isfinite(value):
                diverged = True
                md[n:] = last_md
                break
            last_md = value
            md[n] = last_md
    return RoundTrace(md=md, complex_fired=state.first_complex_at is not None, diverged=diverged)


def _resolved_specs(config: ExperimentConfig) -> List[AlgorithmSpec]:
    """One spec per learning curve: LMS once, fractional rules per order."""
    specs: List[AlgorithmSpec] = []
    for alg in config.algorithms:
        if alg.rule is UpdateRule.LMS:
            specs.append(alg)
        else:
            specs.extend(replace(alg, alpha=a) for a in config.alphas)
    return specs


def _worker_count(workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, workers)
    return max(1, int(os.environ.get("FRACLMS_WORKERS", "1")))


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> List[LearningCurve]:
    """All rounds for all (algorithm, order) combinations of the config.

    Rounds are independent tasks; with ``workers > 1`` they execute in a
    process pool. Aggregation always reduces traces in ascending round
    order, so the mean curve is bit-identical regardless of worker count.
    """
    specs = _resolved_specs(config)
    n_workers = _worker_count(workers)
    curves: List[LearningCurve] = []
    pool = ProcessPoolExecutor(max_workers=n_workers) if n_workers > 1 else None
    try:
        for spec in specs:
            indices = range(config.rounds)
            if pool is not None:
                traces = list(
                    pool.map(run_round, [config] * config.rounds, [spec] * config.rounds, indices)
                )
            else:
                traces = [run_round(config, spec, r) for r in indices]
            acc = np.zeros(config.iterations)
            fired = 0
            diverged = 0
            for trace in traces:  # ascending round order: deterministic reduction
                acc += trace.md
                fired += trace.complex_fired
                diverged += trace.diverged
            curves.append(
                LearningCurve(
                    md=acc / config.rounds,
                    complex_fire_rate=fired / config.rounds,
                    diverged_rate=diverged / config.rounds,
                    meta={
                        "algorithm": spec.rule.value,
                        "alpha": spec.alpha,
                        "mu_l": spec.mu_l,
                        "mu_f": spec.mu_f,
                        "epsilon": spec.epsilon,
                        "master_seed": config.master_seed,
                        "config_digest": config_digest(config),
                    },
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return curves


def config_digest(config: ExperimentConfig) -> str:
    """Stable short digest of the full configuration."""
    import hashlib

    return hashlib.sha256(
        json.dumps(_config_dict(config), sort_keys=True).encode()
    ).hexdigest()[:16]


class ProtocolId(enum.Enum):
    I = "i"
    II = "ii"
    III = "iii"
    III_EPS = "iii_eps"


def _protocol_algorithms(protocol: ProtocolId) -> Tuple[AlgorithmSpec, ...]:
    lms = AlgorithmSpec(UpdateRule.LMS, mu_l=1e-2)
    if protocol in (ProtocolId.I, ProtocolId.II):
        return (lms, AlgorithmSpec(UpdateRule.FLMS1_RAW, alpha=0.5, mu_l=5e-3, mu_f=5e-3))
    if protocol is ProtocolId.III:
        return (
            lms,
            AlgorithmSpec(UpdateRule.FLMS1_MOD, alpha=0.5, mu_l=5e-3, mu_f=5e-3),
            AlgorithmSpec(UpdateRule.FLMS2_MOD, alpha=0.5, mu_f=1e-2),
        )
    return (lms, AlgorithmSpec(UpdateRule.FLMS2_MOD, alpha=0.5, mu_f=1e-2, epsilon=1e-10))


def paper_protocol(
    protocol: ProtocolId,
    rounds: int = 1000,
    iterations: int = 1000,
    master_seed: int = 2021,
    alphas: Sequence[float] = PAPER_ALPHAS,
    snr_db: Optional[float] = 10.0,
) -> List[Tuple[str, ExperimentConfig]]:
    """Benchmark configurations for one protocol, as (variant, config) pairs.

    Protocols I and II (fixed negative / positive ramp systems, raw rule 1
    against LMS) come in noise-free and noisy variants; protocol III (random
    Gaussian systems, corrected rules against LMS) and its bias-compensated
    companion are noisy only. Step sizes: LMS 1e-2; rule 1 corrected
    5e-3 + 5e-3; rule 2 corrected 1e-2. The alpha grid defaults to
    0.9 .. 0.4. Sizes default to the full benchmark scale (1000 rounds of
    1000 iterations); pass smaller values for desk-scale runs.
    """
    algorithms = _protocol_algorithms(protocol)
    if protocol in (ProtocolId.I, ProtocolId.II):
        system = (
            SystemSpec.negative_ramp() if protocol is ProtocolId.I else SystemSpec.positive_ramp()
        )
        base = ExperimentConfig(
            system=system,
            algorithms=algorithms,
            alphas=tuple(alphas),
            iterations=iterations,
            rounds=rounds,
            master_seed=master_seed,
        )
        return [
            ("noisefree", replace(base, snr_db=None)),
            (f"snr{snr_db:g}", replace(base, snr_db=snr_db)),
        ]
    config = ExperimentConfig(
        system=SystemSpec.random_gaussian(),
        algorithms=algorithms,
        alphas=tuple(alphas),
        snr_db=snr_db,
        iterations=iterations,
        rounds=rounds,
        master_seed=master_seed,
    )
    return [(f"snr{snr_db:g}", config)]


# ---------------------------------------------------------------------------
# result files


def curves_to_csv_rows(protocol_label: str, curves: Sequence[LearningCurve]) -> List[str]:
    rows = []
    for curve in curves:
        alg = curve.meta["algorithm"]
        alpha = curve.meta["alpha"]
        fire = repr(float(curve.complex_fire_rate))
        div = repr(float(curve.diverged_rate))
        for n, value in enumerate(curve.md):
            rows.append(
                f"{protocol_label},{alg},{float(alpha)!r},{n},{float(value)!r},{fire},{div}"
            )
    return rows


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_results_csv(path: str, labelled_curves: Sequence[Tuple[str, Sequence[LearningCurve]]]):
    """Write learning curves atomically as CSV (one row per curve point)."""
    lines = [RESULTS_CSV_HEADER]
    for label, curves in labelled_curves:
        lines.extend(curves_to_csv_rows(label, curves))
    _atomic_write(path, "\n".join(lines) + "\n")


def _config_dict(config: ExperimentConfig) -> dict:
    return {
        "system": {"kind": config.system.kind.value, "length": config.system.length},
        "algorithms": [
            {
                "rule": a.rule.value,
                "alpha": a.alpha,
                "mu_l": a.mu_l,
                "mu_f": a.mu_f,
                "epsilon": a.epsilon,
            }
            for a in config.algorithms
        ],
        "alphas": list(config.alphas),
        "snr_db": config.snr_db,
        "iterations": config.iterations,
        "rounds": config.rounds,
        "master_seed": config.master_seed,
        "init": config.init.value,
    }


def write_run_metadata(path: str, labelled_configs: Sequence[Tuple[str, ExperimentConfig]]):
    """Write the JSON sidecar with the full configuration and conventions.

    Deliberately contains no timestamps: identical runs must produce
    byte-identical files.
    """
    payload = {
        "version": __version__,
        "variants": {label: _config_dict(cfg) for label, cfg in labelled_configs},
        "conventions": {
            "snr_reference": "noise-free desired signal power; exact ||w*||^2 for fixed "
            "systems, per-round empirical mean of clean samples for random systems",
            "rule2_weight_init": "standard Gaussian per round",
            "prev_weights_init": "zeros",
            "md_metric": "mean over taps of complex modulus of weight error",
            "output_inner_product": "hermitian (conjugated weights); identical to the "
            "transpose form while weights are real",
            "divergence_sentinel": "last finite mean deviation carried forward; "
            "triggers on non-finite weights or mean deviation beyond 1e300",
            "rng": "philox keyed by (master_seed, rule, alpha bits, round)",
        },
    }
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
