"""End-to-end trials: sample state, encode, program cells, read back, decode, score."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

from .channels import (
    ReadChannel,
    WomSourceModel,
    h_x_given_y,
    less_noisy_condition,
    mutual_info_xs,
    mutual_info_xy,
    sample_source_block,
    transmit,
)
from .codec import apply_write, decode_batch, encode_batch, freeze_bits
from .construction import IndexPartition, containment_report

# Trials per RNG stream; part of the reproducibility contract.
TRIAL_CHUNK = 50
Z95 = 1.959963984540054


@dataclass
class TrialResult:
    wom_violations: int
    bit_errors: int
    frame_error: bool
    write_fraction: float


@dataclass
class ExperimentReport:
    config: dict
    trials: int
    design_rate: float
    message_bits: int
    frame_errors: int
    frame_error_rate: float
    fer_ci_low: float
    fer_ci_high: float
    ci_method: str
    small_sample: bool
    bit_error_rate: float
    wom_violation_rate: float
    mean_write_fraction: float
    containment_holds: bool
    containment_violations: list
    less_noisy_margin: float
    mutual_info_xs: float
    mutual_info_xy: float

    def to_json(self) -> dict:
        return asdict(self)


def run_trials(model: WomSourceModel, ch: ReadChannel, partition: IndexPartition, freeze,
               rng: np.random.Generator, count: int) -> list[TrialResult]:
    """Run ``count`` trials as one vectorized batch drawing from ``rng``."""
    N = partition.N
    K = len(partition.message_set)
    freeze = np.asarray(freeze, dtype=np.uint8)
    s, _ = sample_source_block(model, N, rng, size=count)
    msg = rng.integers(0, 2, size=(count, K), dtype=np.uint8)
    x, _, violations, _ = encode_batch(s, partition, msg, freeze, model, rng)
    stored = apply_write(s, x)
    y = transmit(stored, ch, rng)
    decoded = decode_batch(y, partition, freeze, model, ch)
    bit_errors = (decoded != msg).sum(axis=1)
    written = ((s == 1) & (x == 0)).mean(axis=1)
    return [
        TrialResult(int(v), int(e), bool(v > 0 or e > 0), float(w))
        for v, e, w in zip(violations, bit_errors, written)
    ]


def run_trial(model, ch, partition, freeze, rng) -> TrialResult:
    return run_trials(model, ch, partition, freeze, rng, 1)[0]


def proportion_ci(k: int, n: int) -> tuple[float, float, str]:
    """95% interval for ``k / n``: normal approximation, Wilson when a count is under 5."""
    p = k / n
    if k < 5 or n - k < 5:
        z2 = Z95 * Z95
        centre = (p + z2 / (2 * n)) / (1 + z2 / n)
        half = Z95 * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n)
        return max(0.0, centre - half), min(1.0, centre + half), "wilson"
    half = Z95 * math.sqrt(p * (1 - p) / n)
    return max(0.0, p - half), min(1.0, p + half), "normal"


def summarize(results: list[TrialResult], model, ch, partition, config=None) -> ExperimentReport:
    n = len(results)
    k = sum(r.frame_error for r in results)
    lo, hi, method = proportion_ci(k, n)
    K = len(partition.message_set)
    bits = sum(r.bit_errors for r in results)
    cont = containment_report(partition)
    _, margin = less_noisy_condition(model, ch)
    return ExperimentReport(
        config=config or {},
        trials=n,
        design_rate=partition.design_rate,
        message_bits=K,
        frame_errors=k,
        frame_error_rate=k / n,
        fer_ci_low=lo,
        fer_ci_high=hi,
        ci_method=method,
        small_sample=n < 30,
        bit_error_rate=bits / (n * K) if K else 0.0,
        wom_violation_rate=sum(r.wom_violations > 0 for r in results) / n,
        mean_write_fraction=float(np.mean([r.write_fraction for r in results])),
        containment_holds=cont["holds"],
        containment_violations=[i + 1 for i in cont["violations"]],
        less_noisy_margin=float(margin),
        mutual_info_xs=mutual_info_xs(model),
        mutual_info_xy=mutual_info_xy(model, ch),
    )


def simulate(model, ch, partition, freeze, trials: int, seed) -> list[TrialResult]:
    """Run ``trials`` trials split into fixed-size chunks, one spawned stream each."""
    if trials < 1:
        raise ValueError("need at least one trial")
    sizes = [TRIAL_CHUNK] * (trials // TRIAL_CHUNK)
    if trials % TRIAL_CHUNK:
        sizes.append(trials % TRIAL_CHUNK)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    out: list[TrialResult] = []
    for size, ss in zip(sizes, streams):
        out.extend(run_trials(model, ch, partition, freeze, np.random.default_rng(ss), size))
    return out


def run_experiment(config, trials: int | None = None, partition: IndexPartition | None = None) -> ExperimentReport:
    """Run one configuration point end to end.

    Builds the partition from ``config.construction`` unless one is given.
    """
    from .config import construct

    if partition is None:
        partition = construct(config).partition
    model, ch = config.model, config.channel
    n = trials if trials is not None else config.trials
    freeze = freeze_bits(partition, config.freeze)
    results = simulate(model, ch, partition, freeze, n, config.harness_seed)
    return summarize(results, model, ch, partition, config.to_dict())


def rate_gap_bound(model: WomSourceModel, ch: ReadChannel) -> float:
    """``H(X|S) - H(X|Y)``, the largest rate the scheme can carry."""
    return model.h_x_given_s - h_x_given_y(model, ch)


CSV_FIELDS = [
    "point", "N", "beta", "gamma", "channel", "trials", "design_rate", "frame_errors",
    "frame_error_rate", "fer_ci_low", "fer_ci_high", "bit_error_rate", "wom_violation_rate",
    "mean_write_fraction", "containment_holds", "less_noisy_margin",
]


def reports_to_csv(reports: list[ExperimentReport]) -> str:
    """One row per configuration point."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for i, r in enumerate(reports):
        cfg = r.config
        ch = cfg.get("channel", {})
        row = {k: getattr(r, k) for k in CSV_FIELDS if hasattr(r, k)}
        row.update(point=i, N=cfg.get("N"), beta=cfg.get("beta"), gamma=cfg.get("gamma"),
                   channel=" ".join(f"{k}={v}" for k, v in sorted(ch.items())))
        for k, v in row.items():
            if isinstance(v, float):
                row[k] = repr(v)
        w.writerow(row)
    return buf.getvalue()
