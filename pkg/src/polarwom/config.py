"""Experiment configuration: parsing, validation, sweeps, and the construction pipeline."""

from __future__ import annotations

import copy
import itertools
import json
import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channels import ReadChannel, WomSourceModel, channel_from_spec
from .construction import (
    EntropyProfile,
    IndexPartition,
    build_partition,
    estimate_profile,
    select_thresholds,
)
from .polar import InvalidInputError, is_power_of_two


class ConfigError(ValueError):
    def __init__(self, field: str, message: str, line: int | None = None):
        self.field = field
        self.line = line
        where = f"line {line}: " if line else ""
        super().__init__(f"{where}{field}: {message}")


def _prob(value, name, *, open_interval=False):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected a number, got {value!r}") from None
    ok = 0.0 < v < 1.0 if open_interval else 0.0 <= v <= 1.0
    if not ok:
        raise ConfigError(name, f"{v} is outside {'(0, 1)' if open_interval else '[0, 1]'}")
    return v


def _int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(name, f"must be at least {minimum}")
    return int(value)


@dataclass
class ExperimentConfig:
    beta: float
    gamma: float
    channel_spec: dict
    N: int
    M: int = 10_000
    thresholds: tuple | str = (0.9, 0.1)
    construction_seed: int = 0
    freeze: str | list = "zeros"
    trials: int = 100
    harness_seed: int = 0
    sweep: dict | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        for key in ("beta", "gamma", "channel", "N"):
            if key not in d:
                raise ConfigError(key, "missing required field")
        beta = _prob(d["beta"], "beta", open_interval=True)
        gamma = _prob(d["gamma"], "gamma", open_interval=True)
        N = _int(d["N"], "N", 1)
        if not is_power_of_two(N):
            raise ConfigError("N", f"{N} is not a power of two")
        ch = d["channel"]
        if not isinstance(ch, dict) or "kind" not in ch:
            raise ConfigError("channel", 'expected {"kind": "bsc"|"bac"|"matrix", ...}')
        kind = ch["kind"]
        if kind == "bsc":
            _prob(ch.get("p"), "channel.p")
        elif kind == "bac":
            _prob(ch.get("p01"), "channel.p01")
            _prob(ch.get("p10"), "channel.p10")
        elif kind != "matrix":
            raise ConfigError("channel.kind", f"unknown kind {kind!r}")
        try:
            channel_from_spec(ch)
        except (InvalidInputError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError("channel", str(exc)) from None

        con = d.get("construction", {})
        M = _int(con.get("M", 10_000), "construction.M", 1)
        th = con.get("thresholds", [0.9, 0.1])
        if th != "auto":
            if not isinstance(th, (list, tuple)) or len(th) != 2:
                raise ConfigError("construction.thresholds", 'expected [high, low] or "auto"')
            hi = _prob(th[0], "construction.thresholds")
            lo = _prob(th[1], "construction.thresholds")
            if lo > hi:
                raise ConfigError("construction.thresholds", "low threshold exceeds high threshold")
            th = (hi, lo)
        cseed = _int(con.get("seed", 0), "construction.seed", 0)

        freeze = d.get("codec", {}).get("freeze", "zeros")
        if isinstance(freeze, str) and freeze not in ("zeros", "ones"):
            raise ConfigError("codec.freeze", f"unknown policy {freeze!r}")

        har = d.get("harness", {})
        trials = _int(har.get("trials", 100), "harness.trials", 1)
        hseed = _int(har.get("seed", 0), "harness.seed", 0)

        sweep = d.get("sweep")
        if sweep is not None:
            if not isinstance(sweep, dict):
                raise ConfigError("sweep", "expected an object of axis -> list of values")
            for axis, values in sweep.items():
                if not isinstance(values, list) or not values:
                    raise ConfigError(f"sweep.{axis}", "axis needs a nonempty list of values")
                if _get_path(d, axis) is _MISSING:
                    raise ConfigError(f"sweep.{axis}", "no such scalar field in the config")
        return cls(beta, gamma, dict(ch), N, M, th, cseed, freeze, trials, hseed, sweep)

    def to_dict(self) -> dict:
        d = {
            "beta": self.beta,
            "gamma": self.gamma,
            "channel": copy.deepcopy(self.channel_spec),
            "N": self.N,
            "construction": {
                "M": self.M,
                "thresholds": self.thresholds if isinstance(self.thresholds, str) else list(self.thresholds),
                "seed": self.construction_seed,
            },
            "codec": {"freeze": self.freeze},
            "harness": {"trials": self.trials, "seed": self.harness_seed},
        }
        if self.sweep:
            d["sweep"] = copy.deepcopy(self.sweep)
        return d

    @property
    def model(self) -> WomSourceModel:
        return WomSourceModel(self.beta, self.gamma)

    @property
    def channel(self) -> ReadChannel:
        return channel_from_spec(self.channel_spec)

    def points(self) -> list["ExperimentConfig"]:
        """Cartesian expansion of the sweep axes (or just this config)."""
        if not self.sweep:
            return [self]
        base = self.to_dict()
        del base["sweep"]
        axes = list(self.sweep)
        out = []
        for combo in itertools.product(*(self.sweep[a] for a in axes)):
            d = copy.deepcopy(base)
            for axis, value in zip(axes, combo):
                _set_path(d, axis, value)
            out.append(ExperimentConfig.from_dict(d))
        return out


_MISSING = object()


def _get_path(d, path):
    for part in path.split("."):
        if not isinstance(d, dict) or part not in d:
            return _MISSING
        d = d[part]
    return d


def _set_path(d, path, value):
    parts = path.split(".")
    for part in parts[:-1]:
        d = d[part]
    d[parts[-1]] = value


def _line_of(text: str, field: str) -> int | None:
    key = field.split(".")[-1]
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON config; errors carry the offending line when known."""
    with open(path) as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", exc.msg, exc.lineno) from None
    try:
        return ExperimentConfig.from_dict(raw)
    except ConfigError as exc:
        if exc.line is None:
            raise ConfigError(exc.field, str(exc).split(": ", 1)[-1], _line_of(text, exc.field)) from None
        raise


class Construction(NamedTuple):
    profile_state: EntropyProfile
    profile_obs: EntropyProfile
    partition: IndexPartition


def construct(config: ExperimentConfig, *, workers: int = 1) -> Construction:
    """Estimate both profiles and threshold them into a partition."""
    model, ch = config.model, config.channel
    seed = config.construction_seed
    ps = estimate_profile(model, None, config.N, config.M, np.random.SeedSequence([seed, 0]), workers=workers)
    po = estimate_profile(model, ch, config.N, config.M, np.random.SeedSequence([seed, 1]), workers=workers)
    ps.seed = po.seed = seed
    if config.thresholds == "auto":
        hi, lo = select_thresholds(ps, po)
    else:
        hi, lo = config.thresholds
    partition = build_partition(ps, po, hi, lo)
    partition.config = config.to_dict()
    return Construction(ps, po, partition)
