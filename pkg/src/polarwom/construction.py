"""Entropy profiles, high-entropy index sets and the containment check.

Positions are 0-based in memory.  The JSON files written here use 1-based
indices, matching the usual ``u_1 .. u_N`` numbering.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channels import (
    ReadChannel,
    WomSourceModel,
    leaf_priors_from_observation,
    leaf_priors_from_state,
    sample_source_block,
    transmit,
)
from .polar import InvalidInputError, genie_posteriors, is_power_of_two, pair_entropy

# Samples per RNG stream.  Fixed so results do not depend on the worker count.
CHUNK_ELEMENTS = 1 << 21


class SideInfo(str, Enum):
    STATE = "STATE"
    OBSERVATION = "OBSERVATION"


@dataclass
class EntropyProfile:
    values: np.ndarray
    sample_count: int
    side_info_kind: SideInfo
    std_error: np.ndarray | None = None
    seed: int | None = None

    @property
    def N(self) -> int:
        return len(self.values)

    def to_json(self, extra: dict | None = None) -> dict:
        d = {
            "N": self.N,
            "M": self.sample_count,
            "side_info_kind": self.side_info_kind.value,
            "seed": self.seed,
            "values": [float(v) for v in self.values],
        }
        if self.std_error is not None:
            d["std_error"] = [float(v) for v in self.std_error]
        if extra:
            d.update(extra)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "EntropyProfile":
        values = np.asarray(d["values"], dtype=float)
        if len(values) != d["N"]:
            raise InvalidInputError("profile length does not match N")
        se = d.get("std_error")
        return cls(values, int(d["M"]), SideInfo(d["side_info_kind"]),
                   None if se is None else np.asarray(se, dtype=float), d.get("seed"))


@dataclass
class IndexPartition:
    """High-entropy sets F (state side) and G (read side) over ``range(N)``."""

    N: int
    F: np.ndarray
    G: np.ndarray
    threshold_high: float = 0.9
    threshold_low: float = 0.1
    config: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        self.F = np.unique(np.asarray(self.F, dtype=np.intp))
        self.G = np.unique(np.asarray(self.G, dtype=np.intp))
        for name, idx in (("F", self.F), ("G", self.G)):
            if idx.size and (idx[0] < 0 or idx[-1] >= self.N):
                raise InvalidInputError(f"{name} has indices outside 0..{self.N - 1}")

    def _mask(self, idx) -> np.ndarray:
        m = np.zeros(self.N, dtype=bool)
        m[idx] = True
        return m

    @property
    def message_set(self) -> np.ndarray:
        return np.setdiff1d(self.F, self.G)

    @property
    def frozen_set(self) -> np.ndarray:
        return self.G

    @property
    def sampled_set(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.N), self.F)

    @property
    def violations(self) -> np.ndarray:
        return np.setdiff1d(self.G, self.F)

    @property
    def design_rate(self) -> float:
        return len(self.message_set) / self.N

    def to_json(self, extra: dict | None = None) -> dict:
        d = {
            "N": self.N,
            "thresholds": [self.threshold_high, self.threshold_low],
            "F": [int(i) + 1 for i in self.F],
            "G": [int(i) + 1 for i in self.G],
        }
        if self.config is not None:
            d["config"] = self.config
        if extra:
            d.update(extra)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "IndexPartition":
        hi, lo = d.get("thresholds", [0.9, 0.1])
        return cls(int(d["N"]), np.asarray(d["F"], dtype=np.intp) - 1,
                   np.asarray(d["G"], dtype=np.intp) - 1, hi, lo, d.get("config"))


# ---------------------------------------------------------------- estimation

def _chunk_moments(model, ch, N, m, seed_seq):
    rng = np.random.default_rng(seed_seq)
    s, x = sample_source_block(model, N, rng, size=m)
    if ch is None:
        priors = leaf_priors_from_state(model, s)
    else:
        priors = leaf_priors_from_observation(model, ch, transmit(x, ch, rng))
    h = pair_entropy(genie_posteriors(priors, x))
    mean = h.mean(axis=0)
    return m, mean, ((h - mean) ** 2).sum(axis=0)


def estimate_profile(model: WomSourceModel, ch: ReadChannel | None, N: int, M: int,
                     rng, *, workers: int = 1) -> EntropyProfile:
    """Monte-Carlo estimate of ``H(U_i | side info, U_1^{i-1})`` for every ``i``.

    ``ch=None`` conditions on the cell state, otherwise on the channel
    output.  Each sample uses its true prefix.  ``rng`` may be an int seed,
    a SeedSequence or a Generator; it is split into one stream per chunk.
    """
    if not is_power_of_two(N):
        raise InvalidInputError(f"block length {N} is not a power of two")
    if M < 1:
        raise InvalidInputError("sample count must be at least 1")
    if isinstance(rng, np.random.Generator):
        seed_seq = np.random.SeedSequence(int(rng.integers(2**63)))
        seed = None
    elif isinstance(rng, np.random.SeedSequence):
        seed_seq, seed = rng, None
    else:
        seed_seq, seed = np.random.SeedSequence(rng), rng

    per_chunk = max(1, CHUNK_ELEMENTS // N)
    sizes = [per_chunk] * (M // per_chunk) + ([M % per_chunk] if M % per_chunk else [])
    streams = seed_seq.spawn(len(sizes))
    jobs = list(zip(sizes, streams))

    def run(job):
        return _chunk_moments(model, ch, N, job[0], job[1])

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    # pairwise merge of chunk means and squared deviations (stable near h = 1)
    n, mean, m2 = parts[0]
    for nb, mb, m2b in parts[1:]:
        d = mb - mean
        tot = n + nb
        mean = mean + d * (nb / tot)
        m2 = m2 + m2b + d * d * (n * nb / tot)
        n = tot
    se = np.sqrt(m2 / (M - 1) / M) if M > 1 else np.full(N, np.inf)
    kind = SideInfo.STATE if ch is None else SideInfo.OBSERVATION
    return EntropyProfile(np.clip(mean, 0.0, 1.0), M, kind, se, seed)


def _dense_generator(N: int) -> np.ndarray:
    g = np.ones((1, 1), dtype=np.int64)
    for _ in range(N.bit_length() - 1):
        g = np.kron(np.array([[1, 0], [1, 1]]), g)
    return g


def exact_profile(model: WomSourceModel, ch: ReadChannel | None, N: int) -> EntropyProfile:
    """Exact conditional entropies by enumerating the joint law (N <= 8).

    Uses the dense generator matrix rather than the butterfly so it can serve
    as an independent oracle.
    """
    if N not in (1, 2, 4, 8):
        raise InvalidInputError(f"exact enumeration supports N in {{1, 2, 4, 8}}, got {N}")
    xs = ((np.arange(2**N)[:, None] >> np.arange(N - 1, -1, -1)) & 1).astype(np.int64)
    us = xs @ _dense_generator(N) % 2
    u_index = us @ (1 << np.arange(N - 1, -1, -1))

    if ch is None:
        # side[c, j] = P(side_j = c_j, X_j = x_j) factorised per position
        per_pos = model.joint_sx()        # [s, x]
        n_side = 2
    else:
        prior = np.array([model.p_x0, 1 - model.p_x0])
        per_pos = (prior[:, None] * ch.transition).T  # [y, x]
        n_side = ch.output_alphabet_size
    sides = np.array(np.unravel_index(np.arange(n_side**N), (n_side,) * N)).T
    # joint[c, x] = prod_j per_pos[c_j, x_j]
    joint = np.ones((len(sides), 2**N))
    for j in range(N):
        joint *= per_pos[sides[:, j][:, None], xs[:, j][None, :]]
    ju = np.zeros_like(joint)
    ju[:, u_index] = joint

    def h(t):
        t = t[t > 0]
        return float(-(t * np.log2(t)).sum())

    hs = [h(ju.reshape(len(sides), 2**i, -1).sum(axis=2)) for i in range(N + 1)]
    values = np.clip(np.diff(hs), 0.0, 1.0)
    kind = SideInfo.STATE if ch is None else SideInfo.OBSERVATION
    return EntropyProfile(values, 0, kind, np.zeros(N))


# ---------------------------------------------------------------- partition

def build_partition(profile_state: EntropyProfile, profile_obs: EntropyProfile,
                    threshold_high: float = 0.9, threshold_low: float = 0.1) -> IndexPartition:
    """Threshold the two profiles (inclusive) into F and G.

    Exactly-zero entropies never count as high-entropy, so a zero threshold
    selects the strictly positive entries.
    """
    if profile_state.N != profile_obs.N:
        raise InvalidInputError("profiles disagree on N")
    if not 0.0 <= threshold_low <= threshold_high <= 1.0:
        raise InvalidInputError("need 0 <= threshold_low <= threshold_high <= 1")
    hs, ho = profile_state.values, profile_obs.values
    F = np.flatnonzero((hs >= threshold_high) & (hs > 0))
    G = np.flatnonzero((ho >= threshold_low) & (ho > 0))
    return IndexPartition(profile_state.N, F, G, threshold_high, threshold_low)


def containment_report(partition: IndexPartition) -> dict:
    v = partition.violations
    return {
        "holds": bool(v.size == 0),
        "violations": [int(i) for i in v],
        "design_rate": partition.design_rate,
    }


def save_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


DEFAULT_DELTAS = (1e-5, 2e-5, 5e-5, 1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 0.1)


def error_bound(profile_state: EntropyProfile, profile_obs: EntropyProfile,
                threshold_high: float, threshold_low: float) -> float:
    """First-order estimate of the frame error probability of a design.

    Forcing a bit at an index with state-side entropy ``h`` conflicts with
    the cell state about ``(1 - h) / 2`` of the time; an index decoded from
    the read with entropy ``h`` is wrong at most ``h / 2`` of the time.
    """
    p = build_partition(profile_state, profile_obs, threshold_high, threshold_low)
    hs, ho = profile_state.values, profile_obs.values
    forced = np.union1d(p.F, p.G)
    decoded = np.setdiff1d(np.arange(p.N), p.G)
    return float((1 - hs[forced]).sum() / 2 + ho[decoded].sum() / 2)


def select_thresholds(profile_state: EntropyProfile, profile_obs: EntropyProfile,
                      deltas=DEFAULT_DELTAS) -> tuple[float, float]:
    """Pick ``(1 - d, d)`` from ``deltas`` minimizing error_bound; ties favour larger d."""
    best = None
    for d in sorted(deltas, reverse=True):
        b = error_bound(profile_state, profile_obs, 1.0 - d, d)
        if best is None or b < best[0]:
            best = (b, d)
    return 1.0 - best[1], best[1]
