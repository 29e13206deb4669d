"""Randomized SC encoding against the cell state, and SC decoding of noisy reads."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ReadChannel, WomSourceModel, leaf_priors_from_observation, leaf_priors_from_state
from .construction import IndexPartition
from .polar import FIXED, ML, SAMPLE, InvalidInputError, as_bitblock, sc_sweep


@dataclass
class EncodeResult:
    codeword: np.ndarray
    u_vector: np.ndarray
    wom_violations: int
    contradiction: bool = False


def freeze_bits(partition: IndexPartition, policy="zeros") -> np.ndarray:
    """Freeze bits for ``partition.frozen_set``: "zeros", "ones" or an explicit list."""
    L = len(partition.frozen_set)
    if isinstance(policy, str):
        if policy == "zeros":
            return np.zeros(L, dtype=np.uint8)
        if policy == "ones":
            return np.ones(L, dtype=np.uint8)
        raise InvalidInputError(f"unknown freeze policy {policy!r}")
    bits = np.asarray(policy, dtype=np.uint8).reshape(-1)
    if bits.size != L or not np.isin(bits, (0, 1)).all():
        raise InvalidInputError(f"freeze needs {L} bits, got {bits.size}")
    return bits


def _plan(partition: IndexPartition, undecided: int):
    mode = np.full(partition.N, undecided)
    mode[partition.frozen_set] = FIXED
    mode[partition.message_set] = FIXED
    return mode


def _check_lengths(partition, N, messages, freeze):
    if N != partition.N:
        raise InvalidInputError(f"block length {N} does not match partition N={partition.N}")
    K = len(partition.message_set)
    if messages is not None and messages.shape[-1] != K:
        raise InvalidInputError(f"message has {messages.shape[-1]} bits, partition carries {K}")
    if len(freeze) != len(partition.frozen_set):
        raise InvalidInputError(f"freeze has {len(freeze)} bits, partition freezes {len(partition.frozen_set)}")


def encode_batch(s, partition: IndexPartition, messages, freeze, model: WomSourceModel,
                 rng: np.random.Generator):
    """Vectorized encoder over a batch of states ``s`` with shape (B, N).

    Returns ``(x, u, violations, contradiction)`` arrays.  Indices in G take
    freeze bits, F minus G takes the message in index order, the rest are
    drawn from ``P(U_i | s, u_1^{i-1})``.
    """
    s = as_bitblock(s, batch=True)
    messages = np.asarray(messages, dtype=np.uint8).reshape(s.shape[0], -1)
    freeze = np.asarray(freeze, dtype=np.uint8).reshape(-1)
    _check_lengths(partition, s.shape[1], messages, freeze)
    fixed = np.zeros(s.shape, dtype=np.uint8)
    fixed[:, partition.frozen_set] = freeze
    fixed[:, partition.message_set] = messages
    res = sc_sweep(leaf_priors_from_state(model, s), _plan(partition, SAMPLE), fixed, rng)
    violations = ((s == 0) & (res.x == 1)).sum(axis=1)
    return res.x, res.u, violations, res.contradiction[:, -1]


def encode(s, partition: IndexPartition, message, freeze, model: WomSourceModel,
           rng: np.random.Generator) -> EncodeResult:
    s = as_bitblock(s)
    x, u, viol, contra = encode_batch(s[None], partition, np.asarray(message).reshape(1, -1),
                                      freeze, model, rng)
    return EncodeResult(x[0], u[0], int(viol[0]), bool(contra[0]))


def decode_batch(y, partition: IndexPartition, freeze, model: WomSourceModel, ch: ReadChannel):
    """Decode a batch of received blocks (B, N); returns messages (B, |F minus G|)."""
    y = np.asarray(y, dtype=np.intp)
    if y.ndim != 2:
        raise InvalidInputError("expected a 2-d batch of received blocks")
    freeze = np.asarray(freeze, dtype=np.uint8).reshape(-1)
    _check_lengths(partition, y.shape[1], None, freeze)
    fixed = np.zeros(y.shape, dtype=np.uint8)
    fixed[:, partition.frozen_set] = freeze
    mode = np.full(partition.N, ML)
    mode[partition.frozen_set] = FIXED
    res = sc_sweep(leaf_priors_from_observation(model, ch, y), mode, fixed)
    return res.u[:, partition.message_set]


def decode(y, partition: IndexPartition, freeze, model: WomSourceModel, ch: ReadChannel) -> np.ndarray:
    y = np.asarray(y, dtype=np.intp).reshape(1, -1)
    return decode_batch(y, partition, freeze, model, ch)[0]


def apply_write(s, x) -> np.ndarray:
    """Cell contents after programming ``x`` over state ``s``: a 0 cell stays 0."""
    s = np.asarray(s, dtype=np.uint8)
    x = np.asarray(x, dtype=np.uint8)
    if s.shape != x.shape:
        raise InvalidInputError(f"state shape {s.shape} differs from codeword shape {x.shape}")
    return s & x
