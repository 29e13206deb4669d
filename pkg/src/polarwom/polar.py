"""Binary polar transform and the successive-cancellation probability recursion.

The transform is ``u = x G_k`` over GF(2) with ``G_k`` the k-th Kronecker
power of ``[[1, 0], [1, 1]]`` in natural (non bit-reversed) order.  Splitting
``x`` into halves ``(a, b)`` gives ``u = (T(a ^ b), T(b))``, which is the
recursion every routine here follows.

Probabilities travel as normalized pairs ``(p0, p1)`` stored on the last
axis of a float array, so the same kernels serve scalar calls and batches of
independent blocks.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.special import entr

# Per-index decision modes for sc_sweep.
FIXED = 0
SAMPLE = 1
ML = 2


class InvalidInputError(ValueError):
    """Raised for malformed blocks, lengths or probability pairs."""


class ContradictionError(ArithmeticError):
    """The conditioning prefix has probability zero under the leaf priors."""


class ProbPair(NamedTuple):
    p0: float
    p1: float


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def as_bitblock(x, *, batch: bool = False) -> np.ndarray:
    """Validate ``x`` as a 0/1 block (or a batch of blocks) and return uint8."""
    arr = np.asarray(x)
    if arr.ndim != (2 if batch else 1):
        raise InvalidInputError(f"expected a {'2-d batch' if batch else '1-d block'}, got shape {arr.shape}")
    if not is_power_of_two(arr.shape[-1]):
        raise InvalidInputError(f"block length {arr.shape[-1]} is not a power of two")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InvalidInputError("block entries must be 0 or 1")
    return arr.astype(np.uint8)


def polar_transform(x) -> np.ndarray:
    """Return ``x G_k`` over GF(2).

    Accepts a single block or any array whose last axis is the block.  The
    map is an involution, so the same call inverts it.
    """
    arr = np.asarray(x)
    n = arr.shape[-1] if arr.ndim else 0
    if not is_power_of_two(n):
        raise InvalidInputError(f"block length {n} is not a power of two")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise InvalidInputError("block entries must be 0 or 1")
    u = arr.astype(np.uint8).reshape(-1, n).copy()
    h = n // 2
    while h:
        v = u.reshape(u.shape[0], -1, 2, h)
        v[:, :, 0, :] ^= v[:, :, 1, :]
        h //= 2
    return u.reshape(arr.shape)


# ---------------------------------------------------------------- kernels

def _check(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    c0 = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
    c1 = a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0]
    out = np.stack((c0, c1), axis=-1)
    out /= (c0 + c1)[..., None]
    return out


def _var(a: np.ndarray, b: np.ndarray, v: np.ndarray):
    """Variable-node rule ``p(x) ~ a(x ^ v) b(x)``.

    Returns the normalized pairs and a boolean mask of zero normalizers.
    Those entries are replaced by (0.5, 0.5) so a batch can keep going.
    """
    flip = v.astype(bool)
    a0 = np.where(flip, a[..., 1], a[..., 0])
    a1 = np.where(flip, a[..., 0], a[..., 1])
    r0 = a0 * b[..., 0]
    r1 = a1 * b[..., 1]
    z = r0 + r1
    bad = z <= 0.0
    if bad.any():
        r0 = np.where(bad, 0.5, r0)
        r1 = np.where(bad, 0.5, r1)
        z = np.where(bad, 1.0, z)
    out = np.stack((r0 / z, r1 / z), axis=-1)
    return out, bad


def _as_pair(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,) or (arr < 0).any() or arr.sum() <= 0:
        raise InvalidInputError(f"not a probability pair: {p!r}")
    return arr / arr.sum()


def sc_check_combine(a, b) -> ProbPair:
    """Check-node combination: distribution of ``x1 ^ x2`` for independent bits."""
    out = _check(_as_pair(a), _as_pair(b))
    return ProbPair(float(out[0]), float(out[1]))


def sc_var_combine(a, b, u_prev: int) -> ProbPair:
    """Variable-node combination ``p(x) ~ a(x ^ u_prev) b(x)``.

    Raises ContradictionError when both products vanish.
    """
    if u_prev not in (0, 1):
        raise InvalidInputError(f"u_prev must be a bit, got {u_prev!r}")
    out, bad = _var(_as_pair(a), _as_pair(b), np.asarray(u_prev))
    if bad:
        raise ContradictionError(f"inputs {tuple(a)}, {tuple(b)} are inconsistent with u_prev={u_prev}")
    return ProbPair(float(out[0]), float(out[1]))


# ---------------------------------------------------------------- sweeps

def genie_posteriors(priors: np.ndarray, x: np.ndarray) -> np.ndarray:
    """All posteriors ``P(U_i | obs, U_1^{i-1} = u_1^{i-1})`` with ``u = T(x)`` known.

    Because every prefix is the true one, the whole tree is evaluated level
    by level without sequential decisions.  ``priors`` has shape (B, N, 2),
    ``x`` shape (B, N); the result has shape (B, N, 2) in u-index order.
    """
    priors = np.asarray(priors, dtype=float)
    d = genie_differences(priors[..., 0] - priors[..., 1], x)
    return np.stack(((1.0 + d) / 2.0, (1.0 - d) / 2.0), axis=-1)


def genie_differences(delta: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Same as genie_posteriors, carrying ``p0 - p1`` instead of pairs.

    With signed differences the check rule is a product and the variable
    rule ``(da' + db) / (1 + da' db)`` with ``da' = (-1)^v da``.
    """
    x = np.asarray(x, dtype=np.uint8)
    B, N = x.shape
    D = np.array(delta, dtype=float).reshape(B, N)
    Z = x.reshape(B, N).copy()
    n = N
    while n > 1:
        h = n // 2
        Dv = D.reshape(B, -1, 2, h)
        Zv = Z.reshape(B, -1, 2, h)
        da, db = Dv[:, :, 0], Dv[:, :, 1]
        zl = Zv[:, :, 0] ^ Zv[:, :, 1]
        sa = np.where(zl.astype(bool), -da, da)
        num = sa + db
        den = 1.0 + sa * db
        den[den == 0.0] = 1.0
        right = num / den
        left = da * db
        # interleave children: block j -> (left j, right j)
        D = np.empty_like(D)
        Do = D.reshape(B, -1, 2, h)
        Do[:, :, 0] = left
        Do[:, :, 1] = right
        Znew = np.empty_like(Z)
        Zo = Znew.reshape(B, -1, 2, h)
        Zo[:, :, 0] = zl
        Zo[:, :, 1] = Zv[:, :, 1]
        Z = Znew
        n = h
    return np.clip(D, -1.0, 1.0)


class SweepResult(NamedTuple):
    u: np.ndarray             # (B, N) decided bits
    x: np.ndarray             # (B, N) T(u)
    probs: np.ndarray         # (B, N, 2) posterior seen at each index
    contradiction: np.ndarray  # (B, N) prefix impossible by the time index i is reached


def sc_sweep(priors, mode, fixed=None, rng: np.random.Generator | None = None) -> SweepResult:
    """Successive-cancellation pass over a batch of blocks.

    ``mode[i]`` selects how ``u_i`` is set: FIXED takes ``fixed[:, i]``,
    SAMPLE draws from the posterior using ``rng``, ML picks 0 only when
    ``p0 > p1`` (ties go to 1).  Cost is O(N log N) per block.
    """
    priors = np.asarray(priors, dtype=float)
    if priors.ndim == 2:
        priors = priors[None]
    B, N, _ = priors.shape
    if not is_power_of_two(N):
        raise InvalidInputError(f"block length {N} is not a power of two")
    mode = np.asarray(mode)
    if mode.shape != (N,):
        raise InvalidInputError(f"mode has shape {mode.shape}, expected ({N},)")
    if fixed is None:
        fixed = np.zeros((B, N), dtype=np.uint8)
    fixed = np.broadcast_to(np.asarray(fixed, dtype=np.uint8), (B, N))
    if (mode == SAMPLE).any() and rng is None:
        raise InvalidInputError("sampling requested without a random generator")

    u = np.zeros((B, N), dtype=np.uint8)
    probs = np.empty((B, N, 2))
    contra = np.zeros((B, N), dtype=bool)
    flag = np.zeros(B, dtype=bool)
    modes = mode.tolist()

    def rec(P, off):
        nonlocal flag
        n = P.shape[1]
        if n == 1:
            p = P[:, 0]
            probs[:, off] = p
            contra[:, off] = flag
            m = modes[off]
            if m == FIXED:
                bit = fixed[:, off]
            elif m == SAMPLE:
                bit = (rng.random(B) < p[:, 1]).astype(np.uint8)
            else:
                bit = (~(p[:, 0] > p[:, 1])).astype(np.uint8)
            u[:, off] = bit
            return bit[:, None]
        h = n // 2
        a, b = P[:, :h], P[:, h:]
        xl = rec(_check(a, b), off)
        right, bad = _var(a, b, xl)
        flag = flag | bad.any(axis=1)
        xr = rec(right, off + h)
        return np.concatenate((xl ^ xr, xr), axis=1)

    x = rec(priors, 0)
    return SweepResult(u, x, probs, contra)


def sc_posterior(leaf_priors, u_prefix) -> ProbPair:
    """``P(U_i | observations, U_1^{i-1} = u_prefix)`` with ``i = len(u_prefix) + 1``."""
    pri = np.array([_as_pair(p) for p in leaf_priors])
    N = pri.shape[0]
    if not is_power_of_two(N):
        raise InvalidInputError(f"block length {N} is not a power of two")
    prefix = np.asarray(u_prefix, dtype=np.uint8).reshape(-1)
    i = prefix.size
    if i >= N:
        raise InvalidInputError(f"prefix of length {i} leaves no index in a block of {N}")
    if prefix.size and not np.isin(prefix, (0, 1)).all():
        raise InvalidInputError("prefix entries must be 0 or 1")
    fixed = np.zeros(N, dtype=np.uint8)
    fixed[:i] = prefix
    res = sc_sweep(pri[None], np.full(N, FIXED), fixed[None])
    if res.contradiction[0, i]:
        raise ContradictionError(f"prefix {prefix.tolist()} has zero probability")
    p = res.probs[0, i]
    return ProbPair(float(p[0]), float(p[1]))


def binary_entropy(p) -> np.ndarray:
    """H_b(p) in bits, elementwise, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    return (entr(p) + entr(1.0 - p)) / np.log(2)


def pair_entropy(pairs) -> np.ndarray:
    """Entropy in bits of probability pairs stored on the last axis."""
    pairs = np.asarray(pairs, dtype=float)
    return (entr(pairs[..., 0]) + entr(pairs[..., 1])) / np.log(2)
