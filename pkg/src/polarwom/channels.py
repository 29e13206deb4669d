"""WOM cell-state source model, noisy read channels and information quantities."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polar import InvalidInputError, as_bitblock, binary_entropy, is_power_of_two


@dataclass(frozen=True)
class WomSourceModel:
    """Prior cell states ``P(S=0) = beta`` and write law ``P(X=0 | S=1) = gamma``.

    A cell at 0 cannot be raised, so ``X = 0`` whenever ``S = 0``.
    """

    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("beta", "gamma"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise InvalidInputError(f"{name} must lie strictly inside (0, 1), got {v}")

    @property
    def p_x0(self) -> float:
        """Marginal ``P(X = 0)``."""
        return self.beta + (1.0 - self.beta) * self.gamma

    @property
    def h_x_given_s(self) -> float:
        return float((1.0 - self.beta) * binary_entropy(self.gamma))

    def joint_sx(self) -> np.ndarray:
        """2x2 table ``P(S=s, X=x)``."""
        b, g = self.beta, self.gamma
        return np.array([[b, 0.0], [(1 - b) * g, (1 - b) * (1 - g)]])


@dataclass(frozen=True)
class ReadChannel:
    """Discrete memoryless channel; row ``x`` of ``transition`` is ``P(Y=. | X=x)``."""

    transition: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.array(self.transition, dtype=float)
        if t.ndim != 2 or t.shape[0] != 2 or t.shape[1] < 2:
            raise InvalidInputError(f"transition must be a 2 x |Y| matrix with |Y| >= 2, got shape {t.shape}")
        if (t < 0).any() or not np.allclose(t.sum(axis=1), 1.0, rtol=0, atol=1e-12):
            raise InvalidInputError("transition rows must be nonnegative and sum to 1")
        t.setflags(write=False)
        object.__setattr__(self, "transition", t)

    @property
    def output_alphabet_size(self) -> int:
        return self.transition.shape[1]

    @classmethod
    def bsc(cls, p: float) -> "ReadChannel":
        return cls(np.array([[1 - p, p], [p, 1 - p]]))

    @classmethod
    def bac(cls, p01: float, p10: float) -> "ReadChannel":
        """Binary asymmetric channel: ``p01 = P(Y=1|X=0)``, ``p10 = P(Y=0|X=1)``."""
        return cls(np.array([[1 - p01, p01], [p10, 1 - p10]]))

    @classmethod
    def identity(cls) -> "ReadChannel":
        return cls.bsc(0.0)

    def __eq__(self, other):
        return isinstance(other, ReadChannel) and np.array_equal(self.transition, other.transition)

    def __hash__(self):
        return hash(self.transition.tobytes())


def model_from_spec(spec: dict) -> WomSourceModel:
    return WomSourceModel(float(spec["beta"]), float(spec["gamma"]))


def channel_from_spec(spec: dict) -> ReadChannel:
    """Build a channel from ``{"kind": "bsc"|"bac"|"matrix", ...}``."""
    kind = spec.get("kind")
    if kind == "bsc":
        return ReadChannel.bsc(float(spec["p"]))
    if kind == "bac":
        return ReadChannel.bac(float(spec["p01"]), float(spec["p10"]))
    if kind == "matrix":
        return ReadChannel(np.asarray(spec["transition"], dtype=float))
    raise InvalidInputError(f"unknown channel kind {kind!r}")


# ---------------------------------------------------------------- samplers

def sample_source_block(model: WomSourceModel, N: int, rng: np.random.Generator, size: int | None = None):
    """Draw i.i.d. ``(s, x)`` pairs; ``size`` adds a leading batch axis."""
    if not is_power_of_two(N):
        raise InvalidInputError(f"block length {N} is not a power of two")
    shape = (N,) if size is None else (size, N)
    s = (rng.random(shape) >= model.beta).astype(np.uint8)
    x = s & (rng.random(shape) >= model.gamma).astype(np.uint8)
    return s, x


def transmit(x, ch: ReadChannel, rng: np.random.Generator) -> np.ndarray:
    """Pass bits through the channel, one independent draw per position."""
    x = np.asarray(x, dtype=np.intp)
    cdf = np.cumsum(ch.transition, axis=1)
    cdf[:, -1] = 1.0
    r = rng.random(x.shape)
    rows = cdf[x]
    return (r[..., None] >= rows).sum(axis=-1).astype(np.intp)


# ---------------------------------------------------------------- leaf priors

def leaf_priors_from_state(model: WomSourceModel, s) -> np.ndarray:
    """``P(X_i | S_i = s_i)`` per position as (..., N, 2) pairs."""
    s = np.asarray(s)
    out = np.empty(s.shape + (2,))
    on = s.astype(bool)
    out[..., 0] = np.where(on, model.gamma, 1.0)
    out[..., 1] = np.where(on, 1.0 - model.gamma, 0.0)
    return out


def observation_posterior_table(model: WomSourceModel, ch: ReadChannel) -> np.ndarray:
    """Row ``y`` holds ``P(X = . | Y = y)``; NaN rows mark symbols of zero evidence."""
    prior = np.array([model.p_x0, 1.0 - model.p_x0])
    joint = (prior[:, None] * ch.transition).T
    z = joint.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        return joint / z


def leaf_priors_from_observation(model: WomSourceModel, ch: ReadChannel, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.intp)
    if y.size and (y.min() < 0 or y.max() >= ch.output_alphabet_size):
        raise InvalidInputError("received symbol outside the channel alphabet")
    table = observation_posterior_table(model, ch)
    out = table[y]
    if np.isnan(out).any():
        raise InvalidInputError("observed a symbol with zero likelihood under both inputs")
    return out


# ---------------------------------------------------------------- information

def mutual_info_xs(model: WomSourceModel) -> float:
    """I(X;S) in bits."""
    return float(binary_entropy(model.p_x0) - (1.0 - model.beta) * binary_entropy(model.gamma))


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def mutual_info_xy(model: WomSourceModel, ch: ReadChannel) -> float:
    """I(X;Y) in bits from the joint input/output table."""
    prior = np.array([model.p_x0, 1.0 - model.p_x0])
    joint = prior[:, None] * ch.transition
    h_y = _entropy(joint.sum(axis=0))
    h_y_given_x = sum(prior[x] * _entropy(ch.transition[x]) for x in (0, 1))
    return max(h_y - h_y_given_x, 0.0)


def h_x_given_y(model: WomSourceModel, ch: ReadChannel) -> float:
    return float(binary_entropy(model.p_x0)) - mutual_info_xy(model, ch)


def less_noisy_condition(model: WomSourceModel, ch: ReadChannel) -> tuple[bool, float]:
    """Whether the read channel is less noisy than the state channel, and the margin in bits."""
    margin = mutual_info_xy(model, ch) - mutual_info_xs(model)
    return margin >= 0.0, margin
