"""Classical binary channel as a which-way detector.

A sender ``q+-`` (probabilities ``w+-``) is read by a receiver ``d+-``
through a symmetric channel that flips the symbol with probability
``epsilon``. A bettor guessing the sender wins with likelihood
``(1 + D) / 2`` where ``D = max(P, Q)``.

Random numbers come from numpy's ``PCG64`` bit generator; shards of a Monte
Carlo run use child streams spawned from ``SeedSequence(seed)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .engine import ConventionError

#: Tolerance of the exact classical identities.
ATOL_EXACT = 1e-14


@dataclass(frozen=True)
class ChannelConfig:
    w_plus: float
    epsilon: float

    def __post_init__(self):
        for name in ("w_plus", "epsilon"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
            object.__setattr__(self, name, v)

    @property
    def w_minus(self) -> float:
        return 1.0 - self.w_plus

    def to_dict(self) -> dict:
        return {"w_plus": self.w_plus, "epsilon": self.epsilon}


class JointDistribution(NamedTuple):
    """Joint probabilities ``p(q, d)`` of sender and receiver symbols."""

    pp: float
    pm: float
    mp: float
    mm: float


def _max(x: float, y: float) -> float:
    # Max{x, y} = (x + y)/2 + |x - y|/2, checked against the builtin.
    via_identity = 0.5 * (x + y) + 0.5 * abs(x - y)
    m = max(x, y)
    if abs(via_identity - m) > ATOL_EXACT:
        raise ConventionError(f"max identity failed for ({x}, {y})")
    return m


def joint_distribution(cfg: ChannelConfig) -> JointDistribution:
    wp, wm, eps = cfg.w_plus, cfg.w_minus, cfg.epsilon
    return JointDistribution(wp * (1 - eps), wp * eps, wm * eps, wm * (1 - eps))


def predictability(cfg: ChannelConfig) -> float:
    """``|w+ - w-|``.

    Cross-checked against ``<P> = w+**2 + w-**2`` through
    ``P**2 = 2<P> - 1``; the squared form avoids the square root amplifying
    rounding when ``w+`` is close to 1/2.
    """
    p = abs(cfg.w_plus - cfg.w_minus)
    mean_prob = cfg.w_plus**2 + cfg.w_minus**2
    if abs(p**2 - (2 * mean_prob - 1)) > ATOL_EXACT:
        raise ConventionError("predictability disagrees with mean probability")
    return p


def predictability_from_mean_probability(cfg: ChannelConfig) -> float:
    """``sqrt(2<P> - 1)``, clipped at zero against rounding."""
    mean_prob = cfg.w_plus**2 + cfg.w_minus**2
    return float(np.sqrt(max(2 * mean_prob - 1, 0.0)))


def prior_likelihood(cfg: ChannelConfig) -> float:
    """Win rate when betting on the more probable sender symbol."""
    return _max(cfg.w_plus, cfg.w_minus)


def likelihood_from_distinguishability(D: float) -> float:
    if not 0.0 <= D <= 1.0:
        raise ValueError(f"distinguishability must lie in [0, 1], got {D}")
    return 0.5 * (1 + D)


def conditional_probabilities(cfg: ChannelConfig) -> dict:
    """``p(d | q)`` keyed by ``(d, q)`` with symbols ``+1``/``-1``."""
    eps = cfg.epsilon
    return {(1, 1): 1 - eps, (-1, -1): 1 - eps, (1, -1): eps, (-1, 1): eps}


def channel_quality(cfg: ChannelConfig) -> float:
    """``|p(d|q+) - p(d|q-)| = |1 - 2 epsilon|``."""
    cond = conditional_probabilities(cfg)
    return abs(cond[(1, 1)] - cond[(1, -1)])


def receiver_marginals(cfg: ChannelConfig) -> tuple[float, float]:
    j = joint_distribution(cfg)
    return j.pp + j.mp, j.pm + j.mm


def receiver_expectation(cfg: ChannelConfig, f_plus: float, f_minus: float) -> float:
    """Mean of a receiver property taking values ``f_plus``/``f_minus``."""
    p_plus, p_minus = receiver_marginals(cfg)
    return f_plus * p_plus + f_minus * p_minus


def posterior_likelihood(cfg: ChannelConfig) -> float:
    """Win rate when betting on the sender symbol most likely given ``d``."""
    j = joint_distribution(cfg)
    return _max(j.pp, j.mp) + _max(j.pm, j.mm)


def total_distinguishability(cfg: ChannelConfig) -> float:
    """``max(P, Q)``, which equals ``2 L - 1`` for the posterior bet."""
    d = max(predictability(cfg), channel_quality(cfg))
    if abs(likelihood_from_distinguishability(d) - posterior_likelihood(cfg)) > ATOL_EXACT:
        raise ConventionError("D = max(P, Q) inconsistent with posterior likelihood")
    return d


def map_guess(cfg: ChannelConfig) -> tuple[int, int]:
    """Guessed sender symbol after reading ``d+`` and ``d-``.

    Ties go to the guess consistent with the readout (``q+`` on ``d+``).
    """
    j = joint_distribution(cfg)
    on_plus = 1 if j.pp >= j.mp else -1
    on_minus = -1 if j.mm >= j.pm else 1
    return on_plus, on_minus


def _bet_wins(cfg: ChannelConfig, n: int, rng: np.random.Generator) -> int:
    sender_plus = rng.random(n) < cfg.w_plus
    flipped = rng.random(n) < cfg.epsilon
    read_plus = sender_plus ^ flipped
    on_plus, on_minus = map_guess(cfg)
    guess_plus = np.where(read_plus, on_plus == 1, on_minus == 1)
    return int(np.count_nonzero(guess_plus == sender_plus))


def monte_carlo_bet(cfg: ChannelConfig, n_trials: int, seed: int | Sequence[int] = 0,
                    shards: int = 1) -> float:
    """Fraction of ``n_trials`` simulated bets won by the MAP bettor.

    Trials are split evenly over ``shards`` child streams of
    ``SeedSequence(seed)``; for fixed ``(seed, shards)`` the result is
    reproducible whatever order the shards are run in. ``seed`` may be a
    sequence of integers, e.g. ``(run_seed, config_index)``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    if shards < 1:
        raise ValueError("shards must be at least 1")
    children = np.random.SeedSequence(seed).spawn(shards)
    sizes = [n_trials // shards + (k < n_trials % shards) for k in range(shards)]
    wins = sum(
        _bet_wins(cfg, size, np.random.Generator(np.random.PCG64(child)))
        for size, child in zip(sizes, children))
    return wins / n_trials


def binomial_bound(likelihood: float, n_trials: int, n_sigma: float = 3.0) -> float:
    return n_sigma * float(np.sqrt(likelihood * (1 - likelihood) / n_trials))
