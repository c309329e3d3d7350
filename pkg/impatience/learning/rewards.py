"""Behavioral rewards, discounted returns and the greedy policy."""
from collections.abc import Sequence

from scipy.special import expit

from impatience.schemas.policy import PolicyState

RENEGE = 0
JOCKEY = 1


def reward(state: PolicyState, action: int, pi: float, tau: float = 1.0) -> float:
    """Probability-weighted sigmoid reward of renege (0) or jockey (1).

    Renege pays off when the expected wait ``k_i / mu_i`` exceeds the patience, jockeying when it
    exceeds the expected wait ``k_j / mu_j`` of the other queue. ``tau = 1`` is the unscaled form.
    """
    if not 0.0 <= pi <= 1.0:
        raise ValueError(f"action probability must lie in [0, 1], got {pi}")
    if state.mu_i == 0.0 or state.mu_j == 0.0:
        raise ValueError("service rates must be non-zero")
    own_wait = state.k_i / state.mu_i
    if action == RENEGE:
        gap = own_wait - state.T
    elif action == JOCKEY:
        gap = own_wait - state.k_j / state.mu_j
    else:
        raise ValueError(f"unknown action {action}")
    return pi * float(expit(tau * gap))


def discounted_return(rewards: Sequence[float], gamma: float) -> float:
    """``sum_k gamma^k r_k`` accumulated backward in one pass."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    total = 0.0
    for value in reversed(rewards):
        total = value + gamma * total
    return total


def greedy_action(q_renege: float, q_jockey: float) -> int:
    """``argmax_a Q(s, a)``; ties go to renege."""
    return JOCKEY if q_jockey > q_renege else RENEGE
