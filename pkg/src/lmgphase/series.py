"""Squeezed-vacuum weights and the geometric-phase series.

The ground state of the quadratic boson Hamiltonian only populates even Fock
states |2n>, with probabilities proportional to

    a_n t^{2n},   a_n = (2n-1)!! / (2n)!!,   t = tanh x.

The geometric phase picked up by rotating the state by pi about the
quantization axis is pi * (1 - <2n>), where the average is taken over these
weights truncated at n = m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import PhaseResult

# Running renormalization interval for long weight tables.
RENORM_BLOCK = 10_000


def tanh_sq_from_epsilon(epsilon, one_minus_eps_sq=None):
    """Return tanh^2 x given epsilon = tanh 2x.

    ``one_minus_eps_sq`` may carry 1 - epsilon^2 computed without
    cancellation by the caller; near criticality that difference controls
    how close t^2 gets to 1.
    """
    return tanh_from_epsilon(epsilon, one_minus_eps_sq) ** 2


def tanh_from_epsilon(epsilon, one_minus_eps_sq=None):
    """Root t of epsilon*t^2 - 2t + epsilon = 0 with |t| <= 1."""
    epsilon = float(epsilon)
    if not abs(epsilon) <= 1.0:
        raise DomainError("epsilon", epsilon, "|epsilon| must not exceed 1")
    if one_minus_eps_sq is None:
        one_minus_eps_sq = (1.0 - epsilon) * (1.0 + epsilon)
    # t = (1 - sqrt(1 - eps^2)) / eps, rewritten to avoid cancellation
    return epsilon / (1.0 + math.sqrt(max(one_minus_eps_sq, 0.0)))


@dataclass(frozen=True)
class WeightTable:
    t_sq: float
    m: int
    weights: np.ndarray

    def mean_excitation(self) -> float:
        """Mean boson number <2n> under the weights."""
        return float(np.dot(2.0 * np.arange(self.m + 1), self.weights))


def _check(t_sq, m):
    t_sq = float(t_sq)
    if not 0.0 <= t_sq <= 1.0:
        raise DomainError("t_sq", t_sq, "must lie in [0, 1]")
    if int(m) != m or m < 0:
        raise DomainError("m", m, "truncation must be a non-negative integer")
    return t_sq, int(m)


def weight_table(t_sq, m) -> WeightTable:
    """Normalized weights w_n, n = 0..m, from the ratio
    w_n / w_{n-1} = t_sq (2n-1)/(2n)."""
    t_sq, m = _check(t_sq, m)
    weights = np.empty(m + 1)
    weights[0] = 1.0
    if t_sq == 0.0:
        weights[1:] = 0.0
        return WeightTable(t_sq, m, weights)

    total = 1.0
    last = 1.0
    for start in range(1, m + 1, RENORM_BLOCK):
        stop = min(start + RENORM_BLOCK, m + 1)
        n = np.arange(start, stop, dtype=float)
        block = last * np.cumprod(t_sq * (2.0 * n - 1.0) / (2.0 * n))
        weights[start:stop] = block
        total += block.sum()
        last = block[-1]
        # keep everything O(1) relative to the running sum
        weights[:stop] /= total
        last /= total
        total = 1.0
    weights /= weights.sum()
    return WeightTable(t_sq, m, weights)


def geometric_phase_series(t_sq, m) -> PhaseResult:
    """phi_g = pi (1 - <2n>) with weights truncated at n = m.

    Numerator and denominator are both taken with t^{2n}; this is the
    t^{2(n-1)} form multiplied through by t^2, so the ratio is unchanged for
    t != 0 and t = 0 gives the unsqueezed value phi_g = pi.
    """
    table = weight_table(t_sq, m)
    n_mean = table.mean_excitation()
    return PhaseResult(math.pi * (1.0 - n_mean), n_mean, table.m)


def untruncated_mean(t_sq) -> float:
    """sinh^2 x = t^2/(1 - t^2): the m -> infinity limit of the mean."""
    t_sq = float(t_sq)
    if not 0.0 <= t_sq < 1.0:
        raise DomainError("t_sq", t_sq, "closed form requires 0 <= t_sq < 1")
    return t_sq / (1.0 - t_sq)
