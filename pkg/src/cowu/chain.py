"""Absorbing Markov chain for slotted p-persistent contention.

The state is the number of packets still waiting. In each slot, every waiting
node transmits with probability ``p``; the slot succeeds (state ``s -> s-1``)
iff exactly one node transmits. State 0 is absorbing.

The transition matrix is lower-bidiagonal, so it is never materialized: each
step is one sweep over the state vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from cowu.errors import DomainError


def transition_success_prob(s: int, p: float) -> float:
    """``s p (1-p)^(s-1)``: probability that exactly one of ``s`` nodes transmits."""
    if s < 0:
        raise DomainError("state must be nonnegative")
    if s == 0:
        return 0.0
    return s * p * (1.0 - p) ** (s - 1)


def _success_vector(J: int, p: float) -> np.ndarray:
    s = np.arange(J + 1, dtype=float)
    return s * p * (1.0 - p) ** np.maximum(s - 1.0, 0.0)


@dataclass(frozen=True)
class ContentionChain:
    max_packets: int
    tx_prob: float

    def __post_init__(self):
        if self.max_packets < 0:
            raise DomainError("max_packets must be nonnegative")
        if not 0.0 < self.tx_prob <= 1.0:
            raise DomainError("tx_prob must lie in (0, 1]")

    @property
    def success(self) -> np.ndarray:
        """Per-state success probabilities ``p_{s,s-1}``, indexed by ``s``."""
        return _success_vector(self.max_packets, self.tx_prob)

    def matrix(self) -> np.ndarray:
        """Dense transition matrix, rows/columns indexed by state ``s``.

        Only for inspection and tests; propagation never builds it.
        """
        q = self.success
        R = np.diag(1.0 - q)
        R[np.arange(1, self.max_packets + 1), np.arange(self.max_packets)] = q[1:]
        return R


@dataclass(frozen=True)
class StateDistribution:
    """Distribution over remaining-packet counts after ``elapsed_steps`` slots.

    ``probs[s]`` is the probability that ``s`` packets remain.
    """

    probs: np.ndarray
    elapsed_steps: int

    def __getitem__(self, s: int) -> float:
        return float(self.probs[s])


def _step(phi: np.ndarray, q: np.ndarray) -> np.ndarray:
    nxt = phi * (1.0 - q)
    nxt[..., :-1] += phi[..., 1:] * q[1:]
    return nxt


def propagate(chain: ContentionChain, steps: int) -> StateDistribution:
    if steps < 0:
        raise DomainError("steps must be nonnegative")
    q = chain.success
    phi = np.zeros(chain.max_packets + 1)
    phi[-1] = 1.0
    for _ in range(steps):
        phi = _step(phi, q)
    return StateDistribution(phi, steps)


def success_pmf(j: int, J: int, zeta: int, p: float = 0.0606) -> float:
    """Probability that exactly ``j`` of ``J`` packets get through in ``zeta`` slots."""
    if not 0 <= j <= J:
        raise DomainError(f"need 0 <= j <= J, got j={j}, J={J}")
    return propagate(ContentionChain(J, p), zeta)[J - j]


class SuccessTable:
    """Transient distributions for every chain size up to ``J_max``.

    ``phi[t, J, s]`` is the probability that a chain started with ``J`` packets
    holds ``s`` packets after ``t`` slots (zero for ``s > J``). All start sizes
    share one transition rule, so they are propagated together.
    """

    def __init__(self, J_max: int, zeta_max: int, p: float):
        if J_max < 0 or zeta_max < 0:
            raise DomainError("J_max and zeta_max must be nonnegative")
        self.J_max = J_max
        self.zeta_max = zeta_max
        self.p = p
        q = _success_vector(J_max, p)
        phi = np.empty((zeta_max + 1, J_max + 1, J_max + 1))
        phi[0] = np.eye(J_max + 1)
        for t in range(zeta_max):
            phi[t + 1] = _step(phi[t], q)
        phi.setflags(write=False)
        self.phi = phi

    def lookup(self, j: int, J: int, t: int) -> float:
        """``P_s(j | J, t)``."""
        if not 0 <= j <= J:
            raise DomainError(f"need 0 <= j <= J, got j={j}, J={J}")
        return float(self.phi[t, J, J - j])

    def trajectory(self, J: int) -> np.ndarray:
        """``Phi(0..zeta_max)`` for a chain of size ``J``; shape ``(zeta_max+1, J+1)``."""
        return self.phi[:, J, : J + 1]

    def remaining(self, t: int) -> np.ndarray:
        """``[J, s]`` matrix of remaining-count distributions after ``t`` slots."""
        return self.phi[t]

    def successes(self, t: int) -> np.ndarray:
        """``[J, j]`` matrix of ``P_s(j | J, t)`` (zero for ``j > J``)."""
        rem = self.phi[t]
        out = np.zeros_like(rem)
        for J in range(self.J_max + 1):
            out[J, : J + 1] = rem[J, J::-1]
        return out


@lru_cache(maxsize=64)
def success_table(J_max: int, zeta_max: int, p: float) -> SuccessTable:
    return SuccessTable(J_max, zeta_max, p)
