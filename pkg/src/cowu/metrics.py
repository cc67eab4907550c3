"""Closed-form coexistence metrics and the Round-Robin baseline.

The three CoWu metrics condition on the number of woken pull nodes ``w``, the
number of active push nodes ``u``, the pull packets ``r_w`` left over after
the reserved window and the number ``y`` of shared-window successes. The
``y``-dependent combinatorial weights do not depend on ``p``, ``L`` or
``alpha`` and are cached per population size; the chain distributions come
from :func:`cowu.chain.success_table`. Everything is then a handful of dense
contractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from cowu.chain import success_table
from cowu.core import (
    FrameSplit,
    QueryRange,
    SystemConfig,
    make_frame_split,
    push_activity_probability,
    wake_probability,
)
from cowu.errors import DomainError, InfeasibleError


@dataclass(frozen=True)
class MetricInputs:
    config: SystemConfig
    query: QueryRange
    split: FrameSplit

    @classmethod
    def for_alpha(cls, config: SystemConfig, query: QueryRange, alpha: float) -> "MetricInputs":
        return cls(config, query, make_frame_split(alpha, config.slots_per_frame))

    @property
    def p_wake(self) -> float:
        return wake_probability(self.config.observation, self.query)

    @property
    def p_lambda(self) -> float:
        return push_activity_probability(self.config.arrival_rate, self.config.slots_per_frame)


@dataclass(frozen=True)
class CoexistenceReport:
    gamma_w: float
    gamma_u: float
    e_tot: float


# -- scalar building blocks ---------------------------------------------------


def _binom_pmf(k: int, n: int, prob: float) -> float:
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= {k} <= {n}")
    return math.comb(n, k) * prob**k * (1.0 - prob) ** (n - k)


def pull_wake_pmf(w: int, N_w: int, P_w: float) -> float:
    """Probability that exactly ``w`` of ``N_w`` pull nodes wake up."""
    return _binom_pmf(w, N_w, P_w)


def push_active_pmf(u: int, N_u: int, p_lambda: float) -> float:
    """Probability that exactly ``u`` of ``N_u`` push nodes hold a packet."""
    return _binom_pmf(u, N_u, p_lambda)


def push_split_pmf(z_u: int, y: int, u: int, r_w: int) -> float:
    """Probability that ``z_u`` of ``y`` shared-window successes are push packets.

    Hypergeometric: ``y`` successes drawn uniformly from ``r_w + u`` contenders.
    """
    if min(z_u, y, u, r_w) < 0 or y > r_w + u:
        raise DomainError(f"invalid split arguments z_u={z_u}, y={y}, u={u}, r_w={r_w}")
    if z_u > u or z_u > y or y - z_u > r_w:
        return 0.0
    return math.comb(u, z_u) * math.comb(r_w, y - z_u) / math.comb(r_w + u, y)


def push_success_ratio(z_u: int, u: int) -> float:
    if z_u < 0 or z_u > u:
        raise DomainError(f"need 0 <= z_u <= u, got z_u={z_u}, u={u}")
    return 1.0 if u == 0 else z_u / u


def pull_complete_prob(r_w: int, y: int, u: int) -> float:
    """Probability that all ``r_w`` leftover pull packets are among ``y`` successes."""
    if min(r_w, y, u) < 0 or y > r_w + u:
        raise DomainError(f"invalid arguments r_w={r_w}, y={y}, u={u}")
    if y < r_w:
        return 0.0
    return math.comb(u, y - r_w) / math.comb(r_w + u, y)


def state_energy(s: int, config: SystemConfig) -> float:
    """Expected pull energy of one slot in which ``s`` nodes contend."""
    if s < 0:
        raise DomainError("state must be nonnegative")
    p, Ts = config.tx_prob, config.slot_duration
    total = 0.0
    for i in range(s + 1):
        e = i * Ts * config.power_tx + (s - i) * Ts * config.power_rx
        total += e * math.comb(s, i) * p**i * (1.0 - p) ** (s - i)
    return total


def shared_energy_weight(r_w: int, u: int) -> float:
    if r_w < 0 or u < 0:
        raise DomainError("counts must be nonnegative")
    return r_w / (r_w + u) if r_w + u > 0 else 0.0


# -- vectorized tables --------------------------------------------------------


def _binom_vector(n: int, prob: float) -> np.ndarray:
    return np.array([_binom_pmf(k, n, prob) for k in range(n + 1)])


@lru_cache(maxsize=8)
def _comb_table(n_max: int) -> np.ndarray:
    """``C[n, k]`` as floats, zero for ``k > n``."""
    C = np.zeros((n_max + 1, n_max + 1))
    for n in range(n_max + 1):
        C[n, : n + 1] = [math.comb(n, k) for k in range(n + 1)]
    return C


@lru_cache(maxsize=16)
def _shared_weights(rw_max: int, u_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-``y`` weights of the shared window, indexed ``[r_w, u, y]``.

    ``push[r_w, u, y] = sum_z P_beta(z | y, u, r_w) * ratio(z, u)`` and
    ``pull[r_w, u, y] = P_gamma(r_w | y, u, r_w)``; both are zero for
    ``y > r_w + u``.
    """
    y_max = rw_max + u_max
    C = _comb_table(y_max)
    rw = np.arange(rw_max + 1)[:, None]
    y = np.arange(y_max + 1)[None, :]
    push = np.zeros((rw_max + 1, u_max + 1, y_max + 1))
    pull = np.zeros_like(push)
    for u in range(u_max + 1):
        total = C[rw + u, y]  # C(r_w + u, y), zero where y > r_w + u
        valid = total > 0
        denom = np.where(valid, total, 1.0)
        acc = np.zeros((rw_max + 1, y_max + 1))
        for z in range(u + 1):
            k = y - z
            ways = np.where(k >= 0, C[rw, np.clip(k, 0, None)], 0.0)
            ratio = 1.0 if u == 0 else z / u
            acc += C[u, z] * ways / denom * ratio
        push[:, u, :] = np.where(valid, acc, 0.0)
        k = y - rw
        ways = np.where((k >= 0) & (k <= u), C[u, np.clip(k, 0, u)], 0.0)
        pull[:, u, :] = np.where(valid, ways / denom, 0.0)
    push.setflags(write=False)
    pull.setflags(write=False)
    return push, pull


def _psi_vector(J_max: int, config: SystemConfig) -> np.ndarray:
    return np.array([state_energy(s, config) for s in range(J_max + 1)])


def _window_energy(table, tau: int, psi: np.ndarray) -> np.ndarray:
    """Expected energy over the first ``tau`` slots, per chain size ``J``.

    Slot ``t`` (1-based) is charged with the state at its start, ``Phi(t-1)``.
    """
    if tau == 0:
        return np.zeros(table.J_max + 1)
    return table.phi[:tau].sum(axis=0) @ psi


def evaluate(inputs: MetricInputs) -> CoexistenceReport:
    """Compute ``gamma_w``, ``gamma_u`` and ``E_tot`` in one pass."""
    cfg = inputs.config
    Nw, Nu, L = cfg.n_pull, cfg.n_push, cfg.slots_per_frame
    tau_w, tau_u = inputs.split.reserved_len, inputs.split.shared_len
    table = success_table(Nw + Nu, L, cfg.tx_prob)

    Pd = _binom_vector(Nw, inputs.p_wake)
    Pu = _binom_vector(Nu, inputs.p_lambda)
    # leftover[w, r_w] = P_s(w - r_w | w, tau_w)
    leftover = table.remaining(tau_w)[: Nw + 1, : Nw + 1]

    rw = np.arange(Nw + 1)[:, None]
    u = np.arange(Nu + 1)[None, :]
    # shared[r_w, u, y] = P_s(y | r_w + u, tau_u)
    shared = table.successes(tau_u)[rw + u]
    push_w, pull_w = _shared_weights(Nw, Nu)

    g_u = np.einsum("ruy,ruy->ru", shared, push_w) @ Pu
    g_w = np.einsum("ruy,ruy->ru", shared, pull_w) @ Pu

    psi = _psi_vector(Nw + Nu, cfg)
    e_res = _window_energy(table, tau_w, psi)[: Nw + 1]
    J = rw + u
    weight = np.where(J > 0, rw / np.maximum(J, 1), 0.0)
    e_sh = (weight * _window_energy(table, tau_u, psi)[J]) @ Pu

    gamma_u = float(Pd @ leftover @ g_u)
    gamma_w = float(Pd @ leftover @ g_w)
    e_tot = float(Pd @ (e_res + leftover @ e_sh))
    return CoexistenceReport(
        gamma_w=min(max(gamma_w, 0.0), 1.0),
        gamma_u=min(max(gamma_u, 0.0), 1.0),
        e_tot=e_tot,
    )


def gamma_u(inputs: MetricInputs) -> float:
    """Push success probability."""
    return evaluate(inputs).gamma_u


def gamma_w(inputs: MetricInputs) -> float:
    """Pull retrieval accuracy: probability that every woken node delivers."""
    return evaluate(inputs).gamma_w


def pull_energy_total(inputs: MetricInputs) -> float:
    """Expected pull energy in one frame, joules."""
    return evaluate(inputs).e_tot


# -- Round-Robin baseline -----------------------------------------------------


def _check_rr(N_w: int, config: SystemConfig) -> None:
    if N_w > config.slots_per_frame:
        raise InfeasibleError(
            f"Round-Robin needs one slot per pull node: N_w={N_w} > L={config.slots_per_frame}"
        )


def rr_pull_energy(N_w: int, config: SystemConfig) -> float:
    _check_rr(N_w, config)
    return N_w * (config.slot_duration * config.power_tx)


def rr_gamma_u(N_w: int, config: SystemConfig) -> float:
    """Push success probability when pull nodes hold the first ``N_w`` slots."""
    _check_rr(N_w, config)
    Nu, L = config.n_push, config.slots_per_frame
    Pu = _binom_vector(Nu, push_activity_probability(config.arrival_rate, L))
    succ = success_table(Nu, L, config.tx_prob).successes(L - N_w)
    ratio = np.ones((Nu + 1, Nu + 1))
    ratio[1:] = np.arange(Nu + 1)[None, :] / np.arange(1, Nu + 1)[:, None]
    return float(Pu @ (succ * ratio).sum(axis=1))
