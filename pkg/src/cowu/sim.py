"""Frame-level Monte Carlo simulator of the coexistence protocol.

Frames are independent. Every frame consumes a fixed block of uniforms laid
out as::

    [ pull observations (N_w) | push activity (N_u) | slot x node tx draws (L * (N_w+N_u)) ]

padded to a multiple of four. Frame ``i`` reads block ``i`` of a single
Philox stream keyed by the master seed, so a frame's randomness is a pure
function of ``(master_seed, i)``: results do not depend on chunking or on how
many worker threads run the campaign.

Carrier sensing is not modelled separately: with slot-aligned, one-slot
packets the channel is always idle at a slot boundary, so the access rule
reduces to slotted p-persistence.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from cowu.core import (
    FrameSplit,
    QueryRange,
    SystemConfig,
    make_frame_split,
    push_activity_probability,
)
from cowu.errors import InfeasibleError

DEFAULT_FRAMES = 50_000
_CHUNK = 1024


@dataclass(frozen=True)
class FrameOutcome:
    woken: int
    push_active: int
    pull_success_slots: tuple[tuple[int, int], ...]  # (pull node, 1-based slot)
    push_successes: int
    pull_energy: float
    accuracy_indicator: bool
    push_ratio: float
    tx_slots: int = 0
    listen_slots: int = 0


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float  # nan for a single frame

    def __iter__(self):
        yield self.mean
        yield self.stderr


@dataclass(frozen=True)
class SimEstimates:
    frames: int
    gamma_w: Estimate
    gamma_u: Estimate
    e_tot: Estimate
    master_seed: int


def draws_per_frame(config: SystemConfig) -> int:
    n = config.n_pull + config.n_push
    raw = n + config.slots_per_frame * n
    return 4 * math.ceil(raw / 4) if raw else 4


def _philox_key(master_seed: int) -> np.ndarray:
    return np.random.SeedSequence(master_seed).generate_state(2, dtype=np.uint64)


def frame_rng(master_seed: int, frame: int, config: SystemConfig) -> np.random.Generator:
    """Generator positioned at the start of frame ``frame``'s block."""
    bg = np.random.Philox(key=_philox_key(master_seed))
    bg.advance(frame * draws_per_frame(config) // 4)
    return np.random.Generator(bg)


def _block_uniforms(master_seed: int, start: int, count: int, config: SystemConfig) -> np.ndarray:
    D = draws_per_frame(config)
    return frame_rng(master_seed, start, config).random((count, D))


@dataclass
class _Block:
    """Per-frame results for a contiguous run of frames."""

    woken: np.ndarray
    push_active: np.ndarray
    pull_successes: np.ndarray
    push_successes: np.ndarray
    tx_slots: np.ndarray
    listen_slots: np.ndarray
    success_slot: np.ndarray  # [frame, pull node], 0 = never


def _contend(pending, eligible_from, is_pull, tx_u, p, L):
    """Run ``L`` slots of slotted p-persistent access on a batch of frames.

    ``pending`` (frames x nodes) marks nodes holding a packet; node ``k`` may
    transmit only from 0-based slot ``eligible_from[k]`` on.
    """
    pending = pending.copy()
    B, N = pending.shape
    n_pull = int(is_pull.sum())
    tx_slots = np.zeros(B, dtype=np.int64)
    listen = np.zeros(B, dtype=np.int64)
    success_slot = np.zeros((B, n_pull), dtype=np.int64)
    for t in range(L):
        contending = pending & (eligible_from <= t)
        if not contending.any():
            continue
        tx = contending & (tx_u[:, t, :] < p)
        winners = tx & (tx.sum(axis=1) == 1)[:, None]
        ptx = tx[:, :n_pull].sum(axis=1)
        tx_slots += ptx
        listen += contending[:, :n_pull].sum(axis=1) - ptx
        success_slot[winners[:, :n_pull]] = t + 1
        pending &= ~winners
    return pending, tx_slots, listen, success_slot


def _simulate_block(config: SystemConfig, query: QueryRange, split: FrameSplit, U: np.ndarray) -> _Block:
    Nw, Nu, L = config.n_pull, config.n_push, config.slots_per_frame
    N = Nw + Nu
    obs = config.observation.ppf(U[:, :Nw])
    woken = (obs >= query.lower) & (obs <= query.upper)
    p_lam = push_activity_probability(config.arrival_rate, L)
    active = U[:, Nw:N] < p_lam
    tx_u = U[:, N : N + L * N].reshape(U.shape[0], L, N)

    pending = np.concatenate([woken, active], axis=1)
    eligible = np.concatenate(
        [np.zeros(Nw, dtype=np.int64), np.full(Nu, split.reserved_len, dtype=np.int64)]
    )
    is_pull = np.arange(N) < Nw
    left, tx_slots, listen, success_slot = _contend(pending, eligible, is_pull, tx_u, config.tx_prob, L)
    w = woken.sum(axis=1)
    u = active.sum(axis=1)
    return _Block(
        woken=w,
        push_active=u,
        pull_successes=w - left[:, :Nw].sum(axis=1),
        push_successes=u - left[:, Nw:].sum(axis=1),
        tx_slots=tx_slots,
        listen_slots=listen,
        success_slot=success_slot,
    )


def _simulate_rr_block(config: SystemConfig, U: np.ndarray) -> _Block:
    Nw, Nu, L = config.n_pull, config.n_push, config.slots_per_frame
    N = Nw + Nu
    p_lam = push_activity_probability(config.arrival_rate, L)
    active = U[:, Nw:N] < p_lam
    tx_u = U[:, N : N + L * N].reshape(U.shape[0], L, N)[:, :, Nw:]
    eligible = np.full(Nu, Nw, dtype=np.int64)
    no_pull = np.zeros(Nu, dtype=bool)
    left, _, _, _ = _contend(active, eligible, no_pull, tx_u, config.tx_prob, L)
    B = U.shape[0]
    u = active.sum(axis=1)
    return _Block(
        woken=np.full(B, Nw),
        push_active=u,
        pull_successes=np.full(B, Nw),
        push_successes=u - left.sum(axis=1),
        tx_slots=np.full(B, Nw, dtype=np.int64),
        listen_slots=np.zeros(B, dtype=np.int64),
        success_slot=np.tile(np.arange(1, Nw + 1), (B, 1)),
    )


def _energy(config: SystemConfig, tx_slots, listen_slots):
    Ts = config.slot_duration
    return tx_slots * (Ts * config.power_tx) + listen_slots * (Ts * config.power_rx)


def _push_ratio(z, u):
    return np.where(u > 0, z / np.maximum(u, 1), 1.0)


def run_frame(
    config: SystemConfig,
    query: QueryRange,
    split: FrameSplit,
    rng: np.random.Generator,
) -> FrameOutcome:
    """Simulate one frame, drawing its block of uniforms from ``rng``."""
    U = rng.random((1, draws_per_frame(config)))
    b = _simulate_block(config, query, split, U)
    slots = b.success_slot[0]
    w, u, z = int(b.woken[0]), int(b.push_active[0]), int(b.push_successes[0])
    return FrameOutcome(
        woken=w,
        push_active=u,
        pull_success_slots=tuple((n, int(s)) for n, s in enumerate(slots) if s > 0),
        push_successes=z,
        pull_energy=float(_energy(config, b.tx_slots, b.listen_slots)[0]),
        accuracy_indicator=bool(b.pull_successes[0] == w),
        push_ratio=1.0 if u == 0 else z / u,
        tx_slots=int(b.tx_slots[0]),
        listen_slots=int(b.listen_slots[0]),
    )


def _estimate(samples: np.ndarray) -> Estimate:
    n = samples.size
    mean = float(np.mean(samples))
    se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return Estimate(mean, se)


def _run_blocks(fn, config, frames, master_seed, workers):
    starts = range(0, frames, _CHUNK)

    def job(start):
        count = min(_CHUNK, frames - start)
        return fn(_block_uniforms(master_seed, start, count, config))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(job, starts))
    else:
        blocks = [job(s) for s in starts]
    return {k: np.concatenate([getattr(b, k) for b in blocks]) for k in _Block.__dataclass_fields__}


def _summarize(config, cols, frames, master_seed) -> SimEstimates:
    accuracy = (cols["pull_successes"] == cols["woken"]).astype(float)
    ratio = _push_ratio(cols["push_successes"], cols["push_active"])
    energy = _estimate(_energy(config, cols["tx_slots"], cols["listen_slots"]))
    # mean from the integer slot counts so deterministic schedules come out exact
    mean_energy = float(_energy(config, cols["tx_slots"].sum() / frames, cols["listen_slots"].sum() / frames))
    return SimEstimates(
        frames=frames,
        gamma_w=_estimate(accuracy),
        gamma_u=_estimate(ratio),
        e_tot=Estimate(mean_energy, energy.stderr),
        master_seed=master_seed,
    )


def run_campaign(
    config: SystemConfig,
    query: QueryRange,
    alpha: float,
    frames: int = DEFAULT_FRAMES,
    master_seed: int = 0,
    workers: int | None = None,
) -> SimEstimates:
    """Monte Carlo estimates of ``gamma_w``, ``gamma_u`` and ``E_tot``.

    Push ratios of frames without active push nodes count as 1, so
    ``gamma_u`` is a per-frame average, not a packet-weighted one.
    """
    if frames < 1:
        raise ValueError("frames must be >= 1")
    split = make_frame_split(alpha, config.slots_per_frame)
    cols = _run_blocks(
        lambda U: _simulate_block(config, query, split, U), config, frames, master_seed, workers
    )
    return _summarize(config, cols, frames, master_seed)


def run_rr_campaign(
    config: SystemConfig,
    frames: int = DEFAULT_FRAMES,
    master_seed: int = 0,
    workers: int | None = None,
) -> SimEstimates:
    """Round-Robin baseline: TDMA pull phase, then push contention."""
    if config.n_pull > config.slots_per_frame:
        raise InfeasibleError(
            f"Round-Robin needs N_w <= L, got N_w={config.n_pull}, L={config.slots_per_frame}"
        )
    if frames < 1:
        raise ValueError("frames must be >= 1")
    cols = _run_blocks(lambda U: _simulate_rr_block(config, U), config, frames, master_seed, workers)
    return _summarize(config, cols, frames, master_seed)
