"""Independent reference computations used only by the tests.

None of these touch the Markov-chain propagation or the vectorized tables in
the package: they enumerate random outcomes directly.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

from cowu.core import make_frame_split
from cowu.metrics import (
    pull_complete_prob,
    pull_wake_pmf,
    push_active_pmf,
    push_split_pmf,
    push_success_ratio,
    shared_energy_weight,
    state_energy,
)


def enumerate_successes(J: int, zeta: int, p: float) -> list[float]:
    """Distribution of the number of successes of ``J`` contenders in ``zeta`` slots.

    Walks every sequence of per-slot transmitter counts ``k`` (binomially
    distributed given the number still waiting); a slot succeeds iff ``k == 1``.
    """
    dist = [0.0] * (J + 1)

    def walk(slot, waiting, prob):
        if prob == 0.0:
            return
        if slot == zeta:
            dist[J - waiting] += prob
            return
        for k in range(waiting + 1):
            pk = math.comb(waiting, k) * p**k * (1 - p) ** (waiting - k)
            walk(slot + 1, waiting - 1 if k == 1 else waiting, prob * pk)

    walk(0, J, 1.0)
    return dist


def enumerate_frame(n_pull, n_push, L, alpha, p, p_wake, p_lambda, Ts=3.2e-3, xi_t=55e-3, xi_r=50e-3):
    """Exact ``(gamma_w, gamma_u, E_tot)`` by enumerating every random outcome.

    Covers wake-ups, push activity and the transmit/silent choice of every
    contending node in every slot. Node identities are tracked explicitly.
    """
    split = make_frame_split(alpha, L)
    pulls = tuple(range(n_pull))

    @lru_cache(maxsize=None)
    def value(t, pending):
        """Expected (all pulls delivered, push deliveries, pull energy) from slot t."""
        if t == L:
            done = not any(n in pulls for n in pending)
            return (1.0 if done else 0.0), 0.0, 0.0
        eligible = [n for n in pending if n in pulls or t >= split.reserved_len]
        acc = [0.0, 0.0, 0.0]
        for pattern in itertools.product((0, 1), repeat=len(eligible)):
            k = sum(pattern)
            prob = p**k * (1 - p) ** (len(eligible) - k)
            if prob == 0.0:
                continue
            energy = sum(
                Ts * (xi_t if tx else xi_r) for n, tx in zip(eligible, pattern) if n in pulls
            )
            nxt, push_win = pending, 0.0
            if k == 1:
                winner = eligible[pattern.index(1)]
                nxt = tuple(n for n in pending if n != winner)
                push_win = 0.0 if winner in pulls else 1.0
            a, z, e = value(t + 1, nxt)
            acc[0] += prob * a
            acc[1] += prob * (z + push_win)
            acc[2] += prob * (e + energy)
        return tuple(acc)

    gw = gu = et = 0.0
    for woken in itertools.product((0, 1), repeat=n_pull):
        pw = math.prod(p_wake if b else 1 - p_wake for b in woken)
        for active in itertools.product((0, 1), repeat=n_push):
            pa = math.prod(p_lambda if b else 1 - p_lambda for b in active)
            if pw * pa == 0.0:
                continue
            pending = tuple(i for i, b in enumerate(woken) if b) + tuple(
                n_pull + j for j, b in enumerate(active) if b
            )
            a, z, e = value(0, pending)
            u = sum(active)
            gw += pw * pa * a
            gu += pw * pa * (1.0 if u == 0 else z / u)
            et += pw * pa * e
    return gw, gu, et


def literal_metrics(config, p_wake, p_lambda, tau_w, tau_u, pmf):
    """The three metrics as the literal nested sums, using scalar building blocks.

    ``pmf(j, J, zeta)`` supplies the chain success distribution.
    """
    Nw, Nu = config.n_pull, config.n_push
    gu = gw = et = 0.0

    def window_energy(J, tau):
        return sum(
            sum(pmf(J - s, J, t) * state_energy(s, config) for s in range(J + 1)) for t in range(tau)
        )

    for w in range(Nw + 1):
        pd = pull_wake_pmf(w, Nw, p_wake)
        et += pd * window_energy(w, tau_w)
        for u in range(Nu + 1):
            pu = push_active_pmf(u, Nu, p_lambda)
            for rw in range(w + 1):
                pr = pmf(w - rw, w, tau_w)
                et += pd * pu * pr * shared_energy_weight(rw, u) * window_energy(rw + u, tau_u)
                for y in range(rw + u + 1):
                    py = pmf(y, rw + u, tau_u)
                    inner = sum(
                        push_split_pmf(z, y, u, rw) * push_success_ratio(z, u)
                        for z in range(min(u, y) + 1)
                    )
                    gu += pd * pu * pr * py * inner
                    if y >= rw:
                        gw += pd * pu * pr * py * pull_complete_prob(rw, y, u)
    return gw, gu, et
