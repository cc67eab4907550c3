"""Grid searches over the frame split ``alpha`` and push arrival rate ``lambda``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from cowu.core import QueryRange, SystemConfig
from cowu.errors import DomainError
from cowu.metrics import MetricInputs, evaluate, rr_gamma_u, rr_pull_energy

ENERGY_TIE_TOL = 1e-12


def index_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Grid ``start + k*step`` built from the integer index ``k``.

    Values are rounded to 12 decimals so that e.g. ``7 * 0.05`` is stored as
    ``0.35``, which keeps ``floor(alpha * L)`` stable.
    """
    n = int(round((stop - start) / step))
    return tuple(round(start + k * step, 12) for k in range(n + 1))


@dataclass(frozen=True)
class GridSpec:
    alpha_values: tuple[float, ...] = field(default_factory=lambda: index_grid(0.0, 1.0, 0.05))
    lambda_values: tuple[float, ...] = field(default_factory=lambda: index_grid(0.005, 0.05, 0.005))
    gamma_th: float = 0.8

    def __post_init__(self):
        a = tuple(float(x) for x in self.alpha_values)
        lam = tuple(float(x) for x in self.lambda_values)
        object.__setattr__(self, "alpha_values", a)
        object.__setattr__(self, "lambda_values", lam)
        if list(a) != sorted(a) or list(lam) != sorted(lam):
            raise DomainError("grid values must be sorted ascending")
        if a and (a[0] < 0 or a[-1] > 1):
            raise DomainError("alpha values must lie in [0, 1]")
        if lam and lam[0] < 0:
            raise DomainError("lambda values must be nonnegative")
        if not 0 <= self.gamma_th <= 1:
            raise DomainError("gamma_th must be a probability")


@dataclass(frozen=True)
class SweepResult:
    """Metric surfaces indexed ``[lambda_index, alpha_index]``."""

    grid: GridSpec
    gamma_w: np.ndarray
    gamma_u: np.ndarray
    e_tot: np.ndarray

    @property
    def feasible(self) -> np.ndarray:
        th = self.grid.gamma_th
        return (self.gamma_w >= th) & (self.gamma_u >= th)

    def rows(self):
        """Yield ``(lambda, alpha, gamma_w, gamma_u, e_tot, feasible)`` per cell."""
        feas = self.feasible
        for i, lam in enumerate(self.grid.lambda_values):
            for j, a in enumerate(self.grid.alpha_values):
                yield lam, a, self.gamma_w[i, j], self.gamma_u[i, j], self.e_tot[i, j], bool(feas[i, j])


def _evaluate_cell(config, query, lam, alpha, backend, frames, seed):
    cfg = config.replace(arrival_rate=lam)
    if backend == "analytic":
        r = evaluate(MetricInputs.for_alpha(cfg, query, alpha))
        return r.gamma_w, r.gamma_u, r.e_tot
    if backend == "sim":
        from cowu.sim import run_campaign

        est = run_campaign(cfg, query, alpha, frames=frames, master_seed=seed)
        return est.gamma_w.mean, est.gamma_u.mean, est.e_tot.mean
    raise DomainError(f"unknown backend {backend!r}")


def sweep(
    config: SystemConfig,
    query: QueryRange,
    grid: GridSpec | None = None,
    *,
    lambdas: Sequence[float] | None = None,
    backend: str = "analytic",
    frames: int = 20_000,
    master_seed: int = 0,
) -> SweepResult:
    """Evaluate every ``(lambda, alpha)`` cell.

    ``backend="sim"`` replaces the closed forms with Monte Carlo campaigns; it
    exists to cross-check the analytical sweep and is much slower.
    """
    grid = grid or GridSpec()
    lams = grid.lambda_values if lambdas is None else tuple(lambdas)
    shape = (len(lams), len(grid.alpha_values))
    out = np.empty((3, *shape))
    for i, lam in enumerate(lams):
        for j, a in enumerate(grid.alpha_values):
            out[:, i, j] = _evaluate_cell(config, query, lam, a, backend, frames, master_seed)
    if lambdas is not None:
        grid = GridSpec(grid.alpha_values, lams, grid.gamma_th)
    return SweepResult(grid, out[0], out[1], out[2])


def lambda_max(
    config: SystemConfig,
    query: QueryRange | None,
    grid: GridSpec | None = None,
    scheme: str = "cowu",
) -> tuple[float, tuple[float, ...]]:
    """Largest grid ``lambda`` for which some ``alpha`` meets both thresholds.

    Returns ``(0.0, ())`` when no cell is feasible. For ``scheme="rr"`` the
    pull side is always fully retrieved and ``alpha`` plays no role, so the
    feasible-alpha set is empty.
    """
    grid = grid or GridSpec()
    th = grid.gamma_th
    if scheme == "rr":
        best = 0.0
        for lam in grid.lambda_values:
            if rr_gamma_u(config.n_pull, config.replace(arrival_rate=lam)) >= th:
                best = lam
        return best, ()
    if scheme != "cowu":
        raise DomainError(f"unknown scheme {scheme!r}")
    # walk lambda downwards; the first feasible row is the answer
    for lam in reversed(grid.lambda_values):
        row = sweep(config, query, grid, lambdas=[lam])
        alphas = tuple(a for a, ok in zip(grid.alpha_values, row.feasible[0]) if ok)
        if alphas:
            return lam, alphas
    return 0.0, ()


@dataclass(frozen=True)
class AlphaChoice:
    alpha: float
    e_tot: float
    gamma_w: float
    gamma_u: float


def alpha_opt(
    config: SystemConfig,
    query: QueryRange,
    lam: float,
    grid: GridSpec | None = None,
) -> AlphaChoice | None:
    """Energy-minimizing feasible ``alpha`` at arrival rate ``lam``.

    Returns ``None`` when no grid ``alpha`` meets both thresholds. Energies
    within ``ENERGY_TIE_TOL`` count as equal and the smaller ``alpha`` wins.
    """
    grid = grid or GridSpec()
    row = sweep(config, query, grid, lambdas=[lam])
    feasible = row.feasible[0]
    if not feasible.any():
        return None
    e = row.e_tot[0]
    best = None
    for j in np.flatnonzero(feasible):
        if best is None or e[j] < e[best] - ENERGY_TIE_TOL:
            best = j
    alpha = grid.alpha_values[best]
    # independent re-check of the constraints at the chosen point
    check = evaluate(MetricInputs.for_alpha(config.replace(arrival_rate=lam), query, alpha))
    assert check.gamma_w >= grid.gamma_th and check.gamma_u >= grid.gamma_th
    return AlphaChoice(alpha, check.e_tot, check.gamma_w, check.gamma_u)


def energy_ratio(
    config: SystemConfig,
    query: QueryRange,
    lam: float,
    grid: GridSpec | None = None,
) -> float | None:
    """CoWu pull energy at ``alpha_opt`` over the Round-Robin pull energy.

    ``None`` when ``alpha_opt`` is infeasible. Raises
    :class:`~cowu.errors.InfeasibleError` if Round-Robin itself is (N_w > L).
    """
    rr = rr_pull_energy(config.n_pull, config)
    choice = alpha_opt(config, query, lam, grid)
    if choice is None:
        return None
    return choice.e_tot / rr
