"""Configuration, frame arithmetic and the primitive activity probabilities.

Everything here is shared by the analytical model (:mod:`cowu.metrics`) and the
Monte Carlo simulator (:mod:`cowu.sim`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml

from cowu.errors import DomainError

# floor(alpha * L) guard: 0.35 * 20 must give 7, not 6.
_FLOOR_EPS = 1e-9


@dataclass(frozen=True)
class UniformObservation:
    """Uniform observation process on ``[v_min, v_max]``.

    Any object exposing ``v_min``, ``v_max``, ``cdf`` and ``ppf`` can stand in
    for it; the analysis only needs the CDF and the simulator samples through
    the inverse CDF.
    """

    v_min: float = 0.0
    v_max: float = 1.0

    def __post_init__(self):
        if not self.v_min < self.v_max:
            raise DomainError(f"empty support [{self.v_min}, {self.v_max}]")

    def pdf(self, v):
        v = np.asarray(v, dtype=float)
        inside = (v >= self.v_min) & (v <= self.v_max)
        return np.where(inside, 1.0 / (self.v_max - self.v_min), 0.0)

    def cdf(self, v):
        v = np.asarray(v, dtype=float)
        out = np.clip((v - self.v_min) / (self.v_max - self.v_min), 0.0, 1.0)
        return out if out.ndim else float(out)

    def ppf(self, q):
        q = np.asarray(q, dtype=float)
        return self.v_min + q * (self.v_max - self.v_min)


@dataclass(frozen=True)
class QueryRange:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise DomainError(f"query lower bound {self.lower} exceeds upper {self.upper}")


@dataclass(frozen=True)
class SystemConfig:
    """Protocol, population and radio parameters.

    Defaults follow the common simulation parameters: 3.2 ms slots, 55 mW
    transmit / 50 mW receive power, ``p = 0.0606`` and values on ``[0, 1]``.
    ``arrival_rate`` is in packets per slot per push node.
    """

    n_pull: int = 25
    n_push: int = 25
    slots_per_frame: int = 50
    slot_duration: float = 3.2e-3
    tx_prob: float = 0.0606
    arrival_rate: float = 0.025
    power_tx: float = 55e-3
    power_rx: float = 50e-3
    observation: UniformObservation = field(default_factory=UniformObservation)

    def __post_init__(self):
        for name in ("n_pull", "n_push", "slots_per_frame"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise DomainError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n_pull < 0 or self.n_push < 0:
            raise DomainError("node counts must be nonnegative")
        if self.slots_per_frame < 1:
            raise DomainError("a frame needs at least one slot")
        if not self.slot_duration > 0:
            raise DomainError("slot_duration must be positive")
        if not 0.0 < self.tx_prob <= 1.0:
            raise DomainError(f"tx_prob must lie in (0, 1], got {self.tx_prob}")
        if not self.arrival_rate >= 0:
            raise DomainError("arrival_rate must be nonnegative")
        if not (self.power_tx > 0 and self.power_rx > 0):
            raise DomainError("radio powers must be positive")

    def replace(self, **changes) -> "SystemConfig":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class FrameSplit:
    alpha: float
    reserved_len: int
    shared_start: int
    shared_len: int


def make_frame_split(alpha: float, L: int) -> FrameSplit:
    """Partition ``L`` uplink slots into pull-reserved and shared slots.

    Slots ``1..floor(alpha L)`` are reserved for pull nodes; slots
    ``floor(alpha L)+1..L`` are shared. ``shared_start`` is 1-based and clamped
    to ``L`` (so it equals ``L`` when no shared slot exists).
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    if int(L) != L or L < 1:
        raise DomainError(f"L must be a positive integer, got {L}")
    L = int(L)
    reserved = min(L, math.floor(alpha * L + _FLOOR_EPS))
    return FrameSplit(
        alpha=float(alpha),
        reserved_len=reserved,
        shared_start=min(L, reserved + 1),
        shared_len=L - reserved,
    )


def wake_probability(model, query: QueryRange) -> float:
    """Probability that one pull node's observation falls inside ``query``."""
    if query.lower < model.v_min or query.upper > model.v_max:
        raise DomainError(
            f"query [{query.lower}, {query.upper}] outside support "
            f"[{model.v_min}, {model.v_max}]"
        )
    return float(model.cdf(query.upper)) - float(model.cdf(query.lower))


def push_activity_probability(rate: float, L: int) -> float:
    """Probability that a push node generated at least one packet last frame."""
    if rate < 0 or L < 1:
        raise DomainError("need rate >= 0 and L >= 1")
    return -math.expm1(-rate * L)


# -- config files -------------------------------------------------------------

_CONFIG_KEYS = {
    "n_pull": ("n_pull", int),
    "n_push": ("n_push", int),
    "slots_per_frame": ("slots_per_frame", int),
    "slot_duration_s": ("slot_duration", float),
    "tx_prob": ("tx_prob", float),
    "arrival_rate": ("arrival_rate", float),
    "power_tx_w": ("power_tx", float),
    "power_rx_w": ("power_rx", float),
}
CONFIG_FILE_KEYS = (
    *_CONFIG_KEYS,
    "v_min",
    "v_max",
    "query_lower",
    "query_upper",
    "alpha",
)


@dataclass(frozen=True)
class Scenario:
    """A resolved config file: system parameters, query and (optional) split."""

    config: SystemConfig
    query: QueryRange
    alpha: float | None = None

    def to_mapping(self) -> dict[str, Any]:
        c = self.config
        out = {
            "n_pull": c.n_pull,
            "n_push": c.n_push,
            "slots_per_frame": c.slots_per_frame,
            "slot_duration_s": c.slot_duration,
            "tx_prob": c.tx_prob,
            "arrival_rate": c.arrival_rate,
            "power_tx_w": c.power_tx,
            "power_rx_w": c.power_rx,
            "v_min": c.observation.v_min,
            "v_max": c.observation.v_max,
            "query_lower": self.query.lower,
            "query_upper": self.query.upper,
        }
        if self.alpha is not None:
            out["alpha"] = self.alpha
        return out


def scenario_from_mapping(data: Mapping[str, Any]) -> Scenario:
    unknown = set(data) - set(CONFIG_FILE_KEYS)
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {}
    for key, (attr, cast) in _CONFIG_KEYS.items():
        if key in data:
            try:
                kwargs[attr] = cast(data[key])
            except (TypeError, ValueError) as exc:
                raise DomainError(f"bad value for {key}: {data[key]!r}") from exc
    obs = UniformObservation(float(data.get("v_min", 0.0)), float(data.get("v_max", 1.0)))
    config = SystemConfig(observation=obs, **kwargs)
    query = QueryRange(
        float(data.get("query_lower", obs.v_min)),
        float(data.get("query_upper", obs.v_max)),
    )
    wake_probability(obs, query)  # validates the range against the support
    alpha = data.get("alpha")
    if alpha is not None:
        alpha = float(alpha)
        make_frame_split(alpha, config.slots_per_frame)
    return Scenario(config, query, alpha)


def load_scenario(path: str | Path) -> Scenario:
    """Read a flat key-value config (YAML or JSON)."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise DomainError(f"cannot parse {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise DomainError(f"{path}: expected a flat key-value document")
    return scenario_from_mapping(data)
