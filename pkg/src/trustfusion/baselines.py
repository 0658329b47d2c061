"""Reference detectors: clairvoyant oracle, oblivious fusion, reputation history.

The oracle fuses with the true trust vector (a lower bound on achievable
error), the oblivious detector trusts everyone, and the reputation
detector drops robots whose recent measurements disagreed with its own
past decisions too often.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .model import Decision, DomainError, Hypothesis, NetworkObservation, SensorModel
from .two_stage import fuse_trusted

__all__ = [
    "ReputationState",
    "oracle_decide",
    "oblivious_decide",
    "reputation_update_and_decide",
]


@dataclass(frozen=True)
class ReputationState:
    """Per-robot agreement history (1 = agreed with the decision), capacity T.

    A robot is excluded once its disagreement count over the stored window
    reaches ``eta``.  Histories shorter than T (cold start) are judged on
    the outcomes they have.
    """

    capacity: int
    eta: float
    histories: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise DomainError(f"capacity must be >= 1, got {self.capacity}")
        if not self.eta < self.capacity:
            raise DomainError(f"eta must be < capacity, got eta={self.eta!r}")
        if any(len(h) > self.capacity for h in self.histories):
            raise DomainError("history longer than capacity")

    @classmethod
    def fresh(cls, n: int, capacity: int, eta: float) -> "ReputationState":
        return cls(capacity=capacity, eta=eta, histories=((),) * n)


def oracle_decide(obs: NetworkObservation, sensor: SensorModel) -> Decision:
    """Fuse with the true trust vector (simulator context only)."""
    if obs.truth_t is None:
        raise DomainError("oracle_decide needs ground-truth trust (truth_t)")
    return fuse_trusted(obs.y, obs.truth_t, sensor)


def oblivious_decide(obs: NetworkObservation, sensor: SensorModel) -> Decision:
    """Fuse every measurement as if all robots were legitimate."""
    return fuse_trusted(obs.y, (1,) * obs.n, sensor)


def reputation_update_and_decide(
        obs: NetworkObservation, state: ReputationState,
        sensor: SensorModel) -> Tuple[Decision, ReputationState]:
    """Exclude over-the-threshold disagreers, fuse the rest, update histories.

    A robot participates iff its disagreement count over the last T tests
    is strictly below eta (so eta = 0.5 with T = 1 means one disagreement
    already excludes).  After fusing, each robot's agreement with this
    test's decision is appended to its window.
    """
    if len(state.histories) != obs.n:
        raise DomainError("state tracks a different number of robots")
    t_hat = tuple(
        1 if (len(h) - sum(h)) < state.eta else 0
        for h in state.histories
    )
    decision = fuse_trusted(obs.y, t_hat, sensor)
    agree_bit = 1 if decision.hypothesis is Hypothesis.H1 else 0
    new_histories = tuple(
        (h + (1 if y_i == agree_bit else 0,))[-state.capacity:]
        for h, y_i in zip(state.histories, obs.y)
    )
    return decision, ReputationState(capacity=state.capacity, eta=state.eta,
                                     histories=new_histories)
