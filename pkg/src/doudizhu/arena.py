"""Agents, match running and winrate grids.

Every agent exposes ``act(observation, rng) -> Move`` and must return a
legal move; the engine raises on anything else, which the tournament
treats as a failed run rather than a skipped turn. Episode seeds are
derived from the master seed by counter, so reports are reproducible
regardless of execution order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .cql import CqlModel, select_action
from .engine import GameRecord, GameState, Observation, Seat, SEATS, apply_move, deal, export_record, observe
from .movegen import Move
from .rhcp import RhcpConfig, RhcpSolver


class Agent:
    name = "agent"
    kind = "agent"

    def act(self, observation: Observation, rng: random.Random) -> Move:
        raise NotImplementedError

    def reset(self) -> None:
        """Called between episodes; stateless agents ignore it."""


class RandomAgent(Agent):
    """Uniform over legal moves; Pass is an option only when responding
    (the engine forbids a leading pass anyway)."""

    kind = "random"

    def __init__(self, name: str = "random"):
        self.name = name

    def act(self, observation: Observation, rng: random.Random) -> Move:
        return rng.choice(observation.legal_moves())


class RhcpAgent(Agent):
    kind = "rhcp"

    def __init__(self, name: str = "rhcp", config: RhcpConfig | None = None):
        self.name = name
        self.config = config or RhcpConfig()
        self.solver = RhcpSolver()

    def act(self, observation: Observation, rng: random.Random) -> Move:
        incumbent = observation.incumbent[1] if observation.incumbent else None
        return self.solver.act(observation.own_hand, incumbent, self.config)


class CqlAgent(Agent):
    kind = "cql"

    def __init__(self, model: CqlModel, name: str = "cql"):
        self.name = name
        self.model = model

    @classmethod
    def from_checkpoint(cls, path: str, name: str = "cql") -> "CqlAgent":
        return cls(CqlModel.load(path), name)

    def act(self, observation: Observation, rng: random.Random) -> Move:
        move, _, _ = select_action(observation, self.model, 0.0, rng)
        return move


class ScriptedAgent(Agent):
    """Replays one seat's moves from a recorded game, in order."""

    kind = "scripted"

    def __init__(self, record: GameRecord, seat: Seat, name: str = "scripted"):
        self.name = name
        self.moves = [e.move for e in record.entries if e.seat is seat]
        self._i = 0

    def act(self, observation: Observation, rng: random.Random) -> Move:
        if self._i >= len(self.moves):
            raise RuntimeError("scripted agent ran out of recorded moves")
        move = self.moves[self._i]
        self._i += 1
        return move

    def reset(self) -> None:
        self._i = 0


def make_agent(kind: str, checkpoint: str | None = None) -> Agent:
    if kind == "random":
        return RandomAgent()
    if kind == "rhcp":
        return RhcpAgent()
    if kind == "cql":
        if not checkpoint:
            raise ValueError("cql agents need a checkpoint path")
        return CqlAgent.from_checkpoint(checkpoint)
    raise ValueError(f"unknown agent kind {kind!r}")


AGENT_KINDS = ("random", "rhcp", "cql")


def play_episode(roles: dict[Seat, Agent], seed: int,
                 record: bool = False) -> tuple[GameState, GameRecord | None]:
    """One seeded game; returns the terminal state (and its record)."""
    rng = random.Random(seed)
    state = deal(rng)
    initial = dict(state.hands)
    while not state.is_terminal():
        seat = state.to_act
        move = roles[seat].act(observe(state, seat), rng)
        state = apply_move(state, move)
    return state, (export_record(state, initial) if record else None)


@dataclass(frozen=True)
class MatchReport:
    roles: dict[Seat, str]
    episodes: int
    repeats: int
    seeds: tuple[int, ...]
    winrates: dict[Seat, float]           # per-seat mean winrate
    landlord_std: float                   # across repeats

    def landlord_winrate(self) -> float:
        return self.winrates[Seat.LANDLORD]

    def to_text(self) -> str:
        lines = [f"episodes={self.episodes} repeats={self.repeats} seeds={list(self.seeds)}"]
        for seat in SEATS:
            lines.append(f"{seat.value}: {self.roles[seat]} winrate={self.winrates[seat]:.3f}")
        lines.append(f"landlord_std={self.landlord_std:.4f}")
        return "\n".join(lines)


def run_match(roles: dict[Seat, Agent], episodes: int = 100, repeats: int = 1,
              seed: int = 0) -> MatchReport:
    """`repeats` blocks of `episodes` independent seeded games.

    Episode seeds are master_seed-derived counters, so any scheduling
    of the episodes produces the same report. Peasants win as a team:
    their per-seat winrates are equal by definition.
    """
    landlord_rates = []
    for rep in range(repeats):
        wins = 0
        for ep in range(episodes):
            for agent in roles.values():
                agent.reset()
            episode_seed = (seed + rep) * 1_000_003 + ep
            final, _ = play_episode(roles, episode_seed)
            if final.winner is Seat.LANDLORD:
                wins += 1
        landlord_rates.append(wins / episodes)
    mean = sum(landlord_rates) / len(landlord_rates)
    var = sum((r - mean) ** 2 for r in landlord_rates) / len(landlord_rates)
    winrates = {
        Seat.LANDLORD: mean,
        Seat.PEASANT_DOWN: 1.0 - mean,
        Seat.PEASANT_UP: 1.0 - mean,
    }
    return MatchReport(
        roles={s: a.name for s, a in roles.items()},
        episodes=episodes,
        repeats=repeats,
        seeds=tuple(seed + r for r in range(repeats)),
        winrates=winrates,
        landlord_std=var ** 0.5,
    )


def winrate_matrix(agent_factories: dict[str, "callable"], episodes: int = 100,
                   repeats: int = 1, seed: int = 0) -> dict[tuple[Seat, str], MatchReport]:
    """For every (seat, environment kind) cell, run one agent of each
    kind in that seat against two environment agents, mirroring a
    3 x N winrate grid."""
    grid: dict[tuple[Seat, str], MatchReport] = {}
    kinds = list(agent_factories)
    for agent_kind in kinds:
        for env_kind in kinds:
            for seat in SEATS:
                roles = {
                    s: agent_factories[agent_kind if s is seat else env_kind]()
                    for s in SEATS
                }
                grid[(seat, f"{agent_kind}-vs-{env_kind}")] = run_match(
                    roles, episodes=episodes, repeats=repeats, seed=seed
                )
    return grid


def matrix_to_text(grid: dict[tuple[Seat, str], MatchReport]) -> str:
    lines = []
    for (seat, label), report in grid.items():
        team = report.winrates[seat]
        lines.append(f"{seat.value:13s} {label:24s} winrate={team:.3f} (landlord {report.winrates[Seat.LANDLORD]:.3f})")
    return "\n".join(lines)
