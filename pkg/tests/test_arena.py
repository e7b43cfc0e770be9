import collections
import random

import pytest

from doudizhu.arena import (
    RandomAgent,
    RhcpAgent,
    ScriptedAgent,
    make_agent,
    matrix_to_text,
    play_episode,
    run_match,
    winrate_matrix,
)
from doudizhu.cards import classify, parse_cards
from doudizhu.engine import Seat, SEATS, deal, observe
from doudizhu.movegen import is_legal, is_pass


def make_obs(hand_text, incumbent_text=None):
    state = deal(0)
    from dataclasses import replace

    hands = dict(state.hands)
    hands[Seat.LANDLORD] = parse_cards(hand_text)
    incumbent = None
    if incumbent_text:
        incumbent = (Seat.PEASANT_UP, classify(parse_cards(incumbent_text)))
    state = replace(state, hands=hands, incumbent=incumbent)
    return observe(state, Seat.LANDLORD)


class TestRandomAgent:
    def test_single_card_lead(self):
        obs = make_obs("3")
        agent = RandomAgent()
        assert str(agent.act(obs, random.Random(0))) == "3"

    def test_forced_pass(self):
        obs = make_obs("33", "A")
        move = RandomAgent().act(obs, random.Random(0))
        assert is_pass(move)

    def test_roughly_uniform(self):
        obs = make_obs("34")  # exactly two legal leads
        rng = random.Random(1)
        agent = RandomAgent()
        counts = collections.Counter(str(agent.act(obs, rng)) for _ in range(10_000))
        assert set(counts) == {"3", "4"}
        # chi-square with 1 dof; 3.84 ~ p=0.05, use a lenient bar
        expected = 5000
        chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
        assert chi2 < 11

    def test_never_illegal(self):
        rng = random.Random(7)
        agent = RandomAgent()
        for seed in range(30):
            from doudizhu.engine import apply_move

            state = deal(seed)
            while not state.is_terminal():
                obs = observe(state, state.to_act)
                move = agent.act(obs, rng)
                inc = obs.incumbent[1] if obs.incumbent else None
                assert is_legal(obs.own_hand, inc, move)
                state = apply_move(state, move)


class TestScriptedAgent:
    def test_replays_reference_moves(self, reference_record):
        agents = {
            seat: ScriptedAgent(reference_record, seat) for seat in SEATS
        }
        # feed the exact deal from the record through the engine
        from doudizhu.engine import GameState, apply_move

        state = GameState(dict(reference_record.initial_hands), (), None, 0, Seat.LANDLORD)
        rng = random.Random(0)
        while not state.is_terminal():
            move = agents[state.to_act].act(observe(state, state.to_act), rng)
            state = apply_move(state, move)
        assert state.winner is Seat.LANDLORD


class TestRunMatch:
    def test_deterministic_reports(self):
        roles = lambda: {s: RandomAgent() for s in SEATS}
        a = run_match(roles(), episodes=20, repeats=2, seed=3)
        b = run_match(roles(), episodes=20, repeats=2, seed=3)
        assert a == b

    def test_winrates_sum_to_one(self):
        roles = {s: RandomAgent() for s in SEATS}
        report = run_match(roles, episodes=30, seed=1)
        assert report.winrates[Seat.LANDLORD] + report.winrates[Seat.PEASANT_DOWN] == 1.0
        assert report.winrates[Seat.PEASANT_DOWN] == report.winrates[Seat.PEASANT_UP]

    def test_both_teams_win_sometimes(self):
        roles = {s: RandomAgent() for s in SEATS}
        report = run_match(roles, episodes=200, seed=5)
        assert 0.0 < report.winrates[Seat.LANDLORD] < 1.0

    def test_report_text(self):
        roles = {s: RandomAgent() for s in SEATS}
        text = run_match(roles, episodes=5, seed=0).to_text()
        assert "landlord" in text and "winrate" in text


class TestRhcpStrength:
    def test_rhcp_landlord_beats_random_landlord(self):
        random_roles = {s: RandomAgent() for s in SEATS}
        base = run_match(random_roles, episodes=150, seed=11)
        rhcp_roles = {
            Seat.LANDLORD: RhcpAgent(),
            Seat.PEASANT_DOWN: RandomAgent(),
            Seat.PEASANT_UP: RandomAgent(),
        }
        strong = run_match(rhcp_roles, episodes=150, seed=11)
        assert strong.landlord_winrate() >= base.landlord_winrate() + 0.2


class TestMatrix:
    def test_grid_shape_and_text(self):
        factories = {"random": RandomAgent}
        grid = winrate_matrix(factories, episodes=4, seed=2)
        assert len(grid) == 3  # three seats x one pairing
        text = matrix_to_text(grid)
        assert "landlord" in text

    def test_make_agent_kinds(self):
        assert make_agent("random").kind == "random"
        assert make_agent("rhcp").kind == "rhcp"
        with pytest.raises(ValueError):
            make_agent("cql")
        with pytest.raises(ValueError):
            make_agent("alphago")


class TestPlayEpisode:
    def test_records_round_trip(self):
        from doudizhu.engine import import_record

        roles = {s: RandomAgent() for s in SEATS}
        final, record = play_episode(roles, seed=9, record=True)
        assert record is not None
        assert import_record(record).winner is final.winner
