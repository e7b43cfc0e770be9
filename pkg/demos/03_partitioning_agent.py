#!/usr/bin/env python3
"""The recursive partition-scoring agent: strategy scores, best leads,
and one full game against random opponents, printed move by move."""

import random

from doudizhu import RhcpSolver, apply_move, classify, deal, observe, parse_cards, rewards
from doudizhu.engine import Seat
from doudizhu.movegen import is_pass

solver = RhcpSolver()

print("strategy scores: weight of the played group plus the best")
print("partition of what remains")
hand = parse_cards("3,3,4,5,6,7,2")
for text in ["3,3", "3,4,5,6,7", "2"]:
    group = classify(parse_cards(text))
    print(f"  play {text:12s} from {hand}: Q = {solver.strategy_score(group, hand)}")
group, score = solver.best_group(hand)
print(f"  best lead: {group} (score {score})")

print()
print("one full game: partitioning landlord vs random peasants")
rng = random.Random(4)
state = deal(rng)
agents = {Seat.PEASANT_DOWN: "random", Seat.PEASANT_UP: "random"}
turn = 0
while not state.is_terminal():
    seat = state.to_act
    obs = observe(state, seat)
    if seat is Seat.LANDLORD:
        incumbent = obs.incumbent[1] if obs.incumbent else None
        move = solver.act(obs.own_hand, incumbent)
    else:
        move = rng.choice(obs.legal_moves())
    shown = "pass" if is_pass(move) else str(move)
    print(f"  {turn:2d} {seat.value:13s} ({obs.own_hand.size():2d} cards) -> {shown}")
    state = apply_move(state, move)
    turn += 1
print(f"winner: {state.winner.value}, rewards {dict((s.value, r) for s, r in rewards(state).items())}")
