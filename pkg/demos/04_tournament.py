#!/usr/bin/env python3
"""Seeded matches and the seat-by-environment winrate grid."""

from doudizhu.arena import RandomAgent, RhcpAgent, matrix_to_text, run_match, winrate_matrix
from doudizhu.engine import Seat

print("partitioning landlord vs two random peasants, 100 episodes x 3 repeats")
roles = {Seat.LANDLORD: RhcpAgent(), Seat.PEASANT_DOWN: RandomAgent(),
         Seat.PEASANT_UP: RandomAgent()}
report = run_match(roles, episodes=100, repeats=3, seed=0)
print(report.to_text())

print()
print("full grid (each kind in each seat vs each environment), 30 episodes per cell")
grid = winrate_matrix({"random": RandomAgent, "rhcp": RhcpAgent}, episodes=30, seed=1)
print(matrix_to_text(grid))
