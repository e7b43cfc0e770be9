#!/usr/bin/env python3
"""A miniature two-stage Q-learning run: the landlord learns against
two fixed partitioning peasants. Uses a small update budget so it
finishes in a couple of minutes; raise epochs/steps for real runs."""

import time

from doudizhu.cql import TrainingConfig, evaluate_landlord, train_landlord_vs_rhcp

config = TrainingConfig(steps_per_epoch=300, epochs=3, eval_episodes=25,
                        epsilon_anneal_epochs=2)
print("training: 3 epochs x 300 updates (one update per 4 decisions, batch 8)")
t0 = time.time()
model, curve = train_landlord_vs_rhcp(
    config, seed=0,
    progress=lambda p: print(f"  epoch {p.epoch}: eval winrate {p.winrate:.2f}, "
                             f"mean loss {p.mean_loss:.4f} [{time.time() - t0:.0f}s]"),
)
print(f"final greedy winrate over 50 fresh games: "
      f"{evaluate_landlord(model, episodes=50, seed=99):.2f}")
model.save("/tmp/doudizhu-demo-model.bin")
print("checkpoint written to /tmp/doudizhu-demo-model.bin")
print('play against it:  doudizhu serve --checkpoint /tmp/doudizhu-demo-model.bin')
