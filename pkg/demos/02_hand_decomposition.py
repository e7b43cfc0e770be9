#!/usr/bin/env python3
"""Partitioning a hand into playable groups: exhaustive search vs the
dancing-links exact-cover shortcut, and the size-switched sampler."""

import random
import time

from doudizhu import decompositions, enumerate_dfs, enumerate_dlx, parse_cards
from doudizhu.cards import FULL_DECK, CardMultiset

hand = parse_cards("3,3,3,4,5,6,7,7")
print(f"hand: {hand}")

dfs = enumerate_dfs(hand)
dlx = enumerate_dlx(hand)
print(f"depth-first search finds {len(dfs)} partitions; dancing links finds {len(dlx)}")
print("(the ordered instance encoding trades completeness for speed: each")
print(" rank's copies all land in one group, so splits like 3,3+3 are skipped)")
print()
for d in sorted(dlx, key=lambda d: len(d.groups)):
    print("   dlx:", " | ".join(str(g) for g in d.groups))

print()
rng = random.Random(0)
big = CardMultiset.from_values(rng.sample(FULL_DECK.values(), 20))
print(f"a dealt 20-card hand: {big}")
t0 = time.perf_counter()
sample = decompositions(big, limit=100, rng=0)
ms = (time.perf_counter() - t0) * 1000
print(f"sampled {len(sample.decompositions)} decompositions in {ms:.1f} ms"
      f" (truncated={sample.truncated})")
print("first three:")
for d in sample.decompositions[:3]:
    print("  ", " | ".join(str(g) for g in d.groups))
