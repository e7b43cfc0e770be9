#!/usr/bin/env python3
"""Tour of the card model: parsing, classification, comparison, weights."""

from doudizhu import beats, category_score, classify, parse_cards

EXAMPLES = [
    "7",            # solo
    "7,7",          # pair
    "9,9,9",        # trio
    "3,4,5,6,7,8",  # run of solos
    "3,3,4,4,5,5",  # run of pairs
    "4,4,4,5,5,5",  # run of trios
    "9,9,9,Q,Q",    # trio with a pair kicker
    "Q,Q,Q,K,K,K,8,9",  # airplane with solo kickers
    "4,4,4,4,T,J",  # quad with two solo kickers
    "5,5,5,5",      # bomb
    "*,$",          # nuke
]

print("classification and weights")
print("-" * 54)
for text in EXAMPLES:
    group = classify(parse_cards(text))
    print(f"{text:22s} {group.category.name:28s} weight {category_score(group)}")

print()
print("who beats whom")
print("-" * 54)
duels = [("7,7", "5,5"), ("5,5", "7,7"), ("5,5,5,5", "A,A,A"),
         ("*,$", "2,2,2,2"), ("4,5,6,7,8", "3,4,5,6,7"), ("3,4,5,6,7,8", "3,4,5,6,7")]
for cand, inc in duels:
    a, b = classify(parse_cards(cand)), classify(parse_cards(inc))
    verdict = "beats" if beats(a, b) else "does not beat"
    print(f"{cand:14s} {verdict} {inc}")

bad = parse_cards("3,4,5,6,7,9")
print()
print(f"3,4,5,6,7,9 classifies as: {classify(bad)} (broken run, not playable)")
