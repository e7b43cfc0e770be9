import random
import time

import pytest

from doudizhu.cards import FULL_DECK, CardMultiset, parse_cards
from doudizhu.decomp import (
    DLX_THRESHOLD,
    decompositions,
    enumerate_dfs,
    enumerate_dlx,
)


def random_hand(rng, size):
    return CardMultiset.from_values(rng.sample(FULL_DECK.values(), size))


class TestDfs:
    def test_three_threes(self):
        found = enumerate_dfs(parse_cards("333"))
        shapes = {tuple(sorted(str(g) for g in d.groups)) for d in found}
        assert shapes == {("3,3,3",), ("3", "3,3"), ("3", "3", "3")}

    def test_jokers(self):
        found = enumerate_dfs(parse_cards("*$"))
        shapes = {tuple(sorted(str(g) for g in d.groups)) for d in found}
        assert shapes == {("*,$",), ("$", "*")}

    def test_singleton(self):
        found = enumerate_dfs(parse_cards("3"))
        assert len(found) == 1

    def test_all_valid_and_distinct(self):
        rng = random.Random(9)
        for _ in range(25):
            hand = random_hand(rng, rng.randint(1, 9))
            found = enumerate_dfs(hand)
            assert len(found) >= 1
            for d in found:
                assert d.is_valid_for(hand)

    def test_insensitive_to_construction_order(self):
        vals = [5, 5, 6, 7, 8, 9, 9]
        rng = random.Random(0)
        base = enumerate_dfs(CardMultiset.from_values(vals))
        for _ in range(5):
            rng.shuffle(vals)
            assert enumerate_dfs(CardMultiset.from_values(vals)) == base


class TestDlx:
    def test_subset_of_dfs(self):
        rng = random.Random(21)
        for _ in range(60):
            hand = random_hand(rng, rng.randint(1, DLX_THRESHOLD))
            dlx = enumerate_dlx(hand)
            dfs = enumerate_dfs(hand)
            assert dlx <= dfs
            assert len(dlx) >= 1

    def test_singleton(self):
        found = enumerate_dlx(parse_cards("3"))
        assert len(found) == 1

    def test_large_hands_valid(self):
        rng = random.Random(4)
        for _ in range(15):
            hand = random_hand(rng, 17)
            for d in enumerate_dlx(hand):
                assert d.is_valid_for(hand)


class TestSampling:
    def test_small_hand_uses_full_dfs(self):
        hand = parse_cards("333")
        sample = decompositions(hand, limit=100, rng=0)
        assert len(sample.decompositions) == 3
        assert not sample.truncated

    def test_truncation_flag(self):
        rng = random.Random(8)
        hand = random_hand(rng, 17)
        full = enumerate_dlx(hand)
        limit = max(1, len(full) - 1)
        sample = decompositions(hand, limit=limit, rng=1)
        assert sample.truncated == (len(full) > limit)
        assert len(sample.decompositions) == min(limit, len(full))

    def test_limit_one(self):
        hand = random_hand(random.Random(12), 17)
        sample = decompositions(hand, limit=1, rng=3)
        assert len(sample.decompositions) == 1
        assert sample.decompositions[0].is_valid_for(hand)

    def test_deterministic_under_seed(self):
        hand = random_hand(random.Random(14), 17)
        a = decompositions(hand, limit=10, rng=42)
        b = decompositions(hand, limit=10, rng=42)
        assert a == b

    def test_limit_validation(self):
        with pytest.raises(ValueError):
            decompositions(parse_cards("3"), limit=0)

    def test_twenty_card_speed(self):
        rng = random.Random(31)
        worst = 0.0
        for _ in range(10):
            hand = random_hand(rng, 20)
            t0 = time.perf_counter()
            sample = decompositions(hand, limit=100, rng=1)
            worst = max(worst, time.perf_counter() - t0)
            for d in sample.decompositions:
                assert d.is_valid_for(hand)
        assert worst < 0.1, f"sampling took {worst * 1000:.1f} ms"
