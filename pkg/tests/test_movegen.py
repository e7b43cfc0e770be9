import random

from doudizhu.cards import FULL_DECK, CardMultiset, Category, beats, classify, parse_cards
from doudizhu.movegen import (
    EXPECTED_GROUP_COUNT,
    PASS,
    is_legal,
    iter_groups,
    legal_moves,
)


def random_hand(rng, size):
    return CardMultiset.from_values(rng.sample(FULL_DECK.values(), size))


class TestCatalog:
    def test_total(self, catalog):
        assert catalog.group_count() == EXPECTED_GROUP_COUNT

    def test_simple_category_counts(self, catalog):
        counts = catalog.category_counts()
        assert counts[Category.SOLO] == 15
        assert counts[Category.BOMB] == 13
        assert counts[Category.PAIR] == 13
        assert counts[Category.NUKE] == 1
        assert counts[Category.SEQ_SOLOS] == 36

    def test_determinism(self, catalog):
        again = tuple(iter_groups(FULL_DECK))
        assert catalog.moves[1:] == again

    def test_indices_dense_and_pass_first(self, catalog):
        assert catalog.moves[0] == PASS
        assert sorted(catalog.index.values()) == list(range(len(catalog.moves)))

    def test_round_trip_every_group(self, catalog):
        for g in catalog.moves[1:]:
            assert classify(g.cards) == g

    def test_kickers_disjoint_and_distinct(self, catalog):
        for g in catalog.moves[1:]:
            if g.kickers.is_empty():
                continue
            principal = g.principal_cards()
            for i in range(15):
                assert not (g.kickers[i] and principal[i])
            assert not (g.kickers[13] and g.kickers[14])


class TestLegalMoves:
    def test_leading_pair_of_threes(self):
        moves = legal_moves(parse_cards("33"))
        assert {str(m) for m in moves} == {"3", "3,3"}
        assert PASS not in moves

    def test_forced_pass(self):
        incumbent = classify(parse_cards("A"))
        assert legal_moves(parse_cards("33"), incumbent) == [PASS]

    def test_pair_of_twos_beats_tens(self):
        incumbent = classify(parse_cards("TT"))
        moves = legal_moves(parse_cards("22"), incumbent)
        assert classify(parse_cards("22")) in moves

    def test_agreement_with_catalog_filter(self, catalog):
        rng = random.Random(11)
        for _ in range(40):
            hand = random_hand(rng, rng.randint(1, 8))
            mine = set(legal_moves(hand))
            brute = {m for m in catalog.moves[1:] if hand.contains(m.cards)}
            assert mine == brute

            incumbent = classify(parse_cards(rng.choice(["7", "55", "999", "34567"])))
            mine = set(legal_moves(hand, incumbent))
            brute_beat = {m for m in catalog.moves[1:]
                          if hand.contains(m.cards) and beats(m, incumbent)}
            assert mine == {PASS} | brute_beat

    def test_responding_subset_of_leading(self):
        rng = random.Random(5)
        incumbent = classify(parse_cards("66"))
        for _ in range(20):
            hand = random_hand(rng, 10)
            lead = set(legal_moves(hand))
            respond = set(legal_moves(hand, incumbent)) - {PASS}
            assert respond <= lead

    def test_every_move_in_catalog(self, catalog):
        rng = random.Random(2)
        for _ in range(20):
            hand = random_hand(rng, 17)
            for m in legal_moves(hand):
                assert m in catalog.index
                assert hand.contains(m.cards)


class TestIsLegal:
    def test_matches_enumeration(self):
        rng = random.Random(3)
        incumbent = classify(parse_cards("88"))
        for _ in range(30):
            hand = random_hand(rng, 8)
            legal = set(legal_moves(hand, incumbent))
            for m in legal:
                assert is_legal(hand, incumbent, m)
            assert is_legal(hand, incumbent, PASS)

    def test_pass_illegal_when_leading(self):
        assert not is_legal(parse_cards("33"), None, PASS)

    def test_rejects_cards_not_held(self):
        g = classify(parse_cards("44"))
        assert not is_legal(parse_cards("33"), None, g)
