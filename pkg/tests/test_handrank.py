import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infoset_budget.cards import Card, CardError, Deck, parse_cards
from infoset_budget.handrank import (
    Category,
    HandRank,
    eval_rows,
    pack,
    rank5,
    rank7,
    rank7_by_subsets,
    unpack,
)
from oracles import naive_rank5


def test_examples():
    assert rank5(parse_cards("AsKsQsJsTs")) == HandRank(Category.StraightFlush, (12,))
    assert rank5(parse_cards("As2d3c4h5s")) == HandRank(Category.Straight, (3,))
    assert rank7(parse_cards("AsKsQsJsTs2d3c")) == HandRank(Category.StraightFlush, (12,))
    assert rank7(parse_cards("AsAdKcKhKd2s3d")) == HandRank(Category.FullHouse, (11, 12))
    assert str(rank7(parse_cards("AsAdKcKhKd2s3d"))) == "FullHouse [K,A]"


@pytest.mark.parametrize(
    "better, worse",
    [
        ("AhKhQhJhTh", "9h8h7h6h5h"),
        ("9h8h7h6h5h", "AsAhAdAcKh"),
        ("AsAhAdAcKh", "AsAhAdKsKh"),
        ("AsAhAdKsKh", "Ah9h7h5h3h"),
        ("Ah9h7h5h3h", "9h8d7c6s5h"),
        ("9h8d7c6s5h", "AsAhAdKhQc"),
        ("AsAhAdKhQc", "AsAhKsKhQc"),
        ("AsAhKsKhQc", "AsAhKhQcJd"),
        ("AsAhKhQcJd", "AhKdQcJs9h"),
        ("6s5h4d3c2s", "As2h3d4c5s"),
        ("AsAhKsKh3c", "AsAhKsKh2c"),
        ("KsKhQsQhAc", "KsKhJsJhAc"),
    ],
)
def test_ordering(better, worse):
    assert rank5(parse_cards(better)) > rank5(parse_cards(worse))


def test_equal_hands_compare_equal():
    assert rank5(parse_cards("AsKdQc9h7s")) == rank5(parse_cards("AhKcQd9s7d"))


def test_duplicates_rejected():
    with pytest.raises(CardError):
        rank5([Card(0, 0)] * 5)
    with pytest.raises(CardError):
        rank7(parse_cards("AsKsQsJsTs2d") + [Card(12, 3)])
    with pytest.raises(CardError):
        rank7(parse_cards("AsKsQsJsTs"))


def test_pack_round_trip():
    for hand in [parse_cards("AsKsQsJsTs"), parse_cards("AsAhKhQcJd"), parse_cards("7s5h4d3c2s")]:
        r = rank5(hand)
        assert unpack(pack(r)) == r


def test_fast_matches_naive_on_random_five_card_hands():
    gen = np.random.default_rng(11)
    deck = Deck.full().cards
    for _ in range(20_000):
        idx = gen.choice(52, 5, replace=False)
        hand = [deck[i] for i in idx]
        assert rank5(hand) == naive_rank5(hand)


def test_rank7_matches_subset_max_of_naive():
    gen = np.random.default_rng(5)
    deck = Deck.full().cards
    for _ in range(3_000):
        hand = [deck[i] for i in gen.choice(52, 7, replace=False)]
        assert rank7(hand) == max(naive_rank5(list(s)) for s in itertools.combinations(hand, 5))


def test_rank7_exhaustive_on_reduced_deck():
    # every 7-card hand from a 24-card deck (9..A)
    deck = Deck(6)
    hands = np.array(list(itertools.combinations(deck.ids.tolist(), 7)), dtype=np.int64)
    fast = eval_rows(hands)
    subsets = list(itertools.combinations(range(7), 5))
    best = np.max(np.stack([eval_rows(np.ascontiguousarray(hands[:, s])) for s in subsets]), axis=0)
    assert np.array_equal(fast, best)


def test_reduced_deck_has_no_wheel():
    # T..A deck: the only possible straight is broadway
    deck = Deck(5)
    hands = np.array(list(itertools.combinations(deck.ids.tolist(), 5)), dtype=np.int64)
    vals = [unpack(v) for v in eval_rows(hands)]
    straights = {v.tiebreak for v in vals if v.category in (Category.Straight, Category.StraightFlush)}
    assert straights == {(12,)}


@settings(max_examples=200)
@given(st.permutations(list(range(52))), st.randoms())
def test_rank7_permutation_invariant(perm, rnd):
    ids = perm[:7]
    cards = [Card.from_id(i) for i in ids]
    shuffled = cards[:]
    rnd.shuffle(shuffled)
    assert rank7(cards) == rank7(shuffled) == rank7_by_subsets(cards)
