import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infoset_budget import rng as rngmod
from infoset_budget.cards import CardError, CanonicalHand, Deck, canonical_hands, parse_cards
from infoset_budget.equity import (
    Showdown,
    build_table,
    canonical_boards,
    content_hash,
    error_profile,
    exact_equity,
    exact_table,
    golden_path,
    info_set_size,
    mc_equity,
    read_table,
    sample_half_points,
    showdown_value,
    write_table,
)
from oracles import naive_exact_equity, naive_outcome_counts


def sd(hero, villain, board):
    return Showdown(tuple(parse_cards(hero)), tuple(parse_cards(villain)), tuple(parse_cards(board)))


def test_showdown_examples():
    assert showdown_value(sd("AsAh", "KsKh", "2d7c9sJd3c")) == 1
    assert showdown_value(sd("AsKd", "AcKh", "2d7c9sJd3c")) == 0.5
    assert showdown_value(sd("KsKh", "AsAh", "2d7c9sJd3c")) == 0


def test_showdown_collision():
    with pytest.raises(CardError):
        sd("AsAh", "AsKh", "2d7c9sJd3c")


@settings(max_examples=300)
@given(st.permutations(list(range(52))))
def test_showdown_antisymmetry(perm):
    from infoset_budget.cards import Card

    c = [Card.from_id(i) for i in perm[:9]]
    s = Showdown((c[0], c[1]), (c[2], c[3]), tuple(c[4:9]))
    swapped = Showdown((c[2], c[3]), (c[0], c[1]), tuple(c[4:9]))
    assert showdown_value(s) in (0, 0.5, 1)
    assert showdown_value(s) + showdown_value(swapped) == 1


def test_info_set_size_matches_combination_count():
    per_hand = info_set_size(Deck.full())
    assert per_hand == math.comb(50, 2) * math.comb(48, 5)
    assert per_hand * 1326 == 2_781_381_002_400


def test_board_orbits_cover_all_boards(short_deck):
    boards, weights = canonical_boards(short_deck)
    assert weights.sum() == math.comb(20, 5)
    assert len(boards) < math.comb(20, 5) // 10


@pytest.mark.parametrize("code", ["AA", "KQs", "JTo", "TT"])
def test_exact_matches_naive_on_short_deck(code, short_deck):
    hand = CanonicalHand.parse(code)
    assert exact_table(short_deck).fraction(hand) == naive_exact_equity(hand.representative(), short_deck)


def test_exact_matches_naive_on_six_rank_deck():
    deck = Deck(6)
    for code in ["99", "A9o"]:
        hand = CanonicalHand.parse(code)
        assert exact_table(deck).fraction(hand) == naive_exact_equity(hand.representative(), deck)


def test_exact_estimate_fields(short_deck):
    est = exact_equity(CanonicalHand.parse("AA"), short_deck)
    assert est.exact and est.samples_used == math.comb(18, 2) * math.comb(16, 5)
    # a mean of outcomes is a multiple of 0.5 / |I(x)|
    assert (Fraction(est.mean).limit_denominator(2 * est.samples_used) * 2 * est.samples_used).denominator == 1


def test_exact_table_is_antisymmetric_in_aggregate(short_deck):
    # summed over all hole pairs, hero and villain roles are the same set of
    # matchups, so the deal-weighted mean equity is exactly one half
    table = exact_table(short_deck)
    total = sum(Fraction(h.combos_count) * table.fraction(h) for h in table.hands)
    assert total / sum(h.combos_count for h in table.hands) == Fraction(1, 2)


def test_exact_rejects_missing_hand(short_deck):
    with pytest.raises(CardError):
        exact_equity(CanonicalHand.parse("22"), short_deck)


def test_mc_k1_is_a_single_outcome():
    for seed in range(20):
        est = mc_equity(CanonicalHand.parse("AA"), 1, rng_seed=seed)
        assert est.mean in (0.0, 0.5, 1.0) and not est.exact


def test_mc_is_deterministic():
    a = mc_equity(CanonicalHand.parse("T9s"), 500, rng_seed=3)
    b = mc_equity(CanonicalHand.parse("T9s"), 500, rng_seed=3)
    assert a == b


def test_mc_converges(short_deck):
    hand = CanonicalHand.parse("KQs")
    truth = exact_equity(hand, short_deck).mean
    est = mc_equity(hand, 1_000_000, short_deck, rng_seed=1)
    # std of one outcome is at most 0.5
    assert abs(est.mean - truth) < 4 * 0.5 / math.sqrt(1_000_000)


def test_mc_rejects_bad_k():
    with pytest.raises(ValueError):
        mc_equity(CanonicalHand.parse("AA"), 0)


def test_single_completion_outcome_frequencies(short_deck):
    # k=1 draws follow the exact win/tie/loss split of the information set
    hand = CanonicalHand.parse("JTo")
    wins, ties, total = naive_outcome_counts(hand.representative(), short_deck)
    probs = np.array([total - wins - ties, ties, wins]) / total
    hero = np.array([[c.id for c in hand.representative()]] * 300_000, dtype=np.int64)
    half = sample_half_points(hero, 1, short_deck, rngmod.stream(0, 1))
    counts = np.bincount(half, minlength=3)
    expected = probs * len(hero)
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 18.4  # 2 dof, p = 1e-4


@pytest.fixture(scope="module")
def profile(short_deck):
    hands = [CanonicalHand.parse(c) for c in ("AA", "KQs", "JTo")]
    return error_profile(hands, [1, 2, 4], 20_000, short_deck, seed=2)


def test_profile_k1_three_clusters(profile):
    for hand in {c.hand for c in profile.cells}:
        cell = profile.cell(hand, 1)
        p = cell.truth
        allowed = {round(p, 12), round(abs(p - 0.5), 12), round(1 - p, 12)}
        assert set(np.round(cell.errors, 12)) <= allowed


def test_profile_error_decreases(profile):
    maes = [mae for _, mae, _ in profile.table()]
    assert maes[0] > maes[1] > maes[2]


def test_profile_variance_law(profile):
    for hand in {c.hand for c in profile.cells}:
        v1 = profile.cell(hand, 1).var
        for k in (2, 4):
            assert profile.cell(hand, k).var * k == pytest.approx(v1, rel=0.06)


def test_profile_histogram_counts(profile):
    for k, _, counts in profile.table():
        assert counts.sum() == 3 * 20_000


def test_profile_worker_independent(short_deck):
    hands = [CanonicalHand.parse("AA")]
    a = error_profile(hands, [3], 9000, short_deck, seed=4, workers=1)
    b = error_profile(hands, [3], 9000, short_deck, seed=4, workers=3)
    assert np.array_equal(a.cells[0].estimates, b.cells[0].estimates)


def test_golden_table():
    table = read_table()
    assert len(table) == 169
    assert all(e.exact and e.samples == info_set_size(Deck.full()) for e in table.values())
    aa = table[CanonicalHand.parse("AA")].equity
    assert aa == pytest.approx(0.852037133, abs=1e-9)
    # deal-weighted mean equity over all hands is exactly one half
    w = sum(h.combos_count * e.equity for h, e in table.items()) / 1326
    assert w == pytest.approx(0.5, abs=1e-8)
    assert content_hash(golden_path()) == content_hash(golden_path())


def test_golden_table_statistically_consistent():
    table = read_table()
    for code in ("AA", "72o", "JTs"):
        hand = CanonicalHand.parse(code)
        est = mc_equity(hand, 200_000, rng_seed=9)
        assert abs(est.mean - table[hand].equity) < 4 * 0.5 / math.sqrt(200_000)


def test_table_round_trip(tmp_path, short_deck):
    rows = build_table(short_deck)
    path = tmp_path / "t.csv"
    write_table(path, rows)
    back = read_table(path)
    assert [h.code for h in back] == [h.code for h in canonical_hands(short_deck)]
    first = path.read_text().splitlines()
    assert first[0] == "hand,equity,exact,samples"
    assert first[1].split(",")[1].split(".")[1].__len__() == 9
    mc_rows = build_table(short_deck, method="mc", samples=2000, seed=1)
    assert not any(r.exact for r in mc_rows)
    assert mc_rows == build_table(short_deck, method="mc", samples=2000, seed=1)
