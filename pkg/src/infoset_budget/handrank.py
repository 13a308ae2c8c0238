"""Poker hand ranking for 5 to 7 cards.

The hot path is :func:`eval_ids`, a numba kernel that packs a hand's value
into one integer::

    value = category << 20 | t0 << 16 | t1 << 12 | t2 << 8 | t3 << 4 | t4

where ``t0..t4`` are tiebreak ranks, most significant first (zero padded).
Comparing packed values is the same as comparing ``HandRank`` tuples.
"""

from __future__ import annotations

import itertools
from enum import IntEnum
from typing import NamedTuple, Sequence

import numpy as np
from numba import njit

from .cards import RANK_CHARS, Card, CardError


class Category(IntEnum):
    HighCard = 0
    Pair = 1
    TwoPair = 2
    Trips = 3
    Straight = 4
    Flush = 5
    FullHouse = 6
    Quads = 7
    StraightFlush = 8


TIEBREAK_LEN = {
    Category.HighCard: 5,
    Category.Pair: 4,
    Category.TwoPair: 3,
    Category.Trips: 3,
    Category.Straight: 1,
    Category.Flush: 5,
    Category.FullHouse: 2,
    Category.Quads: 2,
    Category.StraightFlush: 1,
}


class HandRank(NamedTuple):
    category: Category
    tiebreak: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.category.name} [{','.join(RANK_CHARS[r] for r in self.tiebreak)}]"

    @property
    def value(self) -> int:
        return pack(self)


def pack(rank: HandRank) -> int:
    v = int(rank.category) << 20
    for i, r in enumerate(rank.tiebreak):
        v |= r << (16 - 4 * i)
    return v


def unpack(value: int) -> HandRank:
    cat = Category(int(value) >> 20)
    tb = tuple((int(value) >> (16 - 4 * i)) & 15 for i in range(TIEBREAK_LEN[cat]))
    return HandRank(cat, tb)


@njit(cache=True, nogil=True)
def _top_bit(m):
    b = -1
    while m:
        m >>= 1
        b += 1
    return b


@njit(cache=True, nogil=True)
def _popcount(m):
    c = 0
    while m:
        m &= m - 1
        c += 1
    return c


@njit(cache=True, nogil=True)
def _straight_top(m):
    # ace also sits below the deuce
    m2 = (m << 1) | ((m >> 12) & 1)
    s = m2 & (m2 >> 1) & (m2 >> 2) & (m2 >> 3) & (m2 >> 4)
    if s == 0:
        return -1
    return _top_bit(s) + 3


@njit(cache=True, nogil=True)
def _top_n(m, n):
    """Pack the n highest set ranks of mask m into tiebreak nibbles."""
    v = 0
    shift = 16
    r = 12
    while n > 0 and r >= 0:
        if (m >> r) & 1:
            v |= r << shift
            shift -= 4
            n -= 1
        r -= 1
    return v


@njit(cache=True, nogil=True)
def eval_ids(ids, n):
    """Packed value of the first ``n`` (5..7) card ids in ``ids``."""
    rank_mask = 0
    s0 = 0
    s1 = 0
    s2 = 0
    s3 = 0
    counts = 0
    for i in range(n):
        c = ids[i]
        r = c >> 2
        bit = 1 << r
        s = c & 3
        if s == 0:
            s0 |= bit
        elif s == 1:
            s1 |= bit
        elif s == 2:
            s2 |= bit
        else:
            s3 |= bit
        rank_mask |= bit
        counts += 1 << (4 * r)

    flush = 0
    if _popcount(s0) >= 5:
        flush = s0
    elif _popcount(s1) >= 5:
        flush = s1
    elif _popcount(s2) >= 5:
        flush = s2
    elif _popcount(s3) >= 5:
        flush = s3
    if flush:
        top = _straight_top(flush)
        if top >= 0:
            return (8 << 20) | (top << 16)

    quad = -1
    t1 = -1
    t2 = -1
    p1 = -1
    p2 = -1
    for r in range(12, -1, -1):
        c = (counts >> (4 * r)) & 15
        if c == 4:
            quad = r
        elif c == 3:
            if t1 < 0:
                t1 = r
            elif t2 < 0:
                t2 = r
        elif c == 2:
            if p1 < 0:
                p1 = r
            elif p2 < 0:
                p2 = r

    if quad >= 0:
        kick = _top_bit(rank_mask & ~(1 << quad))
        return (7 << 20) | (quad << 16) | (kick << 12)
    if t1 >= 0 and (t2 >= 0 or p1 >= 0):
        pr = t2 if t2 > p1 else p1
        return (6 << 20) | (t1 << 16) | (pr << 12)
    if flush:
        return (5 << 20) | _top_n(flush, 5)
    top = _straight_top(rank_mask)
    if top >= 0:
        return (4 << 20) | (top << 16)
    if t1 >= 0:
        return (3 << 20) | (t1 << 16) | (_top_n(rank_mask & ~(1 << t1), 2) >> 4)
    if p2 >= 0:
        rest = rank_mask & ~(1 << p1) & ~(1 << p2)
        return (2 << 20) | (p1 << 16) | (p2 << 12) | (_top_n(rest, 1) >> 8)
    if p1 >= 0:
        return (1 << 20) | (p1 << 16) | (_top_n(rank_mask & ~(1 << p1), 3) >> 4)
    return _top_n(rank_mask, 5)


@njit(cache=True, nogil=True)
def eval_rows(hands):
    """Packed values for each row of an (m, n) array of card ids."""
    m, n = hands.shape
    out = np.empty(m, dtype=np.int64)
    for i in range(m):
        out[i] = eval_ids(hands[i], n)
    return out


def _ids(cards: Sequence[Card], expected: int) -> np.ndarray:
    cards = list(cards)
    if len(cards) != expected:
        raise CardError(f"expected {expected} cards, got {len(cards)}")
    if len(set(cards)) != len(cards):
        raise CardError("duplicate cards: " + " ".join(str(c) for c in cards))
    return np.array([c.id for c in cards], dtype=np.int64)


def rank5(cards: Sequence[Card]) -> HandRank:
    return unpack(eval_ids(_ids(cards, 5), 5))


def rank7(cards: Sequence[Card]) -> HandRank:
    return unpack(eval_ids(_ids(cards, 7), 7))


def rank_best(cards: Sequence[Card]) -> HandRank:
    """Rank 5, 6 or 7 cards (best five)."""
    cards = list(cards)
    if not 5 <= len(cards) <= 7:
        raise CardError(f"expected 5 to 7 cards, got {len(cards)}")
    return unpack(eval_ids(_ids(cards, len(cards)), len(cards)))


def rank7_by_subsets(cards: Sequence[Card]) -> HandRank:
    """Best of the 21 five-card subsets; slow reference for :func:`rank7`."""
    _ids(cards, 7)
    return max(rank5(sub) for sub in itertools.combinations(cards, 5))
