"""Cards, decks and suit-isomorphism classes of two-card hole hands.

Card integer id (used by the numba kernels)::

    id = rank * 4 + suit      rank 0=2 ... 12=A,  suit 0=c 1=d 2=h 3=s

Ranks are absolute: a reduced deck keeps all four suits and drops the
lowest ranks, so "As" is rank 12 on every deck.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

RANK_CHARS = "23456789TJQKA"
SUIT_CHARS = "cdhs"
NUM_RANKS = 13
NUM_SUITS = 4

CLUBS, DIAMONDS, HEARTS, SPADES = range(4)


class CardError(ValueError):
    """Malformed card or hand code, or an invalid combination of cards."""


@dataclass(frozen=True, order=True)
class Card:
    rank: int
    suit: int

    def __post_init__(self):
        if not 0 <= self.rank < NUM_RANKS:
            raise CardError(f"rank out of range: {self.rank}")
        if not 0 <= self.suit < NUM_SUITS:
            raise CardError(f"suit out of range: {self.suit}")

    @property
    def id(self) -> int:
        return self.rank * NUM_SUITS + self.suit

    @classmethod
    def from_id(cls, card_id: int) -> Card:
        return cls(int(card_id) // NUM_SUITS, int(card_id) % NUM_SUITS)

    def __str__(self) -> str:
        return format_card(self)

    def __repr__(self) -> str:
        return f"Card({format_card(self)})"


def parse_card(text: str) -> Card:
    """Parse a two-character code such as ``"As"`` or ``"2c"``."""
    if len(text) != 2:
        raise CardError(f"card code must have 2 characters, got {text!r}")
    r, s = text[0], text[1]
    if r not in RANK_CHARS:
        raise CardError(f"bad rank character {r!r} in {text!r}")
    if s not in SUIT_CHARS:
        raise CardError(f"bad suit character {s!r} in {text!r}")
    return Card(RANK_CHARS.index(r), SUIT_CHARS.index(s))


def format_card(card: Card) -> str:
    return RANK_CHARS[card.rank] + SUIT_CHARS[card.suit]


def parse_cards(text: str) -> list[Card]:
    """Parse concatenated codes (``"AsKd"``); whitespace and commas are ignored."""
    compact = "".join(ch for ch in text if not ch.isspace() and ch != ",")
    if len(compact) % 2:
        raise CardError(f"odd number of characters in {text!r}")
    cards = [parse_card(compact[i : i + 2]) for i in range(0, len(compact), 2)]
    if len(set(cards)) != len(cards):
        raise CardError(f"duplicate card in {text!r}")
    return cards


def format_cards(cards) -> str:
    return "".join(format_card(c) for c in cards)


@dataclass(frozen=True)
class Deck:
    """A deck of ``ranks`` x 4 cards made of the highest ``ranks`` ranks."""

    ranks: int = NUM_RANKS

    def __post_init__(self):
        if not 5 <= self.ranks <= NUM_RANKS:
            raise CardError(f"deck needs between 5 and 13 ranks, got {self.ranks}")

    @classmethod
    def full(cls) -> Deck:
        return cls(NUM_RANKS)

    @classmethod
    def parse(cls, text: str) -> Deck:
        """``"full"`` or ``"short:R"``."""
        if text == "full":
            return cls.full()
        if text.startswith("short:"):
            try:
                return cls(int(text[6:]))
            except ValueError as exc:
                raise CardError(f"bad deck spec {text!r}: {exc}") from None
        raise CardError(f"bad deck spec {text!r}; expected 'full' or 'short:R'")

    @property
    def low_rank(self) -> int:
        return NUM_RANKS - self.ranks

    @property
    def size(self) -> int:
        return self.ranks * NUM_SUITS

    @cached_property
    def cards(self) -> tuple[Card, ...]:
        return tuple(
            Card(r, s) for r in range(self.low_rank, NUM_RANKS) for s in range(NUM_SUITS)
        )

    @cached_property
    def ids(self) -> np.ndarray:
        ids = np.array([c.id for c in self.cards], dtype=np.int64)
        ids.setflags(write=False)
        return ids

    def __contains__(self, card: Card) -> bool:
        return card.rank >= self.low_rank

    def __len__(self) -> int:
        return self.size

    def __str__(self) -> str:
        return "full" if self.ranks == NUM_RANKS else f"short:{self.ranks}"


@dataclass(frozen=True)
class CanonicalHand:
    high_rank: int
    low_rank: int
    suited: bool

    def __post_init__(self):
        if self.high_rank < self.low_rank:
            raise CardError("high_rank must be >= low_rank")
        if self.suited and self.high_rank == self.low_rank:
            raise CardError("a pair cannot be suited")

    @property
    def is_pair(self) -> bool:
        return self.high_rank == self.low_rank

    @property
    def code(self) -> str:
        hi, lo = RANK_CHARS[self.high_rank], RANK_CHARS[self.low_rank]
        if self.is_pair:
            return hi + lo
        return hi + lo + ("s" if self.suited else "o")

    @property
    def combos_count(self) -> int:
        if self.is_pair:
            return 6
        return 4 if self.suited else 12

    @classmethod
    def parse(cls, code: str) -> CanonicalHand:
        """Parse ``"AA"``, ``"AKs"``, ``"T9o"``; a concrete pair like ``"AsKd"`` also works."""
        if len(code) == 4:
            a, b = parse_cards(code)
            return canonicalize(a, b)
        if len(code) not in (2, 3) or any(ch not in RANK_CHARS for ch in code[:2]):
            raise CardError(f"bad hand code {code!r}")
        r1, r2 = RANK_CHARS.index(code[0]), RANK_CHARS.index(code[1])
        hi, lo = max(r1, r2), min(r1, r2)
        if len(code) == 2:
            if hi != lo:
                raise CardError(f"non-pair hand {code!r} needs an 's' or 'o' suffix")
            return cls(hi, lo, False)
        if code[2] not in "so" or hi == lo:
            raise CardError(f"bad hand code {code!r}")
        return cls(hi, lo, code[2] == "s")

    def combos(self) -> list[tuple[Card, Card]]:
        """All concrete hole pairs in this class, higher card first."""
        hi, lo = self.high_rank, self.low_rank
        if self.is_pair:
            return [(Card(hi, s2), Card(hi, s1)) for s1, s2 in itertools.combinations(range(4), 2)]
        out = []
        for s1 in range(4):
            for s2 in range(4):
                if (s1 == s2) == self.suited:
                    out.append((Card(hi, s1), Card(lo, s2)))
        return out

    def representative(self) -> tuple[Card, Card]:
        return self.combos()[0]

    def __str__(self) -> str:
        return self.code


def canonicalize(a: Card, b: Card) -> CanonicalHand:
    if a == b:
        raise CardError(f"duplicate card {a}")
    hi, lo = (a, b) if a.rank >= b.rank else (b, a)
    return CanonicalHand(hi.rank, lo.rank, hi.rank != lo.rank and a.suit == b.suit)


def canonical_hands(deck: Deck | None = None) -> list[CanonicalHand]:
    """Every class on ``deck`` in a fixed order: high rank descending, then
    low rank descending, suited before offsuit.  169 classes on a full deck."""
    deck = deck or Deck.full()
    out = []
    for hi in range(NUM_RANKS - 1, deck.low_rank - 1, -1):
        for lo in range(hi, deck.low_rank - 1, -1):
            if hi == lo:
                out.append(CanonicalHand(hi, lo, False))
            else:
                out.append(CanonicalHand(hi, lo, True))
                out.append(CanonicalHand(hi, lo, False))
    return out


def hand_index(deck: Deck | None = None) -> dict[CanonicalHand, int]:
    return {h: i for i, h in enumerate(canonical_hands(deck))}


def hole_pairs(deck: Deck | None = None) -> np.ndarray:
    """All C(|deck|, 2) hole pairs as an (m, 2) array of card ids, in
    lexicographic order of deck position."""
    deck = deck or Deck.full()
    return np.array(list(itertools.combinations(deck.ids.tolist(), 2)), dtype=np.int64)


def hole_class_lookup(deck: Deck | None = None) -> np.ndarray:
    """52 x 52 table mapping a pair of card ids to its class index (-1 if invalid)."""
    deck = deck or Deck.full()
    index = hand_index(deck)
    table = np.full((52, 52), -1, dtype=np.int64)
    for a, b in itertools.permutations(deck.cards, 2):
        table[a.id, b.id] = index[canonicalize(a, b)]
    return table
