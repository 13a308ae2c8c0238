"""Heads-up preflop equity: single showdowns, exact enumeration over the
information set of a hole hand, and k-sample Monte Carlo estimates.

Outcomes are counted in half points (win 2, tie 1, loss 0) so every sum is
an exact integer regardless of how work is split.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from . import rng as rngmod
from .cards import (
    Card,
    CardError,
    CanonicalHand,
    Deck,
    canonical_hands,
    hand_index,
    hole_class_lookup,
    hole_pairs,
)
from .handrank import eval_ids

GOLDEN_NAME = "golden_equity.csv"


@dataclass(frozen=True)
class Showdown:
    hero_hole: tuple[Card, Card]
    villain_hole: tuple[Card, Card]
    board: tuple[Card, Card, Card, Card, Card]

    def __post_init__(self):
        cards = [*self.hero_hole, *self.villain_hole, *self.board]
        if len(self.hero_hole) != 2 or len(self.villain_hole) != 2 or len(self.board) != 5:
            raise CardError("a showdown needs 2 + 2 hole cards and 5 board cards")
        if len(set(cards)) != 9:
            raise CardError("card collision in showdown: " + " ".join(map(str, cards)))


@dataclass(frozen=True)
class EquityEstimate:
    mean: float
    samples_used: int
    exact: bool


@njit(cache=True, nogil=True)
def _showdown_half(hero, villain, board, buf):
    for i in range(5):
        buf[i] = board[i]
    buf[5] = hero[0]
    buf[6] = hero[1]
    h = eval_ids(buf, 7)
    buf[5] = villain[0]
    buf[6] = villain[1]
    v = eval_ids(buf, 7)
    if h > v:
        return 2
    if h == v:
        return 1
    return 0


def showdown_value(s: Showdown) -> float:
    """1 for a hero win, 0 for a loss, 0.5 for a split pot."""
    ids = lambda cs: np.array([c.id for c in cs], dtype=np.int64)  # noqa: E731
    buf = np.empty(7, dtype=np.int64)
    return _showdown_half(ids(s.hero_hole), ids(s.villain_hole), ids(s.board), buf) / 2


# ---------------------------------------------------------------- Monte Carlo

@njit(cache=True, nogil=True)
def _mc_half_points(hero, deck_ids, u):
    """Sum of half points over k uniform completions for each of n holes.

    hero: (n, 2) ids; u: (n, k, 7) uniforms.  Each completion is a partial
    Fisher-Yates draw of 7 cards: the first two go to the villain, the other
    five to the board.
    """
    n, k, _ = u.shape
    D = deck_ids.shape[0]
    R = D - 2
    rest = np.empty(R, dtype=np.int64)
    buf = np.empty(7, dtype=np.int64)
    out = np.zeros(n, dtype=np.int64)
    for e in range(n):
        a = hero[e, 0]
        b = hero[e, 1]
        m = 0
        for i in range(D):
            c = deck_ids[i]
            if c != a and c != b:
                rest[m] = c
                m += 1
        total = 0
        for s in range(k):
            for j in range(7):
                r = j + int(u[e, s, j] * (R - j))
                if r >= R:
                    r = R - 1
                t = rest[j]
                rest[j] = rest[r]
                rest[r] = t
            for j in range(5):
                buf[j] = rest[2 + j]
            buf[5] = a
            buf[6] = b
            h = eval_ids(buf, 7)
            buf[5] = rest[0]
            buf[6] = rest[1]
            v = eval_ids(buf, 7)
            if h > v:
                total += 2
            elif h == v:
                total += 1
        out[e] = total
    return out


def sample_half_points(hero: np.ndarray, k: int, deck: Deck, gen: np.random.Generator) -> np.ndarray:
    """Half-point totals of ``k`` fresh completions for each row of ``hero``."""
    hero = np.ascontiguousarray(hero, dtype=np.int64).reshape(-1, 2)
    u = gen.random((hero.shape[0], k, 7))
    return _mc_half_points(hero, deck.ids, u)


def _hero_ids(hole: CanonicalHand, deck: Deck) -> np.ndarray:
    a, b = hole.representative()
    if a not in deck or b not in deck:
        raise CardError(f"{hole} is not available on a {deck} deck")
    return np.array([[a.id, b.id]], dtype=np.int64)


def mc_equity(hole: CanonicalHand, k: int, deck: Deck | None = None, rng_seed: int = 0) -> EquityEstimate:
    """Average outcome of ``k`` independent uniform completions of ``hole``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    deck = deck or Deck.full()
    hero = _hero_ids(hole, deck)
    gen = rngmod.stream(rng_seed, rngmod.tag("mc_equity"), rngmod.tag(hole.code))
    total = 0
    # chunk very large k to bound memory; the stream is consumed sequentially
    for start in range(0, k, 1 << 18):
        total += int(sample_half_points(hero, min(1 << 18, k - start), deck, gen)[0])
    return EquityEstimate(total / (2 * k), k, False)


# ---------------------------------------------------------------- exact

def info_set_size(deck: Deck) -> int:
    """Completions (villain pair, board) of one hole hand."""
    return math.comb(deck.size - 2, 2) * math.comb(deck.size - 4, 5)


_SUIT_PERMS = np.array(list(itertools.permutations(range(4))), dtype=np.int64)


@njit(cache=True)
def _canonical_boards(deck_ids, perms):
    """Suit-canonical 52-bit mask of every 5-card board on the deck."""
    D = deck_ids.shape[0]
    count = D * (D - 1) * (D - 2) * (D - 3) * (D - 4) // 120
    out = np.empty(count, dtype=np.int64)
    card = np.empty(5, dtype=np.int64)
    idx = 0
    for a in range(D):
        card[0] = deck_ids[a]
        for b in range(a + 1, D):
            card[1] = deck_ids[b]
            for c in range(b + 1, D):
                card[2] = deck_ids[c]
                for d in range(c + 1, D):
                    card[3] = deck_ids[d]
                    for e in range(d + 1, D):
                        card[4] = deck_ids[e]
                        best = np.int64(-1)
                        for p in range(perms.shape[0]):
                            m = np.int64(0)
                            for q in range(5):
                                x = card[q]
                                m |= np.int64(1) << ((x >> 2) * 4 + perms[p, x & 3])
                            if best < 0 or m < best:
                                best = m
                        out[idx] = best
                        idx += 1
    return out


@njit(cache=True, nogil=True)
def _board_first(boards, weights, deck_ids, pair_index, n_pairs):
    """Weighted half points won by every hole pair, summed over boards.

    For each board, all hole pairs from the remaining cards are ranked once.
    A hole's wins and ties against disjoint villain pairs are counted from
    the sorted rank list, minus the pairs that share one of its cards.
    """
    D = deck_ids.shape[0]
    R = D - 5
    H = R * (R - 1) // 2
    acc = np.zeros(n_pairs, dtype=np.int64)
    used = np.zeros(52, dtype=np.bool_)
    rem = np.empty(R, dtype=np.int64)
    buf = np.empty(7, dtype=np.int64)
    ranks = np.empty(H, dtype=np.int64)
    per_card = np.empty((R, R - 1), dtype=np.int64)
    fill = np.empty(R, dtype=np.int64)
    for bi in range(boards.shape[0]):
        for q in range(5):
            buf[q] = boards[bi, q]
            used[boards[bi, q]] = True
        m = 0
        for i in range(D):
            if not used[deck_ids[i]]:
                rem[m] = deck_ids[i]
                m += 1
        for q in range(5):
            used[boards[bi, q]] = False
        fill[:] = 0
        h = 0
        for i in range(R):
            buf[5] = rem[i]
            for j in range(i + 1, R):
                buf[6] = rem[j]
                r = eval_ids(buf, 7)
                ranks[h] = r
                per_card[i, fill[i]] = r
                fill[i] += 1
                per_card[j, fill[j]] = r
                fill[j] += 1
                h += 1
        srt = np.sort(ranks)
        for i in range(R):
            per_card[i] = np.sort(per_card[i])
        w = weights[bi]
        h = 0
        for i in range(R):
            row_i = per_card[i]
            for j in range(i + 1, R):
                row_j = per_card[j]
                r = ranks[h]
                lo = np.searchsorted(srt, r, side="left")
                hi = np.searchsorted(srt, r, side="right")
                lo_i = np.searchsorted(row_i, r, side="left")
                hi_i = np.searchsorted(row_i, r, side="right")
                lo_j = np.searchsorted(row_j, r, side="left")
                hi_j = np.searchsorted(row_j, r, side="right")
                less = lo - lo_i - lo_j
                # the hole itself is in all three equal ranges
                eq = (hi - lo) - (hi_i - lo_i) - (hi_j - lo_j) + 1
                acc[pair_index[rem[i], rem[j]]] += w * (2 * less + eq)
                h += 1
    return acc


def canonical_boards(deck: Deck) -> tuple[np.ndarray, np.ndarray]:
    """One representative per suit-permutation orbit of boards, with orbit sizes."""
    masks = _canonical_boards(deck.ids, _SUIT_PERMS)
    reps, counts = np.unique(masks, return_counts=True)
    boards = np.empty((len(reps), 5), dtype=np.int64)
    for i, m in enumerate(reps.tolist()):
        boards[i] = [b for b in range(52) if (m >> b) & 1]
    return boards, counts.astype(np.int64)


@dataclass(frozen=True)
class ExactTable:
    """Exact half-point totals per canonical class on one deck."""

    deck: Deck
    hands: tuple[CanonicalHand, ...]
    half_points: tuple[int, ...]
    completions: int  # per concrete hole pair

    def fraction(self, hole: CanonicalHand) -> Fraction:
        i = self.hands.index(hole)
        return Fraction(self.half_points[i], 2 * hole.combos_count * self.completions)

    def estimate(self, hole: CanonicalHand) -> EquityEstimate:
        return EquityEstimate(float(self.fraction(hole)), self.completions, True)


def _run_chunks(fn, chunks, workers: int):
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, chunks))


@lru_cache(maxsize=4)
def exact_table(deck: Deck | None = None, workers: int = 1) -> ExactTable:
    """Exact equity of every canonical class on ``deck``.

    Class totals are invariant under suit permutations of the board, so only
    one board per orbit is enumerated and weighted by the orbit size.
    """
    deck = deck or Deck.full()
    if deck.size < 9:
        raise CardError("deck too small for a heads-up showdown")
    boards, weights = canonical_boards(deck)
    pairs = hole_pairs(deck)
    pair_index = np.full((52, 52), 0, dtype=np.int64)
    pair_index[pairs[:, 0], pairs[:, 1]] = np.arange(len(pairs))
    pair_index[pairs[:, 1], pairs[:, 0]] = np.arange(len(pairs))
    step = 2048
    chunks = [slice(s, s + step) for s in range(0, len(boards), step)]
    parts = _run_chunks(
        lambda sl: _board_first(boards[sl], weights[sl], deck.ids, pair_index, len(pairs)),
        chunks,
        workers,
    )
    acc = np.sum(parts, axis=0)
    lookup = hole_class_lookup(deck)
    hands = canonical_hands(deck)
    per_class = np.zeros(len(hands), dtype=np.int64)
    np.add.at(per_class, lookup[pairs[:, 0], pairs[:, 1]], acc)
    return ExactTable(deck, tuple(hands), tuple(int(x) for x in per_class), info_set_size(deck))


def exact_equity(hole: CanonicalHand, deck: Deck | None = None, workers: int = 1) -> EquityEstimate:
    """Mean outcome over every (villain pair, board) completion of ``hole``."""
    deck = deck or Deck.full()
    if deck.size < 9:
        raise CardError("deck too small for a heads-up showdown")
    _hero_ids(hole, deck)
    return exact_table(deck, workers).estimate(hole)


# ---------------------------------------------------------------- error profile

@dataclass
class ProfileCell:
    hand: CanonicalHand
    k: int
    truth: float
    estimates: np.ndarray = field(repr=False)

    @property
    def errors(self) -> np.ndarray:
        return np.abs(self.estimates - self.truth)

    @property
    def mean_abs_error(self) -> float:
        return float(self.errors.mean())

    @property
    def mean(self) -> float:
        return float(self.estimates.mean())

    @property
    def var(self) -> float:
        return float(self.estimates.var(ddof=1))


@dataclass
class ErrorProfile:
    cells: list[ProfileCell]
    bins: int = 50

    @property
    def ks(self) -> list[int]:
        return sorted({c.k for c in self.cells})

    def cell(self, hand: CanonicalHand, k: int) -> ProfileCell:
        return next(c for c in self.cells if c.hand == hand and c.k == k)

    def table(self) -> list[tuple[int, float, np.ndarray]]:
        """(k, mean_abs_error, histogram counts over [0, 1]) per k."""
        edges = np.linspace(0.0, 1.0, self.bins + 1)
        out = []
        for k in self.ks:
            errs = np.concatenate([c.errors for c in self.cells if c.k == k])
            counts, _ = np.histogram(errs, bins=edges)
            out.append((k, float(errs.mean()), counts))
        return out

    def write_csv(self, path: str | Path) -> None:
        edges = np.linspace(0.0, 1.0, self.bins + 1)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "mean_abs_error", "bin_lo", "bin_hi", "count"])
            for k, mae, counts in self.table():
                for lo, hi, n in zip(edges[:-1], edges[1:], counts):
                    w.writerow([k, f"{mae:.9f}", f"{lo:.4f}", f"{hi:.4f}", int(n)])


def error_profile(
    holes: Sequence[CanonicalHand],
    ks: Iterable[int],
    trials: int,
    deck: Deck | None = None,
    seed: int = 0,
    truths: dict[CanonicalHand, float] | None = None,
    bins: int = 50,
    workers: int = 1,
) -> ErrorProfile:
    """Distribution of |k-sample estimate - exact equity| over ``trials``.

    ``truths`` defaults to exact enumeration on ``deck`` (use a reduced deck,
    or pass golden-table values for the full deck).
    """
    deck = deck or Deck.full()
    index = hand_index(deck)
    if truths is None:
        table = exact_table(deck)
        truths = {h: table.estimate(h).mean for h in holes}
    cells = []
    for hole in holes:
        hero = _hero_ids(hole, deck)
        for k in ks:
            chunks = list(rngmod.blocks(trials))

            def run(chunk, hero=hero, k=k, hi=index[hole]):
                b, start, stop = chunk
                gen = rngmod.stream(seed, rngmod.tag("profile"), hi, k, b)
                return sample_half_points(np.repeat(hero, stop - start, axis=0), k, deck, gen)

            half = np.concatenate(_run_chunks(run, chunks, workers))
            cells.append(ProfileCell(hole, k, truths[hole], half / (2 * k)))
    return ErrorProfile(cells, bins)


# ---------------------------------------------------------------- golden table

@dataclass(frozen=True)
class TableEntry:
    hand: CanonicalHand
    equity: float
    exact: bool
    samples: int


def golden_path() -> Path:
    return Path(str(resources.files("infoset_budget") / "data" / GOLDEN_NAME))


def write_table(path: str | Path, entries: Sequence[TableEntry]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["hand", "equity", "exact", "samples"])
        for e in entries:
            w.writerow([e.hand.code, f"{e.equity:.9f}", "true" if e.exact else "false", e.samples])


def read_table(path: str | Path | None = None) -> dict[CanonicalHand, TableEntry]:
    path = Path(path) if path is not None else golden_path()
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            hand = CanonicalHand.parse(row["hand"])
            out[hand] = TableEntry(hand, float(row["equity"]), row["exact"] == "true", int(row["samples"]))
    return out


def content_hash(path: str | Path) -> str:
    """Git blob hash of a file's bytes."""
    data = Path(path).read_bytes()
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def build_table(
    deck: Deck | None = None,
    method: str = "exact",
    samples: int = 10_000_000,
    seed: int = 0,
    workers: int = 1,
) -> list[TableEntry]:
    """Ground-truth rows for every class: exact enumeration or ``samples``-draw MC."""
    deck = deck or Deck.full()
    hands = canonical_hands(deck)
    if method == "exact":
        table = exact_table(deck, workers)
        return [TableEntry(h, table.estimate(h).mean, True, table.completions) for h in hands]
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    out = []
    for h in hands:
        est = mc_equity(h, samples, deck, rng_seed=seed)
        out.append(TableEntry(h, est.mean, False, samples))
    return out
