"""Information-set providers and the budgeted dataset generator.

A provider knows how to draw an observable ``x``, draw one hidden
completion ``h`` uniformly from the information set of ``x`` and score it,
and (optionally) report the exact mean over the whole set.  Every scored
completion is counted, so budget accounting comes from the provider side.
"""

from __future__ import annotations

import csv
import hashlib
import json
import threading
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import rng as rngmod
from .cards import Deck, canonical_hands, hole_class_lookup, hole_pairs
from .equity import (
    content_hash,
    exact_table,
    golden_path,
    info_set_size,
    read_table,
    sample_half_points,
)

# evaluations per generation block; fixes the dataset for a given seed
BLOCK_EVALS = 1 << 16


class ProviderError(RuntimeError):
    def __init__(self, example_index: int, cause: BaseException):
        super().__init__(f"provider failed on example {example_index}: {cause!r}")
        self.example_index = example_index


class _ItemError(Exception):
    def __init__(self, index: int):
        self.index = index


class InformationSetProvider(ABC):
    """Base class for information-set samplers.

    Subclasses implement the four scalar methods; the batch methods have
    generic loops that fast providers override.
    """

    id: str = "provider"

    def __init__(self):
        self._lock = threading.Lock()
        self.evaluations = 0

    def _count(self, n: int) -> None:
        with self._lock:
            self.evaluations += int(n)

    @abstractmethod
    def observables(self) -> list[int]:
        """Every observable id, in feature order."""

    @abstractmethod
    def sample_observable(self, gen: np.random.Generator) -> int: ...

    @abstractmethod
    def sample_and_evaluate(self, x: int, gen: np.random.Generator) -> float: ...

    @abstractmethod
    def set_size(self, x: int) -> float:
        """Size of I(x); ``math.inf`` when unbounded."""

    def ground_truth(self, x: int) -> float | None:
        return None

    def enumerate_values(self, x: int) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} cannot enumerate I({x})")

    def weights(self) -> np.ndarray:
        """Probability of drawing each observable (for deal-weighted metrics)."""
        n = len(self.observables())
        return np.full(n, 1.0 / n)

    def sample_observables(self, gen: np.random.Generator, n: int) -> np.ndarray:
        return np.array([self.sample_observable(gen) for _ in range(n)], dtype=np.int64)

    def evaluate_many(self, xs: np.ndarray, k: int, gen: np.random.Generator):
        """Sum of values and number of evaluations for each observable.

        Sets with at most ``k`` states are enumerated once instead of sampled.
        """
        sums = np.empty(len(xs))
        used = np.empty(len(xs), dtype=np.int64)
        for i, x in enumerate(xs.tolist()):
            try:
                if self.set_size(x) <= k:
                    vals = self.enumerate_values(x)
                    self._count(len(vals))
                    sums[i], used[i] = float(np.sum(vals)), len(vals)
                else:
                    sums[i] = sum(self.sample_and_evaluate(x, gen) for _ in range(k))
                    used[i] = k
            except Exception as exc:
                raise _ItemError(i) from exc
        return sums, used


class SyntheticProvider(InformationSetProvider):
    """Observables with explicit finite outcome multisets."""

    def __init__(self, spec: Sequence[tuple[int, Sequence[float]]]):
        super().__init__()
        self._ids = []
        self._values = {}
        for x, outcomes in spec:
            vals = np.asarray(outcomes, dtype=float)
            if vals.size == 0:
                raise ValueError(f"observable {x} has an empty outcome multiset")
            if np.any((vals < 0) | (vals > 1)):
                raise ValueError(f"outcomes for observable {x} must lie in [0, 1]")
            self._ids.append(int(x))
            self._values[int(x)] = vals
        text = json.dumps([[x, self._values[x].tolist()] for x in self._ids])
        self.id = "synthetic:" + hashlib.sha1(text.encode()).hexdigest()[:12]

    def observables(self):
        return list(self._ids)

    def sample_observable(self, gen):
        return self._ids[int(gen.integers(len(self._ids)))]

    def sample_and_evaluate(self, x, gen):
        vals = self._values[x]
        self._count(1)
        return float(vals[int(gen.integers(len(vals)))])

    def set_size(self, x):
        return len(self._values[x])

    def ground_truth(self, x):
        return float(self._values[x].mean())

    def enumerate_values(self, x):
        return self._values[x].copy()


def synthetic_provider(spec: Sequence[tuple[int, Sequence[float]]]) -> SyntheticProvider:
    return SyntheticProvider(spec)


class PokerProvider(InformationSetProvider):
    """Observable: canonical class of a uniformly dealt hole pair.
    Completion: villain pair plus board, scored 0 / 0.5 / 1."""

    def __init__(self, deck: Deck | None = None, table_path: str | Path | None = None):
        super().__init__()
        self.deck = deck or Deck.full()
        self.hands = canonical_hands(self.deck)
        self._pairs = hole_pairs(self.deck)
        self._pair_class = hole_class_lookup(self.deck)[self._pairs[:, 0], self._pairs[:, 1]]
        self._reps = np.array([[c.id for c in h.representative()] for h in self.hands], dtype=np.int64)
        self._truth: dict[int, float] = {}
        self.table_hash = None
        if table_path is not None or self.deck == Deck.full():
            path = Path(table_path) if table_path is not None else golden_path()
            if path.exists():
                entries = read_table(path)
                self.table_hash = content_hash(path)
                for i, h in enumerate(self.hands):
                    if h in entries:
                        self._truth[i] = entries[h].equity
        else:
            table = exact_table(self.deck)
            self._truth = {i: table.estimate(h).mean for i, h in enumerate(self.hands)}
        self.id = f"poker:{self.deck}"

    def observables(self):
        return list(range(len(self.hands)))

    def weights(self):
        w = np.array([h.combos_count for h in self.hands], dtype=float)
        return w / w.sum()

    def sample_observables(self, gen, n):
        return self._pair_class[gen.integers(len(self._pairs), size=n)]

    def sample_observable(self, gen):
        return int(self.sample_observables(gen, 1)[0])

    def sample_and_evaluate(self, x, gen):
        return float(self.evaluate_many(np.array([x]), 1, gen)[0][0])

    def evaluate_many(self, xs, k, gen):
        half = sample_half_points(self._reps[np.asarray(xs, dtype=np.int64)], k, self.deck, gen)
        self._count(len(xs) * k)
        return half / 2.0, np.full(len(xs), k, dtype=np.int64)

    def set_size(self, x):
        return info_set_size(self.deck)

    def ground_truth(self, x):
        return self._truth.get(int(x))


def poker_provider(deck: Deck | None = None, table_path: str | Path | None = None) -> PokerProvider:
    return PokerProvider(deck, table_path)


@dataclass(frozen=True)
class BudgetPlan:
    total_budget: int
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"samples per example must be >= 1, got {self.k}")
        if self.total_budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.total_budget}")

    @property
    def n(self) -> int:
        return self.total_budget // self.k


class LabeledExample(NamedTuple):
    observable: int
    target: float
    samples_used: int


@dataclass
class Dataset:
    observables: np.ndarray
    targets: np.ndarray
    samples_used: np.ndarray
    plan: BudgetPlan
    seed: int
    provider_id: str
    evaluations: int
    table_hash: str | None = None

    def __len__(self) -> int:
        return len(self.observables)

    def __getitem__(self, i: int) -> LabeledExample:
        return LabeledExample(int(self.observables[i]), float(self.targets[i]), int(self.samples_used[i]))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def metadata(self) -> dict:
        return {
            "N": self.plan.total_budget,
            "k": self.plan.k,
            "n": len(self),
            "seed": self.seed,
            "provider": self.provider_id,
            "evaluations": self.evaluations,
            "golden_table_hash": self.table_hash,
        }

    def write(self, path: str | Path) -> None:
        """CSV ``observable,target,samples_used`` plus ``<path>.json`` metadata."""
        path = Path(path)
        lines = ["observable,target,samples_used"]
        lines += [
            f"{o},{t!r},{s}"
            for o, t, s in zip(self.observables.tolist(), self.targets.tolist(), self.samples_used.tolist())
        ]
        path.write_text("\n".join(lines) + "\n")
        Path(str(path) + ".json").write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path: str | Path) -> Dataset:
        path = Path(path)
        meta = json.loads(Path(str(path) + ".json").read_text())
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.size == 0:
            data = np.empty((0, 3))
        return cls(
            data[:, 0].astype(np.int64),
            data[:, 1].astype(float),
            data[:, 2].astype(np.int64),
            BudgetPlan(meta["N"], meta["k"]),
            meta["seed"],
            meta["provider"],
            meta["evaluations"],
            meta.get("golden_table_hash"),
        )


def generate_dataset(
    provider: InformationSetProvider,
    plan: BudgetPlan,
    seed: int = 0,
    workers: int = 1,
) -> Dataset:
    """Draw ``plan.n`` observables and label each with the mean of ``plan.k``
    sampled evaluations.  Leftover budget ``N mod k`` is not spent."""
    n, k = plan.n, plan.k
    per_block = max(1, BLOCK_EVALS // k)
    chunks = list(rngmod.blocks(n, per_block))
    before = provider.evaluations

    def run(chunk):
        b, start, stop = chunk
        gen = rngmod.stream(seed, rngmod.tag("dataset"), rngmod.tag(provider.id), k, b)
        try:
            xs = provider.sample_observables(gen, stop - start)
            sums, used = provider.evaluate_many(xs, k, gen)
        except _ItemError as exc:
            raise ProviderError(start + exc.index, exc.__cause__) from exc.__cause__
        except Exception as exc:
            raise ProviderError(start, exc) from exc
        return xs, sums, used

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    if parts:
        xs = np.concatenate([p[0] for p in parts]).astype(np.int64)
        sums = np.concatenate([p[1] for p in parts])
        used = np.concatenate([p[2] for p in parts])
    else:
        xs, sums, used = np.empty(0, np.int64), np.empty(0), np.empty(0, np.int64)
    targets = np.divide(sums, used, out=np.zeros_like(sums), where=used > 0)
    return Dataset(
        xs,
        targets,
        used,
        plan,
        seed,
        provider.id,
        provider.evaluations - before,
        getattr(provider, "table_hash", None),
    )


def validation_set(provider: InformationSetProvider):
    """(observables, exact values, deal weights) over every observable."""
    xs = provider.observables()
    truths = [provider.ground_truth(x) for x in xs]
    missing = [x for x, t in zip(xs, truths) if t is None]
    if missing:
        raise LookupError(f"no ground truth for observables {missing[:10]} (provider {provider.id})")
    return np.array(xs, dtype=np.int64), np.array(truths, dtype=float), provider.weights()


def dataset_sizes(total_budget: int, ks: Sequence[int]) -> dict[int, int]:
    return {k: BudgetPlan(total_budget, k).n for k in ks}


__all__ = [
    "BudgetPlan",
    "Dataset",
    "InformationSetProvider",
    "LabeledExample",
    "PokerProvider",
    "ProviderError",
    "SyntheticProvider",
    "dataset_sizes",
    "generate_dataset",
    "poker_provider",
    "synthetic_provider",
    "validation_set",
]
