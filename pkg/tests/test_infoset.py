import json
import math

import numpy as np
import pytest

from infoset_budget.cards import CanonicalHand, Deck
from infoset_budget.infoset import (
    BudgetPlan,
    Dataset,
    InformationSetProvider,
    ProviderError,
    dataset_sizes,
    generate_dataset,
    poker_provider,
    synthetic_provider,
    validation_set,
)
from infoset_budget import rng as rngmod


def test_budget_plan():
    plan = BudgetPlan(10, 3)
    assert plan.n == 3 and plan.n * plan.k <= 10
    with pytest.raises(ValueError):
        BudgetPlan(10, 0)


def test_dataset_sizes_follow_budget():
    sizes = dataset_sizes(1_000_000, [1, 2, 3, 5, 10, 25, 50, 100, 1000])
    assert sizes == {1: 1_000_000, 2: 500_000, 3: 333_333, 5: 200_000, 10: 100_000,
                     25: 40_000, 50: 20_000, 100: 10_000, 1000: 1_000}


def test_synthetic_provider_truths():
    p = synthetic_provider([(0, [0, 1]), (1, [0, 0.5, 1]), (2, [1, 1, 1, 0])])
    assert p.ground_truth(0) == 0.5
    assert p.ground_truth(1) == 0.5
    assert p.ground_truth(2) == 0.75
    with pytest.raises(ValueError):
        synthetic_provider([(0, [])])
    with pytest.raises(ValueError):
        synthetic_provider([(0, [1.5])])


def test_generate_counts_budget():
    p = synthetic_provider([(0, [0.0, 0.25, 1.0, 0.5, 1.0])])
    ds = generate_dataset(p, BudgetPlan(10, 3), seed=1)
    assert len(ds) == 3
    assert p.evaluations == 9 == ds.evaluations
    assert ds.samples_used.sum() <= 10


def test_exhaustion_when_set_is_small():
    p = synthetic_provider([(7, [0.0, 1.0])])
    ds = generate_dataset(p, BudgetPlan(50, 5), seed=0)
    assert len(ds) == 10
    assert (ds.samples_used == 2).all()
    assert (ds.targets == 0.5).all()
    assert p.evaluations == 20


def test_exhaustion_at_equal_size_gives_exact_mean():
    p = synthetic_provider([(0, [0.0, 0.5, 1.0])])
    ds = generate_dataset(p, BudgetPlan(9, 3), seed=0)
    assert (ds.targets == 0.5).all() and (ds.samples_used == 3).all()


def test_targets_are_means_of_samples():
    p = synthetic_provider([(0, [0.0, 1.0, 1.0, 1.0, 0.0, 0.0])])
    ds = generate_dataset(p, BudgetPlan(40, 4), seed=2)
    for ex in ds:
        assert ex.samples_used == 4
        assert ex.target * 4 == pytest.approx(round(ex.target * 4))


def test_synthetic_targets_unbiased():
    spec = [(0, [0.0, 1.0, 0.25]), (1, [0.9, 0.1, 0.5, 0.5])]
    p = synthetic_provider(spec)
    ds = generate_dataset(p, BudgetPlan(200_000, 2), seed=3)
    for x, vals in spec:
        t = ds.targets[ds.observables == x]
        se = np.std(vals) / math.sqrt(2 * len(t))
        assert abs(t.mean() - np.mean(vals)) < 4 * se


def test_generation_deterministic_and_worker_independent():
    p = poker_provider(Deck(5))
    a = generate_dataset(p, BudgetPlan(300_000, 3), seed=5, workers=1)
    b = generate_dataset(poker_provider(Deck(5)), BudgetPlan(300_000, 3), seed=5, workers=4)
    assert np.array_equal(a.observables, b.observables)
    assert np.array_equal(a.targets, b.targets)
    c = generate_dataset(p, BudgetPlan(300_000, 3), seed=6)
    assert not np.array_equal(a.targets, c.targets)


class Flaky(InformationSetProvider):
    id = "flaky"

    def observables(self):
        return [0]

    def sample_observable(self, gen):
        return 0

    def sample_and_evaluate(self, x, gen):
        self._count(1)
        if self.evaluations == 17:
            raise RuntimeError("engine crashed")
        return 0.5

    def set_size(self, x):
        return math.inf


def test_provider_failure_names_example():
    with pytest.raises(ProviderError) as info:
        generate_dataset(Flaky(), BudgetPlan(100, 4), seed=0)
    # the 17th evaluation belongs to example index 4 (evaluations 17..20)
    assert info.value.example_index == 4


def test_poker_provider_outcomes_and_truth():
    p = poker_provider()
    gen = rngmod.stream(0, 99)
    aa = CanonicalHand.parse("AA")
    x = p.hands.index(aa)
    vals = {p.sample_and_evaluate(x, gen) for _ in range(200)}
    assert vals <= {0.0, 0.5, 1.0}
    assert p.ground_truth(x) == pytest.approx(0.852037133)
    sums, used = p.evaluate_many(np.array([x] * 100_000), 1, gen)
    assert abs(sums.mean() - p.ground_truth(x)) < 3 * 0.36 / math.sqrt(100_000) + 1e-3
    assert p.set_size(x) == 2_097_572_400


def test_poker_observables_uniform_over_deals():
    p = poker_provider()
    xs = p.sample_observables(rngmod.stream(1, 2), 400_000)
    pairs = np.isin(xs, [i for i, h in enumerate(p.hands) if h.is_pair]).mean()
    expected = 6 * 13 / 1326
    assert abs(pairs - expected) < 4 * math.sqrt(expected * (1 - expected) / len(xs))


def test_missing_ground_truth_is_explicit(tmp_path):
    path = tmp_path / "partial.csv"
    path.write_text("hand,equity,exact,samples\nAA,0.852037133,true,2097572400\n")
    p = poker_provider(table_path=path)
    assert p.ground_truth(p.hands.index(CanonicalHand.parse("KK"))) is None
    with pytest.raises(LookupError, match="no ground truth"):
        validation_set(p)


def test_dataset_file_round_trip(tmp_path):
    p = poker_provider()
    ds = generate_dataset(p, BudgetPlan(5000, 3), seed=1)
    path = tmp_path / "d.csv"
    ds.write(path)
    assert path.read_text().splitlines()[0] == "observable,target,samples_used"
    meta = json.loads((tmp_path / "d.csv.json").read_text())
    assert meta["N"] == 5000 and meta["k"] == 3 and meta["n"] == 1666 and meta["seed"] == 1
    assert meta["provider"] == "poker:full" and len(meta["golden_table_hash"]) == 40
    back = Dataset.read(path)
    assert np.array_equal(back.targets, ds.targets) and np.array_equal(back.observables, ds.observables)
