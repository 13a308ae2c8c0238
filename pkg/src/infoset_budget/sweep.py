"""The budget trade-off experiment: one fresh regressor per (k, seed),
each trained on a dataset built from the same evaluation budget.

Two comparison axes come out of every run:

* evaluation axis: every k spent the same budget N building its dataset,
  so the best validation error over the whole run is comparable;
* update axis: the best validation error within the first
  ``update_budget`` updates, equal for every k.
"""

from __future__ import annotations

import csv
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .cards import Deck
from .infoset import BudgetPlan, generate_dataset, poker_provider, validation_set
from .regressor import (
    CompactHandEncoder,
    OneHotEncoder,
    TrainConfig,
    Trajectory,
    Validator,
    init_network,
    train,
)

log = logging.getLogger(__name__)

DEFAULT_KS = (1, 2, 3, 5, 10, 25, 50, 100, 1000)

# single pass over each dataset, so a larger k also means fewer updates; the
# small step keeps k=1's label noise from being averaged away within a pass
SWEEP_TRAIN = TrainConfig(
    batch_size=32,
    learning_rate=4e-5,
    max_updates=1_000_000,
    epochs=1,
    eval_every=500,
    patience=20,
)

SUMMARY_HEADER = [
    "k",
    "n",
    "seed",
    "best_mae_evalaxis",
    "best_mse_evalaxis",
    "best_mae_updateaxis",
    "best_mse_updateaxis",
    "updates_to_best",
    "wallclock_s",
]


class SweepError(RuntimeError):
    def __init__(self, k: int, seed: int, cause: BaseException, partial: SweepResult):
        super().__init__(f"run k={k} seed={seed} failed: {cause!r}")
        self.k, self.seed, self.partial = k, seed, partial


@dataclass
class SweepConfig:
    ks: tuple[int, ...] = DEFAULT_KS
    budget: int = 2_000_000
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    update_budget: int = 3_000
    train: TrainConfig = field(default_factory=lambda: replace(SWEEP_TRAIN))
    deck: Deck = field(default_factory=Deck.full)
    table_path: str | None = None
    encoder: str = "onehot"
    workers: int = 1

    def __post_init__(self):
        self.ks = tuple(int(k) for k in self.ks)
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.ks or any(k < 1 for k in self.ks):
            raise ValueError("ks must be a non-empty list of integers >= 1")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if self.update_budget < 1:
            raise ValueError("update_budget must be >= 1")


@dataclass
class RunResult:
    k: int
    seed: int
    n: int
    evaluations: int
    trajectory: Trajectory
    best_mae_evalaxis: float
    best_mse_evalaxis: float
    best_mae_updateaxis: float
    best_mse_updateaxis: float
    updates_to_best: int
    wallclock_s: float


@dataclass
class SweepResult:
    config: SweepConfig
    runs: dict[tuple[int, int], RunResult] = field(default_factory=dict)
    failures: dict[tuple[int, int], str] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return all((k, s) in self.runs for k in self.config.ks for s in self.config.seeds)

    def missing(self, k: int) -> list[int]:
        return [s for s in self.config.seeds if (k, s) not in self.runs]

    def values(self, k: int, column: str) -> list[float]:
        return [getattr(self.runs[(k, s)], column) for s in self.config.seeds if (k, s) in self.runs]

    def median(self, k: int, column: str = "best_mae_evalaxis") -> float:
        return statistics.median(self.values(k, column))

    def medians(self, column: str = "best_mae_evalaxis") -> dict[int, float]:
        return {k: self.median(k, column) for k in self.config.ks if self.values(k, column)}


def _encoder(name: str, provider):
    if name == "onehot":
        return OneHotEncoder(provider.observables())
    if name == "compact":
        return CompactHandEncoder(provider.hands)
    raise ValueError(f"unknown encoder {name!r}")


def run_one(config: SweepConfig, k: int, seed: int) -> RunResult:
    provider = poker_provider(config.deck, config.table_path)
    encoder = _encoder(config.encoder, provider)
    xs, truths, weights = validation_set(provider)
    validator = Validator(xs, truths, weights, encoder)

    plan = BudgetPlan(config.budget, k)
    data = generate_dataset(provider, plan, seed=seed, workers=1)
    if provider.evaluations != plan.n * k or provider.evaluations > config.budget:
        raise AssertionError(f"budget accounting: provider counted {provider.evaluations}, plan {plan.n}x{k}")

    tcfg = replace(config.train, seed=seed)
    # same initial weights for every k under one seed
    net = init_network((encoder.dim, *tcfg.hidden, 1), seed=seed, activation=tcfg.activation)
    res = train(net, data.observables, data.targets, encoder, tcfg, validator, evaluations=provider.evaluations)
    traj = res.trajectory
    best = traj.best("mae")
    return RunResult(
        k=k,
        seed=seed,
        n=len(data),
        evaluations=provider.evaluations,
        trajectory=traj,
        best_mae_evalaxis=best.mae,
        best_mse_evalaxis=traj.best("mse").mse,
        best_mae_updateaxis=traj.best("mae", config.update_budget).mae,
        best_mse_updateaxis=traj.best("mse", config.update_budget).mse,
        updates_to_best=best.updates,
        wallclock_s=res.wallclock_s,
    )


def _run_job(args):
    config, k, seed = args
    try:
        return k, seed, run_one(config, k, seed), None
    except Exception as exc:  # reported back to the parent with (k, seed)
        return k, seed, None, exc


def run_sweep(config: SweepConfig, out_dir: str | Path | None = None) -> SweepResult:
    """Train every (k, seed) cell.  With ``out_dir``, each finished run's
    trajectory is written immediately and a report is emitted at the end
    (also when a run fails, before the error is raised)."""
    result = SweepResult(config)
    jobs = [(config, k, s) for k in config.ks for s in config.seeds]
    if out_dir is not None:
        Path(out_dir, "trajectories").mkdir(parents=True, exist_ok=True)

    def done(k, seed, run, exc):
        if exc is not None:
            result.failures[(k, seed)] = repr(exc)
            if out_dir is not None:
                emit_report(result, out_dir)
            raise SweepError(k, seed, exc, result) from exc
        result.runs[(k, seed)] = run
        log.info("k=%d seed=%d n=%d best_mae=%.5f", k, seed, run.n, run.best_mae_evalaxis)
        if out_dir is not None:
            run.trajectory.write_csv(Path(out_dir, "trajectories", f"k{k}_s{seed}.csv"))

    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            for out in pool.map(_run_job, jobs):
                done(*out)
    else:
        for job in jobs:
            done(*_run_job(job))
    if out_dir is not None:
        emit_report(result, out_dir)
    return result


def _fmt(x: float) -> str:
    return f"{x:.9f}"


def emit_report(result: SweepResult, out_dir: str | Path) -> list[Path]:
    """Write trajectories, ``summary.csv`` (one row per run),
    ``summary_by_k.csv`` (one row per k) and ``long.csv`` (plot-ready)."""
    out = Path(out_dir)
    (out / "trajectories").mkdir(parents=True, exist_ok=True)
    cfg = result.config
    written = []
    for (k, s), run in sorted(result.runs.items()):
        p = out / "trajectories" / f"k{k}_s{s}.csv"
        run.trajectory.write_csv(p)
        written.append(p)

    p = out / "summary.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for k in cfg.ks:
            for s in cfg.seeds:
                run = result.runs.get((k, s))
                if run is None:
                    w.writerow([k, BudgetPlan(cfg.budget, k).n, s] + ["missing"] * 6)
                    continue
                w.writerow([
                    k, run.n, s,
                    _fmt(run.best_mae_evalaxis), _fmt(run.best_mse_evalaxis),
                    _fmt(run.best_mae_updateaxis), _fmt(run.best_mse_updateaxis),
                    run.updates_to_best, f"{run.wallclock_s:.3f}",
                ])
    written.append(p)

    cols = ["best_mae_evalaxis", "best_mse_evalaxis", "best_mae_updateaxis", "best_mse_updateaxis"]
    p = out / "summary_by_k.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["k", "n", "seeds_done", "seeds_missing"]
        for c in cols:
            header += [f"{c}_mean", f"{c}_std", f"{c}_median"]
        w.writerow(header)
        for k in cfg.ks:
            row = [k, BudgetPlan(cfg.budget, k).n, len(result.values(k, cols[0])),
                   ";".join(str(s) for s in result.missing(k))]
            for c in cols:
                vals = result.values(k, c)
                if not vals:
                    row += ["missing"] * 3
                    continue
                std = statistics.stdev(vals) if len(vals) > 1 else 0.0
                row += [_fmt(statistics.fmean(vals)), _fmt(std), _fmt(statistics.median(vals))]
            w.writerow(row)
    written.append(p)

    p = out / "long.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "seed", "updates", "evaluations", "metric", "value"])
        for (k, s), run in sorted(result.runs.items()):
            for pt in run.trajectory.points:
                for metric in ("mae", "mse", "mae_weighted", "mse_weighted"):
                    w.writerow([k, s, pt.updates, pt.evaluations, metric, _fmt(getattr(pt, metric))])
    written.append(p)
    return written


def check_orderings(result: SweepResult, ks_better: Sequence[int] = (2, 3, 5, 10)) -> dict[str, bool]:
    """The qualitative orderings the experiment is expected to show, on
    seed medians of best MAE."""
    ev = result.medians("best_mae_evalaxis")
    up = result.medians("best_mae_updateaxis")
    out = {}
    if 1 in ev:
        out["k1_worse_than_small_k"] = all(ev[1] > ev[k] for k in ks_better if k in ev)
    if 1000 in ev and 3 in ev:
        out["k1000_worse_than_k3"] = ev[1000] > ev[3]
    chain = [k for k in sorted(up) if 1 <= k <= 10]
    out["update_axis_nonincreasing"] = all(up[a] >= up[b] for a, b in zip(chain, chain[1:]))
    return out
