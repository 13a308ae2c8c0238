"""Command line entry point.

Exit codes: 0 success, 1 a check reported failure, 2 usage or input error,
3 partial result, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import rng as rngmod
from .cards import CanonicalHand, CardError, Deck, canonical_hands, parse_cards
from .equity import (
    build_table,
    content_hash,
    error_profile,
    exact_equity,
    golden_path,
    info_set_size,
    mc_equity,
    read_table,
    sample_half_points,
    write_table,
)
from .handrank import rank_best
from .infoset import BudgetPlan, Dataset, generate_dataset, poker_provider, validation_set
from .regressor import (
    CompactHandEncoder,
    OneHotEncoder,
    TrainConfig,
    Validator,
    grad_check,
    init_network,
    save_checkpoint,
    train,
)
from .sweep import DEFAULT_KS, SWEEP_TRAIN, SweepConfig, SweepError, run_sweep

OUT_ENV = "INFOSET_BUDGET_OUT"


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _deck(text: str) -> Deck:
    try:
        return Deck.parse(text)
    except CardError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _out_dir(args) -> Path:
    return Path(args.out or os.environ.get(OUT_ENV, "."))


def _print_config(command: str, args) -> None:
    cfg = {k: (str(v) if isinstance(v, (Deck, Path)) else v) for k, v in vars(args).items() if k != "func"}
    print("config:", json.dumps({"command": command, **cfg}, sort_keys=True))


def _hand(code: str, deck: Deck) -> CanonicalHand:
    hand = CanonicalHand.parse(code)
    if hand.low_rank < deck.low_rank:
        raise UsageError(f"{hand} is not available on a {deck} deck")
    return hand


def cmd_rank(args) -> int:
    cards = parse_cards(args.cards)
    if len(cards) not in (5, 7):
        raise UsageError(f"rank needs 5 or 7 cards, got {len(cards)}")
    print(rank_best(cards))
    return 0


def cmd_equity(args) -> int:
    hand = _hand(args.hand, args.deck)
    if args.mode == "exact":
        if args.deck == Deck.full() and not args.confirm_long:
            n = info_set_size(args.deck)
            raise UsageError(
                f"exact mode on the full deck covers {n:,} showdowns per hand "
                f"(the enumerator needs about a minute of one core); "
                f"pass --confirm-long to run it, or read the golden table"
            )
        est = exact_equity(hand, args.deck, workers=args.workers)
    else:
        est = mc_equity(hand, args.k, args.deck, rng_seed=args.seed)
    print(f"hand={hand.code} mean={est.mean:.9f} samples_used={est.samples_used} exact={str(est.exact).lower()}")
    return 0


def cmd_mc(args) -> int:
    hand = _hand(args.hand, args.deck)
    hero = np.array([[c.id for c in hand.representative()]], dtype=np.int64)
    print("trial,estimate")
    for t in range(args.trials):
        gen = rngmod.stream(args.seed, rngmod.tag("cli-mc"), t)
        half = int(sample_half_points(hero, args.k, args.deck, gen)[0])
        print(f"{t},{half / (2 * args.k):.9f}")
    return 0


def cmd_table(args) -> int:
    out = Path(args.out) if args.out else Path(os.environ.get(OUT_ENV, ".")) / "golden_equity.csv"
    rows = build_table(args.deck, args.method, args.samples, args.seed, args.workers)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_table(out, rows)
    meta = {
        "method": args.method,
        "deck": str(args.deck),
        "samples": args.samples if args.method == "mc" else None,
        "seed": args.seed if args.method == "mc" else None,
        "hands": len(rows),
        "content_hash": content_hash(out),
    }
    Path(str(out) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out} ({len(rows)} hands, hash {meta['content_hash']})")
    return 0


def _provider(args):
    table = getattr(args, "table", None)
    if args.deck == Deck.full():
        path = Path(table) if table else golden_path()
        if not path.exists():
            raise UsageError(f"golden table {path} not found; build one with the 'table' command")
    return poker_provider(args.deck, table)


def cmd_gen(args) -> int:
    provider = _provider(args)
    data = generate_dataset(provider, BudgetPlan(args.budget, args.k), seed=args.seed, workers=args.workers)
    out = Path(args.out) if args.out else Path(os.environ.get(OUT_ENV, ".")) / f"dataset_k{args.k}_s{args.seed}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    data.write(out)
    print(f"wrote {out}: n={len(data)} evaluations={data.evaluations}")
    return 0


def _train_config(args, base: TrainConfig) -> TrainConfig:
    fields = {
        "batch_size": args.batch_size,
        "learning_rate": args.lr,
        "optimizer": args.optimizer,
        "max_updates": args.max_updates,
        "epochs": args.epochs,
        "eval_every": args.eval_every,
        "patience": args.patience,
        "hidden": tuple(args.hidden) if args.hidden else None,
    }
    return dataclasses.replace(base, **{k: v for k, v in fields.items() if v is not None})


def _encoder(name, provider):
    return OneHotEncoder(provider.observables()) if name == "onehot" else CompactHandEncoder(provider.hands)


def cmd_train(args) -> int:
    data = Dataset.read(args.data)
    provider = _provider(args)
    if data.provider_id != provider.id:
        raise UsageError(f"dataset was generated by {data.provider_id}, not {provider.id}")
    encoder = _encoder(args.encoder, provider)
    cfg = _train_config(args, dataclasses.replace(TrainConfig(), seed=args.seed))
    validator = Validator(*validation_set(provider), encoder)
    net = init_network((encoder.dim, *cfg.hidden, 1), seed=args.seed, activation=cfg.activation)
    res = train(net, data.observables, data.targets, encoder, cfg, validator, evaluations=data.evaluations)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    save_checkpoint(out / "checkpoint.json", res.params, cfg, encoder=args.encoder, dataset=data.metadata())
    res.trajectory.write_csv(out / "trajectory.csv")
    best = res.trajectory.best()
    print(f"updates={res.updates} best_mae={best.mae:.6f} at update {best.updates}; wrote {out}")
    return 0


def cmd_sweep(args) -> int:
    deck = args.deck
    table = args.table
    if deck == Deck.full():
        path = Path(table) if table else golden_path()
        if not path.exists():
            raise UsageError(f"golden table {path} not found; build one with the 'table' command")
    out = _out_dir(args)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"error: cannot write to {out}: {exc}", file=sys.stderr)
        return 4
    cfg = SweepConfig(
        ks=tuple(args.ks),
        budget=args.budget,
        seeds=tuple(args.seeds),
        update_budget=args.update_budget,
        train=_train_config(args, SWEEP_TRAIN),
        deck=deck,
        table_path=table,
        encoder=args.encoder,
        workers=args.workers,
    )
    try:
        result = run_sweep(cfg, out)
    except SweepError as exc:
        print(f"error: {exc}; partial results in {out}", file=sys.stderr)
        return 3
    print((out / "summary_by_k.csv").read_text(), end="")
    return 0 if result.complete else 3


def cmd_gradcheck(args) -> int:
    net = init_network(args.sizes, seed=args.seed)
    gen = rngmod.stream(args.seed, rngmod.tag("gradcheck-batch"))
    X = np.eye(args.sizes[0])[gen.integers(args.sizes[0], size=args.batch)]
    y = gen.random(args.batch)
    err = grad_check(net, X, y, epsilon=args.epsilon, n_params=args.params, seed=args.seed)
    ok = err < args.tolerance
    print(f"max_relative_error={err:.3e} tolerance={args.tolerance:g} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_profile_error(args) -> int:
    hands = [_hand(h, args.deck) for h in args.hands.split(",")]
    truths = None
    if args.deck == Deck.full():
        entries = read_table(args.table)
        truths = {h: entries[h].equity for h in hands}
    prof = error_profile(hands, args.ks, args.trials, args.deck, args.seed, truths, workers=args.workers)
    print("k,mean_abs_error")
    for k, mae, _ in prof.table():
        print(f"{k},{mae:.9f}")
    if args.out:
        prof.write_csv(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="infoset-budget", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    default_workers = os.cpu_count() or 1

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--workers", type=int, default=default_workers)
        return sp

    def add_train_flags(sp):
        sp.add_argument("--lr", type=float)
        sp.add_argument("--batch-size", type=int)
        sp.add_argument("--optimizer", choices=["adam", "sgd"])
        sp.add_argument("--max-updates", type=int)
        sp.add_argument("--epochs", type=int)
        sp.add_argument("--eval-every", type=int)
        sp.add_argument("--patience", type=int)
        sp.add_argument("--hidden", type=_ints)
        sp.add_argument("--encoder", choices=["onehot", "compact"], default="onehot")

    sp = add("rank", cmd_rank, "rank a 5- or 7-card hand")
    sp.add_argument("--cards", required=True)

    sp = add("equity", cmd_equity, "exact or Monte Carlo equity of one hand")
    sp.add_argument("--hand", required=True)
    sp.add_argument("--mode", choices=["exact", "mc"], default="mc")
    sp.add_argument("--k", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--deck", type=_deck, default=Deck.full())
    sp.add_argument("--confirm-long", action="store_true")

    sp = add("mc", cmd_mc, "independent k-sample estimates for one hand")
    sp.add_argument("--hand", required=True)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--deck", type=_deck, default=Deck.full())

    sp = add("table", cmd_table, "regenerate the ground-truth equity table")
    sp.add_argument("--out")
    sp.add_argument("--method", choices=["exact", "mc"], default="exact")
    sp.add_argument("--samples", type=int, default=10_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--deck", type=_deck, default=Deck.full())

    sp = add("gen", cmd_gen, "generate a budgeted labeled dataset")
    sp.add_argument("--budget", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--deck", type=_deck, default=Deck.full())
    sp.add_argument("--table")
    sp.add_argument("--out")

    sp = add("train", cmd_train, "train a regressor on a generated dataset")
    sp.add_argument("--data", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--deck", type=_deck, default=Deck.full())
    sp.add_argument("--table")
    sp.add_argument("--out")
    add_train_flags(sp)

    sp = add("sweep", cmd_sweep, "run the budget trade-off experiment")
    sp.add_argument("--budget", type=int, default=2_000_000)
    sp.add_argument("--ks", type=_ints, default=list(DEFAULT_KS))
    sp.add_argument("--seeds", type=_ints, default=[0, 1, 2, 3, 4])
    sp.add_argument("--update-budget", type=int, default=3_000)
    sp.add_argument("--deck", type=_deck, default=Deck.full())
    sp.add_argument("--table")
    sp.add_argument("--out")
    add_train_flags(sp)

    sp = add("gradcheck", cmd_gradcheck, "finite-difference check of backprop")
    sp.add_argument("--sizes", type=_ints, default=[169, 16, 1])
    sp.add_argument("--batch", type=int, default=32)
    sp.add_argument("--epsilon", type=float, default=1e-4)
    sp.add_argument("--params", type=int, default=200)
    sp.add_argument("--tolerance", type=float, default=1e-4)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("profile-error", cmd_profile_error, "error of k-sample estimates vs exact equity")
    sp.add_argument("--hands", required=True)
    sp.add_argument("--ks", type=_ints, default=[1, 2, 3, 5, 10, 50])
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--deck", type=_deck, default=Deck.full())
    sp.add_argument("--table")
    sp.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    command = args.command
    del args.command
    _print_config(command, args)
    try:
        return args.func(args)
    except (UsageError, CardError, ValueError, LookupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
