"""Learning information-set values from k-sample Monte Carlo labels under a
fixed evaluation budget, with heads-up preflop poker as the worked domain."""

from .cards import Card, CanonicalHand, Deck, canonicalize, canonical_hands, format_card, parse_card
from .equity import EquityEstimate, Showdown, error_profile, exact_equity, mc_equity, showdown_value
from .handrank import Category, HandRank, rank5, rank7
from .infoset import (
    BudgetPlan,
    Dataset,
    InformationSetProvider,
    LabeledExample,
    generate_dataset,
    poker_provider,
    synthetic_provider,
)
from .regressor import Network, TrainConfig, forward, grad_check, init_network, loss, train
from .sweep import SweepConfig, SweepResult, emit_report, run_sweep

__version__ = "0.1.0"
