# coding: utf-8

# # Equity: exact values and k-sample noise
#
# A 20-card deck (tens through aces) keeps exact enumeration cheap, so this
# notebook stays under a minute.  The full-deck table ships with the package.

# In[1]:

import numpy as np

from infoset_budget.cards import CanonicalHand, Deck
from infoset_budget.equity import error_profile, exact_equity, exact_table, mc_equity, read_table

deck = Deck(5)
table = exact_table(deck)
aa = CanonicalHand.parse("AA")
table.fraction(aa), float(table.fraction(aa))


# One showdown per sample gives a win/tie/loss label; averaging k of them
# gives a noisy estimate of the equity above.

# In[2]:

for k in (1, 10, 1000, 100_000):
    est = mc_equity(aa, k, deck, rng_seed=7)
    print(f"k={k:>6d}  {est.mean:.4f}")


# How quickly does the error shrink?  Roughly like 1/sqrt(k).

# In[3]:

hands = [CanonicalHand.parse(c) for c in ("AA", "KQs", "JTo")]
profile = error_profile(hands, [1, 3, 10, 100], trials=20_000, deck=deck, seed=1)
for k, mae, counts in profile.table():
    print(f"k={k:<4d} mean |error| {mae:.4f}  sqrt(k)*mae {np.sqrt(k) * mae:.3f}")


# # Full deck
#
# Reading the bundled table is instant; regenerating it takes about a minute.

# In[4]:

full = read_table()
for code in ("AA", "AKs", "72o"):
    print(code, full[CanonicalHand.parse(code)].equity)
