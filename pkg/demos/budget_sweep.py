# coding: utf-8

# # The budget trade-off, small scale
#
# One run per (k, seed); each seed uses the same initial weights for every k
# so the comparison is paired.  This is a reduced version of the full
# experiment (two million evaluations, six values of k, five seeds), which
# takes a few minutes on one core via `infoset-budget sweep`.

# In[1]:

import tempfile

from infoset_budget.sweep import SweepConfig, check_orderings, run_sweep

out = tempfile.mkdtemp()
cfg = SweepConfig(ks=(1, 3, 10, 100), budget=300_000, seeds=(0, 1, 2))
result = run_sweep(cfg, out)


# In[2]:

for k, m in result.medians().items():
    print(f"k={k:<4d} median best MAE {m:.5f}")


# At this budget a single pass gives k=1 ten times the updates of k=10, and
# that wins outright.  The optimum moves to small k > 1 only once the budget
# is large enough that the network sees plenty of updates either way, as in
# the full two-million-evaluation run.

# In[3]:

check_orderings(result, ks_better=(3, 10))


# In[4]:

print(open(f"{out}/summary_by_k.csv").read())
