# coding: utf-8

# # Spending a fixed evaluation budget
#
# With N evaluations and k samples per example we get floor(N/k) examples.
# Many cheap noisy labels or few expensive clean ones?

# In[1]:

import numpy as np

from infoset_budget.infoset import BudgetPlan, dataset_sizes, generate_dataset, poker_provider

dataset_sizes(2_000_000, [1, 2, 3, 5, 10, 1000])


# In[2]:

provider = poker_provider()
ds = generate_dataset(provider, BudgetPlan(60_000, 3), seed=0)
len(ds), ds.evaluations, ds[0]


# Labels from k=3 can only take values on a grid of sixths.

# In[3]:

np.unique(ds.targets)


# Datasets round-trip through CSV plus a JSON sidecar carrying N, k, seed and
# the hash of the truth table.

# In[4]:

import tempfile, pathlib

path = pathlib.Path(tempfile.mkdtemp()) / "k3.csv"
ds.write(path)
print(path.with_suffix(".csv.json").read_text())
