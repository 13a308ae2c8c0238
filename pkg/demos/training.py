# coding: utf-8

# # Regressing equity from noisy labels
#
# A small tanh network with a sigmoid output, trained under squared error,
# should converge to the conditional mean of its labels.  So noisy k=1
# labels still point at the right answer on average.

# In[1]:

import numpy as np

from infoset_budget.cards import canonical_hands
from infoset_budget.infoset import BudgetPlan, generate_dataset, poker_provider, validation_set
from infoset_budget.regressor import OneHotEncoder, TrainConfig, Validator, forward, grad_check, init_network, train

provider = poker_provider()
xs, truths, weights = validation_set(provider)
enc = OneHotEncoder(provider.observables())


# Sanity check the backward pass first.

# In[2]:

net = init_network((169, 16, 1), seed=0)
X = enc(np.arange(32) % 169)
grad_check(net, X, np.linspace(0, 1, 32), epsilon=1e-4, n_params=100)


# In[3]:

ds = generate_dataset(provider, BudgetPlan(400_000, 2), seed=3)
cfg = TrainConfig(batch_size=32, learning_rate=1e-4, epochs=1, eval_every=500)
result = train(init_network((169, 64, 64, 1), seed=3), ds.observables, ds.targets, enc, cfg,
               Validator(xs, truths, weights, enc))
best = result.trajectory.best()
best.updates, round(best.mae, 4)


# In[4]:

pred = forward(result.params, enc(xs))
worst = np.argsort(-np.abs(pred - truths))[:5]
for i in worst:
    print(canonical_hands()[xs[i]].code, round(truths[i], 3), round(pred[i], 3))
