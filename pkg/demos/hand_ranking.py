# coding: utf-8

# # Ranking poker hands
#
# Every hand collapses to a single integer: the category sits in the top
# bits and up to five tiebreak ranks fill the nibbles below it, so comparing
# two hands is just comparing two ints.

# In[1]:

from infoset_budget.cards import parse_cards
from infoset_budget.handrank import Category, pack, rank5, rank7, rank7_by_subsets


# In[2]:

boat = rank5(parse_cards("KhKdKsAcAd"))
print(boat, hex(pack(boat)))


# Seven cards pick their best five.  The wheel counts as a five-high straight.

# In[3]:

for text in ["AhKhQhJhTh2c3d", "Ac2d3h4s5c9dJh", "2c2d7h7s9c9dKh", "AsKsQs2s3s4h5h"]:
    r = rank7(parse_cards(text))
    print(f"{text:16s} {r}")


# The fast path agrees with brute force over all 21 five-card subsets.

# In[4]:

cards = parse_cards("Td9d8d7d6d2h2s")
rank7(cards) == rank7_by_subsets(cards), rank7(cards).category is Category.StraightFlush
