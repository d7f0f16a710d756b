"""
Non-uniform timestamp densities and ties
========================================

Weak timestamp uncertainty accepts any piecewise-polynomial density.  The
ordering integral stays exact; ties between identical point timestamps are
split evenly.
"""

# %%
import numpy as np

from utrp.behavior_net import generative_sample
from utrp.density import PiecewiseDensity
from utrp.model import Certain, Point, UncertainEvent, UncertainTrace, WeakDensity
from utrp.probability import order_probability_integral, realization_distribution

# A triangular density on [0, 2] (linear pieces over each half) against a
# uniform one on [1, 3].
triangle = PiecewiseDensity.from_pieces([(0, 1, [0.0, 1.0]), (1, 2, [1.0, -1.0])])
trace = UncertainTrace("demo", (
    UncertainEvent("e1", "demo", Certain("a"), WeakDensity(triangle)),
    UncertainEvent("e2", "demo", Certain("b"), WeakDensity(PiecewiseDensity.uniform(1, 3))),
))
print("P(a before b) =", order_probability_integral(("e1", "e2"), trace))

# %%
# Cross-check with plain numpy sampling.
rng = np.random.default_rng(0)
x = triangle.sample(rng, 1_000_000)
y = rng.uniform(1, 3, 1_000_000)
print("Monte Carlo   ~", np.mean(x < y))

# %%
# Three events at the same instant: six orders, 1/6 each.
tie = UncertainTrace("tie", tuple(
    UncertainEvent(f"e{i}", "tie", Certain(lab), Point(0.0)) for i, lab in enumerate("xyz")
))
sampled = generative_sample(tie, 60_000, seed=2)
for sigma, p in realization_distribution(tie).sorted_items():
    print(sigma, round(p, 4), round(sampled.frequency(sigma), 4))
