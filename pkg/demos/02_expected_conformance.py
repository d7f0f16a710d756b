"""
Expected conformance against a reference model
==============================================

Instead of the best, worst or average alignment cost over all possible
realizations, weight each realization's cost by its probability.
"""

# %%
from pathlib import Path

from utrp.io import parse_log, parse_net
from utrp.petri import expected_conformance, full_run_language, optimal_alignment
from utrp.probability import realization_distribution

DATA = Path(__file__).resolve().parent.parent / "data"
trace = parse_log(DATA / "credit_card_log.json").trace("5167")
model = parse_net(DATA / "fraud_model.json")
print(len(full_run_language(model)), "full runs in the model")

# %%
# An optimal alignment pairs log moves, model moves and synchronous moves.
al = optimal_alignment(("h", "r", "c", "i", "t", "v"), model)
for m in al.moves:
    print(f"{m.kind:>5}  log={m.log!s:<5} model={m.transition}")
print("cost", al.cost)

# %%
report = expected_conformance(realization_distribution(trace), model)
for sigma, cost in report.costs.items():
    print(f"<{','.join(sigma)}>".ljust(16), f"P={report.probabilities[sigma]:.4f}", f"cost={cost:g}")
print(f"expected {report.expected:.4f}  best {report.minimum:g}  worst {report.maximum:g}  "
      f"mean {report.unweighted_mean:.4f}")
