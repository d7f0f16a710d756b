"""
Checking the analytic probabilities by simulation
=================================================

Two samplers: the weighted behavior net (fire one enabled transition at a
time, proportional to its weight) and a generative sampler that draws
timestamps, labels and occurrences directly and sorts by time.
"""

# %%
from pathlib import Path

from utrp.behavior_net import behavior_net_for, generative_sample, simulate
from utrp.io import behavior_net_to_dot, parse_log
from utrp.probability import realization_distribution
from utrp.svg import convergence_svg

DATA = Path(__file__).resolve().parent.parent / "data"
trace = parse_log(DATA / "validation_log.json").trace("validation")
analytic = realization_distribution(trace).by_sequence

bnet = behavior_net_for(trace)
print(behavior_net_to_dot(bnet))

# %%
# Frequencies after 10^5 runs of each sampler.
net_report = simulate(bnet, 100_000, seed=0)
gen_report = generative_sample(trace, 100_000, seed=0)
for sigma, p in sorted(analytic.items(), key=lambda kv: -kv[1]):
    print(
        f"<{','.join(sigma)}>".ljust(12),
        f"analytic {p:.4f}",
        f"net {net_report.frequency(sigma):.4f}",
        f"generative {gen_report.frequency(sigma):.4f}",
    )

# %%
# Running frequencies converge to the analytic values.
out = Path("convergence.svg")
out.write_text(convergence_svg(simulate(bnet, 1000, seed=1), analytic))
print("wrote", out.resolve())
