#!/usr/bin/env python3
"""Walk through the chain core: validation, reachability, exact solving.

Builds a tiny job-queue chain by hand, asks the classic questions about
it, and shows that every answer is an exact rational number.
"""

from fractions import Fraction as F

from exactchain import (
    certify_ae_until,
    entry_edge_distribution,
    expected_cost_until,
    expected_hitting_time,
    first_entry_distribution,
    reachable,
    until_prob_is_zero,
    until_probability,
    validate_chain,
    validate_reward,
)

# A job moves through a queue. From "queued" it is picked up or dropped;
# a running job finishes, fails, or gets requeued. "done" and "lost" absorb.
chain = validate_chain(
    ["queued", "running", "done", "failed", "lost"],
    {
        ("queued", "running"): F(9, 10),
        ("queued", "lost"): F(1, 10),
        ("running", "done"): F(7, 10),
        ("running", "failed"): F(1, 10),
        ("running", "queued"): F(2, 10),
        ("failed", "queued"): F(1),
        ("done", "done"): F(1),
        ("lost", "lost"): F(1),
    },
)
print("validated:", chain)

print("\nOne-step successors of 'queued':", sorted(chain.successors("queued")))
print("Reachable from 'queued' through non-absorbing states:",
      sorted(reachable(chain, {"queued", "running", "failed"}, "queued")))

# The probability of finishing: stay anywhere until hitting {done}.
everything = set(chain.states)
p_done = until_probability(chain, everything, {"done"}, "queued")
print("\nP(eventually done) =", p_done, f"~ {float(p_done):.6f}")
print("P(eventually done) from 'lost' is provably zero:",
      until_prob_is_zero(chain, everything, {"done"}, "lost"))

# Termination (done or lost) is certain, so its hitting time is finite.
goal = {"done", "lost"}
print("\nAlmost-sure termination certified:",
      certify_ae_until(chain, everything, goal, "queued"))
print("Expected steps to termination:",
      expected_hitting_time(chain, goal, "queued"))

# Where does the process land first, and through which edge?
law = first_entry_distribution(chain, goal, "queued")
print("\nFirst-entry law:", {k: str(v) for k, v in law.mass.items()},
      "never =", law.never)
edges = entry_edge_distribution(chain, goal, "queued")
print("Entry edges:", {f"{u}->{v}": str(m) for (u, v), m in edges.mass.items()})

# Attach per-transition costs: one second per scheduling round trip.
rchain = validate_reward(chain, {
    ("queued", "running"): F(1),
    ("running", "queued"): F(1),
    ("failed", "queued"): F(3),
})
print("\nExpected cost until termination:",
      expected_cost_until(rchain, goal, "queued"))
