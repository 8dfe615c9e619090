#!/usr/bin/env python3
"""Crowds anonymity: who do the collaborators really see?

Explores the three-jondo example crowd and larger ones: the chance a
collaborator joins a route, the conditional law linking the initiator to
the jondo observed contacting a collaborator, probable innocence, and the
mutual-information ceiling on what the attackers learn.
"""

from fractions import Fraction as F

from exactchain.crowds import (
    FIG3,
    build_crowds,
    conditional_joint,
    first_last_jondo_joint,
    is_product_joint,
    last_jondo_distribution,
    make_params,
    mi_bound,
    mi_exact,
    prob_first_eq_last,
    prob_hit_colls,
    probable_innocence,
    solver_hit_prob,
)

print("Small crowd: jondos J1, J2, J3 with J3 collaborating, p_f = 1/2")
model = build_crowds(FIG3)
print("  states:", ", ".join(model.chain.states))

hit = prob_hit_colls(FIG3)
print(f"\n  P(route meets a collaborator) = {hit}  (solver: {solver_hit_prob(model)})")
print(f"  P(initiator is the observed contact | hit) = {prob_first_eq_last(FIG3)}")
print("  conditional joint (initiator, observed contact):")
for (i, l), mass in conditional_joint(FIG3).items():
    print(f"    {i} initiated, {l} observed: {mass}")

# The server-side view carries nothing: the contacting jondo is uniform
# and independent of the initiator.
print("\n  server contact law:",
      {j: str(m) for j, m in sorted(last_jondo_distribution(model).mass.items())})
print("  (initiator, server contact) factorizes:",
      is_product_joint(first_last_jondo_joint(model)))
print("  (initiator, collaborator contact) factorizes:",
      is_product_joint(conditional_joint(FIG3)), " <- the attackers do learn")

print(f"\n  attacker information gain: {mi_exact(FIG3):.4f} bits"
      f" (bound {mi_bound(FIG3):.4f} bits)")

print("\nGrowing the crowd (one collaborator, p_f = 3/4):")
print(f"  {'J':>3}  {'P(hit)':>8}  {'P(first=last|hit)':>18}  {'MI bits':>8}  {'bound':>7}")
for j in range(3, 9):
    params = make_params(j, 1, F(3, 4))
    print(f"  {j:>3}  {float(prob_hit_colls(params)):>8.4f}"
          f"  {float(prob_first_eq_last(params)):>18.4f}"
          f"  {mi_exact(params):>8.4f}  {mi_bound(params):>7.4f}")

print("\nProbable innocence: how much forwarding does a crowd need?")
print("(the initiator should look no likelier than 1/2 to be the contact)")
print(f"  {'J':>3} {'colls':>5} {'threshold p_f':>14}  {'p_f=3/4 enough?':>15}")
for j, c in [(5, 1), (8, 1), (8, 2), (10, 2), (12, 3)]:
    params = make_params(j, c, F(3, 4))
    verdict = probable_innocence(params)
    print(f"  {j:>3} {c:>5} {str(verdict.threshold):>14}  {str(verdict.holds):>15}")

params = make_params(10, 2, F(5, 7))
print("\nAt the exact threshold p_f = 5/7 for J=10 with 2 collaborators:"
      f" P(first=last|hit) = {prob_first_eq_last(params)}")
