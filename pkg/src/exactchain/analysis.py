"""Qualitative and quantitative analysis of finite Markov (reward) chains.

Graph-level analyses (reachability, probability-zero detection, almost-sure
certification) combine with exact linear-algebra solves for until
probabilities, expected hitting times, expected accumulated costs, and
first-entry laws.

Two conventions hold throughout and are easy to trip over:

* **Prepended start.** Every path query is about the path ``start . omega``,
  i.e. the start state itself is inspected at index 0. A start inside the
  goal set satisfies "until" immediately; a start outside both sets can
  never satisfy it.
* **Reachability takes at least one transition.** ``reachable`` collects the
  endpoints of paths with one or more edges whose *intermediate* states lie
  in the restriction set; a state reaches itself only through a cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .chain import EXACT, MarkovChain, RewardChain
from .errors import ConditionHasZeroProbabilityError, StartInTargetError

INFINITY = math.inf

#: Relative tolerance when float-mode results are compared against the
#: probability-one classification.
FLOAT_ONE_TOL = 1e-12


@dataclass(frozen=True)
class Distribution:
    """Law of the first state of a target set hit by a path.

    ``mass`` holds the strictly positive entries; ``never`` is the residual
    mass of paths that avoid the target forever. Masses plus ``never`` sum
    to one (exactly in exact mode).
    """

    mass: dict
    never: object

    def total(self):
        return sum(self.mass.values(), type(self.never)(0))


@dataclass(frozen=True)
class EdgeDistribution:
    """Law of the (predecessor, entry-state) pair at first entry of a target.

    Keys are ``(predecessor_label, entry_label)`` with the predecessor
    outside the target set and the entry state inside it.
    """

    mass: dict
    never: object

    def total(self):
        return sum(self.mass.values(), type(self.never)(0))

    def entry_marginal(self) -> Distribution:
        """Sum out the predecessor, recovering the first-entry law."""
        out = {}
        for (_, entry), p in self.mass.items():
            out[entry] = out.get(entry, 0) + p
        return Distribution(out, self.never)


def _reachable_idx(chain: MarkovChain, within: set[int], start: int) -> set[int]:
    """Indices reachable from ``start`` by >= 1 edges with intermediates in ``within``."""
    seen: set[int] = set()
    frontier = list(chain.row_by_index(start))
    seen.update(frontier)
    while frontier:
        u = frontier.pop()
        if u in within:
            for v in chain.row_by_index(u):
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
    return seen


def _can_reach_idx(chain: MarkovChain, within: set[int], targets: set[int]) -> set[int]:
    """States in ``within`` with an edge-path to ``targets`` through ``within``.

    Backward closure over the nonzero-edge graph; the returned set excludes
    the targets themselves.
    """
    preds = [[] for _ in chain.states]
    for i in range(len(chain.states)):
        for j in chain.row_by_index(i):
            preds[j].append(i)
    reached: set[int] = set()
    frontier = list(targets)
    while frontier:
        t = frontier.pop()
        for u in preds[t]:
            if u in within and u not in reached:
                reached.add(u)
                frontier.append(u)
    return reached


def reachable(chain: MarkovChain, phi, start: str) -> set[str]:
    """States reachable from ``start`` via intermediate states in ``phi``.

    A reachable state is the endpoint of some positive-probability path
    with at least one transition whose states strictly between the
    endpoints all lie in ``phi``; neither ``start`` nor the endpoint needs
    to be in ``phi``.
    """
    phi_idx = chain.index_set(phi)
    s = chain.index_of(start)
    return {chain.states[i] for i in _reachable_idx(chain, phi_idx, s)}


def until_prob_is_zero(chain: MarkovChain, phi, psi, start: str) -> bool:
    """True iff the until event has probability zero from ``start``.

    With the prepended-start convention the event is certain when the start
    is already in ``psi`` and impossible when the start lies outside
    ``phi | psi``; otherwise it is null exactly when no ``psi`` state is
    graph-reachable through ``phi - psi``.
    """
    phi_idx = chain.index_set(phi)
    psi_idx = chain.index_set(psi)
    s = chain.index_of(start)
    if s in psi_idx:
        return False
    if s not in phi_idx:
        return True
    hits = _reachable_idx(chain, phi_idx - psi_idx, s) & psi_idx
    return not hits


def certify_ae_until(chain: MarkovChain, phi, psi, start: str) -> bool:
    """Certify that the until event holds almost surely from ``start``.

    Checks the graph conditions: the start is in ``phi``, everything
    reachable through ``phi - psi`` stays inside ``phi | psi``, and every
    non-``psi`` state among them can still reach ``psi``. A ``True`` result
    certifies probability one. ``False`` only means "not certified by this
    criterion" (the condition is sufficient, not necessary).
    """
    phi_idx = chain.index_set(phi)
    psi_idx = chain.index_set(psi)
    s = chain.index_of(start)
    if s not in phi_idx:
        return False
    within = phi_idx - psi_idx
    reach = _reachable_idx(chain, within, s)
    if not reach <= (phi_idx | psi_idx):
        return False
    for t in (reach | {s}) - psi_idx:
        if not _reachable_idx(chain, within, t) & psi_idx:
            return False
    return True


def until_probabilities(chain: MarkovChain, phi, psi) -> dict:
    """Probability of the until event from every state, as a label-keyed dict.

    States in ``psi`` get 1; states classified as probability-zero by the
    graph criterion get an exact 0; the rest solve the linear fixed-point
    system ``x_s = sum_t tau(s,t) x_t`` by Gaussian elimination. The zero
    classification guarantees the remaining system is nonsingular.
    """
    phi_idx = chain.index_set(phi)
    psi_idx = chain.index_set(psi)
    n = len(chain.states)
    zero = chain.zero
    one = chain.one

    positive = _can_reach_idx(chain, phi_idx - psi_idx, psi_idx)
    unknown = sorted(positive - psi_idx)
    pos = {u: r for r, u in enumerate(unknown)}

    values = [zero] * n
    for i in psi_idx:
        values[i] = one

    if unknown:
        a = [[zero] * len(unknown) for _ in unknown]
        b = [[zero] for _ in unknown]
        for u in unknown:
            r = pos[u]
            a[r][r] = one
            for v, p in chain.row_by_index(u).items():
                if v in psi_idx:
                    b[r][0] += p
                elif v in pos:
                    a[r][pos[v]] -= p
        x = linalg.solve(a, b, chain.mode)
        for u in unknown:
            values[u] = x[pos[u]][0]

    return {chain.states[i]: values[i] for i in range(n)}


def until_probability(chain: MarkovChain, phi, psi, start: str):
    """Probability that ``start . omega`` stays in ``phi`` until hitting ``psi``."""
    chain.index_of(start)
    return until_probabilities(chain, phi, psi)[start]


def _is_one(value, mode) -> bool:
    if mode == EXACT:
        return value == 1
    return abs(value - 1.0) <= FLOAT_ONE_TOL


def _transient_block(chain: MarkovChain, phi_idx: set[int], start: int) -> list[int]:
    """States the path can occupy before first hitting ``phi``, from ``start``."""
    outside = set(range(len(chain.states))) - phi_idx
    block = ({start} | _reachable_idx(chain, outside, start)) - phi_idx
    return sorted(block)


def expected_hitting_time(chain: MarkovChain, phi, start: str):
    """Expected number of steps of ``start . omega`` before first entering ``phi``.

    Returns ``math.inf`` when the target is not reached almost surely;
    otherwise solves ``h_s = 1 + sum_t tau(s,t) h_t`` over the transient
    states reachable from the start.
    """
    phi_idx = chain.index_set(phi)
    s = chain.index_of(start)
    if s in phi_idx:
        return chain.zero
    if not _is_one(until_probability(chain, chain.states, phi, start), chain.mode):
        return INFINITY

    block = _transient_block(chain, phi_idx, s)
    pos = {u: r for r, u in enumerate(block)}
    zero, one = chain.zero, chain.one
    a = [[zero] * len(block) for _ in block]
    b = [[one] for _ in block]
    for u in block:
        r = pos[u]
        a[r][r] = one
        for v, p in chain.row_by_index(u).items():
            if v in pos:
                a[r][pos[v]] -= p
    h = linalg.solve(a, b, chain.mode)
    return h[pos[s]][0]


def expected_cost_until(rchain: RewardChain, phi, start: str):
    """Expected cost accumulated by ``start . omega`` before first entering ``phi``.

    Transition costs are charged from the first step out of the start
    onward; a start already in ``phi`` accumulates nothing. Returns
    ``math.inf`` when ``phi`` is not reached almost surely.
    """
    chain = rchain.chain
    phi_idx = chain.index_set(phi)
    s = chain.index_of(start)
    if s in phi_idx:
        return chain.zero
    if not _is_one(until_probability(chain, chain.states, phi, start), chain.mode):
        return INFINITY

    block = _transient_block(chain, phi_idx, s)
    pos = {u: r for r, u in enumerate(block)}
    zero, one = chain.zero, chain.one
    a = [[zero] * len(block) for _ in block]
    b = [[zero] for _ in block]
    for u in block:
        r = pos[u]
        a[r][r] = one
        cost_row = rchain.cost_row_by_index(u)
        for v, p in chain.row_by_index(u).items():
            b[r][0] += p * cost_row.get(v, zero)
            if v in pos:
                a[r][pos[v]] -= p
    c = linalg.solve(a, b, chain.mode)
    return c[pos[s]][0]


def _absorption_block(chain: MarkovChain, t_idx: set[int], s: int) -> list[int]:
    """Transient states that matter for first entry of the target from ``s``.

    Intersects the states the path can occupy before hitting the target
    with the states that can still reach it; outside this block every
    first-entry mass is zero, and restricting to it keeps the linear
    system nonsingular even when part of the chain can avoid the target
    forever.
    """
    outside = set(range(len(chain.states))) - t_idx
    seen = ({s} | _reachable_idx(chain, outside, s)) - t_idx
    return sorted(seen & _can_reach_idx(chain, outside, t_idx))


def _entry_edge_masses(chain: MarkovChain, t_idx: set[int], s: int) -> dict:
    """Mass of each boundary edge ``(u, c)`` at first entry into the target.

    Solves, with one right-hand-side column per boundary edge,
    ``f_s(u,c) = [s=u] tau(u,c) + sum_{t outside target} tau(s,t) f_t(u,c)``.
    """
    block = _absorption_block(chain, t_idx, s)
    if s not in block:
        return {}
    pos = {u: r for r, u in enumerate(block)}
    zero, one = chain.zero, chain.one

    edges = sorted(
        (u, v) for u in block for v in chain.row_by_index(u) if v in t_idx
    )
    edge_pos = {e: j for j, e in enumerate(edges)}
    a = [[zero] * len(block) for _ in block]
    b = [[zero] * len(edges) for _ in block]
    for u in block:
        r = pos[u]
        a[r][r] = one
        for v, p in chain.row_by_index(u).items():
            if v in t_idx:
                b[r][edge_pos[(u, v)]] += p
            elif v in pos:
                a[r][pos[v]] -= p
    x = linalg.solve(a, b, chain.mode)

    srow = pos[s]
    return {e: x[srow][j] for e, j in edge_pos.items() if x[srow][j] > 0}


def first_entry_distribution(chain: MarkovChain, target, start: str) -> Distribution:
    """Law of the first ``target`` state visited by ``start . omega``.

    A start inside the target is its own entry state with mass one. The
    ``never`` component carries the probability of avoiding the target
    forever.
    """
    t_idx = chain.index_set(target)
    s = chain.index_of(start)
    zero, one = chain.zero, chain.one
    if s in t_idx:
        return Distribution({start: one}, zero)

    block = _absorption_block(chain, t_idx, s)
    if s not in block:
        return Distribution({}, one)
    pos = {u: r for r, u in enumerate(block)}

    entries = sorted({v for u in block for v in chain.row_by_index(u) if v in t_idx})
    col = {c: j for j, c in enumerate(entries)}
    a = [[zero] * len(block) for _ in block]
    b = [[zero] * len(entries) for _ in block]
    for u in block:
        r = pos[u]
        a[r][r] = one
        for v, p in chain.row_by_index(u).items():
            if v in t_idx:
                b[r][col[v]] += p
            elif v in pos:
                a[r][pos[v]] -= p
    x = linalg.solve(a, b, chain.mode)

    srow = pos[s]
    mass = {
        chain.states[c]: x[srow][j] for c, j in col.items() if x[srow][j] > 0
    }
    return Distribution(mass, _residual(mass.values(), one, chain.mode))


def entry_edge_distribution(chain: MarkovChain, target, start: str) -> EdgeDistribution:
    """Law of the (predecessor, entry) pair at first entry into ``target``.

    Entering through an edge requires at least one step, so the start must
    lie outside the target (:class:`StartInTargetError` otherwise).
    """
    t_idx = chain.index_set(target)
    s = chain.index_of(start)
    if s in t_idx:
        raise StartInTargetError(f"start {start!r} lies in the target set")

    mass = {
        (chain.states[u], chain.states[v]): m
        for (u, v), m in _entry_edge_masses(chain, t_idx, s).items()
    }
    return EdgeDistribution(mass, _residual(mass.values(), chain.one, chain.mode))


def _residual(masses, one, mode):
    never = one - sum(masses, one - one)
    if mode != EXACT and never < 0:
        never = 0.0
    return never


def conditional_probability(p_joint, p_cond):
    """``p_joint / p_cond`` with the usual guards.

    Requires ``0 <= p_joint <= p_cond <= 1``; a zero condition raises
    :class:`ConditionHasZeroProbabilityError`.
    """
    if not (0 <= p_joint <= p_cond <= 1):
        raise ValueError(
            f"need 0 <= joint <= condition <= 1, got joint={p_joint}, condition={p_cond}"
        )
    if p_cond == 0:
        raise ConditionHasZeroProbabilityError("conditioning event has probability 0")
    if isinstance(p_joint, float) or isinstance(p_cond, float):
        return p_joint / p_cond
    return Fraction(p_joint) / Fraction(p_cond)


__all__ = [
    "Distribution",
    "EdgeDistribution",
    "INFINITY",
    "certify_ae_until",
    "conditional_probability",
    "entry_edge_distribution",
    "expected_cost_until",
    "expected_hitting_time",
    "first_entry_distribution",
    "reachable",
    "until_prob_is_zero",
    "until_probabilities",
    "until_probability",
]
