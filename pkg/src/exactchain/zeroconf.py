"""Parametric model of ZeroConf link-local address allocation.

A host picks a random IPv4 link-local address (65024 candidates) and sends
``N + 1`` ARP probes to detect a collision. With probability ``q`` the
address is already taken; each probe or its response is lost with
probability ``p``. Losing all probes on a taken address ends in ``Error``
(a double allocation, repaired at cost ``E``); a response sends the host
back to picking a new address. Each probe round costs ``r`` seconds.

The module builds the finite Markov reward chain of this process and
evaluates its closed-form error probability and expected running cost,
both cross-checkable against the generic exact solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import analysis
from .chain import EXACT, RewardChain, format_scalar, validate_chain, validate_reward
from .errors import InvalidParamsError
from .simulate import SimConfig, estimate_cost, estimate_until

START = "Start"
OK = "Ok"
ERROR = "Error"

#: Link-local pool size: addresses 169.254.1.0 through 169.254.254.255.
ADDRESS_POOL = 65024


def probe_label(n: int) -> str:
    return f"Probe {n}"


def hosts_to_q(hosts: int) -> Fraction:
    """Collision probability when ``hosts`` addresses are already taken."""
    return Fraction(hosts, ADDRESS_POOL)


def _coerce_param(value, name):
    if isinstance(value, float):
        return value
    try:
        return Fraction(str(value)) if isinstance(value, str) else Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InvalidParamsError(f"cannot parse parameter {name}={value!r}") from None


@dataclass(frozen=True)
class ZeroconfParams:
    """Protocol parameters: probes are numbered ``0 .. N`` (``N + 1`` total).

    ``p`` is the probe/response loss probability, ``q`` the probability of
    picking a taken address, ``r`` the duration of one probe round in
    seconds, ``E`` the penalty for a double allocation in seconds.
    """

    N: int
    p: object
    q: object
    r: object
    E: object

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 0:
            raise InvalidParamsError(f"N must be a natural number, got {self.N!r}")
        for name in ("p", "q", "r", "E"):
            object.__setattr__(self, name, _coerce_param(getattr(self, name), name))
        if not 0 < self.p < 1:
            raise InvalidParamsError(f"need 0 < p < 1, got p={self.p}")
        if not 0 < self.q < 1:
            raise InvalidParamsError(f"need 0 < q < 1, got q={self.q}")
        if self.r < 0:
            raise InvalidParamsError(f"need r >= 0, got r={self.r}")
        if self.E < 0:
            raise InvalidParamsError(f"need E >= 0, got E={self.E}")

    def with_mode(self, mode: str) -> "ZeroconfParams":
        """Copy with numeric fields converted for the requested arithmetic."""
        if mode == EXACT:
            return self
        return ZeroconfParams(
            self.N, float(self.p), float(self.q), float(self.r), float(self.E)
        )


#: 16 hosts on the network, 3 probe rounds, 1% packet loss, 2 ms round
#: trips, one hour repair penalty.
PAPER_TYPICAL = ZeroconfParams(
    N=2, p=Fraction(1, 100), q=hosts_to_q(16), r=Fraction(1, 500), E=3600
)

#: Commonly quoted error-probability bound for the typical parameters;
#: exact evaluation shows it does not hold (see the report's bound audit).
CLAIMED_ERROR_BOUND = Fraction(1, 10**13)


def state_labels(params: ZeroconfParams) -> list[str]:
    """All states, enumerated as the three named states plus each probe."""
    return [START, OK, ERROR] + [probe_label(n) for n in range(params.N + 1)]


def build_zeroconf(params: ZeroconfParams, mode: str = EXACT) -> RewardChain:
    """Build the validated allocation chain with its cost matrix."""
    params = params.with_mode(mode)
    n, p, q, r, e = params.N, params.p, params.q, params.r, params.E
    one = Fraction(1) if mode == EXACT else 1.0

    trans = {
        (START, probe_label(0)): q,
        (START, OK): one - q,
        (OK, OK): one,
        (ERROR, ERROR): one,
    }
    cost = {
        (START, probe_label(0)): r,
        (START, OK): r * (n + 1),
    }
    for i in range(n + 1):
        probe = probe_label(i)
        nxt = probe_label(i + 1) if i < n else ERROR
        trans[(probe, nxt)] = p
        trans[(probe, START)] = one - p
        cost[(probe, nxt)] = r if i < n else e

    chain = validate_chain(state_labels(params), trans, mode)
    return validate_reward(chain, cost)


def p_err_closed(params: ZeroconfParams):
    """Closed-form probability of ending in ``Error`` from ``Start``."""
    p, q = params.p, params.q
    pn1 = p ** (params.N + 1)
    return (q * pn1) / (1 - q * (1 - pn1))


def p_err_probe_closed(params: ZeroconfParams, n: int):
    """Closed-form error probability from ``Probe n``.

    An error needs the remaining ``N - n + 1`` probes to be lost in a row,
    or a response followed by an erroneous restart.
    """
    if not 0 <= n <= params.N:
        raise ValueError(f"probe index must lie in 0..{params.N}, got {n}")
    tail = params.p ** (params.N - n + 1)
    return tail + (1 - tail) * p_err_closed(params)


def expected_cost_closed(params: ZeroconfParams):
    """Closed-form expected running cost until ``Ok`` or ``Error``.

    Solving the absorption equations of the chain gives

        (q*(r + p^(N+1)*E + r*p*(1 - p^N)/(1 - p)) + (1-q)*r*(N+1))
        / (1 - q*(1 - p^(N+1)))

    which the exact solver validates term for term.
    """
    n, p, q, r, e = params.N, params.p, params.q, params.r, params.E
    pn1 = p ** (n + 1)
    restart_rounds = q * (r + pn1 * e + r * p * (1 - p**n) / (1 - p))
    direct = (1 - q) * r * (n + 1)
    return (restart_rounds + direct) / (1 - q * (1 - pn1))


def _triple(closed, solver):
    return {
        "closed_form": format_scalar(closed),
        "solver": format_scalar(solver),
        "difference": format_scalar(closed - solver),
    }


def zeroconf_report(
    params: ZeroconfParams, mode: str = EXACT, sim: SimConfig | None = None
) -> dict:
    """Closed forms, solver values, their differences, certification verdicts.

    In exact mode every ``difference`` field is exactly ``0``. The bound
    audit compares the exact error probability against the commonly quoted
    ``1/10**13`` and flags the comparison instead of failing. With ``sim``
    given, seeded Monte Carlo estimates are attached.
    """
    params = params.with_mode(mode)
    rchain = build_zeroconf(params, mode)
    chain = rchain.chain
    states = chain.states
    goal = {OK, ERROR}

    p_err = analysis.until_probabilities(chain, states, {ERROR})
    cost_solver = analysis.expected_cost_until(rchain, goal, START)
    p_err_value = p_err_closed(params)

    report = {
        "model": "zeroconf",
        "mode": mode,
        "params": {
            "N": params.N,
            "p": format_scalar(params.p),
            "q": format_scalar(params.q),
            "r": format_scalar(params.r),
            "E": format_scalar(params.E),
        },
        "states": list(states),
        "p_err_start": _triple(p_err_value, p_err[START]),
        "p_err_probe": {
            probe_label(n): _triple(p_err_probe_closed(params, n), p_err[probe_label(n)])
            for n in range(params.N + 1)
        },
        "expected_cost": _triple(expected_cost_closed(params), cost_solver),
        "ae_termination": {
            s: analysis.certify_ae_until(chain, states, goal, s) for s in states
        },
        "bound_audit": {
            "claimed_error_bound": format_scalar(CLAIMED_ERROR_BOUND),
            "exact_p_err": format_scalar(p_err_value),
            "p_err_float": float(p_err_value),
            "within_claimed_bound": bool(p_err_value <= CLAIMED_ERROR_BOUND),
        },
    }

    if sim is not None:
        est_err = estimate_until(chain, states, {ERROR}, START, sim)
        est_cost = estimate_cost(rchain, goal, START, sim)
        report["simulation"] = {
            "seed": sim.seed,
            "samples": sim.samples,
            "max_steps": sim.max_steps,
            "p_err_start": {
                "provenance": "simulation",
                "mean": est_err.mean,
                "std_error": est_err.std_error,
                "censored": est_err.censored,
                "exact": float(p_err[START]),
            },
            "expected_cost": {
                "provenance": "simulation",
                "mean": est_cost.mean,
                "std_error": est_cost.std_error,
                "censored": est_cost.censored,
                "exact": float(cost_solver),
            },
        }
    return report
