"""Per-agent utility curves and allocation of the inspection budget.

With m agents and B inspectors, the principal must split inspection
probability caps bar_beta^l across agents subject to sum <= B.  Inverting each
agent's beta(gamma) curve (strictly decreasing where positive) gives
gamma(beta), and composing with the principal's payoff yields

    U_l(beta) = (1 - gamma_l(beta)) * R_owner - beta * kappa_i_l,

concave on each inverted piece but discontinuous downward at envelope
breakpoints.  The object the allocator consumes is the running maximum
U_l(bar_beta) = max_{beta <= bar_beta} U_l(beta): nondecreasing, made of flat
stretches and strictly increasing concave stretches.  Splitting the budget is
then a multiple-choice-knapsack-style problem solved approximately on a delta
grid by dynamic programming; the discretization loss is bounded by the
Lipschitz constants of the curves.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BelowMinimumInspection,
    InfeasibleBudget,
    NonpositiveLowerBound,
    ValidationError,
)
from .single_agent import (
    AgentSpec,
    BetaCurve,
    BetaPiece,
    _beta_on_piece,
    _piece_coeffs,
    beta_at,
    build_beta_curve,
)


@dataclass(frozen=True)
class ContractChoice:
    """A concrete contract together with the action it implements."""

    gamma: float
    beta: float
    action: int
    utility: float


@dataclass(frozen=True)
class CurveSegment:
    """One segment of the monotone utility envelope over inspection caps.

    Flat segments carry the running-max value and the contract attaining it
    (its beta sits at or left of ``beta_lo``).  Rising segments are strictly
    increasing and concave; they reference the beta-curve piece whose inverse
    gamma(beta) they evaluate.
    """

    beta_lo: float
    beta_hi: float
    flat: bool
    anchor: ContractChoice
    piece_index: int = -1


@dataclass(frozen=True)
class UtilityCurve:
    """Monotone envelope of the principal's utility as a function of the cap."""

    agent: AgentSpec
    beta_curve: BetaCurve
    beta_min: float
    beta_cap: float
    base: ContractChoice
    top: ContractChoice
    segments: tuple[CurveSegment, ...]
    _lows: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_lows", tuple(s.beta_lo for s in self.segments))


def _gamma_on_piece(agent: AgentSpec, piece: BetaPiece, beta: float) -> float:
    r_own, c_const, d = _piece_coeffs(agent, piece)
    return c_const / (r_own - (1.0 - beta) * d)


def _utility_on_piece(agent: AgentSpec, piece: BetaPiece, beta: float) -> float:
    g = _gamma_on_piece(agent, piece, beta)
    return (1.0 - g) * agent.actions[piece.owner].reward - beta * agent.kappa_i


def _rising_root(agent, piece, target, lo, hi) -> float:
    """Smallest beta in [lo, hi] with utility >= target, to one ulp."""
    while True:
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            return hi
        if _utility_on_piece(agent, piece, mid) < target:
            lo = mid
        else:
            hi = mid


def build_utility_curve(agent: AgentSpec) -> UtilityCurve:
    """Invert the beta curve piecewise and apply the running maximum.

    The sweep walks the unclamped pieces from gamma = 1 downward, i.e. beta
    increasing.  Within a piece the utility is concave with its peak at the
    same stationary point the single-agent solver uses; past the peak, and
    wherever the piece never climbs above the best value seen so far, the
    envelope is flat.
    """
    bc = build_beta_curve(agent)
    acts = agent.actions
    beta_min = beta_at(bc, 1.0)

    clamped = [p for p in bc.pieces if p.clamped]
    if clamped:
        base = None
        for p in clamped:
            u = (1.0 - p.gamma_lo) * acts[p.owner].reward
            if base is None or u > base.utility:
                base = ContractChoice(p.gamma_lo, 0.0, p.owner, u)
    else:
        last = bc.pieces[-1]
        base = ContractChoice(1.0, beta_min, last.owner, -beta_min * agent.kappa_i)

    segments: list[CurveSegment] = []
    cur = base
    cursor = beta_min
    unclamped = [(i, p) for i, p in enumerate(bc.pieces) if not p.clamped]
    for idx, piece in reversed(unclamped):
        lo = cursor
        hi = _beta_on_piece(agent, piece, piece.gamma_lo)
        if hi <= lo + 1e-15:
            continue
        r_own, c_const, d = _piece_coeffs(agent, piece)
        sh_r = acts[piece.shadow].reward
        peak_gamma = math.sqrt(agent.kappa_i * c_const / (r_own * sh_r * (1.0 - agent.alpha)))
        if peak_gamma >= piece.gamma_hi:
            beta_peak = lo
        elif peak_gamma <= piece.gamma_lo:
            beta_peak = hi
        else:
            beta_peak = min(max(_beta_on_piece(agent, piece, peak_gamma), lo), hi)
        u_peak = _utility_on_piece(agent, piece, beta_peak)
        if u_peak <= cur.utility:
            segments.append(CurveSegment(lo, hi, True, cur))
        else:
            start = lo
            if _utility_on_piece(agent, piece, lo) < cur.utility:
                start = _rising_root(agent, piece, cur.utility, lo, beta_peak)
                segments.append(CurveSegment(lo, start, True, cur))
            cur = ContractChoice(
                _gamma_on_piece(agent, piece, beta_peak), beta_peak, piece.owner, u_peak
            )
            if start < beta_peak:
                segments.append(CurveSegment(start, beta_peak, False, cur, idx))
            if beta_peak < hi:
                segments.append(CurveSegment(beta_peak, hi, True, cur))
        cursor = hi

    # merge runs of flat segments sharing one anchor
    merged: list[CurveSegment] = []
    for seg in segments:
        if merged and seg.flat and merged[-1].flat and merged[-1].anchor is seg.anchor:
            merged[-1] = CurveSegment(merged[-1].beta_lo, seg.beta_hi, True, seg.anchor)
        else:
            merged.append(seg)

    return UtilityCurve(agent, bc, beta_min, cursor, base, cur, tuple(merged))


def _locate(curve: UtilityCurve, beta_bar: float) -> CurveSegment:
    j = max(bisect_right(curve._lows, beta_bar) - 1, 0)
    return curve.segments[j]


def best_contract_at(curve: UtilityCurve, beta_bar: float) -> ContractChoice:
    """Utility-maximizing contract among those with beta <= beta_bar.

    Ties between a rising stretch and the running max resolve toward the
    smaller beta, matching the single-agent tie-break.
    """
    if beta_bar < curve.beta_min - 1e-12:
        raise BelowMinimumInspection(
            f"cap {beta_bar} is below beta_min = {curve.beta_min}; "
            "no safe action is implementable within it"
        )
    if beta_bar >= curve.beta_cap or not curve.segments:
        return curve.top
    seg = _locate(curve, min(max(beta_bar, curve.beta_min), curve.beta_cap))
    if seg.flat:
        return seg.anchor
    piece = curve.beta_curve.pieces[seg.piece_index]
    b = min(max(beta_bar, seg.beta_lo), seg.beta_hi)
    return ContractChoice(
        _gamma_on_piece(curve.agent, piece, b),
        b,
        piece.owner,
        _utility_on_piece(curve.agent, piece, b),
    )


def utility_at(curve: UtilityCurve, beta_bar: float) -> float:
    """The monotone utility envelope evaluated at cap ``beta_bar``."""
    return best_contract_at(curve, beta_bar).utility


def min_beta(agent: AgentSpec) -> float:
    """Cheapest inspection implementing a safe action, beta(1)."""
    return beta_at(build_beta_curve(agent), 1.0)


# ---------------------------------------------------------------------------
# budget allocation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AllocationProblem:
    """Agents, an integer budget of inspectors, and a grid step (or target).

    Exactly one of ``delta`` and ``epsilon`` may be given; with neither,
    delta defaults to 0.01.
    """

    agents: tuple[AgentSpec, ...]
    budget: int = 1
    delta: float | None = None
    epsilon: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "agents", tuple(self.agents))
        if not self.agents:
            raise ValidationError("at least one agent is required")
        if not isinstance(self.budget, int) or self.budget < 1:
            raise ValidationError(f"budget must be a positive integer, got {self.budget!r}")
        if self.delta is not None and self.epsilon is not None:
            raise ValidationError("give delta or epsilon, not both")
        for label, v in (("delta", self.delta), ("epsilon", self.epsilon)):
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{label} must be positive, got {v!r}")


@dataclass(frozen=True)
class Allocation:
    """Caps per agent, the effective contracts below them, and quality bounds.

    ``sum(contracts[l].beta)`` may fall short of ``sum(caps)``: flat-envelope
    slack is not spent.  ``total_utility`` is within ``gap_bound`` of the best
    achievable over fractional caps.
    """

    caps: tuple[float, ...]
    contracts: tuple[ContractChoice, ...]
    total_utility: float
    gap_bound: float
    delta: float


def _lipschitz_term(agent: AgentSpec) -> float:
    # a kappa_s of 0 collapses the curve to a point, so it contributes nothing
    if agent.kappa_s == 0.0:
        return 0.0
    r_top = agent.actions[-1].reward
    return max(r_top * r_top / agent.kappa_s - agent.kappa_i, 0.0)


def gap_bound(problem: AllocationProblem, delta: float) -> float:
    """Upper bound on the DP's loss to discretization at grid step delta."""
    if delta < 0:
        raise ValidationError(f"delta must be nonnegative, got {delta!r}")
    return delta * sum(_lipschitz_term(a) for a in problem.agents)


def _resolve_delta(problem: AllocationProblem, curves: list[UtilityCurve]) -> float:
    if problem.delta is not None:
        return problem.delta
    if problem.epsilon is None:
        return 0.01
    rest = sum(c.beta_min for c in curves[1:])
    lower = utility_at(curves[0], problem.budget - rest)
    if lower <= 0.0:
        raise NonpositiveLowerBound(
            "the first agent's utility at the leftover budget is "
            f"{lower} <= 0; pass delta directly"
        )
    terms = [
        a.actions[-1].reward ** 2 / a.kappa_s for a in problem.agents if a.kappa_s > 0
    ]
    if not terms:
        return 1.0
    return problem.epsilon * lower / (len(problem.agents) * max(terms))


def _dp(
    gains: list[np.ndarray], sats: list[tuple[int, float] | None], steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Fill the budget-allocation table row by row.

    ``gains[l][eta]`` is agent l's utility gain from eta grid steps above its
    minimum inspection; ``sats[l]``, when present, is the extra saturation
    option (units charged, gain) that tops the agent out at its flat region.
    Returns the final value row and the per-cell units chosen, for
    backtracking.  argmax takes the first maximizer and saturation only wins
    strictly, so ties resolve toward spending less (no inspection wasted on
    flat curves).
    """
    m = len(gains)
    values = np.zeros(steps + 1)
    choices = np.zeros((m, steps + 1), dtype=np.int32)
    for l, g in enumerate(gains):
        sat = sats[l]
        nxt = np.empty(steps + 1)
        for j in range(steps + 1):
            k = min(j, len(g) - 1) + 1
            window = values[j - k + 1 : j + 1][::-1]
            cand = window + g[:k]
            eta = int(np.argmax(cand))
            best = cand[eta]
            if sat is not None and sat[0] <= j and values[j - sat[0]] + sat[1] > best:
                best = values[j - sat[0]] + sat[1]
                eta = sat[0]
            nxt[j] = best
            choices[l, j] = eta
        values = nxt
    return values, choices


def dp_value_table(problem: AllocationProblem) -> np.ndarray:
    """All DP rows (m+1, steps+1), for diagnostics; row 0 is the zero basis."""
    curves = [build_utility_curve(a) for a in problem.agents]
    delta, steps, gains, sats, _ = _prepare_grid(problem, curves)
    rows = [np.zeros(steps + 1)]
    values = rows[0]
    for g, sat in zip(gains, sats):
        nxt = np.empty(steps + 1)
        for j in range(steps + 1):
            k = min(j, len(g) - 1) + 1
            best = float(np.max(values[j - k + 1 : j + 1][::-1] + g[:k]))
            if sat is not None and sat[0] <= j:
                best = max(best, float(values[j - sat[0]]) + sat[1])
            nxt[j] = best
        rows.append(nxt)
        values = nxt
    return np.vstack(rows)


def _prepare_grid(problem: AllocationProblem, curves: list[UtilityCurve]):
    mins = [c.beta_min for c in curves]
    if sum(mins) > problem.budget + 1e-12:
        raise InfeasibleBudget(
            f"minimum inspections sum to {sum(mins)} > budget {problem.budget} "
            "(Assumption 3)"
        )
    delta = _resolve_delta(problem, curves)
    spare = max(problem.budget - sum(mins), 0.0)
    steps = int(math.floor(spare / delta + 1e-9))
    gains = []
    sats: list[tuple[int, float] | None] = []
    caps_x = []
    for c in curves:
        cap = min(c.beta_cap - c.beta_min, spare)
        caps_x.append(cap)
        n_l = int(math.floor(cap / delta + 1e-9))
        base = c.base.utility
        gains.append(
            np.array([utility_at(c, c.beta_min + eta * delta) - base for eta in range(n_l + 1)])
        )
        # the grid endpoint itself: reaching the flat region exactly costs a
        # rounded-up number of units but can beat every interior point
        if cap > n_l * delta + 1e-12 and n_l + 1 <= steps:
            sats.append((n_l + 1, utility_at(c, c.beta_min + cap) - base))
        else:
            sats.append(None)
    return delta, steps, gains, sats, caps_x


def allocate(problem: AllocationProblem) -> Allocation:
    """Split the inspection budget across agents by dynamic programming.

    Rewrites caps as bar_beta^l = beta_min^l + x^l so every agent keeps its
    minimum, then optimizes the x^l over a delta grid, each agent's grid
    truncated where its utility envelope goes flat (the slack returns to the
    pool).  Budget indices are integers throughout; x^l is recovered by
    backtracking the per-cell choices.
    """
    curves = [build_utility_curve(a) for a in problem.agents]
    delta, steps, gains, sats, caps_x = _prepare_grid(problem, curves)
    values, choices = _dp(gains, sats, steps)

    units = [0] * len(curves)
    j = steps
    for l in range(len(curves) - 1, -1, -1):
        units[l] = int(choices[l, j])
        j -= units[l]
    caps = []
    for c, sat, cap_x, u in zip(curves, sats, caps_x, units):
        x = cap_x if (sat is not None and u == sat[0]) else u * delta
        caps.append(float(c.beta_min + x))
    contracts = tuple(best_contract_at(c, cap) for c, cap in zip(curves, caps))
    total = sum(ch.utility for ch in contracts)
    check = sum(c.base.utility for c in curves) + values[steps]
    if abs(total - check) > 1e-6 * max(1.0, abs(total)):
        raise RuntimeError(
            f"DP value {check} disagrees with backtracked total {total}"
        )
    return Allocation(
        tuple(caps), contracts, total, gap_bound(problem, delta), delta
    )
