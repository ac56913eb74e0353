"""Single-agent linear contracts backed by random safety inspections.

An agent picks an effort level i and a safety bit s.  Under the linear
contract (gamma, beta) the agent is paid gamma * reward and is inspected with
probability beta; an inspected unsafe action forfeits the payment.  Agent
utilities are

    safe:    gamma*R_i - c_i - kappa_s
    unsafe:  (1 - beta)*(1 - alpha)*gamma*R_i - c_i

where alpha is the probability that skipping the safety step backfires on its
own.  The principal earns (1 - gamma)*R_i - beta*kappa_i when the implemented
action is safe, minus infinity if the agent goes unsafe, and 0 if the agent
walks away.

The key object is the inspection-requirement curve beta(gamma): the least
inspection probability that deters every unsafe deviation at payment share
gamma.  Writing u_h for the upper envelope of the lines gamma*R_i - c_i and
gamma_tilde = u_h^{-1}(u_h(gamma) - kappa_s), it has the closed form

    beta(gamma) = max(1 - gamma_tilde / (gamma*(1 - alpha)), 0)

defined for gamma >= gamma_ir = u_h^{-1}(kappa_s).  The curve is decreasing,
and convex between envelope breakpoints but not globally.  On each piece where
both the owning segment (at gamma) and the shadow segment (at gamma_tilde) are
fixed, the principal's utility is concave in gamma with an interior stationary
point in closed form, so the optimal contract is found by scanning piece
endpoints plus interior candidates.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field, replace

from .envelope import (
    Action,
    UpperEnvelope,
    _check_assumption1,
    build_envelope,
    eval_envelope,
    invert_envelope,
    segment_at,
)
from .errors import BelowIRThreshold, InfeasibleSafety, ValidationError

#: Utilities closer than this are treated as tied when picking best responses.
TIE_TOL = 1e-12


@dataclass(frozen=True)
class AgentSpec:
    """One agent: actions plus the three cost/probability parameters.

    Actions are canonicalized to ascending cost on construction.  The
    constructor enforces strictly increasing costs and rewards (Assumption 1)
    and the field ranges; feasibility of safety itself (Assumption 2,
    max(R_i - c_i) > kappa_s) is checked by the curve builders, which raise
    InfeasibleSafety.
    """

    actions: tuple[Action, ...]
    kappa_s: float
    kappa_i: float
    alpha: float

    def __post_init__(self) -> None:
        acts = tuple(sorted(self.actions, key=lambda a: a.cost))
        object.__setattr__(self, "actions", acts)
        _check_assumption1(acts)
        if not (math.isfinite(self.kappa_s) and self.kappa_s >= 0):
            raise ValidationError(f"kappa_s must be >= 0, got {self.kappa_s!r}")
        if not (math.isfinite(self.kappa_i) and self.kappa_i > 0):
            raise ValidationError(f"kappa_i must be > 0, got {self.kappa_i!r}")
        if not (0.0 <= self.alpha < 1.0):
            raise ValidationError(f"alpha must lie in [0, 1), got {self.alpha!r}")

    @property
    def n(self) -> int:
        return len(self.actions)

    @property
    def rewards(self) -> tuple[float, ...]:
        return tuple(a.reward for a in self.actions)

    @property
    def costs(self) -> tuple[float, ...]:
        return tuple(a.cost for a in self.actions)


@dataclass(frozen=True)
class Contract:
    """A payment share and an inspection probability, both in [0, 1]."""

    gamma: float
    beta: float

    def __post_init__(self) -> None:
        if not (-1e-12 <= self.gamma <= 1 + 1e-12):
            raise ValidationError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if not (-1e-12 <= self.beta <= 1 + 1e-12):
            raise ValidationError(f"beta must lie in [0, 1], got {self.beta!r}")


@dataclass(frozen=True)
class BetaPiece:
    """Maximal gamma interval on which beta(gamma) has a single closed form.

    ``owner`` is the action dominant at gamma, ``shadow`` the action whose
    envelope segment contains gamma_tilde.  On a clamped piece the deterrence
    constraint is slack and beta(gamma) = 0.
    """

    gamma_lo: float
    gamma_hi: float
    owner: int
    shadow: int
    clamped: bool


@dataclass(frozen=True)
class BetaCurve:
    """Piecewise closed-form representation of beta(gamma) on [gamma_ir, 1]."""

    agent: AgentSpec
    envelope: UpperEnvelope
    gamma_ir: float
    pieces: tuple[BetaPiece, ...]
    _highs: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_highs", tuple(p.gamma_hi for p in self.pieces))

    def piece_at(self, gamma: float) -> BetaPiece:
        j = min(bisect_left(self._highs, gamma), len(self.pieces) - 1)
        return self.pieces[j]


def needs_inspection(agent: AgentSpec) -> bool:
    """Whether deterrence is impossible without inspection.

    True iff alpha < kappa_s / R_n: side effects alone are then too rare to
    scare the agent into the safety step, whatever the payment.  The converse
    does not hold; False only means this particular obstruction is absent.
    """
    r_top = agent.actions[-1].reward
    return agent.alpha * r_top < agent.kappa_s


def _piece_coeffs(agent: AgentSpec, piece: BetaPiece) -> tuple[float, float, float]:
    """(R_owner, C, D) with beta(gamma) = 1 - (R_owner*gamma - C) / (D*gamma)."""
    own = agent.actions[piece.owner]
    sh = agent.actions[piece.shadow]
    c_const = own.cost + agent.kappa_s - sh.cost
    return own.reward, c_const, sh.reward * (1.0 - agent.alpha)


def _beta_raw(r_own: float, c_const: float, d: float, gamma: float) -> float:
    # right-limit at gamma = 0 (reachable only when kappa_s = 0 and c_1 = 0,
    # where c_const is 0 and the piece is constant)
    if gamma <= 0.0:
        if c_const == 0.0:
            return 1.0 - r_own / d
        return math.inf if c_const > 0.0 else -math.inf
    return 1.0 - (r_own * gamma - c_const) / (d * gamma)


def _beta_on_piece(agent: AgentSpec, piece: BetaPiece, gamma: float) -> float:
    if piece.clamped:
        return 0.0
    r_own, c_const, d = _piece_coeffs(agent, piece)
    return min(max(_beta_raw(r_own, c_const, d, gamma), 0.0), 1.0)


def build_beta_curve(agent: AgentSpec) -> BetaCurve:
    """Enumerate the pieces of beta(gamma) by walking the envelope twice.

    Piece boundaries are the envelope breakpoints in (gamma_ir, 1), the
    subdivision points where gamma_tilde crosses a breakpoint, and the single
    point where beta reaches 0 (everything beyond is clamped).  Both walks are
    monotone, so there are O(n) pieces.
    """
    env = build_envelope(agent.actions)
    acts = agent.actions
    top = eval_envelope(env, acts, 1.0)
    if top <= agent.kappa_s:
        raise InfeasibleSafety(
            f"max(R_i - c_i) = {top} does not exceed kappa_s = {agent.kappa_s} "
            "(Assumption 2)"
        )
    gamma_ir = invert_envelope(env, acts, agent.kappa_s)

    cuts = {gamma_ir, 1.0}
    for b, val in zip(env.breakpoints, env.breakpoint_values):
        if gamma_ir < b < 1.0:
            cuts.add(b)
        lifted = val + agent.kappa_s
        if lifted <= top:
            g = invert_envelope(env, acts, lifted)
            if gamma_ir < g < 1.0:
                cuts.add(g)
    bounds = sorted(cuts)
    merged = [bounds[0]]
    for g in bounds[1:]:
        if g - merged[-1] > 1e-12:
            merged.append(g)
    if merged[-1] < 1.0:
        merged[-1] = 1.0

    pieces: list[BetaPiece] = []
    clamped_seen = False
    for lo, hi in zip(merged, merged[1:]):
        mid = 0.5 * (lo + hi)
        owner = env.hull_actions[segment_at(env, mid)]
        tilde = invert_envelope(env, acts, eval_envelope(env, acts, mid) - agent.kappa_s)
        shadow = env.hull_actions[segment_at(env, tilde)]
        probe = BetaPiece(lo, hi, owner, shadow, False)
        r_own, c_const, d = _piece_coeffs(agent, probe)
        beta_lo = _beta_raw(r_own, c_const, d, lo)
        beta_hi = _beta_raw(r_own, c_const, d, hi)
        if clamped_seen or beta_lo <= 0.0:
            pieces.append(BetaPiece(lo, hi, owner, shadow, True))
            clamped_seen = True
        elif beta_hi < 0.0:
            # beta hits zero inside the piece; split there, clamp the rest
            root = min(max(c_const / (r_own - d), lo), hi)
            pieces.append(BetaPiece(lo, root, owner, shadow, False))
            pieces.append(BetaPiece(root, hi, owner, shadow, True))
            clamped_seen = True
        else:
            pieces.append(probe)
    return BetaCurve(agent, env, gamma_ir, tuple(pieces))


def beta_at(curve: BetaCurve, gamma: float) -> float:
    """Evaluate beta(gamma) for gamma in [gamma_ir, 1]."""
    if gamma < curve.gamma_ir - 1e-12:
        raise BelowIRThreshold(
            f"gamma = {gamma} is below the participation threshold {curve.gamma_ir}; "
            "no safe action is implementable there"
        )
    if gamma > 1.0 + 1e-12:
        raise ValueError(f"gamma must not exceed 1, got {gamma}")
    g = min(max(gamma, curve.gamma_ir), 1.0)
    return _beta_on_piece(curve.agent, curve.piece_at(g), g)


# ---------------------------------------------------------------------------
# best responses and the optimal contract
# ---------------------------------------------------------------------------


def agent_best_response(
    agent: AgentSpec, contract: Contract
) -> tuple[int, bool] | None:
    """The agent's utility-maximizing (action index, safe?) pair, or None.

    None means the outside option: every pair has utility below 0.  Utilities
    within TIE_TOL are tied; ties prefer the safe variant, then the higher
    reward action.
    """
    gamma, beta = contract.gamma, contract.beta
    shade = (1.0 - beta) * (1.0 - agent.alpha) * gamma
    best: tuple[int, bool] | None = None
    best_u = -math.inf
    for i, act in enumerate(agent.actions):
        for safe in (True, False):
            if safe:
                u = gamma * act.reward - act.cost - agent.kappa_s
            else:
                u = shade * act.reward - act.cost
            if u > best_u + TIE_TOL:
                best, best_u = (i, safe), u
            elif u > best_u - TIE_TOL and best is not None:
                bi, bs = best
                if (safe, i) > (bs, bi):
                    best = (i, safe)
                best_u = max(best_u, u)
    if best_u < -TIE_TOL:
        return None
    return best


def principal_utility(
    agent: AgentSpec, contract: Contract, response: tuple[int, bool] | None
) -> float:
    """Principal's expected utility given the agent's response.

    An unsafe response is -inf (side effects are catastrophic to the
    principal); a rejected contract yields 0.
    """
    if response is None:
        return 0.0
    i, safe = response
    if not safe:
        return -math.inf
    return (1.0 - contract.gamma) * agent.actions[i].reward - contract.beta * agent.kappa_i


@dataclass(frozen=True)
class SingleAgentSolution:
    contract: Contract
    action: int
    utility: float


def _candidates(agent: AgentSpec, curve: BetaCurve):
    for piece in curve.pieces:
        if piece.clamped:
            # utility falls in gamma on a clamped piece, so only its left end matters
            yield piece.gamma_lo, 0.0, piece.owner
            continue
        lo, hi = piece.gamma_lo, piece.gamma_hi
        yield lo, _beta_on_piece(agent, piece, lo), piece.owner
        yield hi, _beta_on_piece(agent, piece, hi), piece.owner
        r_own, c_const, d = _piece_coeffs(agent, piece)
        sh_r = agent.actions[piece.shadow].reward
        inner = agent.kappa_i * c_const / (r_own * sh_r * (1.0 - agent.alpha))
        if inner > 0:
            g = math.sqrt(inner)
            if lo < g < hi:
                yield g, _beta_on_piece(agent, piece, g), piece.owner


def solve_single(agent: AgentSpec) -> SingleAgentSolution:
    """Optimal linear contract for one agent.

    Scans every beta-curve piece: both endpoints, plus the interior stationary
    point gamma = sqrt(kappa_i*(c_own - c_shadow + kappa_s) /
    (R_own*R_shadow*(1 - alpha))) when it falls strictly inside the piece
    (utility is concave per piece, so these candidates are exhaustive).
    Ties go to smaller beta, then smaller gamma.
    """
    curve = build_beta_curve(agent)
    best = None
    for gamma, beta, owner in _candidates(agent, curve):
        u = (1.0 - gamma) * agent.actions[owner].reward - beta * agent.kappa_i
        if (
            best is None
            or u > best[0]
            or (u == best[0] and (beta, gamma) < (best[2].beta, best[2].gamma))
        ):
            best = (u, owner, Contract(gamma, beta))
    assert best is not None
    return SingleAgentSolution(best[2], best[1], best[0])


# ---------------------------------------------------------------------------
# comparative statics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    """One row of a parameter sweep; solver fields are None when infeasible."""

    value: float
    gamma: float | None
    beta: float | None
    utility: float | None

    @property
    def feasible(self) -> bool:
        return self.gamma is not None


_SWEEPABLE = ("kappa_i", "kappa_s", "alpha")


def sweep_parameter(
    agent: AgentSpec, which: str, grid: list[float]
) -> list[SweepPoint]:
    """Re-solve the agent along a parameter grid, in grid order.

    Rows where the perturbed agent is invalid or infeasible are emitted as
    infeasible markers instead of aborting the sweep.
    """
    if which not in _SWEEPABLE:
        raise ValueError(f"which must be one of {_SWEEPABLE}, got {which!r}")
    rows: list[SweepPoint] = []
    for v in grid:
        try:
            sol = solve_single(replace(agent, **{which: v}))
        except (ValidationError, InfeasibleSafety):
            rows.append(SweepPoint(v, None, None, None))
        else:
            rows.append(SweepPoint(v, sol.contract.gamma, sol.contract.beta, sol.utility))
    return rows
