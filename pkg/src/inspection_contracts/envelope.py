"""Upper envelope of the agent-utility lines h_i(gamma) = gamma*R_i - c_i.

The envelope u_h(gamma) = max_i h_i(gamma) is piecewise linear, increasing and
convex on [0, inf).  Which lines show up on it is decided by convex-hull
duality: line i survives iff the point (R_i, c_i) lies on the lower convex
hull of the point set, so a monotone-chain scan over the cost-sorted actions
builds the whole envelope in O(n log n) (O(n) here, since the actions arrive
sorted).  Segment j is owned by hull action i_j between two consecutive
breakpoints, and neighbouring hull lines intersect exactly at the breakpoint
they share.

The envelope is built over gamma in [0, inf); truncation to [0, 1] is a
caller concern.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

from .errors import BelowRange, DegenerateInput, ValidationError

#: Absolute tolerance for real comparisons (collinearity test, range checks).
ATOL = 1e-9


@dataclass(frozen=True)
class Action:
    """One effort level: expected reward and effort cost, in currency units."""

    reward: float
    cost: float

    def __post_init__(self) -> None:
        for label, v in (("reward", self.reward), ("cost", self.cost)):
            if not math.isfinite(v):
                raise ValidationError(f"action {label} must be finite, got {v!r}")
            if v < 0:
                raise ValidationError(f"action {label} must be nonnegative, got {v!r}")


@dataclass(frozen=True)
class UpperEnvelope:
    """Hull actions i_1 < ... < i_k and the gamma values where ownership changes.

    ``breakpoints`` holds the k-1 interior crossings, strictly increasing;
    the implicit outer endpoints are 0 and +inf.  Segment j (0-based) is owned
    by ``hull_actions[j]``.  ``breakpoint_values`` caches u_h at each
    breakpoint so inversion can binary-search segments.
    """

    hull_actions: tuple[int, ...]
    breakpoints: tuple[float, ...]
    breakpoint_values: tuple[float, ...]


def _check_assumption1(actions: list[Action] | tuple[Action, ...]) -> None:
    if not actions:
        raise ValidationError("at least one action is required")
    for k in range(1, len(actions)):
        prev, cur = actions[k - 1], actions[k]
        if cur.cost == prev.cost or cur.reward == prev.reward:
            raise DegenerateInput(
                f"actions {k - 1} and {k} share a cost or a reward "
                f"(costs {prev.cost}, {cur.cost}; rewards {prev.reward}, {cur.reward})"
            )
        if cur.cost < prev.cost or cur.reward < prev.reward:
            raise DegenerateInput(
                f"actions must be strictly increasing in both cost and reward; "
                f"violated at index {k}"
            )


def build_envelope(actions: list[Action] | tuple[Action, ...]) -> UpperEnvelope:
    """Build the upper envelope of the lines gamma*R_i - c_i.

    Expects actions sorted with strictly increasing costs and rewards
    (Assumption 1); raises DegenerateInput otherwise.  A line collinear with
    its hull neighbours (cross product within ``ATOL`` of zero) is weakly
    dominated and dropped, so every segment has a unique owner.
    """
    _check_assumption1(actions)
    hull: list[int] = []
    for i, act in enumerate(actions):
        # lower hull of (reward, cost): pop the middle point unless the chain
        # turns strictly counterclockwise there
        while len(hull) >= 2:
            o = actions[hull[-2]]
            a = actions[hull[-1]]
            cross = (a.reward - o.reward) * (act.cost - o.cost) - (
                act.reward - o.reward
            ) * (a.cost - o.cost)
            if cross <= ATOL:
                hull.pop()
            else:
                break
        hull.append(i)

    breakpoints: list[float] = []
    values: list[float] = []
    for j in range(1, len(hull)):
        lo, hi = actions[hull[j - 1]], actions[hull[j]]
        g = (hi.cost - lo.cost) / (hi.reward - lo.reward)
        breakpoints.append(g)
        values.append(g * hi.reward - hi.cost)
    if any(b >= a for a, b in zip(breakpoints[1:], breakpoints)):
        raise RuntimeError("envelope breakpoints are not strictly increasing")
    return UpperEnvelope(tuple(hull), tuple(breakpoints), tuple(values))


def segment_at(env: UpperEnvelope, gamma: float) -> int:
    """Index of the envelope segment owning ``gamma``.

    A gamma sitting exactly on a breakpoint belongs to the right (higher
    reward) segment.
    """
    return bisect_right(env.breakpoints, gamma)


def eval_envelope(
    env: UpperEnvelope, actions: list[Action] | tuple[Action, ...], gamma: float
) -> float:
    """u_h(gamma) = max_i (gamma*R_i - c_i), exact on the owning segment."""
    if gamma < 0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    act = actions[env.hull_actions[segment_at(env, gamma)]]
    return gamma * act.reward - act.cost


def invert_envelope(
    env: UpperEnvelope, actions: list[Action] | tuple[Action, ...], y: float
) -> float:
    """The unique gamma >= 0 with u_h(gamma) = y.

    Uniqueness comes from strict monotonicity of the envelope on [0, inf).
    Raises BelowRange when y is below u_h(0) = -min_i c_i.
    """
    floor = -actions[env.hull_actions[0]].cost
    if y < floor - ATOL * 1e-3:
        raise BelowRange(f"target {y} is below the envelope minimum {floor}")
    j = bisect_left(env.breakpoint_values, y)
    act = actions[env.hull_actions[j]]
    if act.reward <= 0.0:
        # flat first segment (zero-reward action): y can only be the floor
        return 0.0
    return max((y + act.cost) / act.reward, 0.0)
