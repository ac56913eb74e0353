import numpy as np
import pytest

from inspection_contracts import (
    AllocationProblem,
    BelowMinimumInspection,
    InfeasibleBudget,
    NonpositiveLowerBound,
    ValidationError,
    allocate,
    best_contract_at,
    brute_force_allocate,
    build_utility_curve,
    gap_bound,
    min_beta,
    solve_single,
    utility_at,
)
from inspection_contracts.multi_agent import dp_value_table
from conftest import make_agent, random_agent


class TestUtilityCurve:
    def test_unit1_closed_form(self, unit1):
        curve = build_utility_curve(unit1)
        assert curve.beta_min == pytest.approx(0.1, abs=1e-12)
        assert curve.beta_cap == pytest.approx(1 / 3, abs=1e-12)
        # gamma(beta) = 0.1/beta, so U(b) = 10 - 1/b - b on the rising stretch
        for b in np.linspace(0.1, 1 / 3, 20):
            assert utility_at(curve, b) == pytest.approx(10 - 1 / b - b, abs=1e-9)
        assert utility_at(curve, 0.5) == pytest.approx(10 - 3 - 1 / 3, abs=1e-9)

    def test_unit1_point_values(self, unit1):
        curve = build_utility_curve(unit1)
        assert utility_at(curve, 0.2) == pytest.approx(4.8)
        assert utility_at(curve, 0.5) == pytest.approx(20 / 3, abs=1e-9)
        assert utility_at(curve, curve.beta_min) == pytest.approx(-0.1)

    def test_below_minimum(self, unit1):
        curve = build_utility_curve(unit1)
        with pytest.raises(BelowMinimumInspection):
            utility_at(curve, 0.05)

    def test_degenerate_point_curve(self):
        agent = make_agent([10.0], [2.0], kappa_s=0.0)
        curve = build_utility_curve(agent)
        assert curve.beta_min == 0.0
        assert curve.beta_cap == 0.0
        assert curve.segments == ()
        assert utility_at(curve, 0.0) == pytest.approx(8.0)
        assert utility_at(curve, 0.7) == pytest.approx(8.0)

    def test_top_matches_solver(self):
        rng = np.random.default_rng(31)
        for _ in range(25):
            agent = random_agent(rng)
            curve = build_utility_curve(agent)
            assert curve.top.utility == pytest.approx(
                solve_single(agent).utility, abs=1e-9
            )

    def test_nondecreasing_and_continuous(self):
        rng = np.random.default_rng(77)
        for _ in range(25):
            agent = random_agent(rng)
            curve = build_utility_curve(agent)
            bs = np.linspace(curve.beta_min, max(curve.beta_cap, curve.beta_min), 200)
            vals = [utility_at(curve, b) for b in bs]
            assert all(v2 >= v1 - 1e-12 for v1, v2 in zip(vals, vals[1:]))
            for s1, s2 in zip(curve.segments, curve.segments[1:]):
                left = utility_at(curve, np.nextafter(s1.beta_hi, s1.beta_lo))
                right = utility_at(curve, s2.beta_lo)
                assert right == pytest.approx(left, abs=1e-9)

    def test_best_contract_at_attains_value(self, unit1):
        curve = build_utility_curve(unit1)
        for b in (0.1, 0.15, 0.25, 0.4, 1.0):
            ch = best_contract_at(curve, b)
            assert ch.beta <= b + 1e-12
            assert ch.utility == pytest.approx(utility_at(curve, b), abs=1e-12)


class TestMinBeta:
    def test_unit1(self, unit1):
        assert min_beta(unit1) == pytest.approx(0.1, abs=1e-12)

    def test_zero_safety_cost(self):
        assert min_beta(make_agent([10.0], [2.0], kappa_s=0.0)) == 0.0

    def test_six_action_instance(self, nonconvex6):
        # u_h(1) = 6.4; inverting 5.4 on the last segment gives 12/13
        assert min_beta(nonconvex6) == pytest.approx(1 / 13, abs=1e-9)


class TestAllocate:
    def test_four_unit1_split_evenly(self, unit1):
        alloc = allocate(AllocationProblem((unit1,) * 4, 1, delta=0.01))
        assert alloc.caps == pytest.approx([0.25] * 4, abs=1e-9)
        assert alloc.total_utility == pytest.approx(23.0, abs=1e-9)
        assert alloc.gap_bound == pytest.approx(3.96)

    def test_two_unit1_budget_slack(self, unit1):
        alloc = allocate(AllocationProblem((unit1,) * 2, 2, delta=0.01))
        assert alloc.caps == pytest.approx([1 / 3] * 2, abs=1e-9)
        assert alloc.total_utility == pytest.approx(40 / 3, abs=1e-9)
        assert sum(ch.beta for ch in alloc.contracts) < 2  # slack unspent

    def test_single_agent_reduction(self, unit1):
        alloc = allocate(AllocationProblem((unit1,), 1, delta=0.01))
        sol = solve_single(unit1)
        ch = alloc.contracts[0]
        assert (ch.gamma, ch.beta) == pytest.approx(
            (sol.contract.gamma, sol.contract.beta), abs=1e-9
        )
        assert alloc.total_utility == pytest.approx(sol.utility, abs=1e-9)

    def test_infeasible_budget(self):
        # beta_min = 0.5 each, so three of them overrun B=1
        agent = make_agent([10.0], [2.0], kappa_s=5.0)
        assert min_beta(agent) == pytest.approx(0.5)
        with pytest.raises(InfeasibleBudget):
            allocate(AllocationProblem((agent,) * 3, 1, delta=0.01))

    def test_delta_epsilon_exclusive(self, unit1):
        with pytest.raises(ValidationError):
            AllocationProblem((unit1,), 1, delta=0.01, epsilon=0.1)
        with pytest.raises(ValidationError):
            AllocationProblem((unit1,), 0, delta=0.01)

    def test_epsilon_conversion(self, unit1):
        # lower bound = U_1(B) = 20/3; max term = 100; delta = eps*L/(m*term)
        alloc = allocate(AllocationProblem((unit1,), 1, epsilon=0.15))
        assert alloc.delta == pytest.approx(0.15 * (20 / 3) / 100, abs=1e-12)

    def test_epsilon_nonpositive_lower_bound(self):
        # inspection this expensive makes even the best contract lose money
        agent = make_agent([10.0], [2.0], kappa_i=200.0)
        with pytest.raises(NonpositiveLowerBound):
            allocate(AllocationProblem((agent,), 1, epsilon=0.1))

    def test_budget_monotonicity(self):
        rng = np.random.default_rng(5150)
        for _ in range(10):
            agents = tuple(random_agent(rng, n_max=4) for _ in range(3))
            try:
                a1 = allocate(AllocationProblem(agents, 1, delta=0.02))
            except InfeasibleBudget:
                continue
            a2 = allocate(AllocationProblem(agents, 2, delta=0.02))
            assert a2.total_utility >= a1.total_utility - 1e-12

    def test_feasibility_and_grid_membership(self):
        rng = np.random.default_rng(99)
        for _ in range(15):
            m = int(rng.integers(1, 5))
            agents = tuple(random_agent(rng, n_max=5) for _ in range(m))
            problem = AllocationProblem(agents, int(rng.integers(1, 3)), delta=0.01)
            try:
                alloc = allocate(problem)
            except InfeasibleBudget:
                continue
            assert sum(alloc.caps) <= problem.budget + 1e-12
            for agent, cap, ch in zip(agents, alloc.caps, alloc.contracts):
                bmin = min_beta(agent)
                x = cap - bmin
                assert x >= -1e-12
                on_grid = abs(x / 0.01 - round(x / 0.01)) < 1e-6
                curve = build_utility_curve(agent)
                at_cap = abs(cap - curve.beta_cap) < 1e-9
                assert on_grid or at_cap
                assert bmin - 1e-12 <= ch.beta <= cap + 1e-12

    def test_dp_rows_nondecreasing(self, unit1):
        table = dp_value_table(AllocationProblem((unit1,) * 3, 2, delta=0.01))
        assert np.all(np.diff(table, axis=1) >= -1e-12)


class TestDPvsOracle:
    def test_matches_brute_force_on_same_grid(self):
        rng = np.random.default_rng(404)
        checked = 0
        while checked < 12:
            m = int(rng.integers(1, 4))
            agents = tuple(random_agent(rng, n_max=4) for _ in range(m))
            problem = AllocationProblem(agents, int(rng.integers(1, 3)), delta=0.01)
            try:
                alloc = allocate(problem)
            except InfeasibleBudget:
                continue
            ref = brute_force_allocate(problem, 0.01)
            assert alloc.total_utility >= ref.total_utility - 1e-9
            checked += 1


class TestGapBound:
    def test_unit1(self, unit1):
        problem = AllocationProblem((unit1,), 1, delta=0.01)
        assert gap_bound(problem, 0.01) == pytest.approx(0.99)

    def test_zero_delta(self, unit1):
        assert gap_bound(AllocationProblem((unit1,), 1), 0.0) == 0.0

    def test_additive(self, unit1):
        problem = AllocationProblem((unit1,) * 4, 1, delta=0.01)
        assert gap_bound(problem, 0.01) == pytest.approx(3.96)

    def test_zero_kappa_s_contributes_nothing(self):
        degenerate = make_agent([10.0], [2.0], kappa_s=0.0)
        problem = AllocationProblem((degenerate,), 1, delta=0.01)
        assert gap_bound(problem, 0.01) == 0.0

    def test_floored_at_zero(self):
        # kappa_i above R_n^2/kappa_s would make the raw term negative
        agent = make_agent([2.0], [0.5], kappa_s=1.0, kappa_i=100.0)
        problem = AllocationProblem((agent,), 1, delta=0.01)
        assert gap_bound(problem, 0.01) == 0.0
