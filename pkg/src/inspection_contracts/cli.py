"""Batch command-line front end.

Subcommands: solve, beta-curve, sweep, allocate, schedule, verify.  One
command per process; CSV and key=value output is deterministic given the
inputs and seed.  Exit codes: 0 ok, 1 infeasible instance, 2 invalid input,
3 internal invariant breach (including failed verification).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import IO

import numpy as np

from . import multi_agent, oracle, scheduler, single_agent
from .errors import ContractError, InfeasibleError, ValidationError
from .instances import Instance, load_instance


def _fmt(x: float, precision: int) -> str:
    return f"{x:.{precision}f}"


def _styled(text: str, good: bool, stream: IO[str]) -> str:
    if os.environ.get("NO_COLOR") or not stream.isatty():
        return text
    code = "32" if good else "31"
    return f"\x1b[{code}m{text}\x1b[0m"


def _pick_agents(instance: Instance, name: str | None):
    if name is None:
        return list(instance.agents)
    return [instance.agent(name)]


def _linspace(a: float, b: float, k: int) -> list[float]:
    if k < 1:
        raise ValidationError(f"need at least one point, got {k}")
    if k == 1:
        return [a]
    return [a + (b - a) * i / (k - 1) for i in range(k)]


def _allocation_from_args(instance: Instance, args) -> multi_agent.Allocation:
    problem = multi_agent.AllocationProblem(
        instance.specs, instance.budget, delta=args.delta, epsilon=args.epsilon
    )
    return multi_agent.allocate(problem)


# ---------------------------------------------------------------------------
# subcommands (each returns the process exit code)
# ---------------------------------------------------------------------------


def _cmd_solve(args, out: IO[str]) -> int:
    instance = load_instance(args.file)
    p = args.precision
    for named in _pick_agents(instance, args.agent):
        sol = single_agent.solve_single(named.spec)
        out.write(
            f"agent={named.name} gamma={_fmt(sol.contract.gamma, p)} "
            f"beta={_fmt(sol.contract.beta, p)} action={sol.action + 1} "
            f"utility={_fmt(sol.utility, p)}\n"
        )
    return 0


def _cmd_beta_curve(args, out: IO[str]) -> int:
    instance = load_instance(args.file)
    named = instance.agent(args.agent)
    curve = single_agent.build_beta_curve(named.spec)
    p = args.precision
    out.write("gamma,beta\n")
    for g in _linspace(curve.gamma_ir, 1.0, args.samples):
        out.write(f"{_fmt(g, p)},{_fmt(single_agent.beta_at(curve, g), p)}\n")
    return 0


def _cmd_sweep(args, out: IO[str]) -> int:
    instance = load_instance(args.file)
    named = instance.agent(args.agent)
    grid = _linspace(args.from_, args.to, args.steps)
    rows = single_agent.sweep_parameter(named.spec, args.param, grid)
    p = args.precision
    out.write("value,gamma_star,beta_star,utility\n")
    for row in rows:
        if row.feasible:
            out.write(
                f"{_fmt(row.value, p)},{_fmt(row.gamma, p)},"
                f"{_fmt(row.beta, p)},{_fmt(row.utility, p)}\n"
            )
        else:
            out.write(f"{_fmt(row.value, p)},infeasible,infeasible,infeasible\n")
    return 0


def _cmd_allocate(args, out: IO[str]) -> int:
    instance = load_instance(args.file)
    alloc = _allocation_from_args(instance, args)
    p = args.precision
    for named, cap, ch in zip(instance.agents, alloc.caps, alloc.contracts):
        out.write(
            f"agent={named.name} beta_bar={_fmt(cap, p)} gamma={_fmt(ch.gamma, p)} "
            f"beta_effective={_fmt(ch.beta, p)} utility={_fmt(ch.utility, p)}\n"
        )
    out.write(f"total={_fmt(alloc.total_utility, p)}\n")
    out.write(f"gap_bound={_fmt(alloc.gap_bound, p)}\n")
    return 0


def _cmd_schedule(args, out: IO[str]) -> int:
    instance = load_instance(args.file)
    if args.targets is not None:
        try:
            targets = [float(t) for t in args.targets.split(",") if t.strip() != ""]
        except ValueError as exc:
            raise ValidationError(f"--targets: {exc}") from None
        labels = [str(i + 1) for i in range(len(targets))]
    else:
        alloc = _allocation_from_args(instance, args)
        targets = [ch.beta for ch in alloc.contracts]
        labels = [a.name for a in instance.agents]
    sched = scheduler.build_schedule(targets, instance.budget)
    exact = scheduler.exact_marginals(sched)

    empirical = None
    if args.samples:
        counts = np.zeros(len(targets))
        for s in range(args.samples):
            for agent in scheduler.sample_assignment(sched, args.seed + s):
                if agent is not None:
                    counts[agent] += 1
        empirical = counts / args.samples

    p = args.precision
    for i, label in enumerate(labels):
        line = f"agent={label} target={_fmt(targets[i], p)} exact={_fmt(exact[i], p)}"
        if empirical is not None:
            line += f" empirical={_fmt(empirical[i], p)}"
        out.write(line + "\n")
    if args.samples:
        out.write(f"samples={args.samples} seed={args.seed}\n")
    return 0


def _cmd_verify(args, out: IO[str]) -> int:
    instance = load_instance(args.file)
    step = args.grid_step
    failures = 0

    def report(ok: bool, label: str, detail: str = "") -> None:
        nonlocal failures
        tag = _styled("PASS" if ok else "FAIL", ok, out)
        out.write(f"{tag}: {label}{(' ' + detail) if detail else ''}\n")
        if not ok:
            failures += 1

    for named in instance.agents:
        sol = single_agent.solve_single(named.spec)
        pair = (sol.contract.gamma, sol.contract.beta)
        _, ref = oracle.brute_force_single(named.spec, step, include=[pair])
        ok = sol.utility >= ref - 1e-9
        report(
            ok,
            f"solve[{named.name}] vs grid oracle (step {step})",
            f"solver={sol.utility:.9f} oracle={ref:.9f}"
            + ("" if ok else f" counterexample: contract={pair}"),
        )
        ic = oracle.check_ic_ir(named.spec, sol.contract, (sol.action, True))
        report(
            ic,
            f"solve[{named.name}] IC/IR",
            "" if ic else f"counterexample: contract={pair} action={sol.action}",
        )
        curve = single_agent.build_beta_curve(named.spec)
        gs = _linspace(curve.gamma_ir, 1.0, 201)
        vals = [single_agent.beta_at(curve, g) for g in gs]
        mono = all(a >= b - 1e-9 for a, b in zip(vals, vals[1:]))
        report(
            mono,
            f"beta-curve[{named.name}] nonincreasing",
            "" if mono else f"counterexample: {list(zip(gs, vals))[:5]}...",
        )

    if len(instance.agents) <= 3:
        problem = multi_agent.AllocationProblem(
            instance.specs, instance.budget, delta=0.01
        )
        alloc = multi_agent.allocate(problem)
        ref_alloc = oracle.brute_force_allocate(problem, 0.01)
        ok = alloc.total_utility >= ref_alloc.total_utility - 1e-9
        report(
            ok,
            "allocate vs exhaustive search (step 0.01)",
            f"dp={alloc.total_utility:.9f} brute={ref_alloc.total_utility:.9f}"
            + ("" if ok else f" counterexample: caps={ref_alloc.caps}"),
        )
        sched = scheduler.build_schedule(list(alloc.caps), instance.budget)
        exact = scheduler.exact_marginals(sched)
        ok = all(abs(e - t) <= 1e-12 for e, t in zip(exact, alloc.caps))
        report(
            ok,
            "schedule marginals match allocation caps",
            "" if ok else f"counterexample: targets={alloc.caps} exact={exact}",
        )
    else:
        out.write("SKIP: allocate cross-check (more than 3 agents)\n")

    return 0 if failures == 0 else 3


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inspection-contracts",
        description="Optimal linear contracts with random safety inspections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("file", help="instance JSON file")
        p.add_argument("--precision", type=int, default=6, help="output decimal places")
        p.add_argument("--out", default=None, help="write output to this path")

    p = sub.add_parser("solve", help="optimal single-agent contract per agent")
    common(p)
    p.add_argument("--agent", default=None, help="restrict to one agent by name")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("beta-curve", help="CSV sample of beta(gamma)")
    common(p)
    p.add_argument("--agent", required=True)
    p.add_argument("--samples", type=int, required=True)
    p.set_defaults(func=_cmd_beta_curve)

    p = sub.add_parser("sweep", help="CSV of optimal contracts along a parameter grid")
    common(p)
    p.add_argument("--agent", required=True)
    p.add_argument("--param", required=True, choices=["kappa_i", "kappa_s", "alpha"])
    p.add_argument("--from", dest="from_", type=float, required=True)
    p.add_argument("--to", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("allocate", help="split the inspection budget across agents")
    common(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--delta", type=float, default=None, help="DP grid step")
    group.add_argument("--epsilon", type=float, default=None, help="relative target")
    p.set_defaults(func=_cmd_allocate)

    p = sub.add_parser("schedule", help="inspector assignment with exact marginals")
    common(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--from-allocation", action="store_true")
    group.add_argument("--targets", default=None, help="comma-separated marginals")
    p.add_argument("--samples", type=int, default=0, help="Monte Carlo sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=None, help="DP step for --from-allocation")
    p.add_argument("--epsilon", type=float, default=None)
    p.set_defaults(func=_cmd_schedule)

    p = sub.add_parser("verify", help="run oracle cross-checks; exit 0 iff all pass")
    common(p)
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.out is not None:
            with open(args.out, "w") as fh:
                return args.func(args, fh)
        return args.func(args, sys.stdout)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except ContractError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - exit code contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def cli_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    cli_main()
