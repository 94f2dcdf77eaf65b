"""Command-line front end.

Every command prints one JSON report on stdout. Exit status: 0 success,
2 bad input or unmet precondition, 3 infeasible instance, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
import warnings
from typing import Optional, Sequence

from tucongestion.document import (
    dumps,
    instance_to_dict,
    read_instance,
    read_state,
    render_instance,
    state_to_dict,
)
from tucongestion.dynamics import run_dynamics, verify_nash
from tucongestion.errors import CongestionError, InfeasibleError, InvariantViolation, PreconditionError
from tucongestion.frontends import cardinality_variant
from tucongestion.generate import (
    random_asymmetric_tu_game,
    random_polymatroid_game,
    random_symmetric_tu_game,
)
from tucongestion.model import GameInstance, GameState, potential, social_delay, validate_state
from tucongestion.oracle import brute_force_all_nash, brute_force_min_potential, brute_force_min_social
from tucongestion.polymatroid import nash_guaranteed, solve_matroid_nash, solve_polymatroid_social
from tucongestion.reductions import REDUCTIONS, map_state_assignment, parse_sat
from tucongestion.symmetric import solve_symmetric_nash, solve_symmetric_social
from tucongestion.tu import check_instance_tu

EXIT_OK, EXIT_PRECONDITION, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 2, 3, 4


def _state_block(inst: GameInstance, state: GameState) -> dict:
    return {**state_to_dict(state), "potential": potential(inst, state),
            "social_delay": social_delay(inst, state)}


def _tu_block(inst: GameInstance) -> list[dict]:
    out = []
    for r in check_instance_tu(inst):
        out.append({"player": r.player, "kind": r.kind, "totally_unimodular": r.totally_unimodular,
                    "integral_bounds": r.integral_bounds,
                    "violating_submatrix": None if r.violating_submatrix is None
                    else [list(r.violating_submatrix[0]), list(r.violating_submatrix[1])]})
    return out


def _load(args) -> tuple[GameInstance, GameInstance, dict]:
    """The instance as given, the instance actually solved, and report extras."""
    inst = read_instance(args.instance)
    extra: dict = {}
    if getattr(args, "verify_tu", False):
        tu = _tu_block(inst)
        extra["tu_check"] = tu
        if any(r["totally_unimodular"] is False or not r["integral_bounds"] for r in tu):
            raise PreconditionError("strategy system is not TU with integral bounds; exact solvers do not apply")
    solved = inst
    if getattr(args, "cardinality", None):
        solved = cardinality_variant(inst, args.mode, args.cardinality)
        extra["cardinality_variant"] = {
            "mode": args.mode, "sense": args.cardinality,
            "note": (f"delays shifted so that {'Nash equilibria' if args.mode == 'nash' else 'social optima'} "
                     f"of the shifted game use only {args.cardinality}imum-cardinality strategies"),
            "shifted_delays": [list(r) for r in solved.delays.values]}
    return inst, solved, extra


def _report(command: str, inst: GameInstance, **fields) -> dict:
    return {"command": command, "instance": inst.summary(), **fields}


def cmd_solve_nash(args) -> tuple[dict, str]:
    inst, solved, extra = _load(args)
    if solved.is_polymatroid:
        method = "matroid greedy + decomposition"
        state = solve_matroid_nash(solved)
    elif solved.is_tu:
        method = "aggregated LP + decomposition"
        state = solve_symmetric_nash(solved)
    else:
        raise PreconditionError("mixed TU and polymatroid players are not supported")
    validate_state(solved, state)
    check = verify_nash(solved, state)
    if not check and (solved.is_tu or nash_guaranteed(solved)):
        raise InvariantViolation(f"solver output is not a Nash equilibrium: player {check.player} can improve")
    result = _state_block(solved, state)
    verification = {"feasible": True, "nash": bool(check), "method": "exact best response per player"}
    report = _report("solve-nash", inst, method=method, result=result, verification=verification, **extra)
    return report, str(result["potential"])


def cmd_solve_social(args) -> tuple[dict, str]:
    inst, solved, extra = _load(args)
    if solved.is_polymatroid:
        method = "polymatroid greedy + decomposition"
        state = solve_polymatroid_social(solved)
    elif solved.is_tu:
        method = "aggregated LP on marginal social delays + decomposition"
        state = solve_symmetric_social(solved)
    else:
        raise PreconditionError("mixed TU and polymatroid players are not supported")
    validate_state(solved, state)
    result = _state_block(solved, state)
    recomputed = sum(t * solved.delays(j, t) for j, t in enumerate(state.loads))
    if recomputed != result["social_delay"]:
        raise InvariantViolation("social delay re-evaluation disagrees")
    verification = {"feasible": True, "social_delay_recomputed": recomputed}
    report = _report("solve-social", inst, method=method, result=result, verification=verification, **extra)
    return report, str(result["social_delay"])


def cmd_dynamics(args) -> tuple[dict, str]:
    inst, solved, extra = _load(args)
    initial = read_state(args.state) if args.state else "auto"
    state, trace = run_dynamics(solved, initial, args.max_iters)
    check = verify_nash(solved, state)
    result = _state_block(solved, state)
    report = _report("dynamics", inst, result=result, iterations=len(trace.steps),
                     termination=trace.termination.value, initial_potential=trace.initial_potential,
                     trace=trace.render(), verification={"nash": bool(check)}, **extra)
    return report, str(result["potential"])


def cmd_verify(args) -> tuple[dict, str]:
    inst, solved, extra = _load(args)
    state = read_state(args.state)
    check = verify_nash(solved, state)
    verdict = {"nash": bool(check)}
    if not check:
        verdict["witness"] = {"player": check.player, "better_strategy": list(check.better_strategy)}
    report = _report("verify", inst, result=_state_block(solved, state), verification=verdict, **extra)
    return report, "yes" if check else "no"


def cmd_brute(args) -> tuple[dict, str]:
    inst, solved, extra = _load(args)
    pot_state, pot = brute_force_min_potential(solved)
    soc_state, soc = brute_force_min_social(solved)
    nash = brute_force_all_nash(solved)
    report = _report("brute", inst,
                     min_potential={**state_to_dict(pot_state), "value": pot},
                     min_social={**state_to_dict(soc_state), "value": soc},
                     nash_count=len(nash), nash_states=[list(map(list, s.strategies)) for s in nash], **extra)
    return report, f"{pot} {soc} {len(nash)}"


def cmd_check_tu(args) -> tuple[dict, str]:
    inst = read_instance(args.instance)
    tu = _tu_block(inst)
    ok = all(r["totally_unimodular"] is not False and r["integral_bounds"] for r in tu)
    return _report("check-tu", inst, players=tu, all_tu=ok), "yes" if ok else "no"


def cmd_gen_reduction(args) -> tuple[dict, str]:
    with open(args.formula) as f:
        sat = parse_sat(f.read())
    art = REDUCTIONS[args.kind](sat)
    mapping = {"kind": art.kind, "variables": sat.num_vars,
               "labels": [{"player": i, "strategy_0": list(z), "strategy_1": list(o)}
                          for i, (z, o) in enumerate(art.labels)],
               "nodes": list(art.graph.nodes), "edges": [list(e) for e in art.graph.edges]}
    doc = instance_to_dict(art.instance)
    if args.out:
        with open(args.out, "w") as f:
            f.write(dumps(doc))
    if args.mapping:
        with open(args.mapping, "w") as f:
            f.write(dumps(mapping))
    report = {"command": "gen-reduction", "instance": art.instance.summary(), "kind": art.kind}
    if not args.out:
        report["document"] = doc
    if not args.mapping:
        report["mapping"] = mapping
    zeros = map_state_assignment(art, GameState(tuple(z for z, _ in art.labels)))
    report["check"] = {"all_zero_state_maps_to": list(zeros)}
    return report, args.out or "-"


def cmd_gen_random(args) -> tuple[dict, str]:
    rng = random.Random(args.seed)
    if args.family == "symmetric":
        inst = random_symmetric_tu_game(rng)
    elif args.family == "asymmetric":
        inst = random_asymmetric_tu_game(rng)
    else:
        inst = random_polymatroid_game(rng, matroid=args.family == "matroid")
    text = render_instance(inst)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    return {"command": "gen-random", "seed": args.seed, "family": args.family,
            "instance": inst.summary(), **({} if args.out else {"document": instance_to_dict(inst)})}, args.out or "-"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tucongestion", description="Exact solvers for TU congestion games.")
    p.add_argument("--quiet", action="store_true", help="print only the headline value")
    sub = p.add_subparsers(dest="command", required=True)

    def instance_cmd(name, func, help_):
        c = sub.add_parser(name, help=help_)
        c.add_argument("instance", help="instance JSON document")
        c.add_argument("--verify-tu", action="store_true", help="run the TU check before solving")
        c.add_argument("--cardinality", choices=["max", "min"],
                       help="solve the maximum- or minimum-cardinality variant via a delay shift")
        c.add_argument("--mode", choices=["nash", "social"], default="nash",
                       help="which shift constant the cardinality variant uses")
        c.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
        c.set_defaults(func=func)
        return c

    instance_cmd("solve-nash", cmd_solve_nash, "potential-minimizing Nash equilibrium")
    instance_cmd("solve-social", cmd_solve_social, "socially optimal state")
    d = instance_cmd("dynamics", cmd_dynamics, "best-response dynamics")
    d.add_argument("--max-iters", type=int, default=None)
    d.add_argument("--state", help="initial state JSON (default: a vertex per player)")
    v = instance_cmd("verify", cmd_verify, "exact Nash check of a state")
    v.add_argument("--state", required=True, help="state JSON")
    instance_cmd("brute", cmd_brute, "exhaustive ground truth for tiny instances")

    t = sub.add_parser("check-tu", help="total unimodularity report per player")
    t.add_argument("instance")
    t.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    t.set_defaults(func=cmd_check_tu)

    g = sub.add_parser("gen-reduction", help="game instance from a NAE-SAT formula")
    g.add_argument("formula", help="formula file, one 'w : lit lit [lit]' clause per line")
    g.add_argument("--kind", choices=sorted(REDUCTIONS), required=True)
    g.add_argument("--out", help="write the instance document here")
    g.add_argument("--mapping", help="write the strategy/assignment mapping here")
    g.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    g.set_defaults(func=cmd_gen_reduction)

    r = sub.add_parser("gen-random", help="seeded random instance")
    r.add_argument("--family", choices=["symmetric", "asymmetric", "matroid", "polymatroid"], default="symmetric")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out")
    r.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    r.set_defaults(func=cmd_gen_random)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("dynamics",) and args.max_iters is not None and args.max_iters < 0:
        parser.error("--max-iters must be nonnegative")
    start = time.perf_counter()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            report, headline = args.func(args)
    except InfeasibleError as e:
        print(f"error: infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InvariantViolation as e:
        print(f"error: internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except (PreconditionError, CongestionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    if caught:
        report["warnings"] = sorted({str(w.message) for w in caught})
    report["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
    sys.stdout.write(headline + "\n" if args.quiet else dumps(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
