"""Command-line entry point: solve, optimize, simulate, sweep, protocol, serve.

Exit codes: 0 success, 2 validation or usage error, 1 internal error.  All
randomness flows from --seed; existing output files are never overwritten
without --force.  RANSOMGAME_LOG sets the log level.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path

from .core import (
    InvalidInstanceError,
    Reputation,
    load_instance,
    policy_to_json,
    validate_instance,
)
from .montecarlo import (
    ALL_MODES,
    ScenarioConfig,
    compare_scenarios,
    expected_profit_sweep,
    reputation_sweep,
    run_scenario,
    write_rounds_csv,
    write_sweep_csv,
    write_victims_csv,
)
from .reputation import optimal_reputation
from .strategy import perfect_reputation_policy, victim_policy, worst_case_equilibrium

log = logging.getLogger("ransomgame.cli")


class CliError(Exception):
    pass


def load_preset(name: str) -> dict:
    ref = resources.files("ransomgame.presets").joinpath(f"{name}.json")
    if not ref.is_file():
        available = sorted(
            p.name[:-5] for p in resources.files("ransomgame.presets").iterdir()
            if p.name.endswith(".json")
        )
        raise CliError(f"unknown preset {name!r}; available: {', '.join(available)}")
    return json.loads(ref.read_text(encoding="utf-8"))


def _out_path(args, filename: str) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / filename
    if path.exists() and not args.force:
        raise CliError(f"{path} exists; pass --force to overwrite")
    return path


def _emit(args, filename: str, text: str) -> Path:
    path = _out_path(args, filename)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}")
    return path


def _load_cli_instance(args):
    if not args.instance:
        raise CliError("--instance is required")
    inst = load_instance(args.instance)
    violations = validate_instance(inst)
    if violations:
        raise CliError("invalid instance: " + "; ".join(violations))
    return inst


def _policy_csv(doc: dict) -> str:
    policy = doc["policy"]
    values = ";".join(f"{v:.9f}" for v in policy["continuation_values"])
    return (
        "abort_round,expected_loss,continuation_values\n"
        f"{policy['abort_round']},{policy['expected_loss']:.9f},{values}\n"
    )


def cmd_solve(args) -> int:
    inst = _load_cli_instance(args)
    if args.worst:
        policy, action, payoffs, _ = worst_case_equilibrium(inst)
        doc = {
            "policy": policy_to_json(policy),
            "attacker_action": action,
            "payoffs": {"attacker": payoffs[0], "victim": payoffs[1]},
        }
    elif args.perfect or not args.reputation:
        doc = {"policy": policy_to_json(perfect_reputation_policy(inst))}
    else:
        vec = [float(x) for x in args.reputation.split(",")]
        rep = Reputation(vec[0], tuple(vec[1:]))
        doc = {"policy": policy_to_json(victim_policy(inst, rep))}
    if args.format == "csv":
        text = _policy_csv(doc)
        filename = "solve.csv"
    else:
        text = json.dumps(doc, indent=2) + "\n"
        filename = "solve.json"
    if args.out:
        _emit(args, filename, text)
    else:
        print(text, end="")
    return 0


def cmd_optimize(args) -> int:
    inst = _load_cli_instance(args)
    result = optimal_reputation(inst, args.epsilon_margin)
    doc = {
        "reputation": {
            "beta_r": result.reputation.beta_r,
            "betas": list(result.reputation.betas),
        },
        "case_index": result.case_index,
        "expected_profit": result.expected_profit,
        "fallback": result.fallback,
        "epsilon_margin": result.epsilon_margin,
        "policy": policy_to_json(result.policy),
    }
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        _emit(args, "optimize.json", text)
        _emit(args, "cases.csv", result.to_csv())
    else:
        print(text, end="")
        print(result.to_csv(), end="")
    return 0


def _scenario_from_args(args) -> tuple[ScenarioConfig, list[str]]:
    if args.preset:
        doc = load_preset(args.preset)
        if doc.get("type") != "scenario":
            raise CliError(f"preset {args.preset!r} is not a scenario preset")
    elif args.scenario:
        doc = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    else:
        raise CliError("need --preset or --scenario")
    modes = args.modes.split(",") if args.modes else doc.get("modes")
    if args.seed is not None:
        doc = dict(doc, seed=args.seed)
    cfg = ScenarioConfig.from_json(doc)
    if modes:
        unknown = set(modes) - set(ALL_MODES)
        if unknown:
            raise CliError(f"unknown modes: {', '.join(sorted(unknown))}")
    return cfg, list(modes) if modes else []


def cmd_simulate(args) -> int:
    cfg, modes = _scenario_from_args(args)
    if modes:
        comparison = compare_scenarios(cfg, modes, threads=args.threads)
        results = [comparison.results[m] for m in modes]
        totals = {m: comparison.results[m].total_profit for m in modes}
    else:
        res = run_scenario(cfg, threads=args.threads)
        results = [res]
        totals = {cfg.reputation_mode: res.total_profit}
    victims = _out_path(args, "victims.csv")
    rounds = _out_path(args, "rounds.csv")
    write_victims_csv(str(victims), results)
    write_rounds_csv(str(rounds), results)
    print(f"wrote {victims}")
    print(f"wrote {rounds}")
    summary = {"seed": cfg.seed, "victims": cfg.victim_count, "totals": totals}
    _emit(args, "summary.json", json.dumps(summary, indent=2) + "\n")
    return 0


def cmd_sweep(args) -> int:
    if args.preset:
        doc = load_preset(args.preset)
        kind = doc.get("type")
        if kind not in ("reputation_sweep", "profit_sweep"):
            raise CliError(f"preset {args.preset!r} is not a sweep preset")
    else:
        kind = f"{args.type}_sweep"
        doc = {
            "data_value": args.data_value,
            "rounds": args.rounds,
            "decay": args.decay,
            "sale_ratio": args.sale_ratio,
            "recovery_cost": args.recovery_cost,
            "first_round_fraction": args.first_round_fraction,
            "ransom_grid": [float(x) for x in args.ransom_grid.split(",")],
            "gamma": args.gamma,
        }
    grid = doc["ransom_grid"]
    if kind == "reputation_sweep":
        rows = reputation_sweep(
            doc["data_value"], doc["rounds"], doc["decay"], doc["sale_ratio"],
            doc["recovery_cost"], grid,
            first_round_fraction=doc.get("first_round_fraction", 0.5),
            epsilon_margin=args.epsilon_margin,
        )
    else:
        rows = expected_profit_sweep(
            doc["data_value"], doc["rounds"], doc["decay"], grid,
            sale_ratio=doc["sale_ratio"], C_r=doc["recovery_cost"],
            first_round_fraction=doc.get("first_round_fraction", 0.5),
            gamma=doc.get("gamma", 0.1), epsilon_margin=args.epsilon_margin,
        )
    path = _out_path(args, "sweep.csv")
    write_sweep_csv(str(path), rows)
    print(f"wrote {path}")
    return 0


def cmd_protocol(args) -> int:
    from .protocol import ProtocolScenario, replay_transcript, run_end_to_end

    scn = ProtocolScenario(
        mode=args.mode,
        rounds=args.rounds if args.mode == "multi" else 1,
        demand=args.demand,
        cancel_at=args.cancel_at,
        withhold_key=args.withhold_key,
        chunk_bits=args.chunk_bits,
        seed=args.seed if args.seed is not None else 0,
        data_size=args.data_size,
    )
    tr = run_end_to_end(scn)
    _emit(args, "transcript.jsonl", tr.to_jsonl())
    replayed = replay_transcript(tr)
    summary = {
        "mode": scn.mode,
        "final_phase": tr.final_state.phase,
        "data_recovered": tr.data_recovered,
        "attacker_gain": tr.attacker_gain,
        "victim_spent": tr.victim_spent,
        "victim_refunded": tr.victim_refunded,
        "token_conservation": tr.conserved,
        "replay_matches": replayed == tr.final_state,
    }
    text = json.dumps(summary, indent=2) + "\n"
    _emit(args, "protocol_summary.json", text)
    print(text, end="")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    artifact_dir = args.out or "runs"
    serve(
        host=args.host, port=args.port, seed=args.seed or 0,
        persist=args.persist, artifact_dir=artifact_dir, ui_dir=args.ui_dir,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ransomgame",
        description="Multi-round ransom decision game: solvers, optimizer, "
                    "simulations, and a payment-protocol simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_default=None):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=out_default)
        p.add_argument("--force", action="store_true",
                       help="overwrite existing output files")
        p.add_argument("--format", choices=("json", "csv"), default="json",
                       help="stdout format for solve/optimize results")
        p.add_argument("--epsilon-margin", type=float, default=None,
                       dest="epsilon_margin")

    p = sub.add_parser("solve", help="victim best response for an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--reputation", help="comma list: beta_r,beta_1..beta_n")
    p.add_argument("--perfect", action="store_true")
    p.add_argument("--worst", action="store_true")
    common(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("optimize", help="optimal attacker reputation")
    p.add_argument("--instance", required=True)
    common(p)
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("simulate", help="run a scenario or mode comparison")
    p.add_argument("--preset")
    p.add_argument("--scenario", help="scenario config JSON path")
    p.add_argument("--modes", help="comma list of reputation modes")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common(p, out_default="out")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="reputation or profit sweep over demands")
    p.add_argument("--preset")
    p.add_argument("--type", choices=("reputation", "profit"), default="reputation")
    p.add_argument("--data-value", type=float, default=500.0, dest="data_value")
    p.add_argument("--rounds", type=int, default=6)
    p.add_argument("--decay", default="linear")
    p.add_argument("--sale-ratio", type=float, default=0.7, dest="sale_ratio")
    p.add_argument("--recovery-cost", type=float, default=0.0, dest="recovery_cost")
    p.add_argument("--first-round-fraction", type=float, default=0.5,
                   dest="first_round_fraction")
    p.add_argument("--ransom-grid", default="400,600,800,1000,1200",
                   dest="ransom_grid")
    p.add_argument("--gamma", type=float, default=0.1)
    common(p, out_default="out")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("protocol", help="end-to-end payment protocol run")
    p.add_argument("--mode", choices=("single", "multi"), default="single")
    p.add_argument("--rounds", type=int, default=6)
    p.add_argument("--demand", type=int, default=1000)
    p.add_argument("--cancel-at", type=int, default=None, dest="cancel_at")
    p.add_argument("--withhold-key", action="store_true", dest="withhold_key")
    p.add_argument("--chunk-bits", type=int, default=12, dest="chunk_bits")
    p.add_argument("--data-size", type=int, default=96, dest="data_size")
    common(p, out_default="out")
    p.set_defaults(fn=cmd_protocol)

    p = sub.add_parser("serve", help="start the JSON API server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8089)
    p.add_argument("--persist", default=None)
    p.add_argument("--ui-dir", default=None, dest="ui_dir")
    common(p)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("RANSOMGAME_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (CliError, InvalidInstanceError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
