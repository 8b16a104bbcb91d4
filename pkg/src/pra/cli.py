"""Command-line interface: ``pra <subcommand> ...``.

Exit codes: 0 success, 1 infeasible (or a rolling run that could not
finish), 2 usage or data error.
"""

from __future__ import annotations

import argparse
import glob
import os
import sys

from pra.errors import ConfigError, InfeasibleError, PraError
from pra.io import load_instance, write_atomic, write_instance, write_solution

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _scorer(spec: str):
    from pra.scoring import parse_scorer

    try:
        return parse_scorer(spec)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    from pra.ip import VARIANTS

    parser = _Parser(prog="pra", description="Patient-to-room assignment toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one IP variant lexicographically")
    p.add_argument("--instance", required=True)
    p.add_argument("--ip", required=True, choices=VARIANTS)
    p.add_argument("--scorer", required=True, type=_scorer)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--backend", choices=("bnb", "highs"), default="bnb")
    p.add_argument("--out", required=True)

    p = sub.add_parser("bound", help="per-period single-period optima w^min_t")
    p.add_argument("--instance", required=True)
    p.add_argument("--scorer", required=True, type=_scorer)

    p = sub.add_parser("dynamic", help="rolling day-by-day planning")
    p.add_argument("--instance", required=True)
    p.add_argument("--first-ip", choices=("U", "V"), default="V")
    p.add_argument("--scorer", required=True, type=_scorer)
    p.add_argument("--wmin-slack", type=int, default=1, help="multiplier lambda of the w^min caps")
    p.add_argument("--time-limit", type=float, default=None, help="seconds per IP solve")
    p.add_argument("--out", required=True)

    from pra.generate import GeneratorParams

    defaults = GeneratorParams()
    p = sub.add_parser("generate", help="write a synthetic instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--horizon", type=int, default=defaults.horizon)
    p.add_argument("--rooms", type=int, default=defaults.n_rooms)
    p.add_argument("--double-share", type=float, default=defaults.double_share)
    p.add_argument("--occupancy", type=float, default=defaults.occupancy)
    p.add_argument("--mean-los", type=float, default=defaults.mean_los)
    p.add_argument("--min-age", type=int, default=defaults.min_age)
    p.add_argument("--max-age", type=int, default=defaults.max_age)
    p.add_argument("--single-prob", type=float, default=defaults.single_request_prob)
    p.add_argument("--female-share", type=float, default=defaults.female_share)
    p.add_argument("--mean-lead", type=float, default=defaults.mean_lead)
    p.add_argument("--out", required=True)

    p = sub.add_parser("export-lp", help="write a model in LP format")
    p.add_argument("--instance", required=True)
    p.add_argument("--ip", required=True, choices=VARIANTS)
    p.add_argument("--scorer", required=True, type=_scorer)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="run configs over a directory of instances")
    p.add_argument("--dir", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=None)
    return parser


def _fixings(variant, instance, scorer):
    from pra.ip import NEEDS_SMAX, NEEDS_WMIN, compute_smax
    from pra.matching import wmin

    fixings = {}
    if variant in NEEDS_SMAX:
        fixings["smax"] = compute_smax(instance)
    if variant in NEEDS_WMIN:
        fixings["wmin"] = wmin(instance, scorer)[0]
    return fixings


def _cmd_solve(args) -> int:
    from pra.ip import INFEASIBLE, build_model, solve_lexicographic

    instance = load_instance(args.instance)
    try:
        fixings = _fixings(args.ip, instance, args.scorer)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    model = build_model(args.ip, instance, args.scorer, fixings)
    sol = solve_lexicographic(model, args.time_limit, args.backend)
    if sol.status == INFEASIBLE or sol.assignment is None:
        print(f"{sol.status}: no assignment for IP {args.ip}", file=sys.stderr)
        return EXIT_INFEASIBLE
    names = [f"{sense} {name}" for name, sense in model.objective_spec]
    write_atomic(args.out, write_solution(instance, sol.assignment, args.scorer, status=sol.status,
                                          variant=args.ip, optima=sol.optima, objective_names=names,
                                          extra={"stage": sol.stage, "runtime": sol.runtime}))
    print(f"{sol.status} {dict(zip(names, sol.optima))}")
    return EXIT_OK


def _cmd_bound(args) -> int:
    from pra.matching import wmin

    instance = load_instance(args.instance)
    try:
        per, _ = wmin(instance, args.scorer)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    for t in sorted(per):
        print(f"t={t},wmin={per[t]}")
    return EXIT_OK


def _cmd_dynamic(args) -> int:
    from dataclasses import asdict

    from pra.dynamic import DynamicConfig, run_dynamic

    instance = load_instance(args.instance)
    kwargs = {} if args.time_limit is None else {"time_limit": args.time_limit}
    config = DynamicConfig(args.scorer, lam=args.wmin_slack, first=args.first_ip, **kwargs)
    res = run_dynamic(instance, config)
    trajectory = [asdict(r) for r in res.records]
    write_atomic(args.out, write_solution(
        instance, res.assignment, args.scorer, status=res.status, variant=args.first_ip, trajectory=trajectory,
        extra={"failed_period": res.failed_period, "wmin_reference": res.wmin_reference,
               "stages": res.stage_counts()}))
    print(f"{res.status} stages={res.stage_counts()}")
    return EXIT_OK if res.status == "complete" else EXIT_INFEASIBLE


def _cmd_generate(args) -> int:
    from pra.generate import GeneratorParams, generate_instance

    params = GeneratorParams(horizon=args.horizon, n_rooms=args.rooms, double_share=args.double_share,
                             occupancy=args.occupancy, mean_los=args.mean_los, min_age=args.min_age,
                             max_age=args.max_age, single_request_prob=args.single_prob,
                             female_share=args.female_share, mean_lead=args.mean_lead)
    instance = generate_instance(params, args.seed)
    write_atomic(args.out, write_instance(instance, meta={"generator": params.as_dict(), "seed": args.seed}))
    return EXIT_OK


def _cmd_export_lp(args) -> int:
    from pra.ip import build_model, export_lp

    instance = load_instance(args.instance)
    try:
        fixings = _fixings(args.ip, instance, args.scorer)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    write_atomic(args.out, export_lp(build_model(args.ip, instance, args.scorer, fixings)))
    return EXIT_OK


def _cmd_bench(args) -> int:
    from pra.bench import load_configs, run_bench

    with open(args.config, encoding="utf-8") as fh:
        configs = load_configs(fh.read())
    paths = sorted(glob.glob(os.path.join(args.dir, "*.json")))
    if not paths:
        raise ConfigError(f"no *.json instances in {args.dir}")
    instances = [(os.path.splitext(os.path.basename(p))[0], load_instance(p)) for p in paths]
    report = run_bench(instances, configs, args.workers)
    report.write(args.out)
    print(f"{len(report.rows)} runs written to {args.out}")
    return EXIT_OK


_COMMANDS = {"solve": _cmd_solve, "bound": _cmd_bound, "dynamic": _cmd_dynamic, "generate": _cmd_generate,
             "export-lp": _cmd_export_lp, "bench": _cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except (PraError, OSError) as exc:
        print(f"pra {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
