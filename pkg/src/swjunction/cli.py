"""Command-line front end.

Verbs::

    swjunction run <config|preset> [--out DIR] [--cfl X] [--cells N] [--junction momentum|energy]
    swjunction compare <dirA> <dirB> [<dirC> ...] [--norms l1,l2,linf] [--interpolate]
    swjunction presets list
    swjunction validate <config>

Exit status: 0 on success, 1 on invalid input (config, arguments, run
directories), 2 when a simulation fails (the manifest is still written).
"""

import argparse
import json
import os
import sys

from .artifacts import NORMS, IncompatibleRunsError, compare_runs, max_norms, read_run, \
    refinement_study, run_scenario
from .exceptions import ConfigError
from .network import JUNCTION_MODELS
from .scenarios import PRESET_DESCRIPTIONS, load, preset_names

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SIMULATION = 2


def _norm_list(text):
    norms = [n.strip() for n in text.split(",") if n.strip()]
    bad = [n for n in norms if n not in NORMS]
    if bad or not norms:
        raise argparse.ArgumentTypeError(f"norms must be a comma list from {','.join(NORMS)}")
    return norms


def build_parser():
    parser = argparse.ArgumentParser(prog="swjunction", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run a scenario file or a named preset")
    p_run.add_argument("source", help="path to a scenario document or a preset name")
    p_run.add_argument("--out", help="output directory (default: runs/<scenario name>)")
    p_run.add_argument("--cfl", type=float, help="Courant number override")
    p_run.add_argument("--cells", type=int, help="cells per canal override")
    p_run.add_argument("--junction", choices=JUNCTION_MODELS, help="junction model override")

    p_cmp = sub.add_parser("compare", help="difference norms between run directories")
    p_cmp.add_argument("dirs", nargs="+", metavar="DIR",
                       help="two runs, or a refinement ladder of three or more (coarsest first)")
    p_cmp.add_argument("--norms", type=_norm_list, default=list(NORMS))
    p_cmp.add_argument("--interpolate", action="store_true",
                       help="interpolate the second run onto the first run's points")
    p_cmp.add_argument("--fields", help="comma list of fields (default: all shared)")
    p_cmp.add_argument("--json", action="store_true", help="print the full report as JSON")

    p_pre = sub.add_parser("presets", help="preset scenarios")
    p_pre.add_argument("action", choices=["list"])

    p_val = sub.add_parser("validate", help="check a scenario document")
    p_val.add_argument("config")
    return parser


def _cmd_run(args, out):
    cfg = load(args.source).with_overrides(cfl=args.cfl, cells=args.cells, junction_model=args.junction)
    out_dir = args.out or os.path.join("runs", cfg.name)
    arts = run_scenario(cfg, out_dir)
    man = arts.manifest
    print(f"{cfg.name}: {man['steps']} steps, t={man['t_final']!r}, "
          f"{man['timings']['run_seconds']:.2f} s, output in {out_dir}", file=out)
    if not arts.ok:
        print(f"simulation failed: {man['failure']['message']}", file=out)
        return EXIT_SIMULATION
    return EXIT_OK


def _cmd_compare(args, out):
    if len(args.dirs) < 2:
        raise ConfigError("compare needs at least two run directories")
    runs = [read_run(d) for d in args.dirs]
    fields = None if args.fields is None else [f.strip() for f in args.fields.split(",")]
    if len(runs) >= 3:
        study = refinement_study(runs)
        if args.json:
            print(json.dumps(study, indent=2), file=out)
            return EXIT_OK
        print(f"refinement study at t={study['t']!r}, cells {study['cells']}", file=out)
        for label, key in (("all cells", ""), ("smooth cells", "smooth_")):
            diffs = ", ".join(f"{d:.6e}" for d in study[key + "differences"])
            orders = ", ".join(f"{o:.3f}" for o in study[key + "orders"])
            print(f"  {label}: L1 self-differences [{diffs}], orders [{orders}]", file=out)
        return EXIT_OK
    report = compare_runs(runs[0], runs[1], args.norms, fields, args.interpolate)
    if args.json:
        print(json.dumps(report, indent=2), file=out)
        return EXIT_OK
    print("canal,t,field," + ",".join(args.norms), file=out)
    for e in report:
        print(f"{e['canal']},{e['t']!r},{e['field']}," + ",".join(f"{e[n]:.6e}" for n in args.norms),
              file=out)
    worst = max_norms(report)
    print("max " + " ".join(f"{n}={worst[n]:.6e}" for n in args.norms), file=out)
    return EXIT_OK


def _cmd_presets(args, out):
    for name in preset_names():
        print(f"{name}\t{PRESET_DESCRIPTIONS[name]}", file=out)
    return EXIT_OK


def _cmd_validate(args, out):
    cfg = load(args.config)
    print(f"{cfg.name}: ok ({len(cfg.canals)} canals, {len(cfg.junctions)} junctions)", file=out)
    return EXIT_OK


COMMANDS = {"run": _cmd_run, "compare": _cmd_compare, "presets": _cmd_presets,
            "validate": _cmd_validate}


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return COMMANDS[args.verb](args, out)
    except ConfigError as exc:
        for line in exc.errors:
            print(f"error: {line}", file=err)
        return EXIT_INVALID
    except (IncompatibleRunsError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
