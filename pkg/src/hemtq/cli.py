"""``hemtq`` command line: one subcommand per scenario plus ``config``.

Exit codes: 0 success with clean audits, 1 run or configuration error,
2 invariant-audit failure.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import PROFILES, SCENARIOS, load_config, print_defaults
from .errors import HemtqError

EXIT_OK, EXIT_ERROR, EXIT_AUDIT = 0, 1, 2
log = logging.getLogger("hemtq")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hemtq", description="Two-oscillator HEMT mixer simulations.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    for name in SCENARIOS:
        sp = sub.add_parser(name, help=f"run the {name} scenario")
        sp.add_argument("--config", help="INI configuration file")
        sp.add_argument("--out", help="output directory (overrides output.dir)")
        sp.add_argument("--plot", action="store_true", help="also write SVG plots")
        sp.add_argument("--profile", choices=PROFILES, default="desk")
        sp.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one configuration value (repeatable)")
        if name == "sweep":
            sp.add_argument("--jobs", type=int, help="run sweep entries concurrently")
    cp = sub.add_parser("config", help="configuration helpers")
    csub = cp.add_subparsers(dest="action", required=True)
    pd = csub.add_parser("print-defaults", help="print the annotated reference configuration")
    pd.add_argument("--profile", choices=PROFILES, default="desk")
    chk = csub.add_parser("check", help="parse and validate a configuration file")
    chk.add_argument("path")
    chk.add_argument("--profile", choices=PROFILES, default="desk")
    return p


def _run(args) -> int:
    from .output import emit_outputs
    from .scenarios import run_scenario, run_sweep

    cfg = load_config(args.config, profile=args.profile, overrides=args.override)
    if args.plot:
        from dataclasses import replace

        cfg = replace(cfg, plot=True)
    log.info("running %s with fock_dims=%s horizon=%g ns", args.command, cfg.fock_dims, cfg.horizon_ns)
    if args.command == "sweep":
        result = run_sweep(cfg, jobs=args.jobs)
    else:
        result = run_scenario(args.command, cfg)
    files = emit_outputs(result, cfg, args.out)
    for path in files:
        print(path)
    if result.name == "sweep" and result.summary.get("failed_entries"):
        for entry in result.summary["comparison"]:
            if entry["error"]:
                print(f"hemtq: sweep entry gm3={entry['gm3']} failed: {entry['error']}", file=sys.stderr)
        return EXIT_ERROR
    if not result.audit_passed:
        for check in result.audit:
            if not check["passed"]:
                print(f"hemtq: audit failed: {check['check']} measured {check['measured']:.3e} "
                      f"(bound {check['bound']:.3e})", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        if args.command == "config":
            if args.action == "print-defaults":
                sys.stdout.write(print_defaults(args.profile))
            else:
                load_config(args.path, profile=args.profile)
                print(f"{args.path}: ok")
            return EXIT_OK
        return _run(args)
    except (HemtqError, OSError, ValueError, ArithmeticError) as exc:
        print(f"hemtq: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
