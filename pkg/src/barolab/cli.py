"""Batch command-line front end.

Commands
--------
``barolab run <config>``        execute the configured experiment
``barolab validate <config>``   check a configuration and report every problem
``barolab sweep <config> --param section.key --values a,b,c``
                                run the experiment once per value, concurrently

Exit codes: 0 success, 1 invalid configuration, 2 integration failure,
3 blow-up detected while the configuration demands completion
(``[solver] on_blowup = fail``).  The environment variable
``BAROLAB_OUTPUT_ROOT`` prefixes every relative output directory.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import parse_config
from .errors import ConfigError
from .experiments import EXIT_CONFIG, resolve_output_dir, run_experiment


def _read(path):
    return Path(path).read_text(encoding="utf-8")


def _cmd_validate(args):
    try:
        config = parse_config(_read(args.config))
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    print(f"OK: {config.kind} experiment, output -> {config.output_directory}")
    return 0


def _cmd_run(args):
    try:
        config = parse_config(_read(args.config))
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    code, summary = run_experiment(config, args.output)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return code


def _override_config_text(text, param, value):
    if "." not in param:
        raise ConfigError([f"--param must look like section.key, got {param!r}"])
    section, key = param.split(".", 1)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string(text)
    if not parser.has_section(section):
        parser.add_section(section)
    parser.set(section, key, value)
    out = []
    for sec in parser.sections():
        out.append(f"[{sec}]")
        out.extend(f"{k} = {v}" for k, v in parser.items(sec))
        out.append("")
    return "\n".join(out)


def _cmd_sweep(args):
    text = _read(args.config)
    values = [v for v in args.values.split(",") if v.strip()]
    try:
        base = parse_config(text)
        members = []
        for value in values:
            member = parse_config(_override_config_text(text, args.param, value))
            members.append((value, member))
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    base_dir = resolve_output_dir(base, args.output)
    key = args.param.split(".", 1)[1]

    def one(item):
        value, member = item
        return value, run_experiment(member, base_dir / f"{key}={value}")

    with ThreadPoolExecutor(max_workers=min(len(members), 8)) as pool:
        outcomes = list(pool.map(one, members))
    report = {value: {"exit_code": code, **summary} for value, (code, summary) in outcomes}
    with open(base_dir / "sweep.json", "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    print(json.dumps(report, indent=2, sort_keys=True))
    return max(code for _, (code, _) in outcomes)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="barolab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--output", help="override the output directory")
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)

    p_sweep = sub.add_parser("sweep", help="run once per parameter value")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", required=True, help="section.key to override")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--output", help="override the base output directory")
    p_sweep.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
