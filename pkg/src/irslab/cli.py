"""Command-line front end for the experiment runners.

Subcommands mirror the runners: gain-profile, beam-pattern, td-count-sweep,
delay-range-sweep, rate-sweep, plus export-config for the beamformer JSON.
Exit status is 0 on success and 1 on scenario/validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .experiments import (
    DESIGN_NAMES,
    FREQUENCY_TOKENS,
    ResultTable,
    export_config,
    run_beam_pattern,
    run_delay_range_sweep,
    run_gain_profile,
    run_rate_sweep,
    run_td_count_sweep,
)
from .scenario import ScenarioError, load_scenario


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", metavar="PATH", default=None,
                        help="scenario file (omit for the built-in defaults)")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="output path (default: <experiment>.<format>)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def _designs_arg(text: str) -> list[str]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    for name in names:
        if name not in DESIGN_NAMES:
            raise argparse.ArgumentTypeError(
                f"unknown design {name!r}; choose from {', '.join(DESIGN_NAMES)}"
            )
    if not names:
        raise argparse.ArgumentTypeError("at least one design is required")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irslab",
        description="Wideband near-field IRS beamforming experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gain-profile", help="array gain per subcarrier per design")
    _add_common(p)
    p.add_argument("--designs", type=_designs_arg, default=list(DESIGN_NAMES))

    p = sub.add_parser("beam-pattern", help="gain over the evaluation plane")
    _add_common(p)
    p.add_argument("--design", choices=DESIGN_NAMES, default="narrowband")
    p.add_argument("--frequencies", default=",".join(FREQUENCY_TOKENS),
                   help="comma list of f1/fc/fM tokens or GHz values")

    p = sub.add_parser("td-count-sweep", help="edge gain vs number of delay modules")
    _add_common(p)

    p = sub.add_parser("delay-range-sweep", help="edge gain vs module delay cap")
    _add_common(p)

    p = sub.add_parser("rate-sweep", help="mean rate vs BS transmit power")
    _add_common(p)
    p.add_argument("--designs", type=_designs_arg, default=list(DESIGN_NAMES))

    p = sub.add_parser("export-config", help="beamformer configuration as JSON")
    _add_common(p)
    p.add_argument("--design", choices=DESIGN_NAMES, default="dldd")

    return parser


def _write_table(table: ResultTable, out: Optional[str], fmt: str) -> Path:
    path = Path(out) if out else Path(f"{table.experiment}.{fmt}")
    with path.open("w", newline="") as fh:
        if fmt == "csv":
            table.to_csv(fh)
        else:
            table.to_json(fh)
    return path


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
        if args.command == "gain-profile":
            table = run_gain_profile(scenario, designs=args.designs)
        elif args.command == "beam-pattern":
            tokens = [t.strip() for t in args.frequencies.split(",") if t.strip()]
            table = run_beam_pattern(scenario, design=args.design, frequencies=tokens)
        elif args.command == "td-count-sweep":
            table = run_td_count_sweep(scenario)
        elif args.command == "delay-range-sweep":
            table = run_delay_range_sweep(scenario)
        elif args.command == "rate-sweep":
            table = run_rate_sweep(scenario, designs=args.designs)
        elif args.command == "export-config":
            payload = export_config(scenario, args.design)
            path = Path(args.out) if args.out else Path("beamformer-config.json")
            with path.open("w") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")
            print(f"wrote {path}")
            return 0
        else:  # pragma: no cover - argparse enforces the choices
            raise ScenarioError(f"unknown command {args.command!r}")
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    path = _write_table(table, args.out, args.format)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
