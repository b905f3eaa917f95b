"""Command-line front door: interactive tutoring, scripted experiment runs,
GA-vs-control comparison, and population bitstream export.

Exit codes: 0 solved/success, 1 usage error, 2 io or parse error,
3 exhausted without solving, 4 aborted mid-session.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .domain import EquationDomain
from .genome import GA_MODE, GaConfig, InvalidConfigError, RANDOM_CONTROL_MODE, export_bitstream
from .metrics import compare, compute, events_jsonl, metrics_csv, timeline_jsonl
from .questions import Answer, ORDERING, Prompt, YES_NO
from .scripted import ScriptedStudent, ScriptError, load_script
from .session import (
    ABORTED,
    EXHAUSTED,
    IoClosedError,
    SOLVED,
    SessionState,
    TargetSpec,
    load_snapshot_doc,
    new_session,
    population_from_snapshot,
    run_session,
    save_snapshot,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_EXHAUSTED = 3
EXIT_ABORTED = 4

DEFAULT_SEED = 1
SEED_ENV_VAR = "KINETUTOR_SEED"

_STATUS_EXIT = {SOLVED: EXIT_OK, EXHAUSTED: EXIT_EXHAUSTED, ABORTED: EXIT_ABORTED}


class _Parser(argparse.ArgumentParser):
    """argparse, but usage errors exit 1 (2 is reserved for io failures)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class TerminalIO:
    """Blocking prompt/answer loop on stdin/stdout."""

    def notify(self, prompt: Prompt) -> None:
        print(prompt.text)

    def exchange(self, prompt: Prompt) -> Answer:
        hint = ""
        if prompt.expected == YES_NO:
            hint = " [yes/no]"
        elif prompt.expected == ORDERING:
            hint = " [numbers separated by spaces]"
        print(f"{prompt.text}{hint}")
        try:
            text = input("> ")
        except EOFError:
            raise IoClosedError("end of input") from None
        affirmative = None
        if prompt.expected == YES_NO:
            affirmative = text.strip().casefold() in {"y", "yes", "yeah", "yep", "true", "1"}
        if prompt.expected != YES_NO and not text.strip():
            text = "no"
        return Answer(prompt=prompt, text=text, affirmative=affirmative)


def _add_ga_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (default: "
                        f"${SEED_ENV_VAR} or {DEFAULT_SEED})")
    parser.add_argument("--population-size", type=int, default=None)
    parser.add_argument("--chromosome-bits", type=int, default=None)
    parser.add_argument("--crossover-probability", type=float, default=None)
    parser.add_argument("--mutation-probability", type=float, default=None)
    parser.add_argument("--max-generations", type=int, default=None)
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON file supplying defaults for any unset flag")


def _resolve_config(args, mode: str) -> tuple[GaConfig, int]:
    file_values = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_values = json.load(fh)

    def pick(flag_name: str, file_key: str, fallback):
        flag = getattr(args, flag_name, None)
        if flag is not None:
            return flag
        if file_key in file_values:
            return file_values[file_key]
        return fallback

    seed = pick("seed", "seed", None)
    if seed is None:
        seed = int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))
    config = GaConfig(
        population_size=pick("population_size", "population_size", 50),
        chromosome_bits=pick("chromosome_bits", "chromosome_bits", 12000),
        crossover_probability=pick("crossover_probability", "crossover_probability", 0.25),
        mutation_probability_per_bit=pick("mutation_probability", "mutation_probability_per_bit", 0.01),
        max_generations=pick("max_generations", "max_generations", 500),
        mode=mode,
    )
    return config, int(seed)


def build_parser() -> _Parser:
    parser = _Parser(prog="kinetutor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    tutor = sub.add_parser("tutor", help="interactive tutoring at the terminal")
    _add_ga_flags(tutor)

    run = sub.add_parser("run", help="unattended scripted session")
    run.add_argument("--problem", type=Path, required=True, help="problem script JSON")
    run.add_argument("--mode", choices=[GA_MODE, RANDOM_CONTROL_MODE], default=GA_MODE)
    run.add_argument("--metrics-out", type=Path, default=None,
                     help="directory for metrics.csv, knowns.jsonl, events.jsonl, summary.json")
    run.add_argument("--snapshot-out", type=Path, default=None,
                     help="write a session snapshot (for export-bits) here")
    _add_ga_flags(run)

    cmp_cmd = sub.add_parser("compare", help="GA vs random-control over a seed set")
    cmp_cmd.add_argument("--problem", type=Path, required=True)
    cmp_cmd.add_argument("--seeds", default="1-20",
                         help="seed set, e.g. '1-20' or '1,2,5' (default 1-20)")
    cmp_cmd.add_argument("--out", type=Path, default=None, help="write summary JSON here")
    _add_ga_flags(cmp_cmd)

    export = sub.add_parser("export-bits", help="pack a snapshot's population into raw bytes")
    export.add_argument("--in", dest="snapshot", type=Path, required=True)
    export.add_argument("--out", dest="outfile", type=Path, required=True)
    return parser


def _print_knowns(state: SessionState) -> None:
    domain = state.domain
    print("\nWhat you know now (generation / equation / variable / zone / response):")
    for entry in state.stores.knowns:
        symbol = domain.variable_at(entry.eqn, entry.var)
        print(f"  eqn {entry.eqn}  {symbol:>4}  zone {entry.zone}  "
              f"{entry.response}  [{entry.provenance}]")


def cmd_tutor(args) -> int:
    try:
        config, seed = _resolve_config(args, GA_MODE)
    except InvalidConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    state = new_session(config, seed)
    state = run_session(state, TerminalIO())
    if state.stores.knowns:
        _print_knowns(state)
    print(f"\nSession {state.status}"
          + (f" at generation {state.solved_at}." if state.solved_at else "."))
    return _STATUS_EXIT.get(state.status, EXIT_ABORTED)


def run_scripted(
    problem_path, config: GaConfig, seed: int, domain: EquationDomain | None = None
) -> SessionState:
    """One unattended session against the scripted student."""
    domain = domain or EquationDomain.load()
    script = load_script(problem_path, domain=domain)
    state = new_session(config, seed, domain=domain)
    return run_session(state, ScriptedStudent(script))


def _write_metrics(state: SessionState, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    run_metrics = compute(state.events)
    (out_dir / "metrics.csv").write_text(metrics_csv(run_metrics), encoding="utf-8")
    (out_dir / "knowns.jsonl").write_text(timeline_jsonl(run_metrics), encoding="utf-8")
    (out_dir / "events.jsonl").write_text(events_jsonl(state.events), encoding="utf-8")
    summary = {
        "seed": state.seed,
        "mode": state.config.mode,
        "status": state.status,
        "solved_at": state.solved_at,
        "generations_run": len(run_metrics.per_generation),
        "responses_total": sum(r.responses for r in run_metrics.per_generation),
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def cmd_run(args) -> int:
    try:
        config, seed = _resolve_config(args, args.mode)
    except InvalidConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        state = run_scripted(args.problem, config, seed)
    except ScriptError as exc:
        print(f"problem script error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.metrics_out:
        _write_metrics(state, args.metrics_out)
    if args.snapshot_out:
        save_snapshot(state, args.snapshot_out)
    print(f"seed {seed} mode {config.mode}: {state.status}"
          + (f" at generation {state.solved_at}" if state.solved_at else ""))
    return _STATUS_EXIT.get(state.status, EXIT_ABORTED)


def parse_seed_set(raw: str) -> list[int]:
    seeds: list[int] = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        if "-" in token[1:]:
            low, high = token.split("-", 1)
            seeds.extend(range(int(low), int(high) + 1))
        else:
            seeds.append(int(token))
    if not seeds:
        raise ValueError(f"no seeds in {raw!r}")
    return seeds


def cmd_compare(args) -> int:
    try:
        config, _ = _resolve_config(args, GA_MODE)
        seeds = parse_seed_set(args.seeds)
    except (InvalidConfigError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    domain = EquationDomain.load()
    results = {GA_MODE: [], RANDOM_CONTROL_MODE: []}
    for mode in (GA_MODE, RANDOM_CONTROL_MODE):
        mode_config = GaConfig(
            population_size=config.population_size,
            chromosome_bits=config.chromosome_bits,
            crossover_probability=config.crossover_probability,
            mutation_probability_per_bit=config.mutation_probability_per_bit,
            max_generations=config.max_generations,
            mode=mode,
        )
        for seed in seeds:
            try:
                state = run_scripted(args.problem, mode_config, seed, domain=domain)
            except ScriptError as exc:
                print(f"problem script error: {exc}", file=sys.stderr)
                return EXIT_IO
            if state.status != SOLVED:
                print(f"seed {seed} mode {mode} did not solve ({state.status})", file=sys.stderr)
                return EXIT_EXHAUSTED
            results[mode].append(compute(state.events))
    summary = compare(results[GA_MODE], results[RANDOM_CONTROL_MODE])
    print(f"seeds: {seeds}")
    for label, key in (("ga", "ga"), ("random-control", "control")):
        block = summary[key]
        print(f"  {label:>15}: median {block['median']}  "
              f"q1 {block['q1']}  q3 {block['q3']}  (n={block['n']})")
    print(f"  ga median <= control median: {summary['ga_median_not_later']}")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n",
                            encoding="utf-8")
    return EXIT_OK


def cmd_export_bits(args) -> int:
    try:
        doc = load_snapshot_doc(args.snapshot)
        population = population_from_snapshot(doc)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"cannot read snapshot: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        written = export_bitstream(population, args.outfile)
    except OSError as exc:
        print(f"cannot write bitstream: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {written} bytes to {args.outfile}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "tutor": cmd_tutor,
        "run": cmd_run,
        "compare": cmd_compare,
        "export-bits": cmd_export_bits,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
