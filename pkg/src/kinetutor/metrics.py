"""Folding session event logs into metrics, and exporting them.

Exports are plain CSV (one row per generation) and JSON lines (the knowns
timeline), so any plotting tool can redraw the fitness and productivity
curves. Identical runs produce byte-identical files: event timestamps are
logical sequence numbers and all serialization is key-sorted.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from .questions import SessionEvent

CSV_COLUMNS = ("generation", "responses", "min_fitness", "mean_fitness", "max_fitness")
TIMELINE_KINDS = ("answer", "propagation", "solve", "zone-link")


class MalformedLogError(Exception):
    pass


class UnsolvedRunError(Exception):
    pass


@dataclass(frozen=True)
class GenerationRow:
    generation: int
    responses: int
    min_fitness: int
    mean_fitness: float
    max_fitness: int


@dataclass(frozen=True)
class TimelineRow:
    generation: int
    object: int
    eqn: int
    var: str
    zone: int
    provenance: str
    response: str


@dataclass(frozen=True)
class RunMetrics:
    per_generation: tuple[GenerationRow, ...]
    knowns_timeline: tuple[TimelineRow, ...]
    solved_at: int | None


def compute(events: Sequence[SessionEvent]) -> RunMetrics:
    """Fold one session's event log into metrics.

    Responses per generation count the questions that drew a data item from
    the student (the "answer" events); the timeline lists every known entry
    in insertion order; solved_at is the generation whose step found the
    target satisfied.
    """
    if not events:
        raise MalformedLogError("empty event log")
    snapshots: dict[int, dict] = {}
    responses: dict[int, int] = {}
    timeline: list[TimelineRow] = []
    solved_at: int | None = None
    for event in events:
        if event.kind == "fitness-snapshot":
            if event.generation in snapshots:
                raise MalformedLogError(
                    f"generation {event.generation} has multiple fitness snapshots"
                )
            snapshots[event.generation] = event.payload
        elif event.kind == "answer":
            responses[event.generation] = responses.get(event.generation, 0) + 1
        elif event.kind == "ga-step":
            if event.payload.get("solved") and solved_at is None:
                solved_at = event.generation
        if event.kind in TIMELINE_KINDS:
            payload = event.payload
            timeline.append(
                TimelineRow(
                    generation=event.generation,
                    object=payload["object"],
                    eqn=payload["eqn"],
                    var=payload["symbol"],
                    zone=payload["zone"],
                    provenance=payload["provenance"],
                    response=payload["response"],
                )
            )
    generations = sorted(snapshots)
    if generations != list(range(1, len(generations) + 1)):
        raise MalformedLogError(f"fitness snapshots are not gap-free: {generations}")
    rows = tuple(
        GenerationRow(
            generation=g,
            responses=responses.get(g, 0),
            min_fitness=snapshots[g]["min"],
            mean_fitness=snapshots[g]["mean"],
            max_fitness=snapshots[g]["max"],
        )
        for g in generations
    )
    return RunMetrics(per_generation=rows, knowns_timeline=tuple(timeline), solved_at=solved_at)


def knowns_from_events(events: Sequence[SessionEvent]) -> list[tuple]:
    """The knowns store as reconstructed purely from the event log."""
    rows = []
    for event in events:
        if event.kind in TIMELINE_KINDS:
            p = event.payload
            rows.append((p["object"], p["eqn"], p["var"], p["zone"], p["response"], p["provenance"]))
    return rows


def metrics_csv(metrics: RunMetrics) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in metrics.per_generation:
        writer.writerow(
            [row.generation, row.responses, row.min_fitness, row.mean_fitness, row.max_fitness]
        )
    return buffer.getvalue()


def timeline_jsonl(metrics: RunMetrics) -> str:
    return "".join(json.dumps(asdict(row), sort_keys=True) + "\n" for row in metrics.knowns_timeline)


def events_jsonl(events: Iterable[SessionEvent]) -> str:
    return "".join(
        json.dumps(
            {
                "generation": ev.generation,
                "kind": ev.kind,
                "payload": ev.payload,
                "timestamp": ev.timestamp,
            },
            sort_keys=True,
        )
        + "\n"
        for ev in events
    )


def events_from_jsonl(text: str) -> list[SessionEvent]:
    events = []
    for line in text.splitlines():
        if not line.strip():
            continue
        raw = json.loads(line)
        events.append(
            SessionEvent(
                generation=raw["generation"],
                kind=raw["kind"],
                payload=raw["payload"],
                timestamp=raw["timestamp"],
            )
        )
    return events


def _quartiles(values: Sequence[int]) -> tuple[float, float, float]:
    if len(values) == 1:
        v = float(values[0])
        return (v, v, v)
    q1, q2, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return (q1, q2, q3)


def compare(ga_runs: Sequence[RunMetrics], control_runs: Sequence[RunMetrics]) -> dict:
    """Median/quartile summary of generations-to-solution for both modes."""
    if not ga_runs or not control_runs:
        raise ValueError("both run lists must be non-empty")
    for run in list(ga_runs) + list(control_runs):
        if run.solved_at is None:
            raise UnsolvedRunError("all runs must have solved to compare")
    ga_solved = [run.solved_at for run in ga_runs]
    control_solved = [run.solved_at for run in control_runs]
    ga_q1, ga_med, ga_q3 = _quartiles(ga_solved)
    c_q1, c_med, c_q3 = _quartiles(control_solved)
    return {
        "ga": {"n": len(ga_solved), "solved_at": ga_solved, "q1": ga_q1, "median": ga_med, "q3": ga_q3},
        "control": {
            "n": len(control_solved),
            "solved_at": control_solved,
            "q1": c_q1,
            "median": c_med,
            "q3": c_q3,
        },
        "ga_median_not_later": ga_med <= c_med,
    }
