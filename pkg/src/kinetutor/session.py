"""Session orchestration: the generation loop around the question engine.

A session owns one population, one set of stores, and one RNG. Each
generation walks every member's tuples through the question engine; a fully
unproductive generation triggers the organizational phase (temporal zone
ordering, then carry-over links between consecutive zones); fitness is
snapshotted; the GA steps; and the session ends as soon as the sought
target variable is known, or when the generation budget runs out.

The whole thing is a generator over prompts (see ``session_program``).
``run_session`` drives it against a blocking io implementation; the HTTP
service suspends it between turns instead.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from typing import Generator, Protocol

import numpy as np

from .domain import EquationDomain, KnownEntry, QuadTuple
from .fitness import fitness_list
from .genome import Chromosome, GaConfig, Population, ga_step, init_population
from .questions import (
    Answer,
    FREE_TEXT,
    INFO,
    NONE,
    ORDERING,
    YES_NO,
    Prompt,
    ProtocolError,
    SessionStores,
    ZONE_LINK,
    ZONE_ORDER,
    ask,
    detect_solvable,
    process_tuple,
    propagate_shared,
    tell,
)

RUNNING = "running"
SOLVED = "solved"
EXHAUSTED = "exhausted"
ABORTED = "aborted"


class IoClosedError(Exception):
    """The student side went away mid-exchange."""


class StudentIO(Protocol):
    """Blocking prompt/answer contract shared by the CLI, the scripted
    student, and (inverted into turns) the HTTP service."""

    def exchange(self, prompt: Prompt) -> Answer: ...

    def notify(self, prompt: Prompt) -> None: ...


@dataclass(frozen=True)
class TargetSpec:
    """What the problem asks for: a variable of some object during some zone,
    both identified by the student's own descriptions."""

    var: str
    object_text: str
    zone_text: str


@dataclass
class GenerationResult:
    productive: bool
    responses: int


@dataclass
class SessionState:
    config: GaConfig
    seed: int
    domain: EquationDomain
    population: Population
    stores: SessionStores
    rng: np.random.Generator
    target: TargetSpec | None = None
    status: str = RUNNING
    solved_at: int | None = None

    @property
    def events(self):
        return self.stores.events


def new_session(
    config: GaConfig,
    seed: int,
    domain: EquationDomain | None = None,
    target: TargetSpec | None = None,
) -> SessionState:
    """Fresh session: seeded RNG, random population, empty stores."""
    domain = domain or EquationDomain.load()
    rng = np.random.default_rng(seed)
    population = init_population(config, seed, rng=rng)
    return SessionState(
        config=config,
        seed=seed,
        domain=domain,
        population=population,
        stores=SessionStores(domain=domain),
        rng=rng,
        target=target,
    )


def _normalize(text: str) -> str:
    return " ".join(text.split()).casefold()


def _text_match(stored: str, wanted: str) -> bool:
    a, b = _normalize(stored), _normalize(wanted)
    return a == b or a in b or b in a


def parse_target_variable(text: str, domain: EquationDomain) -> str | None:
    """Map free text onto a variable symbol: exact symbol, exact description,
    then description containment."""
    wanted = _normalize(text)
    for symbol in domain.variables:
        if wanted == symbol.casefold() or wanted == _normalize(domain.display(symbol)):
            return symbol
    for symbol, spec in domain.variables.items():
        if wanted == _normalize(spec.description):
            return symbol
    for symbol, spec in domain.variables.items():
        desc = _normalize(spec.description)
        if wanted and (wanted in desc or desc in wanted):
            return symbol
    return None


def capture_target(state: SessionState) -> Generator[Prompt, Answer, TargetSpec]:
    """Ask, once at session start, what the problem wants found."""
    stores = state.stores
    domain = state.domain
    choices = ", ".join(
        f"{spec.description} ({spec.display})" for spec in domain.variables.values()
    )
    symbol: str | None = None
    for _ in range(5):
        reply = yield from ask(
            stores,
            Prompt(
                INFO,
                f"What quantity is the problem asking you to find? One of: {choices}.",
                FREE_TEXT,
                context={"target_field": "variable"},
            ),
        )
        symbol = parse_target_variable(reply.text, domain)
        if symbol is not None:
            break
        yield from tell(
            stores,
            Prompt(INFO, "I did not recognize that quantity; please use one of the listed names.", NONE),
        )
    if symbol is None:
        raise ProtocolError("could not parse the target variable after 5 attempts")
    obj_reply = yield from ask(
        stores,
        Prompt(
            INFO,
            "Which object in the problem is that quantity about?",
            FREE_TEXT,
            context={"target_field": "object"},
        ),
    )
    zone_reply = yield from ask(
        stores,
        Prompt(
            INFO,
            "What was that object doing at the moment the problem asks about?",
            FREE_TEXT,
            context={"target_field": "zone"},
        ),
    )
    return TargetSpec(
        var=symbol,
        object_text=obj_reply.text.strip(),
        zone_text=zone_reply.text.strip(),
    )


def target_entry(state: SessionState) -> KnownEntry | None:
    """The known entry satisfying the session target, if any."""
    target = state.target
    if target is None:
        return None
    stores = state.stores
    for entry in stores.knowns:
        if stores.domain.variable_at(entry.eqn, entry.var) != target.var:
            continue
        obj_desc = stores.objects.entries.get(entry.object)
        zone_desc = stores.zones.entries.get((entry.object, entry.zone))
        if obj_desc is None or zone_desc is None:
            continue
        if _text_match(obj_desc, target.object_text) and _text_match(zone_desc, target.zone_text):
            return entry
    return None


def run_generation(state: SessionState) -> Generator[Prompt, Answer, GenerationResult]:
    """Walk every member's tuples, in order, through the question engine.

    Returns whether anything new was learned and how many questions drew a
    direct data item from the student.
    """
    responses = 0
    inserted = 0
    for member in state.population.members:
        for group in member.decoded().tolist():
            outcome = yield from process_tuple(QuadTuple(*group), state.stores)
            if outcome.status == "answered":
                inserted += len(outcome.entries)
                responses += sum(1 for e in outcome.entries if e.provenance == "student")
    return GenerationResult(productive=inserted > 0, responses=responses)


def _ask_zone_order(
    state: SessionState, obj: int, zone_ids: list[int]
) -> Generator[Prompt, Answer, list[int]]:
    stores = state.stores
    obj_desc = stores.objects.description(obj)
    listing = "; ".join(
        f"[{z}] {stores.zones.description(obj, z)}" for z in zone_ids
    )
    prompt_text = (
        f"You described {obj_desc} doing {len(zone_ids)} different things: {listing}. "
        "Enter the zone numbers in the order they happened, separated by spaces."
    )
    context = {
        "object": obj,
        "zones": [
            {"zone": z, "description": stores.zones.description(obj, z)} for z in zone_ids
        ],
    }
    for _ in range(5):
        reply = yield from ask(
            stores, Prompt(ZONE_ORDER, prompt_text, ORDERING, context=context)
        )
        try:
            order = [int(tok) for tok in reply.text.replace(",", " ").split()]
        except ValueError:
            order = []
        if sorted(order) == sorted(zone_ids):
            return order
        yield from tell(
            stores,
            Prompt(INFO, "Please list each zone number exactly once, e.g. "
                   + " ".join(str(z) for z in zone_ids) + ".", NONE),
        )
    raise ProtocolError("could not parse a zone ordering after 5 attempts")


def organizational_phase(state: SessionState) -> Generator[Prompt, Answer, list[KnownEntry]]:
    """Question-exhaustion housekeeping, per object.

    First the zones are put in temporal order (re-asked only when a zone
    appeared since the last ordering). Then, for each consecutive pair, the
    student is asked whether end-of-zone quantities carry over into the next
    zone; consents insert the carried values as knowns. A link is only
    offered while its source variable is actually known and its target is
    not. Idempotent: with nothing to do, nothing is asked.
    """
    stores = state.stores
    domain = state.domain
    new_entries: list[KnownEntry] = []
    for obj in list(stores.objects.entries):
        zone_ids = stores.zones.zones_for(obj)
        if len(zone_ids) < 2:
            continue
        if not stores.zones.order_current(obj):
            order = yield from _ask_zone_order(state, obj, zone_ids)
            stores.zones.set_order(obj, order)
            stores.log("zone-order", {"object": obj, "order": order})
        order = stores.zones.temporal_order[obj]
        obj_desc = stores.objects.description(obj)
        for earlier, later in zip(order, order[1:]):
            for link in domain.zone_links:
                eqn = domain.link_equation(link)
                source_key = (obj, eqn, domain.position_of(eqn, link.source), earlier)
                target_pos = domain.position_of(eqn, link.target)
                target_key = (obj, eqn, target_pos, later)
                if source_key not in stores.knowns or target_key in stores.knowns:
                    continue
                earlier_desc = stores.zones.description(obj, earlier)
                later_desc = stores.zones.description(obj, later)
                reply = yield from ask(
                    stores,
                    Prompt(
                        ZONE_LINK,
                        f"Right after {obj_desc} was {earlier_desc}, it was {later_desc}. "
                        f"Is the {domain.description(link.source)} of {obj_desc} at the end of "
                        f"{earlier_desc} the same as its {domain.description(link.target)} at "
                        f"the start of {later_desc}?",
                        YES_NO,
                        context={
                            "object": obj,
                            "from_zone": earlier,
                            "to_zone": later,
                            "source": link.source,
                            "target": link.target,
                            "quantity": link.quantity,
                        },
                    ),
                )
                if not reply.affirmative:
                    continue
                entry = KnownEntry(
                    object=obj,
                    eqn=eqn,
                    var=target_pos,
                    zone=later,
                    response=f"{domain.display(link.source)} from zone {earlier}",
                    provenance="zone-link",
                )
                stores.knowns.add(entry)
                stores.log(
                    "zone-link",
                    {
                        "object": obj,
                        "eqn": eqn,
                        "var": target_pos,
                        "symbol": link.target,
                        "zone": later,
                        "from_zone": earlier,
                        "response": entry.response,
                        "provenance": entry.provenance,
                    },
                )
                new_entries.append(entry)
                new_entries.extend(propagate_shared(entry, stores))
                new_entries.extend((yield from detect_solvable(stores)))
    return new_entries


def session_program(state: SessionState) -> Generator[Prompt, Answer, SessionState]:
    """The complete session as one prompt generator."""
    stores = state.stores
    config = state.config
    if state.target is None:
        stores.generation = 0
        state.target = yield from capture_target(state)
    for generation in range(1, config.max_generations + 1):
        stores.generation = generation
        stores.declined.clear()
        result = yield from run_generation(state)
        if not result.productive:
            yield from organizational_phase(state)
        fits = fitness_list(state.population, stores.knowns, config, state.domain)
        stores.log(
            "fitness-snapshot",
            {"min": min(fits), "mean": sum(fits) / len(fits), "max": max(fits)},
        )
        state.population = ga_step(state.population, fits, config, state.rng)
        found = target_entry(state)
        stores.log(
            "ga-step",
            {
                "mode": config.mode,
                "next_generation": state.population.generation,
                "solved": found is not None,
            },
        )
        if found is not None:
            state.status = SOLVED
            state.solved_at = generation
            yield from tell(
                stores,
                Prompt(
                    INFO,
                    f"That is everything the problem needs: the "
                    f"{state.domain.description(target_symbol(state))} you were "
                    f"asked for is now known ({found.response}).",
                    NONE,
                ),
            )
            break
    else:
        state.status = EXHAUSTED
    return state


def target_symbol(state: SessionState) -> str:
    if state.target is None:
        raise ValueError("session has no target")
    return state.target.var


def drive(program: Generator[Prompt, Answer, SessionState], io: StudentIO) -> SessionState:
    """Pump a session generator against a blocking io implementation."""
    try:
        prompt = next(program)
    except StopIteration as stop:
        return stop.value
    while True:
        if prompt.expected == NONE:
            io.notify(prompt)
            send: Answer | None = None
        else:
            send = io.exchange(prompt)
        try:
            prompt = program.send(send)
        except StopIteration as stop:
            return stop.value


def run_session(state: SessionState, io: StudentIO) -> SessionState:
    """Run a session to termination; an io hang-up marks it aborted."""
    try:
        return drive(session_program(state), io)
    except IoClosedError:
        state.status = ABORTED
        return state


# -- snapshots ---------------------------------------------------------------

SNAPSHOT_FORMAT = "kinetutor-session-v1"


def _pack_bits(chromosome: Chromosome) -> str:
    return base64.b64encode(np.packbits(chromosome.bits).tobytes()).decode("ascii")


def _unpack_bits(encoded: str, n_bits: int) -> Chromosome:
    raw = np.frombuffer(base64.b64decode(encoded), dtype=np.uint8)
    return Chromosome(np.unpackbits(raw, count=n_bits))


def save_snapshot(state: SessionState, path) -> None:
    """Serialize a session: config, population bits, stores, events, and the
    full answer trail (which makes a non-terminal session replayable)."""
    doc = {
        "format": SNAPSHOT_FORMAT,
        "config": {
            "population_size": state.config.population_size,
            "chromosome_bits": state.config.chromosome_bits,
            "crossover_probability": state.config.crossover_probability,
            "mutation_probability_per_bit": state.config.mutation_probability_per_bit,
            "max_generations": state.config.max_generations,
            "mode": state.config.mode,
        },
        "seed": state.seed,
        "status": state.status,
        "solved_at": state.solved_at,
        "target": None
        if state.target is None
        else {
            "var": state.target.var,
            "object_text": state.target.object_text,
            "zone_text": state.target.zone_text,
        },
        "population": {
            "generation": state.population.generation,
            "bits_per_member": state.config.chromosome_bits,
            "members": [_pack_bits(m) for m in state.population.members],
        },
        "stores": {
            "objects": {str(k): v for k, v in state.stores.objects.entries.items()},
            "objects_closed": state.stores.objects.closed,
            "zones": [
                {"object": o, "zone": z, "description": d}
                for (o, z), d in state.stores.zones.entries.items()
            ],
            "temporal_order": {str(k): v for k, v in state.stores.zones.temporal_order.items()},
            "knowns": [
                {
                    "object": e.object,
                    "eqn": e.eqn,
                    "var": e.var,
                    "zone": e.zone,
                    "response": e.response,
                    "provenance": e.provenance,
                }
                for e in state.stores.knowns
            ],
        },
        "events": [
            {
                "generation": ev.generation,
                "kind": ev.kind,
                "payload": ev.payload,
                "timestamp": ev.timestamp,
            }
            for ev in state.events
        ],
        "answer_trail": state.stores.answer_trail,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_snapshot_doc(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != SNAPSHOT_FORMAT:
        raise ValueError(f"not a {SNAPSHOT_FORMAT} snapshot: {path}")
    return doc


def population_from_snapshot(doc: dict) -> Population:
    pop = doc["population"]
    members = [_unpack_bits(encoded, pop["bits_per_member"]) for encoded in pop["members"]]
    return Population(members=members, generation=pop["generation"], rng_seed=doc["seed"])


def resume_session(doc: dict, domain: EquationDomain | None = None):
    """Rebuild a live session from a snapshot by replaying its answer trail.

    The engine is deterministic given (config, seed, answers), so feeding the
    recorded answers back through a fresh session reproduces the saved state
    exactly. Returns (state, program, pending_prompt); ``pending_prompt`` is
    None when the session already terminated.
    """
    config = GaConfig(**doc["config"])
    state = new_session(config, doc["seed"], domain=domain)
    program = session_program(state)
    trail = list(doc["answer_trail"])
    cursor = 0
    try:
        prompt = next(program)
        while True:
            if prompt.expected == NONE:
                prompt = program.send(None)
                continue
            if cursor >= len(trail):
                return state, program, prompt
            recorded = trail[cursor]
            cursor += 1
            prompt = program.send(
                Answer(prompt=prompt, text=recorded["text"], affirmative=recorded["affirmative"])
            )
    except StopIteration:
        return state, program, None
