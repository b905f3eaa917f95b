"""Turning decoded tuples into questions, cautions, and new knowledge.

The dialog machinery is written as generators: they ``yield`` a
:class:`Prompt` and are resumed with the student's :class:`Answer`. A
blocking front end (terminal, scripted oracle) drives the generator with a
simple loop; the HTTP service instead suspends it between turns. Either way
there is exactly one outstanding prompt at a time.

A tuple runs a fixed gauntlet of rejection rules before it may ask anything:

1. skip when its (object, equation, variable, zone) is already known;
2. unregistered object: ask for a new object (plus the stop question that can
   close the registry for good), or reject outright once the registry closed;
3. reject when the equation or variable position is out of range;
4. an affirmed variable with an unregistered zone asks for the zone
   description, then the completed tuple is inserted without further ado;
5. every accepted answer is copied into the other equations sharing that
   variable (physically the same quantity);
6. after any insertion, equations with a single missing variable are solved,
   to a fixed point.

Questions the student already declined are not repeated within the same
generation; the next generation may ask them again.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Generator

from .domain import (
    EquationDomain,
    KnownEntry,
    KnownsStore,
    ObjectRegistry,
    QuadTuple,
    SameVariableError,
    ZoneRegistry,
)

# prompt kinds
NEW_OBJECT = "new-object"
MORE_OBJECTS = "more-objects"
KNOW_VARIABLE = "know-variable"
ZONE_DESCRIPTION = "zone-description"
CAUTION_CONFIRM = "caution-confirm"
ZONE_ORDER = "zone-order"
ZONE_LINK = "zone-link"
SOLVE_ADVICE = "solve-advice"
INFO = "info"

# expected answer shapes
FREE_TEXT = "free-text"
YES_NO = "yes-no"
ORDERING = "ordering"
NONE = "none"

_NEGATIVE_ANSWERS = frozenset(
    {"no", "n", "none", "unknown", "not sure", "idk", "i don't know",
     "i dont know", "dont know", "don't know", "no idea", "not given"}
)

_PHASE_FILLER = {"start": "start of", "end": "end of", "span": "during"}


class ProtocolError(Exception):
    """The io side broke the prompt/answer contract."""


class AnswerShapeError(ProtocolError):
    """An answer did not match the prompt's expected shape."""


class UnknownObjectError(KeyError):
    pass


class UnknownZoneError(KeyError):
    pass


@dataclass
class Prompt:
    kind: str
    text: str
    expected: str
    context: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("prompt text must be non-empty")


@dataclass
class Answer:
    prompt: Prompt
    text: str = ""
    affirmative: bool | None = None


@dataclass(frozen=True)
class SessionEvent:
    """One entry of the append-only session log.

    ``timestamp`` is a logical sequence number, not wall-clock time, so that
    replaying a run produces a byte-identical log.
    """

    generation: int
    kind: str
    payload: dict
    timestamp: int


@dataclass
class SessionStores:
    """Everything a session accumulates, bundled for the dialog generators."""

    domain: EquationDomain
    objects: ObjectRegistry = field(default_factory=ObjectRegistry)
    zones: ZoneRegistry = field(default_factory=ZoneRegistry)
    knowns: KnownsStore = field(default_factory=KnownsStore)
    events: list[SessionEvent] = field(default_factory=list)
    answer_trail: list[dict] = field(default_factory=list)
    declined: set = field(default_factory=set)
    generation: int = 0
    multi_object_notice_sent: bool = False
    _seq: int = 0

    def log(self, kind: str, payload: dict) -> None:
        self.events.append(SessionEvent(self.generation, kind, payload, self._seq))
        self._seq += 1


@dataclass
class TupleOutcome:
    status: str  # "rejected" | "answered" | "declined"
    rule: int | None = None
    entries: list[KnownEntry] = field(default_factory=list)


def is_negative(text: str) -> bool:
    return text.strip().casefold() in _NEGATIVE_ANSWERS


def validate_answer(prompt: Prompt, answer: Answer) -> None:
    if prompt.expected == YES_NO and answer.affirmative is None:
        raise AnswerShapeError(f"prompt {prompt.kind!r} needs a yes/no answer")
    if prompt.expected in (FREE_TEXT, ORDERING) and not answer.text.strip():
        raise AnswerShapeError(f"prompt {prompt.kind!r} needs a non-empty text answer")


def ask(stores: SessionStores, prompt: Prompt) -> Generator[Prompt, Answer, Answer]:
    """Present a prompt, validate the reply, and log the exchange."""
    answer = yield prompt
    if not isinstance(answer, Answer):
        raise ProtocolError(f"expected an Answer for {prompt.kind!r}, got {answer!r}")
    validate_answer(prompt, answer)
    stores.answer_trail.append({"text": answer.text, "affirmative": answer.affirmative})
    payload = {
        "prompt_kind": prompt.kind,
        "text": prompt.text,
        "reply": answer.text,
        "affirmative": answer.affirmative,
    }
    if "tuple" in prompt.context:
        payload["tuple"] = prompt.context["tuple"]
    if prompt.kind == CAUTION_CONFIRM:
        payload["new"] = prompt.context.get("new_symbol")
        payload["past"] = prompt.context.get("past")
        stores.log("caution", payload)
    else:
        stores.log("question", payload)
    return answer


def tell(stores: SessionStores, prompt: Prompt) -> Generator[Prompt, Answer, None]:
    """Present a message that expects no reply, and log it."""
    yield prompt
    stores.log(
        "question",
        {"prompt_kind": prompt.kind, "text": prompt.text, "reply": None, "affirmative": None},
    )


def _entry_payload(domain: EquationDomain, entry: KnownEntry) -> dict:
    return {
        "object": entry.object,
        "eqn": entry.eqn,
        "var": entry.var,
        "symbol": domain.variable_at(entry.eqn, entry.var),
        "zone": entry.zone,
        "response": entry.response,
        "provenance": entry.provenance,
    }


def propagate_shared(entry: KnownEntry, stores: SessionStores) -> list[KnownEntry]:
    """Copy an accepted answer into every other equation containing its
    variable (same object, same zone). Silent: no prompt is involved."""
    domain = stores.domain
    symbol = domain.variable_at(entry.eqn, entry.var)
    copies: list[KnownEntry] = []
    for other in domain.shared_equations(symbol, entry.eqn):
        position = domain.position_of(other, symbol)
        key = (entry.object, other, position, entry.zone)
        if key in stores.knowns:
            continue
        copy = KnownEntry(
            object=entry.object,
            eqn=other,
            var=position,
            zone=entry.zone,
            response=entry.response,
            provenance="shared-propagation",
        )
        stores.knowns.add(copy)
        stores.log("propagation", _entry_payload(domain, copy))
        copies.append(copy)
    return copies


def detect_solvable(stores: SessionStores) -> Generator[Prompt, Answer, list[KnownEntry]]:
    """Insert variables that became algebraically solvable, to a fixed point.

    Whenever the known variables of some (object, equation, zone) reach the
    equation's variable count minus one, the missing variable is inserted as
    solved and the student is advised they can now do that algebra. Each
    insertion propagates across shared equations, which may enable the next
    round.
    """
    domain = stores.domain
    new_entries: list[KnownEntry] = []
    changed = True
    while changed:
        changed = False
        for obj, eqn, zone in stores.knowns.object_eqn_zone_triples():
            spec = domain.equation(eqn)
            positions = stores.knowns.known_positions(obj, eqn, zone)
            if len(positions) != spec.var_count - 1:
                continue
            missing = next(p for p in range(1, spec.var_count + 1) if p not in positions)
            entry = KnownEntry(
                object=obj,
                eqn=eqn,
                var=missing,
                zone=zone,
                response=f"solved from equation {eqn}, zone {zone}",
                provenance="solved-algebraically",
            )
            stores.knowns.add(entry)
            symbol = domain.variable_at(eqn, missing)
            advice = _solve_advice_text(stores, entry, symbol)
            stores.log("solve", {**_entry_payload(domain, entry), "advice": advice})
            yield Prompt(
                SOLVE_ADVICE,
                advice,
                NONE,
                context={"tuple": [obj, eqn, missing, zone], "symbol": symbol},
            )
            new_entries.append(entry)
            new_entries.extend(propagate_shared(entry, stores))
            changed = True
    return new_entries


def _solve_advice_text(stores: SessionStores, entry: KnownEntry, symbol: str) -> str:
    domain = stores.domain
    spec = domain.equation(entry.eqn)
    obj_desc = stores.objects.entries.get(entry.object, f"object {entry.object}")
    zone_desc = stores.zones.entries.get((entry.object, entry.zone), f"zone {entry.zone}")
    return (
        f"Equation {entry.eqn} ({spec.display}) now has a single unknown for "
        f"{obj_desc} while it was {zone_desc}: you can solve it for the "
        f"{domain.description(symbol)} ({domain.display(symbol)})."
    )


def render_caution(new: str, past: KnownEntry, stores: SessionStores) -> Prompt:
    """Confirmation prompt relating a newly claimed variable to a past known.

    Quotes the past response verbatim so the student can check they mean the
    same object doing the same thing.
    """
    domain = stores.domain
    past_symbol = domain.variable_at(past.eqn, past.var)
    if new == past_symbol:
        raise SameVariableError(f"caution cannot relate {new!r} to itself")
    try:
        obj_desc = stores.objects.description(past.object)
    except KeyError:
        raise UnknownObjectError(f"object {past.object} is not registered") from None
    try:
        zone_desc = stores.zones.description(past.object, past.zone)
    except KeyError:
        raise UnknownZoneError(
            f"zone {past.zone} is not registered for object {past.object}"
        ) from None
    filler = _PHASE_FILLER[domain.spec(new).phase]
    relation = domain.lookup_caution(new, past_symbol)
    text = (
        f"Do you know the {domain.description(new)} of {obj_desc} at the {filler} "
        f"when it was {zone_desc}? Keep in mind: {relation}, "
        f'which you said was "{past.response}".'
    )
    return Prompt(
        CAUTION_CONFIRM,
        text,
        YES_NO,
        context={
            "new_symbol": new,
            "object": past.object,
            "zone": past.zone,
            "past": _entry_payload(domain, past),
        },
    )


def process_tuple(
    t: QuadTuple, stores: SessionStores
) -> Generator[Prompt, Answer, TupleOutcome]:
    """Run one decoded tuple through the rejection rules and, if it survives,
    the question/caution/insertion flow. See the module docstring for the
    rule order."""
    domain = stores.domain
    objects = stores.objects
    zones = stores.zones
    knowns = stores.knowns

    # rule 1: the exact tuple is already known
    if (t.n, t.e, t.v, t.z) in knowns:
        return TupleOutcome("rejected", rule=1)

    # rule 2: object registration, or rejection once the registry closed
    if t.n not in objects:
        if objects.closed:
            return TupleOutcome("rejected", rule=2)
        reply = yield from ask(
            stores,
            Prompt(
                NEW_OBJECT,
                "Do you see any objects in the problem?",
                FREE_TEXT,
                context={"tuple": list(t), "object": t.n},
            ),
        )
        if is_negative(reply.text):
            objects.close()
            return TupleOutcome("rejected", rule=2)
        objects.register(t.n, reply.text.strip())
        if len(objects) >= 2 and not stores.multi_object_notice_sent:
            stores.multi_object_notice_sent = True
            yield from tell(
                stores,
                Prompt(
                    INFO,
                    "Heads up: each object is handled on its own here; questions "
                    "about objects meeting in space or time are not asked.",
                    NONE,
                ),
            )
        stop = yield from ask(
            stores,
            Prompt(
                MORE_OBJECTS,
                "Do you see any more objects in this problem?",
                YES_NO,
                context={"tuple": list(t)},
            ),
        )
        if not stop.affirmative:
            objects.close()

    # rule 3: equation and variable position must be in range
    if not domain.is_valid_ev(t.e, t.v):
        return TupleOutcome("rejected", rule=3)

    symbol = domain.variable_at(t.e, t.v)
    zone_registered = (t.n, t.z) in zones
    decline_key = (t.n, symbol, t.z if zone_registered else None)
    if decline_key in stores.declined:
        return TupleOutcome("declined")

    obj_desc = objects.description(t.n)
    reply = yield from ask(
        stores,
        Prompt(
            KNOW_VARIABLE,
            f"Do you know the {domain.description(symbol)} of {obj_desc}?",
            FREE_TEXT,
            context={
                "tuple": list(t),
                "symbol": symbol,
                "object": t.n,
                "zone": t.z,
                "zone_registered": zone_registered,
            },
        ),
    )
    if is_negative(reply.text):
        stores.declined.add(decline_key)
        return TupleOutcome("declined")
    response = reply.text.strip()

    if not zone_registered:
        # rule 4: bind the zone; the completed tuple is then inserted directly
        zone_reply = yield from ask(
            stores,
            Prompt(
                ZONE_DESCRIPTION,
                f"What was {obj_desc} doing when it had {domain.description(symbol)}, "
                f"which you said was {response}?",
                FREE_TEXT,
                context={"tuple": list(t), "symbol": symbol, "object": t.n, "zone": t.z},
            ),
        )
        zones.register(t.n, t.z, zone_reply.text.strip())
    else:
        # confirm against every distinct variable already known for this
        # object in this zone; any "no" drops the insertion
        seen: set[str] = set()
        for past in knowns.for_object_zone(t.n, t.z):
            past_symbol = domain.variable_at(past.eqn, past.var)
            if past_symbol == symbol or past_symbol in seen:
                continue
            seen.add(past_symbol)
            confirm = yield from ask(stores, render_caution(symbol, past, stores))
            if not confirm.affirmative:
                stores.declined.add(decline_key)
                return TupleOutcome("declined")

    entry = KnownEntry(
        object=t.n, eqn=t.e, var=t.v, zone=t.z, response=response, provenance="student"
    )
    knowns.add(entry)
    stores.log("answer", _entry_payload(domain, entry))
    inserted = [entry]
    inserted.extend(propagate_shared(entry, stores))  # rule 5
    inserted.extend((yield from detect_solvable(stores)))  # rule 6
    return TupleOutcome("answered", entries=inserted)
