"""A deterministic student: answers engine prompts from a problem script.

This is the testing backend that lets whole sessions run unattended. The
script is ground truth: objects in the order they would be named, zones per
object in true temporal order, the facts each zone carries, and whether
end-of-zone quantities carry over into the next zone.

Engine zone indices are raw chromosome values, so the oracle binds them to
script zones the same way a real student would: the first time it hands out
a fact for an unbound zone it remembers which zone it "meant", and the
engine's follow-up zone question receives that zone's description, fixing
the binding. After that, all matching goes through the binding. Facts that
live in an already-bound zone are only surrendered when the engine asks with
that zone attached — answering them to an unzoned question would invent a
duplicate zone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .domain import EquationDomain
from .questions import (
    Answer,
    CAUTION_CONFIRM,
    INFO,
    KNOW_VARIABLE,
    MORE_OBJECTS,
    NEW_OBJECT,
    Prompt,
    ZONE_DESCRIPTION,
    ZONE_LINK,
    ZONE_ORDER,
)
from .session import StudentIO


class ScriptError(Exception):
    pass


class ScriptParseError(ScriptError):
    pass


class SchemaViolationError(ScriptError):
    pass


class UnanswerablePromptError(Exception):
    """The engine asked something the oracle cannot map onto the script;
    this always signals a prompt-protocol bug, not a bad script."""


@dataclass(frozen=True)
class ZoneScript:
    description: str
    facts: dict[str, str]


@dataclass(frozen=True)
class ObjectScript:
    description: str
    zones: tuple[ZoneScript, ...]
    link_consents: tuple[bool, ...]


@dataclass(frozen=True)
class TargetRef:
    object: int
    var: str
    zone: int


@dataclass(frozen=True)
class ProblemScript:
    title: str
    objects: tuple[ObjectScript, ...]
    target: TargetRef


def load_script(source, domain: EquationDomain | None = None) -> ProblemScript:
    """Load and validate a problem script from a path, file object, or dict."""
    if isinstance(source, dict):
        raw = source
    else:
        try:
            if hasattr(source, "read"):
                raw = json.load(source)
            else:
                with open(source, encoding="utf-8") as fh:
                    raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScriptParseError(f"problem script is not valid JSON: {exc}") from exc
        except OSError as exc:
            raise ScriptParseError(f"cannot read problem script: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScriptParseError("problem script must be a JSON object")

    domain = domain or EquationDomain.load()
    vocabulary = set(domain.variables)

    objects_raw = raw.get("objects")
    if not isinstance(objects_raw, list) or not objects_raw:
        raise SchemaViolationError("script needs a non-empty 'objects' list")
    objects: list[ObjectScript] = []
    for obj_index, obj_raw in enumerate(objects_raw):
        description = obj_raw.get("description", "")
        if not description:
            raise SchemaViolationError(f"objects[{obj_index}] has no description")
        zones_raw = obj_raw.get("zones")
        if not isinstance(zones_raw, list) or not zones_raw:
            raise SchemaViolationError(f"objects[{obj_index}] needs a non-empty 'zones' list")
        zones: list[ZoneScript] = []
        for zone_index, zone_raw in enumerate(zones_raw):
            zdesc = zone_raw.get("description", "")
            if not zdesc:
                raise SchemaViolationError(
                    f"objects[{obj_index}].zones[{zone_index}] has no description"
                )
            facts = dict(zone_raw.get("facts", {}))
            for symbol, value in facts.items():
                if symbol not in vocabulary:
                    raise SchemaViolationError(
                        f"objects[{obj_index}].zones[{zone_index}] fact uses unknown "
                        f"variable {symbol!r}"
                    )
                if not isinstance(value, str) or not value.strip():
                    raise SchemaViolationError(
                        f"objects[{obj_index}].zones[{zone_index}] fact {symbol!r} "
                        "must be a non-empty string"
                    )
            zones.append(ZoneScript(description=zdesc, facts=facts))
        consents_raw = obj_raw.get("link_consents")
        if consents_raw is None:
            consents = tuple(True for _ in range(len(zones) - 1))
        else:
            if len(consents_raw) != len(zones) - 1:
                raise SchemaViolationError(
                    f"objects[{obj_index}].link_consents must have one entry per "
                    "adjacent zone pair"
                )
            consents = tuple(bool(c) for c in consents_raw)
        objects.append(
            ObjectScript(description=description, zones=tuple(zones), link_consents=consents)
        )

    target_raw = raw.get("target")
    if not isinstance(target_raw, dict):
        raise SchemaViolationError("script needs a 'target' object")
    t_obj = target_raw.get("object")
    t_var = target_raw.get("var")
    t_zone = target_raw.get("zone")
    if not isinstance(t_obj, int) or not 0 <= t_obj < len(objects):
        raise SchemaViolationError(f"target.object {t_obj!r} does not reference an object")
    if t_var not in vocabulary:
        raise SchemaViolationError(f"target.var {t_var!r} is not in the variable vocabulary")
    if not isinstance(t_zone, int) or not 0 <= t_zone < len(objects[t_obj].zones):
        raise SchemaViolationError(f"target.zone {t_zone!r} does not reference a zone")
    return ProblemScript(
        title=raw.get("title", ""),
        objects=tuple(objects),
        target=TargetRef(object=t_obj, var=t_var, zone=t_zone),
    )


@dataclass
class OracleState:
    """Bindings between engine indices and script entities, plus the last
    fact offered (cautions confirm against it)."""

    revealed_objects: int = 0
    object_binding: dict[int, int] = field(default_factory=dict)
    zone_binding: dict[tuple[int, int], int] = field(default_factory=dict)
    pending_zone: dict[int, int] = field(default_factory=dict)
    last_offer: dict[int, tuple[str, str, int]] = field(default_factory=dict)

    def bound_script_zones(self, engine_object: int) -> set[int]:
        return {
            s for (n, _z), s in self.zone_binding.items() if n == engine_object
        }


def answer(prompt: Prompt, script: ProblemScript, state: OracleState) -> Answer:
    """Answer one engine prompt from the script, updating oracle state."""
    kind = prompt.kind
    ctx = prompt.context

    if kind == INFO and "target_field" in ctx:
        target = script.target
        if ctx["target_field"] == "variable":
            return Answer(prompt=prompt, text=target.var)
        if ctx["target_field"] == "object":
            return Answer(prompt=prompt, text=script.objects[target.object].description)
        if ctx["target_field"] == "zone":
            zone = script.objects[target.object].zones[target.zone]
            return Answer(prompt=prompt, text=zone.description)
        raise UnanswerablePromptError(f"unknown target field {ctx['target_field']!r}")

    if kind == NEW_OBJECT:
        if state.revealed_objects >= len(script.objects):
            # nothing left to name; the engine treats this as "no more objects"
            return Answer(prompt=prompt, text="no")
        script_index = state.revealed_objects
        state.revealed_objects += 1
        state.object_binding[ctx["object"]] = script_index
        return Answer(prompt=prompt, text=script.objects[script_index].description)

    if kind == MORE_OBJECTS:
        return Answer(
            prompt=prompt,
            text="yes" if state.revealed_objects < len(script.objects) else "no",
            affirmative=state.revealed_objects < len(script.objects),
        )

    if kind == KNOW_VARIABLE:
        engine_object = ctx["object"]
        engine_zone = ctx["zone"]
        symbol = ctx["symbol"]
        script_object = state.object_binding.get(engine_object)
        if script_object is None:
            raise UnanswerablePromptError(f"engine object {engine_object} was never bound")
        zones = script.objects[script_object].zones
        if ctx["zone_registered"]:
            bound = state.zone_binding.get((engine_object, engine_zone))
            if bound is None:
                raise UnanswerablePromptError(
                    f"engine zone {engine_zone} registered but never bound"
                )
            fact = zones[bound].facts.get(symbol)
            if fact is None:
                return Answer(prompt=prompt, text="no")
            state.last_offer[engine_object] = (symbol, fact, bound)
            return Answer(prompt=prompt, text=fact)
        taken = state.bound_script_zones(engine_object)
        for script_zone, zone in enumerate(zones):
            if script_zone in taken:
                continue
            fact = zone.facts.get(symbol)
            if fact is not None:
                state.pending_zone[engine_object] = script_zone
                state.last_offer[engine_object] = (symbol, fact, script_zone)
                return Answer(prompt=prompt, text=fact)
        return Answer(prompt=prompt, text="no")

    if kind == ZONE_DESCRIPTION:
        engine_object = ctx["object"]
        engine_zone = ctx["zone"]
        script_zone = state.pending_zone.pop(engine_object, None)
        if script_zone is None:
            raise UnanswerablePromptError("zone question without a pending fact offer")
        state.zone_binding[(engine_object, engine_zone)] = script_zone
        script_object = state.object_binding[engine_object]
        return Answer(
            prompt=prompt,
            text=script.objects[script_object].zones[script_zone].description,
        )

    if kind == CAUTION_CONFIRM:
        engine_object = ctx["object"]
        engine_zone = ctx["zone"]
        new_symbol = ctx["new_symbol"]
        script_object = state.object_binding.get(engine_object)
        bound = state.zone_binding.get((engine_object, engine_zone))
        offer = state.last_offer.get(engine_object)
        consistent = (
            script_object is not None
            and bound is not None
            and offer is not None
            and offer[0] == new_symbol
            and offer[2] == bound
            and script.objects[script_object].zones[bound].facts.get(new_symbol) == offer[1]
        )
        return Answer(prompt=prompt, text="yes" if consistent else "no", affirmative=consistent)

    if kind == ZONE_ORDER:
        engine_object = ctx["object"]
        entries = ctx["zones"]
        try:
            ranked = sorted(
                entries,
                key=lambda item: state.zone_binding[(engine_object, item["zone"])],
            )
        except KeyError as exc:
            raise UnanswerablePromptError(f"unbound zone in ordering prompt: {exc}") from exc
        return Answer(prompt=prompt, text=" ".join(str(item["zone"]) for item in ranked))

    if kind == ZONE_LINK:
        engine_object = ctx["object"]
        script_object = state.object_binding.get(engine_object)
        earlier = state.zone_binding.get((engine_object, ctx["from_zone"]))
        later = state.zone_binding.get((engine_object, ctx["to_zone"]))
        consent = (
            script_object is not None
            and earlier is not None
            and later == earlier + 1
            and script.objects[script_object].link_consents[earlier]
        )
        return Answer(prompt=prompt, text="yes" if consent else "no", affirmative=consent)

    raise UnanswerablePromptError(f"no scripted answer for prompt kind {kind!r}")


class ScriptedStudent(StudentIO):
    """StudentIO implementation backed by a problem script.

    ``corrupt_answers`` is reserved for simulating student mistakes and
    noisy replies; no corruption model ships yet.
    """

    def __init__(self, script: ProblemScript, corrupt_answers=None):
        if corrupt_answers is not None:
            raise NotImplementedError(
                "noisy-student simulation (answer corruption) is not implemented"
            )
        self.script = script
        self.state = OracleState()

    def exchange(self, prompt: Prompt) -> Answer:
        return answer(prompt, self.script, self.state)

    def notify(self, prompt: Prompt) -> None:
        pass
