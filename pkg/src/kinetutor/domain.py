"""Equation domain and the per-session stores that accumulate problem facts.

The domain (equations, variable vocabulary, caution texts) is loaded from a
bundled JSON file so alternate domains can be dropped in without code changes.
Everything the student tells us lands in one of three stores: the object
registry, the zone registry, or the knowns store. Responses are kept as
verbatim text; no arithmetic is ever done on them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterator, NamedTuple

FIELD_BITS = 3
FIELD_MAX = (1 << FIELD_BITS) - 1  # each tuple field is a 3-bit value, 0..7
TUPLE_BITS = 4 * FIELD_BITS

PROVENANCES = ("student", "shared-propagation", "solved-algebraically", "zone-link")


class DomainError(Exception):
    """Base class for equation-domain lookup failures."""


class InvalidEquationError(DomainError):
    pass


class VariableNotInEquationError(DomainError):
    pass


class UnknownVariableError(DomainError):
    pass


class SameVariableError(DomainError):
    """Caution lookup was asked to relate a variable to itself."""


class DuplicateKnownError(Exception):
    """A (object, eqn, var, zone) key was inserted twice."""


class QuadTuple(NamedTuple):
    """One decoded 12-bit chromosome group: object, equation, variable, zone."""

    n: int
    e: int
    v: int
    z: int


@dataclass(frozen=True)
class VariableSpec:
    """One entry of the variable vocabulary.

    ``phase`` says whether the variable describes the start of a zone, its
    end, or the whole span; caution prompts pick their wording from it.
    """

    symbol: str
    display: str
    description: str
    phase: str  # "start" | "end" | "span"


@dataclass(frozen=True)
class ZoneLinkSpec:
    """A pair of variables that may carry over between consecutive zones:
    the end-of-zone ``source`` can become the start-of-next-zone ``target``."""

    source: str
    target: str
    quantity: str


@dataclass(frozen=True)
class EquationSpec:
    """One equation row: number, display text, and positioned variables."""

    number: int
    display: str
    variables: tuple[str, ...]

    @property
    def var_count(self) -> int:
        return len(self.variables)

    def variable_at(self, position: int) -> str:
        """Symbol at 1-based ``position``."""
        if not 1 <= position <= self.var_count:
            raise VariableNotInEquationError(
                f"equation {self.number} has no variable position {position}"
            )
        return self.variables[position - 1]

    def position_of(self, symbol: str) -> int:
        """1-based position of ``symbol`` in this equation."""
        try:
            return self.variables.index(symbol) + 1
        except ValueError:
            raise VariableNotInEquationError(
                f"variable {symbol!r} does not appear in equation {self.number}"
            ) from None


class CautionTable:
    """Relationship texts for every ordered pair of distinct variables.

    Rows are keyed (new, past): the variable the student now claims to know
    against one they claimed earlier. With an 8-symbol vocabulary that is
    8*7 = 56 rows.
    """

    def __init__(self, rows: dict[tuple[str, str], str]):
        self._rows = dict(rows)

    def __len__(self) -> int:
        return len(self._rows)

    def lookup(self, new: str, past: str) -> str:
        if new == past:
            raise SameVariableError(f"no caution relates {new!r} to itself")
        try:
            return self._rows[(new, past)]
        except KeyError:
            raise UnknownVariableError(f"no caution row for ({new!r}, {past!r})") from None


class EquationDomain:
    """The loaded equation table plus variable vocabulary and caution rows."""

    def __init__(
        self,
        name: str,
        variables: list[VariableSpec],
        equations: list[EquationSpec],
        cautions: CautionTable,
        zone_links: list[ZoneLinkSpec] | None = None,
    ):
        self.name = name
        self.variables = {v.symbol: v for v in variables}
        self.equations = {eq.number: eq for eq in equations}
        self.cautions = cautions
        self.zone_links = list(zone_links or [])
        self._validate()
        # symbol -> sorted equation numbers containing it
        self._containing: dict[str, list[int]] = {
            sym: sorted(eq.number for eq in equations if sym in eq.variables)
            for sym in self.variables
        }

    def _validate(self) -> None:
        for var in self.variables.values():
            if not var.description:
                raise DomainError(f"variable {var.symbol!r} has an empty description")
        for eq in self.equations.values():
            for sym in eq.variables:
                if sym not in self.variables:
                    raise DomainError(
                        f"equation {eq.number} uses unknown variable {sym!r}"
                    )
        n_vars = len(self.variables)
        expected_rows = n_vars * (n_vars - 1)
        if len(self.cautions) != expected_rows:
            raise DomainError(
                f"caution table has {len(self.cautions)} rows, expected {expected_rows}"
            )
        for link in self.zone_links:
            if link.source not in self.variables or link.target not in self.variables:
                raise DomainError(f"zone link {link} names an unknown variable")
            if self.link_equation(link) is None:
                raise DomainError(f"no equation contains both {link.source!r} and {link.target!r}")

    def link_equation(self, link: ZoneLinkSpec) -> int | None:
        """Lowest-numbered equation containing both ends of a zone link."""
        for number in sorted(self.equations):
            variables = self.equations[number].variables
            if link.source in variables and link.target in variables:
                return number
        return None

    @classmethod
    def from_dict(cls, raw: dict) -> "EquationDomain":
        variables = [VariableSpec(**entry) for entry in raw["variables"]]
        equations = [
            EquationSpec(
                number=entry["number"],
                display=entry["display"],
                variables=tuple(entry["variables"]),
            )
            for entry in raw["equations"]
        ]
        rows = {(row["new"], row["past"]): row["text"] for row in raw["cautions"]}
        for (new, past), text in rows.items():
            if not text:
                raise DomainError(f"empty caution text for ({new!r}, {past!r})")
        links = [ZoneLinkSpec(**entry) for entry in raw.get("zone_links", [])]
        return cls(
            raw.get("name", "unnamed domain"),
            variables,
            equations,
            CautionTable(rows),
            zone_links=links,
        )

    @classmethod
    def load(cls, path=None) -> "EquationDomain":
        """Load a domain file; defaults to the bundled 1-D kinematics table."""
        if path is None:
            source = resources.files("kinetutor.data").joinpath("kinematics_1d.json")
            raw = json.loads(source.read_text(encoding="utf-8"))
        else:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        return cls.from_dict(raw)

    # -- equation/variable lookups ------------------------------------------

    def equation(self, number: int) -> EquationSpec:
        try:
            return self.equations[number]
        except KeyError:
            raise InvalidEquationError(f"no equation numbered {number}") from None

    def var_count(self, eqn_number: int) -> int:
        return self.equation(eqn_number).var_count

    @property
    def max_var_count(self) -> int:
        return max(eq.var_count for eq in self.equations.values())

    def variable_at(self, eqn_number: int, position: int) -> str:
        return self.equation(eqn_number).variable_at(position)

    def position_of(self, eqn_number: int, symbol: str) -> int:
        return self.equation(eqn_number).position_of(symbol)

    def is_valid_ev(self, e: int, v: int) -> bool:
        """True when equation ``e`` exists and ``v`` is one of its positions."""
        eq = self.equations.get(e)
        return eq is not None and 1 <= v <= eq.var_count

    def spec(self, symbol: str) -> VariableSpec:
        try:
            return self.variables[symbol]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {symbol!r}") from None

    def description(self, symbol: str) -> str:
        return self.spec(symbol).description

    def display(self, symbol: str) -> str:
        return self.spec(symbol).display

    def equations_containing(self, symbol: str) -> list[int]:
        self.spec(symbol)
        return list(self._containing[symbol])

    def shared_equations(self, symbol: str, eqn_number: int) -> list[int]:
        """Every other equation in which ``symbol`` also appears.

        Physically it is the same quantity there, so an answer for one
        equation is an answer for all of them.
        """
        eq = self.equation(eqn_number)
        if symbol not in eq.variables:
            raise VariableNotInEquationError(
                f"variable {symbol!r} does not appear in equation {eqn_number}"
            )
        return [num for num in self._containing[symbol] if num != eqn_number]

    def lookup_caution(self, new: str, past: str) -> str:
        self.spec(new)
        self.spec(past)
        return self.cautions.lookup(new, past)


@dataclass(frozen=True)
class KnownEntry:
    """One accumulated fact: variable ``var`` of equation ``eqn`` is known
    for ``object`` in ``zone``, with the student's verbatim response text."""

    object: int
    eqn: int
    var: int  # 1-based position within eqn
    zone: int
    response: str
    provenance: str

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.object, self.eqn, self.var, self.zone)


class KnownsStore:
    """Insertion-ordered set of known entries, unique per (object, eqn, var, zone)."""

    def __init__(self) -> None:
        self._entries: dict[tuple[int, int, int, int], KnownEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[KnownEntry]:
        return iter(self._entries.values())

    def __contains__(self, key: tuple[int, int, int, int]) -> bool:
        return key in self._entries

    def add(self, entry: KnownEntry) -> None:
        if entry.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {entry.provenance!r}")
        if entry.key in self._entries:
            raise DuplicateKnownError(f"known {entry.key} already present")
        self._entries[entry.key] = entry

    def get(self, key: tuple[int, int, int, int]) -> KnownEntry | None:
        return self._entries.get(key)

    def for_object_zone(self, obj: int, zone: int) -> list[KnownEntry]:
        """Entries for one (object, zone), in insertion order."""
        return [e for e in self._entries.values() if e.object == obj and e.zone == zone]

    def count_matching(self, n: int, e: int, z: int) -> int:
        """How many entries share this (object, eqn, zone), any variable."""
        return sum(1 for k in self._entries.values() if (k.object, k.eqn, k.zone) == (n, e, z))

    def known_positions(self, obj: int, eqn: int, zone: int) -> set[int]:
        return {
            k.var
            for k in self._entries.values()
            if (k.object, k.eqn, k.zone) == (obj, eqn, zone)
        }

    def object_eqn_zone_triples(self) -> list[tuple[int, int, int]]:
        """Distinct (object, eqn, zone) triples, in first-seen order."""
        seen: dict[tuple[int, int, int], None] = {}
        for k in self._entries.values():
            seen.setdefault((k.object, k.eqn, k.zone), None)
        return list(seen)


class ObjectRegistry:
    """Objects the student has named, indexed by the chromosome value that
    first asked about them. Closing the registry (student says there are no
    more objects) permanently rejects unregistered indices."""

    def __init__(self) -> None:
        self.entries: dict[int, str] = {}
        self.closed = False

    def __contains__(self, index: int) -> bool:
        return index in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def register(self, index: int, description: str) -> None:
        if self.closed:
            raise ValueError("object registry is closed")
        if index in self.entries:
            raise ValueError(f"object index {index} already registered")
        if not description:
            raise ValueError("object description must be non-empty")
        self.entries[index] = description

    def close(self) -> None:
        self.closed = True

    def description(self, index: int) -> str:
        return self.entries[index]


class ZoneRegistry:
    """Acceleration zones per object, keyed (object index, zone index).

    Zone indices are raw chromosome values; whichever value first triggered
    the zone prompt owns that zone for its object. ``temporal_order`` holds
    the student-supplied ordering per object, once asked.
    """

    def __init__(self) -> None:
        self.entries: dict[tuple[int, int], str] = {}
        self.temporal_order: dict[int, list[int]] = {}

    def __contains__(self, key: tuple[int, int]) -> bool:
        return key in self.entries

    def register(self, obj: int, zone: int, description: str) -> None:
        if (obj, zone) in self.entries:
            raise ValueError(f"zone {zone} already registered for object {obj}")
        if not description:
            raise ValueError("zone description must be non-empty")
        self.entries[(obj, zone)] = description

    def description(self, obj: int, zone: int) -> str:
        return self.entries[(obj, zone)]

    def zones_for(self, obj: int) -> list[int]:
        """Zone indices registered for one object, in registration order."""
        return [z for (o, z) in self.entries if o == obj]

    def set_order(self, obj: int, order: list[int]) -> None:
        if sorted(order) != sorted(self.zones_for(obj)):
            raise ValueError(f"order {order} is not a permutation of object {obj}'s zones")
        self.temporal_order[obj] = list(order)

    def order_current(self, obj: int) -> bool:
        """True when a stored ordering covers exactly the zones seen so far."""
        order = self.temporal_order.get(obj)
        return order is not None and sorted(order) == sorted(self.zones_for(obj))
