"""Identity-keyed store for semantic units plus the statement/context types.

Whole statements are stored with role-named slots (never decomposed into
triples), contexts group assertions into situational frames, and the store
enforces referential integrity and part-of acyclicity on every write.

Concurrency: single writer, many readers. All mutations go through one lock
and replace units wholesale; unit objects are value-semantics records that
are safe to hand to other threads.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from typing import ClassVar, Iterable, Iterator

from .errors import DanglingReference, DuplicateIdConflict, NotFound, ParseFailure, PartCycle, WrongFrame
from .values import SlotValue, check_unit_id, is_attr_token, parse_rfc3339

STATEMENT_CLASSES = ("assertional", "universal", "prototypical", "directive", "conditional_directive")
FRAMES = ("situation", "document", "activity")
QUALITIES = ("observed", "inferred", "assumed")
UNIT_KINDS = (
    "statement",
    "context",
    "compound",
    "schema",
    "action",
    "objective",
    "plan",
    "condition-set",
    "evidence",
    "execution",
)


@dataclass(frozen=True)
class Provenance:
    source: str = "unspecified"
    created_at: str = "1970-01-01T00:00:00Z"

    def __post_init__(self):
        parse_rfc3339(self.created_at)


@dataclass(frozen=True)
class SemanticUnit:
    """Base record: identity, human label, provenance, and part-of links."""

    KIND: ClassVar[str] = "compound"

    id: str
    label: str = ""
    provenance: Provenance = field(default_factory=Provenance)
    parts: tuple[str, ...] = ()

    def __post_init__(self):
        check_unit_id(self.id)
        for part in self.parts:
            check_unit_id(part)

    @property
    def kind(self) -> str:
        return type(self).KIND

    def referenced_ids(self) -> tuple[str, ...]:
        """Every unit id this unit points at (resolved at put/load time)."""
        return self.parts


class CompoundUnit(SemanticUnit):
    """Plain grouping unit with no extra structure beyond its parts."""

    KIND = "compound"


@dataclass(frozen=True)
class StatementUnit(SemanticUnit):
    KIND: ClassVar[str] = "statement"

    statement_class: str = "assertional"
    schema_id: str | None = None
    slots: dict[str, SlotValue] = field(default_factory=dict)
    about: str | None = None
    confidence: float | None = None

    def __post_init__(self):
        super().__post_init__()
        if self.statement_class not in STATEMENT_CLASSES:
            raise ParseFailure(f"unknown statement class {self.statement_class!r}")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ParseFailure("confidence must lie in [0, 1]")

    def referenced_ids(self) -> tuple[str, ...]:
        refs = list(self.parts)
        if self.schema_id:
            refs.append(self.schema_id)
        if self.about:
            refs.append(self.about)
        return tuple(refs)


@dataclass(frozen=True)
class Assertion:
    """One instance-level datum inside a situation context."""

    subject: str
    attribute: str
    value: SlotValue
    quality: str = "observed"
    observed_at: str = "1970-01-01T00:00:00Z"
    provenance: str = ""

    def __post_init__(self):
        if not is_attr_token(self.attribute):
            raise ParseFailure(f"invalid attribute token {self.attribute!r} (must be dot-free)")
        if self.quality not in QUALITIES:
            raise ParseFailure(f"unknown assertion quality {self.quality!r}")
        parse_rfc3339(self.observed_at)


@dataclass(frozen=True)
class ContextUnit(SemanticUnit):
    KIND: ClassVar[str] = "context"

    frame: str = "situation"
    assertions: tuple[Assertion, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        if self.frame not in FRAMES:
            raise ParseFailure(f"unknown context frame {self.frame!r}")

    def current(self) -> dict[tuple[str, str], Assertion]:
        """Latest-wins view: max observed_at per (subject, attribute), later
        insertion winning ties. History stays in `assertions`."""
        best: dict[tuple[str, str], tuple] = {}
        for index, assertion in enumerate(self.assertions):
            key = (assertion.subject, assertion.attribute)
            stamp = (parse_rfc3339(assertion.observed_at), index)
            if key not in best or stamp >= best[key][0]:
                best[key] = (stamp, assertion)
        return {key: entry[1] for key, entry in best.items()}


StoredUnit = SemanticUnit  # orchestration's ExecutionRecord also satisfies the protocol


class UnitStore:
    """In-memory unit map with referential-integrity and acyclicity checks."""

    def __init__(self):
        self._units: dict[str, object] = {}
        self._lock = threading.RLock()

    # ---- reads -----------------------------------------------------------

    def __contains__(self, unit_id: str) -> bool:
        return unit_id in self._units

    def __len__(self) -> int:
        return len(self._units)

    def get_unit(self, unit_id: str):
        try:
            return self._units[unit_id]
        except KeyError:
            raise NotFound(f"no unit {unit_id!r}")

    def units(self) -> Iterator[object]:
        return iter([self._units[key] for key in sorted(self._units)])

    def list_units(
        self,
        kind: str | None = None,
        statement_class: str | None = None,
        frame: str | None = None,
    ) -> list[str]:
        out = []
        for unit_id in sorted(self._units):
            unit = self._units[unit_id]
            if kind is not None and getattr(unit, "kind", None) != kind:
                continue
            if statement_class is not None and getattr(unit, "statement_class", None) != statement_class:
                continue
            if frame is not None and getattr(unit, "frame", None) != frame:
                continue
            out.append(unit_id)
        return out

    # ---- writes ----------------------------------------------------------

    def put_unit(self, unit) -> str:
        return self.put_units([unit])[0]

    def put_units(self, units: Iterable[object]) -> list[str]:
        """Insert a batch; references may resolve to other members of it."""
        batch = list(units)
        with self._lock:
            ids = []
            batch_ids = {u.id for u in batch}
            for unit in batch:
                existing = self._units.get(unit.id)
                if existing is not None and existing != unit:
                    raise DuplicateIdConflict(f"unit {unit.id!r} already stored with different content")
                ids.append(unit.id)
            known = set(self._units) | batch_ids
            for unit in batch:
                for ref in unit.referenced_ids():
                    if ref not in known:
                        raise DanglingReference(f"unit {unit.id!r} references missing unit {ref!r}")
            staged = dict(self._units)
            staged.update({u.id: u for u in batch})
            for unit in batch:
                self._check_part_acyclic(unit.id, staged)
            self._units = staged
            return ids

    def _check_part_acyclic(self, start: str, units: dict[str, object]) -> None:
        seen: set[str] = set()
        stack = [(start, (start,))]
        while stack:
            current, trail = stack.pop()
            for part in getattr(units.get(current), "parts", ()) or ():
                if part == start:
                    raise PartCycle(f"part-of cycle through {start!r}: {' -> '.join(trail + (part,))}")
                if part not in seen:
                    seen.add(part)
                    stack.append((part, trail + (part,)))

    def replace_unit(self, unit) -> None:
        """State transition for an already-stored unit (same id, new content).

        Used for context assertion appends and execution-record progress; the
        public put_unit contract stays conflict-on-diff.
        """
        with self._lock:
            if unit.id not in self._units:
                raise NotFound(f"no unit {unit.id!r}")
            self._units[unit.id] = unit

    def add_assertion(self, context_id: str, assertion: Assertion) -> None:
        with self._lock:
            unit = self.get_unit(context_id)
            if not isinstance(unit, ContextUnit):
                raise NotFound(f"unit {context_id!r} is not a context")
            if unit.frame != "situation":
                raise WrongFrame(f"context {context_id!r} has frame {unit.frame!r}; assertions go to situation frames")
            self._units[context_id] = replace(unit, assertions=unit.assertions + (assertion,))

    # ---- persistence (implemented in aku.codec, re-exported here) --------

    def save_bundle(self, path) -> None:
        from . import codec

        codec.save_bundle(self, path)

    @classmethod
    def load_bundle(cls, path) -> "UnitStore":
        from . import codec

        return codec.load_bundle(path)
