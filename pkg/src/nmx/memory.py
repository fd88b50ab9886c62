"""Working memory: template facts with identity, recency, and change events."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol, Union

from .dsl import KnowledgeBase, NmxError

SlotValue = Union[str, int]


class WorkingMemoryError(NmxError):
    pass


@dataclass(frozen=True)
class Fact:
    id: int
    template: str
    slot_values: dict[str, SlotValue]
    timestamp: int

    def key(self) -> tuple:
        return (self.template, tuple(sorted(self.slot_values.items())))

    def to_json_obj(self) -> dict:
        return {"template": self.template, "slots": dict(self.slot_values)}

    def __hash__(self):
        return hash((self.id, self.template))


class Listener(Protocol):
    def on_assert(self, fact: Fact) -> None: ...
    def on_retract(self, fact: Fact) -> None: ...


class WorkingMemory:
    """Live fact store for one session.

    Duplicate asserts (same template and slot values) are idempotent. Ids and
    timestamps strictly increase and are never reused, so recency ordering
    stays meaningful across retract/re-assert cycles. One writer at a time.
    """

    def __init__(self, kb: KnowledgeBase):
        self._templates = {t.name: t for t in kb.templates}
        self._by_id: dict[int, Fact] = {}
        self._by_key: dict[tuple, Fact] = {}
        self._next_id = 1
        self._clock = 0
        self._listeners: list[Listener] = []

    def add_listener(self, listener: Listener) -> None:
        self._listeners.append(listener)

    def assert_fact(self, template: str, slot_values: dict[str, SlotValue]) -> tuple[Fact, bool]:
        tmpl = self._templates.get(template)
        if tmpl is None:
            raise WorkingMemoryError(f"unknown template '{template}'")
        missing = set(tmpl.slots) - set(slot_values)
        extra = set(slot_values) - set(tmpl.slots)
        if missing:
            raise WorkingMemoryError(
                f"fact for '{template}' is missing slots: {', '.join(sorted(missing))}")
        if extra:
            raise WorkingMemoryError(
                f"fact for '{template}' has undeclared slots: {', '.join(sorted(extra))}")

        key = (template, tuple(sorted(slot_values.items())))
        existing = self._by_key.get(key)
        if existing is not None:
            return existing, False

        self._clock += 1
        fact = Fact(self._next_id, template, dict(slot_values), self._clock)
        self._next_id += 1
        self._by_id[fact.id] = fact
        self._by_key[key] = fact
        for listener in self._listeners:
            listener.on_assert(fact)
        return fact, True

    def retract_fact(self, fact_id: int) -> bool:
        fact = self._by_id.pop(fact_id, None)
        if fact is None:
            return False
        del self._by_key[fact.key()]
        for listener in self._listeners:
            listener.on_retract(fact)
        return True

    def snapshot(self) -> list[Fact]:
        return sorted(self._by_id.values(), key=lambda f: f.timestamp)

    def __len__(self) -> int:
        return len(self._by_id)

    def __contains__(self, fact_id: int) -> bool:
        return fact_id in self._by_id


def facts_from_json(data: object) -> list[tuple[str, dict[str, SlotValue]]]:
    """Decode the CLI facts-file shape: an array of {template, slots} objects."""
    if not isinstance(data, list):
        raise WorkingMemoryError("facts file must contain a JSON array")
    out = []
    for i, obj in enumerate(data):
        if (not isinstance(obj, dict) or "template" not in obj or "slots" not in obj
                or not isinstance(obj["slots"], dict)):
            raise WorkingMemoryError(
                f"facts[{i}] must be an object with 'template' and 'slots'")
        slots = {}
        for slot, value in obj["slots"].items():
            if not isinstance(value, (str, int)) or isinstance(value, bool):
                raise WorkingMemoryError(
                    f"facts[{i}].slots.{slot} must be a string or integer")
            slots[slot] = value
        out.append((obj["template"], slots))
    return out
