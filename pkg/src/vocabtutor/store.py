"""Append-only event log backing the tutor engine.

Every state change the engine makes is recorded as one event; replaying the
log through a fresh engine reconstructs the live state exactly. Events are
never rewritten. The on-disk format is JSON Lines, one event per line:

    {"seq": 1, "ts": 0, "kind": "learnerRegistration", "payload": {...}}

seq starts at 1 and increases strictly. ts is a logical timestamp (the
simulator uses the day number); ordering within a timestamp is by seq.

phaseChange events with reason "score" are redundant (the score in the
neighbouring assessmentResponse determines the phase) and exist so dashboards
need not re-derive phases; replay verifies them against the recomputed state
instead of trusting them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import CorruptLog, StorageFailure

__all__ = ["Event", "EventStore", "read_event_log", "EVENT_KINDS"]

# Required payload keys per kind. "removedLearnerIds" on groupAssignment is
# optional and covers explicit removal (the only way to re-assign a learner).
EVENT_KINDS: dict[str, frozenset[str]] = {
    "learnerRegistration": frozenset({"learnerId", "classId"}),
    "groupAssignment": frozenset({"groupId", "learnerIds", "learnableWordIds",
                                  "assessableWordIds"}),
    "wordIntroduction": frozenset({"learnerIds", "wordIds"}),
    "learningExposure": frozenset({"learnerId", "wordId", "dimension"}),
    "assessmentResponse": frozenset({"learnerId", "wordId", "dimension",
                                     "response", "score", "phase"}),
    "phaseChange": frozenset({"learnerId", "wordId", "dimension",
                              "fromPhase", "toPhase", "reason"}),
}


@dataclass(frozen=True)
class Event:
    seq: int
    ts: float
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {"seq": self.seq, "ts": self.ts, "kind": self.kind, "payload": self.payload},
            separators=(",", ":"), sort_keys=True,
        )


def _validate(kind: str, payload: dict) -> None:
    required = EVENT_KINDS.get(kind)
    if required is None:
        raise ValueError(f"unknown event kind {kind!r}")
    missing = required - payload.keys()
    if missing:
        raise ValueError(f"{kind} payload missing {sorted(missing)}")


class EventStore:
    """In-memory event sequence with an optional JSONL sink.

    Appends are the only mutation. If a path is given, each event is written
    through immediately so a crashed run leaves a readable prefix.
    """

    def __init__(self, path: str | Path | None = None):
        self._events: list[Event] = []
        self._path = Path(path) if path is not None else None
        self._fh = None
        if self._path is not None:
            try:
                self._fh = open(self._path, "a", encoding="utf-8")
            except OSError as err:
                raise StorageFailure(f"cannot open {self._path}: {err}") from err

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self):
        return iter(self._events)

    @property
    def next_seq(self) -> int:
        return len(self._events) + 1

    def events(self) -> tuple[Event, ...]:
        return tuple(self._events)

    def append(self, kind: str, payload: dict, *, ts: float) -> Event:
        _validate(kind, payload)
        event = Event(seq=self.next_seq, ts=ts, kind=kind, payload=payload)
        if self._fh is not None:
            try:
                self._fh.write(event.to_json() + "\n")
                self._fh.flush()
            except OSError as err:
                raise StorageFailure(f"cannot append to {self._path}: {err}") from err
        self._events.append(event)
        return event

    def append_event(self, event: Event) -> Event:
        """Re-append an existing event verbatim; used by replay. Seq must line up."""
        if event.seq != self.next_seq:
            raise CorruptLog(f"expected seq {self.next_seq}, got {event.seq}", seq=event.seq)
        _validate(event.kind, event.payload)
        if self._fh is not None:
            try:
                self._fh.write(event.to_json() + "\n")
                self._fh.flush()
            except OSError as err:
                raise StorageFailure(f"cannot append to {self._path}: {err}") from err
        self._events.append(event)
        return event

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def write_jsonl(self, path: str | Path) -> None:
        """Dump the full sequence to a file (offline export)."""
        try:
            with open(path, "w", encoding="utf-8") as fh:
                for event in self._events:
                    fh.write(event.to_json() + "\n")
        except OSError as err:
            raise StorageFailure(f"cannot write {path}: {err}") from err


def read_event_log(path: str | Path) -> list[Event]:
    """Load and structurally validate a JSONL event log.

    Raises CorruptLog with the offending line's sequence (or line number when
    the sequence itself is unreadable); raises StorageFailure on IO faults.
    """
    events: list[Event] = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as err:
        raise StorageFailure(f"cannot read {path}: {err}") from err
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as err:
                raise CorruptLog(f"line {lineno}: invalid JSON: {err.msg}") from err
            try:
                event = Event(seq=int(raw["seq"]), ts=raw["ts"],
                              kind=str(raw["kind"]), payload=raw["payload"])
            except (KeyError, TypeError, ValueError) as err:
                raise CorruptLog(f"line {lineno}: malformed event: {err}") from err
            if event.seq != len(events) + 1:
                raise CorruptLog(f"expected seq {len(events) + 1}, found {event.seq}",
                                 seq=event.seq)
            try:
                _validate(event.kind, event.payload)
            except ValueError as err:
                raise CorruptLog(str(err), seq=event.seq) from err
            events.append(event)
    return events
