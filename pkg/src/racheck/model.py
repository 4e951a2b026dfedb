"""Core domain types for execution-graph consistency testing.

An observed execution of a multi-threaded program is modelled as a
*partial execution graph*: per-thread sequences of read/write events with
program order (po) implied by listing order.  Consistency testing asks
whether a reads-from relation (rf) and per-location modification orders
(mo) exist that satisfy the axioms of a given memory model.

Everything here is immutable after construction and safe to share across
threads; all operations are pure functions of their inputs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

READ = "r"
WRITE = "w"

# Edge labels used in violation certificates.
PO_EDGE = "po"
RF_EDGE = "rf"
RF_INV_EDGE = "rf^-1"
MO_EDGE = "mo"
HB_EDGE = "hb"
OB_EDGE = "ob"

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

_IDENT_RE = re.compile(r"[A-Za-z0-9_.\-]+\Z")


class ModelError(Exception):
    """Base class for malformed inputs to the core model."""


class DuplicateThreadId(ModelError):
    pass


class UnknownEvent(ModelError):
    pass


class IncomparableWrites(ModelError):
    """Two writes assigned to one read live in different threads, so the
    program-order comparison underlying the rf ordering is undefined."""


class EventId(NamedTuple):
    """Stable address of an event: (thread id, 0-based position in thread)."""

    thread: str
    index: int

    def __str__(self) -> str:
        return f"{self.thread}:{self.index}"


class Event(NamedTuple):
    id: EventId
    op: str  # READ or WRITE
    var: str
    val: int

    @property
    def is_read(self) -> bool:
        return self.op == READ

    @property
    def is_write(self) -> bool:
        return self.op == WRITE

    def __str__(self) -> str:
        return f"{self.id} {self.op}({self.var},{self.val})"


def _check_identifier(kind: str, name: str) -> None:
    if not isinstance(name, str) or not _IDENT_RE.match(name):
        raise ModelError(f"{kind} {name!r} is not a valid identifier")


def _check_value(val: int) -> None:
    if not isinstance(val, int) or isinstance(val, bool):
        raise ModelError(f"value {val!r} is not an integer")
    if not INT64_MIN <= val <= INT64_MAX:
        raise ModelError(f"value {val} outside 64-bit signed range")


class PartialExecutionGraph:
    """Per-thread event sequences; po is derived from listing order.

    po(e1, e2) holds iff both events share a thread and e1 appears first.
    It is never materialized: queries compare indices.
    """

    def __init__(self, threads: list[tuple[str, list[Event]]]):
        self.thread_ids: list[str] = [tid for tid, _ in threads]
        self.events_of: dict[str, list[Event]] = {tid: evs for tid, evs in threads}
        self._by_id: dict[EventId, Event] = {}
        for _, evs in threads:
            for ev in evs:
                self._by_id[ev.id] = ev
        self.num_events: int = len(self._by_id)
        # Writes per location in (thread, index) order; reads in scan order.
        self.writes_by_var: dict[str, list[Event]] = {}
        for ev in sorted(self._by_id.values(), key=lambda e: e.id):
            if ev.is_write:
                self.writes_by_var.setdefault(ev.var, []).append(ev)
        self.reads: list[Event] = sorted(
            (e for e in self._by_id.values() if e.is_read), key=lambda e: e.id
        )

    def events(self) -> Iterable[Event]:
        for tid in self.thread_ids:
            yield from self.events_of[tid]

    def event(self, eid: EventId) -> Event:
        try:
            return self._by_id[eid]
        except KeyError:
            raise UnknownEvent(f"no event {eid}") from None

    def has_event(self, eid: EventId) -> bool:
        return eid in self._by_id

    def thread_len(self, tid: str) -> int:
        return len(self.events_of[tid])

    def po(self, a: EventId, b: EventId) -> bool:
        """Strict program order: same thread and a before b."""
        return a.thread == b.thread and a.index < b.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialExecutionGraph):
            return NotImplemented
        return self.thread_ids == other.thread_ids and self.events_of == other.events_of

    def __repr__(self) -> str:
        return f"PartialExecutionGraph({self.num_events} events, {len(self.thread_ids)} threads)"


def build_graph(threads: list[tuple[str, list[tuple[str, str, int]]]]) -> PartialExecutionGraph:
    """Build a validated graph from (thread id, [(op, var, val), ...]) pairs.

    EventIds are assigned by position.  An empty thread list yields the
    empty graph; duplicate thread ids are rejected.
    """
    seen: set[str] = set()
    built: list[tuple[str, list[Event]]] = []
    for tid, ops in threads:
        _check_identifier("thread id", tid)
        if tid in seen:
            raise DuplicateThreadId(f"thread id {tid!r} appears twice")
        seen.add(tid)
        evs: list[Event] = []
        for idx, (op, var, val) in enumerate(ops):
            if op not in (READ, WRITE):
                raise ModelError(f"op {op!r} is not {READ!r} or {WRITE!r}")
            _check_identifier("location", var)
            _check_value(val)
            evs.append(Event(EventId(tid, idx), op, var, val))
        built.append((tid, evs))
    return PartialExecutionGraph(built)


def writer_profile(g: PartialExecutionGraph) -> dict[str, set[str]]:
    """For each location, the set of thread ids containing a write to it.

    Callers classify a graph as 1-/2-/3-Writer by the maximum set size.
    """
    profile: dict[str, set[str]] = {}
    for var, writes in g.writes_by_var.items():
        profile[var] = {w.id.thread for w in writes}
    return profile


def max_writers(g: PartialExecutionGraph) -> int:
    profile = writer_profile(g)
    return max((len(s) for s in profile.values()), default=0)


@dataclass(frozen=True)
class ReadsFrom:
    """Total map from every read event to a same-variable, same-value write."""

    mapping: dict[EventId, EventId] = field(default_factory=dict)

    def writer(self, read_id: EventId) -> EventId:
        return self.mapping[read_id]

    def items(self):
        return sorted(self.mapping.items())

    def validate(self, g: PartialExecutionGraph) -> None:
        """Raise InvalidRf unless this relation satisfies its type invariants."""
        expected = {r.id for r in g.reads}
        if set(self.mapping) != expected:
            missing = expected - set(self.mapping)
            extra = set(self.mapping) - expected
            raise InvalidRf(f"rf domain mismatch: missing={sorted(missing)} extra={sorted(extra)}")
        for rid, wid in self.mapping.items():
            if not g.has_event(wid):
                raise InvalidRf(f"rf source {wid} does not exist")
            w, r = g.event(wid), g.event(rid)
            if not w.is_write:
                raise InvalidRf(f"rf source {wid} is not a write")
            if w.var != r.var or w.val != r.val:
                raise InvalidRf(f"rf edge {wid} -> {rid} mismatches on location or value")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReadsFrom):
            return NotImplemented
        return self.mapping == other.mapping

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.mapping.items())))

    def __repr__(self) -> str:
        inner = ", ".join(f"{r}<-{w}" for r, w in self.items())
        return f"ReadsFrom({inner})"


class InvalidRf(ModelError):
    pass


@dataclass(frozen=True)
class ModificationOrder:
    """Per-location total order over that location's write events."""

    per_var: dict[str, list[EventId]] = field(default_factory=dict)

    def order(self, var: str) -> list[EventId]:
        return self.per_var[var]

    def position(self, var: str) -> dict[EventId, int]:
        return {wid: i for i, wid in enumerate(self.per_var[var])}

    def validate(self, g: PartialExecutionGraph) -> None:
        for var, order in self.per_var.items():
            writes = {w.id for w in g.writes_by_var.get(var, [])}
            if len(order) != len(set(order)) or set(order) != writes:
                raise ModelError(
                    f"mo for {var!r} is not a permutation of that location's writes"
                )

    def covers(self, g: PartialExecutionGraph) -> bool:
        return all(var in self.per_var for var in g.writes_by_var)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModificationOrder):
            return NotImplemented
        return self.per_var == other.per_var

    def __repr__(self) -> str:
        inner = "; ".join(
            f"{var}: " + " ".join(map(str, order)) for var, order in sorted(self.per_var.items())
        )
        return f"ModificationOrder({inner})"


class MemoryModel(str, Enum):
    SRA = "sra"
    RA = "ra"
    WRA = "wra"
    RELAXED = "rlx"
    RELAXED_ACYCLIC = "rlx-acyclic"
    CC = "cc"
    CM = "cm"
    CCV = "ccv"

    @property
    def canonical(self) -> "MemoryModel":
        """Resolve model aliases: CC behaves as WRA, CCv as SRA."""
        if self is MemoryModel.CC:
            return MemoryModel.WRA
        if self is MemoryModel.CCV:
            return MemoryModel.SRA
        return self


@dataclass(frozen=True)
class Verdict:
    """Outcome of a consistency question.

    Consistent verdicts carry witnesses; inconsistent ones carry the failed
    axiom plus a certificate: (event, edge label) steps that, replayed in
    order, trace the violating cycle or path.  A None certificate marks an
    exhausted search with no single witnessing cycle.
    """

    axiom: str | None = None
    rf: ReadsFrom | None = None
    mo: ModificationOrder | None = None
    certificate: list[tuple[EventId, str]] | None = None

    @classmethod
    def consistent(cls, rf: ReadsFrom, mo: ModificationOrder | None = None) -> "Verdict":
        return cls(axiom=None, rf=rf, mo=mo)

    @classmethod
    def inconsistent(
        cls, axiom: str, certificate: list[tuple[EventId, str]] | None
    ) -> "Verdict":
        return cls(axiom=str(axiom), certificate=certificate)

    @property
    def is_consistent(self) -> bool:
        return self.axiom is None

    def __repr__(self) -> str:
        if self.is_consistent:
            return "Verdict(consistent)"
        return f"Verdict(inconsistent: {self.axiom})"


def rf_leq(rf1: ReadsFrom, rf2: ReadsFrom, g: PartialExecutionGraph) -> bool:
    """The pointwise program-order comparison on reads-from relations.

    True iff for every read, rf2's write is po-at-or-after rf1's write.
    Intended for 1-writer graphs, where all writes to a location share a
    thread; raises IncomparableWrites otherwise.
    """
    for rid in rf1.mapping:
        w1 = rf1.mapping[rid]
        w2 = rf2.mapping[rid]
        if w1.thread != w2.thread:
            raise IncomparableWrites(
                f"writes {w1} and {w2} for read {rid} are in different threads"
            )
        if w1.index > w2.index:
            return False
    return True


def rf_min(rf1: ReadsFrom, rf2: ReadsFrom, g: PartialExecutionGraph) -> ReadsFrom:
    """Pointwise po-minimum of two reads-from relations."""
    merged: dict[EventId, EventId] = {}
    for rid in rf1.mapping:
        w1 = rf1.mapping[rid]
        w2 = rf2.mapping[rid]
        if w1.thread != w2.thread:
            raise IncomparableWrites(
                f"writes {w1} and {w2} for read {rid} are in different threads"
            )
        merged[rid] = w1 if w1.index <= w2.index else w2
    return ReadsFrom(merged)


def normalize_cycle(cycle: list[tuple[EventId, str]]) -> list[tuple[EventId, str]]:
    """Rotate a certificate cycle so the smallest event id comes first."""
    if not cycle:
        return cycle
    start = min(range(len(cycle)), key=lambda i: cycle[i][0])
    return cycle[start:] + cycle[:start]
