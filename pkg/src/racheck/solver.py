"""Polynomial consistency decision for single-writer graphs.

When every location is written by at most one thread, the modification
order is forced to agree with program order and SRA/RA/WRA checking all
collapse to WRA: synthesize the least reads-from relation satisfying
weak-read-coherence, then test porf-acyclicity.  The same loop with the
relaxed coherence pattern decides the relaxed models.

The loop starts from the rf mapping every read to the po-earliest
matching write and repairs one violating read per step, remapping it to
the po-earliest matching write at or after the violation's blocking
write.  Each repair is a strict step up in the pointwise po order on rf,
so the final rf is below every coherent rf.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .axioms import Axiom, check_axiom
from .model import (
    HB_EDGE,
    PO_EDGE,
    RF_EDGE,
    RF_INV_EDGE,
    Event,
    EventId,
    MemoryModel,
    ModificationOrder,
    PartialExecutionGraph,
    ReadsFrom,
    Verdict,
    max_writers,
    normalize_cycle,
)

RF_TOTALITY = "rf-totality"


class NotOneWriter(Exception):
    pass


class NoMatchingWrite(Exception):
    def __init__(self, read_id: EventId):
        super().__init__(f"no matching write for read {read_id}")
        self.read_id = read_id


class NoLaterWrite(Exception):
    def __init__(self, read_id: EventId):
        super().__init__(f"no matching write late enough for read {read_id}")
        self.read_id = read_id


@dataclass(frozen=True)
class Violation:
    """One coherence violation: the read, its current write, the blocking
    po-later write, and (relaxed mode only) the po-earlier read observing
    the blocker; None marks the blocker itself sitting po-before the read."""

    read: EventId
    write: EventId
    blocker: EventId
    via_read: EventId | None = None


@dataclass(frozen=True)
class SolverIteration:
    violation: Violation
    replacement: EventId


@dataclass
class SolverTrace:
    iterations: list[SolverIteration] = field(default_factory=list)
    final_rf: ReadsFrom | None = None

    @property
    def update_count(self) -> int:
        return len(self.iterations)


def _require_one_writer(g: PartialExecutionGraph) -> None:
    if max_writers(g) > 1:
        raise NotOneWriter("some location is written by more than one thread")


def derive_mo(g: PartialExecutionGraph) -> ModificationOrder:
    """The forced modification order: per location, its single writer
    thread's writes in program order."""
    _require_one_writer(g)
    return ModificationOrder(
        {var: [w.id for w in writes] for var, writes in g.writes_by_var.items()}
    )


# ---------------------------------------------------------------------------
# Internal integer-encoded state (hot path for large graphs)
# ---------------------------------------------------------------------------


class _State:
    def __init__(self, g: PartialExecutionGraph):
        self.g = g
        self.events: list[Event] = []
        self.index: dict[EventId, int] = {}
        for tid in sorted(g.thread_ids):
            for ev in g.events_of[tid]:
                self.index[ev.id] = len(self.events)
                self.events.append(ev)
        n = len(self.events)
        self.po_next = [-1] * n
        for tid in g.thread_ids:
            evs = g.events_of[tid]
            for a, b in zip(evs, evs[1:]):
                self.po_next[self.index[a.id]] = self.index[b.id]
        # writes per location in writer-thread program order
        self.var_writes: dict[str, list[int]] = {
            var: [self.index[w.id] for w in writes]
            for var, writes in g.writes_by_var.items()
        }
        self.write_pos: dict[int, int] = {}
        for writes in self.var_writes.values():
            for pos, w in enumerate(writes):
                self.write_pos[w] = pos
        self.reads: list[int] = [self.index[r.id] for r in g.reads]
        self.rf: dict[int, int] = {}
        self.rf_pos: dict[int, int] = {}
        self.readers: dict[int, list[int]] = {}

    def assign(self, r: int, w: int) -> None:
        old = self.rf.get(r)
        if old is not None:
            self.readers[old].remove(r)
        self.rf[r] = w
        self.rf_pos[r] = self.write_pos[w]
        self.readers.setdefault(w, []).append(r)

    def forward_set(self, start: int) -> bytearray:
        """Events reachable from start over po and current rf edges.

        The start itself is marked only to stop re-expansion; callers only
        query events distinct from it.
        """
        seen = bytearray(len(self.events))
        stack = [start]
        seen[start] = 1
        while stack:
            e = stack.pop()
            nxt = self.po_next[e]
            if nxt >= 0 and not seen[nxt]:
                seen[nxt] = 1
                stack.append(nxt)
            if self.events[e].is_write:
                for r in self.readers.get(e, ()):
                    if not seen[r]:
                        seen[r] = 1
                        stack.append(r)
        return seen

    def backward_set(self, start: int) -> set[int]:
        """Events that reach start over po and current rf edges."""
        po_prev = self._po_prev()
        seen: set[int] = set()
        stack = list(self._preds(start, po_prev))
        while stack:
            e = stack.pop()
            if e in seen:
                continue
            seen.add(e)
            stack.extend(p for p in self._preds(e, po_prev) if p not in seen)
        return seen

    def _po_prev(self) -> list[int]:
        prev = [-1] * len(self.events)
        for e, nxt in enumerate(self.po_next):
            if nxt >= 0:
                prev[nxt] = e
        return prev

    def _preds(self, e: int, po_prev: list[int]) -> list[int]:
        out = []
        if po_prev[e] >= 0:
            out.append(po_prev[e])
        if self.events[e].is_read and e in self.rf:
            out.append(self.rf[e])
        return out

    def rf_relation(self) -> ReadsFrom:
        return ReadsFrom(
            {self.events[r].id: self.events[w].id for r, w in self.rf.items()}
        )


def _init_state(g: PartialExecutionGraph, allow_future: bool = False) -> _State:
    """Bind every read to its po-earliest matching write.

    Under the porf-mandating models a read in the writer thread may only
    take writes strictly above itself: anything below closes a po/rf
    cycle immediately, and by the upward cyclicity of the rf order such
    a binding can never be part of an acyclic witness.  The pure relaxed
    model has no such axiom, so there the whole thread qualifies.
    """
    st = _State(g)
    for r in st.reads:
        ev = st.events[r]
        writes = st.var_writes.get(ev.var)
        if not writes:
            raise NoMatchingWrite(ev.id)
        chosen = -1
        for w in writes:
            wev = st.events[w]
            if (
                not allow_future
                and wev.id.thread == ev.id.thread
                and wev.id.index >= ev.id.index
            ):
                break  # rest of the thread sits at or below the read
            if wev.val != ev.val:
                continue
            chosen = w
            break
        if chosen < 0:
            raise NoMatchingWrite(ev.id)
        st.assign(r, chosen)
    return st


def initialize_rf(
    g: PartialExecutionGraph, mode: Axiom = Axiom.WEAK_READ_COHERENCE
) -> ReadsFrom:
    """The pointwise least rf: each read observes the po-earliest matching
    write of its location's writer thread (strictly above the read when
    the read shares that thread, except in relaxed mode)."""
    _require_one_writer(g)
    return _init_state(g, allow_future=mode is Axiom.RELAXED_READ_COHERENCE).rf_relation()


def _scan_weak(st: _State) -> Violation | None:
    """First weak-read-coherence violation in (thread, index) read order.

    A read r bound to write at position k is violated iff the next write
    of its location happens-before r (later writes only strengthen the
    reachability, so checking the immediate successor suffices).  One
    forward search per distinct (location, k) group covers all reads.
    """
    groups: dict[tuple[str, int], list[int]] = {}
    for r in st.reads:
        ev = st.events[r]
        k = st.rf_pos[r]
        if k + 1 < len(st.var_writes[ev.var]):
            groups.setdefault((ev.var, k), []).append(r)
    violated: list[int] = []
    for (var, k), members in groups.items():
        src = st.var_writes[var][k + 1]
        seen = st.forward_set(src)
        violated.extend(r for r in members if seen[r])
    if not violated:
        return None
    r = min(violated, key=lambda e: st.events[e].id)
    ev = st.events[r]
    writes = st.var_writes[ev.var]
    back = st.backward_set(r)
    k = st.rf_pos[r]
    best = max(j for j in range(k + 1, len(writes)) if writes[j] in back)
    return Violation(
        read=ev.id,
        write=st.events[writes[k]].id,
        blocker=st.events[writes[best]].id,
    )


def _scan_relaxed(st: _State) -> Violation | None:
    """First relaxed-read-coherence violation in read scan order.

    With mo forced to po, a read r bound at position k is violated iff a
    po-earlier event of its own thread exposes a write of the same
    location at a position above k: either that write itself or an
    earlier read bound to it.  A per-thread prefix scan finds, for each
    location, the best exposed position so far.
    """
    candidates: list[tuple[int, int, int | None]] = []
    for tid in st.g.thread_ids:
        best: dict[str, tuple[int, int | None]] = {}
        for ev in st.g.events_of[tid]:
            e = st.index[ev.id]
            if ev.is_read:
                k = st.rf_pos[e]
                seen = best.get(ev.var)
                if seen is not None and seen[0] > k:
                    candidates.append((e, seen[0], seen[1]))
                exposed = (st.rf_pos[e], e)
            else:
                exposed = (st.write_pos[e], None)
            cur = best.get(ev.var)
            if cur is None or exposed[0] > cur[0]:
                best[ev.var] = exposed
    if not candidates:
        return None
    e, pos, via = min(candidates, key=lambda c: st.events[c[0]].id)
    ev = st.events[e]
    writes = st.var_writes[ev.var]
    return Violation(
        read=ev.id,
        write=st.events[writes[st.rf_pos[e]]].id,
        blocker=st.events[writes[pos]].id,
        via_read=st.events[via].id if via is not None else None,
    )


def _apply_update(st: _State, violation: Violation, allow_future: bool = False) -> EventId:
    rev = st.g.event(violation.read)
    r = st.index[violation.read]
    writes = st.var_writes[rev.var]
    start = st.write_pos[st.index[violation.blocker]]
    chosen = -1
    for j in range(start, len(writes)):
        wev = st.events[writes[j]]
        if (
            not allow_future
            and wev.id.thread == rev.id.thread
            and wev.id.index >= rev.id.index
        ):
            break
        if wev.val != rev.val:
            continue
        chosen = writes[j]
        break
    if chosen < 0:
        raise NoLaterWrite(rev.id)
    st.assign(r, chosen)
    return st.events[chosen].id


def _state_from_rf(g: PartialExecutionGraph, rf: ReadsFrom) -> _State:
    st = _State(g)
    for rid, wid in rf.mapping.items():
        st.assign(st.index[rid], st.index[wid])
    return st


def next_violation(
    g: PartialExecutionGraph,
    rf: ReadsFrom,
    mode: Axiom = Axiom.WEAK_READ_COHERENCE,
) -> Violation | None:
    """Deterministic first coherence violation of rf, or None."""
    _require_one_writer(g)
    st = _state_from_rf(g, rf)
    if mode is Axiom.RELAXED_READ_COHERENCE:
        return _scan_relaxed(st)
    return _scan_weak(st)


def update_rf(
    g: PartialExecutionGraph,
    rf: ReadsFrom,
    violation: Violation,
    mode: Axiom = Axiom.WEAK_READ_COHERENCE,
) -> ReadsFrom:
    """Remap the violating read to the po-earliest matching write at or
    after the blocking write; strictly larger at exactly that read."""
    _require_one_writer(g)
    st = _state_from_rf(g, rf)
    _apply_update(st, violation, allow_future=mode is Axiom.RELAXED_READ_COHERENCE)
    return st.rf_relation()


def _porf_cycle_fast(st: _State) -> list[tuple[EventId, str]] | None:
    """Cycle over po and current rf edges, on the integer encoding."""
    n = len(st.events)
    WHITE, GREY, BLACK = 0, 1, 2
    color = [WHITE] * n

    def successors(e: int) -> list[tuple[int, str]]:
        out = []
        if st.po_next[e] >= 0:
            out.append((st.po_next[e], PO_EDGE))
        if st.events[e].is_write:
            out.extend((r, RF_EDGE) for r in sorted(st.readers.get(e, ())))
        return out

    for root in range(n):
        if color[root] != WHITE:
            continue
        path = [root]
        labels: list[str] = []
        color[root] = GREY
        iters = [iter(successors(root))]
        while iters:
            try:
                nxt, label = next(iters[-1])
            except StopIteration:
                iters.pop()
                color[path.pop()] = BLACK
                if labels:
                    labels.pop()
                continue
            if color[nxt] == GREY:
                pos = path.index(nxt)
                cycle = [
                    (st.events[path[i]].id, labels[i]) for i in range(pos, len(path) - 1)
                ]
                cycle.append((st.events[path[-1]].id, label))
                return normalize_cycle(cycle)
            if color[nxt] == WHITE:
                color[nxt] = GREY
                path.append(nxt)
                labels.append(label)
                iters.append(iter(successors(nxt)))
    return None


def _blocked_certificate(st: _State, v: Violation) -> list[tuple[EventId, str]]:
    steps = [(v.read, RF_INV_EDGE), (v.write, PO_EDGE)]
    if v.via_read is not None:
        steps += [(v.blocker, RF_EDGE), (v.via_read, PO_EDGE)]
    elif v.blocker.thread == v.read.thread and v.blocker.index < v.read.index:
        steps += [(v.blocker, PO_EDGE)]
    else:
        steps += [(v.blocker, HB_EDGE)]
    return steps


def solve(
    g: PartialExecutionGraph,
    m: MemoryModel,
    recheck_ob: bool = False,
) -> tuple[Verdict, SolverTrace]:
    """Decide consistency of a 1-writer graph under any supported model.

    Returns the verdict plus the repair trace.  A Consistent verdict
    carries the pointwise least coherent rf and the forced mo.  The
    relaxed models use the relaxed coherence pattern and skip the final
    porf test unless the acyclic variant is asked for.  `recheck_ob` runs
    the observed-order check on the witness for the causal-memory model,
    guarding the theory that it can never fire on 1-writer graphs.
    """
    _require_one_writer(g)
    base = m.canonical
    relaxed = base in (MemoryModel.RELAXED, MemoryModel.RELAXED_ACYCLIC)
    check_porf = base is not MemoryModel.RELAXED
    coherence_axiom = (
        Axiom.RELAXED_READ_COHERENCE if relaxed else Axiom.WEAK_READ_COHERENCE
    )
    trace = SolverTrace()

    try:
        st = _init_state(g, allow_future=relaxed)
    except NoMatchingWrite as exc:
        cert = [(exc.read_id, RF_INV_EDGE)]
        return Verdict.inconsistent(RF_TOTALITY, cert), trace

    scan = _scan_relaxed if relaxed else _scan_weak
    while True:
        violation = scan(st)
        if violation is None:
            break
        try:
            replacement = _apply_update(st, violation, allow_future=relaxed)
        except NoLaterWrite:
            trace.final_rf = st.rf_relation()
            cert = _blocked_certificate(st, violation)
            return Verdict.inconsistent(coherence_axiom.value, cert), trace
        trace.iterations.append(SolverIteration(violation, replacement))

    trace.final_rf = st.rf_relation()
    if check_porf:
        cycle = _porf_cycle_fast(st)
        if cycle is not None:
            return Verdict.inconsistent(Axiom.PORF_ACYCLICITY.value, cycle), trace

    rf = trace.final_rf
    mo = derive_mo(g)
    if recheck_ob and base is MemoryModel.CM:
        cert = check_axiom(g, rf, None, Axiom.OB_ACYCLICITY)
        if cert is not None:
            return Verdict.inconsistent(Axiom.OB_ACYCLICITY.value, cert), trace
    return Verdict.consistent(rf, mo), trace
