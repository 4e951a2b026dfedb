"""Brute-force consistency decision for arbitrary execution graphs.

Ground truth for everything else: enumerate value-matching reads-from
candidates and per-location write orders, and verify the axioms.  The
public streams are the plain Cartesian products.  The decision entry
points run the same space as a backtracking search, most-constrained
read first, discarding partial assignments only when no completion can
satisfy the queried model:

 * a po/rf cycle never disappears when more rf edges are added, so
   models mandating porf-acyclicity prune on the first cycle;
 * a weak-read-coherence violation dooms every modification order under
   SRA and RA as well (one of the two orders of the offending writes
   breaks read- or (strong-)write-coherence), so those models prune on
   it too;
 * under the relaxed models the per-location write-order constraints
   forced by the axioms only grow with the assignment, so a forced
   cycle prunes.

Happens-before is maintained incrementally as per-event reachability
bitmasks, snapshotted per search node.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .axioms import Axiom, check_axiom, model_needs_mo
from .model import (
    RF_INV_EDGE,
    Event,
    EventId,
    MemoryModel,
    ModificationOrder,
    PartialExecutionGraph,
    ReadsFrom,
    Verdict,
)
from .solver import RF_TOTALITY

EXHAUSTED = "exhausted"


class BudgetExceeded(Exception):
    def __init__(self, limit: str, value: int):
        super().__init__(f"oracle budget exceeded: {limit} > {value}")
        self.limit = limit


@dataclass(frozen=True)
class OracleLimits:
    """Enumeration ceilings; exceeding any limit raises, never truncates."""

    max_events: int = 128
    max_rf_candidates: int = 1_000_000
    max_mo_permutations: int = 10_000


DEFAULT_LIMITS = OracleLimits()


def _check_events(g: PartialExecutionGraph, limits: OracleLimits) -> None:
    if g.num_events > limits.max_events:
        raise BudgetExceeded("max_events", limits.max_events)


def _read_candidates(g: PartialExecutionGraph) -> list[tuple[Event, list[EventId]]]:
    out = []
    for r in g.reads:
        matches = [w.id for w in g.writes_by_var.get(r.var, []) if w.val == r.val]
        out.append((r, matches))
    return out


def enumerate_rfs(g: PartialExecutionGraph, limits: OracleLimits = DEFAULT_LIMITS):
    """All value-matching reads-from relations, lexicographic in read order.

    Empty stream iff some read has no matching write.
    """
    _check_events(g, limits)
    cands = _read_candidates(g)
    if any(not matches for _, matches in cands):
        return
    count = 0
    for combo in itertools.product(*(matches for _, matches in cands)):
        count += 1
        if count > limits.max_rf_candidates:
            raise BudgetExceeded("max_rf_candidates", limits.max_rf_candidates)
        yield ReadsFrom({r.id: wid for (r, _), wid in zip(cands, combo)})


def enumerate_mos(g: PartialExecutionGraph, limits: OracleLimits = DEFAULT_LIMITS):
    """All per-location write orders, lexicographic over sorted locations."""
    _check_events(g, limits)
    variables = sorted(g.writes_by_var)
    perms_per_var = [
        itertools.permutations([w.id for w in g.writes_by_var[var]]) for var in variables
    ]
    count = 0
    for combo in itertools.product(*perms_per_var):
        count += 1
        if count > limits.max_mo_permutations:
            raise BudgetExceeded("max_mo_permutations", limits.max_mo_permutations)
        yield ModificationOrder({var: list(order) for var, order in zip(variables, combo)})


# ---------------------------------------------------------------------------
# Backtracking search
# ---------------------------------------------------------------------------


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Encoding:
    """Integer-indexed view of a graph with po reachability masks."""

    def __init__(self, g: PartialExecutionGraph):
        self.g = g
        self.events: list[Event] = sorted(g.events(), key=lambda e: e.id)
        self.index: dict[EventId, int] = {ev.id: i for i, ev in enumerate(self.events)}
        n = len(self.events)
        self.reach = [0] * n  # strict forward po-closure, grows with rf edges
        self.coreach = [0] * n
        for tid in g.thread_ids:
            evs = g.events_of[tid]
            suffix = 0
            for ev in reversed(evs):
                i = self.index[ev.id]
                self.reach[i] = suffix
                suffix |= 1 << i
            prefix = 0
            for ev in evs:
                i = self.index[ev.id]
                self.coreach[i] = prefix
                prefix |= 1 << i
        self.var_write_mask: dict[str, int] = {}
        for var, writes in g.writes_by_var.items():
            mask = 0
            for w in writes:
                mask |= 1 << self.index[w.id]
            self.var_write_mask[var] = mask


class _Search:
    def __init__(self, g: PartialExecutionGraph, m: MemoryModel, limits: OracleLimits):
        self.g = g
        self.model = m.canonical
        self.limits = limits
        self.enc = _Encoding(g)
        base = self.model
        relaxed = base in (MemoryModel.RELAXED, MemoryModel.RELAXED_ACYCLIC)
        self.prune_porf = base is not MemoryModel.RELAXED
        self.prune_weakrc = not relaxed
        self.prune_relaxed = relaxed
        self.check_ob = base is MemoryModel.CM
        # most-constrained read first; candidate order stays (thread, index)
        cands = _read_candidates(g)
        self.order = sorted(cands, key=lambda rc: (len(rc[1]), rc[0].id))
        self.rf_nodes = 0
        self.assignment: dict[int, int] = {}  # read idx -> write idx
        self.assigned_reads: list[tuple[int, int, int]] = []  # (read, write, var mask)
        # relaxed forced-order digraph per location
        self.forced: dict[str, dict[EventId, set[EventId]]] = {}

    # -- relaxed forced-order bookkeeping --------------------------------

    def _forced_new_pairs(self, rid: EventId, wid: EventId) -> list[tuple[EventId, EventId]]:
        rev = self.g.event(rid)
        pairs: list[tuple[EventId, EventId]] = []
        for w in self.g.writes_by_var[rev.var]:
            if w.id != wid and w.id.thread == rid.thread and w.id.index < rid.index:
                pairs.append((w.id, wid))
        for other, ow, _ in self.assigned_reads:
            oid = self.enc.events[other].id
            if oid.thread != rid.thread or self.g.event(oid).var != rev.var:
                continue
            owid = self.enc.events[ow].id
            if oid.index < rid.index and owid != wid:
                pairs.append((owid, wid))
            elif oid.index > rid.index and wid != owid:
                pairs.append((wid, owid))
        return pairs

    def _forced_cycle(self, var: str) -> bool:
        adj = self.forced.get(var, {})
        WHITE, GREY, BLACK = 0, 1, 2
        color: dict[EventId, int] = {}
        for root in adj:
            if color.get(root, WHITE) != WHITE:
                continue
            stack = [(root, iter(adj.get(root, ())))]
            color[root] = GREY
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    c = color.get(nxt, WHITE)
                    if c == GREY:
                        return True
                    if c == WHITE:
                        color[nxt] = GREY
                        stack.append((nxt, iter(adj.get(nxt, ()))))
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()
        return False

    # -- search -----------------------------------------------------------

    def run(self, stop_at_first: bool) -> tuple[
        tuple[ReadsFrom, ModificationOrder | None] | None, list[ReadsFrom]
    ]:
        witness: list[tuple[ReadsFrom, ModificationOrder | None]] = []
        found: list[ReadsFrom] = []

        enc = self.enc

        def leaf() -> bool:
            rf = ReadsFrom(
                {enc.events[r].id: enc.events[w].id for r, w in self.assignment.items()}
            )
            mo: ModificationOrder | None = None
            if self.check_ob:
                if check_axiom(self.g, rf, None, Axiom.OB_ACYCLICITY) is not None:
                    return False
            if model_needs_mo(self.model):
                mo = _first_mo(self.g, enc, rf, self.model, self.limits)
                if mo is None:
                    return False
            found.append(rf)
            if stop_at_first:
                witness.append((rf, mo))
                return True
            return False

        def descend(depth: int) -> bool:
            if depth == len(self.order):
                return leaf()
            rev, matches = self.order[depth]
            r = enc.index[rev.id]
            var_mask = enc.var_write_mask[rev.var]
            for wid in matches:
                w = enc.index[wid]
                self.rf_nodes += 1
                if self.rf_nodes > self.limits.max_rf_candidates:
                    raise BudgetExceeded(
                        "max_rf_candidates", self.limits.max_rf_candidates
                    )
                reach_snap = list(enc.reach)
                coreach_snap = list(enc.coreach)
                sources = enc.coreach[w] | (1 << w)
                targets = enc.reach[r] | (1 << r)
                for s in _bits(sources):
                    enc.reach[s] |= targets
                for t in _bits(targets):
                    enc.coreach[t] |= sources
                self.assignment[r] = w
                self.assigned_reads.append((r, w, var_mask))
                added: list[tuple[EventId, EventId]] = []
                ok = True
                if self.prune_porf and enc.reach[r] & (1 << r):
                    ok = False
                if ok and self.prune_weakrc:
                    for q, wq, qmask in self.assigned_reads:
                        if enc.reach[wq] & enc.coreach[q] & qmask:
                            ok = False
                            break
                if ok and self.prune_relaxed:
                    adj = self.forced.setdefault(rev.var, {})
                    for a, b in self._forced_new_pairs(rev.id, wid):
                        successors = adj.setdefault(a, set())
                        if b not in successors:  # an edge may be re-forced later
                            successors.add(b)
                            added.append((a, b))
                    if added and self._forced_cycle(rev.var):
                        ok = False
                if ok and descend(depth + 1):
                    return True
                # undo
                if added:
                    adj = self.forced[rev.var]
                    for a, b in added:
                        adj[a].discard(b)
                self.assigned_reads.pop()
                del self.assignment[r]
                enc.reach = reach_snap
                enc.coreach = coreach_snap
                # snapshots restored by rebinding; keep local names fresh
            return False

        descend(0)
        return (witness[0] if witness else None), found


def _first_mo(
    g: PartialExecutionGraph,
    enc: _Encoding,
    rf: ReadsFrom,
    model: MemoryModel,
    limits: OracleLimits,
) -> ModificationOrder | None:
    """First modification order satisfying the model's mo axioms for a
    fixed rf, in lexicographic permutation order; None when none exists."""
    readers: dict[EventId, list[EventId]] = {}
    for rid, wid in rf.mapping.items():
        readers.setdefault(wid, []).append(rid)
    budget = [0]

    def spend() -> None:
        budget[0] += 1
        if budget[0] > limits.max_mo_permutations:
            raise BudgetExceeded("max_mo_permutations", limits.max_mo_permutations)

    def hb(a: EventId, b: EventId) -> bool:
        return bool(enc.reach[enc.index[a]] & (1 << enc.index[b]))

    variables = sorted(g.writes_by_var)

    if model in (MemoryModel.RELAXED, MemoryModel.RELAXED_ACYCLIC, MemoryModel.RA):
        relaxed = model is not MemoryModel.RA

        def pair_bad(w1: EventId, w2: EventId) -> bool:
            # placing w1 anywhere before w2 violates an axiom
            if relaxed:
                if w2.thread == w1.thread and w2.index < w1.index:
                    return True
                for r in readers.get(w1, ()):
                    if w2.thread == r.thread and w2.index < r.index:
                        return True
                    for r2 in readers.get(w2, ()):
                        if r2.thread == r.thread and r2.index < r.index:
                            return True
                return False
            if hb(w2, w1):
                return True
            return any(hb(w2, r) for r in readers.get(w1, ()))

        per_var: dict[str, list[EventId]] = {}
        for var in variables:
            writes = [w.id for w in g.writes_by_var[var]]
            bad = {
                (a, b): pair_bad(a, b) for a in writes for b in writes if a != b
            }
            chosen: list[EventId] | None = None

            def extend(prefix: list[EventId], remaining: list[EventId]) -> list[EventId] | None:
                if not remaining:
                    return prefix
                for i, w in enumerate(remaining):
                    spend()
                    if any(bad[(p, w)] for p in prefix):
                        continue
                    result = extend(prefix + [w], remaining[:i] + remaining[i + 1 :])
                    if result is not None:
                        return result
                return None

            chosen = extend([], writes)
            if chosen is None:
                return None
            per_var[var] = chosen
        return ModificationOrder(per_var)

    # SRA: strong-write-coherence couples locations; search jointly with an
    # incremental cycle check over po ∪ rf ∪ mo edges.
    extra: dict[EventId, list[EventId]] = {}

    def reaches(a: EventId, b: EventId) -> bool:
        if hb(a, b):
            return True
        seen = {a}
        stack = [a]
        while stack:
            node = stack.pop()
            for nxt in extra.get(node, ()):
                if nxt == b or hb(nxt, b):
                    return True
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
            i = enc.index[node]
            for j in _bits(enc.reach[i]):
                tgt = enc.events[j].id
                if tgt in extra and tgt not in seen:
                    seen.add(tgt)
                    stack.append(tgt)
        return False

    def rc_bad(w1: EventId, w2: EventId) -> bool:
        return any(hb(w2, r) for r in readers.get(w1, ()))

    per_var_sra: dict[str, list[EventId]] = {}

    def place(var_idx: int) -> bool:
        if var_idx == len(variables):
            return True
        var = variables[var_idx]
        writes = [w.id for w in g.writes_by_var[var]]

        def extend(prefix: list[EventId], remaining: list[EventId]) -> bool:
            if not remaining:
                per_var_sra[var] = list(prefix)
                if place(var_idx + 1):
                    return True
                del per_var_sra[var]
                return False
            for i, w in enumerate(remaining):
                spend()
                if prefix:
                    prev = prefix[-1]
                    if any(rc_bad(p, w) for p in prefix):
                        continue
                    if reaches(w, prev):
                        continue
                    extra.setdefault(prev, []).append(w)
                else:
                    prev = None
                if extend(prefix + [w], remaining[:i] + remaining[i + 1 :]):
                    return True
                if prev is not None:
                    extra[prev].pop()
            return False

        return extend([], writes)

    if place(0):
        return ModificationOrder(per_var_sra)
    return None


def _unmatched_read(g: PartialExecutionGraph) -> EventId | None:
    for r, matches in _read_candidates(g):
        if not matches:
            return r.id
    return None


def oracle_consistent(
    g: PartialExecutionGraph,
    m: MemoryModel,
    limits: OracleLimits = DEFAULT_LIMITS,
) -> Verdict:
    """Decide consistency by exhaustive search over (rf, mo) witnesses.

    Consistent verdicts carry the first witness found under the search
    order documented above.  Models whose axioms ignore mo skip the mo
    search.  Inconsistent-by-exhaustion verdicts carry no certificate
    except for a read with no matching write anywhere, which is reported
    directly.
    """
    _check_events(g, limits)
    blocked = _unmatched_read(g)
    if blocked is not None:
        return Verdict.inconsistent(RF_TOTALITY, [(blocked, RF_INV_EDGE)])
    witness, _ = _Search(g, m, limits).run(stop_at_first=True)
    if witness is None:
        return Verdict.inconsistent(EXHAUSTED, None)
    rf, mo = witness
    return Verdict.consistent(rf, mo)


def all_consistent_rfs(
    g: PartialExecutionGraph,
    m: MemoryModel,
    limits: OracleLimits = DEFAULT_LIMITS,
) -> list[ReadsFrom]:
    """Every rf for which some mo satisfies the model, canonically sorted."""
    _check_events(g, limits)
    if _unmatched_read(g) is not None:
        return []
    _, found = _Search(g, m, limits).run(stop_at_first=False)
    return sorted(found, key=lambda rf: tuple(sorted(rf.mapping.items())))
