"""Bit-exact text formats: execution traces, DIMACS CNF, edge lists.

The trace grammar is line oriented.  '#' starts a comment, blank lines
are skipped::

    thread <tid>                         opens a thread block
    w <var> <int>                        write appended to current thread
    r <var> <int>                        read appended to current thread
    rf <tid>:<idx> <tid>:<idx>           writer -> reader annotation
    mo <var> <tid>:<idx> [<tid>:<idx>]*  full write order for one location

rf/mo lines must follow all thread blocks.  Serialization is canonical:
threads in first-appearance order, rf lines sorted by reader, mo lines
sorted by location; parse and serialize are mutually inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    INT64_MAX,
    INT64_MIN,
    READ,
    WRITE,
    EventId,
    ModificationOrder,
    PartialExecutionGraph,
    ReadsFrom,
    build_graph,
)
from .reductions import CnfFormula, Literal, NotThreeCnf, SelfLoop, UndirectedGraph


class ParseError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.reason = message


@dataclass
class TraceDocument:
    graph: PartialExecutionGraph
    rf: ReadsFrom | None = None
    mo: ModificationOrder | None = None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TraceDocument):
            return NotImplemented
        return self.graph == other.graph and self.rf == other.rf and self.mo == other.mo


def _strip(raw: str) -> str:
    return raw.split("#", 1)[0].strip()


def _parse_int(token: str, lineno: int) -> int:
    try:
        val = int(token, 10)
    except ValueError:
        raise ParseError(lineno, f"malformed integer {token!r}") from None
    if not INT64_MIN <= val <= INT64_MAX:
        raise ParseError(lineno, f"value {val} outside 64-bit signed range")
    return val


def _parse_event_id(token: str, lineno: int) -> EventId:
    thread, sep, idx = token.rpartition(":")
    if not sep or not thread:
        raise ParseError(lineno, f"malformed event id {token!r}")
    return EventId(thread, _parse_int(idx, lineno))


def parse_trace(text: str) -> TraceDocument:
    threads: list[tuple[str, list[tuple[str, str, int]]]] = []
    seen_threads: set[str] = set()
    rf_lines: list[tuple[int, EventId, EventId]] = []
    mo_lines: list[tuple[int, str, list[EventId]]] = []
    current: list[tuple[str, str, int]] | None = None
    annotations_started = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]
        if keyword == "thread":
            if annotations_started:
                raise ParseError(lineno, "thread block after rf/mo annotations")
            if len(tokens) != 2:
                raise ParseError(lineno, "expected: thread <tid>")
            tid = tokens[1]
            if tid in seen_threads:
                raise ParseError(lineno, f"duplicate thread id {tid!r}")
            seen_threads.add(tid)
            current = []
            threads.append((tid, current))
        elif keyword in (READ, WRITE):
            if annotations_started:
                raise ParseError(lineno, "event after rf/mo annotations")
            if current is None:
                raise ParseError(lineno, "event outside a thread block")
            if len(tokens) != 3:
                raise ParseError(lineno, f"expected: {keyword} <var> <int>")
            current.append((keyword, tokens[1], _parse_int(tokens[2], lineno)))
        elif keyword == "rf":
            if len(tokens) != 3:
                raise ParseError(lineno, "expected: rf <writer> <reader>")
            annotations_started = True
            rf_lines.append(
                (lineno, _parse_event_id(tokens[1], lineno), _parse_event_id(tokens[2], lineno))
            )
        elif keyword == "mo":
            if len(tokens) < 3:
                raise ParseError(lineno, "expected: mo <var> <write>+")
            annotations_started = True
            mo_lines.append(
                (lineno, tokens[1], [_parse_event_id(t, lineno) for t in tokens[2:]])
            )
        else:
            raise ParseError(lineno, f"unknown directive {keyword!r}")

    try:
        graph = build_graph(threads)
    except Exception as exc:  # identifier/value validation
        raise ParseError(0, str(exc)) from None

    rf = None
    if rf_lines:
        mapping: dict[EventId, EventId] = {}
        for lineno, wid, rid in rf_lines:
            for eid in (wid, rid):
                if not graph.has_event(eid):
                    raise ParseError(lineno, f"unknown event {eid}")
            w, r = graph.event(wid), graph.event(rid)
            if not w.is_write:
                raise ParseError(lineno, f"rf source {wid} is not a write")
            if not r.is_read:
                raise ParseError(lineno, f"rf target {rid} is not a read")
            if w.var != r.var or w.val != r.val:
                raise ParseError(lineno, f"rf edge {wid} -> {rid} mismatches location or value")
            if rid in mapping:
                raise ParseError(lineno, f"read {rid} has two writers")
            mapping[rid] = wid
        rf = ReadsFrom(mapping)

    mo = None
    if mo_lines:
        per_var: dict[str, list[EventId]] = {}
        for lineno, var, order in mo_lines:
            if var in per_var:
                raise ParseError(lineno, f"duplicate mo line for {var!r}")
            writes = {w.id for w in graph.writes_by_var.get(var, [])}
            for eid in order:
                if not graph.has_event(eid):
                    raise ParseError(lineno, f"unknown event {eid}")
                if eid not in writes:
                    raise ParseError(lineno, f"{eid} is not a write to {var!r}")
            if len(set(order)) != len(order):
                raise ParseError(lineno, f"mo for {var!r} lists a write twice")
            if set(order) != writes:
                raise ParseError(lineno, f"mo for {var!r} omits a write")
            per_var[var] = order
        mo = ModificationOrder(per_var)

    return TraceDocument(graph, rf, mo)


def serialize_trace(doc: TraceDocument) -> str:
    lines: list[str] = []
    g = doc.graph
    for tid in g.thread_ids:
        lines.append(f"thread {tid}")
        for ev in g.events_of[tid]:
            lines.append(f"{ev.op} {ev.var} {ev.val}")
    if doc.rf is not None:
        for rid, wid in sorted(doc.rf.mapping.items()):
            lines.append(f"rf {wid} {rid}")
    if doc.mo is not None:
        for var in sorted(doc.mo.per_var):
            order = " ".join(str(w) for w in doc.mo.per_var[var])
            lines.append(f"mo {var} {order}")
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DIMACS CNF
# ---------------------------------------------------------------------------


def parse_dimacs(text: str) -> CnfFormula:
    """Standard DIMACS CNF restricted to width-3 clauses."""
    header: tuple[int, int] | None = None
    literals: list[tuple[int, int]] = []  # (lineno, literal)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise ParseError(lineno, "duplicate header")
            tokens = line.split()
            if len(tokens) != 4 or tokens[1] != "cnf":
                raise ParseError(lineno, "expected: p cnf <vars> <clauses>")
            header = (_parse_int(tokens[2], lineno), _parse_int(tokens[3], lineno))
            continue
        if header is None:
            raise ParseError(lineno, "clause before header")
        for token in line.split():
            literals.append((lineno, _parse_int(token, lineno)))

    if header is None:
        raise ParseError(0, "missing header")
    num_vars, num_clauses = header

    clauses: list[tuple] = []
    pending: list[Literal] = []
    last_line = 0
    for lineno, lit in literals:
        last_line = lineno
        if lit == 0:
            if len(pending) != 3:
                raise NotThreeCnf(f"clause ending at line {lineno} has {len(pending)} literals")
            clauses.append(tuple(pending))
            pending = []
            continue
        var = abs(lit)
        if var > num_vars:
            raise ParseError(lineno, f"literal {lit} exceeds declared variable count")
        pending.append((var, lit > 0))
    if pending:
        raise ParseError(last_line, "unterminated clause")
    if len(clauses) != num_clauses:
        raise ParseError(last_line, f"header declares {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, tuple(clauses))


def serialize_dimacs(formula: CnfFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    for clause in formula.clauses:
        lits = " ".join(str(var if pol else -var) for var, pol in clause)
        lines.append(f"{lits} 0")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Edge lists
# ---------------------------------------------------------------------------


def parse_edgelist(text: str) -> UndirectedGraph:
    """First meaningful line is the vertex count, then one 'u v' per line."""
    num_vertices: int | None = None
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        tokens = line.split()
        if num_vertices is None:
            if len(tokens) != 1:
                raise ParseError(lineno, "expected a vertex count")
            num_vertices = _parse_int(tokens[0], lineno)
            if num_vertices < 0:
                raise ParseError(lineno, "negative vertex count")
            continue
        if len(tokens) != 2:
            raise ParseError(lineno, "expected: <u> <v>")
        u, v = _parse_int(tokens[0], lineno), _parse_int(tokens[1], lineno)
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u} (line {lineno})")
        if not (1 <= u <= num_vertices and 1 <= v <= num_vertices):
            raise ParseError(lineno, f"edge ({u},{v}) out of range")
        pairs.append((u, v))
    if num_vertices is None:
        raise ParseError(0, "empty edge list input")
    return UndirectedGraph.from_edges(num_vertices, pairs)


def serialize_edgelist(graph: UndirectedGraph) -> str:
    lines = [str(graph.num_vertices)]
    lines += [f"{u} {v}" for u, v in sorted(graph.edges)]
    return "\n".join(lines) + "\n"
