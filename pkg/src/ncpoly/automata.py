"""Deterministic substitution automata and matrix substitutions.

A substitution automaton reads words over an input alphabet and emits, per
transition, a scalar times a short word over an output alphabet; undefined
(state, letter) pairs are dead and never materialized, which is how whole
monomials get killed.  Compiling the automaton yields one sparse matrix per
input variable: rows and columns are states (start first, accept last,
interior in breadth-first order) and the (i, j) entry is the output of the
transition i --x--> j.  Evaluating a polynomial on those matrices and
reading the (start, accept) entry realizes automaton-filtered substitution,
and with the transition matrices of a branching program re-attached to
their variables it computes Hadamard products.
"""

from .abp import Abp, transition_matrices
from .algebra import (
    NCPoly,
    PolyMatrix,
    TableMismatchError,
    VarTable,
    Word,
    mat_add,
    mat_mul,
)

MAX_ENTRY_DEGREE = 3


class NondeterminismError(ValueError):
    """Two transitions share the same (state, input variable)."""


class SubstAutomaton:
    """Layered deterministic finite substitution automaton."""

    def __init__(self, input_table: VarTable, output_table: VarTable):
        self.input_table = input_table
        self.output_table = output_table
        self.states: list[str] = []
        self._state_set: set[str] = set()
        self.start: str | None = None
        self.accept: str | None = None
        self.transitions: dict = {}  # (state, var id) -> (state, coeff, word)

    def add_state(self, name: str, start: bool = False, accept: bool = False) -> str:
        if name not in self._state_set:
            self.states.append(name)
            self._state_set.add(name)
        if start:
            if self.start is not None and self.start != name:
                raise ValueError("start state already designated")
            self.start = name
        if accept:
            if self.accept is not None and self.accept != name:
                raise ValueError("accept state already designated")
            self.accept = name
        return name

    def add_transition(self, frm: str, var: int, to: str, coeff=None, word: Word = ()) -> None:
        if coeff is None:
            coeff = self.input_table.field.one
        if coeff == 0:
            return  # a zero output is the same as a dead transition
        key = (frm, var)
        if key in self.transitions:
            raise NondeterminismError(
                f"state {frm!r} already has a transition on "
                f"{self.input_table.name(var)!r}"
            )
        self.add_state(frm)
        self.add_state(to)
        if len(word) > MAX_ENTRY_DEGREE:
            raise ValueError(f"output degree {len(word)} exceeds {MAX_ENTRY_DEGREE}")
        self.transitions[key] = (to, coeff, tuple(word))

    def run(self, word: Word):
        """Deterministic simulation: (accepted, coefficient, output word)."""
        state = self.start
        coeff = self.input_table.field.one
        out: list[int] = []
        for v in word:
            hop = self.transitions.get((state, v))
            if hop is None:
                return False, self.input_table.field.zero, ()
            state, c, emitted = hop
            coeff = coeff * c
            out.extend(emitted)
        if state != self.accept:
            return False, self.input_table.field.zero, ()
        return True, coeff, tuple(out)

    def layer_map(self) -> dict | None:
        """Distance from the start when every transition advances exactly one
        layer; None when the automaton is not layered."""
        if self.start is None:
            return None
        adjacency: dict[str, list] = {}
        for (frm, _var), (to, _c, _w) in self.transitions.items():
            adjacency.setdefault(frm, []).append(to)
        layers = {self.start: 0}
        queue = [self.start]
        while queue:
            s = queue.pop(0)
            for to in adjacency.get(s, ()):
                nxt = layers[s] + 1
                if to not in layers:
                    layers[to] = nxt
                    queue.append(to)
                elif layers[to] != nxt:
                    return None
        return layers

    @property
    def layered(self) -> bool:
        return self.layer_map() is not None

    def state_order(self) -> list[str]:
        """Start first, accept last, interior states in BFS order."""
        if self.start is None or self.accept is None:
            raise ValueError("automaton needs designated start and accept states")
        adjacency: dict[str, list] = {}
        for (frm, var), (to, _c, _w) in self.transitions.items():
            adjacency.setdefault(frm, []).append((var, to))
        order = [self.start]
        seen = {self.start}
        queue = [self.start]
        while queue:
            s = queue.pop(0)
            for _var, to in sorted(adjacency.get(s, [])):
                if to not in seen:
                    seen.add(to)
                    order.append(to)
                    queue.append(to)
        for s in self.states:  # keep declared but unreachable states addressable
            if s not in seen:
                order.append(s)
                seen.add(s)
        order.remove(self.accept)
        order.append(self.accept)
        return order


class MatrixSubstitution:
    """One sparse q x q matrix per input variable; extraction at (1, q)."""

    def __init__(self, input_table: VarTable, output_table: VarTable, dim: int, entries: dict):
        self.input_table = input_table
        self.output_table = output_table
        self.dim = dim
        self.entries = {}
        for vid, cells in entries.items():
            clean = {}
            for (r, c), (coeff, word) in cells.items():
                if not (0 <= r < dim and 0 <= c < dim):
                    raise ValueError(f"entry ({r},{c}) outside a {dim}x{dim} matrix")
                if len(word) > MAX_ENTRY_DEGREE:
                    raise ValueError(
                        f"entry degree {len(word)} exceeds {MAX_ENTRY_DEGREE}"
                    )
                if coeff != 0:
                    clean[(r, c)] = (coeff, tuple(word))
            self.entries[vid] = clean
        self._rows_cache: dict = {}

    def rows(self, vid: int) -> dict:
        """Row-indexed adjacency for fast sparse products."""
        if vid not in self._rows_cache:
            adj: dict[int, list] = {}
            for (r, c), (coeff, word) in self.entries.get(vid, {}).items():
                adj.setdefault(r, []).append((c, coeff, word))
            for lst in adj.values():
                lst.sort()
            self._rows_cache[vid] = adj
        return self._rows_cache[vid]

    def entry(self, vid: int, r: int, c: int):
        return self.entries.get(vid, {}).get((r, c))

    def with_entry(self, vid: int, r: int, c: int, coeff, word: Word = ()) -> "MatrixSubstitution":
        """Copy with one cell replaced; used by negative controls."""
        entries = {v: dict(cells) for v, cells in self.entries.items()}
        entries.setdefault(vid, {})[(r, c)] = (coeff, tuple(word))
        return MatrixSubstitution(self.input_table, self.output_table, self.dim, entries)

    def poly_matrix(self, vid: int) -> PolyMatrix:
        """Materialize one variable's matrix with polynomial entries."""
        m = PolyMatrix.zeros(self.output_table, self.dim)
        for (r, c), (coeff, word) in self.entries.get(vid, {}).items():
            m.entries[r][c] = NCPoly.monomial(self.output_table, word, coeff)
        return m


def automaton_to_substitution(a: SubstAutomaton) -> MatrixSubstitution:
    order = a.state_order()
    index = {s: i for i, s in enumerate(order)}
    entries: dict[int, dict] = {}
    for (frm, var), (to, coeff, word) in a.transitions.items():
        entries.setdefault(var, {})[(index[frm], index[to])] = (coeff, word)
    return MatrixSubstitution(a.input_table, a.output_table, len(order), entries)


def filter_by_automaton(f: NCPoly, a: SubstAutomaton) -> NCPoly:
    """Restrict f to the words the automaton accepts.

    Requires identity outputs: every transition must emit exactly the
    variable it reads, with coefficient one.
    """
    if f.table != a.input_table:
        raise TableMismatchError("polynomial and automaton alphabets differ")
    for (_frm, var), (_to, coeff, word) in a.transitions.items():
        if word != (var,) or coeff != 1:
            raise ValueError("filtering needs identity outputs on every transition")
    out = NCPoly.zero(f.table)
    for w, c in f.terms.items():
        accepted, _coeff, _word = a.run(w)
        if accepted:
            out.terms[w] = c
    return out


# ---------------------------------------------------------------------------
# Hadamard product through transition matrices


def _reattached_matrices(g: Abp) -> dict:
    """Per variable x, the transition matrix with x written back into each cell."""
    mats = transition_matrices(g)
    out = {}
    for vid, rows in mats.items():
        cells = {}
        for i, row in enumerate(rows):
            for j, c in enumerate(row):
                if c != 0:
                    cells[(i, j)] = (c, (vid,))
        out[vid] = cells
    return out


def hadamard_via_matrices(f, g: Abp) -> NCPoly:
    """Coefficientwise product of f (circuit or polynomial) with abp_eval(g).

    Every variable of f is evaluated at the corresponding transition matrix
    of g with the variable re-attached; the (source, sink) entry of the
    result is the Hadamard product.  g must be homogeneous.
    """
    from .circuits import Add, Circuit, Const, Input

    if not g.is_homogeneous():
        raise ValueError("the branching program must have homogeneous edge labels")
    table = f.table
    if table != g.table:
        raise TableMismatchError("circuit and branching program tables differ")
    q = g.size
    sub = MatrixSubstitution(table, table, q, _reattached_matrices(g))

    if isinstance(f, Circuit):
        mats: dict[int, PolyMatrix] = {}
        for gid in f.reachable():
            gate = f.gates[gid]
            if isinstance(gate, Input):
                mats[gid] = sub.poly_matrix(gate.var)
            elif isinstance(gate, Const):
                ident = PolyMatrix.identity(table, q)
                mats[gid] = PolyMatrix(
                    table, [[e.scale(gate.value) for e in row] for row in ident.entries]
                )
            elif isinstance(gate, Add):
                mats[gid] = mat_add(mats[gate.left], mats[gate.right])
            else:
                mats[gid] = mat_mul(mats[gate.left], mats[gate.right])
        return mats[f.output][0, q - 1]

    out = NCPoly.zero(table)
    for w, coeff in f.terms.items():
        vec = {0: NCPoly.const(table, coeff)}
        for vid in w:
            rows = sub.rows(vid)
            nxt: dict[int, NCPoly] = {}
            for r, poly in vec.items():
                for c, cf, word in rows.get(r, ()):  # entries are coeff * variable
                    piece = poly * NCPoly.monomial(table, word, cf)
                    nxt[c] = nxt.get(c, NCPoly.zero(table)) + piece
            vec = nxt
            if not vec:
                break
        if q - 1 in vec:
            out = out + vec[q - 1]
    return out


# ---------------------------------------------------------------------------
# Interchange formats


def format_automaton(a: SubstAutomaton) -> str:
    fmt = a.input_table.field.format
    lines = [
        "automaton",
        "input-vars " + " ".join(a.input_table.names),
        "output-vars " + " ".join(a.output_table.names),
    ]
    for s in a.states:
        marker = ""
        if s == a.start:
            marker = " start"
        if s == a.accept:
            marker += " accept"
        lines.append(f"state {s}{marker}")
    for (frm, var), (to, coeff, word) in sorted(
        a.transitions.items(), key=lambda kv: (kv[0][0], kv[0][1])
    ):
        rhs = fmt(coeff)
        if word:
            rhs += " " + " ".join(a.output_table.name(v) for v in word)
        lines.append(f"trans {frm} {a.input_table.name(var)} -> {to} | {rhs}")
    return "\n".join(lines) + "\n"


def parse_automaton(text: str, input_table: VarTable, output_table: VarTable) -> SubstAutomaton:
    a = SubstAutomaton(input_table, output_table)
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or line == "automaton":
            continue
        tokens = line.split()
        if tokens[0] == "input-vars":
            for name in tokens[1:]:
                input_table.get_or_add(name)
        elif tokens[0] == "output-vars":
            for name in tokens[1:]:
                output_table.get_or_add(name)
        elif tokens[0] == "state":
            a.add_state(tokens[1], start="start" in tokens[2:], accept="accept" in tokens[2:])
        elif tokens[0] == "trans":
            frm, varname, arrow, to, bar = tokens[1:6]
            if arrow != "->" or bar != "|":
                raise ValueError(f"bad transition line {line!r}")
            coeff = input_table.field.parse(tokens[6])
            word = tuple(output_table.get_or_add(n).id for n in tokens[7:])
            a.add_transition(frm, input_table.get_or_add(varname).id, to, coeff, word)
        else:
            raise ValueError(f"bad automaton line {line!r}")
    return a


def format_substitution(sub: MatrixSubstitution) -> str:
    fmt = sub.input_table.field.format
    lines = [
        "substitution",
        f"dim {sub.dim}",
        "input-vars " + " ".join(sub.input_table.names),
        "output-vars " + " ".join(sub.output_table.names),
    ]
    for vid in sorted(sub.entries):
        cells = sub.entries[vid]
        if not cells:
            continue
        lines.append(f"var {sub.input_table.name(vid)}")
        for (r, c) in sorted(cells):
            coeff, word = cells[(r, c)]
            rhs = fmt(coeff)
            if word:
                rhs += " " + " ".join(sub.output_table.name(v) for v in word)
            lines.append(f"entry {r + 1} {c + 1} {rhs}")
    return "\n".join(lines) + "\n"


def parse_substitution(
    text: str, input_table: VarTable | None = None, output_table: VarTable | None = None
) -> MatrixSubstitution:
    from .fields import QQ

    if input_table is None:
        input_table = VarTable(field=QQ)
    if output_table is None:
        output_table = VarTable(field=input_table.field)
    dim = None
    entries: dict[int, dict] = {}
    current: int | None = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or line == "substitution":
            continue
        tokens = line.split()
        if tokens[0] == "dim":
            dim = int(tokens[1])
        elif tokens[0] == "input-vars":
            for name in tokens[1:]:
                input_table.get_or_add(name)
        elif tokens[0] == "output-vars":
            for name in tokens[1:]:
                output_table.get_or_add(name)
        elif tokens[0] == "var":
            current = input_table.get_or_add(tokens[1]).id
            entries.setdefault(current, {})
        elif tokens[0] == "entry":
            if current is None or dim is None:
                raise ValueError("entry line before var/dim")
            r, c = int(tokens[1]) - 1, int(tokens[2]) - 1
            coeff = input_table.field.parse(tokens[3])
            word = tuple(output_table.get_or_add(n).id for n in tokens[4:])
            entries[current][(r, c)] = (coeff, word)
        else:
            raise ValueError(f"bad substitution line {line!r}")
    if dim is None:
        raise ValueError("missing dim line")
    return MatrixSubstitution(input_table, output_table, dim, entries)
