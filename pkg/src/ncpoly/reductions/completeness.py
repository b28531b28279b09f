"""Grammar-walk reductions: circuits into balanced-word targets.

Both constructions follow the same scheme.  The bracketing transform gives
every monomial of the circuit a parse word; a fixed-length prefix padding
makes all parse words the same even length; a layered deterministic
automaton walks that word, entering subcircuits through addition closures,
and its matrices substitute the original variables and scalars back in.
Balance (or the mirror structure of palindromes) supplied by the target's
own support does the bracket matching that a finite automaton cannot.

Addition gates introduce no letters, so a monomial derivable through
several addition paths appears as a single word; the walk therefore
weights each closure step by its path count, which restores the
multiplicities exactly.  Correctness is not argued from the transition
table but enforced by the extraction-equals-expansion postcondition in
the test suite, for every corpus circuit.
"""

from collections import deque

from ..automata import SubstAutomaton, automaton_to_substitution
from ..circuits import (
    Add,
    Circuit,
    Const,
    Input,
    Mul,
    homogenize,
    is_skew,
    to_bracketed,
    to_skew_bracketed,
)
from ..families import gen_dyck, gen_pal
from .base import AbpReduction


def _add_closures(gates) -> list:
    """Per gate, the non-addition gates reachable by descending through
    additions, with the number of distinct descent paths."""
    memo: list[dict] = []
    for gid, g in enumerate(gates):
        if isinstance(g, Add):
            out: dict = {}
            for child in (g.left, g.right):
                for t, cnt in memo[child].items():
                    out[t] = out.get(t, 0) + cnt
            memo.append(out)
        else:
            memo.append({gid: 1})
    return memo


def _const_values(circuit: Circuit) -> list:
    """Per gate, the coefficient of the empty word in its polynomial."""
    zero = circuit.table.field.zero
    vals = []
    for g in circuit.gates:
        if isinstance(g, Input):
            vals.append(zero)
        elif isinstance(g, Const):
            vals.append(g.value)
        elif isinstance(g, Add):
            vals.append(vals[g.left] + vals[g.right])
        else:
            vals.append(vals[g.left] * vals[g.right])
    return vals


def dyck_completeness_reduction(c: Circuit, state_budget: int = 10**5) -> AbpReduction:
    """Reduce an arbitrary circuit to a balanced-word target.

    The target has one bracket pair per bracket type of the parsed circuit
    plus r+1 padding pairs, where 2r bounds the parse-word degree; words
    are padded to degree 2r+2.  The automaton reads the numbered padding,
    then walks the parse word: opening a product's bracket descends to its
    left argument, a leaf pair emits the variable (or the constant, on the
    placeholder pair), and a product's closing bracket resumes at its right
    argument.  Everything else is dead, and balance pins each closing to
    its product gate.
    """
    field = c.table.field
    br = to_bracketed(c)

    gate_pair: dict = {}
    var_pair: dict = {}
    const_bracket: dict = {}
    const_mid: dict = {}
    const_value: dict = {}
    for vid, info in br.provenance.items():
        if info.side != "open":
            continue
        if info.kind == "gate-bracket":
            gate_pair[info.origin] = (vid, info.mate)
        elif info.kind == "var-bracket":
            var_pair[info.origin] = (vid, info.mate)
        elif info.kind == "const-bracket":
            key = field.format(info.origin)
            const_bracket[key] = (vid, info.mate)
            const_value[key] = info.origin
        elif info.kind == "const-placeholder":
            const_mid[field.format(info.origin)] = (vid, info.mate)

    two_r = max(br.circuit.syntactic_degree(), 0)
    r = two_r // 2
    q = 2 * r + 2
    t = len(br.pairs) + r + 1
    target = gen_dyck(t, q, field)
    t_pairs = target.meta["pairs"]

    enc: dict = {}  # parse-word bracket id -> target bracket id
    for idx, (o, cl) in enumerate(br.pairs):
        to, tc = t_pairs[r + 1 + idx]
        enc[o] = to
        enc[cl] = tc

    closures = _add_closures(c.gates)
    a = SubstAutomaton(target.table, c.table)
    accept = f"L@{q}"
    a.add_state("P0@0", start=True)
    a.add_state(accept, accept=True)

    seen = set()
    queue: deque = deque()

    def push(kind, data, pos) -> str:
        name = f"{kind}{data if data is not None else ''}@{pos}"
        if (kind, data, pos) not in seen:
            seen.add((kind, data, pos))
            queue.append((kind, data, pos, name))
        return name

    # padding: numbered pairs in order, then pair 0 hands over to the walk
    for i in range(r):
        st = f"P{i}@{2 * i}" if i == 0 else push("P", i, 2 * i)
        if i + 1 <= r - 1:
            o, cl = t_pairs[i + 1]
            mid = push("Pi", i + 1, 2 * i + 1)
            a.add_transition(st, o, mid)
            a.add_transition(mid, cl, push("P", i + 1, 2 * i + 2))
        o0, c0 = t_pairs[0]
        mid0 = push("Pz", i, 2 * i + 1)
        a.add_transition(st, o0, mid0)
        a.add_transition(mid0, c0, push("E", c.output, 2 * i + 2))
    seen.add(("P", 0, 0))

    while queue:
        kind, data, pos, name = queue.popleft()
        if kind in ("P", "Pi", "Pz"):
            continue  # transitions were generated above
        if kind == "E":
            if pos + 1 > q:
                continue
            mul_edges: dict = {}
            var_edges: dict = {}
            const_edges: dict = {}
            for h, cnt in closures[data].items():
                g = c.gates[h]
                if isinstance(g, Mul):
                    mul_edges[h] = cnt
                elif isinstance(g, Input):
                    var_edges[g.var] = var_edges.get(g.var, 0) + cnt
                else:
                    key = field.format(g.value)
                    const_edges[key] = const_edges.get(key, 0) + cnt
            for h in sorted(mul_edges):
                o, _cl = gate_pair[h]
                a.add_transition(
                    name,
                    enc[o],
                    push("E", c.gates[h].left, pos + 1),
                    coeff=field.from_int(mul_edges[h]),
                )
            for varid in sorted(var_edges):
                o, _cl = var_pair[varid]
                a.add_transition(
                    name, enc[o], push("V", varid, pos + 1), coeff=field.from_int(var_edges[varid])
                )
            for key in sorted(const_edges):
                o, _cl = const_bracket[key]
                a.add_transition(
                    name, enc[o], push("C1", key, pos + 1), coeff=field.from_int(const_edges[key])
                )
        elif kind == "V":
            if pos + 1 > q:
                continue
            _o, cl = var_pair[data]
            a.add_transition(
                name, enc[cl], push("L", None, pos + 1), word=(data,)
            )
        elif kind == "C1":
            if pos + 1 > q:
                continue
            o, _cl = const_mid[data]
            a.add_transition(name, enc[o], push("C2", data, pos + 1))
        elif kind == "C2":
            if pos + 1 > q:
                continue
            _o, cl = const_mid[data]
            # the placeholder's closing carries the constant back in
            a.add_transition(name, enc[cl], push("C3", data, pos + 1), coeff=const_value[data])
        elif kind == "C3":
            if pos + 1 > q:
                continue
            _o, cl = const_bracket[data]
            a.add_transition(name, enc[cl], push("L", None, pos + 1))
        elif kind == "L":
            if pos + 1 > q:
                continue
            for h in sorted(gate_pair):
                _o, cl = gate_pair[h]
                a.add_transition(name, enc[cl], push("E", c.gates[h].right, pos + 1))
        if len(a.states) > state_budget:
            raise RuntimeError(f"state budget {state_budget} exceeded")

    sub = automaton_to_substitution(a)
    return AbpReduction(sub, "circuit", target.spec_string, kind="dyck-complete", automaton=a)


def pal_vsk_reduction(c: Circuit, state_budget: int = 10**5) -> AbpReduction:
    """Reduce a skew circuit to a palindrome target over a merged alphabet.

    After homogenizing and twin-wrapping, every parse word is an onion:
    twin letters around a central input double (or a twin whose inner
    argument has degree zero), so padding to half-length r+1 puts the
    center exactly at the middle.  One target letter stands for each twin
    pair, each input double and each padding pair; the palindrome support
    forces the second half to mirror the first, so the automaton walks the
    first half through the circuit and accepts the second half blindly.
    Left-multiplied variables and scalars are emitted on first-half edges,
    right-multiplied variables on second-half edges.
    """
    field = c.table.field
    witness = is_skew(c)
    if not witness.ok:
        raise ValueError(f"gate g{witness.gate} has two non-leaf children; circuit is not skew")
    h = homogenize(c)
    sb = to_skew_bracketed(h)

    two_r = max(sb.circuit.syntactic_degree(), 0)
    r = two_r // 2
    q = 2 * r + 2
    degs = h.degree_sets()
    closures = _add_closures(h.gates)
    # empty parse words come only from constants reached through additions;
    # constant products pass through a twin pair and are handled by the walk
    const_term = c.table.field.zero
    for member, cnt in closures[h.output].items():
        g = h.gates[member]
        if isinstance(g, Const):
            const_term = const_term + c.table.field.from_int(cnt) * g.value

    mul_ids = sorted(sb.twins)
    double_ids = sorted(sb.doubles)
    twin_letter = {gid: r + 1 + i for i, gid in enumerate(mul_ids)}
    double_letter = {vid: r + 1 + len(mul_ids) + i for i, vid in enumerate(double_ids)}
    k = r + 1 + len(mul_ids) + len(double_ids)
    target = gen_pal(r + 1, k, field)
    letters = target.meta["letters"]  # letter index == variable id

    val0 = _const_values(h)
    a = SubstAutomaton(target.table, c.table)
    accept = f"B@{q}"
    a.add_state("S0@0", start=True)
    a.add_state(accept, accept=True)

    def blind_entry(letter: int):
        for gid, lt in twin_letter.items():
            if lt == letter:
                tw = sb.twins[gid]
                if tw.payload_kind == "var" and tw.payload_side == "right":
                    return field.one, (tw.payload_var,)
                return field.one, ()
        return field.one, ()

    # padding chain; the all-padding word carries the constant term
    for i in range(r + 1):
        st = f"S{i}@{i}"
        if i < r:
            a.add_transition(st, letters[i + 1], f"S{i + 1}@{i + 1}")
            a.add_transition(st, letters[0], f"W{h.output}@{i + 1}")
        elif const_term != 0:
            a.add_transition(st, letters[0], f"M@{r + 1}", coeff=const_term)

    # gate walk over the first half
    seen = set()
    queue: deque = deque()

    def push(gid, pos) -> str:
        if (gid, pos) not in seen:
            seen.add((gid, pos))
            queue.append((gid, pos))
        return f"W{gid}@{pos}"

    for i in range(r):
        push(h.output, i + 1)

    while queue:
        gid, pos = queue.popleft()
        name = f"W{gid}@{pos}"
        if len(a.states) > state_budget:
            raise RuntimeError(f"state budget {state_budget} exceeded")
        if pos > r:
            continue
        center_vars: dict = {}  # letter -> (total coeff, payload word)
        for member, cnt in closures[gid].items():
            g = h.gates[member]
            if isinstance(g, Input):
                letter = letters[double_letter[g.var]]
                coeff, word = center_vars.get(letter, (field.zero, (g.var,)))
                center_vars[letter] = (coeff + field.from_int(cnt), (g.var,))
            elif isinstance(g, Mul):
                tw = sb.twins[member]
                letter = letters[twin_letter[member]]
                if tw.payload_kind == "const":
                    coeff = field.from_int(cnt) * tw.payload_value
                    word = ()
                elif tw.payload_side == "left":
                    coeff = field.from_int(cnt)
                    word = (tw.payload_var,)
                else:
                    coeff = field.from_int(cnt)
                    word = ()
                inner_degs = degs[tw.inner]
                inner_deg = max(inner_degs) if inner_degs else None
                if inner_deg == 0:
                    if pos == r:
                        a.add_transition(
                            name, letter, f"M@{r + 1}", coeff=coeff * val0[tw.inner], word=word
                        )
                elif inner_deg is not None and pos + 1 <= r:
                    a.add_transition(name, letter, push(tw.inner, pos + 1), coeff=coeff, word=word)
            # bare constants contribute only the empty parse word, which the
            # all-padding path already accounts for
        if pos == r:
            for letter, (coeff, word) in sorted(center_vars.items()):
                a.add_transition(name, letter, f"M@{r + 1}", coeff=coeff, word=word)

    # blind second half: the palindrome support forces the mirror letters
    for pos in range(r + 1, q):
        frm = f"M@{r + 1}" if pos == r + 1 else f"B@{pos}"
        to = f"B@{pos + 1}"
        for letter in letters:
            coeff, word = blind_entry(letter)
            a.add_transition(frm, letter, to, coeff=coeff, word=word)

    sub = automaton_to_substitution(a)
    return AbpReduction(sub, "circuit", target.spec_string, kind="pal-vsk", automaton=a)
