"""Positional substitution reductions between bracket-structured families.

These constructions share one shape: a layered automaton walks the target
word position by position, kills everything outside the wanted sublanguage
through dead cells, and rewrites the survivors letterwise.  Balance of the
target support does the matching work, so the automata only need counters
and block decoding, never a stack.
"""

from ..abp import Abp
from ..algebra import Word
from ..automata import SubstAutomaton, automaton_to_substitution
from ..families import (
    FamilyInstance,
    gen_dyck,
    gen_dyck_depth,
    gen_pal,
    gen_pal_sq,
    gen_product_of_sums,
    gen_two_chains,
)
from ..fields import QQ, Field
from .base import AbpReduction


def pal_to_d2_reduction(n: int, field: Field = QQ) -> AbpReduction:
    """Palindromes from balanced words: openers in the first half become
    letters by bracket type, closers in the second half likewise, and any
    other placement is dead.  Balance forces the mirror structure."""
    target = gen_dyck(2, 2 * n, field)
    source = gen_pal(n, 2, field)
    (o1, c1), (o2, c2) = target.meta["pairs"]
    x0, x1 = source.table.var("x0").id, source.table.var("x1").id
    a = SubstAutomaton(target.table, source.table)
    a.add_state("p0", start=True)
    a.add_state(f"p{2 * n}", accept=True)
    for i in range(2 * n):
        if i < n:
            a.add_transition(f"p{i}", o1, f"p{i + 1}", word=(x0,))
            a.add_transition(f"p{i}", o2, f"p{i + 1}", word=(x1,))
        else:
            a.add_transition(f"p{i}", c1, f"p{i + 1}", word=(x0,))
            a.add_transition(f"p{i}", c2, f"p{i + 1}", word=(x1,))
    sub = automaton_to_substitution(a)
    return AbpReduction(sub, source.spec_string, target.spec_string, kind="pal-d2", automaton=a)


def palsq_to_d2_reduction(n: int, field: Field = QQ) -> AbpReduction:
    """The palindrome-square analogue: the position pattern repeats twice.

    Within each half of the target word the closers must match the openers
    of the same half (the stack at the boundary is empty), so the survivors
    are exactly the products of two palindrome encodings."""
    target = gen_dyck(2, 4 * n, field)
    source = gen_pal_sq(n, field)
    (o1, c1), (o2, c2) = target.meta["pairs"]
    x0, x1 = source.table.var("x0").id, source.table.var("x1").id
    a = SubstAutomaton(target.table, source.table)
    a.add_state("p0", start=True)
    a.add_state(f"p{4 * n}", accept=True)
    for i in range(4 * n):
        opening = (i % (2 * n)) < n
        if opening:
            a.add_transition(f"p{i}", o1, f"p{i + 1}", word=(x0,))
            a.add_transition(f"p{i}", o2, f"p{i + 1}", word=(x1,))
        else:
            a.add_transition(f"p{i}", c1, f"p{i + 1}", word=(x0,))
            a.add_transition(f"p{i}", c2, f"p{i + 1}", word=(x1,))
    sub = automaton_to_substitution(a)
    return AbpReduction(sub, source.spec_string, target.spec_string, kind="palsq-d2", automaton=a)


def dk_encode_word(word: Word, k: int, source_pairs, target_pairs) -> Word:
    """Fixed-width encoding of k bracket types into two.

    Type i opens as (, i copies of [, then k-i more ( and closes with the
    mirror image, so every letter becomes a block of k+1 letters, type
    mismatches break balance, and block boundaries sit at fixed positions.
    """
    (o1, c1), (o2, c2) = target_pairs
    open_code = {}
    close_code = {}
    for i, (o, c) in enumerate(source_pairs, start=1):
        open_code[o] = (o1,) + (o2,) * i + (o1,) * (k - i)
        close_code[c] = (c1,) * (k - i) + (c2,) * i + (c1,)
    out: list[int] = []
    for v in word:
        out.extend(open_code.get(v) or close_code[v])
    return tuple(out)


def dk_to_d2_reduction(k: int, d: int, field: Field = QQ) -> AbpReduction:
    """Decode fixed-width two-type blocks back into k bracket types.

    The automaton reads the target word in blocks of k+1 letters, pattern
    matches each block, and emits the decoded bracket on the block's last
    letter; non-image words are dead.  Balance of the encoded word forces
    balance (with types) of the decoded word.
    """
    if k < 2:
        raise ValueError("need at least two source bracket types")
    width = k + 1
    target = gen_dyck(2, d * width, field)
    source = gen_dyck(k, d, field)
    (o1, c1), (o2, c2) = target.meta["pairs"]
    src_pairs = source.meta["pairs"]
    a = SubstAutomaton(target.table, source.table)
    a.add_state("b0", start=True)
    a.add_state(f"b{d}", accept=True)

    patterns = []
    for i, (o_src, c_src) in enumerate(src_pairs, start=1):
        patterns.append(((o1,) + (o2,) * i + (o1,) * (k - i), o_src))
        patterns.append(((c1,) * (k - i) + (c2,) * i + (c1,), c_src))

    def add_once(frm, letter, to, word):
        existing = a.transitions.get((frm, letter))
        if existing is None:
            a.add_transition(frm, letter, to, word=word)
        elif existing != (to, a.input_table.field.one, word):
            raise AssertionError("block patterns are not prefix-deterministic")

    for b in range(d):
        # patterns with a common prefix share trie states inside the block
        for path, emit in patterns:
            prev = f"b{b}"
            for off, letter in enumerate(path):
                if off == width - 1:
                    add_once(prev, letter, f"b{b + 1}", (emit,))
                else:
                    state = f"b{b}|" + ".".join(map(str, path[: off + 1]))
                    add_once(prev, letter, state, ())
                    prev = state
    sub = automaton_to_substitution(a)
    return AbpReduction(sub, source.spec_string, target.spec_string, kind="dk-d2", automaton=a)


def dyck_depth_reduction(k1: int, k2: int, n: int, field: Field = QQ) -> AbpReduction:
    """Keep only the balanced words whose bracket excess never exceeds k1.

    States are (position, excess); opening past the bound is dead, outputs
    are the identity, so applying this to the depth-k2 family yields the
    depth-k1 family.
    """
    if not 1 <= k1 <= k2 <= n:
        raise ValueError("need 1 <= k1 <= k2 <= n")
    target = gen_dyck_depth(k2, n, field)
    source = gen_dyck_depth(k1, n, field)
    pairs = source.meta["pairs"]
    a = SubstAutomaton(target.table, source.table)
    a.add_state("e0.0", start=True)
    a.add_state(f"e{2 * n}.0", accept=True)
    for pos in range(2 * n):
        # reachable excesses share the position's parity and fit the bound
        for excess in range(pos % 2, min(k1, pos, 2 * n - pos) + 1, 2):
            state = f"e{pos}.{excess}"
            for o, c in pairs:
                if excess + 1 <= min(k1, 2 * n - pos - 1):
                    a.add_transition(state, o, f"e{pos + 1}.{excess + 1}", word=(o,))
                if excess > 0:
                    a.add_transition(state, c, f"e{pos + 1}.{excess - 1}", word=(c,))
    sub = automaton_to_substitution(a)
    return AbpReduction(
        sub, source.spec_string, target.spec_string, kind="dyck-depth", automaton=a
    )


def two_chains_reduction(n: int, field: Field = QQ) -> AbpReduction:
    """Select the two chain monomials x1..xn and y1..yn out of the product
    of the sums (x_i + y_i): the automaton commits to one chain at the
    first letter, every mixed word hits a dead cell."""
    target = gen_product_of_sums(n, field)
    source = gen_two_chains(n, field)
    a = SubstAutomaton(target.table, source.table)
    a.add_state("s", start=True)
    a.add_state("t", accept=True)
    for prefix in ("x", "y"):
        prev = "s"
        for i in range(1, n + 1):
            vid = target.table.var(f"{prefix}{i}").id
            out = source.table.var(f"{prefix}{i}").id
            state = "t" if i == n else f"{prefix}{i}"
            a.add_transition(prev, vid, state, word=(out,))
            prev = state
    sub = automaton_to_substitution(a)
    return AbpReduction(
        sub, source.spec_string, target.spec_string, kind="two-chains", automaton=a
    )


def vbp_trivial_reduction(
    f_abp: Abp, target: FamilyInstance, witness: Word
) -> AbpReduction:
    """Carry a branching program along a single coefficient-one target word.

    The program's layer gaps are split into one group per witness letter;
    each letter's matrix holds that group's path monomials at the global
    vertex positions, so the layering forces every other target word to
    zero and the extraction equals the program's polynomial times the
    witness coefficient, which is one.
    """
    m = len(witness)
    if m < 1:
        raise ValueError("witness word must have degree at least 1")
    if target.poly.coeff(witness) != 1:
        raise ValueError("witness word must have coefficient exactly 1 in the target")
    d = f_abp.degree
    if m > d:
        raise ValueError(f"witness degree {m} exceeds the program degree {d}")
    if (d + m - 1) // m > 3:
        raise ValueError("group entries would exceed the degree-3 cap")

    # per-gap sparse matrices in global vertex indexing
    gap_cells = []
    for gap, gap_edges in enumerate(f_abp.edges):
        cells: dict = {}
        for u, v, form in gap_edges:
            if form.constant != 0 or len(form.coeffs) != 1:
                raise ValueError("edge labels must be single-variable monomials")
            key = (f_abp.vertex_index(gap, u), f_abp.vertex_index(gap + 1, v))
            if key in cells:
                raise ValueError(f"parallel edges at {key} cannot share a matrix cell")
            (vid, c), = form.coeffs
            cells[key] = (c, (vid,))
        gap_cells.append(cells)

    base, extra = divmod(d, m)
    entries: dict[int, dict] = {}
    gap = 0
    for i in range(m):
        size = base + (1 if i < extra else 0)
        block = gap_cells[gap]
        for g2 in range(gap + 1, gap + size):
            nxt: dict = {}
            for (r, k_), (c0, w0) in block.items():
                for (k2, c_), (c1, w1) in gap_cells[g2].items():
                    if k2 != k_:
                        continue
                    key = (r, c_)
                    if key in nxt:
                        raise ValueError("grouped paths collide in one matrix cell")
                    nxt[key] = (c0 * c1, w0 + w1)
            block = nxt
        gap += size
        letter = witness[i]
        cells = entries.setdefault(letter, {})
        for key, val in block.items():
            if key in cells:
                raise ValueError("witness letter groups overlap in one matrix cell")
            cells[key] = val

    from ..automata import MatrixSubstitution

    sub = MatrixSubstitution(target.table, f_abp.table, f_abp.size, entries)
    return AbpReduction(sub, "abp", target.spec_string, kind="vbp-trivial")
