"""Reducibility objects and their application, conversion and verification.

Three notions, in increasing strength: a projection substitutes a variable
or scalar per variable; an indexed projection substitutes per (position,
variable); a matrix-substitution reduction substitutes a q x q matrix per
variable of the target polynomial and reads the source off the (1, q)
entry of the evaluated target.

Applying a matrix substitution to an explicitly expanded target is a
termwise sparse product.  For the structured targets used by the
completeness constructions (balanced-word and palindrome families, whose
supports are exponentially large) the application instead walks target
support and matrix entries jointly, following only nonzero cells; that
path sum computes exactly the same defining sum and is what makes
verification tractable at full size.  The two routes are cross-checked on
small instances in the test suite.
"""

import time
from dataclasses import dataclass, field as dc_field

from ..algebra import (
    NCPoly,
    TableMismatchError,
    Var,
    VarTable,
    Word,
)
from ..automata import MatrixSubstitution, SubstAutomaton, automaton_to_substitution
from ..families import FamilyInstance


@dataclass
class ProjMap:
    """Per-variable substitution into variables or scalars."""

    input_table: VarTable  # target polynomial's variables
    output_table: VarTable  # source polynomial's variables
    mapping: dict  # var id -> Var (of output table) or scalar

    def __post_init__(self):
        for img in self.mapping.values():
            if isinstance(img, Var):
                if self.output_table.name(img.id) != img.name:
                    raise ValueError(f"image variable {img} not in the output table")


@dataclass
class IProjMap:
    """Per-(position, variable) substitution; positions are 1-based."""

    input_table: VarTable
    output_table: VarTable
    mapping: dict  # (position, var id) -> Var or scalar


def apply_proj(m: ProjMap, g: NCPoly) -> NCPoly:
    if g.table != m.input_table:
        raise TableMismatchError("polynomial is not over the map's input table")
    for vid in g.var_ids():
        if vid not in m.mapping:
            raise KeyError(f"projection undefined on {g.table.name(vid)!r}")
    out = NCPoly.zero(m.output_table)
    for w, c in g.terms.items():
        coeff = c
        letters = []
        for vid in w:
            img = m.mapping[vid]
            if isinstance(img, Var):
                letters.append(img.id)
            else:
                coeff = coeff * img
                if coeff == 0:
                    break
        if coeff == 0:
            continue
        word = tuple(letters)
        s = out.terms.get(word)
        s = coeff if s is None else s + coeff
        if s == 0:
            out.terms.pop(word, None)
        else:
            out.terms[word] = s
    return out


def apply_iproj(m: IProjMap, g: NCPoly) -> NCPoly:
    if g.table != m.input_table:
        raise TableMismatchError("polynomial is not over the map's input table")
    out = NCPoly.zero(m.output_table)
    for w, c in g.terms.items():
        coeff = c
        letters = []
        for i, vid in enumerate(w):
            try:
                img = m.mapping[(i + 1, vid)]
            except KeyError:
                raise KeyError(
                    f"indexed projection undefined at position {i + 1} on "
                    f"{g.table.name(vid)!r}"
                ) from None
            if isinstance(img, Var):
                letters.append(img.id)
            else:
                coeff = coeff * img
                if coeff == 0:
                    break
        if coeff == 0:
            continue
        word = tuple(letters)
        s = out.terms.get(word)
        s = coeff if s is None else s + coeff
        if s == 0:
            out.terms.pop(word, None)
        else:
            out.terms[word] = s
    return out


# ---------------------------------------------------------------------------
# Matrix-substitution reductions


@dataclass
class AbpReduction:
    """A matrix substitution with named source and target."""

    substitution: MatrixSubstitution
    source: str  # descriptor: family spec, "circuit", or free-form
    target: str  # family spec string of the target instance
    kind: str = ""  # construction name, for serialization headers
    automaton: SubstAutomaton | None = dc_field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.substitution.dim

    @property
    def extraction(self) -> tuple:
        return (1, self.substitution.dim)  # 1-based (row, column)


def apply_abp_reduction(r: AbpReduction, g: NCPoly) -> NCPoly:
    """Evaluate g termwise on the matrices and extract the (1, q) entry.

    Variables without a matrix act as zero matrices and kill their words.
    """
    sub = r.substitution
    if g.table != sub.input_table:
        raise TableMismatchError("polynomial is not over the substitution's alphabet")
    table = sub.output_table
    field = table.field
    accept = sub.dim - 1
    acc: dict[Word, object] = {}
    for w, coeff in g.terms.items():
        vec = {0: [(coeff, ())]}  # column -> list of (scalar, word) contributions
        for vid in w:
            rows = sub.rows(vid)
            nxt: dict[int, list] = {}
            for r0, contribs in vec.items():
                for c0, cf, piece in rows.get(r0, ()):
                    bucket = nxt.setdefault(c0, [])
                    for sc, word in contribs:
                        bucket.append((sc * cf, word + piece))
            vec = nxt
            if not vec:
                break
        for sc, word in vec.get(accept, ()):
            s = acc.get(word)
            s = sc if s is None else s + sc
            if s == 0:
                acc.pop(word, None)
            else:
                acc[word] = s
    out = NCPoly.zero(table)
    out.terms.update({w: c for w, c in acc.items() if c != 0})
    return out


def _pathsum_dyck(
    sub: MatrixSubstitution, pairs, degree: int, depth_cap: int | None = None
) -> NCPoly:
    """Sum of extractions over all balanced target words, walked jointly
    with the nonzero matrix cells so only live branches are explored."""
    field = sub.input_table.field
    accept = sub.dim - 1
    acc: dict[Word, object] = {}
    stack: list[int] = []
    pieces: list[Word] = []

    def rec(pos: int, col: int, coeff):
        if pos == degree:
            if col == accept and not stack:
                word = tuple(x for p in pieces for x in p)
                acc[word] = acc.get(word, field.zero) + coeff
            return
        remaining = degree - pos
        if len(stack) + 1 <= remaining - 1 and (depth_cap is None or len(stack) < depth_cap):
            for o, c in pairs:
                for col2, cf, w in sub.rows(o).get(col, ()):
                    stack.append(c)
                    pieces.append(w)
                    rec(pos + 1, col2, coeff * cf)
                    pieces.pop()
                    stack.pop()
        if stack:
            c = stack.pop()
            for col2, cf, w in sub.rows(c).get(col, ()):
                pieces.append(w)
                rec(pos + 1, col2, coeff * cf)
                pieces.pop()
            stack.append(c)

    rec(0, 0, field.one)
    out = NCPoly.zero(sub.output_table)
    out.terms.update({w: c for w, c in acc.items() if c != 0})
    return out


def _pathsum_pal(sub: MatrixSubstitution, letters, half: int) -> NCPoly:
    """Extraction sum over palindrome words u.reverse(u): the first half
    branches over nonzero cells, the second half is forced letterwise."""
    field = sub.input_table.field
    accept = sub.dim - 1
    acc: dict[Word, object] = {}
    prefix: list[int] = []
    pieces: list[Word] = []

    def mirror(pos: int, col: int, coeff):
        if pos == half:
            if col == accept:
                word = tuple(x for p in pieces for x in p)
                acc[word] = acc.get(word, field.zero) + coeff
            return
        v = prefix[half - 1 - pos]
        for col2, cf, w in sub.rows(v).get(col, ()):
            pieces.append(w)
            mirror(pos + 1, col2, coeff * cf)
            pieces.pop()

    def forward(pos: int, col: int, coeff):
        if pos == half:
            mirror(0, col, coeff)
            return
        for v in letters:
            for col2, cf, w in sub.rows(v).get(col, ()):
                prefix.append(v)
                pieces.append(w)
                forward(pos + 1, col2, coeff * cf)
                pieces.pop()
                prefix.pop()

    forward(0, 0, field.one)
    out = NCPoly.zero(sub.output_table)
    out.terms.update({w: c for w, c in acc.items() if c != 0})
    return out


def apply_to_instance(
    r: AbpReduction, target: FamilyInstance, force_expand: bool = False
) -> NCPoly:
    """Apply a matrix substitution to a family instance.

    Balanced-word and palindrome targets use the joint path sum and never
    realize the instance; everything else expands and applies termwise.
    """
    if not force_expand:
        if target.name == "dyck":
            return _pathsum_dyck(r.substitution, target.meta["pairs"], target.params["d"])
        if target.name == "dyckdepth":
            return _pathsum_dyck(
                r.substitution,
                target.meta["pairs"],
                2 * target.params["n"],
                depth_cap=target.meta["depth"],
            )
        if target.name == "pal":
            return _pathsum_pal(r.substitution, target.meta["letters"], target.params["n"])
    return apply_abp_reduction(r, target.poly)


# ---------------------------------------------------------------------------
# Verification


@dataclass
class Verdict:
    passed: bool
    source_terms: int
    result_terms: int
    witness: tuple | None  # (word as names, expected coeff, got coeff)
    detail: str
    elapsed: float

    def __str__(self):
        lines = [
            f"verdict {'pass' if self.passed else 'fail'}",
            f"source-terms {self.source_terms}",
            f"result-terms {self.result_terms}",
            f"elapsed {self.elapsed:.3f}s",
        ]
        if self.detail:
            lines.append(f"detail {self.detail}")
        if self.witness is not None:
            word, expected, got = self.witness
            shown = " ".join(word) if word else "1"
            lines.append(f"witness {shown}")
            lines.append(f"expected {expected}")
            lines.append(f"got {got}")
        return "\n".join(lines)


def verify_reduction(r, source: FamilyInstance, target: FamilyInstance) -> Verdict:
    """Apply a reduction to the target instance and compare with the source
    term for term.  A mismatch is a verdict carrying the first offending
    word, never an exception."""
    t0 = time.perf_counter()
    if isinstance(r, AbpReduction):
        applied = apply_to_instance(r, target)
    elif isinstance(r, IProjMap):
        applied = apply_iproj(r, target.poly)
    elif isinstance(r, ProjMap):
        applied = apply_proj(r, target.poly)
    else:
        raise TypeError(f"cannot verify object of type {type(r).__name__}")
    expected = source.poly
    elapsed = time.perf_counter() - t0
    if applied.table != expected.table:
        return Verdict(
            False,
            len(expected.terms),
            len(applied.terms),
            None,
            "result uses a different variable table than the source",
            elapsed,
        )
    if applied.terms == expected.terms:
        return Verdict(True, len(expected.terms), len(applied.terms), None, "", elapsed)
    fmt = expected.table.field.format
    zero = expected.table.field.zero
    for w in sorted(set(expected.terms) | set(applied.terms)):
        want = expected.terms.get(w, zero)
        got = applied.terms.get(w, zero)
        if want != got:
            names = expected.table.word_names(w)
            return Verdict(
                False,
                len(expected.terms),
                len(applied.terms),
                (names, fmt(want), fmt(got)),
                "first mismatching word shown",
                elapsed,
            )
    raise AssertionError("term maps differ but no witness found")


# ---------------------------------------------------------------------------
# Conversions between the reducibilities


def proj_to_iproj(m: ProjMap, d: int) -> IProjMap:
    """Replicate a per-variable map at every position 1..d."""
    mapping = {}
    for i in range(1, d + 1):
        for vid, img in m.mapping.items():
            mapping[(i, vid)] = img
    return IProjMap(m.input_table, m.output_table, mapping)


def iproj_to_abp(m: IProjMap, d: int, source="", target="") -> AbpReduction:
    """Compile an indexed projection into a position-counting chain.

    State i has read i letters; reading y at state i emits the image of
    (i+1, y).  Zero images and undefined pairs compile to dead cells.  The
    extraction sits at the end of the chain, so the compiled reduction
    agrees with the indexed projection on targets homogeneous of degree d.
    """
    a = SubstAutomaton(m.input_table, m.output_table)
    a.add_state("p0", start=True)
    a.add_state(f"p{d}", accept=True)
    for (pos, vid), img in sorted(
        m.mapping.items(), key=lambda kv: (kv[0][0], kv[0][1])
    ):
        if pos > d:
            continue
        if isinstance(img, Var):
            a.add_transition(f"p{pos - 1}", vid, f"p{pos}", word=(img.id,))
        elif img != 0:
            a.add_transition(f"p{pos - 1}", vid, f"p{pos}", coeff=img)
    return AbpReduction(automaton_to_substitution(a), source, target, kind="iproj-chain", automaton=a)


def identity_reduction(table: VarTable, d: int, source="", target="") -> AbpReduction:
    """Chain of d+1 states mapping every variable to itself."""
    a = SubstAutomaton(table, table)
    a.add_state("p0", start=True)
    a.add_state(f"p{d}", accept=True)
    for i in range(d):
        for v in table.vars():
            a.add_transition(f"p{i}", v.id, f"p{i + 1}", word=(v.id,))
    return AbpReduction(automaton_to_substitution(a), source, target, kind="identity", automaton=a)


def compose_abp(r1: AbpReduction, r2: AbpReduction) -> AbpReduction:
    """Composition by block substitution: each entry word of the outer
    reduction is replaced by the product of the inner reduction's matrices,
    giving one (q1*q2)-dimensional matrix per outermost variable.

    Requires the inner reduction's input alphabet to equal the outer one's
    output alphabet.  Raises if a blown-up entry would need a sum of
    distinct monomials or a degree above the entry cap; the concrete
    constructions in this package never trigger either.
    """
    s1, s2 = r1.substitution, r2.substitution
    if s1.input_table != s2.output_table:
        raise TableMismatchError(
            "inner reduction's alphabet does not match the outer reduction's output"
        )
    q1, q2 = s1.dim, s2.dim
    one = s1.input_table.field.one

    def word_product(word):
        """Sparse product of the inner matrices of a word; identity for ()."""
        if not word:
            return {(i, i): (one, ()) for i in range(q1)}
        cells = dict(s1.entries.get(word[0], {}))
        for y in word[1:]:
            nxt: dict = {}
            rows = s1.rows(y)
            for (i, k), (c0, w0) in cells.items():
                for j, c1, w1 in rows.get(k, ()):
                    prev = nxt.get((i, j))
                    cand = (c0 * c1, w0 + w1)
                    if prev is None:
                        nxt[(i, j)] = cand
                    elif prev[1] == cand[1]:
                        nxt[(i, j)] = (prev[0] + cand[0], prev[1])
                    else:
                        raise ValueError(
                            "composition entry needs a sum of distinct monomials"
                        )
            cells = nxt
        return cells

    entries: dict[int, dict] = {}
    for zid, zcells in s2.entries.items():
        out_cells: dict = {}
        for (i2, j2), (coeff, word) in zcells.items():
            for (i1, j1), (c, w) in word_product(word).items():
                key = (i2 * q1 + i1, j2 * q1 + j1)
                prev = out_cells.get(key)
                cand = (coeff * c, w)
                if prev is None:
                    out_cells[key] = cand
                elif prev[1] == cand[1]:
                    out_cells[key] = (prev[0] + cand[0], prev[1])
                else:
                    raise ValueError("composition entry needs a sum of distinct monomials")
        entries[zid] = out_cells
    sub = MatrixSubstitution(s2.input_table, s1.output_table, q1 * q2, entries)
    return AbpReduction(sub, r1.source, r2.target, kind="compose")
