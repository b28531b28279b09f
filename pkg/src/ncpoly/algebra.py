"""Sparse exact polynomials over words in a free monoid.

A :class:`VarTable` fixes a universe of named variables (ids dense from 0)
together with the coefficient field.  Words are tuples of variable ids;
multiplication concatenates them in argument order and is therefore
noncommutative.  An :class:`NCPoly` maps words to nonzero scalars.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to share across threads.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .fields import QQ, Field

Word = tuple  # tuple[int, ...] of variable ids

DEFAULT_TERM_BUDGET = 10**6


class TableMismatchError(ValueError):
    """Operands built over different variable tables."""


class TermBudgetError(RuntimeError):
    """An expansion exceeded the configured number of terms."""


@dataclass(frozen=True)
class Var:
    id: int
    name: str


class VarTable:
    """Ordered universe of named variables plus the coefficient field."""

    def __init__(self, names: Iterable[str] = (), field: Field = QQ):
        self.field = field
        self._names: list[str] = []
        self._ids: dict[str, int] = {}
        for n in names:
            self.add(n)

    def add(self, name: str) -> Var:
        # '#' starts a comment in every text format, so names must avoid it
        if not name or "#" in name or any(ch.isspace() for ch in name):
            raise ValueError(f"bad variable name {name!r}")
        if name in self._ids:
            raise ValueError(f"duplicate variable name {name!r}")
        vid = len(self._names)
        self._names.append(name)
        self._ids[name] = vid
        return Var(vid, name)

    def get_or_add(self, name: str) -> Var:
        if name in self._ids:
            return Var(self._ids[name], name)
        return self.add(name)

    def var(self, name: str) -> Var:
        return Var(self._ids[name], name)

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def name(self, vid: int) -> str:
        return self._names[vid]

    @property
    def names(self) -> tuple:
        return tuple(self._names)

    def vars(self) -> Iterator[Var]:
        for vid, n in enumerate(self._names):
            yield Var(vid, n)

    def word(self, *names: str) -> Word:
        return tuple(self._ids[n] for n in names)

    def word_names(self, word: Word) -> tuple:
        return tuple(self._names[v] for v in word)

    def __len__(self) -> int:
        return len(self._names)

    def __eq__(self, other):
        return (
            isinstance(other, VarTable)
            and self._names == other._names
            and self.field == other.field
        )

    def __hash__(self):
        return hash((tuple(self._names), self.field))

    def __repr__(self):
        return f"VarTable({len(self)} vars, {self.field.name})"


def _check_tables(a: "NCPoly", b: "NCPoly") -> None:
    if a.table is not b.table and a.table != b.table:
        raise TableMismatchError("operands use different variable tables")


class NCPoly:
    """Finite map word -> nonzero coefficient over one variable table."""

    __slots__ = ("table", "terms")

    def __init__(self, table: VarTable, terms: Mapping[Word, object] | None = None):
        self.table = table
        clean: dict[Word, object] = {}
        if terms:
            for w, c in terms.items():
                if c != 0:
                    clean[tuple(w)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, table: VarTable) -> "NCPoly":
        return cls(table)

    @classmethod
    def const(cls, table: VarTable, c) -> "NCPoly":
        return cls(table, {(): c})

    @classmethod
    def monomial(cls, table: VarTable, word: Sequence, coeff=None) -> "NCPoly":
        if coeff is None:
            coeff = table.field.one
        return cls(table, {tuple(word): coeff})

    @classmethod
    def variable(cls, table: VarTable, name: str) -> "NCPoly":
        return cls(table, {(table.var(name).id,): table.field.one})

    # -- inspection ---------------------------------------------------

    def degree(self) -> int:
        """Max word length; the zero polynomial has degree -1."""
        if not self.terms:
            return -1
        return max(len(w) for w in self.terms)

    def is_homogeneous(self) -> bool:
        lengths = {len(w) for w in self.terms}
        return len(lengths) <= 1

    def coeff(self, word: Sequence):
        return self.terms.get(tuple(word), self.table.field.zero)

    def support(self) -> set:
        return set(self.terms)

    def num_terms(self) -> int:
        return len(self.terms)

    def var_ids(self) -> set:
        out: set[int] = set()
        for w in self.terms:
            out.update(w)
        return out

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "NCPoly") -> "NCPoly":
        _check_tables(self, other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            s = c if s is None else s + c
            if s == 0:
                out.pop(w, None)
            else:
                out[w] = s
        p = NCPoly.zero(self.table)
        p.terms.update(out)
        return p

    def __neg__(self) -> "NCPoly":
        p = NCPoly.zero(self.table)
        p.terms.update({w: -c for w, c in self.terms.items()})
        return p

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def __mul__(self, other: "NCPoly") -> "NCPoly":
        _check_tables(self, other)
        out: dict[Word, object] = {}
        for wa, ca in self.terms.items():
            for wb, cb in other.terms.items():
                w = wa + wb
                c = ca * cb
                s = out.get(w)
                s = c if s is None else s + c
                if s == 0:
                    out.pop(w, None)
                else:
                    out[w] = s
        p = NCPoly.zero(self.table)
        p.terms.update(out)
        return p

    def scale(self, c) -> "NCPoly":
        if c == 0:
            return NCPoly.zero(self.table)
        p = NCPoly.zero(self.table)
        p.terms.update({w: c * v for w, v in self.terms.items()})
        return p

    def truncate(self, degree_cap: int) -> "NCPoly":
        p = NCPoly.zero(self.table)
        p.terms.update({w: c for w, c in self.terms.items() if len(w) <= degree_cap})
        return p

    def __repr__(self):
        if not self.terms:
            return "NCPoly(0)"
        fmt = self.table.field.format
        parts = []
        for w in sorted(self.terms)[:8]:
            word = ".".join(self.table.word_names(w)) or "1"
            parts.append(f"{fmt(self.terms[w])}*{word}")
        more = "" if len(self.terms) <= 8 else f" ... ({len(self.terms)} terms)"
        return "NCPoly(" + " + ".join(parts) + more + ")"


def poly_add(a: NCPoly, b: NCPoly) -> NCPoly:
    return a + b


def poly_mul(a: NCPoly, b: NCPoly) -> NCPoly:
    """Product; words concatenate in argument order, never reordered."""
    return a * b


def hadamard_bruteforce(a: NCPoly, b: NCPoly) -> NCPoly:
    """Coefficientwise product, the oracle for the matrix-built Hadamard."""
    _check_tables(a, b)
    small, big = (a, b) if len(a.terms) <= len(b.terms) else (b, a)
    out = NCPoly.zero(a.table)
    for w, c in small.terms.items():
        d = big.terms.get(w)
        if d is not None:
            prod = c * d if small is a else d * c
            if prod != 0:
                out.terms[w] = prod
    return out


def substitute_letters(f: NCPoly, mapping: Mapping[int, object], out_table: VarTable) -> NCPoly:
    """Replace each letter by a variable (Var) or scalar, combining like terms.

    Scalars multiply into the coefficient and vanish from the word.  Every
    letter occurring in ``f`` must be mapped.
    """
    out = NCPoly.zero(out_table)
    for w, c in f.terms.items():
        coeff = c
        letters = []
        for vid in w:
            try:
                img = mapping[vid]
            except KeyError:
                raise KeyError(
                    f"no image for variable {f.table.name(vid)!r}"
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
# Matrices with polynomial entries


class PolyMatrix:
    """Square matrix of NCPoly entries sharing one variable table."""

    __slots__ = ("table", "dim", "entries")

    def __init__(self, table: VarTable, entries: Sequence[Sequence[NCPoly]]):
        self.table = table
        self.dim = len(entries)
        for row in entries:
            if len(row) != self.dim:
                raise ValueError("matrix must be square")
            for e in row:
                if e.table is not table and e.table != table:
                    raise TableMismatchError("entry uses a foreign variable table")
        self.entries = [list(row) for row in entries]

    @classmethod
    def zeros(cls, table: VarTable, dim: int) -> "PolyMatrix":
        return cls(table, [[NCPoly.zero(table) for _ in range(dim)] for _ in range(dim)])

    @classmethod
    def identity(cls, table: VarTable, dim: int) -> "PolyMatrix":
        m = cls.zeros(table, dim)
        one = table.field.one
        for i in range(dim):
            m.entries[i][i] = NCPoly.const(table, one)
        return m

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.dim == other.dim
            and self.entries == other.entries
        )


def mat_add(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} vs {b.dim}")
    return PolyMatrix(
        a.table,
        [[a.entries[i][j] + b.entries[i][j] for j in range(a.dim)] for i in range(a.dim)],
    )


def mat_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Matrix product; entry products keep A's entry on the left."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} vs {b.dim}")
    n = a.dim
    out = PolyMatrix.zeros(a.table, n)
    for i in range(n):
        arow = a.entries[i]
        for k in range(n):
            e = arow[k]
            if not e:
                continue
            brow = b.entries[k]
            for j in range(n):
                if brow[j]:
                    out.entries[i][j] = out.entries[i][j] + e * brow[j]
    return out


def mat_scale(a: PolyMatrix, c) -> PolyMatrix:
    return PolyMatrix(a.table, [[e.scale(c) for e in row] for row in a.entries])


# ---------------------------------------------------------------------------
# Exact rank of scalar matrices


def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank over the field via exact Gaussian elimination.

    Accepts any rectangular list-of-lists of scalars (Fraction or ModInt).
    """
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, nrows):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        for r in range(rank + 1, nrows):
            if m[r][col] != 0:
                factor = m[r][col] / pv
                m[r] = [x - factor * y for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


# ---------------------------------------------------------------------------
# Polynomial text format: one term per line, `<coeff> <var> <var> ...`,
# the empty word written as the literal token `1`, lines sorted by word.


def format_poly(f: NCPoly) -> str:
    fmt = f.table.field.format
    lines = []
    for w in sorted(f.terms):
        if w:
            lines.append(fmt(f.terms[w]) + " " + " ".join(f.table.word_names(w)))
        else:
            lines.append(fmt(f.terms[w]) + " 1")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_poly(text: str, table: VarTable) -> NCPoly:
    """Parse the text format; unknown variable names are added to the table."""
    out = NCPoly.zero(table)
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        coeff = table.field.parse(tokens[0])
        if tokens[1:] == ["1"]:
            word: Word = ()
        else:
            word = tuple(table.get_or_add(t).id for t in tokens[1:])
        s = out.terms.get(word)
        s = coeff if s is None else s + coeff
        if s == 0:
            out.terms.pop(word, None)
        else:
            out.terms[word] = s
    return out
