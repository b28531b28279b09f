from fractions import Fraction

import pytest

import corpus
from ncpoly.algebra import NCPoly, TermBudgetError, VarTable, poly_mul
from ncpoly.circuits import (
    Add,
    Circuit,
    CircuitFormatError,
    Const,
    Input,
    Mul,
    SkewRefusal,
    SkewWitness,
    expand,
    format_circuit,
    homogenize,
    is_skew,
    parse_circuit,
    to_bracketed,
    to_skew_bracketed,
)


def t3():
    return VarTable(["x1", "x2", "x3"])


def balanced(word, pairs):
    """Stack check over typed bracket pairs (test-local oracle)."""
    close_of = {o: c for o, c in pairs}
    opens = set(close_of)
    stack = []
    for v in word:
        if v in opens:
            stack.append(close_of[v])
        else:
            if not stack or stack.pop() != v:
                return False
    return not stack


# -- expand -------------------------------------------------------------


def test_expand_distributes():
    t = t3()
    c = Circuit(t, [Input(0), Input(1), Add(0, 1), Input(2), Mul(2, 3)], 4)
    f = expand(c)
    assert f.terms == {t.word("x1", "x3"): 1, t.word("x2", "x3"): 1}


def test_expand_mul_order():
    t = t3()
    a = expand(Circuit(t, [Input(0), Input(1), Mul(0, 1)], 2))
    b = expand(Circuit(t, [Input(0), Input(1), Mul(1, 0)], 2))
    assert a.terms == {t.word("x1", "x2"): 1}
    assert b.terms == {t.word("x2", "x1"): 1}
    assert a != b


def test_expand_square_matches_poly_mul():
    t = t3()
    c = Circuit(t, [Input(0), Input(1), Add(0, 1), Mul(2, 2)], 3)
    s = NCPoly.variable(t, "x1") + NCPoly.variable(t, "x2")
    assert expand(c) == poly_mul(s, s)
    assert len(expand(c).terms) == 4


def test_expand_degree_cap_applies_per_gate():
    t = t3()
    # (x1^2) * x2 with cap 2: the inner square survives, the product is cut
    c = Circuit(t, [Input(0), Mul(0, 0), Input(1), Mul(1, 2)], 3)
    assert expand(c, degree_cap=2).degree() == -1
    assert expand(c, degree_cap=3).terms == {t.word("x1", "x1", "x2"): 1}


def test_expand_term_budget():
    t = t3()
    c = Circuit(t, [Input(0), Input(1), Add(0, 1), Mul(2, 2), Mul(3, 3)], 4)
    with pytest.raises(TermBudgetError):
        expand(c, term_budget=8)


def test_expand_homogeneous_single_length():
    for c in corpus.random_circuits(seed=99, count=15):
        h = homogenize(c)
        assert expand(h) == expand(c)
        assert h.muls_have_homogeneous_children()
        for gid in h.reachable():
            g = h.gates[gid]
            if isinstance(g, Mul):
                for child in (g.left, g.right):
                    assert expand(Circuit(h.table, h.gates, child)).is_homogeneous()


# -- skew ---------------------------------------------------------------


def test_is_skew_left():
    t = t3()
    c = Circuit(t, [Input(0), Input(1), Input(2), Add(1, 2), Mul(0, 3)], 4)
    w = is_skew(c)
    assert isinstance(w, SkewWitness) and w.tags == {4: "left"}


def test_is_skew_refusal_names_gate():
    t = t3()
    c = Circuit(t, [Input(0), Input(1), Input(2), Add(0, 1), Add(1, 2), Mul(3, 4)], 5)
    w = is_skew(c)
    assert isinstance(w, SkewRefusal) and w.gate == 5 and not w.ok


def test_is_skew_chain():
    t = t3()
    c = Circuit(t, [Input(0), Input(1), Input(2), Mul(1, 2), Mul(0, 3)], 4)
    w = is_skew(c)
    assert w.ok and w.tags == {3: "left", 4: "left"}
    assert expand(c).terms == {t.word("x1", "x2", "x3"): 1}


# -- general bracketing ---------------------------------------------------


def test_to_bracketed_single_input():
    t = t3()
    br = to_bracketed(Circuit(t, [Input(0)], 0))
    f = expand(br.circuit)
    assert len(f.terms) == 1
    (word,) = f.terms
    assert br.circuit.table.word_names(word) == ("[_x1", "]_x1")
    assert br.recover(f).terms == {t.word("x1"): 1}


def test_to_bracketed_const_is_degree_four():
    t = t3()
    br = to_bracketed(Circuit(t, [Const(Fraction(5))], 0))
    f = expand(br.circuit)
    (word,) = f.terms
    assert br.circuit.table.word_names(word) == ("(_a5", "[_z5", "]_z5", ")_a5")
    assert br.recover(f).terms == {(): 5}


def test_to_bracketed_product():
    t = t3()
    br = to_bracketed(Circuit(t, [Input(0), Input(1), Mul(0, 1)], 2))
    f = expand(br.circuit)
    (word,) = f.terms
    assert br.circuit.table.word_names(word) == (
        "(_g2",
        "[_x1",
        "]_x1",
        ")_g2",
        "[_x2",
        "]_x2",
    )
    assert br.recover(f).terms == {t.word("x1", "x2"): 1}


def test_bracketed_recovery_and_balance_on_corpus():
    circuits = corpus.hand_circuits() + corpus.random_circuits(seed=7, count=25)
    for c in circuits:
        br = to_bracketed(c)
        f = expand(br.circuit)
        assert br.recover(f) == expand(c)
        for w in f.terms:
            assert balanced(w, br.pairs)


# -- skew bracketing -------------------------------------------------------


def test_skew_bracketed_identity_circuit():
    t = t3()
    sb = to_skew_bracketed(Circuit(t, [Input(0)], 0))
    f = expand(sb.circuit)
    (word,) = f.terms
    assert sb.circuit.table.word_names(word) == ("x1_L", "x1_R")
    assert sb.recover(f).terms == {t.word("x1"): 1}


def test_skew_bracketed_var_times_gate():
    t = t3()
    c = Circuit(t, [Input(0), Input(1), Mul(0, 1)], 2)
    sb = to_skew_bracketed(c)
    f = expand(sb.circuit)
    (word,) = f.terms
    names = sb.circuit.table.word_names(word)
    assert names == ("x1_(g2,L)", "x2_L", "x2_R", "x1_(g2,R)")
    assert sb.recover(f).terms == {t.word("x1", "x2"): 1}


def test_skew_bracketed_scalar_gate():
    t = t3()
    c = Circuit(t, [Const(Fraction(3)), Input(0), Mul(0, 1)], 2)
    sb = to_skew_bracketed(c)
    f = expand(sb.circuit)
    (word,) = f.terms
    names = sb.circuit.table.word_names(word)
    assert names == ("a3_(g2,L)", "x1_L", "x1_R", "a3_(g2,R)")
    assert sb.recover(f).terms == {t.word("x1"): 3}


def test_skew_bracketed_requires_skew_and_homogeneous():
    t = t3()
    non_skew = Circuit(t, [Input(0), Input(1), Add(0, 1), Add(0, 1), Mul(2, 3)], 4)
    with pytest.raises(ValueError, match="not skew"):
        to_skew_bracketed(non_skew)
    mixed = Circuit(t, [Input(0), Const(Fraction(1)), Add(0, 1), Mul(0, 2)], 3)
    with pytest.raises(ValueError, match="homogenize"):
        to_skew_bracketed(mixed)


def test_skew_twin_pairing_on_corpus():
    circuits = corpus.hand_skew_circuits() + corpus.random_skew_circuits(seed=13, count=20)
    for c in circuits:
        h = homogenize(c)
        sb = to_skew_bracketed(h)
        f = expand(sb.circuit)
        assert sb.recover(f) == expand(c)
        mate = {}
        for o, cl in sb.pairs:
            mate[o] = cl
            mate[cl] = o
        for w in f.terms:
            n = len(w)
            assert n % 2 == 0
            for i in range(n // 2):
                assert mate[w[i]] == w[n - 1 - i]


# -- text format ------------------------------------------------------------


def test_circuit_roundtrip():
    text = "g0 input x1\ng1 const 5/3\ng2 add g0 g1\ng3 mul g2 g0\noutput g3\n"
    c = parse_circuit(text)
    assert format_circuit(c) == text
    f = expand(c)
    t = c.table
    assert f.coeff(t.word("x1", "x1")) == 1
    assert f.coeff(t.word("x1")) == Fraction(5, 3)


def test_circuit_parse_rejects_forward_reference():
    with pytest.raises(CircuitFormatError):
        parse_circuit("g0 add g1 g1\ng1 input x\noutput g1\n")


def test_circuit_parse_rejects_bad_fanin():
    with pytest.raises(CircuitFormatError):
        parse_circuit("g0 input x\ng1 add g0\noutput g1\n")
    with pytest.raises(CircuitFormatError):
        parse_circuit("g0 input x\ng1 mul g0 g0 g0\noutput g1\n")


def test_circuit_parse_rejects_sparse_ids():
    with pytest.raises(CircuitFormatError):
        parse_circuit("g0 input x\ng2 add g0 g0\noutput g2\n")


def test_format_roundtrip_on_random():
    # the reparsed table numbers variables by first occurrence, so compare by name
    for c in corpus.random_circuits(seed=31, count=10):
        c2 = parse_circuit(format_circuit(c))
        f, f2 = expand(c), expand(c2)
        assert {c2.table.word_names(w): v for w, v in f2.terms.items()} == {
            c.table.word_names(w): v for w, v in f.terms.items()
        }
