import random
from fractions import Fraction

import pytest

import corpus
from ncpoly.abp import abp_eval, bounded_depth_dyck_abp
from ncpoly.algebra import NCPoly, Var, VarTable
from ncpoly.automata import MatrixSubstitution
from ncpoly.circuits import expand
from ncpoly.families import (
    ChiTable,
    FamilyInstance,
    commutative_version,
    gen_dyck,
    gen_dyck_depth,
    gen_hierarchy,
    gen_id_prime,
    gen_pal,
    gen_per,
    gen_per_star,
    gen_per_star_chi,
    gen_power_of_sum,
    gen_product_of_sums,
    make_family,
)
from ncpoly.fields import PrimeField, QQ
from ncpoly.reductions import (
    IProjMap,
    ProjMap,
    apply_abp_reduction,
    apply_iproj,
    apply_proj,
    apply_to_instance,
    compose_abp,
    dk_encode_word,
    dk_to_d2_reduction,
    dyck_completeness_reduction,
    dyck_depth_reduction,
    format_reduction,
    hierarchy_iproj,
    identity_reduction,
    iproj_to_abp,
    pal_to_d2_reduction,
    pal_vsk_reduction,
    palsq_to_d2_reduction,
    parse_reduction,
    per_to_idstar_reduction,
    per_to_perstar_chi_reduction,
    proj_to_iproj,
    set_multilinear_rank1_split,
    transfer,
    two_chains_reduction,
    vbp_trivial_reduction,
    verify_reduction,
)


def instance_of(circuit):
    return FamilyInstance.from_poly("circuit", expand(circuit))


def per_to_perstar_iproj(n):
    """Identity on the first block of the repeated permanent, ones after."""
    per, perstar = gen_per(n), gen_per_star(n)
    mapping = {}
    for pos in range(1, n * n + 1):
        for v in perstar.table.vars():
            if pos <= n:
                mapping[(pos, v.id)] = Var(per.table.var(v.name).id, v.name)
            else:
                mapping[(pos, v.id)] = Fraction(1)
    return IProjMap(perstar.table, per.table, mapping), per, perstar


def powsum_iproj(n):
    """Positionwise renaming of (z0+z1)^n onto the product of the sums."""
    pows, prods = gen_power_of_sum(n), gen_product_of_sums(n)
    mapping = {}
    for pos in range(1, n + 1):
        mapping[(pos, pows.table.var("z0").id)] = Var(
            prods.table.var(f"x{pos}").id, f"x{pos}"
        )
        mapping[(pos, pows.table.var("z1").id)] = Var(
            prods.table.var(f"y{pos}").id, f"y{pos}"
        )
    return IProjMap(pows.table, prods.table, mapping), prods, pows


# -- projections ------------------------------------------------------------


def test_identity_projection():
    inst = gen_pal(2)
    m = ProjMap(inst.table, inst.table, {v.id: v for v in inst.table.vars()})
    assert apply_proj(m, inst.poly) == inst.poly


def test_per_to_perstar_indexed_projection():
    m, per, perstar = per_to_perstar_iproj(2)
    assert apply_iproj(m, perstar.poly) == per.poly


def test_powsum_indexed_projection():
    m, prods, pows = powsum_iproj(3)
    assert apply_iproj(m, pows.poly) == prods.poly


def test_apply_proj_requires_totality():
    t = VarTable(["a", "b"])
    f = NCPoly(t, {t.word("a", "b"): Fraction(1)})
    m = ProjMap(t, t, {t.var("a").id: t.var("a")})
    with pytest.raises(KeyError):
        apply_proj(m, f)


def test_monotonicity_of_term_counts():
    rng = random.Random(20)
    inst = gen_product_of_sums(4)
    vars_ = list(inst.table.vars())
    for _ in range(20):
        mapping = {}
        for v in vars_:
            roll = rng.random()
            if roll < 0.5:
                mapping[v.id] = rng.choice(vars_)
            elif roll < 0.8:
                mapping[v.id] = Fraction(rng.randint(1, 3))
            else:
                mapping[v.id] = Fraction(0)
        m = ProjMap(inst.table, inst.table, mapping)
        image = apply_proj(m, inst.poly)
        assert len(image.terms) <= len(inst.poly.terms)
        assert len(image.var_ids()) <= len(inst.poly.var_ids())
        im = proj_to_iproj(m, inst.poly.degree())
        image2 = apply_iproj(im, inst.poly)
        assert image2 == image


# -- conversions --------------------------------------------------------------


def test_identity_chain_reduction():
    inst = gen_pal(1)
    r = identity_reduction(inst.table, 2)
    assert apply_abp_reduction(r, inst.poly) == inst.poly


def test_powsum_chain_matches_iproj():
    m, prods, pows = powsum_iproj(2)
    r = iproj_to_abp(m, 2)
    assert apply_abp_reduction(r, pows.poly) == prods.poly


def test_scalar_only_map_counts_terms():
    inst = gen_dyck(2, 4)
    mapping = {}
    out = VarTable(field=QQ)
    for pos in range(1, 5):
        for v in inst.table.vars():
            mapping[(pos, v.id)] = Fraction(1)
    m = IProjMap(inst.table, out, mapping)
    r = iproj_to_abp(m, 4)
    result = apply_abp_reduction(r, inst.poly)
    assert result.terms == {(): 8}


def test_three_way_agreement_on_random_maps():
    rng = random.Random(64)
    for _ in range(25):
        n_vars = rng.randint(2, 3)
        d = rng.randint(1, 4)
        table = VarTable([f"a{i}" for i in range(n_vars)])
        out = VarTable([f"b{i}" for i in range(n_vars)])
        # random homogeneous target of degree d
        words = set()
        for _ in range(rng.randint(1, 12)):
            words.add(tuple(rng.randrange(n_vars) for _ in range(d)))
        g = NCPoly(table, {w: Fraction(rng.randint(1, 4)) for w in words})
        mapping = {}
        for v in table.vars():
            roll = rng.random()
            if roll < 0.6:
                mapping[v.id] = Var(rng.randrange(n_vars), out.name(0))
                mapping[v.id] = Var(mapping[v.id].id, out.name(mapping[v.id].id))
            elif roll < 0.85:
                mapping[v.id] = Fraction(rng.randint(1, 3))
            else:
                mapping[v.id] = Fraction(0)
        pm = ProjMap(table, out, mapping)
        im = proj_to_iproj(pm, d)
        r = iproj_to_abp(im, d)
        a = apply_proj(pm, g)
        b = apply_iproj(im, g)
        c = apply_abp_reduction(r, g)
        assert a == b == c


# -- matrix application --------------------------------------------------------


def test_two_chains_dfa():
    r = two_chains_reduction(3)
    src, tgt = make_family(r.source), make_family(r.target)
    assert r.dim == 6
    assert verify_reduction(r, src, tgt).passed
    assert apply_abp_reduction(r, tgt.poly) == src.poly


def test_zero_matrices_annihilate():
    inst = gen_pal(1)
    from ncpoly.reductions.base import AbpReduction

    sub = MatrixSubstitution(inst.table, inst.table, 3, {})
    r = AbpReduction(sub, "zero", "pal:n=1")
    assert not apply_abp_reduction(r, inst.poly)


def test_pathsum_matches_termwise_on_dyck_and_pal():
    # dual route: the joint walk over the structured support must agree with
    # brute-force expansion plus termwise application
    r = pal_to_d2_reduction(2)
    tgt = make_family(r.target)
    assert apply_to_instance(r, tgt) == apply_to_instance(r, tgt, force_expand=True)
    r2 = pal_vsk_reduction(corpus.hand_skew_circuits()[3])
    tgt2 = make_family(r2.target)
    assert apply_to_instance(r2, tgt2) == apply_to_instance(r2, tgt2, force_expand=True)
    r3 = dk_to_d2_reduction(3, 2)
    tgt3 = make_family(r3.target)
    assert apply_to_instance(r3, tgt3) == apply_to_instance(r3, tgt3, force_expand=True)
    r4 = dyck_depth_reduction(1, 2, 3)
    tgt4 = make_family(r4.target)
    assert apply_to_instance(r4, tgt4) == apply_to_instance(r4, tgt4, force_expand=True)


def test_pathsum_matches_termwise_on_medium_circuit_target():
    # same dual route on a 33614-word balanced target for a circuit reduction
    from ncpoly.circuits import Circuit, Input, Mul

    t = VarTable(["x1", "x2"])
    c = Circuit(t, [Input(0), Input(1), Mul(0, 1)], 2)
    r = dyck_completeness_reduction(c)
    tgt = make_family(r.target)
    assert tgt.poly.num_terms() == 33614
    assert apply_to_instance(r, tgt) == apply_to_instance(r, tgt, force_expand=True)


# -- composition ---------------------------------------------------------------


def test_compose_with_identity_is_behaviorally_equal():
    r = pal_to_d2_reduction(2)
    tgt = make_family(r.target)
    lift = identity_reduction(tgt.table, 4, source=r.target, target=r.target)
    comp = compose_abp(r, lift)
    assert comp.dim == r.dim * lift.dim
    assert apply_to_instance(comp, tgt) == apply_to_instance(r, tgt)
    assert verify_reduction(comp, make_family(r.source), tgt).passed


def test_compose_matches_sequential_application():
    m, prods, pows = powsum_iproj(2)
    r2 = iproj_to_abp(m, 2, source=prods.spec_string, target=pows.spec_string)
    r1 = two_chains_reduction(2)
    comp = compose_abp(r1, r2)
    # sequential: apply r2 to the outer target, then r1 to the result
    mid = apply_abp_reduction(r2, pows.poly)
    expected = apply_abp_reduction(r1, mid)
    assert apply_abp_reduction(comp, pows.poly) == expected


# -- verification ---------------------------------------------------------------


def test_verify_pass_and_fail_witness():
    r = pal_to_d2_reduction(2)
    src, tgt = make_family(r.source), make_family(r.target)
    assert verify_reduction(r, src, tgt).passed
    # corrupt a live matrix cell: double its coefficient
    vid = next(v for v in sorted(r.substitution.entries) if r.substitution.entries[v])
    (row, col), (coeff, word) = next(iter(sorted(r.substitution.entries[vid].items())))
    bad_sub = r.substitution.with_entry(vid, row, col, coeff + coeff, word)
    from ncpoly.reductions.base import AbpReduction

    bad = AbpReduction(bad_sub, r.source, r.target)
    v = verify_reduction(bad, src, tgt)
    assert not v.passed
    assert v.witness is not None


def test_verify_table_mismatch_is_a_verdict():
    r = pal_to_d2_reduction(1)
    wrong_src = gen_per(2)
    v = verify_reduction(r, wrong_src, make_family(r.target))
    assert not v.passed


# -- circuit completeness constructions ------------------------------------------


def test_dyck_completeness_spec_examples():
    t = VarTable(["x1", "x2", "x3"])
    from ncpoly.circuits import Add, Circuit, Input, Mul

    cases = [
        Circuit(t, [Input(0), Input(1), Mul(0, 1)], 2),
        Circuit(t, [Input(0)], 0),
        Circuit(t, [Input(0), Input(1), Mul(0, 1), Mul(1, 0), Add(2, 3)], 4),
    ]
    for c in cases:
        r = dyck_completeness_reduction(c)
        assert verify_reduction(r, instance_of(c), make_family(r.target)).passed


def test_dyck_completeness_on_corpus():
    for c in corpus.hand_circuits() + corpus.random_circuits(seed=555, count=12):
        r = dyck_completeness_reduction(c)
        assert verify_reduction(r, instance_of(c), make_family(r.target)).passed


def test_pal_vsk_spec_examples():
    t = VarTable(["x1", "x2", "x3"])
    from ncpoly.circuits import Add, Circuit, Const, Input, Mul

    chain = Circuit(t, [Input(1), Input(0), Mul(1, 0)], 2)  # x1 * x2
    scalar = Circuit(t, [Const(Fraction(3)), Input(0), Mul(0, 1)], 2)  # 3 * x1
    two = Circuit(t, [Input(0), Input(1), Input(2), Mul(1, 2), Mul(0, 3), Mul(3, 0), Add(4, 5)], 6)
    for c in (chain, scalar, two):
        r = pal_vsk_reduction(c)
        assert verify_reduction(r, instance_of(c), make_family(r.target)).passed


def test_pal_vsk_rejects_non_skew():
    t = VarTable(["x1", "x2"])
    from ncpoly.circuits import Add, Circuit, Input, Mul

    c = Circuit(t, [Input(0), Input(1), Add(0, 1), Add(1, 0), Mul(2, 3)], 4)
    with pytest.raises(ValueError, match="not skew"):
        pal_vsk_reduction(c)


def test_pal_vsk_on_corpus():
    for c in corpus.hand_skew_circuits() + corpus.random_skew_circuits(seed=777, count=10):
        r = pal_vsk_reduction(c)
        assert verify_reduction(r, instance_of(c), make_family(r.target)).passed


def test_pal_vsk_accepted_palindromes_are_the_parse_words():
    # the automaton accepts a target palindrome exactly when it encodes a
    # nonzero parse word, so the accepted count equals the parse support size
    from ncpoly.circuits import Circuit, Const, Input, Mul, homogenize, to_skew_bracketed

    t = VarTable(["x1", "x2"])
    cases = [
        Circuit(t, [Input(0), Input(1), Mul(0, 1)], 2),
        Circuit(t, [Const(Fraction(3)), Input(0), Mul(0, 1)], 2),
        Circuit(t, [Input(0)], 0),
    ]
    for c in cases:
        r = pal_vsk_reduction(c)
        tgt = make_family(r.target)
        accepted = [w for w in tgt.poly.terms if r.automaton.run(w)[0]]
        parse = expand(to_skew_bracketed(homogenize(c)).circuit)
        assert len(accepted) == len(parse.terms)


def test_dyck_accepted_balanced_words_are_the_parse_words():
    from ncpoly.circuits import Circuit, Input, Mul

    t = VarTable(["x1", "x2"])
    for c in [
        Circuit(t, [Input(0)], 0),
        Circuit(t, [Input(0), Input(1), Mul(0, 1)], 2),
    ]:
        r = dyck_completeness_reduction(c)
        tgt = make_family(r.target)
        accepted = [w for w in tgt.poly.terms if r.automaton.run(w)[0]]
        from ncpoly.circuits import to_bracketed

        parse = expand(to_bracketed(c).circuit)
        assert len(accepted) == len(parse.terms)


def test_completeness_multiplicity_vanishing_in_small_characteristic():
    # seven addition paths to one input: the polynomial is zero over Z_7 and
    # the walk's path-count weights vanish with it
    from ncpoly.circuits import Add, Circuit, Input

    f7 = PrimeField(7)
    t = VarTable(["x1"], field=f7)
    gates = [Input(0)]
    for _ in range(6):
        gates.append(Add(len(gates) - 1, 0))
    c = Circuit(t, gates, len(gates) - 1)
    assert not expand(c)
    r = dyck_completeness_reduction(c)
    assert not apply_to_instance(r, make_family(r.target, f7))
    r2 = pal_vsk_reduction(c)
    assert not apply_to_instance(r2, make_family(r2.target, f7))


def test_construction_automata_are_layered():
    r1 = pal_to_d2_reduction(2)
    r2 = dyck_completeness_reduction(corpus.hand_circuits()[4])
    for r in (r1, r2):
        layers = r.automaton.layer_map()
        assert layers is not None and r.automaton.layered
        assert layers[r.automaton.start] == 0


# -- bracket-family reductions ----------------------------------------------------


def test_pal_to_d2_exact():
    for n in (1, 2, 3):
        r = pal_to_d2_reduction(n)
        assert verify_reduction(r, make_family(r.source), make_family(r.target)).passed
    r1 = pal_to_d2_reduction(1)
    result = apply_to_instance(r1, make_family(r1.target))
    t = make_family(r1.source).table
    assert result.terms == {t.word("x0", "x0"): 1, t.word("x1", "x1"): 1}


def test_palsq_to_d2_exact():
    for n in (1, 2):
        r = palsq_to_d2_reduction(n)
        assert verify_reduction(r, make_family(r.source), make_family(r.target)).passed
    # at n=1 exactly the four concatenations of two balanced pairs survive
    r = palsq_to_d2_reduction(1)
    assert apply_to_instance(r, make_family(r.target)).num_terms() == 4


def test_dk_to_d2_exact_and_encoding():
    r = dk_to_d2_reduction(3, 2)
    src, tgt = make_family(r.source), make_family(r.target)
    assert src.poly.num_terms() == 3
    assert verify_reduction(r, src, tgt).passed
    # every encoded source word is balanced in the target alphabet
    for w in src.poly.terms:
        enc = dk_encode_word(w, 3, src.meta["pairs"], tgt.meta["pairs"])
        assert enc in tgt.poly.terms


def test_dk_to_d2_kills_non_image_words():
    r = dk_to_d2_reduction(3, 2)
    tgt = make_family(r.target)
    src = make_family(r.source)
    image = {
        dk_encode_word(w, 3, src.meta["pairs"], tgt.meta["pairs"]) for w in src.poly.terms
    }
    non_image = [w for w in tgt.poly.terms if w not in image]
    assert non_image
    sub = r.substitution
    for w in non_image[:20]:
        vec = {0: Fraction(1)}
        for vid in w:
            nxt = {}
            for r0, sc in vec.items():
                for c0, cf, _word in sub.rows(vid).get(r0, ()):
                    nxt[c0] = nxt.get(c0, Fraction(0)) + sc * cf
            vec = nxt
        assert vec.get(sub.dim - 1, Fraction(0)) == 0


def test_dyck_depth_reduction():
    assert verify_reduction(
        dyck_depth_reduction(1, 1, 2),
        gen_dyck_depth(1, 2),
        gen_dyck_depth(1, 2),
    ).passed
    r = dyck_depth_reduction(1, 2, 2)
    tgt = gen_dyck_depth(2, 2)
    assert tgt.poly.num_terms() == 8
    result = apply_to_instance(r, tgt)
    assert result.num_terms() == 4
    assert verify_reduction(r, gen_dyck_depth(1, 2), tgt).passed
    for (k1, k2, n) in [(1, 2, 3), (2, 3, 3), (1, 3, 4)]:
        r = dyck_depth_reduction(k1, k2, n)
        assert verify_reduction(r, gen_dyck_depth(k1, n), gen_dyck_depth(k2, n)).passed


def test_dyck_depth_counter_rejects_overflow():
    r = dyck_depth_reduction(1, 2, 2)
    sub = r.substitution
    tgt = make_family(r.target)
    (o1, _c1), _ = tgt.meta["pairs"]
    # after one opener the counter is at the bound: a second must be dead
    first = sub.rows(o1).get(0, ())
    assert first
    for col, _cf, _w in first:
        assert not sub.rows(o1).get(col, ())


# -- branching-program embedding ----------------------------------------------------


def test_vbp_trivial_one_pair_dyck_into_pal():
    p = bounded_depth_dyck_abp(2, 2, bracket_types=1)
    tgt = gen_pal(2)
    witness = tuple([tgt.table.var("x0").id] * 4)
    r = vbp_trivial_reduction(p, tgt, witness)
    result = apply_to_instance(r, tgt)
    assert result == abp_eval(p)
    assert result.num_terms() == 2


def test_vbp_trivial_single_edge():
    from ncpoly.abp import Abp, LinearForm

    t = VarTable(["x0", "x1"])
    p = Abp(t, [1, 1], [[(0, 0, LinearForm.make(t, {t.var("x0").id: Fraction(1)}))]])
    tgt = FamilyInstance.from_poly(
        "poly", NCPoly(t, {t.word("x1"): Fraction(1), t.word("x0", "x0"): Fraction(2)})
    )
    r = vbp_trivial_reduction(p, tgt, t.word("x1"))
    assert apply_abp_reduction(r, tgt.poly).terms == {t.word("x0"): 1}


def test_vbp_trivial_grouped_layers():
    # a witness shorter than the program degree groups consecutive layers
    p = bounded_depth_dyck_abp(2, 2, bracket_types=1)  # degree 4
    tgt = gen_pal(1)
    witness = tuple([tgt.table.var("x0").id] * 2)
    r = vbp_trivial_reduction(p, tgt, witness)
    assert apply_to_instance(r, tgt) == abp_eval(p)


def test_vbp_trivial_rejects_bad_witness():
    p = bounded_depth_dyck_abp(1, 1, bracket_types=1)
    tgt = gen_pal(1)
    with pytest.raises(ValueError, match="coefficient exactly 1"):
        vbp_trivial_reduction(p, tgt, (99, 99))


# -- permanent-style reductions -------------------------------------------------------


def test_per_to_idstar():
    for n in (2, 3):
        r = per_to_idstar_reduction(n)
        assert verify_reduction(r, make_family(r.source), make_family(r.target)).passed


def test_per_to_idstar_negative_control():
    r = per_to_idstar_reduction(2, distinct_check=False)
    result = apply_to_instance(r, make_family(r.target))
    assert result.num_terms() == 4  # without the check all index words survive


def test_per_to_idstar_block_one_carries_degree():
    r = per_to_idstar_reduction(2)
    result = apply_to_instance(r, make_family(r.target))
    assert all(len(w) == 2 for w in result.terms)


def test_per_chi_unit_and_weighted():
    chi1 = ChiTable.constant(2)
    r = per_to_perstar_chi_reduction(2, chi1)
    assert verify_reduction(r, gen_per(2), gen_per_star_chi(2, chi1)).passed
    chi2 = ChiTable(2, {(1, 2): Fraction(2), (2, 1): Fraction(3)})
    r2 = per_to_perstar_chi_reduction(2, chi2)
    assert verify_reduction(r2, gen_per(2), gen_per_star_chi(2, chi2)).passed


def test_per_chi_independence():
    results = []
    for chi in (
        ChiTable.constant(2),
        ChiTable(2, {(1, 2): Fraction(2), (2, 1): Fraction(3)}),
        ChiTable(2, {(1, 2): Fraction(1, 7), (2, 1): Fraction(-5)}),
    ):
        r = per_to_perstar_chi_reduction(2, chi)
        results.append(apply_to_instance(r, gen_per_star_chi(2, chi)))
    assert results[0] == results[1] == results[2] == gen_per(2).poly


def test_per_chi_zero_value_in_prime_field():
    f = PrimeField(5)
    with pytest.raises(ValueError, match="zero"):
        ChiTable(2, {(1, 2): f.from_int(5), (2, 1): f.from_int(1)})


# -- hierarchy and transfer --------------------------------------------------------


def test_hierarchy_iproj_levels():
    for i, n in [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2)]:
        m = hierarchy_iproj(i, n)
        assert verify_reduction(m, gen_hierarchy(i, n), gen_hierarchy(i + 1, n)).passed


def test_hierarchy_selected_monomial():
    # the collapsed leading factor is the unique all-type-1 nesting, value 1
    m = hierarchy_iproj(1, 2)
    tgt = gen_hierarchy(2, 2)
    selected = [
        w
        for w in tgt.poly.terms
        if apply_iproj(m, NCPoly(tgt.table, {w: Fraction(1)}))
    ]
    prefixes = {w[:4] for w in selected}
    assert len(prefixes) == 1
    (prefix,) = prefixes
    assert tgt.table.word_names(prefix) == ("(1_f1", "(1_f1", ")1_f1", ")1_f1")


def test_transfer_commuting_square():
    m, per, perstar = per_to_perstar_iproj(2)
    pm = transfer(m, 4)
    assert apply_proj(pm, commutative_version(perstar.poly)) == commutative_version(
        apply_iproj(m, perstar.poly)
    )
    m2, prods, pows = powsum_iproj(3)
    pm2 = transfer(m2, 3)
    assert apply_proj(pm2, commutative_version(pows.poly)) == commutative_version(
        apply_iproj(m2, pows.poly)
    )


def test_transfer_identity_map():
    inst = gen_pal(2)
    mapping = {
        (pos, v.id): v for pos in range(1, 5) for v in inst.table.vars()
    }
    m = IProjMap(inst.table, inst.table, mapping)
    pm = transfer(m, 4)
    assert apply_proj(pm, commutative_version(inst.poly)) == commutative_version(inst.poly)


def test_transfer_rejects_mixed_positions():
    t = VarTable(["a", "b"])
    m = IProjMap(t, t, {(1, 0): Var(0, "a"), (1, 1): Fraction(1)})
    with pytest.raises(ValueError, match="both scalars and variables"):
        transfer(m, 1)


# -- rank-one splitting ----------------------------------------------------------------


def test_split_found_for_idprime():
    for n in (2, 3):
        v = set_multilinear_rank1_split(commutative_version(gen_id_prime(n).poly))
        assert v.split is not None


def test_no_split_for_indexed_dyck():
    for n in (2, 3):
        v = set_multilinear_rank1_split(commutative_version(gen_dyck(2, 2 * n).poly))
        assert v.irreducible


def test_split_single_word():
    t = VarTable(["a", "b"])
    f = commutative_version(NCPoly(t, {t.word("a", "b"): Fraction(1)}))
    assert set_multilinear_rank1_split(f).split is not None


def test_split_rejects_non_set_multilinear():
    t = VarTable(["a"])
    tagged = commutative_version(NCPoly(t, {t.word("a", "a"): Fraction(1)}))
    a1 = tagged.table.var("a@1").id
    broken = NCPoly(tagged.table, {(a1, a1): Fraction(1)})  # position 1 used twice
    with pytest.raises(ValueError, match="set-multilinear"):
        set_multilinear_rank1_split(broken)


# -- serialization -----------------------------------------------------------------------


def test_reduction_roundtrip():
    r = pal_to_d2_reduction(2)
    text = format_reduction(r)
    r2, poly = parse_reduction(text, QQ)
    assert poly is None
    assert r2.kind == "pal-d2" and r2.source == r.source and r2.target == r.target
    tgt = make_family(r2.target)
    assert verify_reduction(r2, make_family(r2.source), tgt).passed


def test_reduction_roundtrip_with_source_poly():
    t = VarTable(["x1", "x2"])
    from ncpoly.circuits import Circuit, Input, Mul

    c = Circuit(t, [Input(0), Input(1), Mul(0, 1)], 2)
    r = dyck_completeness_reduction(c)
    text = format_reduction(r, source_poly=expand(c))
    r2, poly = parse_reduction(text, QQ)
    assert poly is not None and poly.num_terms() == 1
    assert verify_reduction(
        r2, FamilyInstance.from_poly("circuit", poly), make_family(r2.target)
    ).passed
