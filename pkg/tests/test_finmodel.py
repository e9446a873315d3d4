"""Finite relational layer: equality, closure, comparison isos, policies."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from param_workbench import rgalg
from param_workbench.finmodel import (
    STAR,
    WUNIT,
    IsoPolicy,
    PropRelMor,
    all_functions,
    all_rel_mors,
    bang1,
    build_instance,
    check_ccc,
    eq_mor,
    eq_rel,
    eta_expo,
    eta_prod,
    eta_unit,
    eta_witnesses,
    eval0,
    expo0,
    expo1,
    fin_set,
    fn,
    fn_compose,
    fn_id,
    fn_label,
    fst0,
    graph_rel,
    lambda0,
    pair0,
    prod_fn,
    prod_mor,
    product0,
    product1,
    rel,
    rel_mor_compose,
    rel_mor_id,
    relevant_iso_check,
    snd0,
    terminal0,
    terminal1,
)

A1 = fin_set([0])
A2 = fin_set([0, 1])
SIZES = [A1, A2]


@st.composite
def small_rels(draw):
    dom = fin_set(range(draw(st.integers(1, 2))))
    cod = fin_set(range(draw(st.integers(1, 2))))
    pairs = [(a, b) for a in dom for b in cod]
    chosen = draw(st.sets(st.sampled_from(pairs)))
    return rel(dom, cod, {p: ("w", p[0], p[1]) for p in chosen})


class TestEq:
    def test_two_atom_witness_table(self):
        r = eq_rel(A2)
        assert r.entries == (((0, 0), ("refl", 0)), ((1, 1), ("refl", 1)))
        assert not r.holds(0, 1)

    def test_preserves_identity(self):
        assert eq_mor(fn_id(A2)) == rel_mor_id(eq_rel(A2))

    def test_preserves_composition_small(self):
        # oracle: compose the functions first, then take the relation image
        carriers = [fin_set(range(n)) for n in (1, 2, 3)]
        for a, b, c in itertools.product(carriers, repeat=3):
            for f in all_functions(a, b):
                for g in all_functions(b, c):
                    assert eq_mor(fn_compose(g, f)) == \
                        rel_mor_compose(eq_mor(g), eq_mor(f))

    def test_faces_of_the_image_are_the_carrier(self):
        for a in SIZES:
            assert eq_rel(a).dom == a
            assert eq_rel(a).cod == a


class TestCccLevel0:
    def test_pairing_of_projections_is_identity(self):
        p = product0(A2, A2)
        assert pair0(fst0(A2, A2), snd0(A2, A2)) == fn_id(p)

    def test_currying_beta_exhaustive(self):
        for a, b, c in itertools.product(SIZES, repeat=3):
            ev = eval0(a, b)
            for f in all_functions(product0(c, a), b):
                lam = lambda0(f, c, a)
                assert fn_compose(ev, prod_fn(lam, fn_id(a))) == f


class TestCccLevel1:
    def test_exponential_of_equalities_is_pointwise_equality(self):
        for a, b in itertools.product(SIZES, repeat=2):
            e = expo1(eq_rel(a), eq_rel(b))
            for f in all_functions(a, b):
                for g in all_functions(a, b):
                    assert e.holds(fn_label(f), fn_label(g)) == (f == g)

    def test_product_witnesses_pair_the_components(self):
        r = product1(eq_rel(A2), eq_rel(A1))
        key = (("pr", 1, 0), ("pr", 1, 0))
        assert r.wit(*key) == ("wpair", ("refl", 1), ("refl", 0))
        assert len(r.entries) == 2

    def test_terminal_has_one_witness(self):
        t = terminal1()
        assert t.entries == (((STAR, STAR), WUNIT),)

    def test_universal_properties_on_demand(self):
        relations = [eq_rel(A1), eq_rel(A2),
                     graph_rel(fn(A2, A2, lambda x: 1 - x)),
                     rel(A2, A2, {(0, 0): ("gr", 0)})]
        rep = rgalg.Report()
        check_ccc(SIZES, relations, rep)
        assert rep.ok, [f.row() for f in rep.failures]


class TestComparisonIsos:
    def test_prod_on_two_and_one_atom_carriers(self):
        b = fin_set([2])
        m = eta_prod(A2, b)
        assert m.f.is_identity and m.g.is_identity
        assert len(m.src.entries) == 2
        got = set(m.action.values())
        assert got == {("wpair", ("refl", 0), ("refl", 2)),
                       ("wpair", ("refl", 1), ("refl", 2))}

    def test_expo_on_singletons(self):
        m = eta_expo(A1, A1)
        assert len(m.src.entries) == 1 == len(m.tgt.entries)
        ((key, w),) = m.action.items()
        assert key[1] == ("refl", fn_label(fn_id(A1)))
        assert w[0] == "wtab"

    def test_unit_sends_refl_to_the_terminal_witness(self):
        m = eta_unit()
        assert list(m.action.values()) == [WUNIT]

    def test_all_three_are_relabeling_isos(self):
        # Relations are extensional, so each comparison is an identity
        # in the category; the witness relabeling lives in its action.
        for a, b in itertools.product(SIZES, repeat=2):
            for m in eta_witnesses(a, b):
                assert m.is_iso
                assert m.has_identity_faces
                assert m.is_identity
                assert m.src.entries == m.tgt.entries or m.action

    def test_prod_naturality_square_exhaustive(self):
        for a, b, a2, b2 in itertools.product(SIZES, repeat=4):
            for f in all_functions(a, a2):
                for g in all_functions(b, b2):
                    lhs = rel_mor_compose(eta_prod(a2, b2),
                                          eq_mor(prod_fn(f, g)))
                    rhs = rel_mor_compose(prod_mor(eq_mor(f), eq_mor(g)),
                                          eta_prod(a, b))
                    assert lhs == rhs


class TestPolicies:
    def test_identities_pass_every_policy(self):
        for policy in IsoPolicy:
            assert relevant_iso_check(policy, fn_id(A2))
            assert relevant_iso_check(policy, rel_mor_id(eq_rel(A2)))

    def test_relabeling_isos_are_identities_extensionally(self):
        # Witness labels carry no identity, so a pure relabeling passes
        # even the strict policy; only moving faces can break it.
        m = eta_prod(A2, A2)
        assert m.is_identity
        for policy in IsoPolicy:
            assert relevant_iso_check(policy, m)

    def test_iso_with_moving_faces_splits_the_remaining_two(self):
        swap = fn(A2, A2, lambda x: 1 - x)
        r = graph_rel(swap)
        m = PropRelMor(r, r, swap, swap)
        assert m.is_iso and not m.has_identity_faces
        assert not relevant_iso_check(IsoPolicy.STRICT, m)
        assert not relevant_iso_check(IsoPolicy.REY, m)
        assert relevant_iso_check(IsoPolicy.CREY, m)

    def test_non_iso_fails_everywhere(self):
        squash = fn(A2, A1, lambda _: 0)
        m = PropRelMor(eq_rel(A2), eq_rel(A1), squash, squash)
        for policy in IsoPolicy:
            assert not relevant_iso_check(policy, m)


@settings(max_examples=60, deadline=None)
@given(small_rels(), small_rels())
def test_constructors_stay_propositional_and_face_stable(r, s):
    """Products and exponentials keep one witness per pair, and their
    boundaries are exactly the set-level constructs, as table equality."""
    built = [
        (product1(r, s), product0(r.dom, s.dom), product0(r.cod, s.cod)),
        (expo1(r, s), expo0(r.dom, s.dom), expo0(r.cod, s.cod)),
        (terminal1(), terminal0(), terminal0()),
    ]
    for out, dom, cod in built:
        keys = [k for k, _ in out.entries]
        assert len(keys) == len(set(keys))
        assert out.dom == dom
        assert out.cod == cod


def test_every_square_into_the_terminal_is_unique():
    for r in (eq_rel(A2), graph_rel(fn(A2, A2, lambda x: 1 - x))):
        assert list(all_rel_mors(r, terminal1())) == [bang1(r)]


class TestBuildInstance:
    def test_strict_selects_exactly_identities(self):
        rg, sub = build_instance(IsoPolicy.STRICT, 2)
        assert sub.selected0 == frozenset(
            rg.level0.id_of[o] for o in rg.level0.objects)
        assert sub.selected1 == frozenset(
            rg.level1.id_of[o] for o in rg.level1.objects)

    def test_rey_selection_has_identity_face_images(self, rey_instance):
        rg, sub = rey_instance
        assert all(m.has_identity_faces for m in sub.selected1)
        # extensional relations leave no room between the identities
        # and the identity-faced isos
        assert sub.selected1 == frozenset(
            rg.level1.id_of[o] for o in rg.level1.objects)

    def test_crey_selection_is_inverse_closed(self):
        rg, sub = build_instance(IsoPolicy.CREY, 2)
        for cat, sel in ((rg.level0, sub.selected0),
                         (rg.level1, sub.selected1)):
            for m in sel:
                assert cat.inverses[m] in sel
