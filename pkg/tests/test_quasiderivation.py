import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypsmooth import Group, RingElement, SeminormSpec, TensorElement
from hypsmooth.group_ring import RandomCorpus, absolute, convolve, mult_tensor, radial_leq
from hypsmooth.quasiderivation import (
    QuasiDerivation,
    SpecialMapTable,
    c0_constant,
    check_special,
    compare_generating_sets,
    delta_map,
    exhaustive_leibniz,
    graph_norm,
    graph_norm_bounds,
    iterate_graph_norm,
    leibniz_domination_check,
    neumann_series_probe,
    quasi_leibniz_norm_check,
    special_growth_probe,
    special_violations,
)

F = Group.from_tag("free:2")
L1 = SeminormSpec.ell1()


def u(w, c=1.0, G=F):
    return RingElement.monomial(G, G.element(w), c)


def T(g, h, c=1.0):
    return TensorElement.elementary(F, F.element(g), F.element(h), c)


def test_delta_examples():
    assert delta_map(u("e")) == T("e", "e")
    assert delta_map(u("ab")) == T("e", "ab") + T("a", "b") + T("ab", "e")


@pytest.mark.parametrize("tag,r", [("free:2", 5), ("surface:2", 3)])
def test_delta_summand_structure(tag, r):
    G = Group.from_tag(tag)
    for g in G.ball(r).elements:
        D = delta_map(u(g, G=G))
        assert len(D) == len(g) + 1
        for (p, q), c in D.items():
            assert c == 1 and G.multiply(p, q) == g and len(p) + len(q) == len(g)
        assert mult_tensor(D) == u(g, len(g) + 1, G=G)


def test_delta_rejects_zero():
    with pytest.raises(ValueError):
        QuasiDerivation(F, 0)
    with pytest.raises(ValueError):
        c0_constant(L1, 0, F)


def test_leibniz_unit_pair():
    assert leibniz_domination_check(u("e"), u("e"), 1)


def test_leibniz_exhaustive_free():
    pairs, failures = exhaustive_leibniz(F, 3, 1)
    assert pairs == len(F.ball(3)) ** 2 and not failures


def test_c0_examples():
    assert c0_constant(L1, 1, F) == 5
    lam = 1.7
    assert c0_constant(SeminormSpec.ell1_lambda(lam), 1, F) == pytest.approx(1 + 4 * lam**2)


def test_quasi_leibniz_unit_and_random():
    assert quasi_leibniz_norm_check(u("e"), u("e"), L1, 1).verdict == "verified"
    corpus = RandomCorpus(F, 4, seed=5)
    for a, b in corpus.pairs(60):
        for spec in (L1, SeminormSpec.ell1_lambda(1.25)):
            assert quasi_leibniz_norm_check(a, b, spec, 1).verdict == "verified"


def test_quasi_leibniz_non_l1_is_not_verified():
    rep = quasi_leibniz_norm_check(u("ab"), u("b"), SeminormSpec.sobolev2(0), 1)
    assert rep.verdict in ("consistent", "inconclusive")


def test_graph_norm_examples():
    assert graph_norm(u("ab"), L1, 1) == pytest.approx(8)
    assert graph_norm(u("e"), L1, 1) == pytest.approx(6)
    lo, hi = graph_norm_bounds(u("ab"), SeminormSpec.sobolev2(0), 1)
    assert lo <= hi
    assert iterate_graph_norm(u("ab"), L1, 1, 1) == pytest.approx(8)
    assert iterate_graph_norm(u("ab"), L1, 1, 0) == pytest.approx(1)


def test_graph_norm_submultiplicative():
    corpus = RandomCorpus(F, 3, seed=8)
    for a, b in corpus.pairs(100):
        assert graph_norm(convolve(a, b), L1, 1) <= graph_norm(a, L1, 1) * graph_norm(b, L1, 1) + 1e-9


def test_neumann_examples():
    a = u("a", 1 / 20) + u("b", 1 / 20)
    rep = neumann_series_probe(a, L1, 1, terms=8)
    assert all(r <= 0.5 + 1e-9 for r in rep.ratios)
    zero = neumann_series_probe(RingElement.zero(F), L1, 1, terms=3)
    assert zero.partial_sums == [zero.partial_sums[0]] * 4
    with pytest.raises(ValueError):
        neumann_series_probe(u("a", 0.3), L1, 1)


def test_compare_gensets():
    rep = compare_generating_sets(F, {"c": "ab", "C": "BA"}, u("ab"), {"c": "C"})
    assert rep.rho == 0
    assert compare_generating_sets(F, {}, u("abA") + u("bb"), {}).rho == 0
    a = RingElement(F, {g: 1.0 for g in F.ball(4).elements})
    rep = compare_generating_sets(F, {"c": "ab", "C": "BA"}, a, {"c": "C"})
    assert rep.rho is not None and rep.rho <= 2


def test_special_examples():
    assert check_special(SpecialMapTable.from_delta(F, 4, R=0))
    assert check_special(SpecialMapTable.identity_like(F, 3))
    tab = {g: TensorElement.elementary(F, (), g, 2.0) for g in F.ball(2).elements}
    bad = SpecialMapTable(F, tab, 0)
    assert {why for _, why in special_violations(bad)} == {"ii"}


def test_growth_probe():
    rep = special_growth_probe(SpecialMapTable.from_delta(F, 2), 2, 1, 6)
    assert rep.degree_l1 <= 1 + 1e-9 and rep.polynomial
    ident = special_growth_probe(SpecialMapTable.identity_like(F, 2), 2, 1, 5)
    assert abs(ident.degree_l1) < 1e-9


coeffs = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
ring = st.dictionaries(st.sampled_from(F.ball(3).elements), coeffs, max_size=5).map(lambda d: RingElement(F, d))


@given(ring)
def test_delta_radial(a):
    assert radial_leq(absolute(delta_map(a)), delta_map(absolute(a)), tol=1e-9)


@given(ring, ring)
def test_leibniz_domination_random(a, b):
    assert leibniz_domination_check(a, b, 1)


@given(st.sampled_from(F.ball(3).elements))
def test_delta_monomial_radial_equality(g):
    assert absolute(delta_map(u(g, -2j))) == delta_map(u(g, 2))
