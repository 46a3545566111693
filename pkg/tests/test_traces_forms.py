import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypsmooth import FormElement, Group, RingElement, SeminormSpec
from hypsmooth.group_ring import RandomCorpus, absolute, convolve, project_class
from hypsmooth.traces_forms import (
    ClassFunction,
    form_from_factors,
    form_norm_chain_check,
    is_tempered,
    restriction_probe,
    trace_commutator_gap,
    trace_eval,
)

F = Group.from_tag("free:2")
Z = Group.from_tag("free:1")


def u(w, c=1.0, G=F):
    return RingElement.monomial(G, G.element(w), c)


def test_trace_examples():
    ind_b = ClassFunction.indicator(F, "b")
    assert trace_eval(ind_b, u("abA", 2) + u("a", 3)) == pytest.approx(2)
    tau = ClassFunction.finite(F, {"e": 0.5 - 1j, "ab": 2})
    assert trace_eval(tau, u("e")) == pytest.approx(0.5 - 1j)
    assert tau("ba") == 2


def test_tempered_finite():
    rep = is_tempered(ClassFunction.indicator(F, "b"), 3, 3)
    assert rep.tempered and not rep.empirical


def test_constant_on_free_group_diverges():
    rep = is_tempered(ClassFunction.parametric(F, "constant"), 3, 6)
    assert rep.empirical and rep.tempered is None
    assert set(rep.verdicts.values()) == {"divergent-looking"}
    counts = rep.shell_classes
    assert counts[:4] == [1, 4, 8, 12]


@pytest.mark.parametrize("p,k,verdict", [(0, 0, "divergent-looking"), (0, 1, "convergent-looking"),
                                         (1, 1, "divergent-looking"), (1, 2, "convergent-looking")])
def test_power_length_on_integers(p, k, verdict):
    # ℤ has two classes per length, so Σ (1+l)^(2p-2k) converges iff 2k-2p > 1
    rep = is_tempered(ClassFunction.parametric(Z, "power_length", p), 3, 60)
    assert rep.verdicts[k] == verdict


def test_restriction_examples():
    spec = SeminormSpec.ell1()
    off = restriction_probe("b", 2, spec, 6, F, radii=(2,))
    assert off.max_ratio <= 1
    from hypsmooth.traces_forms import _ratio

    assert _ratio(u("a"), F.element("b"), 2, spec) == 0
    r = _ratio(u("abA"), F.element("b"), 2, spec)
    assert 0 < r <= 1


def test_restriction_bounded_table():
    rep = restriction_probe("b", 2, SeminormSpec.ell1(), 60, F, radii=(2, 3, 4, 5))
    assert not rep.growth_flag and rep.max_ratio <= 1 + 1e-9


def test_chain_examples():
    lam = 1.5
    rep = form_norm_chain_check([u("a"), u("b")], "ab", lam)
    assert rep.lhs == pytest.approx(lam**2) and rep.rhs == pytest.approx(lam**2) and rep.holds
    rep = form_norm_chain_check([u("a"), u("a")], "b", lam)
    assert rep.lhs == 0 and rep.holds
    with pytest.raises(ValueError):
        form_norm_chain_check([u("a"), u("b")], "ab", 1.0)


def test_chain_random_degree2():
    corpus = RandomCorpus(F, 3, seed=11, max_terms=3)
    rng = corpus.rng()
    for _ in range(30):
        factors = [corpus.element(rng) for _ in range(3)]
        x = next(iter(factors[0].keys()))
        assert form_norm_chain_check(factors, x, 1.5).holds


def test_form_from_factors():
    w = form_from_factors([u("a", 2), u("b") + u("B", -1)])
    assert w == FormElement(F, 1, {(F.element("a"), F.element("b")): 2, (F.element("a"), F.element("B")): -2})


coeffs = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
ring = st.dictionaries(st.sampled_from(F.ball(3).elements), coeffs, max_size=4).map(lambda d: RingElement(F, d))
TAUS = [ClassFunction.indicator(F, "b"), ClassFunction.indicator(F, "e"),
        ClassFunction.finite(F, {"a": 1.5, "ab": -2j, "aab": 0.25})]


@given(ring, ring, st.sampled_from(TAUS))
def test_trace_property(a, b, tau):
    assert trace_commutator_gap(tau, a, b) <= 1e-9 * max(1.0, a.l1() * b.l1())


@given(ring, st.sampled_from(F.ball(3).elements))
def test_projection_contractive_idempotent(a, x):
    p = project_class(a, x)
    assert p.l1() <= a.l1() + 1e-12
    assert project_class(p, x) == p
    assert project_class(absolute(a), x) == absolute(p)
