import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypsmooth import BoundCertificate, Group, RingElement, SeminormSpec, TensorElement
from hypsmooth.group_ring import RandomCorpus, absolute, mult_tensor, tensor
from hypsmooth.norms import (
    associated_unconditional_upper,
    evaluate,
    example26,
    minimal_norm_bounds,
    projective_norm_l2,
    sobolev_minimal_bounds,
    trace_norm,
    ucnorm_bounds,
)

F = Group.from_tag("free:2")
L1, L2 = SeminormSpec.ell1(), SeminormSpec.sobolev2(0)
TAGS = [L1, SeminormSpec.ell1_lambda(1.5), SeminormSpec.ellinf(), SeminormSpec.sobolev2(1),
        SeminormSpec.parse("weighted_ell1:1.2")]


def u(w, c=1.0):
    return RingElement.monomial(F, F.element(w), c)


def test_eval_examples():
    assert evaluate(SeminormSpec.sobolev2(2), u("ab")) == pytest.approx(9)
    assert evaluate(SeminormSpec.ell1_lambda(2), u("ab")) == pytest.approx(4)
    assert evaluate(L1, u("a", 1 + 1j) - u("b", 2)) == pytest.approx(math.sqrt(2) + 2)


def test_spec_validation():
    with pytest.raises(ValueError):
        SeminormSpec.ell1_lambda(1.0)
    with pytest.raises(ValueError):
        SeminormSpec.parse("l7")
    assert SeminormSpec.parse("l2") == SeminormSpec.sobolev2(0)


def test_associated_upper():
    a = u("a", -2) + u("ab", 1j)
    assert associated_unconditional_upper(a, lambda x: evaluate(L1, x)) == pytest.approx(evaluate(L1, a))
    _, A, _ = example26()
    assert associated_unconditional_upper(A, lambda x: trace_norm(x.to_matrix()[0])) == pytest.approx(math.sqrt(17))


def test_projective_examples():
    G, a, b = example26()
    assert projective_norm_l2(a) == pytest.approx(math.sqrt(17), abs=1e-9)
    assert projective_norm_l2(b) == pytest.approx(4, abs=1e-9)
    assert projective_norm_l2(TensorElement.elementary(G, (), ())) == pytest.approx(1)


def test_uc_example26():
    _, a, _ = example26()
    cert = ucnorm_bounds(a, L2, L2)
    assert cert.verify()
    assert cert.upper <= 4 + 1e-9
    assert cert.lower == pytest.approx(math.sqrt((9 + math.sqrt(17)) / 2), abs=1e-9)
    assert cert.upper < math.sqrt(17)


def test_uc_l1_exact():
    x, y = F.element("a"), F.element("b")
    T = TensorElement(F, {(x, x): 1.0, (x, y): 2.0})
    cert = ucnorm_bounds(T, L1, L1)
    assert cert.lower == pytest.approx(3) and cert.upper == pytest.approx(3)


def test_uc_elementary_cross_property():
    T = tensor(u("a"), u("a") + u("b"))
    cert = ucnorm_bounds(T, L2, L2)
    assert cert.lower == pytest.approx(math.sqrt(2), abs=1e-9)
    assert cert.upper == pytest.approx(math.sqrt(2), abs=1e-9)


def test_certificate_json_roundtrip():
    _, a, _ = example26()
    cert = ucnorm_bounds(a, L2, L2)
    back = BoundCertificate.from_json_obj(a.group, cert.to_json_obj())
    assert back.verify() and back.upper == cert.upper


def test_minimal_examples():
    cert = minimal_norm_bounds(u("aaaa"), 2, L1)
    assert cert.verify()
    assert cert.upper == pytest.approx(2.25)
    assert cert.lower >= 1
    for n in (1, 2, 3):
        c = minimal_norm_bounds(u("e"), n, L1)
        # the scaled ℓ¹ witness ((n+1)/n)·ℓ¹ is admissible, so ‖u_e‖_n = (n+1)/n exactly
        assert c.lower == pytest.approx((n + 1) / n) and c.upper == pytest.approx((n + 1) / n)
    assert minimal_norm_bounds(RingElement.zero(F), 2, L1).upper == 0


def test_sobolev_examples():
    c = sobolev_minimal_bounds(u("aaaa"), 2, 1, L1)
    assert c.verify() and c.upper <= 4.5 + 1e-9
    corpus = RandomCorpus(F, 3, seed=1)
    rng = corpus.rng()
    for _ in range(10):
        a = corpus.element(rng)
        m0, s0 = minimal_norm_bounds(a, 2, L1), sobolev_minimal_bounds(a, 2, 0, L1)
        assert m0.upper == pytest.approx(s0.upper) and m0.lower == pytest.approx(s0.lower)


def test_trivial_lower_is_flagged():
    c = minimal_norm_bounds(u("ab") + u("A", 2), 2, SeminormSpec.ellinf())
    assert c.verify() and c.lower == 0 and c.flags


def test_monotone_in_n():
    corpus = RandomCorpus(F, 4, seed=2)
    rng = corpus.rng()
    for _ in range(15):
        a = corpus.element(rng)
        assert minimal_norm_bounds(a, 3, L1).upper <= minimal_norm_bounds(a, 2, L1).upper + 1e-9


def test_multiplication_contraction():
    corpus = RandomCorpus(F, 2, seed=4, max_terms=3)
    rng = corpus.rng()
    for _ in range(10):
        T = tensor(corpus.element(rng), corpus.element(rng))
        up_T = sobolev_minimal_bounds(T, 2, 1, L1).upper
        assert sobolev_minimal_bounds(mult_tensor(T), 2, 1, L1).upper <= up_T + 1e-9


coeffs = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)
elems = st.sampled_from(F.ball(3).elements)


@given(st.dictionaries(elems, coeffs, max_size=6), st.sampled_from(TAGS),
       st.floats(0, 1), st.floats(0, 2))
def test_unconditional(d, spec, shrink, extra):
    a = RingElement(F, d)
    b = absolute(a).scale(1 + extra) + u("ab", extra)
    small = absolute(a).scale(shrink)
    assert evaluate(spec, small) <= evaluate(spec, b) + 1e-9


@given(st.dictionaries(st.tuples(elems, elems), st.floats(-5, 5), min_size=1, max_size=6),
       st.sampled_from([L1, L2, SeminormSpec.ellinf(), SeminormSpec.ell1_lambda(1.5)]))
def test_uc_certificates_verify(d, spec):
    T = TensorElement(F, d)
    cert = ucnorm_bounds(T, spec, spec)
    assert cert.verify()
    if spec == L1:
        assert cert.lower == pytest.approx(T.l1()) and cert.upper == pytest.approx(T.l1())
