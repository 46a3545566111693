"""Desk-scale acceptance suite; each test is tagged with the criterion it covers."""
import itertools
import math
import time

import numpy as np
import pytest

from hypsmooth import FormElement, Group, RingElement, SeminormSpec, TensorElement
from hypsmooth.conjugacy import conjugacy_engine, free_cyclic_oracle
from hypsmooth.group_ring import (
    RandomCorpus,
    convolve,
    form_classes,
    form_project,
    hochschild_b,
    mult_tensor,
    tensor,
)
from hypsmooth.norms import (
    example26,
    minimal_norm_bounds,
    projective_norm_l2,
    sobolev_minimal_bounds,
    ucnorm_bounds,
)
from hypsmooth.quasiderivation import (
    SpecialMapTable,
    check_special,
    exhaustive_leibniz,
    neumann_series_probe,
    quasi_leibniz_norm_check,
)
from hypsmooth.traces_forms import ClassFunction, form_norm_chain_check, trace_eval

criterion = pytest.mark.criterion


@pytest.fixture(scope="module")
def F():
    return Group.from_tag("free:2")


@pytest.fixture(scope="module")
def S():
    return Group.from_tag("surface:2")


@pytest.fixture(scope="module")
def phi_corpus(F):
    """Every element of length <= 8 with its Φ trace, computed once for criteria 4 and 5."""
    E = conjugacy_engine(F)
    t0 = time.perf_counter()
    out = [(g, *E.big_phi(g)) for g in F.ball(8).elements]
    return out, time.perf_counter() - t0


@criterion(1, "2x2 matrices: projective norms and the uc-norm gap")
def test_example26():
    t0 = time.perf_counter()
    _, a, b = example26()
    assert projective_norm_l2(a) == pytest.approx(math.sqrt(17), abs=1e-9)
    assert projective_norm_l2(b) == pytest.approx(4, abs=1e-9)
    l2 = SeminormSpec.sobolev2(0)
    cert = ucnorm_bounds(a, l2, l2)
    assert cert.verify()
    assert cert.upper <= 4 + 1e-9 and cert.lower >= 2.56
    assert cert.upper < math.sqrt(17)
    assert time.perf_counter() - t0 < 1


@criterion(2, "exact quasi-Leibniz domination, free ball(4) and surface ball(3)")
def test_leibniz_domination(F, S):
    t0 = time.perf_counter()
    pairs, failures = exhaustive_leibniz(F, 4, 1)
    assert pairs == len(F.ball(4)) ** 2 and not failures
    delta = S.estimate_delta(3)
    pairs, failures = exhaustive_leibniz(S, 3, delta)
    assert pairs == len(S.ball(3)) ** 2 and not failures
    assert time.perf_counter() - t0 < 300


@criterion(3, "norm quasi-Leibniz with C0 for l1 and l1_lambda")
def test_quasi_leibniz_norms(F):
    t0 = time.perf_counter()
    specs = [SeminormSpec.ell1()] + [SeminormSpec.ell1_lambda(lam) for lam in (1.1, 1.5, 2.0)]
    for a, b in RandomCorpus(F, 4, seed=2024).pairs(1000):
        for spec in specs:
            rep = quasi_leibniz_norm_check(a, b, spec, 1, tol=1e-9)
            assert rep.verdict == "verified", (spec, rep)
    assert time.perf_counter() - t0 < 60


@criterion(4, "free-group Φ equals the cyclic-reduction oracle for l(g) <= 8")
def test_phi_oracle(F, phi_corpus):
    rows, elapsed = phi_corpus
    assert len(rows) == len(F.ball(8))
    for g, rep, tr in rows:
        assert rep.representative == free_cyclic_oracle(F, g)
        assert tr.value == rep.representative
        assert F.conjugate(g, tr.accumulator) == tr.value
    assert elapsed < 120


@criterion(5, "Φ convergence within a log envelope")
def test_phi_convergence(F, phi_corpus):
    rows, _ = phi_corpus
    assert all(tr.iterations <= 64 for _, _, tr in rows)
    prof = conjugacy_engine(F).convergence_profile(elements=[g for g, _, _ in rows])
    print(f"fitted C11={prof.c11:.3f} C12={prof.c12:.3f} max iterations={prof.max_iterations}")
    assert prof.c11 <= 4 and prof.c12 <= 6


@criterion(6, "ψ is (2δ+1)-special")
def test_psi_special(F, S):
    t0 = time.perf_counter()
    assert check_special(conjugacy_engine(F).psi_table(6))
    assert check_special(conjugacy_engine(S).psi_table(3))
    assert time.perf_counter() - t0 < 120


@criterion(7, "Gromov probe: empirical C10 <= 1 on free ball(5)")
def test_gromov(F):
    t0 = time.perf_counter()
    rep = conjugacy_engine(F).gromov_probe(5)
    print(f"empirical C10={rep.c10:.3f} over {rep.pairs} pairs")
    assert rep.pairs > 0 and rep.c10 <= 1
    assert time.perf_counter() - t0 < 180


@criterion(8, "Neumann series increments decay at rate <= C0·‖a‖")
def test_neumann(F):
    t0 = time.perf_counter()
    a = RingElement(F, {F.element(w): 1 / 30 for w in ("a", "b", "A", "B")})
    rep = neumann_series_probe(a, SeminormSpec.ell1(), 1, terms=10)
    assert rep.c0 == 5
    for r in rep.ratios[2:]:
        assert r <= rep.bound_ratio + 1e-6
    assert time.perf_counter() - t0 < 10


@criterion(9, "1000 random certificates re-verify their witnesses")
def test_certificates(F):
    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    corpus = RandomCorpus(F, 3, seed=99, max_terms=4)
    specs = [SeminormSpec.ell1(), SeminormSpec.sobolev2(0), SeminormSpec.ell1_lambda(1.5),
             SeminormSpec.ellinf(), SeminormSpec.sobolev2(1)]
    ring_specs = [SeminormSpec.ell1(), SeminormSpec.ell1_lambda(1.5), SeminormSpec.ellinf()]
    for i in range(1000):
        kind = i % 3
        if kind == 0:
            T = tensor(corpus.element(rng), corpus.element(rng))
            T = T + TensorElement(F, {(corpus.element(rng).support()[0], ()): rng.normal()})
            spec = specs[i % len(specs)]
            cert = ucnorm_bounds(T, spec, spec)
        elif kind == 1:
            cert = minimal_norm_bounds(corpus.element(rng), int(rng.integers(1, 4)), ring_specs[i % 3])
        else:
            x = corpus.element(rng) if i % 2 else tensor(corpus.element(rng, terms=2), corpus.element(rng, terms=2))
            cert = sobolev_minimal_bounds(x, int(rng.integers(1, 4)), float(rng.integers(0, 3)), ring_specs[i % 3])
        assert cert.verify(), cert.problems()
        assert cert.lower <= cert.upper + 1e-9
    assert time.perf_counter() - t0 < 120


@criterion(10, "trace dual-path agreement and τ'(αβ) = τ'(βα)")
def test_traces(F):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    elems = F.ball(4).elements
    taus = [
        ClassFunction.indicator(F, "b"),
        ClassFunction.indicator(F, "e"),
        ClassFunction.finite(F, {elems[i]: complex(rng.normal(), rng.normal())
                                 for i in rng.integers(0, len(elems), size=12)}),
    ]
    for a, b in RandomCorpus(F, 4, seed=7).pairs(500):
        for tau in taus:
            ab, ba = trace_eval(tau, convolve(a, b)), trace_eval(tau, convolve(b, a))
            assert abs(ab - ba) <= 1e-9 * max(1.0, a.l1() * b.l1())
    assert time.perf_counter() - t0 < 60


@criterion(11, "homogeneous decomposition: b commutes with class projection; form chain inequality")
def test_forms(F):
    t0 = time.perf_counter()
    B2 = F.ball(2).elements
    for degree in (1, 2):
        for key in itertools.product(B2, repeat=degree + 1):
            w = FormElement(F, degree, {key: 1.0})
            bw = hochschild_b(w)
            for x in set(form_classes(w)) | set(form_classes(bw)) | {()}:
                assert hochschild_b(form_project(w, x)) == form_project(bw, x)
    B3 = F.ball(3).elements
    u = lambda g: RingElement.monomial(F, g)  # noqa: E731
    probe_x = F.element("b")
    for g, h in itertools.product(B3, repeat=2):
        for x in (F.multiply(g, h), probe_x):
            rep = form_norm_chain_check([u(g), u(h)], x, 1.5, tol=1e-9)
            assert rep.holds and rep.lhs <= rep.rhs + 1e-9
    assert time.perf_counter() - t0 < 120
