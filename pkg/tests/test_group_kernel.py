import itertools

import pytest
from hypothesis import given, strategies as st

from hypsmooth import CapExceeded, Group, GroupError, UnknownLetter
from hypsmooth.group_kernel import DehnPropertyError, GroupSpec, parse_group_spec


def test_free_reduction(F2):
    assert F2.normalize(F2.parse("aA")) == ()
    assert F2.fmt(F2.normalize(F2.parse("abB"))) == "a"
    assert F2.parse("aa^-1") == F2.parse("aA")


def test_surface_dehn_oracle(S2):
    assert S2.fmt(S2.element("abABc")) == "dcD"
    half = S2.multiply(S2.element("abAB"), S2.element("cdCD"))
    assert half == ()


def test_multiply_invert_distance(F2):
    P = F2.element
    assert F2.multiply(P("a"), P("A")) == ()
    assert F2.fmt(F2.multiply(P("ab"), P("Ba"))) == "aa"
    assert F2.fmt(F2.invert(P("ab"))) == "BA"
    assert F2.distance((), P("ab")) == 2
    assert F2.distance(P("a"), P("b")) == 2


@pytest.mark.parametrize("tag,r,size", [("free:2", 1, 5), ("free:2", 2, 17), ("free:1", 3, 7)])
def test_ball_sizes(tag, r, size):
    assert len(Group.from_tag(tag).ball(r)) == size


def test_surface_growth_series(S2):
    assert S2.ball(3).sphere_sizes() == [1, 8, 56, 392]


def test_ball_closed_under_inversion(S2):
    B = S2.ball(2)
    assert all(S2.invert(g) in B for g in B.elements)


def test_geodesic_prefix(F2):
    g = F2.element("ab")
    assert [F2.fmt(F2.geodesic_prefix(g, i)) for i in range(3)] == ["e", "a", "ab"]
    with pytest.raises(IndexError):
        F2.geodesic_prefix(g, 3)


def test_unknown_letter(F2):
    with pytest.raises(UnknownLetter):
        F2.parse("az")


def test_cap(F2):
    small = Group.from_tag("free:2", max_elements=50)
    with pytest.raises(CapExceeded):
        small.ball(4)


def test_delta_free():
    assert Group.from_tag("free:2").estimate_delta(5) == 1
    assert Group.from_tag("free:1").estimate_delta(5) == 1


def test_delta_surface_r3(S2):
    assert S2.estimate_delta(3) == 2


@pytest.mark.slow
def test_delta_surface_stable(S2):
    assert S2.estimate_delta(4) == S2.estimate_delta(3)


def test_normalize_idempotent_exhaustive(F2):
    for n in range(7):
        for w in itertools.product(range(4), repeat=n):
            g = F2.normalize(w)
            assert F2.normalize(g) == g
            assert len(g) <= n


def test_canonical_is_minimal(S2):
    B = S2.ball(3)
    for r in range(4):
        for g in B.sphere(r):
            assert len(g) == r


def test_group_axioms_ball3(F2):
    B = F2.ball(2).elements
    for x, y, z in itertools.product(B, repeat=3):
        assert F2.multiply(F2.multiply(x, y), z) == F2.multiply(x, F2.multiply(y, z))
    for x in B:
        assert F2.multiply(x, F2.invert(x)) == ()
        assert F2.multiply((), x) == x


def test_triangle_inequality(S2):
    B = list(S2.ball(1).elements) + S2.ball(2).sphere(2)[:20]
    for x, y, z in itertools.product(B, repeat=3):
        assert S2.distance(x, z) <= S2.distance(x, y) + S2.distance(y, z)


surface_words = st.lists(st.integers(0, 7), max_size=10).map(tuple)


@given(surface_words)
def test_surface_normalize_idempotent(w):
    S = _surface()
    g = S.normalize(w)
    assert S.normalize(g) == g
    assert S.multiply(g, S.invert(g)) == ()


@given(surface_words, surface_words)
def test_surface_distance_symmetric(u, v):
    S = _surface()
    g, h = S.normalize(u), S.normalize(v)
    assert S.distance(g, h) == S.distance(h, g)


_S = []


def _surface():
    if not _S:
        _S.append(Group.from_tag("surface:2"))
    return _S[0]


def test_spec_file_roundtrip(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("kind = dehn\ngenerators = a b c d\ninverses = A B C D\nrelators = abABcdCD\n")
    G = Group.from_tag(str(p))
    assert G.fmt(G.element("abABc")) == "dcD"


def test_spec_errors():
    with pytest.raises(GroupError):
        GroupSpec.from_tag("torus:1")
    with pytest.raises(GroupError):
        parse_group_spec("kind = weird\n")


def test_dehn_spot_check_refuses_bad_presentation():
    # Z^2 is not hyperbolic: a²b²a⁻²b⁻² = e has no long relator piece
    text = "kind = dehn\ngenerators = a b\ninverses = A B\nrelators = abAB\n"
    with pytest.raises(DehnPropertyError):
        Group(parse_group_spec(text), check_dehn_radius=8)
