import numpy as np
import pytest
from hypothesis import given, strategies as st

from cdmgraph.core import (
    DpElement, Params, StructuredElement, StructuredGroup, WElement, chi, coordinate_change, decode,
    dp_elements, encode, from_product_form, identity, inject, inv, is_prime, lam, mul, order, project,
    to_product_form, w_elements, xi,
)
from cdmgraph.errors import LabelError, ParamError

EDGE = Params(3, 5, ("a", "b"), (("a", "b"),))
PATH = Params(3, 5, ("a", "b", "c"), (("a", "b"), ("b", "c")), ("i0",))


def elements(P):
    return st.integers(0, P.order - 1).map(lambda e: decode(P, e))


def test_chi_and_primes():
    assert chi(0) == 1 and chi(1) == -1
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


@pytest.mark.parametrize("kw", [dict(p=2), dict(p=4), dict(q=3), dict(p=5, q=5)])
def test_params_reject_bad_primes(kw):
    with pytest.raises(ParamError):
        Params(**{"p": 3, "q": 5, **kw})


def test_params_reject_bad_edges():
    with pytest.raises(ParamError):
        Params(3, 5, ("a",), (("a", "a"),))
    with pytest.raises((ParamError, LabelError)):
        Params(3, 5, ("a",), (("a", "z"),))


def test_params_canonical_order():
    P = Params(3, 5, ("b", "a"), (("b", "a"),))
    assert P.vertices == ("a", "b") and P.edges == (("a", "b"),)
    assert P.order == 180
    assert P.radices == (5, 3, 3, 2, 2)


def test_dp_laws():
    p = 3
    g, b = DpElement.gamma(p), DpElement.beta(p)
    assert (b * g * b) == g.inverse()
    assert len(dp_elements(p)) == 6
    assert all(e.index == k for k, e in enumerate(dp_elements(p)))
    assert [e.tau for e in dp_elements(p)] == [0, 1] * 3


def test_w_laws():
    ws = w_elements(3, 5)
    assert len(ws) == 180
    d = WElement.delta(3, 5)
    flip = WElement(5, 0, DpElement.beta(3), DpElement.identity(3))
    assert flip * d * flip.inverse() == d.inverse()
    both = WElement(5, 0, DpElement.beta(3), DpElement.beta(3))
    assert both * d * both.inverse() == d
    assert lam(d) == (DpElement.identity(3), DpElement.identity(3))


@given(elements(PATH), elements(PATH), elements(PATH))
def test_structured_group_axioms(a, b, c):
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, inv(a)) == identity(PATH) == mul(inv(a), a)
    assert mul(identity(PATH), a) == a


@given(st.integers(0, PATH.order - 1))
def test_encode_decode_round_trip(e):
    assert encode(decode(PATH, e)) == e


@given(elements(PATH), elements(PATH))
def test_projections_are_homomorphisms(a, b):
    for target in PATH.vertices + PATH.edges:
        assert project(mul(a, b), target) == project(a, target) * project(b, target)
    assert xi(mul(a, b)) == tuple(x ^ y for x, y in zip(xi(a), xi(b)))


@given(elements(PATH), elements(PATH))
def test_product_form_is_faithful_and_multiplicative(a, b):
    fa, fb, fab = to_product_form(a), to_product_form(b), to_product_form(mul(a, b))
    assert from_product_form(PATH, *fa) == a
    for v in PATH.vertices:
        assert fab[0][v] == fa[0][v] * fb[0][v]
    for r in PATH.edges:
        assert fab[1][r] == fa[1][r] * fb[1][r]


def test_product_form_rejects_incompatible_tuple():
    a, b, c = to_product_form(identity(EDGE))
    a["a"] = DpElement.beta(3)
    with pytest.raises(ParamError):
        from_product_form(EDGE, a, b, c)


def test_reversed_edge_swaps_slots():
    g = inject(DpElement.beta(3), "a", EDGE)
    w = project(g, ("a", "b"))
    r = project(g, ("b", "a"))
    assert (w.b, w.c) == (r.c, r.b)


def test_inject_extra_and_orders():
    g = inject(1, "i0", PATH)
    assert xi(g)[PATH.x_pos["i0"]] == 1 and order(g) == 2
    assert order(inject(WElement.delta(3, 5), ("a", "b"), PATH)) == 5
    assert order(inject(DpElement.gamma(3), "b", PATH)) == 3


def test_table_matches_element_law():
    G = StructuredGroup(EDGE)
    T = G.cayley_table()
    rng = np.random.default_rng(1)
    for a, b in rng.integers(0, G.order, (300, 2)):
        assert T[a, b] == encode(mul(decode(EDGE, a), decode(EDGE, b)))


def test_generators_generate():
    G = StructuredGroup(Params(3, 5, ("a", "b", "c"), (("a", "b"),), ("i0",)))
    F = G.as_finite()
    assert F.generated(G.generators()).all()


def test_coordinate_change_is_automorphism():
    P = Params(3, 5, ("a", "b"), (("a", "b"),))
    perm = coordinate_change(P, {"a": "b", "b": "a"})
    T = StructuredGroup(P).cayley_table()
    assert sorted(perm.tolist()) == list(range(P.order))
    assert (perm[T] == T[np.ix_(perm, perm)]).all()
    g = inject(DpElement.gamma(3), "a", P)
    assert decode(P, perm[encode(g)]) == inject(DpElement.gamma(3), "b", P)
    with pytest.raises(ParamError):
        coordinate_change(PATH, {"a": "b", "b": "a", "c": "c"})


def test_structured_element_validates():
    with pytest.raises(ParamError):
        StructuredElement(EDGE, [0], [0], [0, 0])
