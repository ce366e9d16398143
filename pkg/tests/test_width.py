from collections import Counter
from itertools import combinations

import pytest

from cdmgraph import width as wd
from cdmgraph.errors import ContractError
from cdmgraph.system import generate_subsystem

from conftest import system_of


def test_gf2_rank():
    assert wd.gf2_rank([]) == 0
    assert wd.gf2_rank([0b01, 0b10, 0b11]) == 2
    assert wd.gf2_rank([0b101, 0b011, 0b110, 0b111]) == 3


def test_f2_vectors():
    u = wd.F2Vector.unit("abc", "b")
    v = wd.F2Vector.unit("abc", "c")
    assert (u + v).support() == ("b", "c")
    assert (u + u).is_zero()
    assert (u + v).as_int() == 0b110
    with pytest.raises(ContractError):
        u + wd.F2Vector.unit("ab", "a")


@pytest.mark.parametrize("text, expected", [
    ("a", {1: 1}),
    ("a b", {1: 2, 2: 1}),
    ("a-b +1", {1: 2, 2: 1, "inf": 4}),
    ("a +2", {1: 1, "inf": 6}),
])
def test_width_distribution(text, expected):
    _, _, S = system_of(text)
    got = Counter()
    for i in wd.c2_classes(S):
        rep = wd.vertex_width(S, S.identity_element(i))
        got["inf" if not rep.finite else rep.width] += 1
    assert dict(got) == expected


def test_dual_vectors_are_distinct_and_nonzero():
    _, _, S = system_of("a b +1")
    vecs = [wd.dual_vector(S, S.identity_element(i)) for i in wd.c2_classes(S)]
    assert len({v.as_int() for v in vecs}) == len(vecs) == 7
    assert not any(v.is_zero() for v in vecs)


def test_width_needs_c2_class(w_sys):
    _, _, S = w_sys
    with pytest.raises(ContractError):
        wd.vertex_width(S, S.identity_element(S.whole_id))


def test_independence_routes_agree():
    _, _, S = system_of("a b +1")
    c2 = wd.c2_classes(S)
    for k in range(1, 4):
        for combo in combinations(c2, k):
            ids = [S.identity_element(i) for i in combo]
            wd.independent(S, ids)
    assert not wd.independent(S, [S.identity_element(c2[0])] * 2)


def test_parity_element():
    _, _, S = system_of("a b")
    i = S.class_id(wd.parity_element(S, ["a", "b"]))
    rep = wd.vertex_width(S, S.identity_element(i))
    assert rep.width == 2 and rep.witnesses == ("a", "b")
    with pytest.raises(ContractError):
        wd.parity_mask(S, [])
    with pytest.raises(ContractError):
        wd.parity_mask(S, ["z"])


def test_gcl_is_closed_and_idempotent():
    _, _, S = system_of("a-b +1")
    for i in range(S.n_classes):
        X = wd.gcl(S, classes=[i])
        assert wd.gcl(S, classes=X.members) == X
        assert generate_subsystem(S, classes=[i]) <= X


def test_gcl_adds_edge_class(w_sys):
    _, _, S = w_sys
    dp = S.ids_with_tag("Dp")
    w = S.ids_with_tag("W")
    X = wd.gcl(S, classes=dp)
    assert set(w) <= X.members


def test_literal_exchange_has_a_counterexample():
    _, _, S = system_of("a b")
    cx = wd.exchange_counterexample(S)
    assert cx is not None
    names = [wd.width_linear(S, S.identity_element(g)).witnesses for g in cx["gammas"]]
    assert sorted(names) == [("a",), ("b",)]
    assert cx["alpha"] == cx["gammas"][0] and cx["i"] == 1


@pytest.mark.parametrize("text", ["a", "a b", "a-b +1", "a b +1"])
def test_steinitz_exchange_holds(text):
    _, _, S = system_of(text)
    assert wd.exchange_counterexample(S, steinitz=True) is None
