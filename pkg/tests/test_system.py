import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cdmgraph import finite
from cdmgraph import system as sysm
from cdmgraph.errors import ContractError
from cdmgraph.system import SystemElement


def test_d3_system_counts(d3):
    _, D, S = d3
    assert S.n_classes == 3
    assert len(S) == 9
    assert sorted(S.index.tolist()) == [1, 2, 6]
    assert len(S.sort_extent(2)) == 3
    assert len(S.sort_extent(1)) == 1


def test_top_and_bottom(w_sys):
    _, F, S = w_sys
    top = S.identity_element(S.whole_id)
    bottom = S.identity_element(S.trivial_id)
    for a in range(len(S)):
        assert S.leq(a, top)
        assert S.leq(bottom, a)
    assert S.index[S.trivial_id] == F.n


def test_c_is_a_function_upwards(w_sys):
    _, F, S = w_sys
    for a in S.elements_of_class(S.trivial_id)[:20]:
        for j in range(S.n_classes):
            hits = [b for b in S.elements_of_class(j) if S.c(int(a), int(b))]
            assert len(hits) == 1


def test_p_matches_group_law(d3):
    _, D, S = d3
    for i in range(S.n_classes):
        els = S.elements_of_class(i)
        for a in els:
            for b in els:
                ga, gb = S.element(a).rep, S.element(b).rep
                c = S.coset(D.mul(ga, gb), i)
                assert S.p(int(a), int(b), c)
                assert sum(S.p(int(a), int(b), int(x)) for x in els) == 1
    cross = S.elements_of_class(0)[0], S.elements_of_class(1)[0]
    assert not S.p(int(cross[0]), int(cross[0]), int(cross[1]))


def test_addressing_and_errors(d3):
    _, D, S = d3
    for k in range(len(S)):
        assert S.gid(S.element(k)) == k
    with pytest.raises(ContractError):
        S.gid(len(S))
    with pytest.raises(ContractError):
        S.gid(SystemElement(S.trivial_id + 5, 0))
    with pytest.raises(ContractError):
        sysm.holds(S, "between", 0, 1)
    assert sysm.holds(S, "in", 0, 6)
    assert sysm.holds(S, "leq", 0, 0)


def test_equivalence_is_same_class(w_sys):
    _, F, S = w_sys
    for a in range(0, len(S), 17):
        for b in range(0, len(S), 13):
            assert S.equivalent(a, b) == (S.class_id(a) == S.class_id(b))


def test_class_lattice(w_sys):
    _, F, S = w_sys
    for i in range(S.n_classes):
        for j in range(S.n_classes):
            a, b = S.identity_element(i), S.identity_element(j)
            m = S.class_id(sysm.class_lattice(S, a, b, "meet"))
            J = S.class_id(sysm.class_lattice(S, a, b, "join"))
            assert S.incl[m, i] and S.incl[m, j] and S.incl[i, J] and S.incl[j, J]
    with pytest.raises(ContractError):
        sysm.class_lattice(S, 0, 0, "both")


def test_subsystems(w_sys):
    _, F, S = w_sys
    assert sysm.generate_subsystem(S).sorted() == [S.whole_id]
    everything = sysm.generate_subsystem(S, classes=[S.trivial_id])
    assert len(everything) == S.n_classes
    for i in range(S.n_classes):
        X = sysm.generate_subsystem(S, classes=[i])
        assert sysm.is_subsystem(S, X)
        assert X.sorted() == np.flatnonzero(S.incl[i]).tolist()
    assert not sysm.is_subsystem(S, sysm.Subsystem(frozenset([S.trivial_id])))


def test_minus_plus(pair_c2, w_sys):
    _, G, S = pair_c2
    lo, hi = sysm.minus_plus(S)
    assert lo <= hi and len(lo) < len(hi)
    assert hi.sorted() == list(range(S.n_classes))
    _, F, T = w_sys
    lo, hi = sysm.minus_plus(T)
    assert lo == hi


@pytest.fixture(scope="module")
def pair_subs(pair_c2):
    S = pair_c2[2]
    return S, [sysm.generate_subsystem(S, classes=[i]) for i in range(S.n_classes)]


@given(st.data())
def test_subsystem_modular_law(pair_subs, data):
    S, subs = pair_subs
    X, Y, Z = (data.draw(st.sampled_from(subs)) for _ in range(3))
    if not X <= Y:
        X, Y = Y, X
    if not X <= Y:
        X = sysm.subsystem_meet(S, X, Y)
    lhs = sysm.subsystem_join(S, X, sysm.subsystem_meet(S, Y, Z))
    rhs = sysm.subsystem_meet(S, Y, sysm.subsystem_join(S, X, Z))
    assert lhs == rhs


@given(st.data())
def test_class_modular_law(pair_c2, data):
    S = pair_c2[2]
    ids = st.integers(0, S.n_classes - 1)
    a, b, e = data.draw(ids), data.draw(ids), data.draw(ids)
    if not S.incl[a, b]:
        a = S.meet_id(a, b)
    assert S.join_id(a, S.meet_id(b, e)) == S.meet_id(b, S.join_id(a, e))


def test_inverse_limit_recovers_the_group(d3):
    _, D, S = d3
    L = sysm.inverse_limit(S)
    assert L.check_axioms()[0]
    assert finite.find_isomorphism(L, D) is not None


def test_build_system_rejects_foreign_family(d3):
    _, D, S = d3
    other = sysm.build_system(finite.dihedral(3))
    with pytest.raises(ContractError):
        sysm.build_system(D, other.subgroups)


def test_export(w_sys):
    _, F, S = w_sys
    data = sysm.export_json(S, relations=True)
    assert data["order"] == 180 and len(data["subgroups"]) == 15
    assert len(data["elements"]) == len(S)
    assert [S.trivial_id, S.whole_id] in data["leq"]
    assert "params" in data
    text = sysm.dumps(data)
    assert sysm.dumps(json.loads(text)) == text
    dot = sysm.export_dot(S)
    assert dot.startswith("digraph classes {") and dot.rstrip().endswith("}")
    assert dot.count("->") < int(S.incl.sum())
