import os
from itertools import combinations

import numpy as np
import pytest

from cdmgraph import finite
from cdmgraph import subgroups as sg
from cdmgraph.core import DpElement, WElement, encode, inject
from cdmgraph.errors import BudgetError, ContractError

from conftest import GOLDEN, group_of, oracle_normals


@pytest.mark.parametrize("text, count", [
    ("vertex a", 3),
    ("vertex a\nvertex b", 10),
    ("vertex a\nc2 1", 7),
    ("vertex a\nvertex b\nc2 1", 28),
    ("vertex a\nvertex b\nedge a b", 15),
])
def test_enumeration_matches_class_union_oracle(text, count):
    G = group_of(text)
    found = sg.enumerate_normal(G)
    assert len(found) == count
    assert sorted(tuple(N.elements.tolist()) for N in found) == oracle_normals(G)


def test_enumeration_is_sorted_and_golden(w_sys):
    _, F, S = w_sys
    keys = [(N.index, N.elements.tolist()) for N in S.subgroups]
    assert keys == sorted(keys)
    with open(os.path.join(GOLDEN, "w_normal_subgroups.txt")) as fh:
        assert sg.golden_lines(S.subgroups) == fh.read().splitlines()


def test_elementary_abelian_rank_two():
    assert len(sg.enumerate_normal(finite.elementary_abelian(2))) == 5


def test_enumeration_guard():
    with pytest.raises(BudgetError):
        sg.enumerate_normal(finite.cyclic(30), max_order_guard=10)


def test_normal_closure_examples(w_sys, d3):
    _, F, _ = w_sys
    P = F.structured.params
    assert sg.normal_closure(F, []).order == 1
    d = encode(inject(WElement.delta(3, 5), ("a", "b"), P))
    assert sg.normal_closure(F, [d]).order == 5
    _, D, _ = d3
    b = encode(inject(DpElement.beta(3), "a", D.structured.params))
    assert sg.normal_closure(D, [b]).order == 6


def test_combine(w_sys, pair_c2):
    _, F, S = w_sys
    for N, M in combinations(S.subgroups, 2):
        prod = sg.combine(N, M, "product")
        meet = sg.combine(N, M, "intersection")
        assert prod.order * meet.order == N.order * M.order
    N = S.subgroups[3]
    assert sg.combine(N, N, "intersection") == N
    _, G, _ = pair_c2
    P = G.structured.params
    cpa = sg.normal_closure(G, [encode(inject(DpElement.gamma(3), "a", P))])
    cpb = sg.normal_closure(G, [encode(inject(DpElement.gamma(3), "b", P))])
    assert sg.combine(cpa, cpb, "product").order == 9
    with pytest.raises(ContractError):
        sg.combine(N, N, "union")


def _M(F):
    Z, Y, X = F.structured.decode_array(np.arange(F.n))
    return sg.NormalSubgroup.from_mask(F, (Z[:, 0] == 0) & (X[:, 0] == X[:, 1]))


def test_quotients_and_tags(w_sys, d3):
    _, F, S = w_sys
    assert str(sg.iso_tag(sg.quotient(F, sg.whole(F)))) == "Trivial"
    M = _M(F)
    assert M.order == 18 and M in S.subgroups
    Q = sg.quotient(F, M)
    assert Q.n == 10 and str(sg.iso_tag(Q)) == "Dq"
    assert str(sg.iso_tag(F)) == "W"
    Z, Y, X = F.structured.decode_array(np.arange(F.n))
    ker_xi = sg.NormalSubgroup.from_mask(F, ~X.any(axis=1))
    tag = sg.iso_tag(sg.quotient(F, ker_xi))
    assert tag.tag == "C2k" and tag.k == 2
    assert str(sg.iso_tag(d3[1])) == "Dp"


def test_quotient_projection_is_homomorphism(w_sys):
    _, F, S = w_sys
    for N in S.subgroups:
        Q = sg.quotient(F, N)
        h = Q.projection_hom()
        assert h.is_homomorphism() and h.is_surjective()
        assert np.array_equal(h.kernel_mask(), N.mask)


def test_iso_tag_witness_is_an_isomorphism(w_sys):
    _, F, S = w_sys
    refs = sg.reference_groups(3, 5)
    for i in range(S.n_classes):
        t = S.tag(i)
        if t.tag in refs:
            h = finite.Homomorphism(refs[t.tag], S.class_group(i), np.array(t.witness), check=False)
            assert h.is_homomorphism() and h.is_injective() and h.is_surjective()


def test_sylow(w_sys):
    _, F, _ = w_sys
    assert sg.normal_sylow(F, 5).order == 5
    assert sg.normal_sylow(F, 3).order == 9
    assert sg.normal_sylow(F, 2) is None
    spq = sg.sylow_product(F)
    assert spq.order == 45
    assert np.array_equal(spq.mask, F.orders % 2 == 1)


def test_frattini():
    assert sg.frattini(finite.dihedral(3)).order == 1
    assert sg.frattini(finite.cyclic(4)).order == 2
    C4, C2 = finite.cyclic(4), finite.cyclic(2)
    assert sg.is_frattini_cover(finite.Homomorphism(C4, C2, np.arange(4) % 2))
    D3 = finite.dihedral(3)
    tau = finite.Homomorphism(D3, C2, np.arange(6) % 2)
    assert not sg.is_frattini_cover(tau)
    with pytest.raises(ContractError):
        sg.is_frattini_cover(finite.Homomorphism(C2, C4, np.array([0, 2])))


def test_fiber_product_order():
    D3, C2 = finite.dihedral(3), finite.cyclic(2)
    tau = finite.Homomorphism(D3, C2, np.arange(6) % 2)
    fp = sg.fiber_product(tau, tau)
    assert fp.n == 18 and fp.check_axioms()[0]
    assert all(tau(a) == tau(b) for a, b in fp.pairs)
