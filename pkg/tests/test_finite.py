import itertools

import numpy as np
import pytest

from cdmgraph import finite
from cdmgraph.finite import FiniteGroup, Homomorphism


def brute_subgroups(G):
    out = []
    for r in range(1, G.n + 1):
        for S in itertools.combinations(range(G.n), r):
            s = set(S)
            if G.identity in s and all(G.table[a, b] in s for a in S for b in S):
                out.append(s)
    return out


def test_axioms_and_counterexample():
    assert finite.dihedral(5).check_axioms() == (True, None)
    bad = np.array([[0, 1, 2], [1, 2, 0], [2, 1, 0]])
    ok, cex = FiniteGroup(bad).check_axioms()
    assert not ok and cex is not None


@pytest.mark.parametrize("G, count", [(finite.dihedral(3), 6), (finite.elementary_abelian(2), 5),
                                      (finite.cyclic(6), 4)])
def test_all_subgroups_matches_brute_force(G, count):
    subs = finite.all_subgroups(G)
    brute = brute_subgroups(G)
    assert len(subs) == len(brute) == count
    assert {frozenset(np.flatnonzero(m).tolist()) for m in subs} == {frozenset(s) for s in brute}


def test_conjugacy_classes_of_d5():
    sizes = sorted(len(c) for c in finite.dihedral(5).conjugacy_classes)
    assert sizes == [1, 2, 2, 5]


class Perm(tuple):
    def __mul__(self, other):
        return Perm(self[i] for i in other)


def test_isomorphism_search():
    D3 = finite.dihedral(3)
    S3 = finite.from_elements([Perm(p) for p in itertools.permutations(range(3))], "S3")
    assert finite.find_isomorphism(D3, S3) is not None
    assert finite.find_isomorphism(D3, finite.cyclic(6)) is None
    assert len(finite.automorphisms(D3)) == 6
    assert len(finite.automorphisms(finite.elementary_abelian(2))) == 6


def test_direct_product_and_homomorphisms():
    G = finite.direct_product(finite.cyclic(2), finite.cyclic(3))
    assert G.n == 6 and G.is_abelian
    proj = Homomorphism(G, finite.cyclic(2), np.arange(6) // 3)
    assert proj.is_homomorphism() and proj.is_surjective() and not proj.is_injective()
    assert proj.kernel_mask().sum() == 3
    with pytest.raises(ValueError):
        Homomorphism(G, finite.cyclic(2), np.arange(6) % 2)


def test_extend_map_rejects_inconsistent_images():
    C4 = finite.cyclic(4)
    assert finite.extend_map(C4, C4, [1], [3]) is not None
    assert finite.extend_map(C4, finite.cyclic(2), [1], [1]) is not None
    assert finite.extend_map(finite.cyclic(3), finite.cyclic(2), [1], [1]) is None
