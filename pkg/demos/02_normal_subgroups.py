"""The normal subgroup lattice of W, the group coding a single edge."""

from cdmgraph import lemmas

G, F, S = lemmas.build(lemmas.instance("a-b"))
print(f"{S.n_classes} normal subgroups of a group of order {F.n}")
for i, N in enumerate(S.subgroups):
    above = [j for j in range(S.n_classes) if j != i and S.incl[i, j]]
    print(f"{i:3} index {N.index:4}  quotient {str(S.tag(i)):7} below {above}")
