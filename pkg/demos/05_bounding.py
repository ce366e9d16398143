"""Walk the bounding lemma over every quotient of W x C2."""

from cdmgraph import lemmas

G, F, S = lemmas.build(lemmas.instance("a-b +1"))
for i, N in enumerate(S.subgroups):
    rep = lemmas.check_bounding(G, N)
    flag = "ok" if rep.ok else "BROKEN"
    note = "  (V0 without the edge rule misses this)" if rep.natural_fails else ""
    print(f"index {N.index:4}  k,n,m={rep.k},{rep.n},{rep.m}  V0={list(rep.V0)}  {flag}{note}")
