"""Assemble automorphisms of S(W) from maps on its vertex and edge classes."""

import numpy as np

from cdmgraph import lemmas

G, F, S = lemmas.build(lemmas.instance("a-b"))
inv = lemmas.dp_inversion(3)
ident = np.arange(6)
dp = S.ids_with_tag("Dp")
w = S.ids_with_tag("W")[0]

per_class = {dp[0]: lemmas.class_map_from(S, dp[0], inv),
             w: lemmas.class_map_from(S, w, lemmas.extend_w_automorphism(inv, ident))}
aut = lemmas.assemble_automorphism(S, per_class)
moved = int((aut.group_map != np.arange(F.n)).sum())
print(f"twisting one vertex moves {moved} of {F.n} group elements")

swap = lemmas.assemble_automorphism(S, f={"a": "b", "b": "a"})
f, bar = lemmas.factor_automorphism(S, swap.group_map)
print("graph part of the swap:", f)
