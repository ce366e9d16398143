"""Vertex widths of the index-2 classes, with their GF(2) dual vectors."""

from cdmgraph import lemmas, width

G, F, S = lemmas.build(lemmas.instance("a-b +1"))
for cid in width.c2_classes(S):
    a = S.identity_element(cid)
    vec = width.dual_vector(S, a)
    rep = width.vertex_width(S, a)
    print(f"class {cid:3}  dual {'+'.join(vec.support()):8} width {rep.width}  witnesses {rep.witnesses}")

# the literal exchange statement breaks already for two vertices
print("exchange counterexample:", width.exchange_counterexample(S))
print("steinitz form:", width.exchange_counterexample(S, steinitz=True))
