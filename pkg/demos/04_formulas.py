"""Evaluate first-order formulas over a complete system."""

from cdmgraph import lemmas, logic

G, F, S = lemmas.build(lemmas.instance("a-b"))

f = logic.parse_formula("exists w:X[180]. iso(w, W) & leq(w, x)")
print(logic.pretty(f))
above_w = logic.evaluate(S, f)
print(f"{len(above_w)} cosets lie above an edge class")

for x, y in logic.evaluate(S, logic.edge_formula()):
    print("edge between cosets", S.element(x), "and", S.element(y))

for n in (1, 2):
    sols = logic.evaluate(S, logic.phi(n))
    print(f"width exactly {n}: classes {sorted({S.class_id(a) for a in sols})}")
