"""Code a small graph as a group and read it back two ways."""

from cdmgraph import codec, lemmas

graph = codec.parse_graph("vertex a\nvertex b\nvertex c\nedge a b\nedge b c\n")
params, G = codec.encode(graph)
print(f"{G.name}: order {G.order}")

print("from the group law:", codec.decode_structured(G).to_json())

_, F, S = lemmas.build(lemmas.Instance(graph))
print(f"system: {S.n_classes} normal subgroups, {len(S)} cosets")
print("from the system:   ", codec.decode(S).to_json())
