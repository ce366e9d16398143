"""Graphs in, structured groups out, and back again."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterator, Optional

import numpy as np

from .core import DpElement, Params, StructuredGroup, WElement, inject, inv, mul
from .errors import ParamError, ParseError


def _norm_edge(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Graph:
    vertices: tuple = ()
    edges: frozenset = frozenset()
    c2: int = 0

    def __post_init__(self):
        verts = tuple(sorted(str(v) for v in self.vertices))
        if len(set(verts)) != len(verts):
            raise ParamError("duplicate vertex")
        edges = set()
        for u, v in self.edges:
            u, v = str(u), str(v)
            if u == v:
                raise ParamError(f"self-loop at {u}")
            if u not in verts or v not in verts:
                raise ParamError(f"edge ({u}, {v}) has an unknown endpoint")
            edges.add(_norm_edge(u, v))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", frozenset(edges))

    @property
    def extra(self) -> tuple:
        return tuple(f"i{k}" for k in range(self.c2))

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def adjacent(self, u: str, v: str) -> bool:
        return _norm_edge(u, v) in self.edges

    def to_json(self) -> dict:
        out = {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]}
        if self.c2:
            out["c2"] = self.c2
        return out

    def to_text(self) -> str:
        lines = [f"vertex {v}" for v in self.vertices]
        lines += [f"edge {u} {v}" for u, v in self.sorted_edges()]
        if self.c2:
            lines.append(f"c2 {self.c2}")
        return "\n".join(lines) + "\n"

    def without_c2(self) -> "Graph":
        return Graph(self.vertices, self.edges, 0)


def _parse_json(text: str) -> Graph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("graph JSON must be an object", line=1)
    verts = [str(v) for v in data.get("vertices", [])]
    seen = set()
    for v in verts:
        if v in seen:
            raise ParseError(f"duplicate vertex {v!r}", line=1)
        seen.add(v)
    edges = set()
    for e in data.get("edges", []):
        if len(e) != 2:
            raise ParseError(f"edge {e!r} does not have two endpoints", line=1)
        u, v = str(e[0]), str(e[1])
        _check_edge(u, v, seen, edges, 1)
        edges.add(_norm_edge(u, v))
    c2 = data.get("c2", 0)
    if not isinstance(c2, int) or c2 < 0:
        raise ParseError(f"c2 must be a non-negative integer, got {c2!r}", line=1)
    return _finish(verts, edges, c2, 1)


def _check_edge(u, v, verts, edges, lineno):
    if u == v:
        raise ParseError(f"self-loop at {u!r}", line=lineno)
    for w in (u, v):
        if w not in verts:
            raise ParseError(f"unknown endpoint {w!r}", line=lineno)
    if _norm_edge(u, v) in edges:
        raise ParseError(f"duplicate edge {u} {v}", line=lineno)


def _finish(verts, edges, c2, lineno) -> Graph:
    clash = set(verts) & {f"i{k}" for k in range(c2)}
    if clash:
        raise ParseError(f"vertex label {sorted(clash)[0]!r} collides with an extra C2 label", line=lineno)
    return Graph(tuple(verts), frozenset(edges), c2)


def parse_graph(text: str) -> Graph:
    """Read the line format (``vertex a`` / ``edge a b`` / ``c2 K``) or JSON."""
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    verts: list[str] = []
    seen: set[str] = set()
    edges: set = set()
    c2 = 0
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        word = parts[0].lower()
        if word == "vertex":
            if len(parts) != 2:
                raise ParseError("expected 'vertex NAME'", line=lineno)
            if parts[1] in seen:
                raise ParseError(f"duplicate vertex {parts[1]!r}", line=lineno)
            seen.add(parts[1])
            verts.append(parts[1])
        elif word == "edge":
            if len(parts) != 3:
                raise ParseError("expected 'edge NAME NAME'", line=lineno)
            _check_edge(parts[1], parts[2], seen, edges, lineno)
            edges.add(_norm_edge(parts[1], parts[2]))
        elif word == "c2":
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("expected 'c2 K' with K a non-negative integer", line=lineno)
            c2 = int(parts[1])
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", line=lineno)
    return _finish(verts, edges, c2, max(lineno, 1))


def read_graph(path: str) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def encode(graph: Graph, c2: Optional[int] = None, p: int = 3, q: int = 5) -> tuple[Params, StructuredGroup]:
    """The structured group of the graph times C_2^K (K defaults to ``graph.c2``)."""
    k = graph.c2 if c2 is None else c2
    params = Params(p, q, graph.vertices, tuple(graph.sorted_edges()), tuple(f"i{j}" for j in range(k)))
    return params, StructuredGroup(params)


def decode(S, labels: bool = True) -> Graph:
    """Vertices are the D_p classes; an edge needs a W class below both.

    With ``labels`` and a structured parent, the class of ker pi_v is
    reported as ``v``; otherwise as its subgroup id.
    """
    dp = S.ids_with_tag("Dp")
    w = S.ids_with_tag("W")
    names = {i: str(i) for i in dp}
    structured = getattr(S.group, "structured", None)
    if labels and structured is not None:
        for v in structured.params.vertices:
            ker = structured.vertex_kernel(v)
            for i in dp:
                N = S.subgroups[i]
                if N.order == len(ker) and np.array_equal(N.elements, ker):
                    names[i] = v
    edges = set()
    for i, j in combinations(dp, 2):
        both = S.incl[:, i] & S.incl[:, j]
        if any(both[k] for k in w):
            edges.add((names[i], names[j]))
    return Graph(tuple(names[i] for i in dp), frozenset(edges))


def decode_structured(G: StructuredGroup) -> Graph:
    """Read the graph from the group law alone, with no subgroup enumeration.

    A vertex per D_p factor (pi_v is onto D_p, so ker pi_v is a vertex).  Two
    vertices are adjacent when some C_q generator is inverted by the
    reflection at both of them: that generator lives on the edge joining
    them, so ker pi_r sits below both vertex kernels with quotient W.
    """
    P = G.params
    beta = {v: inject(DpElement.beta(P.p), v, P) for v in P.vertices}
    cq_gens = []
    for r in P.edges:
        d = inject(WElement.delta(P.p, P.q), r, P)
        cq_gens.append(d)
    edges = set()
    for d in cq_gens:
        moved = [v for v in P.vertices if mul(mul(beta[v], d), inv(beta[v])) != d]
        if len(moved) != 2:
            raise ParamError("C_q generator twisted by other than two reflections")
        edges.add(tuple(moved))
    return Graph(P.vertices, frozenset(edges))


# -- graph isomorphism and enumeration --------------------------------------


def isomorphism(g: Graph, h: Graph, max_vertices: int = 8) -> Optional[dict]:
    """A vertex bijection g -> h preserving adjacency, by backtracking."""
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges):
        return None
    if len(g.vertices) > max_vertices:
        raise ParamError(f"isomorphism search limited to {max_vertices} vertices")
    deg_g = {v: sum(v in e for e in g.edges) for v in g.vertices}
    deg_h = {v: sum(v in e for e in h.edges) for v in h.vertices}
    if sorted(deg_g.values()) != sorted(deg_h.values()):
        return None
    order = sorted(g.vertices, key=lambda v: -deg_g[v])

    def rec(k: int, f: dict, used: set):
        if k == len(order):
            return dict(f)
        v = order[k]
        for w in h.vertices:
            if w in used or deg_h[w] != deg_g[v]:
                continue
            if all(g.adjacent(v, u) == h.adjacent(w, f[u]) for u in f):
                f[v] = w
                used.add(w)
                got = rec(k + 1, f, used)
                if got is not None:
                    return got
                del f[v]
                used.discard(w)
        return None

    return rec(0, {}, set())


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return isomorphism(g, h) is not None


def all_graphs(n: int) -> list[Graph]:
    """One graph per isomorphism type on ``n`` vertices, labelled a, b, c, ..."""
    labels = tuple("abcdefgh"[:n])
    pairs = list(combinations(labels, 2))
    reps: list[Graph] = []
    for mask in range(1 << len(pairs)):
        g = Graph(labels, frozenset(pr for k, pr in enumerate(pairs) if mask >> k & 1))
        if not any(is_isomorphic(g, r) for r in reps):
            reps.append(g)
    return reps


def graph_automorphisms(g: Graph) -> Iterator[dict]:
    for perm in permutations(g.vertices):
        f = dict(zip(g.vertices, perm))
        if all(_norm_edge(f[u], f[v]) in g.edges for u, v in g.edges):
            yield f
