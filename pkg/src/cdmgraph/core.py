"""Exact arithmetic for D_p, W and the structured groups of a graph.

The structured group of a graph (V, R) with extra index set I is

    C_q^R  x|  (C_p^V  x|  C_2^(V u I))

with elements stored as residue arrays ``z`` (mod q, one per edge), ``y``
(mod p, one per vertex) and ``x`` (mod 2, one per vertex then one per extra
index).  C_2 is written additively; ``chi`` turns a bit into a sign.

Label order is canonical everywhere: vertices sorted, edges sorted as
``(min, max)`` pairs, extras sorted.  The first endpoint of a stored edge
occupies the first D_p slot of W.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import LabelError, ParamError


def chi(bit: int) -> int:
    """+1 for 0, -1 for 1."""
    return 1 - 2 * (bit & 1)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _edge_key(e) -> tuple[str, str]:
    u, v = e
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Params:
    """Primes plus the labelled index sets V, R, I (normalised on creation)."""

    p: int = 3
    q: int = 5
    vertices: tuple = ()
    edges: tuple = ()
    extra: tuple = ()

    def __post_init__(self):
        p, q = self.p, self.q
        for name, val in (("p", p), ("q", q)):
            if not isinstance(val, (int, np.integer)) or val < 3 or not is_prime(int(val)) or val % 2 == 0:
                raise ParamError(f"{name}={val} is not an odd prime >= 3")
        if p == q:
            raise ParamError("p and q must be distinct")
        verts = [str(v) for v in self.vertices]
        if len(set(verts)) != len(verts):
            raise ParamError("duplicate vertex label")
        extra = [str(i) for i in self.extra]
        if len(set(extra)) != len(extra):
            raise ParamError("duplicate extra label")
        if set(verts) & set(extra):
            raise ParamError("vertex and extra labels must be disjoint")
        vset = set(verts)
        edges = []
        for e in self.edges:
            u, v = (str(t) for t in e)
            if u == v:
                raise ParamError(f"self-loop at {u}")
            if u not in vset or v not in vset:
                raise ParamError(f"edge ({u}, {v}) has an endpoint that is not a vertex")
            edges.append(_edge_key((u, v)))
        if len(set(edges)) != len(edges):
            raise ParamError("duplicate edge")
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "q", int(q))
        object.__setattr__(self, "vertices", tuple(sorted(verts)))
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        object.__setattr__(self, "extra", tuple(sorted(extra)))

    @property
    def x_labels(self) -> tuple:
        return self.vertices + self.extra

    @cached_property
    def vertex_pos(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_pos(self) -> dict:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def x_pos(self) -> dict:
        return {v: i for i, v in enumerate(self.x_labels)}

    @cached_property
    def radices(self) -> tuple:
        nv, nr, nx = len(self.vertices), len(self.edges), len(self.x_labels)
        return (self.q,) * nr + (self.p,) * nv + (2,) * nx

    @property
    def order(self) -> int:
        nv, nr, ni = len(self.vertices), len(self.edges), len(self.extra)
        return self.q ** nr * self.p ** nv * 2 ** (nv + ni)

    def edge_slots(self, target) -> tuple[int, bool]:
        """Position of an edge and whether the caller gave it reversed."""
        try:
            u, v = target
        except (TypeError, ValueError):
            raise LabelError(f"not an edge: {target!r}") from None
        key = _edge_key((str(u), str(v)))
        if key not in self.edge_pos:
            raise LabelError(f"unknown edge {target!r}")
        return self.edge_pos[key], key != (str(u), str(v))

    def describe(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "vertices": list(self.vertices),
            "edges": [list(e) for e in self.edges],
            "extra": list(self.extra),
        }


# -- D_p and W -------------------------------------------------------------


@dataclass(frozen=True)
class DpElement:
    """gamma^y beta^x in D_p; ``x`` is the sign map tau in additive form."""

    p: int
    y: int = 0
    x: int = 0

    def __post_init__(self):
        object.__setattr__(self, "y", int(self.y) % self.p)
        object.__setattr__(self, "x", int(self.x) & 1)

    def __mul__(self, other: "DpElement") -> "DpElement":
        if other.p != self.p:
            raise ParamError("D_p elements over different primes")
        return DpElement(self.p, self.y + chi(self.x) * other.y, self.x ^ other.x)

    def inverse(self) -> "DpElement":
        return DpElement(self.p, -chi(self.x) * self.y, self.x)

    def is_identity(self) -> bool:
        return self.y == 0 and self.x == 0

    @property
    def tau(self) -> int:
        return self.x

    @classmethod
    def identity(cls, p: int) -> "DpElement":
        return cls(p, 0, 0)

    @classmethod
    def gamma(cls, p: int) -> "DpElement":
        return cls(p, 1, 0)

    @classmethod
    def beta(cls, p: int) -> "DpElement":
        return cls(p, 0, 1)

    @property
    def index(self) -> int:
        """Position in the 2p-element list used by :func:`dp_elements`."""
        return self.y * 2 + self.x


def dp_elements(p: int) -> list[DpElement]:
    return [DpElement(p, y, x) for y in range(p) for x in range(2)]


@dataclass(frozen=True)
class WElement:
    """(z, b, c) in W = C_q x| (D_p x D_p); (b, c) acts on z by chi(b)chi(c)."""

    q: int
    z: int
    b: DpElement
    c: DpElement

    def __post_init__(self):
        object.__setattr__(self, "z", int(self.z) % self.q)
        if self.b.p != self.c.p:
            raise ParamError("W slots over different primes")

    @property
    def p(self) -> int:
        return self.b.p

    def __mul__(self, other: "WElement") -> "WElement":
        if (other.q, other.p) != (self.q, self.p):
            raise ParamError("W elements over different primes")
        sign = chi(self.b.x) * chi(self.c.x)
        return WElement(self.q, self.z + sign * other.z, self.b * other.b, self.c * other.c)

    def inverse(self) -> "WElement":
        sign = chi(self.b.x) * chi(self.c.x)
        return WElement(self.q, -sign * self.z, self.b.inverse(), self.c.inverse())

    def is_identity(self) -> bool:
        return self.z == 0 and self.b.is_identity() and self.c.is_identity()

    @classmethod
    def identity(cls, p: int, q: int) -> "WElement":
        e = DpElement.identity(p)
        return cls(q, 0, e, e)

    @classmethod
    def delta(cls, p: int, q: int) -> "WElement":
        e = DpElement.identity(p)
        return cls(q, 1, e, e)

    @property
    def index(self) -> int:
        n = 2 * self.p
        return (self.z * n + self.b.index) * n + self.c.index


def lam(w: WElement) -> tuple[DpElement, DpElement]:
    """The quotient map W -> D_p x D_p."""
    return (w.b, w.c)


def w_elements(p: int, q: int) -> list[WElement]:
    dps = dp_elements(p)
    return [WElement(q, z, b, c) for z in range(q) for b in dps for c in dps]


# -- structured elements ---------------------------------------------------


@dataclass(frozen=True)
class StructuredElement:
    params: Params
    z: tuple
    y: tuple
    x: tuple

    def __post_init__(self):
        P = self.params
        z = tuple(int(a) % P.q for a in self.z)
        y = tuple(int(a) % P.p for a in self.y)
        x = tuple(int(a) & 1 for a in self.x)
        if (len(z), len(y), len(x)) != (len(P.edges), len(P.vertices), len(P.x_labels)):
            raise ParamError("residue arrays do not match the parameter shapes")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    def __mul__(self, other: "StructuredElement") -> "StructuredElement":
        return mul(self, other)

    def inverse(self) -> "StructuredElement":
        return inv(self)

    def __pow__(self, k: int) -> "StructuredElement":
        result = identity(self.params)
        base = self if k >= 0 else inv(self)
        for _ in range(abs(k)):
            result = mul(result, base)
        return result

    def is_identity(self) -> bool:
        return not any(self.z) and not any(self.y) and not any(self.x)

    @property
    def encoding(self) -> int:
        return encode(self)


def identity(params: Params) -> StructuredElement:
    return StructuredElement(params, (0,) * len(params.edges), (0,) * len(params.vertices), (0,) * len(params.x_labels))


def _check_same(g: StructuredElement, h: StructuredElement):
    if g.params != h.params:
        raise ParamError("elements come from different structured groups")


def _edge_sign(params: Params, x: Sequence[int], k: int) -> int:
    u, v = params.edges[k]
    return chi(x[params.x_pos[u]]) * chi(x[params.x_pos[v]])


def mul(g: StructuredElement, h: StructuredElement) -> StructuredElement:
    """Group product; each edge (u, v) twists z by chi(x_u)chi(x_v)."""
    _check_same(g, h)
    P = g.params
    z = tuple(g.z[k] + _edge_sign(P, g.x, k) * h.z[k] for k in range(len(P.edges)))
    y = tuple(g.y[i] + chi(g.x[i]) * h.y[i] for i in range(len(P.vertices)))
    x = tuple(a ^ b for a, b in zip(g.x, h.x))
    return StructuredElement(P, z, y, x)


def inv(g: StructuredElement) -> StructuredElement:
    P = g.params
    z = tuple(-_edge_sign(P, g.x, k) * g.z[k] for k in range(len(P.edges)))
    y = tuple(-chi(g.x[i]) * g.y[i] for i in range(len(P.vertices)))
    return StructuredElement(P, z, y, g.x)


def order(g: StructuredElement) -> int:
    k, cur = 1, g
    while not cur.is_identity():
        cur = mul(cur, g)
        k += 1
    return k


def encode(g: StructuredElement) -> int:
    enc = 0
    for digit, radix in zip(g.z + g.y + g.x, g.params.radices):
        enc = enc * radix + digit
    return enc


def decode(params: Params, enc: int) -> StructuredElement:
    if not 0 <= enc < params.order:
        raise ParamError(f"encoding {enc} out of range")
    digits = []
    for radix in reversed(params.radices):
        enc, d = divmod(enc, radix)
        digits.append(d)
    digits.reverse()
    nr, nv = len(params.edges), len(params.vertices)
    return StructuredElement(params, digits[:nr], digits[nr:nr + nv], digits[nr + nv:])


Target = Union[str, tuple]


def project(g: StructuredElement, target: Target):
    """pi_v, pi_r or pi_i.

    Vertices give a :class:`DpElement`, edges a :class:`WElement` whose slot
    order follows the endpoint order the caller wrote, extras a bit.
    """
    P = g.params
    if isinstance(target, str):
        if target in P.vertex_pos:
            i = P.vertex_pos[target]
            return DpElement(P.p, g.y[i], g.x[i])
        if target in P.x_pos:
            return g.x[P.x_pos[target]]
        raise LabelError(f"unknown label {target!r}")
    k, flipped = P.edge_slots(target)
    u, v = P.edges[k]
    a_u = DpElement(P.p, g.y[P.vertex_pos[u]], g.x[P.x_pos[u]])
    a_v = DpElement(P.p, g.y[P.vertex_pos[v]], g.x[P.x_pos[v]])
    if flipped:
        a_u, a_v = a_v, a_u
    return WElement(P.q, g.z[k], a_u, a_v)


def inject(g, at: Target, params: Params) -> StructuredElement:
    """(g)_v for g in D_p, (g)_r for g in W, or a bit at an extra index."""
    e = identity(params)
    z, y, x = list(e.z), list(e.y), list(e.x)
    if isinstance(at, str):
        if at in params.vertex_pos:
            if not isinstance(g, DpElement):
                raise ParamError("only D_p elements inject at a vertex")
            if g.p != params.p:
                raise ParamError("prime mismatch")
            y[params.vertex_pos[at]] = g.y
            x[params.x_pos[at]] = g.x
            return StructuredElement(params, z, y, x)
        if at in params.x_pos:
            x[params.x_pos[at]] = int(g) & 1
            return StructuredElement(params, z, y, x)
        raise LabelError(f"unknown label {at!r}")
    if not isinstance(g, WElement):
        raise ParamError("only W elements inject at an edge")
    if (g.p, g.q) != (params.p, params.q):
        raise ParamError("prime mismatch")
    k, flipped = params.edge_slots(at)
    u, v = params.edges[k]
    b, c = (g.c, g.b) if flipped else (g.b, g.c)
    z[k] = g.z
    y[params.vertex_pos[u]], x[params.x_pos[u]] = b.y, b.x
    y[params.vertex_pos[v]], x[params.x_pos[v]] = c.y, c.x
    return StructuredElement(params, z, y, x)


def xi(g: StructuredElement) -> tuple:
    """Quotient onto C_2^(V u I): the x-array, in label order."""
    return g.x


def to_product_form(g: StructuredElement):
    """(a_v per vertex, b_r per edge, c_i per extra), all as dicts keyed by label."""
    P = g.params
    a = {v: project(g, v) for v in P.vertices}
    b = {r: project(g, r) for r in P.edges}
    c = {i: g.x[P.x_pos[i]] for i in P.extra}
    return a, b, c


def from_product_form(params: Params, a: dict, b: dict, c: dict) -> StructuredElement:
    """Inverse of :func:`to_product_form`; rejects tuples with lambda(b_r) != (a_u, a_v)."""
    for (u, v), w in b.items():
        if lam(w) != (a[u], a[v]):
            raise ParamError(f"lambda(b_r) != (a_u, a_v) at edge {(u, v)}")
    z = [b[r].z for r in params.edges]
    y = [a[v].y for v in params.vertices]
    x = [a[v].x for v in params.vertices] + [c[i] for i in params.extra]
    return StructuredElement(params, z, y, x)


# -- the whole group, vectorised ------------------------------------------


class StructuredGroup:
    """G_Gamma x C_2^I as a concrete group over canonical encodings."""

    def __init__(self, params: Params):
        self.params = params
        P = params
        self.nr, self.nv, self.nx = len(P.edges), len(P.vertices), len(P.x_labels)
        self._eu = np.array([P.x_pos[u] for u, _ in P.edges], dtype=np.int64)
        self._ev = np.array([P.x_pos[v] for _, v in P.edges], dtype=np.int64)
        place = []
        acc = 1
        for radix in reversed(P.radices):
            place.append(acc)
            acc *= radix
        self._place = np.array(place[::-1], dtype=np.int64)

    def __repr__(self):
        P = self.params
        return f"StructuredGroup(|V|={self.nv}, |R|={self.nr}, |I|={len(P.extra)}, order={self.order})"

    @property
    def order(self) -> int:
        return self.params.order

    def identity(self) -> StructuredElement:
        return identity(self.params)

    def element(self, enc: int) -> StructuredElement:
        return decode(self.params, int(enc))

    def elements(self) -> Iterator[StructuredElement]:
        for enc in range(self.order):
            yield decode(self.params, enc)

    def generators(self) -> list[int]:
        """(gamma)_v, (beta)_v, (delta)_r and (beta)_i as encodings."""
        P = self.params
        gens = []
        for v in P.vertices:
            gens.append(encode(inject(DpElement.gamma(P.p), v, P)))
            gens.append(encode(inject(DpElement.beta(P.p), v, P)))
        for r in P.edges:
            gens.append(encode(inject(WElement.delta(P.p, P.q), r, P)))
        for i in P.extra:
            gens.append(encode(inject(1, i, P)))
        return gens

    # vectorised arithmetic on (n, k) digit arrays

    def decode_array(self, encs):
        encs = np.asarray(encs, dtype=np.int64)
        radices = np.array(self.params.radices, dtype=np.int64)
        digits = (encs[..., None] // self._place) % radices if len(radices) else np.zeros(encs.shape + (0,), np.int64)
        nr, nv = self.nr, self.nv
        return digits[..., :nr], digits[..., nr:nr + nv], digits[..., nr + nv:]

    def encode_array(self, Z, Y, X):
        digits = np.concatenate([Z, Y, X], axis=-1)
        return (digits * self._place).sum(axis=-1)

    def mul_arrays(self, Z1, Y1, X1, Z2, Y2, X2):
        P = self.params
        sign = 1 - 2 * ((X1[..., self._eu] + X1[..., self._ev]) & 1)
        Z = (Z1 + sign * Z2) % P.q
        Y = (Y1 + (1 - 2 * X1[..., : self.nv]) * Y2) % P.p
        X = X1 ^ X2
        return Z, Y, X

    def inv_arrays(self, Z, Y, X):
        P = self.params
        sign = 1 - 2 * ((X[..., self._eu] + X[..., self._ev]) & 1)
        return (-sign * Z) % P.q, (-(1 - 2 * X[..., : self.nv]) * Y) % P.p, X.copy()

    def mul_enc(self, a, b):
        A = self.decode_array(a)
        B = self.decode_array(b)
        return self.encode_array(*self.mul_arrays(*A, *B))

    def cayley_table(self, max_order: int = 10000) -> np.ndarray:
        from .errors import BudgetError

        n = self.order
        if n > max_order:
            raise BudgetError(f"group of order {n} exceeds the table guard {max_order}")
        dtype = np.int16 if n < 2 ** 15 else np.int32
        table = np.empty((n, n), dtype=dtype)
        allZ, allY, allX = self.decode_array(np.arange(n))
        chunk = max(1, 200000 // max(n, 1))
        for start in range(0, n, chunk):
            rows = np.arange(start, min(n, start + chunk))
            Z, Y, X = (a[rows][:, None, :] for a in (allZ, allY, allX))
            prod = self.mul_arrays(Z, Y, X, allZ[None], allY[None], allX[None])
            table[rows] = self.encode_array(*prod)
        return table

    def as_finite(self, max_order: int = 10000):
        from .finite import FiniteGroup

        g = FiniteGroup(self.cayley_table(max_order), identity=0, name=self.name, structured=self)
        return g

    @property
    def name(self) -> str:
        P = self.params
        parts = [f"V={','.join(P.vertices) or '-'}"]
        if P.edges:
            parts.append("R=" + ",".join(f"{u}{v}" if len(u) == len(v) == 1 else f"{u}-{v}" for u, v in P.edges))
        if P.extra:
            parts.append(f"I={len(P.extra)}")
        return f"G[{' '.join(parts)}]"

    # named subgroups as encoding sets

    def x_mask(self, vector) -> np.ndarray:
        """Boolean mask of elements g with <vector, xi(g)> = 0 (a kernel of an F_2 functional)."""
        _, _, X = self.decode_array(np.arange(self.order))
        vec = np.asarray(vector, dtype=np.int64)
        return (X @ vec) % 2 == 0

    def vertex_kernel(self, v: str) -> np.ndarray:
        """Sorted encodings of ker pi_v."""
        P = self.params
        if v not in P.vertex_pos:
            raise LabelError(f"unknown vertex {v!r}")
        _, Y, X = self.decode_array(np.arange(self.order))
        i = P.vertex_pos[v]
        return np.flatnonzero((Y[:, i] == 0) & (X[:, i] == 0))

    def edge_kernel(self, r) -> np.ndarray:
        """Sorted encodings of ker pi_r."""
        P = self.params
        k, _ = P.edge_slots(r)
        u, v = P.edges[k]
        Z, Y, X = self.decode_array(np.arange(self.order))
        iu, iv = P.vertex_pos[u], P.vertex_pos[v]
        ok = (Z[:, k] == 0) & (Y[:, iu] == 0) & (X[:, iu] == 0) & (Y[:, iv] == 0) & (X[:, iv] == 0)
        return np.flatnonzero(ok)

    def spq_encodings(self) -> np.ndarray:
        """C_q^R C_p^V: elements with zero x-part."""
        _, _, X = self.decode_array(np.arange(self.order))
        return np.flatnonzero(~X.any(axis=1)) if self.nx else np.arange(self.order)


def coordinate_change(params: Params, f: dict) -> np.ndarray:
    """The permutation of encodings induced by a graph automorphism ``f``.

    ``f`` maps vertex labels to vertex labels; extras are fixed.  The result
    ``perm`` satisfies ``perm[enc(g)] = enc(phi_f(g))`` with
    ``phi_f(g)_v = g_{f^-1(v)}``.
    """
    P = params
    if sorted(f) != list(P.vertices) or sorted(f.values()) != list(P.vertices):
        raise ParamError("f must be a permutation of the vertices")
    finv = {w: v for v, w in f.items()}
    for u, v in P.edges:
        if _edge_key((f[u], f[v])) not in P.edge_pos:
            raise ParamError("f is not a graph automorphism")
    G = StructuredGroup(P)
    Z, Y, X = G.decode_array(np.arange(G.order))
    vsrc = [P.vertex_pos[finv[v]] for v in P.vertices]
    xsrc = vsrc + [P.x_pos[i] for i in P.extra]
    rsrc = [P.edge_pos[_edge_key((finv[u], finv[v]))] for u, v in P.edges]
    return G.encode_array(Z[:, rsrc], Y[:, vsrc], X[:, xsrc])


def elements_from(params: Params, encs: Iterable[int]) -> list[StructuredElement]:
    return [decode(params, int(e)) for e in encs]
