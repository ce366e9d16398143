"""Normal subgroups, quotients, isomorphism tags, Sylow and Frattini tools."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import finite
from .core import StructuredGroup, w_elements, dp_elements
from .errors import BudgetError, ContractError
from .finite import FiniteGroup, Homomorphism

DEFAULT_MAX_ORDER = 10000
DEFAULT_FRATTINI_GUARD = 500
ISO_SEARCH_LIMIT = 512


def as_finite(parent, max_order: int = DEFAULT_MAX_ORDER) -> FiniteGroup:
    if isinstance(parent, FiniteGroup):
        return parent
    if isinstance(parent, StructuredGroup):
        return parent.as_finite(max_order)
    raise ContractError(f"cannot treat {parent!r} as a finite group")


class NormalSubgroup:
    """A normal subgroup stored as its sorted element list."""

    def __init__(self, parent: FiniteGroup, elements, check: bool = False):
        self.parent = parent
        mask = np.zeros(parent.n, dtype=bool)
        mask[np.asarray(elements, dtype=np.int64)] = True
        self.mask = mask
        self.elements = np.flatnonzero(mask)
        if check:
            if not parent.is_subgroup(mask):
                raise ContractError("not a subgroup")
            if not parent.is_normal(mask):
                raise ContractError("subgroup is not normal")

    @classmethod
    def from_mask(cls, parent: FiniteGroup, mask: np.ndarray) -> "NormalSubgroup":
        obj = cls.__new__(cls)
        obj.parent = parent
        obj.mask = mask
        obj.elements = np.flatnonzero(mask)
        return obj

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.parent.n // self.order

    @cached_property
    def key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    def __eq__(self, other):
        return isinstance(other, NormalSubgroup) and self.parent is other.parent and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __contains__(self, g) -> bool:
        return bool(self.mask[int(g)])

    def __le__(self, other: "NormalSubgroup") -> bool:
        return bool(not (self.mask & ~other.mask).any())

    def __repr__(self):
        return f"NormalSubgroup(order={self.order}, index={self.index})"

    @cached_property
    def gens(self) -> list[int]:
        return self.parent.generators_of(self.mask)

    @cached_property
    def coset_labels(self) -> np.ndarray:
        return self.parent.coset_labels(self.mask)

    def golden_line(self) -> str:
        return f"index={self.index} order={self.order} gens={','.join(str(g) for g in self.gens)}"


def trivial(parent: FiniteGroup) -> NormalSubgroup:
    return NormalSubgroup(parent, [parent.identity])


def whole(parent: FiniteGroup) -> NormalSubgroup:
    return NormalSubgroup.from_mask(parent, np.ones(parent.n, dtype=bool))


def normal_closure(parent: FiniteGroup, gens: Sequence[int], guard: int = DEFAULT_MAX_ORDER) -> NormalSubgroup:
    """Smallest normal subgroup containing ``gens``: the span of their conjugacy classes."""
    if parent.n > guard:
        raise BudgetError(f"group of order {parent.n} exceeds the closure guard {guard}")
    labels = parent.class_labels
    wanted = np.isin(labels, labels[np.asarray(list(gens), dtype=np.int64)]) if len(gens) else np.zeros(parent.n, bool)
    mask = np.zeros(parent.n, dtype=bool)
    mask[parent.identity] = True
    chosen: list[int] = []
    for g in np.flatnonzero(wanted):
        if not mask[g]:
            chosen.append(int(g))
            mask = parent.generated(chosen, start=mask)
    return NormalSubgroup.from_mask(parent, mask)


def combine(N: NormalSubgroup, M: NormalSubgroup, mode: str) -> NormalSubgroup:
    """``"product"`` gives NM, ``"intersection"`` gives N n M."""
    if N.parent is not M.parent:
        raise ContractError("subgroups of different groups")
    if mode == "intersection":
        return NormalSubgroup.from_mask(N.parent, N.mask & M.mask)
    if mode == "product":
        labels = M.coset_labels
        return NormalSubgroup.from_mask(N.parent, np.isin(labels, labels[N.elements]))
    raise ContractError(f"unknown mode {mode!r}")


def enumerate_normal(parent, max_order_guard: int = DEFAULT_MAX_ORDER) -> list[NormalSubgroup]:
    """Every normal subgroup, as joins of normal closures of single elements.

    Sorted by (index, element list).
    """
    G = as_finite(parent, max_order_guard)
    if G.n > max_order_guard:
        raise BudgetError(f"group of order {G.n} exceeds the enumeration guard {max_order_guard}")
    found: dict[bytes, NormalSubgroup] = {}
    atoms: list[NormalSubgroup] = []
    for cls in G.conjugacy_classes:
        N = normal_closure(G, [int(cls[0])], max_order_guard)
        if N.key not in found:
            found[N.key] = N
            atoms.append(N)
    labels = [A.coset_labels for A in atoms]
    work = list(found.values())
    while work:
        X = work.pop()
        for A, lab in zip(atoms, labels):
            if A <= X:
                continue
            Y = NormalSubgroup.from_mask(G, np.isin(lab, lab[X.elements]))
            if Y.key not in found:
                found[Y.key] = Y
                work.append(Y)
    out = list(found.values())
    out.sort(key=lambda N: (N.index, N.elements.tolist()))
    return out


def golden_lines(subgroups: Sequence[NormalSubgroup]) -> list[str]:
    return [N.golden_line() for N in subgroups]


class QuotientGroup(FiniteGroup):
    """G/N with minimal-encoding coset representatives."""

    def __init__(self, parent: FiniteGroup, N: NormalSubgroup):
        self.parent = parent
        self.kernel = N
        labels = N.coset_labels
        self.reps = np.unique(labels)
        self.projection = np.searchsorted(self.reps, labels)
        r = self.reps
        table = self.projection[parent.table[np.ix_(r, r)]]
        super().__init__(table, identity=int(self.projection[parent.identity]), name=f"{parent.name}/N[{N.order}]")

    def project(self, g: int) -> int:
        return int(self.projection[g])

    def projection_hom(self) -> Homomorphism:
        return Homomorphism(self.parent, self, self.projection, check=False)


def quotient(parent, N: NormalSubgroup) -> QuotientGroup:
    return QuotientGroup(as_finite(parent), N)


# -- isomorphism tags --------------------------------------------------------

TAGS = ("Trivial", "C2", "C2k", "Cp", "Cq", "Dp", "Dq", "DpXDp", "W", "Other")


@dataclass(frozen=True)
class IsoTag:
    tag: str
    k: Optional[int] = None
    witness: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __str__(self):
        return f"C2k({self.k})" if self.tag == "C2k" else self.tag


_REFERENCE_CACHE: dict = {}


def reference_groups(p: int, q: int) -> dict:
    """Concrete copies of the named targets, built from their own element laws."""
    key = (p, q)
    if key not in _REFERENCE_CACHE:
        Dp = finite.from_elements(dp_elements(p), "Dp")
        Dq = finite.from_elements(dp_elements(q), "Dq")
        _REFERENCE_CACHE[key] = {
            "Trivial": finite.cyclic(1),
            "C2": finite.cyclic(2),
            "Cp": finite.cyclic(p),
            "Cq": finite.cyclic(q),
            "Dp": Dp,
            "Dq": Dq,
            "DpXDp": finite.direct_product(Dp, Dp),
            "W": finite.from_elements(w_elements(p, q), "W"),
        }
    return _REFERENCE_CACHE[key]


def iso_tag(Q: FiniteGroup, p: int = 3, q: int = 5) -> IsoTag:
    """Name Q among the targets, with a verified isomorphism as witness."""
    n = Q.n
    refs = reference_groups(p, q)
    if n > 1 and n & (n - 1) == 0 and n > 2:
        k = n.bit_length() - 1
        if (Q.orders <= 2).all():
            img = finite.find_isomorphism(finite.elementary_abelian(k), Q)
            if img is not None:
                return IsoTag("C2k", k, tuple(img.tolist()))
        return IsoTag("Other")
    sizes = {1: "Trivial", 2: "C2", p: "Cp", q: "Cq", 2 * p: "Dp", 2 * q: "Dq", 4 * p * p: "DpXDp", 4 * p * p * q: "W"}
    name = sizes.get(n)
    if name is None or n > ISO_SEARCH_LIMIT:
        return IsoTag("Other")
    img = finite.find_isomorphism(refs[name], Q)
    if img is None:
        return IsoTag("Other")
    return IsoTag(name, None, tuple(img.tolist()))


def params_of(G: FiniteGroup) -> tuple[int, int]:
    S = getattr(G, "structured", None)
    if S is None and isinstance(G, QuotientGroup):
        S = getattr(G.parent, "structured", None)
    if S is not None:
        return S.params.p, S.params.q
    return 3, 5


# -- Sylow and S_pq ------------------------------------------------------------


def sylow_product(parent) -> NormalSubgroup:
    """S_pq: the elements of odd order (zero x-part for structured groups)."""
    G = as_finite(parent)
    if G.structured is not None:
        N = NormalSubgroup(G, G.structured.spq_encodings())
    elif isinstance(G, QuotientGroup):
        top = sylow_product(G.parent)
        N = NormalSubgroup(G, np.unique(G.projection[top.elements]))
    else:
        N = NormalSubgroup.from_mask(G, G.orders % 2 == 1)
    if not (G.is_subgroup(N.mask) and G.is_normal(N.mask)):
        raise ContractError("odd-order elements do not form a normal subgroup")
    return N


def normal_sylow(G: FiniteGroup, ell: int) -> Optional[NormalSubgroup]:
    """The ell-Sylow subgroup when it is normal (equivalently unique), else None."""
    n = G.n
    part = 1
    while n % ell == 0:
        n //= ell
        part *= ell
    o = G.orders
    mask = np.zeros(G.n, dtype=bool)
    for g in range(G.n):
        k = int(o[g])
        while k % ell == 0:
            k //= ell
        mask[g] = k == 1
    if mask.sum() != part:
        return None
    return NormalSubgroup.from_mask(G, mask)


# -- Frattini ------------------------------------------------------------------


def maximal_subgroups(G: FiniteGroup, guard: int = DEFAULT_FRATTINI_GUARD) -> list[np.ndarray]:
    subs = finite.all_subgroups(G, guard)
    proper = [m for m in subs if m.sum() < G.n]
    out = []
    for m in proper:
        if not any((h.sum() > m.sum()) and not (m & ~h).any() for h in proper):
            out.append(m)
    return out


def frattini(Q: FiniteGroup, guard: int = DEFAULT_FRATTINI_GUARD) -> NormalSubgroup:
    """Intersection of the maximal subgroups, via the full subgroup lattice."""
    mask = np.ones(Q.n, dtype=bool)
    for m in maximal_subgroups(Q, guard):
        mask &= m
    return NormalSubgroup.from_mask(Q, mask)


def is_frattini_cover(f: Homomorphism, guard: int = DEFAULT_FRATTINI_GUARD) -> bool:
    """True iff no proper subgroup of the source maps onto the target.

    Both the kernel test (ker f within Phi) and the onto-subgroup scan run;
    disagreement is raised as a contract error.
    """
    if not f.is_surjective():
        raise ContractError("map is not surjective")
    Q1 = f.source
    phi = frattini(Q1, guard)
    via_kernel = bool(not (f.kernel_mask() & ~phi.mask).any())
    via_subgroups = True
    for m in finite.all_subgroups(Q1, guard):
        if m.sum() < Q1.n and len(np.unique(f.image[m])) == f.target.n:
            via_subgroups = False
            break
    if via_kernel != via_subgroups:
        raise ContractError("Frattini routes disagree")
    return via_kernel


# -- fiber products ------------------------------------------------------------


def fiber_product(f: Homomorphism, g: Homomorphism) -> FiniteGroup:
    """{(a, b) : f(a) = g(b)} inside Q1 x Q2, as a group of its own."""
    if f.target is not g.target and f.target.n != g.target.n:
        raise ContractError("maps to different targets")
    if not (f.is_surjective() and g.is_surjective()):
        raise ContractError("fiber product needs surjections")
    Q1, Q2 = f.source, g.source
    pairs = [(a, b) for a in range(Q1.n) for b in np.flatnonzero(g.image == f.image[a])]
    pos = {pr: i for i, pr in enumerate(pairs)}
    A = np.array([a for a, _ in pairs])
    B = np.array([b for _, b in pairs])
    TA = Q1.table[np.ix_(A, A)]
    TB = Q2.table[np.ix_(B, B)]
    code = {a * Q2.n + b: i for (a, b), i in pos.items()}
    flat = TA.astype(np.int64) * Q2.n + TB
    lookup = np.vectorize(code.__getitem__)
    table = lookup(flat)
    ident = pos[(Q1.identity, Q2.identity)]
    fp = FiniteGroup(table, ident, f"{Q1.name}x_{f.target.name}{Q2.name}")
    fp.pairs = pairs
    return fp
