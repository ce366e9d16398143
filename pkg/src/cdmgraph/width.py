"""GF(2) duals of C2 classes: vertex width, independence, parity, graph closure.

Every index-2 normal subgroup of a structured group contains all odd-order
elements, so it is the preimage under xi of a hyperplane of F_2^(V u I).  The
nonzero functional with that kernel is read off on the unit reflections:
coordinate j is 1 exactly when (beta)_j falls outside the subgroup.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .core import DpElement, inject
from .core import encode as encode_element
from .errors import ContractError
from .system import Subsystem, System, generate_subsystem


class _Infinite:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    __str__ = __repr__

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


@dataclass(frozen=True)
class F2Vector:
    labels: tuple
    coords: tuple

    def __add__(self, other: "F2Vector") -> "F2Vector":
        if self.labels != other.labels:
            raise ContractError("vectors over different index sets")
        return F2Vector(self.labels, tuple(a ^ b for a, b in zip(self.coords, other.coords)))

    def support(self) -> tuple:
        return tuple(l for l, c in zip(self.labels, self.coords) if c)

    def as_int(self) -> int:
        return sum(c << k for k, c in enumerate(self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    @classmethod
    def unit(cls, labels: Sequence, at) -> "F2Vector":
        labels = tuple(labels)
        return cls(labels, tuple(int(l == at) for l in labels))


@dataclass(frozen=True)
class WidthReport:
    class_id: int
    width: Union[int, _Infinite]
    witnesses: tuple = ()

    @property
    def finite(self) -> bool:
        return self.width is not INFINITE

    def to_json(self) -> dict:
        return {
            "class": self.class_id,
            "width": "inf" if self.width is INFINITE else self.width,
            "witnesses": list(self.witnesses),
        }


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank of bit-packed GF(2) row vectors by elimination on leading bits."""
    basis: list[int] = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r:
            basis.append(r)
    return len(basis)


def _structured(S: System):
    st = getattr(S.group, "structured", None)
    if st is None:
        raise ContractError("dual vectors need a structured parent group")
    return st


def _require_c2(S: System, class_id: int):
    if str(S.tag(class_id)) != "C2":
        raise ContractError(f"class {class_id} is not a C2 class (tag {S.tag(class_id)})")


def dual_vector(S: System, alpha) -> F2Vector:
    """d([alpha]): coordinate j is 1 iff (beta)_j is not in alpha's subgroup."""
    cid = S.class_id(alpha)
    _require_c2(S, cid)
    st = _structured(S)
    P = st.params
    N = S.subgroups[cid]
    coords = []
    for j in P.x_labels:
        g = inject(DpElement.beta(P.p), j, P) if j in P.vertex_pos else inject(1, j, P)
        coords.append(0 if encode_element(g) in N else 1)
    return F2Vector(P.x_labels, tuple(coords))


def c2_classes(S: System) -> list[int]:
    return S.ids_with_tag("C2")


def vertex_names(S: System) -> dict:
    """D_p class id -> vertex label (ker pi_v), or the id as a string."""
    names = {i: str(i) for i in S.ids_with_tag("Dp")}
    st = getattr(S.group, "structured", None)
    if st is not None:
        for v in st.params.vertices:
            ker = st.vertex_kernel(v)
            for i in names:
                if np.array_equal(S.subgroups[i].elements, ker):
                    names[i] = v
    return names


def width_linear(S: System, alpha) -> WidthReport:
    cid = S.class_id(alpha)
    d = dual_vector(S, alpha)
    P = _structured(S).params
    support = d.support()
    if any(j in P.extra for j in support):
        return WidthReport(cid, INFINITE, ())
    return WidthReport(cid, len(support), tuple(sorted(support)))


def width_semantic(S: System, alpha) -> WidthReport:
    """Least n with alpha above a meet of n D_p classes (size-then-lex search)."""
    cid = S.class_id(alpha)
    _require_c2(S, cid)
    names = vertex_names(S)
    dp = sorted(names, key=lambda i: names[i])
    target = S.subgroups[cid].mask
    for n in range(1, len(dp) + 1):
        for combo in combinations(dp, n):
            mask = np.ones(S.group.n, dtype=bool)
            for i in combo:
                mask &= S.subgroups[i].mask
            if not (mask & ~target).any():
                return WidthReport(cid, n, tuple(sorted(names[i] for i in combo)))
    return WidthReport(cid, INFINITE, ())


def vertex_width(S: System, alpha, check: bool = True) -> WidthReport:
    """Width from the dual vector, cross-checked against the semantic search."""
    if getattr(S.group, "structured", None) is None:
        return width_semantic(S, alpha)
    lin = width_linear(S, alpha)
    if check:
        sem = width_semantic(S, alpha)
        if sem != lin:
            raise ContractError(f"width routes disagree on class {lin.class_id}: {lin} vs {sem}")
    return lin


def independent(S: System, classes: Sequence) -> bool:
    """GF(2) independence of the dual vectors; agrees with the lattice test."""
    ids = [S.class_id(a) for a in classes]
    for i in ids:
        _require_c2(S, i)
    linear = gf2_rank(dual_vector(S, S.identity_element(i)).as_int() for i in ids) == len(ids)
    lattice = independent_lattice(S, ids)
    if linear != lattice:
        raise ContractError("linear and lattice independence disagree")
    return linear


def independent_lattice(S: System, ids: Sequence[int]) -> bool:
    """gamma_i not above the meet of gamma_j, j < i, for every i."""
    mask = np.ones(S.group.n, dtype=bool)
    for i in ids:
        N = S.subgroups[i].mask
        if not (mask & ~N).any():
            return False
        mask &= N
    return True


def parity_mask(S: System, V0: Iterable[str]) -> np.ndarray:
    st = _structured(S)
    P = st.params
    V0 = list(V0)
    if not V0:
        raise ContractError("parity needs a nonempty vertex set")
    vec = np.zeros(len(P.x_labels), dtype=np.int64)
    for v in V0:
        if v not in P.x_pos:
            raise ContractError(f"unknown label {v!r}")
        vec[P.x_pos[v]] = 1
    return st.x_mask(vec)


def parity_element(S: System, V0: Iterable[str]) -> int:
    """Identity coset of the kernel of sum_{v in V0} e_v composed with xi."""
    from .subgroups import NormalSubgroup

    N = NormalSubgroup.from_mask(S.group, parity_mask(S, V0))
    return S.identity_element(S.subgroup_id(N))


def gcl(S: System, A: Iterable = (), classes: Iterable[int] = ()) -> Subsystem:
    """Graph closure: close under subsystems, width witnesses and edge W classes."""
    names = vertex_names(S)
    dp = set(names)
    w = set(S.ids_with_tag("W"))
    c2 = set(c2_classes(S))
    current = generate_subsystem(S, A, classes)
    while True:
        additions = set()
        for i in sorted(current.members):
            if i in c2:
                rep = width_semantic(S, S.identity_element(i))
                if rep.finite:
                    by_name = {v: k for k, v in names.items()}
                    additions.update(by_name[v] for v in rep.witnesses)
        members_dp = sorted(dp & current.members)
        for i, j in combinations(members_dp, 2):
            meet = S.subgroups[i].mask & S.subgroups[j].mask
            for k in sorted(w):
                if not (S.subgroups[k].mask & ~meet).any():
                    additions.add(k)
        if additions <= current.members:
            return current
        current = generate_subsystem(S, classes=current.members | additions)


def _meet_mask(S: System, ids: Iterable[int]) -> np.ndarray:
    mask = np.ones(S.group.n, dtype=bool)
    for i in ids:
        mask &= S.subgroups[i].mask
    return mask


def _above(S: System, i: int, mask: np.ndarray) -> bool:
    """Class i lies above the subgroup given by ``mask``."""
    return not (mask & ~S.subgroups[i].mask).any()


def exchange_failures(S: System, gammas: Sequence[int], alpha: int, steinitz: bool = False) -> list[int]:
    """Indices i where gamma_i >= alpha ^ meet_{j != i} gamma_j fails.

    Only meaningful when the gammas are independent and alpha lies above
    their meet.  With ``steinitz`` an index is checked only when alpha is not
    already above meet_{j != i} gamma_j, the hypothesis that vector-space
    exchange needs.
    """
    bad = []
    for i in range(len(gammas)):
        rest = [g for j, g in enumerate(gammas) if j != i]
        rest_mask = _meet_mask(S, rest)
        if steinitz and _above(S, alpha, rest_mask):
            continue
        if not _above(S, gammas[i], rest_mask & S.subgroups[alpha].mask):
            bad.append(i)
    return bad


def exchange_counterexample(S: System, max_k: int = 3, steinitz: bool = False) -> Optional[dict]:
    """First (gammas, alpha, i) violating exchange, scanning C2 classes in id order."""
    c2 = c2_classes(S)
    for k in range(1, max_k + 1):
        for gammas in combinations(c2, k):
            if not independent_lattice(S, gammas):
                continue
            meet = _meet_mask(S, gammas)
            for alpha in c2:
                if not _above(S, alpha, meet):
                    continue
                bad = exchange_failures(S, gammas, alpha, steinitz)
                if bad:
                    return {"gammas": list(gammas), "alpha": alpha, "i": bad[0]}
    return None
