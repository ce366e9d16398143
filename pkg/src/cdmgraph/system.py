"""The complete system S(G) of a finite group as a relational structure.

Elements are cosets gN of the normal subgroups in a declared family.  Each
is stored once and addressed by a global integer id; :class:`SystemElement`
is the readable (subgroup id, minimal representative) form.

Order convention: ``leq(gN, hM)`` holds when N is contained in M, so the
identity coset of the whole group is the top element and the trivial
subgroup's class is the bottom.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from . import subgroups as sg
from .errors import ClosureError, ContractError
from .finite import FiniteGroup


@dataclass(frozen=True, order=True)
class SystemElement:
    subgroup_id: int
    rep: int


class System:
    """S(G) over a family of normal subgroups closed under products and intersections."""

    def __init__(self, group: FiniteGroup, subgroups: Sequence[sg.NormalSubgroup]):
        self.group = group
        self.subgroups = list(subgroups)
        self.key_to_id = {N.key: i for i, N in enumerate(self.subgroups)}
        if len(self.key_to_id) != len(self.subgroups):
            raise ContractError("duplicate subgroup in family")
        masks = np.array([N.mask for N in self.subgroups])
        # incl[i, j]: N_i is contained in N_j
        m = masks.astype(np.int32)
        self.incl = (m @ (1 - m).T) == 0
        self.reps = [np.unique(N.coset_labels) for N in self.subgroups]
        sizes = [len(r) for r in self.reps]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        self.sub_of = np.repeat(np.arange(len(sizes)), sizes)
        self.rep_of = np.concatenate(self.reps) if sizes else np.array([], dtype=np.int64)
        self.index = np.array(sizes, dtype=np.int64)

    def __repr__(self):
        return f"System({self.group.name!r}, classes={len(self.subgroups)}, elements={len(self)})"

    def __len__(self) -> int:
        return int(self.offsets[-1])

    @property
    def n_classes(self) -> int:
        return len(self.subgroups)

    # -- addressing --------------------------------------------------------

    def element(self, gid: int) -> SystemElement:
        return SystemElement(int(self.sub_of[gid]), int(self.rep_of[gid]))

    def gid(self, a) -> int:
        if isinstance(a, (int, np.integer)):
            if not 0 <= a < len(self):
                raise ContractError(f"element id {a} out of range")
            return int(a)
        if not isinstance(a, SystemElement) or not 0 <= a.subgroup_id < self.n_classes:
            raise ContractError(f"{a!r} is not an element of this system")
        reps = self.reps[a.subgroup_id]
        k = int(np.searchsorted(reps, a.rep))
        if k >= len(reps) or reps[k] != a.rep:
            raise ContractError(f"{a!r} is not a canonical coset of its subgroup")
        return int(self.offsets[a.subgroup_id] + k)

    def identity_element(self, subgroup_id: int) -> int:
        """Global id of the identity coset N (its minimal rep is the identity)."""
        return self.gid(SystemElement(subgroup_id, int(self.labels(subgroup_id)[self.group.identity])))

    def coset(self, g: int, subgroup_id: int) -> int:
        return self.gid(SystemElement(subgroup_id, int(self.labels(subgroup_id)[g])))

    def elements_of_class(self, subgroup_id: int) -> np.ndarray:
        return np.arange(self.offsets[subgroup_id], self.offsets[subgroup_id + 1])

    def labels(self, subgroup_id: int) -> np.ndarray:
        return self.subgroups[subgroup_id].coset_labels

    def subgroup_id(self, N: sg.NormalSubgroup) -> int:
        try:
            return self.key_to_id[N.key]
        except KeyError:
            raise ClosureError("subgroup is not in the declared family") from None

    @cached_property
    def whole_id(self) -> int:
        return int(np.argmin(self.index))

    @cached_property
    def trivial_id(self) -> int:
        return int(np.argmax(self.index))

    # -- relations ---------------------------------------------------------

    def leq(self, a, b) -> bool:
        a, b = self.gid(a), self.gid(b)
        return bool(self.incl[self.sub_of[a], self.sub_of[b]])

    def c(self, a, b) -> bool:
        """C(gN, hM): N within M and gM = hM."""
        a, b = self.gid(a), self.gid(b)
        i, j = self.sub_of[a], self.sub_of[b]
        return bool(self.incl[i, j] and self.labels(j)[self.rep_of[a]] == self.rep_of[b])

    def p(self, a, b, c) -> bool:
        """P(g1N, g2N, g3N): one subgroup and g1 g2 N = g3 N."""
        a, b, c = self.gid(a), self.gid(b), self.gid(c)
        i = self.sub_of[a]
        if self.sub_of[b] != i or self.sub_of[c] != i:
            return False
        prod = self.group.table[self.rep_of[a], self.rep_of[b]]
        return bool(self.labels(i)[prod] == self.rep_of[c])

    def in_sort(self, a, n: int) -> bool:
        return bool(self.index[self.sub_of[self.gid(a)]] <= n)

    def sort_extent(self, n: int) -> np.ndarray:
        """Global ids of every element of sort X_n."""
        return np.flatnonzero(self.index[self.sub_of] <= n)

    def equivalent(self, a, b) -> bool:
        return self.leq(a, b) and self.leq(b, a)

    # -- classes -----------------------------------------------------------

    def class_group(self, subgroup_id: int) -> sg.QuotientGroup:
        return self._quotients(subgroup_id)

    def _quotients(self, i: int):
        cache = self.__dict__.setdefault("_qcache", {})
        if i not in cache:
            cache[i] = sg.QuotientGroup(self.group, self.subgroups[i])
        return cache[i]

    @cached_property
    def primes(self) -> tuple[int, int]:
        return sg.params_of(self.group)

    def tag(self, subgroup_id: int) -> sg.IsoTag:
        cache = self.__dict__.setdefault("_tcache", {})
        if subgroup_id not in cache:
            p, q = self.primes
            cache[subgroup_id] = sg.iso_tag(self._quotients(subgroup_id), p, q)
        return cache[subgroup_id]

    def ids_with_tag(self, name: str) -> list[int]:
        return [i for i in range(self.n_classes) if str(self.tag(i)) == name]

    def meet_id(self, i: int, j: int) -> int:
        return self.subgroup_id(sg.combine(self.subgroups[i], self.subgroups[j], "intersection"))

    def join_id(self, i: int, j: int) -> int:
        return self.subgroup_id(sg.combine(self.subgroups[i], self.subgroups[j], "product"))

    def meet_all(self, ids: Iterable[int]) -> int:
        ids = list(ids)
        if not ids:
            return self.whole_id
        mask = np.ones(self.group.n, dtype=bool)
        for i in ids:
            mask &= self.subgroups[i].mask
        return self.subgroup_id(sg.NormalSubgroup.from_mask(self.group, mask))

    def class_id(self, a) -> int:
        return int(self.sub_of[self.gid(a)])


def build_system(parent, subgroups: Optional[Sequence[sg.NormalSubgroup]] = None, check: bool = True,
                 max_order: int = sg.DEFAULT_MAX_ORDER) -> System:
    """S(G); the family defaults to every normal subgroup."""
    G = sg.as_finite(parent, max_order)
    if subgroups is None:
        subgroups = sg.enumerate_normal(G, max_order)
    elif check:
        for N in subgroups:
            if N.parent is not G or not G.is_subgroup(N.mask) or not G.is_normal(N.mask):
                raise ContractError("family member is not a normal subgroup of the parent")
    return System(G, subgroups)


def holds(S: System, rel: str, *args) -> bool:
    """Evaluate ``leq``, ``c``, ``p`` or ``in`` (last argument a sort bound)."""
    rel = rel.lower()
    if rel == "leq":
        return S.leq(*args)
    if rel == "c":
        return S.c(*args)
    if rel == "p":
        return S.p(*args)
    if rel in ("in", "sortmem"):
        a, n = args
        return S.in_sort(a, n)
    raise ContractError(f"unknown relation {rel!r}")


def class_lattice(S: System, a, b, mode: str) -> int:
    """Identity coset of [N n M] (``meet``) or [NM] (``join``), as a global id."""
    i, j = S.class_id(a), S.class_id(b)
    if mode == "meet":
        return S.identity_element(S.meet_id(i, j))
    if mode == "join":
        return S.identity_element(S.join_id(i, j))
    raise ContractError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class Subsystem:
    """A subsystem, recorded by the subgroup ids whose cosets it contains."""

    members: frozenset

    def __contains__(self, subgroup_id) -> bool:
        return subgroup_id in self.members

    def __le__(self, other: "Subsystem") -> bool:
        return self.members <= other.members

    def __len__(self):
        return len(self.members)

    def sorted(self) -> list[int]:
        return sorted(self.members)


def _filter_above(S: System, bottom: int) -> Subsystem:
    return Subsystem(frozenset(np.flatnonzero(S.incl[bottom]).tolist()))


def generate_subsystem(S: System, A: Iterable = (), classes: Iterable[int] = ()) -> Subsystem:
    """Least subsystem containing the elements ``A`` (and whole ``classes``).

    Closing under meets and then upwards yields the filter above the meet of
    everything given; the empty set gives the whole-group class alone.
    """
    ids = {S.class_id(a) for a in A} | {int(i) for i in classes}
    return _filter_above(S, S.meet_all(sorted(ids)))


def subsystem_join(S: System, X: Subsystem, Y: Subsystem) -> Subsystem:
    return generate_subsystem(S, classes=X.members | Y.members)


def subsystem_meet(S: System, X: Subsystem, Y: Subsystem) -> Subsystem:
    return Subsystem(X.members & Y.members)


def is_subsystem(S: System, X: Subsystem) -> bool:
    ids = sorted(X.members)
    for i in ids:
        if not set(np.flatnonzero(S.incl[i]).tolist()) <= X.members:
            return False
        for j in ids:
            if S.meet_id(i, j) not in X.members:
                return False
    return True


def minus_plus(S: System) -> tuple[Subsystem, Subsystem]:
    """S- from the Dp and W classes, S+ adding the C2 classes."""
    core = [i for i in range(S.n_classes) if str(S.tag(i)) in ("Dp", "W")]
    c2 = [i for i in range(S.n_classes) if str(S.tag(i)) == "C2"]
    return generate_subsystem(S, classes=core), generate_subsystem(S, classes=core + c2)


def inverse_limit(S: System) -> FiniteGroup:
    """Rebuild a group from the system alone: compatible threads through all classes.

    Each thread is fixed by its bottom-class coordinate; C must send it to a
    single element of every class, and the group law comes from P there.
    """
    bottom = S.trivial_id
    pool = S.elements_of_class(bottom)
    for a in pool:
        for j in range(S.n_classes):
            images = [b for b in S.elements_of_class(j) if S.c(int(a), int(b))]
            if len(images) != 1:
                raise ContractError("C is not a function from the bottom class")
    n = len(pool)
    table = np.empty((n, n), dtype=np.int64)
    for x, a in enumerate(pool):
        for y, b in enumerate(pool):
            hits = [z for z, c in enumerate(pool) if S.p(int(a), int(b), int(c))]
            if len(hits) != 1:
                raise ContractError("P is not a group law on the bottom class")
            table[x, y] = hits[0]
    ident = next(z for z, c in enumerate(pool) if all(table[z, y] == y for y in range(n)))
    return FiniteGroup(table, ident, f"lim S({S.group.name})")


# -- export ------------------------------------------------------------------


def export_json(S: System, relations: bool = False) -> dict:
    out = {
        "group": S.group.name,
        "order": S.group.n,
        "subgroups": [
            {"id": i, "order": N.order, "index": N.index, "gens": N.gens, "tag": str(S.tag(i))}
            for i, N in enumerate(S.subgroups)
        ],
        "elements": [[int(S.sub_of[k]), int(S.rep_of[k])] for k in range(len(S))],
    }
    structured = getattr(S.group, "structured", None)
    if structured is not None:
        out["params"] = structured.params.describe()
    if relations:
        out["leq"] = [[i, j] for i in range(S.n_classes) for j in range(S.n_classes) if S.incl[i, j]]
    return out


def export_dot(S: System) -> str:
    """Hasse diagram of the class poset, labelled with iso tags."""
    lines = ["digraph classes {", "  rankdir=BT;"]
    for i, N in enumerate(S.subgroups):
        lines.append(f'  n{i} [label="{i}: {S.tag(i)} (index {N.index})"];')
    for i in range(S.n_classes):
        for j in range(S.n_classes):
            if i == j or not S.incl[i, j]:
                continue
            covered = any(k not in (i, j) and S.incl[i, k] and S.incl[k, j] for k in range(S.n_classes))
            if not covered:
                lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)
