"""Finite groups given by Cayley tables, homomorphisms and isomorphism search.

Elements are the integers ``0..n-1``.  For a structured group the integer is
the canonical encoding, so tables built here line up with :mod:`core`.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import BudgetError, ContractError


def _index_dtype(n: int):
    return np.int16 if n < 2 ** 15 else np.int32


class FiniteGroup:
    """A group stored as an ``n x n`` multiplication table."""

    def __init__(self, table, identity: int = 0, name: str = "", structured=None):
        table = np.asarray(table)
        n = table.shape[0]
        if table.shape != (n, n):
            raise ContractError("table must be square")
        self.table = table.astype(_index_dtype(n), copy=False)
        self.n = n
        self.identity = int(identity)
        self.name = name or f"group of order {n}"
        self.structured = structured

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.n})"

    def __len__(self):
        return self.n

    @property
    def order(self) -> int:
        return self.n

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @cached_property
    def inverse(self) -> np.ndarray:
        rows, cols = np.nonzero(self.table == self.identity)
        inv = np.empty(self.n, dtype=np.int64)
        inv[rows] = cols
        return inv

    @cached_property
    def orders(self) -> np.ndarray:
        idx = np.arange(self.n)
        out = np.zeros(self.n, dtype=np.int64)
        cur = idx.copy()
        k = 1
        while True:
            hit = (cur == self.identity) & (out == 0)
            out[hit] = k
            if (out > 0).all():
                return out
            cur = self.table[cur, idx].astype(np.int64)
            k += 1

    def power(self, a: int, k: int) -> int:
        k %= int(self.orders[a])
        r = self.identity
        for _ in range(k):
            r = int(self.table[r, a])
        return r

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def check_axioms(self) -> tuple[bool, Optional[tuple]]:
        """Exhaustive identity, inverse and associativity check.

        Returns ``(ok, counterexample)`` where the counterexample is a triple
        ``(a, b, c)`` with ``(ab)c != a(bc)`` or a single element.
        """
        T = self.table.astype(np.int64)
        e = self.identity
        idx = np.arange(self.n)
        if not ((T[e] == idx).all() and (T[:, e] == idx).all()):
            bad = int(np.flatnonzero((T[e] != idx) | (T[:, e] != idx))[0])
            return False, (bad,)
        if not ((T == e).sum(axis=1) == 1).all():
            bad = int(np.flatnonzero((T == e).sum(axis=1) != 1)[0])
            return False, (bad,)
        for a in range(self.n):
            # (a b) c over all b, c vs a (b c)
            left = T[T[a]]
            right = T[a][T]
            if not np.array_equal(left, right):
                b, c = np.argwhere(left != right)[0]
                return False, (a, int(b), int(c))
        return True, None

    # -- subgroups ----------------------------------------------------------

    def generated(self, gens: Iterable[int], start=None) -> np.ndarray:
        """Boolean mask of the subgroup generated by ``gens`` (and ``start``)."""
        gens = np.unique(np.asarray(list(gens), dtype=np.int64))
        mask = np.zeros(self.n, dtype=bool)
        mask[self.identity] = True
        if start is not None:
            mask |= start
        frontier = np.flatnonzero(mask)
        if len(gens) == 0:
            return mask
        while len(frontier):
            new = self.table[np.ix_(frontier, gens)].ravel()
            new = np.unique(new[~mask[new]])
            mask[new] = True
            frontier = new
        return mask

    def generators_of(self, mask: np.ndarray) -> list[int]:
        """A small generating set for the subgroup ``mask`` (greedy, ascending)."""
        gens: list[int] = []
        cur = np.zeros(self.n, dtype=bool)
        cur[self.identity] = True
        orders = self.orders
        elems = np.flatnonzero(mask)
        # prefer high-order elements so fewer generators are needed
        ranked = elems[np.lexsort((elems, -orders[elems]))]
        for g in ranked:
            if cur.all() or (cur == mask).all():
                break
            if not cur[g]:
                gens.append(int(g))
                cur = self.generated(gens, start=cur)
        return sorted(gens)

    @cached_property
    def generators(self) -> list[int]:
        if self.structured is not None:
            return sorted(self.structured.generators())
        return self.generators_of(np.ones(self.n, dtype=bool))

    @cached_property
    def class_labels(self) -> np.ndarray:
        """Conjugacy-class label (the minimal member) of every element."""
        T = self.table.astype(np.int64)
        inv = self.inverse
        perms = []
        for g in self.generators:
            perm = T[T[inv[g]], g]
            perms += [perm, np.argsort(perm)]
        labels = np.arange(self.n)
        while True:
            new = labels
            for perm in perms:
                new = np.minimum(new, new[perm])
            if np.array_equal(new, labels):
                return labels
            labels = new

    @cached_property
    def conjugacy_classes(self) -> list[np.ndarray]:
        labels = self.class_labels
        order = np.argsort(labels, kind="stable")
        _, starts = np.unique(labels[order], return_index=True)
        return [np.sort(c) for c in np.split(order, starts[1:])]

    def is_normal(self, mask: np.ndarray) -> bool:
        elems = np.flatnonzero(mask)
        T = self.table
        inv = self.inverse
        for g in self.generators:
            conj = T[T[inv[g], elems], g]
            if not mask[conj].all():
                return False
        return True

    def is_subgroup(self, mask: np.ndarray) -> bool:
        elems = np.flatnonzero(mask)
        if not mask[self.identity]:
            return False
        return bool(mask[self.table[np.ix_(elems, elems)]].all())

    def coset_labels(self, mask: np.ndarray) -> np.ndarray:
        """Minimal element of each left coset gH."""
        members = np.flatnonzero(mask)
        if len(members) <= 64:
            return self.table[:, members].min(axis=1).astype(np.int64)
        labels = np.full(self.n, -1, dtype=np.int64)
        for g in range(self.n):
            if labels[g] < 0:
                labels[self.table[g, members]] = g
        return labels

    @cached_property
    def order_profile(self) -> tuple:
        vals, counts = np.unique(self.orders, return_counts=True)
        return tuple(zip(vals.tolist(), counts.tolist()))

    @cached_property
    def class_profile(self) -> tuple:
        sig = {}
        for c in self.conjugacy_classes:
            key = (int(self.orders[c[0]]), len(c))
            sig[key] = sig.get(key, 0) + 1
        return tuple(sorted(sig.items()))


# -- constructions ----------------------------------------------------------


def cyclic(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, 0, f"C{n}")


def dihedral(m: int) -> FiniteGroup:
    """Dihedral group of order 2m; element (y, x) stored as ``2*y + x``."""
    n = 2 * m
    idx = np.arange(n)
    y, x = idx // 2, idx % 2
    sign = 1 - 2 * x
    Y = (y[:, None] + sign[:, None] * y[None, :]) % m
    X = x[:, None] ^ x[None, :]
    return FiniteGroup(2 * Y + X, 0, f"D{m}")


def elementary_abelian(k: int) -> FiniteGroup:
    idx = np.arange(2 ** k)
    return FiniteGroup(idx[:, None] ^ idx[None, :], 0, f"C2^{k}")


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Element (g, h) stored as ``g * |H| + h``."""
    a = np.arange(G.n * H.n)
    g, h = a // H.n, a % H.n
    T = G.table[np.ix_(g, g)].astype(np.int64) * H.n + H.table[np.ix_(h, h)]
    return FiniteGroup(T, G.identity * H.n + H.identity, f"{G.name}x{H.name}")


def from_elements(elements: Sequence, name: str = "") -> FiniteGroup:
    """Cayley table of a list of hashable elements supporting ``*``."""
    pos = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    T = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            T[i, j] = pos[a * b]
    ident = next(i for i in range(n) if all(T[i, j] == j for j in range(n)))
    return FiniteGroup(T, ident, name)


# -- homomorphisms ----------------------------------------------------------


class Homomorphism:
    """An extensional map ``image[g]`` between finite groups, checked on creation."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, image, check: bool = True):
        self.source = source
        self.target = target
        self.image = np.asarray(image, dtype=np.int64)
        if check and not self.is_homomorphism():
            raise ContractError("map is not a homomorphism")

    def __call__(self, g: int) -> int:
        return int(self.image[g])

    def is_homomorphism(self) -> bool:
        S, T = self.source, self.target
        img = self.image
        if len(img) != S.n:
            return False
        for g in S.generators:
            lhs = img[S.table[:, g].astype(np.int64)]
            rhs = T.table[img, img[g]]
            if not np.array_equal(lhs, rhs):
                return False
        return int(img[S.identity]) == T.identity

    def is_surjective(self) -> bool:
        return len(np.unique(self.image)) == self.target.n

    def is_injective(self) -> bool:
        return len(np.unique(self.image)) == self.source.n

    def kernel_mask(self) -> np.ndarray:
        return self.image == self.target.identity

    def compose(self, other: "Homomorphism") -> "Homomorphism":
        """``other`` after ``self``."""
        return Homomorphism(self.source, other.target, other.image[self.image], check=False)

    @classmethod
    def from_generators(cls, source: FiniteGroup, target: FiniteGroup, gens: Sequence[int], images: Sequence[int]):
        img = extend_map(source, target, gens, images)
        if img is None:
            raise ContractError("generator images do not define a homomorphism")
        mask = img >= 0
        if not mask.all():
            raise ContractError("generators do not generate the source")
        return cls(source, target, img, check=False)


def extend_map(G: FiniteGroup, H: FiniteGroup, gens, images, injective: bool = False) -> Optional[np.ndarray]:
    """Extend ``gens -> images`` over ``<gens>`` by breadth-first words.

    Returns the partial image array (``-1`` off the subgroup) or ``None`` if
    the assignment is inconsistent (or not injective when requested).
    """
    img = np.full(G.n, -1, dtype=np.int64)
    img[G.identity] = H.identity
    gens = [int(g) for g in gens]
    ims = [int(h) for h in images]
    frontier = np.array([G.identity], dtype=np.int64)
    GT, HT = G.table, H.table
    while len(frontier):
        nxt = []
        for g, h in zip(gens, ims):
            prod = GT[frontier, g].astype(np.int64)
            want = HT[img[frontier], h].astype(np.int64)
            have = img[prod]
            known = have >= 0
            if (have[known] != want[known]).any():
                return None
            new = ~known
            if new.any():
                p, w = prod[new], want[new]
                # duplicates inside one batch must agree too
                order = np.argsort(p, kind="stable")
                p, w = p[order], w[order]
                first = np.ones(len(p), dtype=bool)
                first[1:] = p[1:] != p[:-1]
                grp = np.cumsum(first) - 1
                if (w != w[first][grp]).any():
                    return None
                img[p[first]] = w[first]
                nxt.append(p[first])
        frontier = np.concatenate(nxt) if nxt else np.array([], dtype=np.int64)
    if injective:
        vals = img[img >= 0]
        if len(np.unique(vals)) != len(vals):
            return None
    return img


def rare_generators(G: FiniteGroup) -> list[int]:
    """A generating set chosen greedily from elements with rare (order, class size)."""
    sizes = np.zeros(G.n, dtype=np.int64)
    for c in G.conjugacy_classes:
        sizes[c] = len(c)
    key = {}
    for g in range(G.n):
        k = (int(G.orders[g]), int(sizes[g]))
        key[k] = key.get(k, 0) + 1
    freq = np.array([key[(int(G.orders[g]), int(sizes[g]))] for g in range(G.n)])
    ranked = np.lexsort((np.arange(G.n), -G.orders, freq))
    gens: list[int] = []
    cur = np.zeros(G.n, dtype=bool)
    cur[G.identity] = True
    for g in ranked:
        if cur.all():
            break
        if not cur[g]:
            gens.append(int(g))
            cur = G.generated(gens, start=cur)
    return gens


def iter_isomorphisms(G: FiniteGroup, H: FiniteGroup, up_to_inner: bool = False) -> Iterator[np.ndarray]:
    """Yield isomorphisms ``G -> H`` as image arrays.

    Generators of ``G`` are chosen from rare element types; candidate images
    must match order and class size.  With ``up_to_inner`` the first image
    only ranges over class representatives, which still finds one map in
    every coset of Inn(H) and is enough for existence questions.
    """
    if G.n != H.n or G.order_profile != H.order_profile or G.class_profile != H.class_profile:
        return
    gens = rare_generators(G)

    def signature(X: FiniteGroup):
        sizes = np.zeros(X.n, dtype=np.int64)
        for c in X.conjugacy_classes:
            sizes[c] = len(c)
        return X.orders, sizes

    go, gs = signature(G)
    ho, hs = signature(H)
    cands = []
    for i, g in enumerate(gens):
        c = np.flatnonzero((ho == go[g]) & (hs == gs[g]))
        if i == 0 and up_to_inner:
            reps = np.unique(H.class_labels[c])
            c = reps
        cands.append([int(x) for x in c])

    def rec(depth: int, chosen: list[int]):
        if depth == len(gens):
            img = extend_map(G, H, gens, chosen, injective=True)
            if img is not None and (img >= 0).all():
                yield img
            return
        for h in cands[depth]:
            trial = chosen + [h]
            img = extend_map(G, H, gens[: depth + 1], trial, injective=True)
            if img is None:
                continue
            yield from rec(depth + 1, trial)

    yield from rec(0, [])


def find_isomorphism(G: FiniteGroup, H: FiniteGroup) -> Optional[np.ndarray]:
    for img in iter_isomorphisms(G, H, up_to_inner=True):
        return img
    return None


def automorphisms(G: FiniteGroup, limit: int = 100000) -> list[np.ndarray]:
    out = []
    for img in iter_isomorphisms(G, G):
        out.append(img)
        if len(out) > limit:
            raise BudgetError(f"more than {limit} automorphisms")
    return out


def all_subgroups(G: FiniteGroup, guard: int = 500, max_count: int = 20000) -> list[np.ndarray]:
    """Every subgroup, as boolean masks: cyclic subgroups closed under joins."""
    if G.n > guard:
        raise BudgetError(f"subgroup lattice of a group of order {G.n} exceeds the guard {guard}")
    seen = {}
    cyclic_masks = []
    for g in range(G.n):
        m = G.generated([g])
        key = np.packbits(m).tobytes()
        if key not in seen:
            seen[key] = m
            cyclic_masks.append((g, m))
    subgroups = {k: m for k, m in seen.items()}
    work = [([g], m) for g, m in cyclic_masks]
    while work:
        gens, H = work.pop()
        for g, _ in cyclic_masks:
            if H[g]:
                continue
            K = G.generated(gens + [g], start=H)
            key = np.packbits(K).tobytes()
            if key not in subgroups:
                subgroups[key] = K
                work.append((gens + [g], K))
                if len(subgroups) > max_count:
                    raise BudgetError("too many subgroups")
    masks = list(subgroups.values())
    masks.sort(key=lambda m: (int(m.sum()), np.flatnonzero(m).tolist()))
    return masks
