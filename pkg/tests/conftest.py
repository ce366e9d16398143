import itertools
import os

import pytest
from hypothesis import HealthCheck, settings

from cdmgraph.codec import encode, parse_graph
from cdmgraph.core import decode, inv, mul
from cdmgraph.lemmas import build, instance

settings.register_profile("repo", max_examples=60, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
GRAPHS = os.path.join(ROOT, "data", "graphs")
FORMULAS = os.path.join(ROOT, "data", "formulas")
GOLDEN = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden")


def system_of(text):
    """(StructuredGroup, FiniteGroup, System) for an instance shorthand like "a-b +1"."""
    return build(instance(text))


@pytest.fixture(scope="session")
def d3():
    return system_of("a")


@pytest.fixture(scope="session")
def w_sys():
    return system_of("a-b")


@pytest.fixture(scope="session")
def pair_c2():
    return system_of("a b +1")


def oracle_normals(G):
    """Normal subgroups as unions of conjugacy classes closed under products.

    Uses only the element-level law (mul/inv on decoded elements), never the
    vectorised table or the enumeration under test.
    """
    P, n = G.params, G.order
    els = [decode(P, e) for e in range(n)]
    code = {(tuple(g.z), tuple(g.y), tuple(g.x)): i for i, g in enumerate(els)}

    def key(g):
        return code[(tuple(g.z), tuple(g.y), tuple(g.x))]

    tab = [[key(mul(a, b)) for b in els] for a in els]
    invs = [key(inv(a)) for a in els]
    seen, classes = set(), []
    for g in range(n):
        if g not in seen:
            c = {tab[tab[h][g]][invs[h]] for h in range(n)}
            seen |= c
            classes.append(sorted(c))
    ident = next(c for c in classes if 0 in c)
    others = [c for c in classes if 0 not in c]
    out = []
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            S = set(ident).union(*combo)
            if n % len(S) == 0 and all(tab[a][b] in S for a in S for b in S):
                out.append(tuple(sorted(S)))
    return sorted(out)


def group_of(text):
    return encode(parse_graph(text))[1]
