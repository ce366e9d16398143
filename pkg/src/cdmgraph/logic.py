"""Formulas over the relational language of complete systems.

Grammar (loosest binding first)::

    formula  := quant | impl
    quant    := ("exists" | "forall") VAR ":" "X[" INT "]" "." formula
    impl     := disj ("->" formula)?            right associative
    disj     := conj ("|" conj)*
    conj     := unary ("&" unary)*
    unary    := "!" unary | atom | "(" formula ")" | quant
    atom     := leq(s,t) | c(s,t) | p(s,t,u) | s = t | in(s, X[n])
              | iso(s, TAG) | true | false

A quantifier body extends as far right as possible.  Sorts overlap: a
variable bound to ``X[n]`` ranges over every coset of index at most n.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import ContractError, ParseError

ISO_TAGS = ("Trivial", "C2", "Cp", "Cq", "Dp", "Dq", "DpXDp", "W", "Other")


# -- AST -----------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Rel:
    """leq / c / p / eq over variables."""

    name: str
    args: tuple
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class InSort:
    var: Var
    n: int
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class IsoClass:
    """iso(x, A): a definable abbreviation, evaluated through the class's iso tag."""

    var: Var
    tag: str
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Const:
    value: bool
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Not:
    body: object
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # "&", "|", "->"
    left: object
    right: object
    span: tuple = field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Quant:
    kind: str  # "exists" | "forall"
    var: str
    sort: int
    body: object
    span: tuple = field(default=(0, 0), compare=False, repr=False)


Formula = Union[Rel, InSort, IsoClass, Const, Not, BinOp, Quant]

ARITY = {"leq": 2, "c": 2, "p": 3}


def free_vars(f) -> frozenset:
    if isinstance(f, Rel):
        return frozenset(a.name for a in f.args)
    if isinstance(f, (InSort, IsoClass)):
        return frozenset([f.var.name])
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, BinOp):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Quant):
        return free_vars(f.body) - {f.var}
    raise ContractError(f"not a formula node: {f!r}")


# -- lexer and parser -------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*(?:\(\d+\))?)|(?P<sym>[()\[\],.:!&|=]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos=pos + len(text[pos:]) - len(text[pos:].lstrip()))
        kind = m.lastgroup
        val = m.group(kind)
        out.append((kind, val, m.start(kind)))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val: str):
        t = self.take()
        if t[1] != val:
            got = t[1] or "end of input"
            raise ParseError(f"expected {val!r}, got {got!r}", pos=t[2])
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, pos=tok[2])

    def formula(self):
        t = self.peek()
        if t[1] in ("exists", "forall"):
            return self.quant()
        return self.impl()

    def quant(self):
        _, kind, start = self.take()
        name = self.take()
        if name[0] != "name":
            self.error("expected a variable after quantifier", name)
        if self.peek()[1] != ":":
            self.error(f"variable {name[1]!r} needs a sort annotation ':X[n]'")
        self.take()
        self.sort_ref()
        n = self.last_sort
        self.expect(".")
        body = self.formula()
        return Quant(kind, name[1], n, body, (start, self.peek()[2]))

    def sort_ref(self):
        t = self.take()
        if t[1] != "X":
            self.error("expected a sort X[n]", t)
        self.expect("[")
        num = self.take()
        if num[0] != "num":
            self.error("sort index must be a positive integer", num)
        n = int(num[1])
        if n < 1:
            self.error("sort index must be at least 1", num)
        self.expect("]")
        self.last_sort = n

    def impl(self):
        start = self.peek()[2]
        left = self.disj()
        if self.peek()[1] == "->":
            self.take()
            right = self.formula()
            return BinOp("->", left, right, (start, self.peek()[2]))
        return left

    def disj(self):
        start = self.peek()[2]
        left = self.conj()
        while self.peek()[1] == "|":
            self.take()
            right = self.quant() if self.peek()[1] in ("exists", "forall") else self.conj()
            left = BinOp("|", left, right, (start, self.peek()[2]))
        return left

    def conj(self):
        start = self.peek()[2]
        left = self.unary()
        while self.peek()[1] == "&":
            self.take()
            right = self.quant() if self.peek()[1] in ("exists", "forall") else self.unary()
            left = BinOp("&", left, right, (start, self.peek()[2]))
        return left

    def unary(self):
        t = self.peek()
        if t[1] == "!":
            self.take()
            body = self.quant() if self.peek()[1] in ("exists", "forall") else self.unary()
            return Not(body, (t[2], self.peek()[2]))
        if t[1] == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if t[1] in ("exists", "forall"):
            return self.quant()
        return self.atom()

    def var(self):
        t = self.take()
        if t[0] != "name" or t[1] in ("exists", "forall", "X"):
            self.error("expected a variable", t)
        return Var(t[1], (t[2], t[2] + len(t[1])))

    def atom(self):
        t = self.peek()
        if t[0] != "name":
            self.error(f"unexpected {t[1] or 'end of input'!r}")
        name = t[1]
        if name in ("true", "false"):
            self.take()
            return Const(name == "true", (t[2], t[2] + len(name)))
        nxt = self.toks[self.i + 1]
        if nxt[1] == "(" and name in ("leq", "c", "p", "in", "iso"):
            self.take()
            self.take()
            if name == "in":
                v = self.var()
                self.expect(",")
                self.sort_ref()
                end = self.expect(")")
                return InSort(v, self.last_sort, (t[2], end[2] + 1))
            if name == "iso":
                v = self.var()
                self.expect(",")
                tag = self.take()
                if tag[0] != "name" or not (tag[1] in ISO_TAGS or re.fullmatch(r"C2k\(\d+\)", tag[1])):
                    self.error(f"unknown iso tag {tag[1]!r}", tag)
                end = self.expect(")")
                return IsoClass(v, tag[1], (t[2], end[2] + 1))
            args = [self.var()]
            while self.peek()[1] == ",":
                self.take()
                args.append(self.var())
            end = self.expect(")")
            if len(args) != ARITY[name]:
                raise ParseError(f"{name} takes {ARITY[name]} arguments, got {len(args)}", pos=t[2])
            return Rel(name, tuple(args), (t[2], end[2] + 1))
        # equality
        left = self.var()
        if self.peek()[1] != "=":
            self.error(f"expected '=' after {left.name!r}")
        self.take()
        right = self.var()
        return Rel("eq", (left, right), (t[2], right.span[1]))


def parse_formula(text: str, free: Optional[Iterable[str]] = None):
    """Parse; when ``free`` is given, any other unbound variable is an error."""
    p = _Parser(text)
    f = p.formula()
    t = p.peek()
    if t[0] != "eof":
        raise ParseError(f"unexpected {t[1]!r} after the formula", pos=t[2])
    if free is not None:
        extra = sorted(free_vars(f) - set(free))
        if extra:
            raise ParseError(f"unbound variable {extra[0]!r}", pos=_first_use(f, extra[0]))
    return f


def _first_use(f, name) -> int:
    if isinstance(f, Rel):
        for a in f.args:
            if a.name == name:
                return a.span[0]
    if isinstance(f, (InSort, IsoClass)) and f.var.name == name:
        return f.var.span[0]
    for child in _children(f):
        if name in free_vars(child):
            return _first_use(child, name)
    return 0


def _children(f):
    if isinstance(f, Not):
        return [f.body]
    if isinstance(f, BinOp):
        return [f.left, f.right]
    if isinstance(f, Quant):
        return [f.body]
    return []


def pretty(f) -> str:
    """Fully parenthesised text that parses back to an equal AST."""
    if isinstance(f, Rel):
        if f.name == "eq":
            return f"{f.args[0].name} = {f.args[1].name}"
        return f"{f.name}({', '.join(a.name for a in f.args)})"
    if isinstance(f, InSort):
        return f"in({f.var.name}, X[{f.n}])"
    if isinstance(f, IsoClass):
        return f"iso({f.var.name}, {f.tag})"
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return f"!{pretty(f.body)}"
    if isinstance(f, BinOp):
        return f"({pretty(f.left)} {f.op} {pretty(f.right)})"
    if isinstance(f, Quant):
        return f"({f.kind} {f.var}:X[{f.sort}]. {pretty(f.body)})"
    raise ContractError(f"not a formula node: {f!r}")


# -- evaluation -----------------------------------------------------------------


class _Model:
    """Flat lookups over a System, so evaluation stays in plain Python."""

    def __init__(self, S):
        self.S = S
        self.sub = S.sub_of.tolist()
        self.rep = S.rep_of.tolist()
        self.index = S.index.tolist()
        self.incl = S.incl.tolist()
        self._labels = {}
        self._tags = {}
        self._extents = {}
        self.table = S.group.table

    def labels(self, i):
        if i not in self._labels:
            self._labels[i] = self.S.labels(i).tolist()
        return self._labels[i]

    def tag(self, i) -> str:
        if i not in self._tags:
            self._tags[i] = str(self.S.tag(i))
        return self._tags[i]

    def extent(self, n: int) -> list[int]:
        if n not in self._extents:
            self._extents[n] = self.S.sort_extent(n).tolist()
        return self._extents[n]

    def leq(self, a, b):
        return self.incl[self.sub[a]][self.sub[b]]

    def c(self, a, b):
        i, j = self.sub[a], self.sub[b]
        return self.incl[i][j] and self.labels(j)[self.rep[a]] == self.rep[b]

    def p(self, a, b, c):
        i = self.sub[a]
        if self.sub[b] != i or self.sub[c] != i:
            return False
        return self.labels(i)[int(self.table[self.rep[a], self.rep[b]])] == self.rep[c]


def _compile(f, slots: dict, M: _Model):
    """Turn a formula into a closure over an environment list."""
    if isinstance(f, Rel):
        idx = [slots[a.name] for a in f.args]
        if f.name == "eq":
            i, j = idx
            return lambda env: env[i] == env[j]
        if f.name == "leq":
            i, j = idx
            return lambda env: M.leq(env[i], env[j])
        if f.name == "c":
            i, j = idx
            return lambda env: M.c(env[i], env[j])
        if f.name == "p":
            i, j, k = idx
            return lambda env: M.p(env[i], env[j], env[k])
    if isinstance(f, InSort):
        i, n = slots[f.var.name], f.n
        return lambda env: M.index[M.sub[env[i]]] <= n
    if isinstance(f, IsoClass):
        i, tag = slots[f.var.name], f.tag
        return lambda env: M.tag(M.sub[env[i]]) == tag
    if isinstance(f, Const):
        v = f.value
        return lambda env: v
    if isinstance(f, Not):
        body = _compile(f.body, slots, M)
        return lambda env: not body(env)
    if isinstance(f, BinOp):
        a = _compile(f.left, slots, M)
        b = _compile(f.right, slots, M)
        if f.op == "&":
            return lambda env: a(env) and b(env)
        if f.op == "|":
            return lambda env: a(env) or b(env)
        return lambda env: (not a(env)) or b(env)
    if isinstance(f, Quant):
        inner = dict(slots)
        k = len(slots)
        inner[f.var] = k
        body = _compile(f.body, inner, M)
        extent = M.extent(f.sort)

        if f.kind == "exists":
            def ex(env):
                env = env[:k] + [None]
                for e in extent:
                    env[k] = e
                    if body(env):
                        return True
                return False

            return ex

        def fa(env):
            env = env[:k] + [None]
            for e in extent:
                env[k] = e
                if not body(env):
                    return False
            return True

        return fa
    raise ContractError(f"not a formula node: {f!r}")


def _model(S) -> _Model:
    cache = S.__dict__.setdefault("_logic_model", None)
    if cache is None:
        cache = _Model(S)
        S.__dict__["_logic_model"] = cache
    return cache


def evaluate(S, f, assignment: Optional[dict] = None, free: Optional[Iterable[str]] = None):
    """Truth value under ``assignment``, or the satisfying tuples of the free variables.

    With every free variable assigned, returns a bool.  Otherwise the
    unassigned free variables (sorted by name, or in the order of ``free``)
    range over the whole system and the result is a sorted list of global
    element ids (one free variable) or of id tuples.
    """
    if isinstance(f, str):
        f = parse_formula(f)
    assignment = dict(assignment or {})
    M = _model(S)
    fv = free_vars(f)
    unknown = set(assignment) - fv
    if unknown:
        raise ContractError(f"assignment names variables that are not free: {sorted(unknown)}")
    open_vars = list(free) if free is not None else sorted(fv - set(assignment))
    if set(open_vars) != fv - set(assignment):
        raise ContractError("free variables do not match the assignment")
    names = sorted(assignment) + open_vars
    slots = {n: i for i, n in enumerate(names)}
    fn = _compile(f, slots, M)
    base = [S.gid(assignment[n]) for n in sorted(assignment)]
    if not open_vars:
        return bool(fn(base))
    universe = range(len(S))
    out = []

    def rec(env):
        if len(env) == len(names):
            if fn(env):
                out.append(env[len(base):])
            return
        for e in universe:
            rec(env + [e])

    rec(base)
    if len(open_vars) == 1:
        return [t[0] for t in out]
    return [tuple(t) for t in out]


# -- builtin formulas -------------------------------------------------------------


def _and_all(parts):
    f = parts[0]
    for g in parts[1:]:
        f = BinOp("&", f, g)
    return f


def psi(n: int, p: int = 3, distinct: bool = False, var: str = "x"):
    """Vertex width at most n.

    ``x`` is an index-2 coset lying above the meet of n D_p classes.  The
    meet is expressed universally: every m of index at most (2p)^n below all
    the v_i is below x.  ``distinct`` adds pairwise inequivalence of the v_i.
    """
    if n < 1:
        raise ContractError("psi needs n >= 1")
    x = Var(var)
    vs = [Var(f"v{i}") for i in range(n)]
    m = Var("m")
    below = _and_all([Rel("leq", (m, v)) for v in vs])
    meet = Quant("forall", "m", (2 * p) ** n, BinOp("->", below, Rel("leq", (m, x))))
    body = meet
    for i in reversed(range(n)):
        conds = [IsoClass(vs[i], "Dp")]
        if distinct:
            conds += [Not(BinOp("&", Rel("leq", (vs[j], vs[i])), Rel("leq", (vs[i], vs[j])))) for j in range(i)]
        body = Quant("exists", vs[i].name, 2 * p, _and_all(conds + [body]))
    return _and_all([InSort(x, 2), Not(InSort(x, 1)), body])


def phi(n: int, p: int = 3, distinct: bool = False, var: str = "x"):
    """Vertex width exactly n."""
    if n == 1:
        return psi(1, p, distinct, var)
    return BinOp("&", psi(n, p, distinct, var), Not(psi(n - 1, p, distinct, var)))


def vertex_formula(var: str = "x", p: int = 3):
    x = Var(var)
    return _and_all([InSort(x, 2 * p), Rel("p", (x, x, x)), IsoClass(x, "Dp")])


def edge_formula(a: str = "x", b: str = "y", p: int = 3, q: int = 5):
    x, y, w = Var(a), Var(b), Var("w")
    exists_w = Quant("exists", "w", 4 * p * p * q,
                     _and_all([Rel("leq", (w, x)), Rel("leq", (w, y)), IsoClass(w, "W")]))
    return _and_all([vertex_formula(a, p), vertex_formula(b, p), Not(Rel("eq", (x, y))), exists_w])


def builtin(name: str, n: Optional[int] = None, p: int = 3, q: int = 5, **kw):
    """``psi``, ``phi`` (need n), ``vertex`` or ``edge``; also accepts ``"psi(2)"``."""
    m = re.fullmatch(r"(\w+)\((\d+)\)", name.strip())
    if m:
        name, n = m.group(1), int(m.group(2))
    if name == "psi":
        return psi(n, p, **kw)
    if name == "phi":
        return phi(n, p, **kw)
    if name == "vertex":
        return vertex_formula(p=p)
    if name == "edge":
        return edge_formula(p=p, q=q)
    raise ContractError(f"unknown builtin {name!r}")
