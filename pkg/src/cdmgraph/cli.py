"""Command-line entry point: ``cdmgraph <command> ...``.

Exit codes: 0 success, 1 a verification FAIL, 2 usage or input error,
3 budget exceeded.  Errors go to stderr prefixed ``error:``, ``parse:`` or
``budget:``.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import lemmas, logic
from . import subgroups as sg
from . import system as sysm
from . import width as wd
from .codec import Graph, decode, decode_structured, encode, is_isomorphic, parse_graph
from .core import is_prime
from .errors import BudgetError, CdmError, ParseError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    p: int = 3
    q: int = 5
    max_order: int = sg.DEFAULT_MAX_ORDER
    frattini_guard: int = sg.DEFAULT_FRATTINI_GUARD
    seed: int = 0
    output: str = "text"

    def __post_init__(self):
        if self.max_order < 1 or self.frattini_guard < 1:
            raise CdmError("guards must be positive")
        for r in (self.p, self.q):
            if r == 2 or not is_prime(r):
                raise CdmError(f"{r} is not an odd prime")
        if self.p == self.q:
            raise CdmError("p and q must differ")

    def as_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "max_order": self.max_order,
                "frattini_guard": self.frattini_guard, "seed": self.seed}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _globals(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--p", type=int, default=d(3), help="the small odd prime (default 3)")
    parser.add_argument("--q", type=int, default=d(5), help="the large odd prime (default 5)")
    parser.add_argument("--max-order", type=int, default=d(sg.DEFAULT_MAX_ORDER), help="group order guard")
    parser.add_argument("--frattini-guard", type=int, default=d(sg.DEFAULT_FRATTINI_GUARD),
                        help="subgroup-lattice guard for Frattini computations")
    parser.add_argument("--seed", type=int, default=d(0), help="seed for sampled checks")
    parser.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cdmgraph", description="Graphs coded as finite groups and their complete systems.")
    _globals(parser, suppress=False)
    common = _Parser(add_help=False)
    _globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("encode", parents=[common], help="group order and iso tag of a graph's group")
    s.add_argument("graph")
    s.add_argument("--c2", type=int, default=None, help="number of extra C2 factors (overrides the file)")

    s = sub.add_parser("decode", parents=[common], help="read the graph back from the group")
    s.add_argument("source", help="graph file or exported system JSON")
    s.add_argument("--oracle", action="store_true", help="decode from the enumerated system")

    s = sub.add_parser("nsubs", parents=[common], help="list all normal subgroups")
    s.add_argument("graph")

    s = sub.add_parser("width", parents=[common], help="vertex widths of the C2 classes")
    s.add_argument("graph")
    s.add_argument("--all", action="store_true", help="include infinite widths and cross-check the semantic search")

    s = sub.add_parser("gcl", parents=[common], help="graph closure of a set of system elements")
    s.add_argument("graph")
    s.add_argument("--elements", required=True, help="comma-separated global element ids")

    s = sub.add_parser("frattini", parents=[common], help="Frattini subgroup of the group")
    s.add_argument("graph")

    s = sub.add_parser("eval", parents=[common], help="evaluate a formula over the system")
    s.add_argument("graph")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("-f", "--formula-file")
    src.add_argument("-b", "--builtin", help="psi(n), phi(n), vertex or edge")

    s = sub.add_parser("verify", parents=[common], help="run lemma verifiers")
    s.add_argument("lemma", help="a lemma id or 'all'")
    s.add_argument("--instances", default="small", help="tiny, small, full, or a graph file")

    s = sub.add_parser("export", parents=[common], help="export the system")
    s.add_argument("graph")
    s.add_argument("--dot", action="store_true", help="Hasse diagram instead of system JSON")

    sub.add_parser("lemmas", parents=[common], help="list the registered lemma ids")
    return parser


# -- helpers ---------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CdmError(f"cannot read {path}: {exc.strerror}") from None


def _graph(path: str) -> Graph:
    return parse_graph(_read(path))


def _system(graph: Graph, cfg: RunConfig, c2: Optional[int] = None):
    params, G = encode(graph, c2, cfg.p, cfg.q)
    if G.order > cfg.max_order:
        raise BudgetError(f"group order {G.order} exceeds --max-order {cfg.max_order}")
    S = sysm.build_system(G, max_order=cfg.max_order)
    return params, G, S


def _element_json(S, gid: int) -> dict:
    e = S.element(gid)
    return {"id": gid, "class": e.subgroup_id, "rep": e.rep}


# -- commands --------------------------------------------------------------------


def cmd_encode(args, cfg):
    g = _graph(args.graph)
    params, G = encode(g, args.c2, cfg.p, cfg.q)
    if G.order > cfg.max_order:
        raise BudgetError(f"group order {G.order} exceeds --max-order {cfg.max_order}")
    tag = str(sg.iso_tag(G.as_finite(cfg.max_order), cfg.p, cfg.q)) if G.order <= sg.ISO_SEARCH_LIMIT else "Other"
    res = {"group": G.name, "order": G.order, "tag": tag, "params": params.describe()}
    text = [f"group {G.name}", f"order {G.order}", f"tag {tag}"]
    return EXIT_OK, [res], text


def _decode_system_json(data: dict, cfg) -> Graph:
    if "leq" not in data:
        P = data.get("params")
        if not P:
            raise CdmError("system JSON needs 'leq' relations or 'params'")
        g = Graph(tuple(P["vertices"]), frozenset(map(tuple, P["edges"])), len(P.get("extra", [])))
        return decode(_system(g, cfg)[2])
    tags = {s["id"]: s["tag"] for s in data["subgroups"]}
    leq = {tuple(pair) for pair in data["leq"]}
    dp = sorted(i for i, t in tags.items() if t == "Dp")
    w = [i for i, t in tags.items() if t == "W"]
    edges = set()
    for a in dp:
        for b in dp:
            if a < b and any((k, a) in leq and (k, b) in leq for k in w):
                edges.add((str(a), str(b)))
    return Graph(tuple(str(i) for i in dp), frozenset(edges))


def cmd_decode(args, cfg):
    text = _read(args.source)
    data = None
    if text.lstrip().startswith("{"):
        data = json.loads(text)
    if data is not None and "subgroups" in data:
        got = _decode_system_json(data, cfg)
        res = {"graph": got.to_json(), "route": "system-json"}
        return EXIT_OK, [res], [got.to_text().rstrip()]
    g = parse_graph(text)
    if args.oracle:
        got = decode(_system(g, cfg)[2])
        route = "oracle"
    else:
        got = decode_structured(encode(g, None, cfg.p, cfg.q)[1])
        route = "structured"
    same = is_isomorphic(got, g.without_c2())
    res = {"graph": got.to_json(), "route": route, "isomorphic_to_input": same}
    lines = [got.to_text().rstrip(), f"isomorphic to input: {'yes' if same else 'NO'}"]
    return (EXIT_OK if same else EXIT_FAIL), [res], lines


def cmd_nsubs(args, cfg):
    _, _, S = _system(_graph(args.graph), cfg)
    res = [{"id": i, "order": N.order, "index": N.index, "gens": N.gens, "tag": str(S.tag(i))}
           for i, N in enumerate(S.subgroups)]
    lines = [f"{len(res)} normal subgroups"]
    lines += [f"{i:3d} {N.golden_line()} tag={S.tag(i)}" for i, N in enumerate(S.subgroups)]
    return EXIT_OK, res, lines


def cmd_width(args, cfg):
    _, _, S = _system(_graph(args.graph), cfg)
    res, lines = [], []
    for cid in wd.c2_classes(S):
        a = S.identity_element(cid)
        rep = wd.vertex_width(S, a, check=args.all)
        if not rep.finite and not args.all:
            continue
        d = wd.dual_vector(S, a)
        item = rep.to_json()
        item["dual"] = list(d.support())
        res.append(item)
        w = "inf" if not rep.finite else rep.width
        lines.append(f"class {cid:3d} width {w} witnesses {','.join(rep.witnesses) or '-'} dual {'+'.join(d.support())}")
    return EXIT_OK, res, lines


def cmd_gcl(args, cfg):
    _, _, S = _system(_graph(args.graph), cfg)
    try:
        ids = [int(t) for t in args.elements.split(",") if t.strip()]
    except ValueError:
        raise _UsageError("--elements takes comma-separated integers") from None
    for i in ids:
        S.gid(i)
    closed = wd.gcl(S, ids)
    names = wd.vertex_names(S)
    verts = sorted(names[i] for i in closed.members if i in names)
    res = {"elements": ids, "classes": closed.sorted(), "vertices": verts}
    lines = [f"classes {' '.join(map(str, closed.sorted()))}", f"vertices {' '.join(verts) or '-'}"]
    return EXIT_OK, [res], lines


def cmd_frattini(args, cfg):
    _, G, S = _system(_graph(args.graph), cfg)
    phi = sg.frattini(S.group, cfg.frattini_guard)
    res = {"order": phi.order, "index": phi.index, "gens": phi.gens, "trivial": phi.order == 1}
    return EXIT_OK, [res], [f"Frattini subgroup: order {phi.order}, index {phi.index}"]


def cmd_eval(args, cfg):
    _, _, S = _system(_graph(args.graph), cfg)
    if args.builtin:
        f = logic.builtin(args.builtin, p=cfg.p, q=cfg.q)
    else:
        body = "\n".join(l for l in _read(args.formula_file).splitlines() if not l.lstrip().startswith("#"))
        f = logic.parse_formula(body)
    fv = sorted(logic.free_vars(f))
    if len(fv) > 1:
        raise _UsageError(f"formula has free variables {fv}; eval needs at most one")
    out = logic.evaluate(S, f)
    if isinstance(out, bool):
        return EXIT_OK, [{"value": out}], ["true" if out else "false"]
    res = [_element_json(S, g) for g in out]
    lines = [f"{len(res)} solutions"] + [f"{r['id']} (class {r['class']}, rep {r['rep']})" for r in res]
    return EXIT_OK, res, lines


def cmd_verify(args, cfg):
    reports = lemmas.verify_many(args.lemma, args.instances, cfg.max_order, cfg.p, cfg.q, cfg.seed)
    failed = [r for r in reports if r.status == lemmas.FAIL]
    lines = [r.line() for r in reports]
    lines.append(f"{len(reports) - len(failed)}/{len(reports)} not failing")
    return (EXIT_FAIL if failed else EXIT_OK), [r.to_json() for r in reports], lines


def cmd_export(args, cfg):
    _, _, S = _system(_graph(args.graph), cfg)
    if args.dot:
        return EXIT_OK, None, [sysm.export_dot(S).rstrip()]
    data = sysm.export_json(S, relations=True)
    return EXIT_OK, data, [sysm.dumps(data)]


def cmd_lemmas(args, cfg):
    res = [{"lemma_id": k, "doc": v.doc.splitlines()[0] if v.doc else ""} for k, v in lemmas.REGISTRY.items()]
    return EXIT_OK, res, [f"{r['lemma_id']:20} {r['doc']}" for r in res]


COMMANDS = {
    "encode": cmd_encode, "decode": cmd_decode, "nsubs": cmd_nsubs, "width": cmd_width, "gcl": cmd_gcl,
    "frattini": cmd_frattini, "eval": cmd_eval, "verify": cmd_verify, "export": cmd_export, "lemmas": cmd_lemmas,
}


def _params_of(args) -> dict:
    skip = {"command", "p", "q", "max_order", "frattini_guard", "seed", "json"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run_command(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise _UsageError("missing command; try --help")
        cfg = RunConfig(args.p, args.q, args.max_order, args.frattini_guard, args.seed,
                        "json" if args.json else "text")
        code, results, lines = COMMANDS[args.command](args, cfg)
    except _UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse: {exc}", file=stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"budget: {exc}", file=stderr)
        return EXIT_BUDGET
    except (CdmError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    if cfg.output == "json" and not (args.command == "export" and args.dot):
        payload = {"command": args.command, "params": {**cfg.as_dict(), **_params_of(args)}, "results": results}
        print(json.dumps(payload, sort_keys=True, default=_json_default), file=stdout)
    else:
        for line in lines:
            print(line, file=stdout)
    return code


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
