"""Command line front end: instance files, subcommands and report emission."""
import argparse
import json
import re
import sys
from dataclasses import dataclass, field

from . import harness as hz
from .continuity import (StructuredRel, open_closed_check, t_morphism_check, u_compact_check)
from .enriched import (CanonicalTarget, VCat, bc_check, check_profunctor, check_vcat,
                       check_vfunctor, kan_finite_search, kan_into_canonical)
from .quantale import quantale_from_name
from .topology import (ModularSpace, PSpace, USpace, cocomplete_check, modularity_check, powerset)
from .vrel import FiniteSet, SetMap, VRel

EXIT_PASS, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

KEYWORDS = ("QUANTALE", "SET", "REL", "VALUES", "MAP", "SPACE", "MODULAR", "QUERY")
_TOKEN = re.compile(r"\[[^\]]*\]|[^\s]+")


class InputError(Exception):
    def __init__(self, msg, line=0, col=0):
        super().__init__(msg)
        self.msg, self.line, self.col = msg, line, col

    def __str__(self):
        return f"line {self.line}, column {self.col}: {self.msg}"


@dataclass
class Tok:
    text: str
    line: int
    col: int


@dataclass
class Statement:
    keyword: str
    name: str
    args: dict
    rows: list = field(default_factory=list)
    line: int = 0


@dataclass
class InstanceDocument:
    quantale: object
    statements: list
    sets: dict = field(default_factory=dict)
    rels: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    spaces: dict = field(default_factory=dict)
    modular: dict = field(default_factory=dict)
    queries: list = field(default_factory=list)


# --- lexing and parsing ----------------------------------------------------------

def _tokens(line: str, lineno: int):
    body = line.split("#", 1)[0]
    return [Tok(m.group(), lineno, m.start() + 1) for m in _TOKEN.finditer(body)]


def _kv(tok: Tok):
    if "=" not in tok.text or tok.text.startswith("="):
        raise InputError(f"expected key=value, found {tok.text!r}", tok.line, tok.col)
    k, v = tok.text.split("=", 1)
    return k, v


def _expect(toks, i, text):
    if i >= len(toks) or toks[i].text != text:
        where = toks[i] if i < len(toks) else toks[-1]
        found = toks[i].text if i < len(toks) else "end of line"
        raise InputError(f"expected {text!r}, found {found!r}", where.line, where.col)


def _need(toks, i, what):
    if i >= len(toks):
        last = toks[-1]
        raise InputError(f"missing {what}", last.line, last.col + len(last.text))
    return toks[i]


def _signature(toks, i):
    """``name : src -> tgt`` starting at toks[i]; returns (name, src, tgt, next index)."""
    name = _need(toks, i, "name")
    _expect(toks, i + 1, ":")
    src = _need(toks, i + 2, "source")
    _expect(toks, i + 3, "->")
    tgt = _need(toks, i + 4, "target")
    return name, src, tgt, i + 5


def parse_instance(text: str) -> InstanceDocument:
    """Parse and resolve a document; raises InputError with a location."""
    stmts = []
    cur = None
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = _tokens(line, lineno)
        if not toks:
            continue
        if line[0].isspace():
            if cur is None or cur.keyword != "REL":
                raise InputError("indented row outside a REL block", lineno, toks[0].col)
            cur.rows.append(toks)
            continue
        kw = toks[0]
        if kw.text not in KEYWORDS:
            raise InputError(f"unknown keyword {kw.text!r}", lineno, kw.col)
        cur = _statement(kw.text, toks, lineno)
        stmts.append(cur)
    if not stmts:
        raise InputError("empty document", 1, 1)
    return _resolve(stmts)


def _statement(kw, toks, lineno) -> Statement:
    if kw == "QUANTALE":
        t = _need(toks, 1, "quantale name")
        if len(toks) > 2:
            raise InputError("trailing input after quantale name", lineno, toks[2].col)
        return Statement(kw, t.text, {"_tok": t}, line=lineno)
    if kw == "SET":
        name = _need(toks, 1, "set name")
        _expect(toks, 2, "=")
        return Statement(kw, name.text, {"elements": toks[3:], "_tok": name}, line=lineno)
    if kw == "REL":
        name, src, tgt, j = _signature(toks, 1)
        if j < len(toks):
            raise InputError("rows of a REL go on indented lines", lineno, toks[j].col)
        return Statement(kw, name.text, {"source": src, "target": tgt, "_tok": name}, line=lineno)
    if kw == "VALUES":
        name = _need(toks, 1, "name")
        _expect(toks, 2, ":")
        dom = _need(toks, 3, "domain")
        _expect(toks, 4, "=")
        return Statement(kw, name.text, {"domain": dom, "entries": toks[5:], "_tok": name},
                         line=lineno)
    if kw == "MAP":
        name, src, tgt, j = _signature(toks, 1)
        _expect(toks, j, "=")
        return Statement(kw, name.text, {"source": src, "target": tgt, "pairs": toks[j + 1:],
                                         "_tok": name}, line=lineno)
    # SPACE, MODULAR and QUERY take a head token followed by key=value pairs
    head = _need(toks, 1, "name" if kw != "QUERY" else "operation")
    args = {"_tok": head}
    for t in toks[2:]:
        k, v = _kv(t)
        if k in args:
            raise InputError(f"duplicate argument {k!r}", t.line, t.col)
        args[k] = Tok(v, t.line, t.col + len(k) + 1)
    return Statement(kw, head.text, args, line=lineno)


def _resolve(stmts) -> InstanceDocument:
    if stmts[0].keyword != "QUANTALE":
        raise InputError("document must start with QUANTALE", stmts[0].line, 1)
    qt = stmts[0].args["_tok"]
    try:
        q = quantale_from_name(qt.text)
    except ValueError as e:
        raise InputError(str(e), qt.line, qt.col) from None
    doc = InstanceDocument(q, stmts)
    names = {}
    for st in stmts[1:]:
        tok = st.args["_tok"]
        if st.keyword == "QUANTALE":
            raise InputError("quantale declared twice", st.line, 1)
        if st.keyword != "QUERY":
            if st.name in names:
                raise InputError(f"name {st.name!r} is already defined", tok.line, tok.col)
            names[st.name] = st.keyword
        getattr(_Resolver, st.keyword.lower())(doc, st)
    return doc


def _value(q, tok):
    try:
        return q.coerce(tok.text)
    except (ValueError, TypeError) as e:
        raise InputError(f"bad {q.name} literal {tok.text!r}: {e}", tok.line, tok.col) from None


def _lookup(table, tok, what):
    if tok.text not in table:
        raise InputError(f"undefined {what} {tok.text!r}", tok.line, tok.col)
    return table[tok.text]


def _set_ref(doc, tok):
    m = re.fullmatch(r"P\((.+)\)", tok.text)
    if m:
        base = _lookup(doc.sets, Tok(m.group(1), tok.line, tok.col + 2), "set")
        return powerset(base)
    return _lookup(doc.sets, tok, "set")


class _Resolver:
    @staticmethod
    def set(doc, st):
        els = [t.text for t in st.args["elements"]]
        if len(set(els)) != len(els):
            t = st.args["_tok"]
            raise InputError(f"duplicate element in set {st.name!r}", t.line, t.col)
        doc.sets[st.name] = FiniteSet(st.name, els)

    @staticmethod
    def rel(doc, st):
        q = doc.quantale
        A, B = _set_ref(doc, st.args["source"]), _set_ref(doc, st.args["target"])
        if len(st.rows) != len(A):
            t = st.args["_tok"]
            raise InputError(f"relation {st.name!r} needs {len(A)} rows, found {len(st.rows)}",
                             t.line, t.col)
        rows = []
        for r in st.rows:
            if len(r) != len(B):
                raise InputError(f"row needs {len(B)} entries, found {len(r)}", r[0].line, r[0].col)
            rows.append([_value(q, t) for t in r])
        doc.rels[st.name] = VRel(q, A, B, rows)

    @staticmethod
    def values(doc, st):
        A = _set_ref(doc, st.args["domain"])
        ent = st.args["entries"]
        if len(ent) != len(A):
            t = st.args["_tok"]
            raise InputError(f"{st.name!r} needs {len(A)} values, found {len(ent)}", t.line, t.col)
        doc.values[st.name] = tuple(_value(doc.quantale, t) for t in ent)

    @staticmethod
    def map(doc, st):
        A, B = _set_ref(doc, st.args["source"]), _set_ref(doc, st.args["target"])
        table = {}
        for t in st.args["pairs"]:
            if ":" not in t.text:
                raise InputError(f"expected x:y, found {t.text!r}", t.line, t.col)
            x, y = t.text.split(":", 1)
            if x not in A:
                raise InputError(f"{x!r} is not in {A.name}", t.line, t.col)
            if y not in B:
                raise InputError(f"{y!r} is not in {B.name}", t.line, t.col + len(x) + 1)
            table[x] = y
        try:
            doc.maps[st.name] = SetMap.from_dict(A, B, table)
        except ValueError as e:
            t = st.args["_tok"]
            raise InputError(str(e), t.line, t.col) from None

    @staticmethod
    def space(doc, st):
        kind = _arg(st, "kind")
        R = _lookup(doc.rels, _arg(st, "rel"), "relation")
        try:
            if kind.text == "closure":
                sp = PSpace(R.target, R)
            elif kind.text == "convergence":
                sp = USpace(R.target, R)
            else:
                raise InputError("kind must be closure or convergence", kind.line, kind.col)
        except ValueError as e:
            t = _arg(st, "rel")
            raise InputError(str(e), t.line, t.col) from None
        doc.spaces[st.name] = sp

    @staticmethod
    def modular(doc, st):
        H = _lookup(doc.rels, _arg(st, "hom"), "relation")
        S = _lookup(doc.spaces, _arg(st, "space"), "space")
        try:
            doc.modular[st.name] = ModularSpace(VCat(H.source, H), S)
        except ValueError as e:
            t = _arg(st, "hom")
            raise InputError(str(e), t.line, t.col) from None

    @staticmethod
    def query(doc, st):
        if st.name not in ("check", "kan", "verify"):
            t = st.args["_tok"]
            raise InputError(f"unknown query operation {st.name!r}", t.line, t.col)
        doc.queries.append(st)


def _arg(st, key, default=None):
    if key in st.args:
        return st.args[key]
    if default is not None:
        return Tok(default, st.line, 1)
    t = st.args["_tok"]
    raise InputError(f"{st.keyword} {st.name!r} needs {key}=", t.line, t.col)


# --- canonical printer -------------------------------------------------------------

def print_instance(doc: InstanceDocument) -> str:
    q = doc.quantale
    out = []
    for st in doc.statements:
        kw = st.keyword
        if kw == "QUANTALE":
            out.append(f"QUANTALE {q.name}")
        elif kw == "SET":
            out.append(" ".join([f"SET {st.name} ="] + [t.text for t in st.args["elements"]]))
        elif kw == "REL":
            R = doc.rels[st.name]
            out.append(f"REL {st.name} : {st.args['source'].text} -> {st.args['target'].text}")
            out += ["  " + " ".join(q.format(v) for v in r) for r in R.rows]
        elif kw == "VALUES":
            vals = " ".join(q.format(v) for v in doc.values[st.name])
            out.append(f"VALUES {st.name} : {st.args['domain'].text} = {vals}")
        elif kw == "MAP":
            f = doc.maps[st.name]
            pairs = " ".join(f"{x}:{f(x)}" for x in f.source)
            out.append(f"MAP {st.name} : {st.args['source'].text} -> {st.args['target'].text} = {pairs}")
        else:
            args = " ".join(f"{k}={st.args[k].text}" for k in sorted(st.args) if k != "_tok")
            out.append(f"{kw} {st.name} {args}".rstrip())
    return "\n".join(out) + "\n"


# --- queries -------------------------------------------------------------------

def _space_like(doc, tok):
    if tok.text in doc.modular:
        return doc.modular[tok.text]
    return _lookup(doc.spaces, tok, "space")


def _target(doc, st):
    t = _arg(st, "target")
    if t.text == "canonical":
        return CanonicalTarget(doc.quantale, _arg(st, "variance", "lhom").text)
    return VCat(_lookup(doc.rels, t, "relation").source, doc.rels[t.text])


def _map_objects(doc, tok, target):
    if isinstance(target, CanonicalTarget):
        return list(_lookup(doc.values, tok, "value map"))
    return _lookup(doc.maps, tok, "map")


def _result(st, ok, **info):
    return {"query": st.name, "line": st.line, "ok": bool(ok),
            **{k: v for k, v in info.items()}}


def run_check(doc, st):
    what = _arg(st, "what").text
    q = doc.quantale
    if what == "vcat":
        H = _lookup(doc.rels, _arg(st, "rel"), "relation")
        rep = check_vcat(VCat(H.source, H))
        return _result(st, rep.ok, what=what, unit=rep.unit, assoc=rep.assoc,
                       witness=rep.witness)
    if what == "profunctor":
        J = _lookup(doc.rels, _arg(st, "rel"), "relation")
        A = _lookup(doc.rels, _arg(st, "source"), "relation")
        B = _lookup(doc.rels, _arg(st, "target"), "relation")
        v = check_profunctor(J, VCat(A.source, A), VCat(B.source, B))
        return _result(st, v, what=what, witness=v.witness)
    if what == "space":
        sp = _lookup(doc.spaces, _arg(st, "space"), "space")
        fl = sp.flags
        info = {k: getattr(fl, k) for k in fl.__dataclass_fields__ if k != "witnesses"}
        return _result(st, fl.category, what=what, category=fl.category, **info)
    if what in ("open", "closed", "u_compact"):
        S, S2 = _space_like(doc, _arg(st, "source")), _space_like(doc, _arg(st, "target"))
        J = _lookup(doc.rels, _arg(st, "rel"), "relation")
        try:
            j = StructuredRel(J, S, S2)
        except ValueError as e:
            t = _arg(st, "rel")
            raise InputError(str(e), t.line, t.col) from None
        v = u_compact_check(j) if what == "u_compact" else open_closed_check(S.monad, what, j)
        return _result(st, v, what=what, monad=S.monad.name, witness=v.witness)
    if what in ("modular", "cocomplete"):
        m = _lookup(doc.modular, _arg(st, "modular"), "modular space")
        v = modularity_check(m) if what == "modular" else cocomplete_check(m)
        info = {"normalised": v.normalised} if what == "modular" else {"generic": v.generic}
        return _result(st, v, what=what, witness=v.witness, **info)
    if what in ("functor", "continuous"):
        tgt = _target(doc, st)
        d = _map_objects(doc, _arg(st, "map"), tgt)
        src = _arg(st, "source")
        if what == "functor":
            H = _lookup(doc.rels, src, "relation")
            v = check_vfunctor(d, VCat(H.source, H), tgt)
            return _result(st, v, what=what, witness=v.witness)
        S = _space_like(doc, src)
        if isinstance(tgt, CanonicalTarget):
            n = len(S.carrier)
            bad = [(S.carrier.elements[x], S.carrier.elements[y]) for x in range(n)
                   for y in range(n) if not q.le(S.structure.rows[x][y], tgt(d[x], d[y]))]
            if S.monad.name != "U":
                raise InputError("continuity into V is checked on convergence spaces", src.line, src.col)
            return _result(st, not bad, what=what, witness=bad[0] if bad else None)
        M = _lookup(doc.modular, _arg(st, "target"), "modular space")
        v = t_morphism_check(S.monad, d, S, M)
        return _result(st, v, what=what, witness=v.witness)
    if what == "bc":
        return _kan(doc, st, require_bc=True)
    t = _arg(st, "what")
    raise InputError(f"unknown check {what!r}", t.line, t.col)


def _kan(doc, st, require_bc=False):
    q = doc.quantale
    direction = _arg(st, "direction").text
    if direction not in ("left", "right"):
        t = _arg(st, "direction")
        raise InputError("direction must be left or right", t.line, t.col)
    J = _lookup(doc.rels, _arg(st, "rel"), "relation")
    tgt = _target(doc, st)
    d = _map_objects(doc, _arg(st, "map"), tgt)
    if isinstance(tgt, CanonicalTarget):
        ext = kan_into_canonical(direction, d, J, tgt.variance)
        shown = [q.format(v) for v in ext]
    else:
        ext = kan_finite_search(direction, d, J, tgt)
        if ext is None:
            return _result(st, False, direction=direction, exists=False)
        shown = [tgt.carrier.elements[i] for i in ext]
    bc = bc_check(direction, ext, d, J, tgt)
    pts = (J.target if direction == "left" else J.source).elements
    info = {"direction": direction, "exists": True, "extension": dict(zip(pts, shown)),
            "beck_chevalley": bc.ok, "gaps": [q.format(g) for g in bc.gaps]}
    return _result(st, bc.ok if require_bc else True, **info)


def run_kan(doc, st):
    return _kan(doc, st)


def run_verify(doc, st):
    theorem = _arg(st, "theorem").text
    if theorem not in ("evt_quantale", "evt_closure"):
        t = _arg(st, "theorem")
        raise InputError(f"unknown theorem {theorem!r}", t.line, t.col)
    A = _lookup(doc.modular, _arg(st, "modular"), "modular space")
    H = _lookup(doc.rels, _arg(st, "codomain"), "relation")
    J = _lookup(doc.rels, _arg(st, "rel"), "relation")
    catB = VCat(H.source, H)
    if theorem == "evt_quantale":
        d = _lookup(doc.values, _arg(st, "map"), "value map")
        inst = hz.TheoremInstance(theorem, doc.quantale, A.monad, A, catB,
                                  CanonicalTarget(doc.quantale, "lhom"), J, d, None)
        rep = hz.verify_evt_quantale(inst)
    else:
        M = _lookup(doc.modular, _arg(st, "target"), "modular space")
        d = _lookup(doc.maps, _arg(st, "map"), "map")
        inst = hz.TheoremInstance(theorem, doc.quantale, A.monad, A, catB, M, J, d, None)
        rep = hz.verify_evt_closure(inst)
    info = rep.as_dict()
    info.pop("seed")
    return _result(st, rep.ok, **info)


RUNNERS = {"check": run_check, "kan": run_kan, "verify": run_verify}


def run_document(doc, op):
    qs = [st for st in doc.queries if st.name == op]
    if not qs:
        raise InputError(f"document has no QUERY {op}", 1, 1)
    out = []
    for st in qs:
        try:
            out.append(RUNNERS[op](doc, st))
        except InputError:
            raise
        except ValueError as e:
            # shape and kind mismatches between the named blocks
            raise InputError(str(e), st.line, st.args["_tok"].col) from None
    return out


# --- expressions over a quantale ------------------------------------------------

_OPS = {"*": "tensor", "-o": "lhom", "o-": "rhom", "v": "join", "^": "meet"}


def eval_expression(q, text: str):
    """Left-associative expression of literals, parentheses and * -o o- v ^."""
    toks = re.findall(r"\[[^\]]*\]|-o|o-|\(|\)|[*v^]|[^\s()*^\[\]]+", text)
    pos = 0

    def atom():
        nonlocal pos
        if pos >= len(toks):
            raise InputError("unexpected end of expression", 1, len(text) + 1)
        t = toks[pos]
        pos += 1
        if t == "(":
            v = expr()
            if pos >= len(toks) or toks[pos] != ")":
                raise InputError("missing ')'", 1, len(text) + 1)
            pos += 1
            return v
        return _value(q, Tok(t, 1, text.find(t) + 1))

    def expr():
        nonlocal pos
        v = atom()
        while pos < len(toks) and toks[pos] in _OPS:
            op = _OPS[toks[pos]]
            pos += 1
            w = atom()
            if op == "tensor":
                v = q.tensor(v, w)
            elif op == "lhom":
                v = q.lhom(v, w)
            elif op == "rhom":
                v = q.rhom(v, w)
            elif op == "join":
                v = q.join2(v, w)
            else:
                v = q.meet2(v, w)
        return v

    v = expr()
    if pos != len(toks):
        raise InputError(f"unexpected {toks[pos]!r}", 1, text.find(toks[pos]) + 1)
    return v


# --- output ---------------------------------------------------------------------

def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    return str(x)


def emit(payload, fmt, out):
    if fmt == "machine":
        out.write(json.dumps(_plain(payload), sort_keys=True) + "\n")
        return
    for line in _text_lines(payload):
        out.write(line + "\n")


def _text_lines(payload):
    if "results" in payload:
        for r in payload["results"]:
            tag = "PASS" if r["ok"] else "FAIL"
            extra = ", ".join(f"{k}={_plain(v)}" for k, v in sorted(r.items())
                              if k not in ("ok", "query", "line"))
            yield f"{tag} line {r['line']} {r['query']}: {extra}"
    if "campaign" in payload:
        c = payload["campaign"]
        for s in c["suites"]:
            yield (f"{s['suite']}: pass={s['pass']} skip={s['skip']} fail={s['fail']} "
                   f"non-skip={s['non_skip_rate']:.3f}")
            for k, v in s["skip_reasons"].items():
                yield f"  skipped ({k}): {v}"
            for w in s["witnesses"]:
                yield f"  FAILURE {w}"
        yield f"campaign {'OK' if c['ok'] else 'FAILED'} (seed {c['seed']}, trials {c['trials']})"
    if "regression" in payload:
        r = payload["regression"]
        for k, v in r["values"].items():
            yield f"{k} = {v}"
        for k, v in r["checks"].items():
            yield f"{'PASS' if v else 'FAIL'} {k}"
    if "value" in payload:
        yield str(payload["value"])


# --- subcommands -------------------------------------------------------------------

def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}", 0, 0) from None


def cmd_doc(op, args, out):
    doc = parse_instance(_read(args.file))
    results = run_document(doc, op)
    emit({"results": results}, args.format, out)
    return EXIT_PASS if all(r["ok"] for r in results) else EXIT_VIOLATION


def cmd_check(args, out=sys.stdout):
    return cmd_doc("check", args, out)


def cmd_kan(args, out=sys.stdout):
    return cmd_doc("kan", args, out)


def _cfg(args):
    kw = {"seed": args.seed, "trials": args.trials, "max_size": args.max_size,
          "max_target": min(args.max_size, 5)}
    if args.quantale:
        kw["quantales"] = tuple(args.quantale.split(","))
    try:
        return hz.GeneratorConfig(**kw)
    except ValueError as e:
        raise InputError(str(e), 0, 0) from None


def _campaign(args, suites, out):
    try:
        rep = hz.fuzz_campaign(_cfg(args), suites)
    except ValueError as e:
        raise InputError(str(e), 0, 0) from None
    emit({"campaign": rep.as_dict()}, args.format, out)
    return EXIT_PASS if rep.ok else EXIT_VIOLATION


def cmd_verify(args, out=sys.stdout):
    if args.builtin is None and args.file is None:
        raise InputError("verify needs a file or --builtin", 0, 0)
    if args.builtin == "counterexamples":
        rep = hz.regression_counterexamples()
        emit({"regression": {"values": rep.values, "checks": rep.checks}}, args.format, out)
        return EXIT_PASS if rep.ok else EXIT_VIOLATION
    if args.builtin == "berge":
        return _campaign(args, ("berge",), out)
    if args.builtin == "evt":
        return _campaign(args, ("evt_closure", "evt_quantale"), out)
    return cmd_doc("verify", args, out)


def cmd_fuzz(args, out=sys.stdout):
    return _campaign(args, args.suite, out)


def cmd_delta(args, out=sys.stdout):
    try:
        q = quantale_from_name(args.quantale or "delta:product")
    except ValueError as e:
        raise InputError(str(e), 0, 0) from None
    v = eval_expression(q, args.expr)
    emit({"value": q.format(v)}, args.format, out)
    return EXIT_PASS


def build_parser():
    p = argparse.ArgumentParser(prog="kanopt", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("text", "machine"), default="text")

    def campaign(sp, trials):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=int, default=trials)
        sp.add_argument("--max-size", type=int, default=4)
        sp.add_argument("--quantale", default=None, help="comma separated quantale names")

    for name, fn in (("check", cmd_check), ("kan", cmd_kan)):
        sp = sub.add_parser(name)
        sp.add_argument("file")
        common(sp)
        sp.set_defaults(fn=fn)
    sp = sub.add_parser("verify")
    sp.add_argument("file", nargs="?")
    sp.add_argument("--builtin", choices=("counterexamples", "berge", "evt"))
    common(sp)
    campaign(sp, 200)
    sp.set_defaults(fn=cmd_verify)
    sp = sub.add_parser("fuzz")
    sp.add_argument("--suite", default="all")
    common(sp)
    campaign(sp, 100)
    sp.set_defaults(fn=cmd_fuzz)
    sp = sub.add_parser("delta")
    sp.add_argument("expr")
    sp.add_argument("--quantale", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_delta)
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_PASS
    try:
        return args.fn(args, out)
    except InputError as e:
        err.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
