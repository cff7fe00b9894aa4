"""Ordered partial applicative structures and combinatory completeness.

A structure is a finite poset with a monotone partial binary
application whose domain is downward closed.  A pair adds a
distinguished subset of privileged elements, closed under application,
that must contain realizers for the two cancellation terms (constant
and substitution); the realizer object of an n-ary term is the set of
elements that compute it on every argument tuple, up to the order.

The module has two layers.  The tabulated layer works elementwise on
explicit tables and carries the term language, evaluation, bracket
abstraction and the realizer derivation used by the CLI.  The internal
layer re-expresses the same notions through the subobject calculus of a
base instance, so the definitions can be run inside presheaves or
inside the category of assemblies itself; tests cross-check the two on
shared samples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct
from typing import Any

from .base import FINSET, Arrow, FinObj, Instance, Sub, diag_sub, rel_compose
from .report import Report, check


# -- terms ------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: Any

    def __repr__(self) -> str:
        return f"<{self.value!r}>"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"

    def __repr__(self) -> str:
        return unparse(self)


@dataclass(frozen=True)
class Lam:
    params: tuple
    body: "Term"

    def __repr__(self) -> str:
        return unparse(self)


Term = Var | Const | App | Lam


def ap(*terms: Term) -> Term:
    """Left-nested application of two or more terms."""
    out = terms[0]
    for t in terms[1:]:
        out = App(out, t)
    return out


def free_vars(term: Term) -> frozenset:
    if isinstance(term, Var):
        return frozenset({term.name})
    if isinstance(term, Const):
        return frozenset()
    if isinstance(term, App):
        return free_vars(term.fn) | free_vars(term.arg)
    return free_vars(term.body) - frozenset(term.params)


def term_size(term: Term) -> int:
    if isinstance(term, (Var, Const)):
        return 1
    if isinstance(term, App):
        return term_size(term.fn) + term_size(term.arg)
    return term_size(term.body)


def unparse(term: Term) -> str:
    def atom(t: Term) -> str:
        if isinstance(t, Var):
            return t.name
        if isinstance(t, Const):
            return f"<{t.value!r}>"
        return "(" + unparse(t) + ")"

    if isinstance(term, Lam):
        return "λ*" + " ".join(term.params) + ". " + unparse(term.body)
    if isinstance(term, App):
        parts = []
        t = term
        while isinstance(t, App):
            parts.append(t.arg)
            t = t.fn
        parts.append(t)
        parts.reverse()
        return " ".join(atom(p) for p in parts)
    return atom(term)


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_TOKEN = re.compile(r"λ\*|lambda\*|\\\*|[().]|[A-Za-z_][A-Za-z0-9_']*|\S")


class TermSyntaxError(ValueError):
    pass


def parse_term(text: str) -> Term:
    """Parse the surface syntax, e.g. "λ*x y. x (y x)".

    Binders may be written λ*, lambda* or \\*.  Application is
    juxtaposition and associates left; a binder body extends as far
    right as possible.
    """
    tokens = _TOKEN.findall(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def parse_inner() -> Term:
        if peek() in ("λ*", "lambda*", "\\*"):
            take()
            params = []
            while peek() is not None and _IDENT.fullmatch(peek()):
                params.append(take())
            if not params:
                raise TermSyntaxError("binder without parameters")
            if take() != ".":
                raise TermSyntaxError("expected '.' after binder parameters")
            return Lam(tuple(params), parse_inner())
        parts: list[Term] = []
        while True:
            tok = peek()
            if tok is None or tok == ")":
                break
            if tok == "(":
                take()
                t = parse_inner()
                if take() != ")":
                    raise TermSyntaxError("unbalanced parenthesis")
                parts.append(t)
            elif _IDENT.fullmatch(tok):
                take()
                parts.append(Var(tok))
            elif tok in ("λ*", "lambda*", "\\*"):
                parts.append(parse_inner())
            else:
                raise TermSyntaxError(f"unexpected token {tok!r}")
        if not parts:
            raise TermSyntaxError("empty term")
        return ap(*parts)

    term = parse_inner()
    if pos != len(tokens):
        raise TermSyntaxError(f"trailing input at token {tokens[pos]!r}")
    return term


# canonical terms, named by what they compute
IDENT_TERM = Lam(("x",), Var("x"))
COMPOSE_TERM = Lam(("x", "y", "z"), ap(Var("x"), ap(Var("y"), Var("z"))))
CONST_TERM = Lam(("x", "y"), Var("x"))
SECOND_TERM = Lam(("x", "y"), Var("y"))
PAIR_TERM = Lam(("x", "y", "z"), ap(Var("z"), Var("x"), Var("y")))
APPLY_TO_TERM = Lam(("x", "y"), ap(Var("y"), Var("x")))
CASE_APPLY_TERM = Lam(
    ("t", "f", "x"), ap(ap(Var("x"), Var("t")), ap(Var("x"), Var("f")))
)
FANOUT_TERM = Lam(
    ("p", "x", "y", "z"),
    ap(Var("p"), ap(Var("x"), Var("z")), ap(Var("y"), Var("z"))),
)
SUBST_TERM = Lam(
    ("x", "y", "z"), ap(ap(Var("x"), Var("z")), ap(Var("y"), Var("z")))
)

CANONICAL_TERMS = {
    "ident": IDENT_TERM,
    "compose": COMPOSE_TERM,
    "const": CONST_TERM,
    "second": SECOND_TERM,
    "pair": PAIR_TERM,
    "apply_to": APPLY_TO_TERM,
    "case_apply": CASE_APPLY_TERM,
    "fanout": FANOUT_TERM,
    "subst": SUBST_TERM,
}


# -- tabulated structures ----------------------------------------------------


@dataclass(frozen=True)
class Opas:
    """Tabulated ordered partial applicative structure.

    `leq` holds (lower, higher) pairs and must be a partial order on the
    carrier; `app` is a tuple of ((a, b), value) entries sorted by
    carrier position.  Use `make` to normalize raw data.
    """

    carrier: tuple
    leq: frozenset
    app: tuple

    @classmethod
    def make(cls, carrier, leq, app: dict) -> "Opas":
        carrier = tuple(carrier)
        index = {x: i for i, x in enumerate(carrier)}
        entries = sorted(
            app.items(), key=lambda kv: (index[kv[0][0]], index[kv[0][1]])
        )
        return cls(carrier, frozenset(leq), tuple(entries))

    def __repr__(self) -> str:
        return f"Opas(|A|={len(self.carrier)}, |app|={len(self.app)})"


@dataclass(frozen=True)
class Pair:
    """An applicative structure with its privileged subset."""

    opas: Opas
    prime: frozenset

    def __repr__(self) -> str:
        return f"Pair({self.opas!r}, |prime|={len(self.prime)})"


@lru_cache(maxsize=None)
def app_map(opas: Opas) -> dict:
    return dict(opas.app)


@lru_cache(maxsize=None)
def down_map(opas: Opas) -> dict:
    out = {x: set() for x in opas.carrier}
    for lo, hi in opas.leq:
        out[hi].add(lo)
    return {x: frozenset(v) for x, v in out.items()}


def ev(opas: Opas, a, b):
    """Apply a to b; None when undefined."""
    return app_map(opas).get((a, b))


def chain_eval(opas: Opas, r, args):
    """Left-nested application r a1 ... an; None when any step is undefined."""
    amap = app_map(opas)
    cur = r
    for a in args:
        cur = amap.get((cur, a))
        if cur is None:
            return None
    return cur


def eval_term(opas: Opas, term: Term, env: dict):
    """Strict evaluation of a binder-free term; None when undefined."""
    if isinstance(term, Var):
        return env[term.name]
    if isinstance(term, Const):
        return term.value
    if isinstance(term, App):
        f = eval_term(opas, term.fn, env)
        if f is None:
            return None
        a = eval_term(opas, term.arg, env)
        if a is None:
            return None
        return app_map(opas).get((f, a))
    raise TypeError("binders cannot be evaluated directly; compile first")


# -- validation ---------------------------------------------------------------


def validate_opas(opas: Opas) -> Report:
    """Check the tabulated data against the structure axioms.

    Monotonicity (if a <= b, c <= d and bd is defined then ac is
    defined and ac <= bd) is verified through its one-sided instances,
    which are equivalent given transitivity; reported witnesses are
    full five-tuples (a, b, c, d, bd).
    """
    results = []
    carrier = opas.carrier
    cset = set(carrier)
    results.append(
        check("carrier.distinct", len(cset) == len(carrier), tuple(carrier))
    )
    bad = next(
        ((a, b) for a, b in opas.leq if a not in cset or b not in cset), None
    )
    results.append(check("order.wellformed", bad is None, bad))
    if bad is not None or len(cset) != len(carrier):
        return Report(tuple(results))

    missing = next((x for x in carrier if (x, x) not in opas.leq), None)
    results.append(
        check(
            "order.refl",
            missing is None,
            (missing,) if missing is not None else None,
        )
    )

    wit = None
    for a, b in opas.leq:
        for c in carrier:
            if (b, c) in opas.leq and (a, c) not in opas.leq:
                wit = (a, b, c)
                break
        if wit:
            break
    results.append(check("order.trans", wit is None, wit))

    wit = next(
        ((a, b) for a, b in opas.leq if a != b and (b, a) in opas.leq), None
    )
    results.append(check("order.antisym", wit is None, wit))

    amap = app_map(opas)
    bad = next(
        (
            ((a, b), v)
            for (a, b), v in amap.items()
            if a not in cset or b not in cset or v not in cset
        ),
        None,
    )
    results.append(check("app.wellformed", bad is None, bad))
    results.append(check("app.single_valued", len(amap) == len(opas.app)))

    if any(not r.ok for r in results):
        return Report(tuple(results))

    wit = None
    for a, b in opas.leq:
        if wit:
            break
        for c in carrier:
            bc = amap.get((b, c))
            if bc is None:
                continue
            ac = amap.get((a, c))
            if ac is None or (ac, bc) not in opas.leq:
                wit = (a, b, c, c, bc)
                break
    if wit is None:
        for c, d in opas.leq:
            if wit:
                break
            for b in carrier:
                bd = amap.get((b, d))
                if bd is None:
                    continue
                bc = amap.get((b, c))
                if bc is None or (bc, bd) not in opas.leq:
                    wit = (b, b, c, d, bd)
                    break
    results.append(check("app.monotone", wit is None, wit))
    return Report(tuple(results))


def realizer_object(opas: Opas, term: Term, params: tuple) -> frozenset:
    """Elements computing the term on every argument tuple, up to the order.

    `term` must be binder-free with free variables among `params`; the
    chain r a1 ... an must be defined and below the term's value
    whenever that value is defined.
    """
    if isinstance(term, Lam):
        raise TypeError("realizer objects are defined for binder-free terms")
    out = []
    for r in opas.carrier:
        good = True
        if not params:
            v = eval_term(opas, term, {})
            good = v is not None and (r, v) in opas.leq
        else:
            for args in iproduct(opas.carrier, repeat=len(params)):
                v = eval_term(opas, term, dict(zip(params, args)))
                if v is None:
                    continue
                w = chain_eval(opas, r, args)
                if w is None or (w, v) not in opas.leq:
                    good = False
                    break
        if good:
            out.append(r)
    return frozenset(out)


def term_realizer_object(opas: Opas, term: Term) -> frozenset:
    """Realizer object of a possibly binder-led closed term."""
    if isinstance(term, Lam):
        return realizer_object(opas, term.body, term.params)
    return realizer_object(opas, term, ())


@lru_cache(maxsize=None)
def pair_combinators(pair: Pair) -> dict:
    """Realizer objects for the canonical terms, with the chosen member.

    The member is the first element of (object ∩ prime) in carrier
    order, or None when that intersection is empty.
    """
    out = {}
    for name, term in CANONICAL_TERMS.items():
        obj = realizer_object(pair.opas, term.body, term.params)
        member = next(
            (x for x in pair.opas.carrier if x in obj and x in pair.prime),
            None,
        )
        out[name] = (obj, member)
    return out


def validate_pair(pair: Pair) -> Report:
    base = validate_opas(pair.opas)
    if not base.ok:
        return base
    results = list(base.results)
    cset = set(pair.opas.carrier)
    extra = pair.prime - cset
    results.append(
        check(
            "pair.prime_subset",
            not extra,
            tuple(sorted(map(repr, extra))) if extra else None,
        )
    )
    if extra:
        return Report(tuple(results))
    amap = app_map(pair.opas)
    wit = next(
        (
            (a, b, amap[a, b])
            for a in pair.prime
            for b in pair.prime
            if (a, b) in amap and amap[a, b] not in pair.prime
        ),
        None,
    )
    results.append(check("pair.prime_app_closed", wit is None, wit))
    for tag, term in (
        ("pair.const_realizable", CONST_TERM),
        ("pair.subst_realizable", SUBST_TERM),
    ):
        obj = realizer_object(pair.opas, term.body, term.params)
        results.append(check(tag, bool(obj & pair.prime)))
    return Report(tuple(results))


def is_combinatory_complete(pair: Pair) -> bool:
    kobj = realizer_object(pair.opas, CONST_TERM.body, CONST_TERM.params)
    sobj = realizer_object(pair.opas, SUBST_TERM.body, SUBST_TERM.params)
    return bool(kobj & pair.prime) and bool(sobj & pair.prime)


# -- bracket abstraction -------------------------------------------------------


def bracket_abstract(name: str, term: Term, kc: Const, sc: Const) -> Term:
    """One binder elimination over a binder-free term."""
    if isinstance(term, Var) and term.name == name:
        return ap(sc, kc, kc)
    if name not in free_vars(term):
        return App(kc, term)
    assert isinstance(term, App)
    return ap(
        sc,
        bracket_abstract(name, term.fn, kc, sc),
        bracket_abstract(name, term.arg, kc, sc),
    )


def compile_term(term: Term, kr, sr) -> Term:
    """Eliminate every binder using the given realizers for the constant
    and substitution terms."""
    kc, sc = Const(kr), Const(sr)
    if isinstance(term, (Var, Const)):
        return term
    if isinstance(term, App):
        return App(compile_term(term.fn, kr, sr), compile_term(term.arg, kr, sr))
    body = compile_term(term.body, kr, sr)
    for name in reversed(term.params):
        body = bracket_abstract(name, body, kc, sc)
    return body


@dataclass(frozen=True)
class Derived:
    value: Any
    const_realizer: Any
    subst_realizer: Any
    compiled: Term


def derive_realizer(pair: Pair, term: Term) -> Derived | None:
    """Compile a closed term and return the first realizer landing in the
    term's realizer object.

    Candidate (constant, substitution) realizer pairs are tried in
    carrier order, restricted to the privileged subset, so the result
    is deterministic.  None when no candidate produces a defined value
    inside the realizer object.
    """
    if free_vars(term):
        raise ValueError("derive_realizer needs a closed term")
    opas = pair.opas
    combos = pair_combinators(pair)
    kobj, _ = combos["const"]
    sobj, _ = combos["subst"]
    kcands = [x for x in opas.carrier if x in kobj and x in pair.prime]
    scands = [x for x in opas.carrier if x in sobj and x in pair.prime]
    if isinstance(term, Lam):
        params, inner = term.params, term.body
    else:
        params, inner = (), term
    for kr in kcands:
        for sr in scands:
            flat_inner = compile_term(inner, kr, sr)
            closed = flat_inner
            for name in reversed(params):
                closed = bracket_abstract(name, closed, Const(kr), Const(sr))
            value = eval_term(opas, closed, {})
            if value is None:
                continue
            if value in realizer_object(opas, flat_inner, params):
                return Derived(value, kr, sr, closed)
    return None


# -- downset structure ---------------------------------------------------------


def down_close(opas: Opas, elems) -> frozenset:
    dm = down_map(opas)
    out = set()
    for x in elems:
        out |= dm[x]
    return frozenset(out)


def downsets(opas: Opas) -> tuple:
    """All downward closed subsets as tuples sorted by carrier position,
    ordered by size then position, the empty one first."""
    index = {x: i for i, x in enumerate(opas.carrier)}
    out = []
    n = len(opas.carrier)
    for mask in range(1 << n):
        elems = frozenset(opas.carrier[i] for i in range(n) if mask >> i & 1)
        if down_close(opas, elems) == elems:
            out.append(tuple(sorted(elems, key=index.__getitem__)))
    out.sort(key=lambda t: (len(t), tuple(index[x] for x in t)))
    return tuple(out)


def dapply(opas: Opas, u: frozenset, v: frozenset) -> frozenset | None:
    """Downset application: defined when every pointwise product is, and
    then the down-closure of the products; empty operands give the empty
    set."""
    amap = app_map(opas)
    prods = []
    for x in u:
        for y in v:
            w = amap.get((x, y))
            if w is None:
                return None
            prods.append(w)
    return down_close(opas, prods)


def downset_opas(opas: Opas) -> Opas:
    ds = downsets(opas)
    index = {x: i for i, x in enumerate(opas.carrier)}
    as_tuple = {frozenset(d): d for d in ds}
    leq = frozenset((a, b) for a in ds for b in ds if set(a) <= set(b))
    app = {}
    for a in ds:
        for b in ds:
            v = dapply(opas, frozenset(a), frozenset(b))
            if v is not None:
                app[(a, b)] = as_tuple[v]
    return Opas.make(ds, leq, app)


def downset_pair(pair: Pair) -> Pair:
    """The downset structure, privileged sets being those meeting the
    original privileged subset."""
    d = downset_opas(pair.opas)
    prime = frozenset(u for u in d.carrier if set(u) & pair.prime)
    return Pair(d, prime)


# -- fuzz tables ----------------------------------------------------------------


def random_opas(rng, max_size: int = 4) -> Opas:
    """A random table for validator fuzzing.

    Mixes valid-by-construction chains with meet application (possibly
    with entries deleted) and unconstrained random orders and tables, so
    a fuzz run exercises both accepting and rejecting paths.
    """
    n = rng.randint(1, max_size)
    carrier = tuple(range(n))
    mode = rng.random()
    if mode < 0.45:
        leq = {(a, b) for a in carrier for b in carrier if a <= b}
        app = {(a, b): min(a, b) for a in carrier for b in carrier}
        for key in list(app):
            if rng.random() < 0.15:
                del app[key]
        return Opas.make(carrier, leq, app)
    leq = {(a, a) for a in carrier}
    for a in carrier:
        for b in carrier:
            if a != b and rng.random() < 0.3:
                leq.add((a, b))
    if rng.random() < 0.5:
        changed = True
        while changed:
            changed = False
            for a, b in list(leq):
                for c, d in list(leq):
                    if b == c and (a, d) not in leq:
                        leq.add((a, d))
                        changed = True
    app = {}
    for a in carrier:
        for b in carrier:
            if rng.random() < 0.6:
                app[(a, b)] = carrier[rng.randrange(n)]
    return Opas.make(carrier, leq, app)


# -- internal layer --------------------------------------------------------------


@dataclass(frozen=True)
class InternalPair:
    """An applicative pair internal to a base instance.

    `carrier` is a base object, `leq` a subobject of carrier x carrier,
    `graph` a subobject of (carrier x carrier) x carrier presenting the
    application as a relation, `prime` a subobject of the carrier.
    """

    inst: Any
    carrier: Any
    leq: Sub
    graph: Sub
    prime: Sub

    def __repr__(self) -> str:
        return f"InternalPair({self.inst.name})"


def internalize_finset(pair: Pair) -> InternalPair:
    """View a tabulated pair inside the finite-sets instance."""
    carrier = FinObj(pair.opas.carrier)
    aa, _, _ = FINSET.product(carrier, carrier)
    aaa, _, _ = FINSET.product(aa, carrier)
    return InternalPair(
        FINSET,
        carrier,
        FINSET.make_sub(aa, set(pair.opas.leq)),
        FINSET.make_sub(aaa, {((a, b), c) for (a, b), c in pair.opas.app}),
        FINSET.make_sub(carrier, pair.prime),
    )


def sel_arrow(inst: Instance, src, target, idxs: tuple) -> Arrow:
    """Arrow out of a flat-tuple product selecting the given coordinates.

    With one index the target is the bare factor; otherwise the flat
    product of the chosen factors (elements stay top-level tuples, so
    this is safe even when factor elements are themselves tuples)."""
    elems = inst.elements(src)
    if len(idxs) == 1:
        i = idxs[0]
        return inst.make_arrow(src, target, {e: e[i] for e in elems})
    return inst.make_arrow(
        src, target, {e: tuple(e[i] for i in idxs) for e in elems}
    )


def app_sel_arrow(inst: Instance, src, aaa, i: int, j: int, k: int) -> Arrow:
    """Arrow into the application relation's ambient ((A x A) x A)."""
    return inst.make_arrow(
        src, aaa, {e: ((e[i], e[j]), e[k]) for e in inst.elements(src)}
    )


@lru_cache(maxsize=None)
def _pow(inst_carrier):
    inst, carrier, n = inst_carrier
    return inst.product_n([carrier] * n)


def _powers(ip: InternalPair, n: int):
    return _pow((ip.inst, ip.carrier, n))


@lru_cache(maxsize=None)
def _aa_aaa(ip: InternalPair):
    aa, _, _ = ip.inst.product(ip.carrier, ip.carrier)
    aaa, _, _ = ip.inst.product(aa, ip.carrier)
    return aa, aaa


def internal_validate_opas(ip: InternalPair) -> Report:
    """The structure axioms, expressed through the subobject calculus."""
    inst = ip.inst
    a = ip.carrier
    aa, aaa = _aa_aaa(ip)
    results = []

    dg = diag_sub(inst, a)
    results.append(check("order.refl", inst.sub_leq(dg, ip.leq)))

    comp = rel_compose(inst, ip.leq, ip.leq, a, a, a)
    results.append(check("order.trans", inst.sub_leq(comp, ip.leq)))

    _, p1, p2 = inst.product(a, a)
    swap = inst.tuple_arrow(p2, p1)
    opp = inst.preimage(swap, ip.leq)
    results.append(
        check("order.antisym", inst.sub_leq(inst.sub_meet(ip.leq, opp), dg))
    )

    obj4, _ = _powers(ip, 4)
    both = inst.sub_meet(
        inst.preimage(app_sel_arrow(inst, obj4, aaa, 0, 1, 2), ip.graph),
        inst.preimage(app_sel_arrow(inst, obj4, aaa, 0, 1, 3), ip.graph),
    )
    cd = inst.image(sel_arrow(inst, obj4, aa, (2, 3)), both)
    results.append(check("app.single_valued", inst.sub_leq(cd, dg)))

    # a<=b, c<=d, bd=e  implies  some f with ac=f and f<=e
    obj5, _ = _powers(ip, 5)
    hyp = inst.sub_meet(
        inst.sub_meet(
            inst.preimage(sel_arrow(inst, obj5, aa, (0, 1)), ip.leq),
            inst.preimage(sel_arrow(inst, obj5, aa, (2, 3)), ip.leq),
        ),
        inst.preimage(app_sel_arrow(inst, obj5, aaa, 1, 3, 4), ip.graph),
    )
    obj6, _ = _powers(ip, 6)
    concl6 = inst.sub_meet(
        inst.preimage(app_sel_arrow(inst, obj6, aaa, 0, 2, 5), ip.graph),
        inst.preimage(sel_arrow(inst, obj6, aa, (5, 4)), ip.leq),
    )
    concl = inst.image(sel_arrow(inst, obj6, obj5, (0, 1, 2, 3, 4)), concl6)
    results.append(check("app.monotone", inst.sub_leq(hyp, concl)))
    return Report(tuple(results))


def term_graph(ip: InternalPair, term: Term, params: tuple) -> Sub:
    """The term's value relation as a subobject of carrier^(n+1), with the
    argument coordinates first and the value last."""
    inst = ip.inst
    a = ip.carrier
    n = len(params)
    obj, _ = _powers(ip, n + 1)
    aa, aaa = _aa_aaa(ip)
    if isinstance(term, Var):
        i = params.index(term.name)
        return inst.preimage(
            sel_arrow(inst, obj, aa, (i, n)), diag_sub(inst, a)
        )
    if isinstance(term, App):
        gt = term_graph(ip, term.fn, params)
        gu = term_graph(ip, term.arg, params)
        big, _ = _powers(ip, n + 3)  # args, y, z, w
        lift_t = inst.preimage(
            sel_arrow(inst, big, obj, tuple(range(n)) + (n,)), gt
        )
        lift_u = inst.preimage(
            sel_arrow(inst, big, obj, tuple(range(n)) + (n + 1,)), gu
        )
        lift_app = inst.preimage(
            app_sel_arrow(inst, big, aaa, n, n + 1, n + 2), ip.graph
        )
        tot = inst.sub_meet(inst.sub_meet(lift_t, lift_u), lift_app)
        return inst.image(
            sel_arrow(inst, big, obj, tuple(range(n)) + (n + 2,)), tot
        )
    raise TypeError("internal term graphs need binder-free applicative terms")


def internal_realizer_object(ip: InternalPair, term: Term, params: tuple) -> Sub:
    """The realizer object of a term, computed through the instance's
    subobject operations (and therefore meaningful over any base)."""
    inst = ip.inst
    a = ip.carrier
    n = len(params)
    if n == 0:
        raise ValueError("internal realizer objects need at least one parameter")
    g = term_graph(ip, term, params)
    _, aaa = _aa_aaa(ip)

    # chain relation over (r, args..., v), threading intermediates
    m = n + 2 + (n - 1)
    ext, _ = _powers(ip, m)
    conds = []
    prev = 0
    for i in range(n):
        out = n + 1 if i == n - 1 else n + 2 + i
        conds.append(
            inst.preimage(
                app_sel_arrow(inst, ext, aaa, prev, 1 + i, out), ip.graph
            )
        )
        prev = out
    tot = conds[0]
    for c in conds[1:]:
        tot = inst.sub_meet(tot, c)
    big, _ = _powers(ip, n + 2)
    chain = inst.image(
        sel_arrow(inst, ext, big, tuple(range(n + 2))), tot
    )

    # (r, args, y, v): term value y, chain value v <= y
    big2, _ = _powers(ip, n + 3)
    obj_g, _ = _powers(ip, n + 1)
    aa, _ = _aa_aaa(ip)
    lift_g = inst.preimage(
        sel_arrow(inst, big2, obj_g, tuple(range(1, n + 1)) + (n + 1,)), g
    )
    lift_chain = inst.preimage(
        sel_arrow(inst, big2, big, tuple(range(0, n + 1)) + (n + 2,)), chain
    )
    lift_le = inst.preimage(sel_arrow(inst, big2, aa, (n + 2, n + 1)), ip.leq)
    good = inst.sub_meet(inst.sub_meet(lift_g, lift_chain), lift_le)

    ra, rprojs = _powers(ip, n + 1)  # r, args
    ok_here = inst.image(
        sel_arrow(inst, big2, ra, tuple(range(n + 1))), good
    )

    dom_target, _ = _powers(ip, n)
    dom = inst.image(sel_arrow(inst, obj_g, dom_target, tuple(range(n))), g)
    dom_lift = inst.preimage(
        sel_arrow(inst, ra, dom_target, tuple(range(1, n + 1))), dom
    )
    impl = inst.sub_implies(dom_lift, ok_here)
    return inst.forall_along(rprojs[0], impl)


@lru_cache(maxsize=None)
def internal_combinators(ip: InternalPair) -> dict:
    """Realizer objects of the canonical terms as carrier subobjects."""
    return {
        name: internal_realizer_object(ip, term.body, term.params)
        for name, term in CANONICAL_TERMS.items()
    }


def internal_validate_pair(ip: InternalPair) -> Report:
    """Pair axioms over the instance: privileged subobject closed under
    application and meeting the realizer objects of the two canonical
    cancellation terms."""
    inst = ip.inst
    results = list(internal_validate_opas(ip).results)
    _, aaa = _aa_aaa(ip)
    tobj, tprojs = _powers(ip, 3)
    tri = inst.preimage(app_sel_arrow(inst, tobj, aaa, 0, 1, 2), ip.graph)
    closed_hyp = inst.sub_meet(
        tri,
        inst.sub_meet(
            inst.preimage(tprojs[0], ip.prime),
            inst.preimage(tprojs[1], ip.prime),
        ),
    )
    results.append(
        check(
            "pair.prime_app_closed",
            inst.sub_leq(inst.image(tprojs[2], closed_hyp), ip.prime),
        )
    )
    for tag, term in (
        ("pair.const_realizable", CONST_TERM),
        ("pair.subst_realizable", SUBST_TERM),
    ):
        obj = internal_realizer_object(ip, term.body, term.params)
        results.append(
            check(tag, inst.is_inhabited(inst.sub_meet(obj, ip.prime)))
        )
    return Report(tuple(results))
