"""Presheaves on a finite preorder as a Heyting instance.

A presheaf is presented by its total space: every element carries a
stage, and a restriction map sends an element to each stage below its
own.  Arrows are stage-preserving maps commuting with restriction;
subobjects are restriction-closed subsets.  The regular operations are
stagewise; universal quantification and implication follow the sheaf
semantics, quantifying over restrictions to lower stages, which is what
makes inhabited-without-global-sections possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct
from typing import Iterable

from .base import Arrow, ElementwiseOps, FinObj, Instance, Sub, arrow_map
from .report import Report, check


@dataclass(frozen=True)
class Preorder:
    elems: tuple
    leq: frozenset  # (p, q) meaning p below q

    def below(self, q) -> tuple:
        return tuple(p for p in self.elems if (p, q) in self.leq)

    def __repr__(self) -> str:
        return f"Preorder({list(self.elems)!r})"


def make_preorder(elems, leq) -> Preorder:
    elems = tuple(elems)
    leq = frozenset(leq) | frozenset((p, p) for p in elems)
    closed = set(leq)
    changed = True
    while changed:
        changed = False
        for a, b in list(closed):
            for c, d in list(closed):
                if b == c and (a, d) not in closed:
                    closed.add((a, d))
                    changed = True
    return Preorder(elems, frozenset(closed))


def validate_preorder(p: Preorder) -> Report:
    results = [
        check(
            "preorder.refl",
            all((x, x) in p.leq for x in p.elems),
        ),
        check(
            "preorder.trans",
            all(
                (a, d) in p.leq
                for a, b in p.leq
                for c, d in p.leq
                if b == c
            ),
        ),
        check(
            "preorder.wellformed",
            all(a in p.elems and b in p.elems for a, b in p.leq),
        ),
    ]
    return Report(tuple(results))


@dataclass(frozen=True)
class Psh:
    """A presheaf by total space, stage map and restrictions."""

    base: Preorder
    elems: tuple
    stage: tuple  # ((elem, stage), ...)
    rest: tuple  # (((elem, lower_stage), elem), ...)

    def __repr__(self) -> str:
        return f"Psh(|X|={len(self.elems)})"


@lru_cache(maxsize=None)
def stage_map(x: Psh) -> dict:
    return dict(x.stage)


@lru_cache(maxsize=None)
def rest_map(x: Psh) -> dict:
    return dict(x.rest)


def make_psh(base: Preorder, elems, stage: dict, rest: dict) -> Psh:
    """Normalize and validate presheaf data.

    `rest[(x, q)]` must be defined exactly for q below the stage of x,
    agree with the identity at the top, land at stage q and compose.
    """
    elems = tuple(elems)
    eset = set(elems)
    for x in elems:
        if stage[x] not in base.elems:
            raise ValueError(f"stage of {x!r} outside the base")
    for x in elems:
        p = stage[x]
        for q in base.below(p):
            if (x, q) not in rest:
                raise ValueError(f"missing restriction of {x!r} to {q!r}")
            y = rest[(x, q)]
            if y not in eset or stage[y] != q:
                raise ValueError(f"restriction of {x!r} to {q!r} malformed")
        if rest[(x, p)] != x:
            raise ValueError(f"restriction of {x!r} to its own stage moves it")
    for (x, q), y in rest.items():
        if (q, stage[x]) not in base.leq:
            raise ValueError(f"restriction of {x!r} to incomparable {q!r}")
        for r in base.below(q):
            if rest[(y, r)] != rest[(x, r)]:
                raise ValueError(f"restrictions of {x!r} do not compose")
    stage_t = tuple((x, stage[x]) for x in elems)
    rest_t = tuple(sorted(rest.items(), key=lambda kv: (elems.index(kv[0][0]), base.elems.index(kv[0][1]))))
    return Psh(base, elems, stage_t, rest_t)


class FinPsh(ElementwiseOps, Instance):
    """Presheaves on a fixed finite preorder."""

    cartesian_closed = False

    def __init__(self, base: Preorder):
        self.base = base

    @property
    def name(self) -> str:
        return f"finpsh({list(self.base.elems)!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FinPsh) and self.base == other.base

    def __hash__(self) -> int:
        return hash(("finpsh", self.base))

    # objects ---------------------------------------------------------
    def elements(self, obj: Psh) -> tuple:
        return obj.elems

    def relabel(self, obj: Psh, names: dict) -> Psh:
        sm, rm = stage_map(obj), rest_map(obj)
        return make_psh(
            self.base,
            tuple(names[x] for x in obj.elems),
            {names[x]: sm[x] for x in obj.elems},
            {(names[x], q): names[y] for (x, q), y in rm.items()},
        )

    # arrows ----------------------------------------------------------
    def make_arrow(self, src: Psh, dst: Psh, mapping: dict) -> Arrow:
        sm_s, sm_d = stage_map(src), stage_map(dst)
        rm_s, rm_d = rest_map(src), rest_map(dst)
        items = []
        for x in src.elems:
            if x not in mapping:
                raise ValueError(f"arrow undefined at {x!r}")
            y = mapping[x]
            if sm_d.get(y, None) != sm_s[x]:
                raise ValueError(f"arrow moves the stage of {x!r}")
            items.append((x, y))
        for x in src.elems:
            for q in self.base.below(sm_s[x]):
                if mapping[rm_s[(x, q)]] != rm_d[(mapping[x], q)]:
                    raise ValueError(f"arrow not natural at {x!r}, {q!r}")
        return Arrow(src, dst, tuple(items))

    def hom(self, src: Psh, dst: Psh) -> tuple:
        sm_s, sm_d = stage_map(src), stage_map(dst)
        rm_s, rm_d = rest_map(src), rest_map(dst)
        order = tuple(src.elems)
        by_stage: dict = {}
        for y in dst.elems:
            by_stage.setdefault(sm_d[y], []).append(y)
        out = []

        def backtrack(i: int, acc: dict):
            if i == len(order):
                out.append(Arrow(src, dst, tuple((x, acc[x]) for x in order)))
                return
            x = order[i]
            if x in acc:
                backtrack(i + 1, acc)
                return
            for y in by_stage.get(sm_s[x], ()):  # try stagewise candidates
                new = dict(acc)
                new[x] = y
                ok = True
                for q in self.base.below(sm_s[x]):
                    lower, target = rm_s[(x, q)], rm_d[(y, q)]
                    if lower in new and new[lower] != target:
                        ok = False
                        break
                    new[lower] = target
                if ok:
                    backtrack(i + 1, new)

        backtrack(0, {})
        return tuple(out)

    # limits ----------------------------------------------------------
    def terminal(self) -> Psh:
        return make_psh(
            self.base,
            self.base.elems,
            {p: p for p in self.base.elems},
            {
                (p, q): q
                for p in self.base.elems
                for q in self.base.below(p)
            },
        )

    def product(self, a: Psh, b: Psh):
        sm_a, sm_b = stage_map(a), stage_map(b)
        rm_a, rm_b = rest_map(a), rest_map(b)
        elems = tuple(
            (x, y)
            for x, y in iproduct(a.elems, b.elems)
            if sm_a[x] == sm_b[y]
        )
        stage = {(x, y): sm_a[x] for x, y in elems}
        rest = {
            ((x, y), q): (rm_a[(x, q)], rm_b[(y, q)])
            for x, y in elems
            for q in self.base.below(sm_a[x])
        }
        obj = make_psh(self.base, elems, stage, rest)
        p1 = Arrow(obj, a, tuple((e, e[0]) for e in elems))
        p2 = Arrow(obj, b, tuple((e, e[1]) for e in elems))
        return obj, p1, p2

    def product_n(self, objs: list):
        if not objs:
            return self.terminal(), []
        if len(objs) == 1:
            return objs[0], [self.identity(objs[0])]
        sms = [stage_map(o) for o in objs]
        rms = [rest_map(o) for o in objs]
        elems = tuple(
            combo
            for combo in iproduct(*(o.elems for o in objs))
            if len({sms[i][x] for i, x in enumerate(combo)}) == 1
        )
        stage = {combo: sms[0][combo[0]] for combo in elems}
        rest = {
            (combo, q): tuple(rms[i][(x, q)] for i, x in enumerate(combo))
            for combo in elems
            for q in self.base.below(stage[combo])
        }
        obj = make_psh(self.base, elems, stage, rest)
        projs = [
            Arrow(obj, o, tuple((e, e[i]) for e in elems))
            for i, o in enumerate(objs)
        ]
        return obj, projs

    def pullback(self, f: Arrow, g: Arrow):
        if f.dst != g.dst:
            raise ValueError("pullback needs a common target")
        fm, gm = arrow_map(f), arrow_map(g)
        sm_a, sm_b = stage_map(f.src), stage_map(g.src)
        rm_a, rm_b = rest_map(f.src), rest_map(g.src)
        elems = tuple(
            (x, y)
            for x, y in iproduct(f.src.elems, g.src.elems)
            if sm_a[x] == sm_b[y] and fm[x] == gm[y]
        )
        stage = {(x, y): sm_a[x] for x, y in elems}
        rest = {
            ((x, y), q): (rm_a[(x, q)], rm_b[(y, q)])
            for x, y in elems
            for q in self.base.below(sm_a[x])
        }
        obj = make_psh(self.base, elems, stage, rest)
        p = Arrow(obj, f.src, tuple((e, e[0]) for e in elems))
        q = Arrow(obj, g.src, tuple((e, e[1]) for e in elems))
        return obj, p, q

    # subobjects --------------------------------------------------------
    def make_sub(self, obj: Psh, elems: Iterable) -> Sub:
        elems = frozenset(elems)
        if not elems <= set(obj.elems):
            raise ValueError("subobject elements outside the ambient object")
        sm, rm = stage_map(obj), rest_map(obj)
        for x in elems:
            for q in self.base.below(sm[x]):
                if rm[(x, q)] not in elems:
                    raise ValueError(
                        f"subobject not closed under restriction at {x!r}"
                    )
        return Sub(obj, elems)

    def sub_implies(self, s: Sub, t: Sub) -> Sub:
        if s.ambient != t.ambient:
            raise ValueError("subobjects of different ambient objects")
        obj = s.ambient
        sm, rm = stage_map(obj), rest_map(obj)
        keep = frozenset(
            x
            for x in obj.elems
            if all(
                rm[(x, q)] not in s.elems or rm[(x, q)] in t.elems
                for q in self.base.below(sm[x])
            )
        )
        return Sub(obj, keep)

    def subobjects(self, obj: Psh) -> tuple:
        sm, rm = stage_map(obj), rest_map(obj)
        n = len(obj.elems)
        out = []
        for mask in range(1 << n):
            elems = frozenset(
                obj.elems[i] for i in range(n) if mask >> i & 1
            )
            if all(
                rm[(x, q)] in elems
                for x in elems
                for q in self.base.below(sm[x])
            ):
                out.append(Sub(obj, elems))
        return tuple(out)

    def forall_along(self, f: Arrow, s: Sub) -> Sub:
        if s.ambient != f.src:
            raise ValueError("forall: subobject not of the arrow's source")
        fm = arrow_map(f)
        sm_d, rm_d = stage_map(f.dst), rest_map(f.dst)
        sm_s = stage_map(f.src)
        keep = []
        for y in f.dst.elems:
            ok = True
            for q in self.base.below(sm_d[y]):
                target = rm_d[(y, q)]
                for x in f.src.elems:
                    if sm_s[x] == q and fm[x] == target and x not in s.elems:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                keep.append(y)
        return Sub(f.dst, frozenset(keep))

    def is_inhabited(self, s: Sub) -> bool:
        sm = stage_map(s.ambient)
        stages = {sm[x] for x in s.elems}
        return stages == set(self.base.elems)

    def sub_object(self, s: Sub):
        obj = s.ambient
        sm, rm = stage_map(obj), rest_map(obj)
        elems = tuple(x for x in obj.elems if x in s.elems)
        sub = make_psh(
            self.base,
            elems,
            {x: sm[x] for x in elems},
            {
                (x, q): rm[(x, q)]
                for x in elems
                for q in self.base.below(sm[x])
            },
        )
        mono = Arrow(sub, obj, tuple((x, x) for x in elems))
        return sub, mono


# -- the constant-presheaf functor -------------------------------------------


def delta_psh(inst: FinPsh, obj: FinObj) -> Psh:
    """Constant presheaf on a finite set: one copy per stage, identity
    restrictions."""
    elems = tuple(
        (x, p) for x in obj.elems for p in inst.base.elems
    )
    stage = {(x, p): p for x, p in elems}
    rest = {
        ((x, p), q): (x, q)
        for x, p in elems
        for q in inst.base.below(p)
    }
    return make_psh(inst.base, elems, stage, rest)


def delta_arrow(inst: FinPsh, f: Arrow, src: Psh, dst: Psh) -> Arrow:
    fm = arrow_map(f)
    return inst.make_arrow(
        src, dst, {(x, p): (fm[x], p) for x, p in src.elems}
    )


def delta_sub(inst: FinPsh, s, delta_obj: Psh) -> Sub:
    """Constant subpresheaf of a constant presheaf, from a set of elements."""
    elems = frozenset(e for e in delta_obj.elems if e[0] in s)
    return inst.make_sub(delta_obj, elems)


def global_section_count(inst: FinPsh, obj: Psh) -> int:
    return len(inst.global_sections(obj))


# -- canonical small bases ------------------------------------------------------


def v_preorder() -> Preorder:
    """Three stages: one bottom below two incomparable tops."""
    return make_preorder(
        ("lo", "left", "right"), {("lo", "left"), ("lo", "right")}
    )


def wedge_psh(inst: FinPsh) -> Psh:
    """Stagewise-inhabited presheaf on the vee base with no global section:
    the two top sections restrict to different bottom elements."""
    pre = inst.base
    if pre != v_preorder():
        raise ValueError("the wedge witness lives on the vee preorder")
    elems = ("l", "r", "l0", "r0")
    stage = {"l": "left", "r": "right", "l0": "lo", "r0": "lo"}
    rest = {
        ("l", "lo"): "l0",
        ("r", "lo"): "r0",
        ("l", "left"): "l",
        ("r", "right"): "r",
        ("l0", "lo"): "l0",
        ("r0", "lo"): "r0",
    }
    return make_psh(pre, elems, stage, rest)
