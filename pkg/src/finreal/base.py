"""Finite Heyting category instances.

Everything downstream is generic over a small interface: objects with a
finite, deterministically ordered element listing; arrows as element
maps validated per instance; subobjects as element subsets closed under
the instance's notion of restriction; the regular operations (image,
preimage, pullback) and the Heyting ones (universal quantification
along a map, subobject lattice with implication).

`FinSet` is the plain finite-sets instance.  `presheaf.FinPsh` covers
presheaves on a finite preorder, `assemblies.AsmInstance` the category
of assemblies over an internal applicative pair.  Generic relational
helpers (graphs, diagonals, relation composition) live at the bottom of
this module and only speak the interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct
from typing import Any, Iterable


@dataclass(frozen=True)
class FinObj:
    """A finite set with a fixed element order."""

    elems: tuple

    def __repr__(self) -> str:
        return f"FinObj({list(self.elems)!r})"


@dataclass(frozen=True)
class Arrow:
    """An arrow presented by its underlying element map.

    `src` and `dst` are instance objects (FinObj, presheaves or
    assemblies); `mapping` is ordered by source element position so that
    equal arrows compare equal.
    """

    src: Any
    dst: Any
    mapping: tuple

    def __call__(self, x):
        return arrow_map(self)[x]

    def __repr__(self) -> str:
        return f"Arrow({dict(self.mapping)!r})"


@lru_cache(maxsize=None)
def arrow_map(f: Arrow) -> dict:
    return dict(f.mapping)


@dataclass(frozen=True)
class Sub:
    """A subobject of `ambient`, as the subset of elements it contains.

    For assemblies the elements are realizer/point pairs and the lattice
    operations are not plain set operations; generic code must always go
    through the instance methods.
    """

    ambient: Any
    elems: frozenset

    def __repr__(self) -> str:
        return f"Sub({sorted(map(repr, self.elems))})"


def _check_common(s: Sub, t: Sub) -> None:
    if s.ambient != t.ambient:
        raise ValueError("subobjects of different ambient objects")


class Instance:
    """Interface every base category instance implements."""

    name = "abstract"
    cartesian_closed = False

    # objects -----------------------------------------------------------
    def elements(self, obj) -> tuple:
        raise NotImplementedError

    def relabel(self, obj, names: dict):
        """Rename elements along a bijection; returns the new object."""
        raise NotImplementedError

    # arrows ------------------------------------------------------------
    def make_arrow(self, src, dst, mapping: dict) -> Arrow:
        raise NotImplementedError

    def identity(self, obj) -> Arrow:
        return self.make_arrow(obj, obj, {x: x for x in self.elements(obj)})

    def compose(self, g: Arrow, f: Arrow) -> Arrow:
        if f.dst != g.src:
            raise ValueError("composition mismatch")
        gm = arrow_map(g)
        return self.make_arrow(f.src, g.dst, {x: gm[y] for x, y in f.mapping})

    def hom(self, src, dst) -> tuple:
        raise NotImplementedError

    # limits -------------------------------------------------------------
    def terminal(self):
        raise NotImplementedError

    def bang(self, obj) -> Arrow:
        t = self.terminal()
        star = self.elements(t)[0]
        return self.make_arrow(obj, t, {x: star for x in self.elements(obj)})

    def product(self, a, b):
        """Returns (object, first projection, second projection).

        Elements of a product object are literal pairs (x, y) in every
        instance, so generic code can build tuple arrows elementwise.
        """
        raise NotImplementedError

    def tuple_arrow(self, f: Arrow, g: Arrow) -> Arrow:
        if f.src != g.src:
            raise ValueError("tupling needs a common source")
        p, _, _ = self.product(f.dst, g.dst)
        fm, gm = arrow_map(f), arrow_map(g)
        return self.make_arrow(
            f.src, p, {x: (fm[x], gm[x]) for x in self.elements(f.src)}
        )

    def product_n(self, objs: list):
        """N-ary product with flat tuple elements; returns (obj, projections)."""
        if not objs:
            return self.terminal(), []
        if len(objs) == 1:
            return objs[0], [self.identity(objs[0])]
        obj, p1, p2 = self.product(objs[0], objs[1])
        projs = [p1, p2]
        for extra in objs[2:]:
            obj2, q1, q2 = self.product(obj, extra)
            projs = [self.compose(p, q1) for p in projs] + [q2]
            obj = obj2

        def flat(e, k):
            if k == 2:
                return e
            return flat(e[0], k - 1) + (e[1],)

        n = len(objs)
        names = {e: flat(e, n) for e in self.elements(obj)}
        flatobj = self.relabel(obj, names)
        unflat = self.make_arrow(flatobj, obj, {v: k for k, v in names.items()})
        return flatobj, [self.compose(p, unflat) for p in projs]

    def pullback(self, f: Arrow, g: Arrow):
        """Returns (object, projection to f.src, projection to g.src)."""
        raise NotImplementedError

    # subobjects ----------------------------------------------------------
    def full_sub(self, obj) -> Sub:
        raise NotImplementedError

    def empty_sub(self, obj) -> Sub:
        return Sub(obj, frozenset())

    def make_sub(self, obj, elems: Iterable) -> Sub:
        raise NotImplementedError

    def sub_meet(self, s: Sub, t: Sub) -> Sub:
        raise NotImplementedError

    def sub_join(self, s: Sub, t: Sub) -> Sub:
        raise NotImplementedError

    def sub_implies(self, s: Sub, t: Sub) -> Sub:
        raise NotImplementedError

    def sub_leq(self, s: Sub, t: Sub) -> bool:
        raise NotImplementedError

    def sub_eq(self, s: Sub, t: Sub) -> bool:
        return self.sub_leq(s, t) and self.sub_leq(t, s)

    def subobjects(self, obj) -> tuple:
        raise NotImplementedError

    def image(self, f: Arrow, s: Sub) -> Sub:
        raise NotImplementedError

    def preimage(self, f: Arrow, s: Sub) -> Sub:
        raise NotImplementedError

    def forall_along(self, f: Arrow, s: Sub) -> Sub:
        raise NotImplementedError

    def is_inhabited(self, s: Sub) -> bool:
        """Whether the support of `s` covers the terminal object."""
        raise NotImplementedError

    def sub_object(self, s: Sub):
        """Present a subobject as (object, mono into the ambient)."""
        raise NotImplementedError

    def global_sections(self, obj) -> tuple:
        return self.hom(self.terminal(), obj)


class ElementwiseOps:
    """Subobject calculus for instances whose subobjects really are the
    element subsets: meet/join are intersection/union, image and
    preimage act pointwise.  Suitable for sets and presheaves, wrong for
    assemblies."""

    def full_sub(self, obj) -> Sub:
        return Sub(obj, frozenset(self.elements(obj)))

    def sub_meet(self, s: Sub, t: Sub) -> Sub:
        _check_common(s, t)
        return Sub(s.ambient, s.elems & t.elems)

    def sub_join(self, s: Sub, t: Sub) -> Sub:
        _check_common(s, t)
        return Sub(s.ambient, s.elems | t.elems)

    def sub_leq(self, s: Sub, t: Sub) -> bool:
        _check_common(s, t)
        return s.elems <= t.elems

    def image(self, f: Arrow, s: Sub) -> Sub:
        if s.ambient != f.src:
            raise ValueError("image: subobject not of the arrow's source")
        fm = arrow_map(f)
        return Sub(f.dst, frozenset(fm[x] for x in s.elems))

    def preimage(self, f: Arrow, s: Sub) -> Sub:
        if s.ambient != f.dst:
            raise ValueError("preimage: subobject not of the arrow's target")
        return Sub(f.src, frozenset(x for x, y in f.mapping if y in s.elems))


class FinSet(ElementwiseOps, Instance):
    """Finite sets and all functions between them."""

    name = "finset"
    cartesian_closed = True

    def __eq__(self, other) -> bool:
        return isinstance(other, FinSet)

    def __hash__(self) -> int:
        return hash("finset")

    def elements(self, obj: FinObj) -> tuple:
        return obj.elems

    def relabel(self, obj: FinObj, names: dict) -> FinObj:
        return FinObj(tuple(names[x] for x in obj.elems))

    def make_arrow(self, src: FinObj, dst: FinObj, mapping: dict) -> Arrow:
        dst_set = set(dst.elems)
        items = []
        for x in src.elems:
            if x not in mapping:
                raise ValueError(f"arrow undefined at {x!r}")
            y = mapping[x]
            if y not in dst_set:
                raise ValueError(f"arrow value {y!r} outside the target")
            items.append((x, y))
        return Arrow(src, dst, tuple(items))

    def hom(self, src: FinObj, dst: FinObj) -> tuple:
        if not dst.elems:
            return () if src.elems else (Arrow(src, dst, ()),)
        out = []
        for choice in iproduct(dst.elems, repeat=len(src.elems)):
            out.append(Arrow(src, dst, tuple(zip(src.elems, choice))))
        return tuple(out)

    def terminal(self) -> FinObj:
        return FinObj(((),))

    def product(self, a: FinObj, b: FinObj):
        obj = FinObj(tuple(iproduct(a.elems, b.elems)))
        p1 = Arrow(obj, a, tuple((e, e[0]) for e in obj.elems))
        p2 = Arrow(obj, b, tuple((e, e[1]) for e in obj.elems))
        return obj, p1, p2

    def product_n(self, objs: list):
        if not objs:
            return self.terminal(), []
        obj = FinObj(tuple(iproduct(*(o.elems for o in objs))))
        projs = [
            Arrow(obj, o, tuple((e, e[i]) for e in obj.elems))
            for i, o in enumerate(objs)
        ]
        return obj, projs

    def pullback(self, f: Arrow, g: Arrow):
        if f.dst != g.dst:
            raise ValueError("pullback needs a common target")
        fm, gm = arrow_map(f), arrow_map(g)
        elems = tuple(
            (x, y)
            for x, y in iproduct(f.src.elems, g.src.elems)
            if fm[x] == gm[y]
        )
        obj = FinObj(elems)
        p = Arrow(obj, f.src, tuple((e, e[0]) for e in elems))
        q = Arrow(obj, g.src, tuple((e, e[1]) for e in elems))
        return obj, p, q

    def make_sub(self, obj: FinObj, elems: Iterable) -> Sub:
        elems = frozenset(elems)
        if not elems <= set(obj.elems):
            raise ValueError("subobject elements outside the ambient object")
        return Sub(obj, elems)

    def sub_implies(self, s: Sub, t: Sub) -> Sub:
        _check_common(s, t)
        keep = frozenset(
            x for x in s.ambient.elems if x not in s.elems or x in t.elems
        )
        return Sub(s.ambient, keep)

    def subobjects(self, obj: FinObj) -> tuple:
        out = []
        n = len(obj.elems)
        for mask in range(1 << n):
            out.append(
                Sub(
                    obj,
                    frozenset(obj.elems[i] for i in range(n) if mask >> i & 1),
                )
            )
        return tuple(out)

    def forall_along(self, f: Arrow, s: Sub) -> Sub:
        if s.ambient != f.src:
            raise ValueError("forall: subobject not of the arrow's source")
        bad = frozenset(y for x, y in f.mapping if x not in s.elems)
        return Sub(f.dst, frozenset(f.dst.elems) - bad)

    def is_inhabited(self, s: Sub) -> bool:
        return bool(s.elems)

    def sub_object(self, s: Sub):
        obj = FinObj(tuple(x for x in s.ambient.elems if x in s.elems))
        mono = Arrow(obj, s.ambient, tuple((x, x) for x in obj.elems))
        return obj, mono

    def exponential(self, a: FinObj, b: FinObj) -> FinObj:
        """Function space b^a; elements are arrow mappings (sorted tuples)."""
        return FinObj(tuple(f.mapping for f in self.hom(a, b)))


FINSET = FinSet()


# -- generic relational helpers -------------------------------------------


def graph_sub(inst: Instance, f: Arrow) -> Sub:
    """The graph of f as a subobject of src x dst."""
    gr = inst.tuple_arrow(inst.identity(f.src), f)
    return inst.image(gr, inst.full_sub(f.src))


def diag_sub(inst: Instance, obj) -> Sub:
    ident = inst.identity(obj)
    return inst.image(inst.tuple_arrow(ident, ident), inst.full_sub(obj))


def rel_compose(inst: Instance, r: Sub, s: Sub, x, y, z) -> Sub:
    """Compose relations r <= x*y and s <= y*z into a subobject of x*z."""
    _, (px, py, pz) = inst.product_n([x, y, z])
    rl = inst.preimage(inst.tuple_arrow(px, py), r)
    sl = inst.preimage(inst.tuple_arrow(py, pz), s)
    return inst.image(inst.tuple_arrow(px, pz), inst.sub_meet(rl, sl))
