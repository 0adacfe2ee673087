"""Internal groupoids and internal functors over a backend.

A groupoid is stored with its two nerve levels: composable pairs
``X2 = X1 x_(d,c) X1`` (elements ``(a, b)`` with ``d(a) = c(b)``) and
composable triples ``X3 = X2 x_(p2,p1) X2``.  Composition follows the
"a after b" convention: ``m(a, b)`` runs from ``d(b)`` to ``c(a)``.

Relation-style groupoids built here (kernel pairs, indiscretes) carry a
pair ``(a, b)`` as an arrow from ``a`` to ``b``: ``d`` is the first
projection and ``c`` the second.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import base
from .base import (
    BaseMorphism,
    BaseObject,
    PullbackCone,
    classify,
    compose,
    pullback,
)
from .errors import BackendMismatch, BackendUnsupported, CapExceeded, DomainMismatch


class Groupoid:
    """An internal groupoid (X0, X1, d, c, e, i, m) with cached nerve."""

    __slots__ = ("X0", "X1", "d", "c", "e", "i", "m", "nerve2", "nerve3")

    def __init__(self, X0, X1, d, c, e, i, m, nerve2, nerve3):
        self.X0 = X0
        self.X1 = X1
        self.d = d
        self.c = c
        self.e = e
        self.i = i
        self.m = m
        self.nerve2 = nerve2
        self.nerve3 = nerve3

    @classmethod
    def from_tables(cls, X0, X1, d, c, e, i, m_table) -> "Groupoid":
        """Assemble a groupoid from structure maps and a composition table
        keyed by composable pairs.  Shape errors raise; axiom violations
        are left to ``validate_groupoid``."""
        for f, dom, cod, name in (
            (d, X1, X0, "d"),
            (c, X1, X0, "c"),
            (e, X0, X1, "e"),
            (i, X1, X1, "i"),
        ):
            if f.dom != dom or f.cod != cod:
                raise ValueError(f"structure map {name} has the wrong endpoints")
        nerve2 = pullback(d, c)
        keys = set(m_table)
        expected = set(nerve2.apex.elements)
        if keys != expected:
            missing = sorted(expected - keys, key=nerve2.apex.index.get)
            extra = [k for k in m_table if k not in expected]
            if missing:
                raise ValueError(f"composition table missing pair {missing[0]!r}")
            raise ValueError(f"composition table has non-composable pair {extra[0]!r}")
        m = BaseMorphism(nerve2.apex, X1, m_table)
        nerve3 = pullback(nerve2.proj2, nerve2.proj1)
        return cls(X0, X1, d, c, e, i, m, nerve2, nerve3)

    @property
    def backend(self):
        return self.X0.backend

    def compose_arrows(self, a, b):
        """m(a, b): the composite 'a after b'."""
        return self.m.mapping[(a, b)]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Groupoid):
            return NotImplemented
        return (
            self.X0 == other.X0
            and self.X1 == other.X1
            and self.d == other.d
            and self.c == other.c
            and self.e == other.e
            and self.i == other.i
            and self.m == other.m
        )

    def __hash__(self):
        return hash((self.X0, self.X1, self.d, self.c))

    def __repr__(self):
        return f"Groupoid({len(self.X0.elements)} objects, {len(self.X1.elements)} arrows, {self.backend})"


@dataclass(frozen=True)
class GFunctor:
    """An internal functor (f0, f1) between groupoids over one backend."""

    dom: Groupoid
    cod: Groupoid
    f0: BaseMorphism
    f1: BaseMorphism

    def __repr__(self):
        return f"GFunctor({self.dom!r} -> {self.cod!r})"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class FunctorProfile:
    discrete_fibration: bool
    full: bool
    faithful: bool
    fully_faithful: bool
    essentially_surjective: bool
    levelwise_regular_epi: bool
    equivalence_relation_dom: bool
    phi: BaseMorphism


# ---------------------------------------------------------------------------
# validation


def validate_groupoid(G: Groupoid) -> ValidationReport:
    """Check every groupoid axiom by enumeration; empty report = valid."""
    out = []
    for f, name in ((G.d, "d"), (G.c, "c"), (G.e, "e"), (G.i, "i"), (G.m, "m")):
        out.extend(f"{name}: {v}" for v in base.hom_violations(f))

    nerve2 = pullback(G.d, G.c)
    if nerve2.apex != G.nerve2.apex or nerve2.proj1 != G.nerve2.proj1:
        out.append("nerve2: stored cone differs from the pullback of (d, c)")
        return ValidationReport(tuple(out))
    nerve3 = pullback(G.nerve2.proj2, G.nerve2.proj1)
    if nerve3.apex != G.nerve3.apex:
        out.append("nerve3: stored cone differs from the pullback of (p2, p1)")

    d, c, e, i = G.d.mapping, G.c.mapping, G.e.mapping, G.i.mapping
    m = G.m.mapping
    for x in G.X0.elements:
        if d[e[x]] != x:
            out.append(f"e: d(e({x!r})) != {x!r}")
        if c[e[x]] != x:
            out.append(f"e: c(e({x!r})) != {x!r}")
    composable = set(G.nerve2.apex.elements)
    for a in G.X1.elements:
        if d[i[a]] != c[a]:
            out.append(f"i: d(i({a!r})) != c({a!r})")
        if c[i[a]] != d[a]:
            out.append(f"i: c(i({a!r})) != d({a!r})")
        if m[(a, e[d[a]])] != a:
            out.append(f"m: m({a!r}, e(d({a!r}))) != {a!r}")
        if m[(e[c[a]], a)] != a:
            out.append(f"m: m(e(c({a!r})), {a!r}) != {a!r}")
        if (a, i[a]) not in composable or m[(a, i[a])] != e[c[a]]:
            out.append(f"i: m({a!r}, i({a!r})) != e(c({a!r}))")
        if (i[a], a) not in composable or m[(i[a], a)] != e[d[a]]:
            out.append(f"i: m(i({a!r}), {a!r}) != e(d({a!r}))")
    for a, b in G.nerve2.apex.elements:
        ab = m[(a, b)]
        if d[ab] != d[b]:
            out.append(f"m: d(m({a!r}, {b!r})) != d({b!r})")
        if c[ab] != c[a]:
            out.append(f"m: c(m({a!r}, {b!r})) != c({a!r})")
    for x, y in G.nerve3.apex.elements:
        # x = (a, b), y = (b, cc): associativity via the two inner faces
        a, b = x
        _, cc = y
        if m[(m[(a, b)], cc)] != m[(a, m[(b, cc)])]:
            out.append(f"m: associativity fails on ({a!r}, {b!r}, {cc!r})")
    return ValidationReport(tuple(out))


def validate_functor(F: GFunctor) -> ValidationReport:
    """Check the four functor equations on all of X1 and X2."""
    if F.dom.backend != F.cod.backend:
        raise BackendMismatch("functor endpoints in different backends")
    out = []
    if F.f0.dom != F.dom.X0 or F.f0.cod != F.cod.X0:
        out.append("f0: wrong endpoints")
    if F.f1.dom != F.dom.X1 or F.f1.cod != F.cod.X1:
        out.append("f1: wrong endpoints")
    if out:
        return ValidationReport(tuple(out))
    out.extend(f"f0: {v}" for v in base.hom_violations(F.f0))
    out.extend(f"f1: {v}" for v in base.hom_violations(F.f1))
    f0, f1 = F.f0.mapping, F.f1.mapping
    X, Y = F.dom, F.cod
    for a in X.X1.elements:
        if Y.d.mapping[f1[a]] != f0[X.d.mapping[a]]:
            out.append(f"f1: d(f1({a!r})) != f0(d({a!r}))")
        if Y.c.mapping[f1[a]] != f0[X.c.mapping[a]]:
            out.append(f"f1: c(f1({a!r})) != f0(c({a!r}))")
    for x in X.X0.elements:
        if f1[X.e.mapping[x]] != Y.e.mapping[f0[x]]:
            out.append(f"f1: f1(e({x!r})) != e(f0({x!r}))")
    composable = set(Y.nerve2.apex.elements)
    for a, b in X.nerve2.apex.elements:
        img = (f1[a], f1[b])
        if img not in composable or f1[X.m.mapping[(a, b)]] != Y.m.mapping[img]:
            out.append(f"f1: f1(m({a!r}, {b!r})) != m(f1({a!r}), f1({b!r}))")
    return ValidationReport(tuple(out))


# ---------------------------------------------------------------------------
# functor plumbing


def identity_functor(G: Groupoid) -> GFunctor:
    return GFunctor(G, G, base.identity(G.X0), base.identity(G.X1))


def compose_functors(G: GFunctor, F: GFunctor) -> GFunctor:
    if F.cod != G.dom:
        raise DomainMismatch("compose_functors: cod(F) != dom(G)")
    return GFunctor(F.dom, G.cod, compose(G.f0, F.f0), compose(G.f1, F.f1))


def functor_is_iso(F: GFunctor) -> bool:
    return classify(F.f0).iso and classify(F.f1).iso


def inverse_functor(F: GFunctor) -> GFunctor:
    return GFunctor(F.cod, F.dom, base.inverse(F.f0), base.inverse(F.f1))


# ---------------------------------------------------------------------------
# limits in Gpd


@dataclass(frozen=True)
class GpdPullback:
    apex: Groupoid
    p1: GFunctor  # onto dom of the first leg
    p2: GFunctor  # onto dom of the second leg
    legs: tuple


def gpd_pullback(F: GFunctor, G: GFunctor) -> GpdPullback:
    """Levelwise pullback of a cospan of functors, with induced structure."""
    if F.cod != G.cod:
        raise DomainMismatch("gpd_pullback: functors have different codomains")
    X, Y = F.dom, G.dom
    c0 = pullback(F.f0, G.f0)
    c1 = pullback(F.f1, G.f1)
    W0, W1 = c0.apex, c1.apex

    def level0(pair_map_x, pair_map_y):
        return {p: (pair_map_x[p[0]], pair_map_y[p[1]]) for p in W1.elements}

    d = BaseMorphism(W1, W0, level0(X.d.mapping, Y.d.mapping))
    c = BaseMorphism(W1, W0, level0(X.c.mapping, Y.c.mapping))
    e = BaseMorphism(W0, W1, {p: (X.e.mapping[p[0]], Y.e.mapping[p[1]]) for p in W0.elements})
    i = BaseMorphism(W1, W1, {p: (X.i.mapping[p[0]], Y.i.mapping[p[1]]) for p in W1.elements})
    nerve2 = pullback(d, c)
    m_table = {
        (p, q): (X.m.mapping[(p[0], q[0])], Y.m.mapping[(p[1], q[1])])
        for p, q in nerve2.apex.elements
    }
    W = Groupoid(W0, W1, d, c, e, i, BaseMorphism(nerve2.apex, W1, m_table), nerve2,
                 pullback(nerve2.proj2, nerve2.proj1))
    p1 = GFunctor(W, X, c0.proj1, c1.proj1)
    p2 = GFunctor(W, Y, c0.proj2, c1.proj2)
    return GpdPullback(W, p1, p2, (F, G))


def pair_into_pullback(P: GpdPullback, H1: GFunctor, H2: GFunctor) -> GFunctor:
    """The mediating functor <H1, H2> into a computed pullback."""
    if H1.dom != H2.dom:
        raise DomainMismatch("pair_into_pullback: different domains")
    T = H1.dom
    f0 = BaseMorphism(T.X0, P.apex.X0, {x: (H1.f0.mapping[x], H2.f0.mapping[x]) for x in T.X0.elements})
    f1 = BaseMorphism(T.X1, P.apex.X1, {a: (H1.f1.mapping[a], H2.f1.mapping[a]) for a in T.X1.elements})
    return GFunctor(T, P.apex, f0, f1)


def product_groupoid(G: Groupoid, H: Groupoid):
    """Levelwise product with the two projection functors."""
    P = gpd_pullback(
        GFunctor(G, discrete_of(base.terminal(G.backend)), base.terminal_map(G.X0), base.terminal_map(G.X1)),
        GFunctor(H, discrete_of(base.terminal(H.backend)), base.terminal_map(H.X0), base.terminal_map(H.X1)),
    )
    return P.apex, P.p1, P.p2


# ---------------------------------------------------------------------------
# predicates


def comparison_phi(F: GFunctor) -> BaseMorphism:
    """The comparison X1 -> (X0 x X0) x_(Y0 x Y0) Y1 classifying fullness
    and faithfulness."""
    X, Y = F.dom, F.cod
    px = base.product(X.X0, X.X0)
    py = base.product(Y.X0, Y.X0)
    f0xf0 = BaseMorphism(px.apex, py.apex, {p: (F.f0.mapping[p[0]], F.f0.mapping[p[1]]) for p in px.apex.elements})
    dc_y = BaseMorphism(Y.X1, py.apex, {a: (Y.d.mapping[a], Y.c.mapping[a]) for a in Y.X1.elements})
    cone = pullback(f0xf0, dc_y)
    phi = BaseMorphism(
        X.X1,
        cone.apex,
        {a: ((X.d.mapping[a], X.c.mapping[a]), F.f1.mapping[a]) for a in X.X1.elements},
    )
    assert compose(cone.proj2, phi) == F.f1
    dc_x = BaseMorphism(X.X1, px.apex, {a: (X.d.mapping[a], X.c.mapping[a]) for a in X.X1.elements})
    assert compose(cone.proj1, phi) == dc_x
    return phi


def is_discrete_fibration(F: GFunctor) -> bool:
    """True iff the codomain square c.f1 = f0.c is a pullback, decided by
    the canonical comparison X1 -> X0 x_Y0 Y1 being an isomorphism."""
    X, Y = F.dom, F.cod
    cone = pullback(F.f0, Y.c)
    psi = BaseMorphism(
        X.X1, cone.apex, {a: (X.c.mapping[a], F.f1.mapping[a]) for a in X.X1.elements}
    )
    return classify(psi).iso


def is_full(F: GFunctor) -> bool:
    return classify(comparison_phi(F)).regular_epi


def is_equivalence_relation(G: Groupoid) -> bool:
    """True iff (d, c): X1 -> X0 x X0 is mono."""
    seen = set()
    for a in G.X1.elements:
        key = (G.d.mapping[a], G.c.mapping[a])
        if key in seen:
            return False
        seen.add(key)
    return True


def profile(F: GFunctor) -> FunctorProfile:
    """All the elementary predicate flags of a functor at once."""
    from . import reflection  # late import: reflection builds on this module

    phi = comparison_phi(F)
    phi_flags = classify(phi)
    full = phi_flags.regular_epi
    faithful = phi_flags.mono
    fully_faithful = full and faithful
    assert fully_faithful == phi_flags.iso
    ess_surj = classify(reflection.pi0_functor(F)).regular_epi
    lre = classify(F.f0).regular_epi and classify(F.f1).regular_epi
    return FunctorProfile(
        discrete_fibration=is_discrete_fibration(F),
        full=full,
        faithful=faithful,
        fully_faithful=fully_faithful,
        essentially_surjective=ess_surj,
        levelwise_regular_epi=lre,
        equivalence_relation_dom=is_equivalence_relation(F.dom),
        phi=phi,
    )


# ---------------------------------------------------------------------------
# builders


def discrete_of(X: BaseObject) -> Groupoid:
    idm = base.identity(X)
    return Groupoid.from_tables(X, X, idm, idm, idm, idm, {(x, x): x for x in X.elements})


def relation_on(X0: BaseObject, X1: BaseObject) -> Groupoid:
    """Equivalence-relation groupoid with arrows the pair object X1 over
    X0; (a, b) runs from a to b."""
    pairs = list(X1.elements)
    pair_set = set(pairs)
    for a, b in pairs:
        assert (b, a) in pair_set
    d = BaseMorphism(X1, X0, {p: p[0] for p in pairs})
    c = BaseMorphism(X1, X0, {p: p[1] for p in pairs})
    e = BaseMorphism(X0, X1, {x: (x, x) for x in X0.elements})
    i = BaseMorphism(X1, X1, {p: (p[1], p[0]) for p in pairs})
    m_table = {}
    for x in pairs:
        for y in pairs:
            if x[0] == y[1]:  # d(x) = c(y): y then x
                m_table[(x, y)] = (y[0], x[1])
    return Groupoid.from_tables(X0, X1, d, c, e, i, m_table)


def relation_of_quotient(q: BaseMorphism) -> Groupoid:
    """Kernel-pair relation of a quotient map, as a groupoid."""
    cone = base.kernel_pair(q)
    return relation_on(q.dom, cone.apex)


def indiscrete_of(X: BaseObject) -> Groupoid:
    """The groupoid with exactly one arrow between any two elements."""
    return relation_of_quotient(base.terminal_map(X))


def group_as_groupoid(elements, mul) -> Groupoid:
    """One-object finset groupoid from a group multiplication table."""
    elements = tuple(elements)
    unit = next(u for u in elements if all(mul[(u, x)] == x for x in elements))
    inv = {}
    for a in elements:
        inv[a] = next(b for b in elements if mul[(a, b)] == unit)
    X0 = base.finset_obj(["*"])
    X1 = base.finset_obj(elements)
    const = base.constant(X1, X0, "*")
    e = BaseMorphism(X0, X1, {"*": unit})
    i = BaseMorphism(X1, X1, inv)
    m_table = {(a, b): mul[(a, b)] for a in elements for b in elements}
    return Groupoid.from_tables(X0, X1, const, const, e, i, m_table)


def groupoid_of_complex(boundary: BaseMorphism) -> Groupoid:
    """finab only: the groupoid of a two-term complex N -> C0, with
    X0 = C0, X1 = N + C0, d(n, x) = x and c(n, x) = boundary(n) + x."""
    if boundary.dom.backend != base.FINAB:
        raise BackendUnsupported("complex groupoids need the finab backend")
    N, C0 = boundary.dom, boundary.cod
    cone = base.product(N, C0)
    X1 = cone.apex
    d = BaseMorphism(X1, C0, {p: p[1] for p in X1.elements})
    c = BaseMorphism(X1, C0, {p: C0.add[(boundary(p[0]), p[1])] for p in X1.elements})
    e = BaseMorphism(C0, X1, {x: (N.zero, x) for x in C0.elements})
    i = BaseMorphism(
        X1, X1, {p: (N.neg[p[0]], C0.add[(boundary(p[0]), p[1])]) for p in X1.elements}
    )
    m_table = {}
    for p, q in pullback(d, c).apex.elements:
        m_table[(p, q)] = (N.add[(p[0], q[0])], q[1])
    return Groupoid.from_tables(C0, X1, d, c, e, i, m_table)


def full_subgroupoid(G: Groupoid, objects) -> GFunctor:
    """Inclusion of the full subgroupoid on a subset of objects (for the
    finab backend the subset must be a subgroup)."""
    chosen = set(objects)
    X0 = base.sub_object(G.X0, chosen)
    arrows = [a for a in G.X1.elements if G.d.mapping[a] in chosen and G.c.mapping[a] in chosen]
    X1 = base.sub_object(G.X1, arrows)
    d = BaseMorphism(X1, X0, {a: G.d.mapping[a] for a in arrows})
    c = BaseMorphism(X1, X0, {a: G.c.mapping[a] for a in arrows})
    e = BaseMorphism(X0, X1, {x: G.e.mapping[x] for x in X0.elements})
    i = BaseMorphism(X1, X1, {a: G.i.mapping[a] for a in arrows})
    arrow_set = set(arrows)
    m_table = {
        (a, b): G.m.mapping[(a, b)]
        for a, b in G.nerve2.apex.elements
        if a in arrow_set and b in arrow_set
    }
    H = Groupoid.from_tables(X0, X1, d, c, e, i, m_table)
    return GFunctor(H, G, base.inclusion(X0, G.X0), base.inclusion(X1, G.X1))


def component_partition(G: Groupoid):
    """Connected components of the object carrier, via a local union-find
    over the arrow endpoints; returns {object: least-index representative}."""
    uf = base._UnionFind(len(G.X0.elements))
    index = G.X0.index
    for a in G.X1.elements:
        uf.union(index[G.d.mapping[a]], index[G.c.mapping[a]])
    return {x: G.X0.elements[uf.find(index[x])] for x in G.X0.elements}


def component_inclusion(G: Groupoid, representatives) -> GFunctor:
    """Inclusion of the full subgroupoid on the chosen components."""
    part = component_partition(G)
    wanted = set(representatives)
    objs = [x for x in G.X0.elements if part[x] in wanted]
    return full_subgroupoid(G, objs)


def discrete_functor(u: BaseMorphism) -> GFunctor:
    return GFunctor(discrete_of(u.dom), discrete_of(u.cod), u, u)


# ---------------------------------------------------------------------------
# exhaustive functor enumeration (tiny inputs; uniqueness searches)


def enumerate_functors(G: Groupoid, H: Groupoid, limit=500000):
    """Every internal functor G -> H, by exhaustive search with pruning.

    Object images are enumerated first; arrow images are then restricted
    to the hom-fibers forced by d and c.  Intended for carriers of at most
    a few elements.
    """
    if G.backend != H.backend:
        raise BackendMismatch("enumerate_functors: mixed backends")
    fibers = {}
    for a in H.X1.elements:
        fibers.setdefault((H.d.mapping[a], H.c.mapping[a]), []).append(a)

    obj_candidates = base.all_morphisms(G.X0, H.X0, limit)
    count = 0
    for f0 in obj_candidates:
        pools = []
        ok = True
        for a in G.X1.elements:
            pool = fibers.get((f0(G.d.mapping[a]), f0(G.c.mapping[a])), [])
            if not pool:
                ok = False
                break
            pools.append(pool)
        if not ok:
            continue
        total = 1
        for p in pools:
            total *= len(p)
            if total > limit:
                raise CapExceeded("functor enumeration too large")
        for images in itertools.product(*pools):
            count += 1
            if count > limit:
                raise CapExceeded("functor enumeration too large")
            f1map = dict(zip(G.X1.elements, images))
            if any(f1map[G.e.mapping[x]] != H.e.mapping[f0(x)] for x in G.X0.elements):
                continue
            if any(
                f1map[G.m.mapping[(a, b)]] != H.m.mapping[(f1map[a], f1map[b])]
                for a, b in G.nerve2.apex.elements
            ):
                continue
            try:
                f1 = BaseMorphism(G.X1, H.X1, f1map)
            except ValueError:
                continue
            if G.backend == base.FINAB and not base.is_homomorphism(f1):
                continue
            yield GFunctor(G, H, f0, f1)
