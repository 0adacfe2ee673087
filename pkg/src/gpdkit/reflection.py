"""The connected-component reflector and its companions.

``pi0`` sends a groupoid to the codomain of the coequalizer of (d, c);
``supp`` to the kernel pair of that coequalizer, viewed as an equivalence
relation on the objects; ``decalage`` shifts a groupoid one nerve level
down, giving the kernel pair of c together with the canonical comparison
``epsilon``.  ``pi1`` (finab only) is the kernel of (d, c).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import base
from .base import BaseMorphism, BaseObject, ForkData, classify, compose, pullback
from .errors import BackendUnsupported, InternalDisagreement, NotARelation, NotASplitEpiSquare
from .groupoids import (
    GFunctor,
    GpdPullback,
    Groupoid,
    compose_functors,
    discrete_of,
    gpd_pullback,
    identity_functor,
    is_equivalence_relation,
    pair_into_pullback,
    relation_of_quotient,
)


@dataclass(frozen=True)
class Pi0Result:
    components: BaseObject
    q: BaseMorphism  # X0 -> components
    eta: GFunctor  # the reflection unit into the discrete groupoid


@dataclass(frozen=True)
class SuppResult:
    support: Groupoid  # equivalence relation on X0
    sigma: GFunctor  # unit, identity on objects


@dataclass(frozen=True)
class DecResult:
    dec: Groupoid  # objects X1, arrows the composable pairs
    epsilon: GFunctor  # components (d, p2)


def pi0(G: Groupoid) -> Pi0Result:
    fork = base.coequalizer(G.d, G.c)
    q = fork.q
    eta = GFunctor(G, discrete_of(fork.quotient), q, compose(q, G.d))
    return Pi0Result(fork.quotient, q, eta)


def pi0_fork(G: Groupoid) -> ForkData:
    return base.coequalizer(G.d, G.c)


def pi0_functor(F: GFunctor) -> BaseMorphism:
    """The induced map on components: the unique u with u . q = q . f0."""
    res_dom = pi0(F.dom)
    res_cod = pi0(F.cod)
    fork = ForkData((F.dom.d, F.dom.c), res_dom.components, res_dom.q)
    return base.factor_through_quotient(fork, compose(res_cod.q, F.f0))


def supp(G: Groupoid) -> SuppResult:
    q = pi0(G).q
    support = relation_of_quotient(q)
    sigma_f1 = BaseMorphism(
        G.X1,
        support.X1,
        {a: (G.d.mapping[a], G.c.mapping[a]) for a in G.X1.elements},
    )
    sigma = GFunctor(G, support, base.identity(G.X0), sigma_f1)
    return SuppResult(support, sigma)


def supp_functor(F: GFunctor) -> GFunctor:
    sx = supp(F.dom)
    sy = supp(F.cod)
    f1 = BaseMorphism(
        sx.support.X1,
        sy.support.X1,
        {p: (F.f0.mapping[p[0]], F.f0.mapping[p[1]]) for p in sx.support.X1.elements},
    )
    return GFunctor(sx.support, sy.support, F.f0, f1)


def q_relation(R: Groupoid) -> ForkData:
    """The quotient functor on equivalence relations (agrees with pi0)."""
    if not is_equivalence_relation(R):
        raise NotARelation("q_relation needs an equivalence relation")
    return base.coequalizer(R.d, R.c)


def decalage(G: Groupoid) -> DecResult:
    """Shift the nerve: objects become X1, arrows the composable pairs,
    with faces m and p1.  The result is the kernel pair of c presented as
    an equivalence relation; epsilon = (d, p2) is the comparison back."""
    X1 = G.X1
    X2 = G.nerve2.apex
    d = G.m
    c = G.nerve2.proj1
    e = BaseMorphism(X1, X2, {a: (a, G.e.mapping[G.d.mapping[a]]) for a in X1.elements})
    i_map = {}
    for a, b in X2.elements:
        i_map[(a, b)] = (G.m.mapping[(a, b)], G.i.mapping[b])
    i = BaseMorphism(X2, X2, i_map)
    nerve2 = pullback(d, c)
    m_table = {}
    for x, y in nerve2.apex.elements:
        # x = (a, b), y = (a', b') with m(a, b) = a'; composite (a, m(b, b'))
        m_table[(x, y)] = (x[0], G.m.mapping[(x[1], y[1])])
    m = BaseMorphism(nerve2.apex, X2, m_table)
    dec = Groupoid(X1, X2, d, c, e, i, m, nerve2, pullback(nerve2.proj2, nerve2.proj1))
    epsilon = GFunctor(dec, G, G.d, G.nerve2.proj2)
    return DecResult(dec, epsilon)


def dec_functor(F: GFunctor) -> GFunctor:
    """The shifted functor Dec(F), cross-checked against the pullback of F
    along epsilon of the codomain.

    The canonical comparison Dec(dom F) -> dom F x_cod(F) Dec(cod F) is an
    isomorphism exactly when F is a discrete fibration; both sides of that
    equivalence are computed and must agree.  The naturality square of
    epsilon always commutes and is checked unconditionally.
    """
    from .groupoids import is_discrete_fibration

    dx = decalage(F.dom)
    dy = decalage(F.cod)
    f1 = BaseMorphism(
        dx.dec.X1,
        dy.dec.X1,
        {p: (F.f1.mapping[p[0]], F.f1.mapping[p[1]]) for p in dx.dec.X1.elements},
    )
    out = GFunctor(dx.dec, dy.dec, F.f1, f1)
    if compose_functors(dy.epsilon, out) != compose_functors(F, dx.epsilon):
        raise InternalDisagreement("epsilon naturality square does not commute")
    P = gpd_pullback(F, dy.epsilon)
    comparison = pair_into_pullback(P, dx.epsilon, out)
    comparison_iso = classify(comparison.f0).iso and classify(comparison.f1).iso
    if comparison_iso != is_discrete_fibration(F):
        raise InternalDisagreement(
            "Dec(F) is the pullback of F along epsilon iff F is a discrete fibration"
        )
    return out


def pi1(G: Groupoid) -> BaseObject:
    """finab only: the kernel of (d, c): X1 -> X0 x X0."""
    if G.backend != base.FINAB:
        raise BackendUnsupported("pi1 needs the finab backend")
    prod = base.product(G.X0, G.X0)
    dc = BaseMorphism(
        G.X1, prod.apex, {a: (G.d.mapping[a], G.c.mapping[a]) for a in G.X1.elements}
    )
    return base.kernel(dc).dom


def pi1_functor(F: GFunctor) -> BaseMorphism:
    """Restriction of f1 to the vertex groups at zero."""
    kx = pi1(F.dom)
    ky = pi1(F.cod)
    return BaseMorphism(kx, ky, {a: F.f1.mapping[a] for a in kx.elements})


@dataclass(frozen=True)
class SplitEpiSquare:
    """A pullback square whose parallel sides are split epi functors.

    Only the cospan needs providing: ``right`` (with its section) and the
    ``bottom`` leg; the square is completed by pullback and the pulled-back
    side inherits a section.
    """

    bottom: GFunctor  # X -> Y
    right: GFunctor  # Z -> Y, split epi
    right_section: GFunctor  # Y -> Z


def pi0_pullback_comparison(square: SplitEpiSquare) -> BaseMorphism:
    """The comparison pi0(W) -> pi0(X) x_pi0(Y) pi0(Z) for the completed
    square; callers test it for regular-epi-ness."""
    bottom, right, section = square.bottom, square.right, square.right_section
    if bottom.cod != right.cod:
        raise NotASplitEpiSquare("cospan legs have different codomains")
    if section.dom != right.cod or section.cod != right.dom:
        raise NotASplitEpiSquare("section has the wrong endpoints")
    if compose_functors(right, section) != identity_functor(right.cod):
        raise NotASplitEpiSquare("section is not a section of the right leg")
    P = gpd_pullback(bottom, right)
    # the pulled-back side W -> X splits via <1, section . bottom>
    left_section = pair_into_pullback(
        P, identity_functor(bottom.dom), compose_functors(section, bottom)
    )
    if compose_functors(P.p1, left_section) != identity_functor(bottom.dom):
        raise NotASplitEpiSquare("induced left section failed to split")
    qw = pi0(P.apex)
    cone = pullback(pi0_functor(bottom), pi0_functor(right))
    qx = pi0(bottom.dom).q
    qz = pi0(right.dom).q
    mapping = {r: (qx.mapping[r[0]], qz.mapping[r[1]]) for r in qw.components.elements}
    return BaseMorphism(qw.components, cone.apex, mapping)
