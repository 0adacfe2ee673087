"""Base category operations: composition, limits, colimits, classification."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gpdkit import base
from gpdkit.base import (
    BaseMorphism,
    classify,
    coequalizer,
    compose,
    cyclic,
    direct_sum,
    finset_obj,
    identity,
    kernel,
    kernel_pair,
    product,
    pullback,
)
from gpdkit.errors import BackendUnsupported, CapExceeded, DomainMismatch


def mor(dom, cod, pairs):
    return BaseMorphism(dom, cod, dict(pairs))


Z2 = cyclic(2)
Z4 = cyclic(4)
REDUCE42 = mor(Z4, Z2, {0: 0, 1: 1, 2: 0, 3: 1})
EMBED24 = mor(Z2, Z4, {0: 0, 1: 2})


class TestCompose:
    def test_identity_then_constant(self):
        two = finset_obj([0, 1])
        one = finset_obj([0])
        f = identity(two)
        g = mor(two, one, {0: 0, 1: 0})
        assert compose(g, f) == g

    def test_embed_then_reduce_is_zero(self):
        gf = compose(REDUCE42, EMBED24)
        assert gf.mapping == {0: 0, 1: 0}

    def test_finset_table_lookup(self):
        a = finset_obj([0])
        b = finset_obj([0, 1])
        c = finset_obj([0, 1, 2])
        f = mor(a, b, {0: 1})
        g = mor(b, c, {0: 2, 1: 0})
        assert compose(g, f).mapping == {0: 0}

    def test_domain_mismatch(self):
        with pytest.raises(DomainMismatch):
            compose(mor(finset_obj([0]), finset_obj([0]), {0: 0}), identity(finset_obj([0, 1])))


class TestPullback:
    def test_kernel_pair_of_identity_is_diagonal(self):
        two = finset_obj([0, 1])
        cone = pullback(identity(two), identity(two))
        assert cone.apex.elements == ((0, 0), (1, 1))

    def test_all_pairs_over_a_point(self):
        two = finset_obj([0, 1])
        one = finset_obj([0])
        f = mor(two, one, {0: 0, 1: 0})
        cone = pullback(f, f)
        assert len(cone.apex.elements) == 4

    def test_parity_pairs_in_z4(self):
        cone = pullback(REDUCE42, REDUCE42)
        expected = [(a, b) for a in range(4) for b in range(4) if a % 2 == b % 2]
        assert list(cone.apex.elements) == expected
        assert len(cone.apex.elements) == 8
        # subgroup structure: componentwise sums stay inside
        assert cone.apex.add[((1, 3), (1, 1))] == (2, 0)

    def test_projections_commute(self):
        cone = pullback(REDUCE42, identity(Z2))
        assert compose(REDUCE42, cone.proj1) == compose(identity(Z2), cone.proj2)

    def test_cap(self):
        big = finset_obj(range(30))
        one = finset_obj([0])
        f = mor(big, one, {x: 0 for x in range(30)})
        with base.size_cap(100):
            with pytest.raises(CapExceeded):
                pullback(f, f)


class TestCoequalizer:
    def test_equal_pair_gives_bijection(self):
        fork = coequalizer(REDUCE42, REDUCE42)
        assert fork.quotient.elements == Z2.elements
        assert classify(fork.q).iso

    def test_finset_closure(self):
        a = finset_obj([0])
        b = finset_obj([0, 1, 2])
        fork = coequalizer(mor(a, b, {0: 0}), mor(a, b, {0: 1}))
        assert fork.quotient.elements == (0, 2)
        assert fork.q.mapping == {0: 0, 1: 0, 2: 2}

    def test_finab_cokernel(self):
        zero = mor(Z2, Z4, {0: 0, 1: 0})
        fork = coequalizer(zero, EMBED24)
        assert fork.quotient.elements == (0, 1)
        assert fork.q.mapping == {0: 0, 1: 1, 2: 0, 3: 1}
        assert fork.quotient.add[(1, 1)] == 0

    def test_universal_property_tiny(self):
        # every coequalizing arrow factors uniquely through q
        a = finset_obj([0, 1])
        b = finset_obj([0, 1, 2])
        f = mor(a, b, {0: 0, 1: 1})
        g = mor(a, b, {0: 1, 1: 1})
        fork = coequalizer(f, g)
        t = finset_obj(["x", "y"])
        for h in base.all_maps(b, t):
            if compose(h, f) == compose(h, g):
                u = base.factor_through_quotient(fork, h)
                matches = [
                    v
                    for v in base.all_maps(fork.quotient, t)
                    if compose(v, fork.q) == h
                ]
                assert matches == [u]


class TestKernelPairAndKernel:
    def test_kernel_pair_of_mono(self):
        cone = kernel_pair(EMBED24)
        assert cone.apex.elements == ((0, 0), (1, 1))
        assert cone.proj1 == cone.proj2

    def test_kernel_pair_finset(self):
        a = finset_obj([0, 1, 2])
        b = finset_obj([0, 1])
        q = mor(a, b, {0: 0, 1: 0, 2: 1})
        cone = kernel_pair(q)
        assert set(cone.apex.elements) == {(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)}

    def test_kernel_of_reduction(self):
        k = kernel(REDUCE42)
        assert k.dom.elements == (0, 2)

    def test_kernel_of_identity_and_zero(self):
        assert kernel(identity(Z2)).dom.elements == (0,)
        assert kernel(base.zero_morphism(Z2, Z2)).dom.elements == (0, 1)

    def test_kernel_finset_rejected(self):
        with pytest.raises(BackendUnsupported):
            kernel(identity(finset_obj([0])))


class TestClassify:
    def test_identity(self):
        flags = classify(identity(Z4))
        assert flags.mono and flags.regular_epi and flags.iso and flags.split_epi

    def test_embedding(self):
        flags = classify(EMBED24)
        assert flags.mono and not flags.regular_epi and not flags.iso

    def test_reduction_has_no_hom_section(self):
        # the two homomorphisms Z/2 -> Z/4 are 0 and 1 |-> 2; neither is a section
        flags = classify(REDUCE42)
        assert flags.regular_epi and not flags.split_epi
        assert len(list(base.iter_homs(Z2, Z4))) == 2

    def test_split_projection(self):
        z2z2 = direct_sum([2, 2])
        p1 = mor(z2z2, Z2, {x: x[0] for x in z2z2.elements})
        assert classify(p1).split_epi

    def test_finset_surjection_splits(self):
        a = finset_obj([0, 1, 2])
        b = finset_obj([0, 1])
        f = mor(a, b, {0: 0, 1: 0, 2: 1})
        flags = classify(f)
        assert flags.split_epi and flags.regular_epi and not flags.mono
        s = base.find_section(f)
        assert compose(f, s) == identity(b)


class TestProduct:
    def test_unit_law(self):
        one = finset_obj([0])
        b = finset_obj(["x", "y", "z"])
        cone = product(one, b)
        assert [p[1] for p in cone.apex.elements] == list(b.elements)

    def test_lexicographic(self):
        cone = product(finset_obj([0, 1]), finset_obj([0, 1, 2]))
        assert cone.apex.elements == ((0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2))

    def test_klein(self):
        cone = product(Z2, Z2)
        assert cone.apex.add[((1, 0), (0, 1))] == (1, 1)
        assert cone.apex.add[((1, 1), (1, 1))] == (0, 0)


class TestObjects:
    def test_duplicate_elements_rejected(self):
        with pytest.raises(ValueError):
            finset_obj([0, 0])

    def test_direct_sum_axioms(self):
        g = direct_sum([2, 3])
        assert base.object_violations(g) == []
        assert g.zero == (0, 0)

    def test_broken_table_reported(self):
        add = {(a, b): 0 for a in range(2) for b in range(2)}
        broken = base.finab_obj([0, 1], add)
        assert any("identity" in v for v in base.object_violations(broken))

    def test_hom_violations(self):
        not_hom = mor(Z4, Z2, {0: 0, 1: 1, 2: 1, 3: 0})
        assert base.hom_violations(not_hom)
        assert base.hom_violations(REDUCE42) == []


@st.composite
def small_finset_morphism(draw):
    n = draw(st.integers(1, 5))
    m = draw(st.integers(1, 5))
    dom = finset_obj(range(n))
    cod = finset_obj(range(m))
    images = draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
    return mor(dom, cod, dict(zip(dom.elements, images)))


@st.composite
def permutation_of(draw, obj):
    perm = draw(st.permutations(list(obj.elements)))
    return mor(obj, obj, dict(zip(obj.elements, perm)))


class TestClassifyStability:
    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_stable_under_iso_composition(self, data):
        f = data.draw(small_finset_morphism())
        pre = data.draw(permutation_of(f.dom))
        post = data.draw(permutation_of(f.cod))
        g = compose(post, compose(f, pre))
        assert classify(f) == classify(g)


class TestPullbackUniversalProperty:
    def test_unique_factorization_tiny(self):
        # enumerate all competing cones over all tiny test objects
        b = finset_obj([0, 1, 2])
        c = finset_obj([0, 1])
        f = mor(b, c, {0: 0, 1: 0, 2: 1})
        g = mor(b, c, {0: 1, 1: 0, 2: 1})
        cone = pullback(f, g)
        for tn in (1, 2):
            t = finset_obj(range(tn))
            for h1, h2 in itertools.product(base.all_maps(t, b), repeat=2):
                if compose(f, h1) != compose(g, h2):
                    continue
                mediating = [
                    u
                    for u in base.all_maps(t, cone.apex)
                    if compose(cone.proj1, u) == h1 and compose(cone.proj2, u) == h2
                ]
                assert len(mediating) == 1

    def test_exactness_kernel_pair_coequalizer(self):
        # coequalizing the kernel pair of a regular epi recovers its image
        a = finset_obj([0, 1, 2, 3])
        b = finset_obj([0, 1])
        q = mor(a, b, {0: 0, 1: 0, 2: 1, 3: 1})
        cone = kernel_pair(q)
        fork = coequalizer(cone.proj1, cone.proj2)
        u = base.factor_through_quotient(fork, q)
        assert classify(u).iso

    def test_exactness_finab(self):
        cone = kernel_pair(REDUCE42)
        fork = coequalizer(cone.proj1, cone.proj2)
        u = base.factor_through_quotient(fork, REDUCE42)
        assert classify(u).iso
