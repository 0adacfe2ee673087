"""Finite exact base categories behind a single tabular interface.

Two backends: ``finset`` (finite sets) and ``finab`` (finite abelian
groups).  Objects are carried by an ordered tuple of element identifiers;
the abelian backend additionally stores an explicit addition table.  All
limits and colimits are computed by enumeration with deterministic
element orderings (lexicographic pairs, least-index representatives), so
every construction is reproducible bit for bit.

Equality of objects and morphisms is structural: same backend, same
carrier, same tables.  There is no isomorphism-invariant interning.
"""

from __future__ import annotations

import itertools
from contextlib import contextmanager
from dataclasses import dataclass

from .errors import BackendUnsupported, CapExceeded, DomainMismatch

FINSET = "finset"
FINAB = "finab"

DEFAULT_SIZE_CAP = 256

_size_cap = DEFAULT_SIZE_CAP


def current_size_cap() -> int:
    return _size_cap


@contextmanager
def size_cap(n: int):
    """Temporarily raise (or lower) the carrier-size cap."""
    global _size_cap
    old = _size_cap
    _size_cap = n
    try:
        yield
    finally:
        _size_cap = old


def _check_cap(n: int):
    if n > _size_cap:
        raise CapExceeded(f"carrier of size {n} exceeds cap {_size_cap}")


class BaseObject:
    """An object of the base category: ordered carrier plus structure.

    For ``finab`` the structure is an addition table ``add[(a, b)] = a+b``
    over the carrier; the zero element and negation table are derived from
    it when they exist (``zero is None`` marks a table with no identity,
    which ``object_violations`` will report).
    """

    __slots__ = ("backend", "elements", "index", "add", "zero", "neg", "_hash")

    def __init__(self, backend, elements, add=None):
        if backend not in (FINSET, FINAB):
            raise ValueError(f"unknown backend {backend!r}")
        elements = tuple(elements)
        _check_cap(len(elements))
        index = {}
        for pos, x in enumerate(elements):
            if x in index:
                raise ValueError(f"duplicate element {x!r}")
            index[x] = pos
        self.backend = backend
        self.elements = elements
        self.index = index
        self._hash = None
        if backend == FINSET:
            if add is not None:
                raise ValueError("finset objects carry no addition table")
            self.add = None
            self.zero = None
            self.neg = None
            return
        if not elements:
            raise ValueError("finab carrier must contain a zero element")
        if add is None:
            raise ValueError("finab objects need an addition table")
        for a in elements:
            for b in elements:
                v = add.get((a, b))
                if v is None:
                    raise ValueError(f"addition table missing entry ({a!r}, {b!r})")
                if v not in index:
                    raise ValueError(f"addition value {v!r} outside carrier")
        self.add = dict(add)
        self.zero = self._derive_zero()
        self.neg = self._derive_neg() if self.zero is not None else None

    def _derive_zero(self):
        for z in self.elements:
            if all(self.add[(z, x)] == x for x in self.elements):
                return z
        return None

    def _derive_neg(self):
        neg = {}
        for a in self.elements:
            for b in self.elements:
                if self.add[(a, b)] == self.zero:
                    neg[a] = b
                    break
            else:
                return None
        return neg

    @property
    def size(self) -> int:
        return len(self.elements)

    def sum(self, a, b):
        return self.add[(a, b)]

    def sub(self, a, b):
        return self.add[(a, self.neg[b])]

    def scale(self, k, a):
        """k-fold sum of a (k may be any integer)."""
        acc = self.zero
        step = a if k >= 0 else self.neg[a]
        for _ in range(abs(k)):
            acc = self.add[(acc, step)]
        return acc

    def order_of(self, a) -> int:
        n, acc = 1, a
        while acc != self.zero:
            acc = self.add[(acc, a)]
            n += 1
        return n

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, BaseObject):
            return NotImplemented
        return (
            self.backend == other.backend
            and self.elements == other.elements
            and self.add == other.add
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.backend, self.elements))
        return self._hash

    def __repr__(self):
        return f"BaseObject({self.backend}, {len(self.elements)} elements)"


class BaseMorphism:
    """A total map between carriers, stored as an explicit table.

    The constructor checks totality only; the finab homomorphism property
    is a validation concern (``hom_violations``), so that syntactically
    well-formed but semantically broken input can still be loaded and
    reported on.
    """

    __slots__ = ("dom", "cod", "mapping", "_hash")

    def __init__(self, dom: BaseObject, cod: BaseObject, mapping):
        if dom.backend != cod.backend:
            raise DomainMismatch("morphism endpoints in different backends")
        mapping = dict(mapping)
        if set(mapping) != set(dom.elements):
            missing = [x for x in dom.elements if x not in mapping]
            extra = [x for x in mapping if x not in dom.index]
            raise ValueError(f"mapping not total: missing={missing!r} extra={extra!r}")
        for x, y in mapping.items():
            if y not in cod.index:
                raise ValueError(f"image {y!r} of {x!r} outside codomain")
        self.dom = dom
        self.cod = cod
        self.mapping = mapping
        self._hash = None

    def __call__(self, x):
        return self.mapping[x]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, BaseMorphism):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and self.mapping == other.mapping

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dom, self.cod, tuple(self.mapping[x] for x in self.dom.elements)))
        return self._hash

    def __repr__(self):
        return f"BaseMorphism({len(self.dom.elements)} -> {len(self.cod.elements)})"


@dataclass(frozen=True)
class PullbackCone:
    """Chosen pullback of a cospan (f, g): apex and the two projections."""

    apex: BaseObject
    proj1: BaseMorphism
    proj2: BaseMorphism
    legs: tuple  # the cospan (f, g) this cone was built for


@dataclass(frozen=True)
class ForkData:
    """A parallel pair together with its chosen coequalizer."""

    pair: tuple  # (f, g)
    quotient: BaseObject
    q: BaseMorphism


@dataclass(frozen=True)
class ArrowClasses:
    mono: bool
    regular_epi: bool
    iso: bool
    split_epi: bool


# ---------------------------------------------------------------------------
# constructors


def finset_obj(elements) -> BaseObject:
    return BaseObject(FINSET, elements)


def finab_obj(elements, add) -> BaseObject:
    return BaseObject(FINAB, elements, add)


def cyclic(n: int) -> BaseObject:
    """Z/n with carrier 0..n-1 and addition mod n."""
    if n < 1:
        raise ValueError("cyclic group order must be >= 1")
    elems = range(n)
    add = {(a, b): (a + b) % n for a in elems for b in elems}
    return finab_obj(elems, add)


def zero_group() -> BaseObject:
    return cyclic(1)


def direct_sum(factors) -> BaseObject:
    """Direct sum of cyclic groups Z/n1 + ... + Z/nk, elements as tuples."""
    factors = tuple(factors)
    if not factors:
        return zero_group()
    elems = list(itertools.product(*[range(n) for n in factors]))
    _check_cap(len(elems))
    add = {
        (a, b): tuple((x + y) % n for x, y, n in zip(a, b, factors))
        for a in elems
        for b in elems
    }
    return finab_obj(elems, add)


def terminal(backend: str) -> BaseObject:
    return finset_obj(("*",)) if backend == FINSET else zero_group()


def identity(A: BaseObject) -> BaseMorphism:
    return BaseMorphism(A, A, {x: x for x in A.elements})


def constant(A: BaseObject, B: BaseObject, b) -> BaseMorphism:
    return BaseMorphism(A, B, {x: b for x in A.elements})


def zero_morphism(A: BaseObject, B: BaseObject) -> BaseMorphism:
    if A.backend != FINAB:
        raise BackendUnsupported("zero morphism needs the finab backend")
    return constant(A, B, B.zero)


def terminal_map(A: BaseObject) -> BaseMorphism:
    T = terminal(A.backend)
    return constant(A, T, T.elements[0]) if A.elements else BaseMorphism(A, T, {})


def sub_object(A: BaseObject, elements) -> BaseObject:
    """Subobject on a subset of the carrier, in ambient carrier order.

    For finab the subset must be a subgroup (checked).
    """
    chosen = set(elements)
    carrier = [x for x in A.elements if x in chosen]
    if A.backend == FINSET:
        return finset_obj(carrier)
    if A.zero not in chosen:
        raise ValueError("subgroup must contain zero")
    add = {}
    for a in carrier:
        for b in carrier:
            v = A.add[(a, b)]
            if v not in chosen:
                raise ValueError(f"subset not closed under addition: {a!r}+{b!r}={v!r}")
            add[(a, b)] = v
    return finab_obj(carrier, add)


def inclusion(sub: BaseObject, big: BaseObject) -> BaseMorphism:
    return BaseMorphism(sub, big, {x: x for x in sub.elements})


def span_closure(A: BaseObject, seed) -> set:
    """Subgroup of a finab object generated by ``seed`` (plus zero)."""
    span = {A.zero}
    frontier = [A.zero]
    gens = list(seed)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = A.add[(x, g)]
            if y not in span:
                span.add(y)
                frontier.append(y)
    # close under negation (finite abelian: already closed, assert cheaply)
    assert all(A.neg[x] in span for x in span)
    return span


def generated_subgroup(A: BaseObject, seed) -> BaseObject:
    return sub_object(A, span_closure(A, seed))


# ---------------------------------------------------------------------------
# validation helpers


def object_violations(A: BaseObject) -> list:
    """Every broken axiom of the object, as human-readable strings.

    finab associativity is checked by full enumeration, which is cubic in
    the carrier size; intended for explicit validation, not hot paths.
    """
    out = []
    if A.backend == FINSET:
        return out
    if A.zero is None:
        out.append("add: no identity element")
        return out
    if A.neg is None:
        out.append("add: some element has no inverse")
    n = A.elements
    for a in n:
        for b in n:
            if A.add[(a, b)] != A.add[(b, a)]:
                out.append(f"add: {a!r}+{b!r} != {b!r}+{a!r}")
    for a in n:
        for b in n:
            ab = A.add[(a, b)]
            for c in n:
                if A.add[(ab, c)] != A.add[(a, A.add[(b, c)])]:
                    out.append(f"add: ({a!r}+{b!r})+{c!r} != {a!r}+({b!r}+{c!r})")
                    if len(out) > 20:
                        return out
    return out


def hom_violations(f: BaseMorphism) -> list:
    """Full-enumeration homomorphism check (empty for finset)."""
    out = []
    if f.dom.backend == FINSET:
        return out
    A, B = f.dom, f.cod
    if f(A.zero) != B.zero:
        out.append(f"map(0) = {f(A.zero)!r} != 0")
    for a in A.elements:
        for b in A.elements:
            if f(A.add[(a, b)]) != B.add[(f(a), f(b))]:
                out.append(f"map({a!r}+{b!r}) != map({a!r})+map({b!r})")
                if len(out) > 20:
                    return out
    return out


def is_homomorphism(f: BaseMorphism) -> bool:
    return not hom_violations(f)


# ---------------------------------------------------------------------------
# operations


def compose(g: BaseMorphism, f: BaseMorphism) -> BaseMorphism:
    """g after f."""
    if f.cod != g.dom:
        raise DomainMismatch("compose: cod(f) != dom(g)")
    return BaseMorphism(f.dom, g.cod, {x: g.mapping[y] for x, y in f.mapping.items()})


def pullback(f: BaseMorphism, g: BaseMorphism) -> PullbackCone:
    """Pullback of the cospan (f, g); apex carrier is the pair set
    {(a, b) : f(a) = g(b)} in lexicographic (index(a), index(b)) order."""
    if f.cod != g.cod:
        raise DomainMismatch("pullback: cospan legs have different codomains")
    A, B = f.dom, g.dom
    pairs = [(a, b) for a in A.elements for b in B.elements if f(a) == g(b)]
    _check_cap(len(pairs))
    if A.backend == FINSET:
        apex = finset_obj(pairs)
    else:
        pair_set = set(pairs)
        add = {}
        for p in pairs:
            for q in pairs:
                v = (A.add[(p[0], q[0])], B.add[(p[1], q[1])])
                assert v in pair_set  # subgroup of the product; fails only on non-homs
                add[(p, q)] = v
        apex = finab_obj(pairs, add)
    proj1 = BaseMorphism(apex, A, {p: p[0] for p in pairs})
    proj2 = BaseMorphism(apex, B, {p: p[1] for p in pairs})
    return PullbackCone(apex, proj1, proj2, (f, g))


def product(A: BaseObject, B: BaseObject) -> PullbackCone:
    """Binary product, presented as the pullback over the terminal object."""
    if A.backend != B.backend:
        raise DomainMismatch("product: mixed backends")
    return pullback(terminal_map(A), terminal_map(B))


def kernel_pair(q: BaseMorphism) -> PullbackCone:
    return pullback(q, q)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            # keep the least index as representative
            if ri < rj:
                self.parent[rj] = ri
            else:
                self.parent[ri] = rj


def coequalizer(f: BaseMorphism, g: BaseMorphism) -> ForkData:
    """Coequalizer of a parallel pair.

    finset: quotient of the codomain by the equivalence closure of
    f(a) ~ g(a), least-index representatives.  finab: cokernel of f - g,
    cosets enumerated, least-index representatives.
    """
    if f.dom != g.dom or f.cod != g.cod:
        raise DomainMismatch("coequalizer: pair is not parallel")
    B = f.cod
    uf = _UnionFind(len(B.elements))
    if B.backend == FINSET:
        for a in f.dom.elements:
            uf.union(B.index[f(a)], B.index[g(a)])
    else:
        diff_image = {B.sub(f(a), g(a)) for a in f.dom.elements}
        subgroup = span_closure(B, diff_image) if diff_image else {B.zero}
        for b in B.elements:
            for h in subgroup:
                uf.union(B.index[b], B.index[B.add[(b, h)]])
    rep = {x: B.elements[uf.find(B.index[x])] for x in B.elements}
    reps = [x for x in B.elements if rep[x] == x]
    if B.backend == FINSET:
        quotient = finset_obj(reps)
    else:
        add = {(a, b): rep[B.add[(a, b)]] for a in reps for b in reps}
        quotient = finab_obj(reps, add)
    q = BaseMorphism(B, quotient, rep)
    return ForkData((f, g), quotient, q)


def factor_through_quotient(fork: ForkData, h: BaseMorphism) -> BaseMorphism:
    """The unique u with u . q = h, for h coequalizing the fork's pair."""
    f, g = fork.pair
    if h.dom != fork.q.dom:
        raise DomainMismatch("factor_through_quotient: wrong domain")
    u = BaseMorphism(fork.quotient, h.cod, {r: h(r) for r in fork.quotient.elements})
    if compose(u, fork.q) != h:
        raise ValueError("arrow does not coequalize the pair")
    return u


def kernel(f: BaseMorphism) -> BaseMorphism:
    """finab only: the inclusion of {a : f(a) = 0}."""
    if f.dom.backend != FINAB:
        raise BackendUnsupported("kernel needs the finab backend")
    elems = [a for a in f.dom.elements if f(a) == f.cod.zero]
    return inclusion(sub_object(f.dom, elems), f.dom)


# ---------------------------------------------------------------------------
# classification


def _generating_sequence(A: BaseObject) -> list:
    """Greedy generators of a finab object, in carrier order."""
    span = {A.zero}
    gens = []
    for x in A.elements:
        if x not in span:
            gens.append(x)
            span = span_closure(A, gens)
    return gens


def iter_homs(A: BaseObject, B: BaseObject, candidates=None):
    """All homomorphisms A -> B (finab), in a deterministic order.

    ``candidates`` optionally restricts the allowed images of each greedy
    generator (a mapping element -> iterable); used for section searches.
    """
    if A.backend != FINAB or B.backend != FINAB:
        raise BackendUnsupported("iter_homs needs the finab backend")
    gens = _generating_sequence(A)

    def extend(partial, span_elems, g):
        """Relative order of g over the current span, and the span element
        m*g whose image constrains the choice."""
        m = 1
        acc = g
        while acc not in partial:
            acc = A.add[(acc, g)]
            m += 1
        return m, acc

    def rec(i, partial):
        if i == len(gens):
            yield BaseMorphism(A, B, partial)
            return
        g = gens[i]
        m, anchor = extend(partial, None, g)
        pool = B.elements if candidates is None else candidates.get(g, B.elements)
        for img in pool:
            if B.scale(m, img) != partial[anchor]:
                continue
            new = dict(partial)
            ok = True
            acc_g, acc_i = g, img
            for _ in range(m - 1):
                for x, y in partial.items():
                    z = A.add[(x, acc_g)]
                    w = B.add[(y, acc_i)]
                    if new.setdefault(z, w) != w:
                        ok = False
                        break
                if not ok:
                    break
                acc_g = A.add[(acc_g, g)]
                acc_i = B.add[(acc_i, img)]
            if ok:
                yield from rec(i + 1, new)

    yield from rec(0, {A.zero: B.zero})


def find_section(f: BaseMorphism):
    """A homomorphic section of f, or None.  finset sections are chosen
    by least-index preimage."""
    A, B = f.dom, f.cod
    image = set(f.mapping.values())
    if image != set(B.elements):
        return None
    if A.backend == FINSET:
        section = {}
        for b in B.elements:
            section[b] = next(a for a in A.elements if f(a) == b)
        return BaseMorphism(B, A, section)
    fibers = {}
    for b in B.elements:
        fibers[b] = [a for a in A.elements if f(a) == b]
    for s in iter_homs(B, A, candidates=fibers):
        if compose(f, s) == identity(B):
            return s
    return None


def classify(f: BaseMorphism) -> ArrowClasses:
    """Mono/regular-epi/iso/split-epi flags.

    In both backends mono = injective and regular epi = surjective; a
    bijective finab homomorphism is automatically an isomorphism.  The
    finab split-epi flag is decided by a bounded search over homomorphic
    sections.
    """
    values = list(f.mapping.values())
    mono = len(set(values)) == len(values)
    regular_epi = set(values) == set(f.cod.elements)
    iso = mono and regular_epi
    if iso:
        split_epi = True
    elif not regular_epi:
        split_epi = False
    elif f.dom.backend == FINSET:
        split_epi = True
    else:
        split_epi = find_section(f) is not None
    return ArrowClasses(mono, regular_epi, iso, split_epi)


def inverse(f: BaseMorphism) -> BaseMorphism:
    if not classify(f).iso:
        raise ValueError("inverse of a non-isomorphism")
    return BaseMorphism(f.cod, f.dom, {y: x for x, y in f.mapping.items()})


def all_maps(A: BaseObject, B: BaseObject, limit=200000):
    """Every finset map A -> B (exhaustive; tiny carriers only)."""
    if A.backend != FINSET:
        raise BackendUnsupported("all_maps enumerates finset maps")
    if len(B.elements) ** len(A.elements) > limit:
        raise CapExceeded("map enumeration too large")
    for images in itertools.product(B.elements, repeat=len(A.elements)):
        yield BaseMorphism(A, B, dict(zip(A.elements, images)))


def all_morphisms(A: BaseObject, B: BaseObject, limit=200000):
    """Every base morphism A -> B: all maps (finset) or all homs (finab)."""
    if A.backend == FINSET:
        yield from all_maps(A, B, limit)
    else:
        yield from iter_homs(A, B)
