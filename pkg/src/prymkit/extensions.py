"""Normalized 2-cocycles, twisted products G0 x_(tau,c) Gamma and sections.

Groups are handled through a small interface: ``identity``, ``mul``, ``inv``
and, for finite carriers, ``elements()``.  Elements must be hashable and
compare with ``==``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .abelian import FinAbGroup, GuardExceeded
from .cyclotomic import CycMatrix


class NotCentral(ValueError):
    """t(g) t(h) t(gh)^-1 is not central in G0."""


class InvalidSection(ValueError):
    pass


class FiniteGroup:
    identity: object

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def elements(self) -> list:
        raise NotImplementedError

    def power(self, a, k: int):
        out = self.identity
        for _ in range(k):
            out = self.mul(out, a)
        return out


class AbelianGroup(FiniteGroup):
    """A FinAbGroup (or quotient) seen multiplicatively."""

    def __init__(self, group):
        self.group = group
        self.identity = group.zero

    def mul(self, a, b):
        return self.group.add(a, b)

    def inv(self, a):
        return self.group.neg(a)

    def elements(self):
        return list(self.group.elements())


class GeneratedGroup(FiniteGroup):
    """Group generated by given elements under a supplied product."""

    def __init__(self, generators, mul, inv, identity, guard: int = 1000):
        self.generators = list(generators)
        self._mul, self._inv = mul, inv
        self.identity = identity
        self.guard = guard
        self._elements = None

    def mul(self, a, b):
        return self._mul(a, b)

    def inv(self, a):
        return self._inv(a)

    def elements(self):
        if self._elements is None:
            seen = {self.identity}
            order = [self.identity]
            frontier = [self.identity]
            while frontier:
                nxt = []
                for x in frontier:
                    for g in self.generators:
                        y = self._mul(x, g)
                        if y not in seen:
                            seen.add(y)
                            order.append(y)
                            nxt.append(y)
                            if len(order) > self.guard:
                                raise GuardExceeded(f"generated group exceeds {self.guard} elements")
                frontier = nxt
            self._elements = order
        return self._elements


def matrix_group(generators, guard: int = 1000) -> GeneratedGroup:
    gens = list(generators)
    n = gens[0].n_rows
    return GeneratedGroup(gens, lambda a, b: a @ b, lambda a: a.inverse(), CycMatrix.identity(n), guard)


class MatrixGroupIface(FiniteGroup):
    """The ambient GL(n) as an (infinite) group; only products and inverses."""

    def __init__(self, n: int):
        self.identity = CycMatrix.identity(n)

    def mul(self, a, b):
        return a @ b

    def inv(self, a):
        return a.inverse()


@dataclass(eq=False)
class CheckResult:
    ok: bool
    witness: object = None
    message: str = ""

    def __bool__(self):
        return self.ok


@dataclass(eq=False)
class Cocycle2:
    """Normalized 2-cocycle Gamma x Gamma -> Z with action a: Gamma -> Aut(Z).

    ``Z`` is any group interface whose ``mul``/``inv`` are used for the values;
    ``action(gamma, z)`` applies a_gamma.  ``table`` maps pairs of Gamma
    elements to Z elements.
    """

    gamma: FiniteGroup
    Z: FiniteGroup
    action: Callable
    table: dict

    def __call__(self, g, h):
        return self.table[(g, h)]

    def nontrivial_pairs(self) -> list:
        one = self.Z.identity
        return sorted((k for k, v in self.table.items() if v != one), key=repr)

    def to_json(self, index=None, value=repr) -> dict:
        elems = self.gamma.elements()
        idx = index or {g: i for i, g in enumerate(elems)}
        return {
            "gamma": [repr(g) for g in elems],
            "table": {f"{idx[g]},{idx[h]}": value(self.table[(g, h)]) for g in elems for h in elems},
        }


def verify_cocycle(c: Cocycle2) -> CheckResult:
    G, Z = c.gamma, c.Z
    one, e = G.identity, Z.identity
    elems = G.elements()
    for g in elems:
        if c.table[(one, g)] != e or c.table[(g, one)] != e:
            return CheckResult(False, (one, g), "normalization fails")
    for g, h, k in itertools.product(elems, repeat=3):
        lhs = Z.mul(c.action(g, c.table[(h, k)]), c.table[(g, G.mul(h, k))])
        rhs = Z.mul(c.table[(G.mul(g, h), k)], c.table[(g, h)])
        if lhs != rhs:
            return CheckResult(False, (g, h, k), "cocycle identity fails")
    return CheckResult(True)


def trivial_cocycle(gamma: FiniteGroup, Z: FiniteGroup, action=None) -> Cocycle2:
    act = action or (lambda g, z: z)
    table = {(g, h): Z.identity for g in gamma.elements() for h in gamma.elements()}
    return Cocycle2(gamma, Z, act, table)


def coboundary_twist(c: Cocycle2, b: dict) -> Cocycle2:
    """c'(g,h) = c(g,h) a_g(b(h)) b(gh)^-1 b(g)."""
    G, Z = c.gamma, c.Z
    table = {}
    for g in G.elements():
        for h in G.elements():
            z = Z.mul(c.table[(g, h)], c.action(g, b[h]))
            z = Z.mul(z, Z.inv(b[G.mul(g, h)]))
            table[(g, h)] = Z.mul(z, b[g])
    return Cocycle2(G, Z, c.action, table)


def cohomologous(c: Cocycle2, c2: Cocycle2, guard: int = 2 ** 20) -> CheckResult:
    """Brute force over normalized b: Gamma -> Z; the witness is the b found."""
    G, Z = c.gamma, c.Z
    gs = G.elements()
    zs = Z.elements()
    if len(zs) ** len(gs) > guard:
        raise GuardExceeded(f"|Z|^|Gamma| = {len(zs)}^{len(gs)} exceeds {guard}")
    rest = [g for g in gs if g != G.identity]
    for vals in itertools.product(zs, repeat=len(rest)):
        b = dict(zip(rest, vals))
        b[G.identity] = Z.identity
        t = coboundary_twist(c, b)
        if all(t.table[k] == c2.table[k] for k in c2.table):
            return CheckResult(True, b)
    return CheckResult(False)


class TwistedGroup(FiniteGroup):
    """G0 x_(tau,c) Gamma with (g,x)(g',y) = (g tau_x(g') c(x,y), xy)."""

    def __init__(self, G0: FiniteGroup, gamma: FiniteGroup, tau: Callable, c: Cocycle2):
        self.G0, self.gamma, self.tau, self.c = G0, gamma, tau, c
        self.identity = (G0.identity, gamma.identity)

    def mul(self, x, y):
        g, a = x
        h, b = y
        G0 = self.G0
        return (G0.mul(G0.mul(g, self.tau(a, h)), self.c.table[(a, b)]), self.gamma.mul(a, b))

    def inv(self, x):
        # solve (g,a)(y,a^-1) = 1, i.e. tau_a(y) = (g c(a,a^-1))^-1; with central
        # values tau_{a^-1} inverts tau_a
        g, a = x
        ai = self.gamma.inv(a)
        G0 = self.G0
        target = G0.inv(G0.mul(g, self.c.table[(a, ai)]))
        return (self.tau(ai, target), ai)

    def elements(self):
        return [(g, a) for a in self.gamma.elements() for g in self.G0.elements()]

    def embed_g0(self, g):
        return (g, self.gamma.identity)

    def size(self) -> int:
        return len(self.G0.elements()) * len(self.gamma.elements())


def twisted_multiply(T: TwistedGroup, x, y):
    return T.mul(x, y)


def check_associativity_bruteforce(T: FiniteGroup, limit: int = 100) -> CheckResult:
    elems = T.elements()
    if len(elems) > limit:
        raise GuardExceeded(f"{len(elems)} elements exceeds brute-force limit {limit}")
    for x, y, z in itertools.product(elems, repeat=3):
        if T.mul(T.mul(x, y), z) != T.mul(x, T.mul(y, z)):
            return CheckResult(False, (x, y, z), "associativity fails")
    return CheckResult(True)


def check_twisted_product(T: TwistedGroup, g0_generators, limit: int = 10 ** 4) -> CheckResult:
    """Exhaustive check that the twisted product is a group.

    With central cocycle values this is equivalent to: every tau_x is an
    endomorphism of G0 (tested on all pairs element x generator), tau is a
    homomorphism from Gamma (tested on all elements), c takes central values
    and c is a normalized cocycle for the action tau.
    """
    if T.size() > limit:
        raise GuardExceeded(f"|G0||Gamma| = {T.size()} exceeds {limit}")
    G0, Gm = T.G0, T.gamma
    g0 = G0.elements()
    gm = Gm.elements()
    for a in gm:
        for g in g0:
            for s in g0_generators:
                if T.tau(a, G0.mul(g, s)) != G0.mul(T.tau(a, g), T.tau(a, s)):
                    return CheckResult(False, (a, g, s), "tau is not a homomorphism of G0")
    for a in gm:
        for b in gm:
            ab = Gm.mul(a, b)
            for s in g0_generators:
                if T.tau(a, T.tau(b, s)) != T.tau(ab, s):
                    return CheckResult(False, (a, b, s), "tau is not a homomorphism from Gamma")
    for v in set(T.c.table.values()):
        for s in g0_generators:
            if G0.mul(v, s) != G0.mul(s, v):
                return CheckResult(False, v, "cocycle value is not central")
    res = verify_cocycle(T.c)
    if not res:
        return res
    for a in gm:
        for g in g0:
            if T.mul(T.identity, (g, a)) != (g, a) or T.mul((g, a), T.identity) != (g, a):
                return CheckResult(False, (g, a), "identity law fails")
    return CheckResult(True)


@dataclass(eq=False)
class SectionData:
    tau: Callable  # tau(gamma, g) = t(gamma) g t(gamma)^-1
    tau_table: dict  # gamma -> images of the G0 generators
    cocycle: Cocycle2
    section: dict


def cocycle_from_section(
    G: FiniteGroup,
    gamma: FiniteGroup,
    section: dict,
    g0_generators,
    in_g0: Callable | None = None,
    component: Callable | None = None,
    z_guard: int = 1000,
) -> SectionData:
    """Write t(x) t(y) = c(x,y) t(xy) and tau_x = Int_{t(x)} on G0."""
    one = gamma.identity
    gens = list(g0_generators)
    if section[one] != G.identity:
        raise InvalidSection("the section must send the identity to the identity")
    if component is not None:
        for a, t in section.items():
            if component(t) != a:
                raise InvalidSection(f"t({a!r}) does not lie in the component {a!r}")
    elems = gamma.elements()
    table = {}
    for a in elems:
        for b in elems:
            v = G.mul(G.mul(section[a], section[b]), G.inv(section[gamma.mul(a, b)]))
            if in_g0 is not None and not in_g0(v):
                raise NotCentral(f"c({a!r},{b!r}) is not in G0")
            for s in gens:
                if G.mul(v, s) != G.mul(s, v):
                    raise NotCentral(f"c({a!r},{b!r}) does not commute with the G0 generators")
            table[(a, b)] = v
    inverses = {a: G.inv(section[a]) for a in elems}

    def tau(a, g):
        return G.mul(G.mul(section[a], g), inverses[a])

    values = sorted(set(table.values()), key=repr) or [G.identity]
    Z = GeneratedGroup(values + [G.identity], G.mul, G.inv, G.identity, guard=z_guard)
    # close Z under the action so that a_gamma is an automorphism of Z
    extra = [tau(a, z) for a in elems for z in list(Z.elements())]
    Z = GeneratedGroup(values + extra + [G.identity], G.mul, G.inv, G.identity, guard=z_guard)
    c = Cocycle2(gamma, Z, tau, table)
    tau_table = {a: [tau(a, s) for s in gens] for a in elems}
    return SectionData(tau, tau_table, c, dict(section))


def cyclic_gamma(r: int) -> AbelianGroup:
    return AbelianGroup(FinAbGroup((r,)) if r > 1 else FinAbGroup(()))


def sign_group() -> GeneratedGroup:
    """Z = {+1, -1} as integers."""
    return GeneratedGroup([-1], lambda a, b: a * b, lambda a: a, 1)


def tautological_section(T: TwistedGroup) -> dict:
    return {a: (T.G0.identity, a) for a in T.gamma.elements()}


def section_roundtrip(T: TwistedGroup, g0_generators) -> CheckResult:
    """Section gamma -> (1, gamma) of T gives back exactly (tau, c)."""
    gens = [T.embed_g0(g) for g in g0_generators]
    data = cocycle_from_section(T, T.gamma, tautological_section(T), gens)
    e = T.gamma.identity
    for k, v in T.c.table.items():
        if data.cocycle.table[k] != (v, e):
            return CheckResult(False, k, "cocycle value differs")
    for a in T.gamma.elements():
        for g in g0_generators:
            if data.tau(a, T.embed_g0(g)) != (T.tau(a, g), e):
                return CheckResult(False, (a, g), "tau differs")
    return CheckResult(True)


def realization_check(T: TwistedGroup, section: dict, mul: Callable, elements=None) -> CheckResult:
    """(g, gamma) -> g t(gamma) is multiplicative and injective on the given elements."""
    elems = list(T.elements() if elements is None else elements)
    image = {x: mul(x[0], section[x[1]]) for x in elems}
    if len(set(image.values())) != len(image):
        return CheckResult(False, None, "realization is not injective")
    for x in elems:
        for y in elems:
            z = T.mul(x, y)
            lhs = image[z] if z in image else mul(z[0], section[z[1]])
            if lhs != mul(image[x], image[y]):
                return CheckResult(False, (x, y), "realization is not multiplicative")
    return CheckResult(True)
