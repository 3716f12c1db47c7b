"""Finite abelian groups, their duals, alternating pairings and isotropic subgroups.

A group is stored by its invariant factors ``d1 | d2 | ... | dk`` and its
elements are plain tuples of exponents.  Characters of a group live in a
group with the same invariant factors; the character ``chi`` takes the value
``zeta_N ** sum(chi_i * x_i * N // d_i)`` at ``x`` where ``N`` is the exponent.

>>> G = make_group([2, 3])
>>> G.invariant_factors
(6,)
>>> len(enumerate_antisymmetric_pairings(make_group([2, 2])))
2
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, lcm, prod

DEFAULT_GUARD = 256

GroupElem = tuple  # exponent vector, component i reduced mod d_i
Character = tuple  # exponent vector of the same shape, read in the dual group


class GuardExceeded(ValueError):
    """A brute-force enumeration would exceed its size guard."""


class NotIsotropic(ValueError):
    pass


class NotMaximal(ValueError):
    pass


class NotAntisymmetric(ValueError):
    pass


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _invariant_factors_from_prime_powers(parts: dict[int, list[int]]) -> tuple[int, ...]:
    # parts[p] lists the exponents of the cyclic p-parts
    k = max((len(v) for v in parts.values()), default=0)
    factors = [1] * k
    for p, exps in parts.items():
        exps = sorted(exps, reverse=True)
        for i, e in enumerate(exps):
            factors[k - 1 - i] *= p ** e
    return tuple(d for d in factors if d > 1)


class _GroupOps:
    """Arithmetic shared by concrete groups and quotients."""

    def elements(self) -> list:
        raise NotImplementedError

    @property
    def order(self) -> int:
        return len(self.elements())

    def element_order(self, x) -> int:
        k, y = 1, x
        z = self.zero
        while y != z:
            y = self.add(y, x)
            k += 1
        return k

    def scale(self, x, k: int):
        # k-th multiple, k may be negative
        if k < 0:
            x, k = self.neg(x), -k
        out = self.zero
        base = x
        while k:
            if k & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            k >>= 1
        return out


@dataclass(frozen=True)
class FinAbGroup(_GroupOps):
    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        d = tuple(int(x) for x in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", d)
        for a, b in zip(d, d[1:]):
            if b % a:
                raise ValueError(f"invariant factors must divide each other: {d}")
        if any(x < 2 for x in d):
            raise ValueError(f"invariant factors must be >= 2: {d}")

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def zero(self) -> tuple:
        return (0,) * self.rank

    def generators(self) -> list[tuple]:
        return [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]

    def elements(self) -> list[tuple]:
        return _elements(self.invariant_factors)

    def reduce(self, x) -> tuple:
        if len(x) != self.rank:
            raise ValueError(f"element {x} does not match group of rank {self.rank}")
        return tuple(int(a) % d for a, d in zip(x, self.invariant_factors))

    def add(self, x, y) -> tuple:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.invariant_factors))

    def sub(self, x, y) -> tuple:
        return tuple((a - b) % d for a, b, d in zip(x, y, self.invariant_factors))

    def neg(self, x) -> tuple:
        return tuple((-a) % d for a, d in zip(x, self.invariant_factors))

    def scale(self, x, k: int) -> tuple:
        return tuple((a * k) % d for a, d in zip(x, self.invariant_factors))

    def element_order(self, x) -> int:
        return lcm(*(d // gcd(a, d) for a, d in zip(x, self.invariant_factors))) if x else 1

    def contains(self, x) -> bool:
        return len(x) == self.rank and all(0 <= a < d for a, d in zip(x, self.invariant_factors))

    def dual(self) -> "FinAbGroup":
        return self

    def char_eval(self, chi, x) -> int:
        """Exponent k with chi(x) = zeta_N^k, N the group exponent."""
        if len(chi) != self.rank or len(x) != self.rank:
            raise ValueError("shape mismatch between character, element and group")
        N = self.exponent
        return sum(c * a * (N // d) for c, a, d in zip(chi, x, self.invariant_factors)) % N

    def to_json(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, data: dict) -> "FinAbGroup":
        return cls(tuple(data["invariant_factors"]))

    def __repr__(self):
        if not self.invariant_factors:
            return "FinAbGroup(trivial)"
        return "FinAbGroup(" + " x ".join(f"Z/{d}" for d in self.invariant_factors) + ")"


_ELEMENT_CACHE: dict[tuple, list] = {}


def _elements(factors: tuple) -> list[tuple]:
    out = _ELEMENT_CACHE.get(factors)
    if out is None:
        out = list(itertools.product(*(range(d) for d in factors)))
        _ELEMENT_CACHE[factors] = out
    return out


def make_group(orders) -> FinAbGroup:
    """Canonical invariant-factor form of Z/o1 x Z/o2 x ..."""
    parts: dict[int, list[int]] = {}
    for o in orders:
        if o < 1:
            raise ValueError(f"cyclic orders must be positive, got {o}")
        for p, e in _factorize(int(o)).items():
            parts.setdefault(p, []).append(e)
    return FinAbGroup(_invariant_factors_from_prime_powers(parts))


def invariant_factors_by_census(group: _GroupOps) -> tuple[int, ...]:
    """Invariant factors of any finite abelian group from element orders."""
    elems = group.elements()
    n = len(elems)
    parts: dict[int, list[int]] = {}
    orders = [group.element_order(x) for x in elems]
    for p in _factorize(n):
        counts = []
        j = 0
        while True:
            c = sum(1 for o in orders if (p ** j) % o == 0)
            if counts and c == counts[-1]:
                break
            counts.append(c)
            j += 1
        # number of cyclic p-parts of exponent >= j
        ge = []
        for j in range(1, len(counts)):
            ratio = counts[j] // counts[j - 1]
            e = 0
            while ratio > 1:
                ratio //= p
                e += 1
            ge.append(e)
        exps = []
        for j, cnt in enumerate(ge, start=1):
            nxt = ge[j] if j < len(ge) else 0
            exps += [j] * (cnt - nxt)
        parts[p] = exps
    return _invariant_factors_from_prime_powers(parts)


@dataclass(frozen=True, eq=False)
class Subgroup:
    group: object
    generators: tuple
    elements: frozenset = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def sorted_elements(self) -> list:
        return sorted(self.elements)

    def to_json(self) -> dict:
        return {"generators": [list(g) for g in self.generators]}


def generated_subgroup(group, gens) -> Subgroup:
    gens = tuple(tuple(g) for g in gens)
    elems = {group.zero}
    frontier = [group.zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group.add(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(group, _minimal_generators(group, gens, elems), frozenset(elems))


def _minimal_generators(group, gens, elems) -> tuple:
    # drop redundant generators greedily, keeping a deterministic choice
    kept: list = []
    span = {group.zero}
    for g in sorted(gens):
        if g not in span:
            kept.append(g)
            span = set(generated_subgroup_elements(group, kept))
        if len(span) == len(elems):
            break
    return tuple(kept)


def generated_subgroup_elements(group, gens) -> set:
    elems = {group.zero}
    frontier = [group.zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = group.add(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return elems


def subgroup_from_elements(group, elems) -> Subgroup:
    elems = frozenset(elems)
    if group.zero not in elems or any(group.add(a, b) not in elems for a in elems for b in elems):
        raise ValueError("element set is not a subgroup")
    return Subgroup(group, _minimal_generators(group, tuple(elems), elems), elems)


def whole_group(group) -> Subgroup:
    return generated_subgroup(group, group.generators())


def trivial_subgroup(group) -> Subgroup:
    return Subgroup(group, (), frozenset({group.zero}))


@dataclass(frozen=True, eq=False)
class QuotientGroup(_GroupOps):
    """G/H with lexicographically minimal coset representatives as elements."""

    parent: object
    sub: Subgroup

    @cached_property
    def _rep_of(self) -> dict:
        rep = {}
        for x in self.parent.elements():
            if x in rep:
                continue
            coset = [self.parent.add(x, h) for h in self.sub.elements]
            r = min(coset)
            for y in coset:
                rep[y] = r
        return rep

    @cached_property
    def _reps(self) -> list:
        return sorted(set(self._rep_of.values()))

    def rep_of(self, x):
        return self._rep_of[tuple(x)]

    def elements(self) -> list:
        return self._reps

    @property
    def order(self) -> int:
        return len(self._reps)

    @property
    def zero(self):
        return self.parent.zero

    @cached_property
    def _sums(self) -> dict:
        return {}

    def add(self, x, y):
        key = (x, y)
        v = self._sums.get(key)
        if v is None:
            v = self._sums[key] = self._rep_of[self.parent.add(x, y)]
        return v

    def sub_(self, x, y):
        return self._rep_of[self.parent.sub(x, y)]

    def neg(self, x):
        return self._rep_of[self.parent.neg(x)]

    def coset(self, x) -> frozenset:
        return frozenset(self.parent.add(x, h) for h in self.sub.elements)

    @cached_property
    def invariant_factors(self) -> tuple[int, ...]:
        return invariant_factors_by_census(self)

    @cached_property
    def exponent(self) -> int:
        return lcm(*(self.element_order(x) for x in self._reps)) if self._reps else 1

    def abstract(self) -> FinAbGroup:
        return FinAbGroup(self.invariant_factors)


def quotient_group(group, sub: Subgroup) -> QuotientGroup:
    if group.zero not in sub.elements or any(
        group.add(a, b) not in sub.elements for a in sub.generators for b in sub.elements
    ):
        raise ValueError("not a subgroup")
    return QuotientGroup(group, sub)


# --- pairings -------------------------------------------------------------


@dataclass(frozen=True)
class Pairing:
    """Bicharacter <a,b> = zeta_N^{sum A_ij a_i b_j N / gcd(d_i, d_j)}.

    The matrix is kept canonical: zero diagonal, upper entries reduced mod
    gcd(d_i, d_j), lower entries their negatives.
    """

    group: FinAbGroup
    matrix: tuple

    def __post_init__(self):
        d = self.group.invariant_factors
        k = len(d)
        A = [list(row) for row in self.matrix]
        if len(A) != k or any(len(r) != k for r in A):
            raise ValueError("pairing matrix shape does not match the group")
        for i in range(k):
            if A[i][i] % d[i]:
                raise NotAntisymmetric(f"<e{i},e{i}> is not trivial")
            for j in range(i + 1, k):
                g = gcd(d[i], d[j])
                if (A[i][j] + A[j][i]) % g:
                    raise NotAntisymmetric(f"<e{i},e{j}><e{j},e{i}> is not trivial")
        canon = [[0] * k for _ in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                g = gcd(d[i], d[j])
                canon[i][j] = A[i][j] % g
                canon[j][i] = (-A[i][j]) % g
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in canon))

    def __call__(self, a, b) -> int:
        return eval_pairing(self, a, b)

    def image(self, a) -> tuple:
        """l(a) as a character of the group."""
        d = self.group.invariant_factors
        return tuple(
            sum(a[i] * self.matrix[i][j] * (d[j] // gcd(d[i], d[j])) for i in range(len(d))) % d[j]
            for j in range(len(d))
        )

    def is_trivial(self) -> bool:
        return all(v == 0 for row in self.matrix for v in row)

    def upper(self) -> tuple:
        k = len(self.matrix)
        return tuple(self.matrix[i][j] for i in range(k) for j in range(i + 1, k))

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix]}

    @classmethod
    def from_json(cls, group: FinAbGroup, data: dict) -> "Pairing":
        return cls(group, tuple(tuple(r) for r in data["matrix"]))


def trivial_pairing(group: FinAbGroup) -> Pairing:
    k = group.rank
    return Pairing(group, tuple((0,) * k for _ in range(k)))


def pairing_from_values(group: FinAbGroup, values) -> Pairing:
    """Pairing from exponents values[i][j] = <e_i, e_j> as powers of zeta_N."""
    d = group.invariant_factors
    N = group.exponent
    k = len(d)
    A = []
    for i in range(k):
        row = []
        for j in range(k):
            g = gcd(d[i], d[j])
            v = values[i][j] % N
            if (v * g) % N:
                raise ValueError(f"<e{i},e{j}> has order not dividing gcd(d_i,d_j)")
            row.append(v * g // N)
        A.append(row)
    return Pairing(group, tuple(tuple(r) for r in A))


def eval_pairing(l: Pairing, a, b) -> int:
    d = l.group.invariant_factors
    if len(a) != len(d) or len(b) != len(d):
        raise ValueError("shape mismatch between element and group")
    N = l.group.exponent
    total = 0
    A = l.matrix
    for i in range(len(d)):
        if a[i]:
            for j in range(len(d)):
                if A[i][j] and b[j]:
                    total += A[i][j] * a[i] * b[j] * (N // gcd(d[i], d[j]))
    return total % N


def enumerate_antisymmetric_pairings(group: FinAbGroup, guard: int = DEFAULT_GUARD) -> list[Pairing]:
    if group.order > guard:
        raise GuardExceeded(f"|Lambda| = {group.order} exceeds guard {guard}")
    d = group.invariant_factors
    k = len(d)
    slots = [(i, j) for i in range(k) for j in range(i + 1, k)]
    out = []
    for vals in itertools.product(*(range(gcd(d[i], d[j])) for i, j in slots)):
        A = [[0] * k for _ in range(k)]
        for (i, j), v in zip(slots, vals):
            A[i][j] = v
            A[j][i] = -v
        out.append(Pairing(group, tuple(tuple(r) for r in A)))
    return out


def kernel_of_pairing(l: Pairing) -> Subgroup:
    G = l.group
    gens = G.generators()
    ker = [x for x in G.elements() if all(eval_pairing(l, x, g) == 0 for g in gens)]
    return subgroup_from_elements(G, ker)


def pairing_image(l: Pairing, sub: Subgroup | None = None) -> Subgroup:
    G = l.group
    src = G.elements() if sub is None else sub.elements
    return subgroup_from_elements(G.dual(), {l.image(x) for x in src})


def orthogonal(l: Pairing, sub: Subgroup) -> set:
    G = l.group
    return {x for x in G.elements() if all(eval_pairing(l, g, x) == 0 for g in sub.generators)}


def is_isotropic(l: Pairing, sub: Subgroup) -> bool:
    return all(eval_pairing(l, a, b) == 0 for a in sub.generators for b in sub.generators)


def maximal_isotropic_subgroups(group: FinAbGroup, l: Pairing, guard: int = DEFAULT_GUARD) -> list[Subgroup]:
    """All maximal isotropic subgroups, sorted by their sorted element lists."""
    if group.order > guard:
        raise GuardExceeded(f"|Lambda| = {group.order} exceeds guard {guard}")
    start = kernel_of_pairing(l)
    seen = {start.elements}
    frontier = [start]
    found = []
    while frontier:
        nxt = []
        for H in frontier:
            perp = orthogonal(l, H)
            if len(perp) == H.order:
                found.append(H)
                continue
            for x in sorted(perp - H.elements):
                K = generated_subgroup(group, H.generators + (x,))
                if K.elements not in seen:
                    seen.add(K.elements)
                    nxt.append(K)
        frontier = nxt
    found.sort(key=lambda S: sorted(S.elements))
    return found


def annihilator(group: FinAbGroup, sub: Subgroup) -> Subgroup:
    dual = group.dual()
    ann = [c for c in dual.elements() if all(group.char_eval(c, g) == 0 for g in sub.generators)]
    return subgroup_from_elements(dual, ann)


def dual_of_subgroup(group: FinAbGroup, sub: Subgroup) -> QuotientGroup:
    """Delta* realised as Lambda*/Ann(Delta); restriction of characters is rep_of."""
    return QuotientGroup(group.dual(), annihilator(group, sub))


@dataclass(frozen=True, eq=False)
class IsotropyData:
    group: FinAbGroup
    pairing: Pairing
    delta: Subgroup
    quotient: QuotientGroup  # Lambda/Delta
    delta_dual: QuotientGroup  # Delta* as Lambda*/Ann(Delta)
    f: dict  # coset representative of Lambda/Delta -> element of Delta*
    ker_l: Subgroup
    image_l: Subgroup
    delta_dual_is_quotient_by_image: bool  # Ann(Delta) == l(Delta)

    def f_of(self, lam) -> tuple:
        return self.f[self.quotient.rep_of(lam)]

    def f_image(self) -> list:
        return sorted(set(self.f.values()))

    def f_inverse(self) -> dict:
        return {v: k for k, v in self.f.items()}


def isotropy_data(group: FinAbGroup, l: Pairing, delta: Subgroup) -> IsotropyData:
    if not is_isotropic(l, delta):
        raise NotIsotropic("the pairing is not trivial on the given subgroup")
    Q = quotient_group(group, delta)
    Dd = dual_of_subgroup(group, delta)
    f = {r: Dd.rep_of(l.image(r)) for r in Q.elements()}
    if len(set(f.values())) != len(f):
        raise NotMaximal("the map Lambda/Delta -> Delta* is not injective; Delta is not maximal")
    ker = kernel_of_pairing(l)
    img = pairing_image(l)
    img_delta = pairing_image(l, delta)
    return IsotropyData(group, l, delta, Q, Dd, f, ker, img, img_delta == Dd.sub)


# --- automorphisms ----------------------------------------------------------


def automorphism_generators(group: FinAbGroup) -> list[list[tuple]]:
    """Images of the standard generators under a generating set of Aut."""
    d = group.invariant_factors
    k = len(d)
    base = group.generators()
    gens = []
    for i in range(k):
        for u in range(2, d[i]):
            if gcd(u, d[i]) == 1:
                img = list(base)
                img[i] = group.scale(base[i], u)
                gens.append(img)
        for j in range(k):
            if i == j:
                continue
            c = d[j] // gcd(d[i], d[j])
            if c % d[j]:
                img = list(base)
                img[i] = group.add(base[i], group.scale(base[j], c))
                gens.append(img)
            if d[i] == d[j] and i < j:
                img = list(base)
                img[i], img[j] = base[j], base[i]
                gens.append(img)
    return gens


def apply_hom(group: FinAbGroup, images, x) -> tuple:
    out = group.zero
    for a, img in zip(x, images):
        if a:
            out = group.add(out, group.scale(img, a))
    return out


def pullback_pairing(l: Pairing, images) -> Pairing:
    G = l.group
    gens = G.generators()
    vals = [[eval_pairing(l, apply_hom(G, images, a), apply_hom(G, images, b)) for b in gens] for a in gens]
    return pairing_from_values(G, vals)


def pairing_orbits(group: FinAbGroup, pairings: list[Pairing], guard: int = 64) -> list[list[Pairing]]:
    """Orbits of Aut(Lambda) on the given pairings, each sorted, orbits in first-seen order."""
    if group.order > guard:
        raise GuardExceeded(f"|Lambda| = {group.order} exceeds automorphism guard {guard}")
    gens = automorphism_generators(group)
    index = {p.matrix: p for p in pairings}
    done: set = set()
    orbits = []
    for p in pairings:
        if p.matrix in done:
            continue
        orbit = {p.matrix}
        frontier = [p]
        while frontier:
            nxt = []
            for q in frontier:
                for g in gens:
                    r = pullback_pairing(q, g)
                    if r.matrix not in orbit:
                        orbit.add(r.matrix)
                        nxt.append(r)
            frontier = nxt
        done |= orbit
        orbits.append(sorted((index.get(m) or Pairing(group, m) for m in orbit), key=lambda x: x.upper()))
    return orbits


def all_automorphisms(group: FinAbGroup, guard: int = 16) -> list[list[tuple]]:
    """Every automorphism as generator images; exhaustive, small groups only."""
    if group.order > guard:
        raise GuardExceeded(f"|Lambda| = {group.order} exceeds guard {guard}")
    d = group.invariant_factors
    cands = [[x for x in group.elements() if d[i] % group.element_order(x) == 0] for i in range(len(d))]
    out = []
    elems = group.elements()
    for imgs in itertools.product(*cands):
        if len({apply_hom(group, imgs, x) for x in elems}) == len(elems):
            out.append(list(imgs))
    return out


def find_basis(group) -> list:
    """Elements x1..xk with group = <x1> (+) ... (+) <xk>, orders the invariant factors (largest first)."""
    target = sorted(invariant_factors_by_census(group) if not isinstance(group, FinAbGroup)
                    else group.invariant_factors, reverse=True)
    elems = sorted(group.elements())
    orders = {x: group.element_order(x) for x in elems}

    def search(chosen, span):
        j = len(chosen)
        if j == len(target):
            return list(chosen)
        for x in elems:
            if orders[x] != target[j] or x in span:
                continue
            new_span = generated_subgroup_elements(group, chosen + [x])
            if len(new_span) == len(span) * target[j]:
                out = search(chosen + [x], new_span)
                if out is not None:
                    return out
        return None

    out = search([], {group.zero})
    assert out is not None
    return out
