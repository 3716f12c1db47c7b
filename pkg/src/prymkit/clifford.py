"""Exact Clifford algebra Cl(n, C) with e_i^2 = -1, Spin words and the covering map.

Basis monomials e_S are stored as bitmasks (bit i-1 for e_i).  Coefficients are
CycNum, so every scalar used here (powers of i, square roots of 2) is exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .abelian import FinAbGroup
from .cyclotomic import I, CycMatrix, CycNum, sqrt_rational
from .extensions import AbelianGroup, CheckResult, FiniteGroup, cocycle_from_section, verify_cocycle

ZERO = CycNum.rational(0)
ONE = CycNum.rational(1)


class DimensionMismatch(ValueError):
    pass


class OddWord(ValueError):
    """The covering map is only defined on even words."""


class NotInvertible(ValueError):
    pass


def _as_cyc(c) -> CycNum:
    return c if isinstance(c, CycNum) else CycNum.rational(Fraction(c))


def _reorder_sign(a: int, b: int) -> int:
    """Sign of e_A e_B -> e_{A xor B}, counting swaps and e_i^2 = -1."""
    swaps = 0
    x = a >> 1
    while x:
        swaps += bin(x & b).count("1")
        x >>= 1
    swaps += bin(a & b).count("1")
    return -1 if swaps & 1 else 1


def _subset(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def _mask(subset) -> int:
    m = 0
    for i in subset:
        m |= 1 << (i - 1)
    return m


class CliffordElem:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: dict | None = None):
        self.n = n
        clean = {}
        for k, v in (terms or {}).items():
            mask = k if isinstance(k, int) else _mask(k)
            if mask >> n:
                raise DimensionMismatch(f"monomial {_subset(mask)} outside Cl({n})")
            v = _as_cyc(v)
            if v:
                clean[mask] = clean.get(mask, ZERO) + v
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def scalar(cls, n: int, c=1) -> "CliffordElem":
        return cls(n, {0: c})

    @classmethod
    def basis(cls, n: int, *indices) -> "CliffordElem":
        """e_{i1} e_{i2} ... in the given order (not necessarily sorted)."""
        out = cls.scalar(n)
        for i in indices:
            out = out * cls(n, {1 << (i - 1): ONE})
        return out

    @classmethod
    def vector(cls, coords) -> "CliffordElem":
        coords = [_as_cyc(c) for c in coords]
        return cls(len(coords), {1 << i: c for i, c in enumerate(coords) if c})

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, ZERO) + v
        return CliffordElem(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return CliffordElem(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def _coerce(self, other) -> "CliffordElem":
        if isinstance(other, CliffordElem):
            if other.n != self.n:
                raise DimensionMismatch(f"Cl({self.n}) vs Cl({other.n})")
            return other
        return CliffordElem.scalar(self.n, other)

    def __mul__(self, other):
        if not isinstance(other, CliffordElem):
            c = _as_cyc(other)
            return CliffordElem(self.n, {k: v * c for k, v in self.terms.items()})
        return clifford_product(self, other)

    def __rmul__(self, other):
        c = _as_cyc(other)
        return CliffordElem(self.n, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, CliffordElem):
            try:
                other = self._coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def grade(self, k: int) -> "CliffordElem":
        return CliffordElem(self.n, {m: v for m, v in self.terms.items() if bin(m).count("1") == k})

    def grades(self) -> set[int]:
        return {bin(m).count("1") for m in self.terms}

    def is_even(self) -> bool:
        return all(bin(m).count("1") % 2 == 0 for m in self.terms)

    def scalar_part(self) -> CycNum:
        return self.terms.get(0, ZERO)

    def is_scalar(self) -> bool:
        return set(self.terms) <= {0}

    def reverse(self) -> "CliffordElem":
        # e_S reversed picks up (-1)^{k(k-1)/2}
        out = {}
        for m, v in self.terms.items():
            k = bin(m).count("1")
            out[m] = -v if (k * (k - 1) // 2) % 2 else v
        return CliffordElem(self.n, out)

    def inverse(self) -> "CliffordElem":
        """Inverse of an element whose reverse-norm x^t x is a nonzero scalar."""
        N = self.reverse() * self
        if not N.is_scalar() or not N.scalar_part():
            raise NotInvertible("x^t x is not a nonzero scalar")
        return self.reverse() * N.scalar_part().inverse()

    def leading(self) -> tuple[tuple[int, ...], CycNum] | None:
        if not self.terms:
            return None
        m = min(self.terms, key=lambda k: (bin(k).count("1"), _subset(k)))
        return _subset(m), self.terms[m]

    def to_json(self) -> dict:
        items = sorted(self.terms.items(), key=lambda kv: (bin(kv[0]).count("1"), _subset(kv[0])))
        return {"n": self.n, "terms": [{"subset": list(_subset(m)), "coeff": v.to_json()} for m, v in items]}

    @classmethod
    def from_json(cls, data: dict) -> "CliffordElem":
        return cls(data["n"], {tuple(t["subset"]): CycNum.from_json(t["coeff"]) for t in data["terms"]})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, v in sorted(self.terms.items(), key=lambda kv: (bin(kv[0]).count("1"), _subset(kv[0]))):
            mono = "".join(f"e{i}" for i in _subset(m))
            c = _coef_str(v)
            if not mono:
                parts.append(c)
            elif c in ("1", "-1"):
                parts.append(("-" if c == "-1" else "") + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)


def _coef_str(v: CycNum) -> str:
    if v.is_rational():
        return str(v.rational_value())
    if v == I:
        return "i"
    if v == -I:
        return "-i"
    r = repr(v)
    return "(" + (r[7:-1] if r.startswith("CycNum(") else r) + ")"


def clifford_product(a: CliffordElem, b: CliffordElem) -> CliffordElem:
    if a.n != b.n:
        raise DimensionMismatch(f"Cl({a.n}) vs Cl({b.n})")
    out: dict[int, CycNum] = {}
    for ma, va in a.terms.items():
        for mb, vb in b.terms.items():
            v = va * vb
            if _reorder_sign(ma, mb) < 0:
                v = -v
            m = ma ^ mb
            out[m] = out.get(m, ZERO) + v
    return CliffordElem(a.n, out)


def omega(u, v) -> CycNum:
    """Standard complex bilinear (not hermitian) form."""
    acc = ZERO
    for x, y in zip(u, v):
        acc = acc + _as_cyc(x) * _as_cyc(y)
    return acc


class CliffordGroup(FiniteGroup):
    """Invertible Clifford elements as a group interface for the cocycle machinery."""

    def __init__(self, n: int):
        self.n = n
        self.identity = CliffordElem.scalar(n)

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        return a.inverse()


@dataclass(eq=False)
class SpinWord:
    """prefix * v_1 v_2 ... v_k with omega(v_i) = +-1."""

    vectors: list
    prefix: CycNum = field(default_factory=lambda: ONE)
    n: int | None = None

    def __post_init__(self):
        self.vectors = [tuple(_as_cyc(c) for c in v) for v in self.vectors]
        if self.n is None:
            if not self.vectors:
                raise DimensionMismatch("empty word needs an explicit n")
            self.n = len(self.vectors[0])
        for v in self.vectors:
            if len(v) != self.n:
                raise DimensionMismatch("vector length differs from n")
            if omega(v, v) not in (1, -1):
                raise ValueError(f"vector {v} does not have norm +-1")
        self.prefix = _as_cyc(self.prefix)
        self._value = None

    def __len__(self):
        return len(self.vectors)

    def is_even(self) -> bool:
        return len(self.vectors) % 2 == 0

    @property
    def value(self) -> CliffordElem:
        if self._value is None:
            out = CliffordElem.scalar(self.n, self.prefix)
            for v in self.vectors:
                out = out * CliffordElem.vector(v)
            self._value = out
        return self._value

    def __mul__(self, other: "SpinWord") -> "SpinWord":
        if other.n != self.n:
            raise DimensionMismatch("words in different dimensions")
        return SpinWord(self.vectors + other.vectors, self.prefix * other.prefix, self.n)

    def __neg__(self):
        return SpinWord(self.vectors, -self.prefix, self.n)

    def inverse(self) -> "SpinWord":
        # v^-1 = -v / omega(v)
        c = self.prefix.inverse()
        for v in self.vectors:
            c = c * (-omega(v, v)).inverse()
        return SpinWord(list(reversed(self.vectors)), c, self.n)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "prefix": self.prefix.to_json(),
            "vectors": [[c.to_json() for c in v] for v in self.vectors],
        }


def adjoint_matrix(x: CliffordElem, x_inv: CliffordElem | None = None) -> CycMatrix:
    """Matrix of v -> x v x^-1 on V, provided x preserves V."""
    n = x.n
    x_inv = x.inverse() if x_inv is None else x_inv
    cols = []
    for j in range(n):
        y = x * CliffordElem(n, {1 << j: ONE}) * x_inv
        if y.grades() - {1}:
            raise ValueError("element does not preserve V")
        cols.append([y.terms.get(1 << i, ZERO) for i in range(n)])
    return CycMatrix.from_rows([[cols[j][i] for j in range(n)] for i in range(n)])


def covering_map(w: SpinWord) -> CycMatrix:
    """f(w) = Ad_w on V; for an even word this is a product of reflections."""
    if not w.is_even():
        raise OddWord(f"word of length {len(w)} is not in Spin")
    if not w.vectors:
        return CycMatrix.identity(w.n)
    M = adjoint_matrix(w.value, w.inverse().value)
    if not (M.T @ M).is_identity() or M.det() != 1:
        raise AssertionError("adjoint action left SO(n)")
    return M


# sample vectors of norm +-1 with rational or Gaussian coordinates
_PAIRS = [
    (Fraction(3, 5), Fraction(4, 5), 1),
    (Fraction(5, 13), Fraction(12, 13), 1),
    (Fraction(5, 4), Fraction(3, 4), "i"),  # (5/4)^2 + (3i/4)^2 = 1
]


def random_unit_vector(n: int, rng: random.Random) -> tuple:
    coords = [ZERO] * n
    kind = rng.randrange(4)
    if kind == 0 or n == 1:
        coords[rng.randrange(n)] = _as_cyc(rng.choice((1, -1)))
    elif kind == 1:
        coords[rng.randrange(n)] = I * rng.choice((1, -1))  # norm -1
    else:
        i, j = rng.sample(range(n), 2)
        a, b, t = rng.choice(_PAIRS)
        coords[i] = _as_cyc(a * rng.choice((1, -1)))
        coords[j] = _as_cyc(b * rng.choice((1, -1)))
        if t == "i":
            coords[j] = coords[j] * I
        if kind == 3:
            coords = [c * I for c in coords]
    return tuple(coords)


def random_spin_word(n: int, rng: random.Random, max_pairs: int = 3) -> SpinWord:
    k = 2 * rng.randint(0, max_pairs)
    return SpinWord([random_unit_vector(n, rng) for _ in range(k)], ONE, n)


def check_covering_homomorphism(n: int, trials: int = 100, seed: int = 0) -> CheckResult:
    rng = random.Random(seed)
    for t in range(trials):
        w1, w2 = random_spin_word(n, rng), random_spin_word(n, rng)
        if covering_map(w1 * w2) != covering_map(w1) @ covering_map(w2):
            return CheckResult(False, {"trial": t, "w1": w1.to_json(), "w2": w2.to_json()}, "f(ww') != f(w)f(w')")
        if covering_map(-w1) != covering_map(w1):
            return CheckResult(False, {"trial": t, "w1": w1.to_json()}, "f(-w) != f(w)")
    return CheckResult(True)


def e_vec(n: int, i: int, c=1) -> tuple:
    return tuple(_as_cyc(c) if k == i - 1 else ZERO for k in range(n))


def rotation_generators(n: int, indices) -> list[CliffordElem]:
    """e_i e_j (i < j in indices): the standard generators of Spin on that coordinate block."""
    idx = sorted(indices)
    return [CliffordElem.basis(n, i, j) for a, i in enumerate(idx) for j in idx[a + 1:]]


def _in_block(x: CliffordElem, block: set[int]) -> bool:
    return all(set(_subset(m)) <= block for m in x.terms)


@dataclass(eq=False)
class SpinInvolutionData:
    n: int
    p: int
    q: int
    s: SpinWord
    checks: dict


def build_spin_involution_data(n: int, p: int, q: int) -> SpinInvolutionData:
    """s = i v_1 v_{p+1} over I_{p,q}, with v_1 = e_1, v_{p+1} = e_{p+1}."""
    if p + q != n or p % 2 or p < 1 or q < 1:
        raise ValueError(f"need p + q = n, p even and p, q >= 1; got (n,p,q) = ({n},{p},{q})")
    s = SpinWord([e_vec(n, 1), e_vec(n, p + 1)], I, n)
    sv = s.value
    s_inv = s.inverse().value
    first, second = set(range(1, p + 1)), set(range(p + 1, n + 1))
    gens = rotation_generators(n, first) + rotation_generators(n, second)
    images = [sv * g * s_inv for g in gens]
    preserved = all(
        _in_block(y, first if _in_block(g, first) else second) and (y == g or y == -g)
        for g, y in zip(gens, images)
    )
    anti = [g for g, y in zip(gens, images) if y == -g]
    refl = CycMatrix.diag([-ONE if i in (0, p) else ONE for i in range(n)])
    checks = {
        "s_squared_one": sv * sv == 1,
        "s_inverse_is_s": s_inv == sv,
        "f_s_is_reflection_pair": covering_map(s) == refl,
        "Ad_s_preserves_generators": preserved,
        "Ad_s_matches_reflections": all(
            (y == -g) == (len({1, p + 1} & set(_subset(next(iter(g.terms))))) == 1) for g, y in zip(gens, images)
        ),
        "s_not_central": bool(anti),
        "anticommuting_generators": [list(_subset(next(iter(g.terms)))) for g in anti],
    }
    return SpinInvolutionData(n, p, q, s, checks)


def block_J(n: int) -> CycMatrix:
    h = n // 2
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(h):
        rows[i][h + i] = ONE
        rows[h + i][i] = -ONE
    return CycMatrix.from_rows(rows)


def j_prime(m: int) -> SpinWord:
    """An even word over J = (0, I; -I, 0) in SO(4m).

    Each plane (e_k, e_{2m+k}) is rotated by the pair e_k, (e_k - e_{2m+k})/sqrt2;
    of the two lifts the one with positive scalar coefficient is returned.
    """
    n, h = 4 * m, 2 * m
    r = sqrt_rational(Fraction(1, 2))
    vecs = []
    for k in range(1, h + 1):
        w = tuple(r if i == k - 1 else (-r if i == h + k - 1 else ZERO) for i in range(n))
        vecs += [w, e_vec(n, k)]
    word = SpinWord(vecs, ONE, n)
    lead = word.value.leading()
    if lead is not None and lead[1].is_rational() and lead[1].rational_value() < 0:
        word = -word
    return word


@dataclass(eq=False)
class Spin4mData:
    m: int
    J_prime: SpinWord
    s: SpinWord
    section: dict
    cocycle: object
    labels: dict
    checks: dict

    def table(self) -> dict:
        """c(x, y) for x, y in {1, a, b, ab}, as Clifford elements."""
        return {(self.labels[x], self.labels[y]): v for (x, y), v in self.cocycle.table.items()}

    def exception_set(self) -> set:
        return {k for k, v in self.table().items() if v != 1}


def spin4m_cocycle(m: int) -> Spin4mData:
    """Cocycle of the section a -> J', b -> s, ab -> J's over (Z/2)^2."""
    if m < 1:
        raise ValueError("m >= 1")
    n, h = 4 * m, 2 * m
    Jp = j_prime(m)
    s = SpinWord([e_vec(n, 1), e_vec(n, h + 1)], I, n)
    gam = AbelianGroup(FinAbGroup((2, 2)))
    e, a, b, ab = gam.identity, (1, 0), (0, 1), (1, 1)
    G = CliffordGroup(n)
    section = {e: G.identity, a: Jp.value, b: s.value, ab: Jp.value * s.value}
    first, second = set(range(1, h + 1)), set(range(h + 1, n + 1))
    g0 = rotation_generators(n, first) + rotation_generators(n, second)
    data = cocycle_from_section(G, gam, section, g0)
    labels = {e: "1", a: "a", b: "b", ab: "ab"}
    Jv = Jp.value
    Jinv = Jp.inverse().value
    swapped = all(_in_block(Jv * g * Jinv, second if _in_block(g, first) else first) for g in g0)
    vol = CliffordElem.basis(n, *range(1, n + 1))
    sq = Jv * Jv
    checks = {
        "f_J_prime_is_J": covering_map(Jp) == block_J(n),
        "J_prime_squared_minus_one": sq == -1,
        "J_prime_squared_over_minus_identity": covering_map(Jp * Jp) == CycMatrix.identity(n).scale(-1),
        "J_prime_squared_is_volume": sq == vol or sq == -vol,
        "s_squared_one": s.value * s.value == 1,
        "tau_a_exchanges_factors": swapped,
        "cocycle_verified": bool(verify_cocycle(data.cocycle)),
        "normalized": all(data.cocycle.table[(e, x)] == 1 and data.cocycle.table[(x, e)] == 1 for x in (e, a, b, ab)),
    }
    return Spin4mData(m, Jp, s, section, data.cocycle, labels, checks)
