"""Exact arithmetic in cyclotomic fields Q(zeta_N) and sparse matrices over them.

Numbers are stored in the power basis 1, z, ..., z^(phi(N)-1) modulo the
N-th cyclotomic polynomial, so equality is coefficient equality.  Values
known to be ``q * zeta_N^k`` carry that fact along, which keeps products of
roots of unity cheap.

>>> i = root_of_unity(1, 4)
>>> i * i == -1
True
>>> root_of_unity(2, 8) == i
True
>>> principal_sqrt(root_of_unity(1, 3)) == root_of_unity(1, 6)
True
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm


class CycError(ValueError):
    pass


class NotRootOfUnity(CycError):
    pass


class SingularMatrix(CycError):
    pass


class ShapeMismatch(CycError):
    pass


class NotPermutation(CycError):
    pass


class InconsistentShift(CycError):
    pass


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _polydiv_exact(a, b):
    # integer polynomials, b monic; coefficients low degree first
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1]
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    assert not any(a), "inexact division"
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _polydiv_exact(num, cyclotomic_polynomial(d))
    return tuple(num)


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


def _mobius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


class _Tables:
    """Per-conductor data: canonical vectors of every power of zeta."""

    def __init__(self, N: int):
        self.N = N
        phi_poly = cyclotomic_polynomial(N)
        self.phi = len(phi_poly) - 1
        vecs = []
        cur = [0] * self.phi
        cur[0] = 1
        for _ in range(N):
            vecs.append(tuple(cur))
            # multiply by z and reduce with the monic relation
            top = cur[-1]
            nxt = [0] + cur[:-1]
            if top:
                for j in range(self.phi):
                    nxt[j] -= top * phi_poly[j]
            cur = nxt
        self.pow_vec = vecs
        self.zero = (0,) * self.phi
        self.units = [k for k in range(1, N + 1) if gcd(k, N) == 1]
        self.norm_trace = tuple(
            Fraction(_mobius(N // gcd(k, N)), euler_phi(N // gcd(k, N))) for k in range(self.phi)
        )
        self._monos: dict = {}

    def mono(self, q, k: int) -> "CycNum":
        # shared immutable q * zeta^k
        key = (q, k)
        v = self._monos.get(key)
        if v is None:
            v = CycNum._raw(self.N, tuple(q * c for c in self.pow_vec[k]), key)
            if len(self._monos) < 20000:
                self._monos[key] = v
        return v


@lru_cache(maxsize=None)
def _tables(N: int) -> _Tables:
    return _Tables(N)


class CycNum:
    __slots__ = ("N", "coeffs", "_mono")

    def __init__(self, N: int, coeffs, _mono=None):
        N = int(N)
        if N < 1:
            raise CycError("conductor must be positive")
        T = _tables(N)
        coeffs = tuple(_norm(Fraction(c) if not isinstance(c, int) else c) for c in coeffs)
        if len(coeffs) > T.phi:
            coeffs = _reduce_long(T, coeffs)
        elif len(coeffs) < T.phi:
            coeffs = coeffs + (0,) * (T.phi - len(coeffs))
        self.N = N
        self.coeffs = coeffs
        self._mono = _mono

    @classmethod
    def _raw(cls, N, coeffs, mono=None):
        obj = cls.__new__(cls)
        obj.N = N
        obj.coeffs = coeffs
        obj._mono = mono
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def rational(cls, q, N: int = 1) -> "CycNum":
        q = _norm(Fraction(q))
        T = _tables(N)
        if q == 0:
            return cls._raw(N, T.zero, None)
        return T.mono(q, 0)

    # conversions --------------------------------------------------------
    def embed(self, M: int) -> "CycNum":
        if M == self.N:
            return self
        if M % self.N:
            raise CycError(f"cannot embed conductor {self.N} into {M}")
        T = _tables(M)
        step = M // self.N
        if self._mono is not None:
            q, k = self._mono
            return T.mono(q, (k * step) % M)
        acc = [0] * T.phi
        for j, c in enumerate(self.coeffs):
            if c:
                for t, v in enumerate(T.pow_vec[(j * step) % M]):
                    if v:
                        acc[t] += c * v
        return CycNum._raw(M, tuple(_norm(x) for x in acc))

    def _coerce(self, other):
        if isinstance(other, CycNum):
            if other.N == self.N:
                return self, other
            M = lcm(self.N, other.N)
            return self.embed(M), other.embed(M)
        if isinstance(other, (int, Fraction)):
            return self, CycNum.rational(other, self.N)
        return NotImplemented

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise CycError("not rational")
        return Fraction(self.coeffs[0])

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        a, b = c
        if b.is_zero():
            return a
        if a.is_zero():
            return b
        return CycNum._raw(a.N, tuple(_norm(x + y) for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        mono = None
        if self._mono is not None:
            q, k = self._mono
            mono = (-q, k)
        return CycNum._raw(self.N, tuple(-x for x in self.coeffs), mono)

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        a, b = c
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if type(other) is CycNum and other.N == self.N and self._mono is not None and other._mono is not None:
            (p, j), (q, k) = self._mono, other._mono
            pq = p * q
            if type(pq) is not int:
                pq = _norm(pq)
            return _tables(self.N).mono(pq, (j + k) % self.N)
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return CycNum._raw(self.N, _tables(self.N).zero)
            mono = None
            if self._mono is not None:
                mono = (_norm(self._mono[0] * other), self._mono[1])
            return CycNum._raw(self.N, tuple(_norm(x * other) for x in self.coeffs), mono)
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        a, b = c
        T = _tables(a.N)
        if a._mono is not None and b._mono is not None:
            q = _norm(a._mono[0] * b._mono[0])
            k = (a._mono[1] + b._mono[1]) % a.N
            return T.mono(q, k)
        if a._mono is not None or b._mono is not None:
            if b._mono is None:
                a, b = b, a
            q, k = b._mono
            acc = [0] * T.phi
            for j, c in enumerate(a.coeffs):
                if c:
                    for t, v in enumerate(T.pow_vec[(j + k) % a.N]):
                        if v:
                            acc[t] += c * v
            return CycNum._raw(a.N, tuple(_norm(q * x) for x in acc))
        conv = _polymul(a.coeffs, b.coeffs)
        return CycNum._raw(a.N, _reduce_long(T, conv))

    __rmul__ = __mul__

    def galois(self, k: int) -> "CycNum":
        """Image under zeta -> zeta^k, gcd(k, N) = 1."""
        if gcd(k, self.N) != 1:
            raise CycError(f"gcd({k},{self.N}) != 1")
        T = _tables(self.N)
        if self._mono is not None:
            q, e = self._mono
            e2 = (e * k) % self.N
            return CycNum._raw(self.N, tuple(q * v for v in T.pow_vec[e2]), (q, e2))
        acc = [0] * T.phi
        for j, c in enumerate(self.coeffs):
            if c:
                for t, v in enumerate(T.pow_vec[(j * k) % self.N]):
                    if v:
                        acc[t] += c * v
        return CycNum._raw(self.N, tuple(_norm(x) for x in acc))

    def conjugate(self) -> "CycNum":
        return self.galois(-1 % self.N if self.N > 1 else 1)

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(zeta_N)")
        T = _tables(self.N)
        if self._mono is not None:
            q, k = self._mono
            qi = 1 if q == 1 else (-1 if q == -1 else _norm(1 / Fraction(q)))
            return T.mono(qi, (-k) % self.N)
        # product of the non-trivial conjugates is norm / self
        acc = CycNum.rational(1, self.N)
        for k in T.units:
            if k % self.N != 1 % self.N:
                acc = acc * self.galois(k)
        norm = (acc * self).rational_value()
        return acc * (1 / norm)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(zeta_N)")
            return self * (1 / Fraction(other))
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        a, b = c
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = CycNum.rational(1, self.N)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, CycNum):
            return NotImplemented
        a, b = self._coerce(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        # normalised trace does not depend on the conductor
        T = _tables(self.N)
        return hash(sum((c * t for c, t in zip(self.coeffs, T.norm_trace) if c), Fraction(0)))

    def __complex__(self):
        import cmath

        return sum(
            (complex(float(c)) * cmath.exp(2j * cmath.pi * k / self.N) for k, c in enumerate(self.coeffs) if c),
            0j,
        )

    def __repr__(self):
        if self.is_rational():
            return f"CycNum({self.coeffs[0]})"
        terms = [f"{c}*z{self.N}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "CycNum(" + " + ".join(terms) + ")"

    def to_json(self) -> dict:
        return {
            "conductor": self.N,
            "coeffs": [[str(Fraction(c).numerator), str(Fraction(c).denominator)] for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CycNum":
        return cls(int(data["conductor"]), [Fraction(int(a), int(b)) for a, b in data["coeffs"]])

    # root-of-unity helpers ----------------------------------------------
    def root_exponent(self) -> tuple[int, int]:
        """(k, M) with self == zeta_M^k, 0 <= k < M, M the multiplicative order."""
        M = self.N if self.N % 2 == 0 else 2 * self.N
        x = self.embed(M)
        T = _tables(M)
        if x._mono is not None and x._mono[0] == 1:
            k = x._mono[1]
        else:
            for k in range(M):
                if x.coeffs == T.pow_vec[k]:
                    break
            else:
                raise NotRootOfUnity(f"{self!r} is not a root of unity")
        g = gcd(k, M)
        return k // g, M // g


def _reduce_long(T: _Tables, conv) -> tuple:
    acc = [0] * T.phi
    for m, c in enumerate(conv):
        if c:
            for t, v in enumerate(T.pow_vec[m % T.N]):
                if v:
                    acc[t] += c * v
    return tuple(_norm(x) for x in acc)


def zeta(N: int) -> CycNum:
    return root_of_unity(1, N)


def root_of_unity(k: int, N: int) -> CycNum:
    T = _tables(N)
    k %= N
    return CycNum._raw(N, T.pow_vec[k], (1, k))


def cyc(x, N: int = 1) -> CycNum:
    if isinstance(x, CycNum):
        return x.embed(lcm(x.N, N))
    return CycNum.rational(x, N)


I = root_of_unity(1, 4)


def principal_sqrt(u: CycNum) -> CycNum:
    """Square root of a root of unity on the branch exp(i t) -> exp(i t / 2), 0 <= t < 2 pi."""
    k, M = u.root_exponent()
    return root_of_unity(k, 2 * M) if M > 1 else CycNum.rational(1, u.N)


def principal_root(u: CycNum, m: int) -> CycNum:
    """m-th root of a root of unity on the branch exp(i t) -> exp(i t / m), 0 <= t < 2 pi."""
    if m == 1:
        return u
    k, M = u.root_exponent()
    return root_of_unity(k, m * M) if M > 1 else CycNum.rational(1, u.N)


class NoCyclotomicRoot(CycError):
    pass


def _square_part(n: int) -> tuple[int, int]:
    """(s, m) with n = s^2 m and m squarefree."""
    s, m, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            m *= p
        p += 1
    return s, m * n


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CycNum:
    """The positive square root of a prime, via a quadratic Gauss sum."""
    if p == 2:
        return root_of_unity(1, 8) + root_of_unity(7, 8)
    g = CycNum.rational(0, p)
    for k in range(1, p):
        leg = pow(k, (p - 1) // 2, p)
        g = g + (root_of_unity(k, p) if leg == 1 else -root_of_unity(k, p))
    return g if p % 4 == 1 else -(I * g)


def sqrt_rational(q) -> CycNum:
    """Principal square root of a rational number: positive, or i times positive."""
    q = Fraction(q)
    if q == 0:
        return CycNum.rational(0)
    a, b = abs(q.numerator), q.denominator
    s, m = _square_part(a * b)
    out = CycNum.rational(Fraction(s, b))
    p = 2
    while m > 1:
        if m % p == 0:
            out = out * _sqrt_prime(p)
            m //= p
        p += 1
    return out * I if q < 0 else out


def exact_sqrt(u: CycNum) -> CycNum:
    """A square root of u = r * (root of unity) with r rational, inside a larger cyclotomic field."""
    if u.is_zero():
        return u
    M = u.N if u.N % 2 == 0 else 2 * u.N
    for k in range(M):
        v = u * root_of_unity(-k, M)
        if v.is_rational():
            r = v.rational_value()
            root = principal_sqrt(root_of_unity(k, M)) if r > 0 else principal_sqrt(root_of_unity(k, M) * -1)
            return sqrt_rational(abs(r)) * root
    raise NoCyclotomicRoot(f"{u!r} is not a rational multiple of a root of unity")


# --- matrices ----------------------------------------------------------------


class CycMatrix:
    """Sparse matrix over Q(zeta_N); rows are dicts column -> nonzero CycNum."""

    __slots__ = ("n_rows", "n_cols", "N", "rows")

    def __init__(self, n_rows: int, n_cols: int, rows, N: int | None = None):
        rows = [dict(r) for r in rows]
        if N is None:
            N = 1
            for r in rows:
                for v in r.values():
                    if isinstance(v, CycNum):
                        N = lcm(N, v.N)
        clean = []
        for r in rows:
            cr = {}
            for j, v in r.items():
                v = cyc(v, N) if not isinstance(v, CycNum) else v.embed(lcm(v.N, N))
                if v.N != N:
                    raise CycError("entry conductor does not divide the matrix conductor")
                if not v.is_zero():
                    cr[j] = v
            clean.append(cr)
        if len(clean) != n_rows:
            raise ShapeMismatch("row count mismatch")
        self.n_rows, self.n_cols, self.N, self.rows = n_rows, n_cols, N, clean

    @classmethod
    def _raw(cls, n_rows, n_cols, N, rows):
        obj = cls.__new__(cls)
        obj.n_rows, obj.n_cols, obj.N, obj.rows = n_rows, n_cols, N, rows
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def identity(cls, n: int, N: int = 1) -> "CycMatrix":
        one = CycNum.rational(1, N)
        return cls._raw(n, n, N, [{i: one} for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int, N: int = 1) -> "CycMatrix":
        return cls._raw(r, c, N, [{} for _ in range(r)])

    @classmethod
    def diag(cls, entries, N: int | None = None) -> "CycMatrix":
        entries = list(entries)
        return cls(len(entries), len(entries), [{i: e} for i, e in enumerate(entries)], N)

    @classmethod
    def from_rows(cls, data, N: int | None = None) -> "CycMatrix":
        data = [list(r) for r in data]
        nc = len(data[0]) if data else 0
        if any(len(r) != nc for r in data):
            raise ShapeMismatch("ragged rows")
        return cls(len(data), nc, [{j: v for j, v in enumerate(r)} for r in data], N)

    @classmethod
    def monomial(cls, perm, scalars, N: int | None = None) -> "CycMatrix":
        """Matrix sending basis vector j to scalars[j] * e_{perm[j]}."""
        n = len(perm)
        rows = [dict() for _ in range(n)]
        for j, (i, c) in enumerate(zip(perm, scalars)):
            rows[i][j] = c
        return cls(n, n, rows, N)

    @classmethod
    def block_diag(cls, blocks) -> "CycMatrix":
        blocks = list(blocks)
        N = lcm(1, *(b.N for b in blocks))
        n = sum(b.n_rows for b in blocks)
        m = sum(b.n_cols for b in blocks)
        rows = []
        off = 0
        for b in blocks:
            b = b.with_conductor(N)
            for r in b.rows:
                rows.append({j + off: v for j, v in r.items()})
            off += b.n_cols
        return cls._raw(n, m, N, rows)

    # access -------------------------------------------------------------
    @property
    def shape(self):
        return (self.n_rows, self.n_cols)

    def __getitem__(self, ij) -> CycNum:
        i, j = ij
        v = self.rows[i].get(j)
        return v if v is not None else CycNum.rational(0, self.N)

    def to_rows(self) -> list[list[CycNum]]:
        return [[self[i, j] for j in range(self.n_cols)] for i in range(self.n_rows)]

    def nonzeros(self):
        for i, r in enumerate(self.rows):
            for j in sorted(r):
                yield i, j, r[j]

    def with_conductor(self, M: int) -> "CycMatrix":
        if M == self.N:
            return self
        return CycMatrix._raw(
            self.n_rows, self.n_cols, M, [{j: v.embed(M) for j, v in r.items()} for r in self.rows]
        )

    def _common(self, other):
        if self.N == other.N:
            return self, other
        M = lcm(self.N, other.N)
        return self.with_conductor(M), other.with_conductor(M)

    # arithmetic ---------------------------------------------------------
    def __matmul__(self, other: "CycMatrix") -> "CycMatrix":
        if not isinstance(other, CycMatrix):
            return NotImplemented
        if self.n_cols != other.n_rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        a, b = self._common(other)
        out = []
        for r in a.rows:
            acc: dict = {}
            for k, x in r.items():
                for j, y in b.rows[k].items():
                    p = x * y
                    if j in acc:
                        acc[j] = acc[j] + p
                    else:
                        acc[j] = p
            out.append({j: v for j, v in acc.items() if not v.is_zero()})
        return CycMatrix._raw(a.n_rows, b.n_cols, a.N, out)

    def __add__(self, other: "CycMatrix") -> "CycMatrix":
        if self.shape != other.shape:
            raise ShapeMismatch("shape mismatch in addition")
        a, b = self._common(other)
        out = []
        for r, s in zip(a.rows, b.rows):
            acc = dict(r)
            for j, v in s.items():
                acc[j] = acc[j] + v if j in acc else v
            out.append({j: v for j, v in acc.items() if not v.is_zero()})
        return CycMatrix._raw(a.n_rows, a.n_cols, a.N, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CycMatrix":
        if not isinstance(c, CycNum):
            c = CycNum.rational(c, self.N)
        M = lcm(self.N, c.N)
        a = self.with_conductor(M)
        c = c.embed(M)
        if c.is_zero():
            return CycMatrix.zeros(self.n_rows, self.n_cols, M)
        return CycMatrix._raw(a.n_rows, a.n_cols, M, [{j: v * c for j, v in r.items()} for r in a.rows])

    def transpose(self) -> "CycMatrix":
        rows = [dict() for _ in range(self.n_cols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                rows[j][i] = v
        return CycMatrix._raw(self.n_cols, self.n_rows, self.N, rows)

    @property
    def T(self):
        return self.transpose()

    def map_entries(self, fn) -> "CycMatrix":
        return CycMatrix(self.n_rows, self.n_cols, [{j: fn(v) for j, v in r.items()} for r in self.rows])

    def is_monomial(self) -> bool:
        if self.n_rows != self.n_cols:
            return False
        cols = set()
        for r in self.rows:
            if len(r) != 1:
                return False
            cols.update(r)
        return len(cols) == self.n_cols

    def inverse(self) -> "CycMatrix":
        if self.n_rows != self.n_cols:
            raise ShapeMismatch("inverse of a non-square matrix")
        n = self.n_rows
        if self.is_monomial():
            rows = [dict() for _ in range(n)]
            for i, r in enumerate(self.rows):
                (j, v), = r.items()
                rows[j][i] = v.inverse()
            return CycMatrix._raw(n, n, self.N, rows)
        return self._gauss_inverse()

    def _gauss_inverse(self) -> "CycMatrix":
        n = self.n_rows
        N = self.N
        one = CycNum.rational(1, N)
        A = [dict(r) for r in self.rows]
        B = [{i: one} for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if col in A[r]), None)
            if piv is None:
                raise SingularMatrix("matrix is singular")
            A[col], A[piv] = A[piv], A[col]
            B[col], B[piv] = B[piv], B[col]
            inv = A[col][col].inverse()
            A[col] = {j: v * inv for j, v in A[col].items()}
            B[col] = {j: v * inv for j, v in B[col].items()}
            for r in range(n):
                if r != col and col in A[r]:
                    f = A[r][col]
                    for src, dst in ((A[col], A[r]), (B[col], B[r])):
                        for j, v in src.items():
                            w = dst.get(j)
                            nv = (w - f * v) if w is not None else -(f * v)
                            if nv.is_zero():
                                dst.pop(j, None)
                            else:
                                dst[j] = nv
        return CycMatrix._raw(n, n, N, B)

    def det(self) -> CycNum:
        if self.n_rows != self.n_cols:
            raise ShapeMismatch("determinant of a non-square matrix")
        n = self.n_rows
        A = [dict(r) for r in self.rows]
        d = CycNum.rational(1, self.N)
        for col in range(n):
            piv = next((r for r in range(col, n) if col in A[r]), None)
            if piv is None:
                return CycNum.rational(0, self.N)
            if piv != col:
                A[col], A[piv] = A[piv], A[col]
                d = -d
            p = A[col][col]
            d = d * p
            inv = p.inverse()
            for r in range(col + 1, n):
                if col in A[r]:
                    f = A[r][col] * inv
                    for j, v in A[col].items():
                        w = A[r].get(j)
                        nv = (w - f * v) if w is not None else -(f * v)
                        if nv.is_zero():
                            A[r].pop(j, None)
                        else:
                            A[r][j] = nv
        return d

    def __pow__(self, e: int) -> "CycMatrix":
        if e < 0:
            return self.inverse() ** (-e)
        out = CycMatrix.identity(self.n_rows, self.N)
        base = self
        while e:
            if e & 1:
                out = out @ base
            base = base @ base
            e >>= 1
        return out

    def conj_by(self, A: "CycMatrix") -> "CycMatrix":
        """Int_A(self) = A self A^-1."""
        return A @ self @ A.inverse()

    def block(self, rows: range, cols: range) -> "CycMatrix":
        out = []
        for i in rows:
            r = self.rows[i]
            out.append({j - cols.start: v for j, v in r.items() if cols.start <= j < cols.stop})
        return CycMatrix._raw(len(rows), len(cols), self.N, out)

    def __eq__(self, other):
        if not isinstance(other, CycMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        a, b = self._common(other)
        return all(r.keys() == s.keys() and all(r[j] == s[j] for j in r) for r, s in zip(a.rows, b.rows))

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(r)) for r in self.rows)))

    def scalar_value(self) -> CycNum | None:
        """c if self == c * I, else None."""
        if self.n_rows != self.n_cols:
            return None
        if self.n_rows == 0:
            return CycNum.rational(1, self.N)
        r0 = self.rows[0]
        if list(r0) != [0]:
            return None
        c = r0[0]
        for i, r in enumerate(self.rows):
            if len(r) != 1 or i not in r or r[i] != c:
                return None
        return c

    def is_scalar(self) -> bool:
        return self.scalar_value() is not None

    def is_diagonal(self) -> bool:
        return all(all(j == i for j in r) for i, r in enumerate(self.rows))

    def diagonal(self) -> list[CycNum]:
        return [self[i, i] for i in range(min(self.shape))]

    def is_identity(self) -> bool:
        c = self.scalar_value()
        return c is not None and c == 1

    def to_json(self) -> list:
        return [[self[i, j].to_json() for j in range(self.n_cols)] for i in range(self.n_rows)]

    @classmethod
    def from_json(cls, data) -> "CycMatrix":
        return cls.from_rows([[CycNum.from_json(x) for x in r] for r in data])

    def __repr__(self):
        return f"CycMatrix({self.n_rows}x{self.n_cols}, N={self.N}, nnz={sum(len(r) for r in self.rows)})"

    def pretty(self) -> str:
        def fmt(v: CycNum) -> str:
            if v.is_zero():
                return "0"
            try:
                k, M = v.root_exponent()
                names = {(0, 1): "1", (1, 2): "-1", (1, 4): "i", (3, 4): "-i"}
                return names.get((k, M), f"z{M}^{k}")
            except NotRootOfUnity:
                return repr(v)[7:-1]

        cells = [[fmt(self[i, j]) for j in range(self.n_cols)] for i in range(self.n_rows)]
        w = max((len(c) for r in cells for c in r), default=1)
        return "\n".join("[" + " ".join(c.rjust(w) for c in r) + "]" for r in cells)


def commutator(A: CycMatrix, B: CycMatrix) -> CycMatrix:
    """A B A^-1 B^-1."""
    return A @ B @ A.inverse() @ B.inverse()


# --- weight decompositions and permutation matrices ---------------------------


@dataclass(frozen=True, eq=False)
class WeightDecomposition:
    """Standard basis split into consecutive weight blocks.

    ``dual`` is the group of characters (it must offer add/neg); blocks are
    (character, dimension, start index) sorted by character.
    """

    delta: object
    dual: object
    blocks: tuple
    sign_normalized: bool = False

    @classmethod
    def from_dims(cls, delta, dual, dims: dict, sign_normalized: bool = False) -> "WeightDecomposition":
        blocks = []
        start = 0
        for ch in sorted(dims):
            d = dims[ch]
            if d > 0:
                blocks.append((ch, d, start))
                start += d
        return cls(delta, dual, tuple(blocks), sign_normalized)

    @property
    def n(self) -> int:
        return sum(b[1] for b in self.blocks)

    @property
    def weights(self) -> list:
        return [b[0] for b in self.blocks]

    def dims(self) -> dict:
        return {b[0]: b[1] for b in self.blocks}

    def dim(self, ch) -> int:
        for c, d, _ in self.blocks:
            if c == ch:
                return d
        return 0

    def range_of(self, ch) -> range:
        for c, d, s in self.blocks:
            if c == ch:
                return range(s, s + d)
        raise KeyError(ch)

    def weight_of_index(self, i: int):
        for c, d, s in self.blocks:
            if s <= i < s + d:
                return c
        raise IndexError(i)


@dataclass(frozen=True, eq=False)
class PermMatrixStruct:
    p_image: object
    block_maps: tuple  # (source, target, block)
    scalar_blocks: tuple  # per block: CycNum if scalar else None

    @property
    def all_scalar(self) -> bool:
        return all(c is not None for c in self.scalar_blocks)

    def block_for(self, source):
        for s, t, b in self.block_maps:
            if s == source:
                return t, b
        raise KeyError(source)


def analyze_permutation_matrix(M: CycMatrix, W: WeightDecomposition) -> PermMatrixStruct:
    if M.shape != (W.n, W.n):
        raise ShapeMismatch("matrix does not match the weight decomposition")
    owner = [None] * W.n
    for c, d, s in W.blocks:
        for i in range(s, s + d):
            owner[i] = c
    # target block of each source block, read from the columns
    targets: dict = {}
    for i, r in enumerate(M.rows):
        for j in r:
            src, tgt = owner[j], owner[i]
            prev = targets.setdefault(src, tgt)
            if prev != tgt:
                raise NotPermutation(f"columns of weight {src} reach weights {prev} and {tgt}")
    shift = None
    maps = []
    scal = []
    for c, d, s in W.blocks:
        if c not in targets:
            raise NotPermutation(f"weight space {c} is sent to zero")
        t = targets[c]
        p = W.dual.add(t, W.dual.neg(c))
        if shift is None:
            shift = p
        elif p != shift:
            raise InconsistentShift(f"block shifts {shift} and {p} disagree")
        rt = W.range_of(t)
        if len(rt) != d:
            raise NotPermutation(f"weight spaces {c} and {t} have different dimensions")
        blk = M.block(rt, range(s, s + d))
        try:
            blk.det().inverse()
        except ZeroDivisionError:
            raise NotPermutation(f"block {c} -> {t} is not invertible") from None
        maps.append((c, t, blk))
        scal.append(blk.scalar_value())
    if shift is None:
        shift = W.dual.zero
    return PermMatrixStruct(shift, tuple(maps), tuple(scal))


# --- symplectic structure -----------------------------------------------------


@lru_cache(maxsize=None)
def standard_J(n: int) -> CycMatrix:
    """(0, I_n; -I_n, 0)."""
    rows = [{n + i: CycNum.rational(1)} for i in range(n)] + [{i: CycNum.rational(-1)} for i in range(n)]
    return CycMatrix._raw(2 * n, 2 * n, 1, rows)


def symplectic_defect(M: CycMatrix) -> CycNum | None:
    """c with M^T J M = c J, or None when no such scalar exists."""
    if M.n_rows != M.n_cols or M.n_rows % 2:
        raise ShapeMismatch("symplectic checks need an even square matrix")
    n = M.n_rows // 2
    J = standard_J(n)
    P = M.transpose() @ J @ M
    c = P[0, n]
    Jc = J.scale(c)
    return c if P == Jc else None


def is_symplectic(M: CycMatrix) -> bool:
    c = symplectic_defect(M)
    return c is not None and c == 1
