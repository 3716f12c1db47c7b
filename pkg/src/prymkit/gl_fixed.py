"""Fixed points for GL(n): representative and admissible triples (l, Delta, s).

A triple consists of a finite abelian group Lambda with an antisymmetric
pairing l, a maximal isotropic subgroup Delta and a map s: Lambda -> GL(n)
such that Int_s is a homomorphism.  Matrices are laid out in Delta-weight
blocks (see ``WeightDecomposition``); every s(lambda) is a block permutation
matrix with scalar blocks.

Convention: s(lambda) sends W_psi onto W_{psi + p(lambda)} with
p(lambda) = -f(lambda) in Delta*, and the pairing is read off as
<lambda, mu> = s(lambda) s(mu) s(lambda)^-1 s(mu)^-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd, lcm

from .abelian import (
    FinAbGroup,
    GuardExceeded,
    IsotropyData,
    NotMaximal,
    Pairing,
    Subgroup,
    enumerate_antisymmetric_pairings,
    find_basis,
    generated_subgroup,
    generated_subgroup_elements,
    isotropy_data,
    maximal_isotropic_subgroups,
    pairing_from_values,
    pairing_orbits,
    whole_group,
)
from .cyclotomic import (
    CycMatrix,
    CycNum,
    NotPermutation,
    InconsistentShift,
    WeightDecomposition,
    analyze_permutation_matrix,
    principal_root,
    root_of_unity,
)
from .extensions import AbelianGroup, GeneratedGroup, MatrixGroupIface, TwistedGroup, cocycle_from_section


class NotHomomorphism(ValueError):
    """Some commutator s(a) s(b) s(a)^-1 s(b)^-1 is not scalar."""


class NotInGTheta(ValueError):
    pass


class NotInSigma(ValueError):
    pass


class NotAdmissible(ValueError):
    pass


class DiagonalizationError(ValueError):
    pass


# --- small helpers ------------------------------------------------------------


def _zeta_pow(e: int, N: int) -> CycNum:
    return root_of_unity(e % N, N)


def scalar_exponent(c: CycNum, N: int) -> int:
    """e with c = zeta_N^e."""
    k, M = c.root_exponent()
    if N % M:
        raise NotHomomorphism(f"commutator value has order {M}, not dividing {N}")
    return k * (N // M) % N


def _commutator_scalar(A, B, Ainv, Binv) -> CycNum | None:
    return (A @ B @ Ainv @ Binv).scalar_value()


def character_from_values(group: FinAbGroup, values) -> tuple:
    """The character with chi(e_i) = zeta_N^{values[i]}."""
    N = group.exponent
    out = []
    for v, d in zip(values, group.invariant_factors):
        step = N // d
        if v % step:
            raise NotInGTheta("character value has the wrong order on a generator")
        out.append((v // step) % d)
    return tuple(out)


def weight_decomposition(iso: IsotropyData, dims: dict) -> WeightDecomposition:
    return WeightDecomposition.from_dims(iso.delta, iso.delta_dual, dims)


def diagonal_image(iso: IsotropyData, W: WeightDecomposition, delta_elem) -> CycMatrix:
    G = iso.group
    N = G.exponent
    entries = []
    for ch, d, _ in W.blocks:
        entries += [_zeta_pow(G.char_eval(ch, delta_elem), N)] * d
    return CycMatrix.diag(entries, N)


# --- triples --------------------------------------------------------------------


@dataclass(eq=False)
class RepTriple:
    group: FinAbGroup
    pairing: Pairing
    delta: Subgroup
    n: int
    s: dict  # every element of Lambda -> CycMatrix
    W: WeightDecomposition
    iso: IsotropyData
    _inv: dict = field(default_factory=dict, repr=False)

    @property
    def f(self) -> dict:
        return self.iso.f

    @property
    def N(self) -> int:
        return self.group.exponent

    def image(self, lam) -> CycMatrix:
        return self.s[self.group.reduce(lam)]

    def image_inv(self, lam) -> CycMatrix:
        lam = self.group.reduce(lam)
        if lam not in self._inv:
            self._inv[lam] = self.s[lam].inverse()
        return self._inv[lam]

    def dims_multiset(self) -> tuple:
        return tuple(sorted(self.W.dims().values()))

    def to_json(self) -> dict:
        return {
            "lambda": list(self.group.invariant_factors),
            "pairing": self.pairing.to_json(),
            "delta": self.delta.to_json(),
            "n": self.n,
            "weights": [[list(c), d] for c, d, _ in self.W.blocks],
            "s": {",".join(map(str, g)): self.image(g).to_json() for g in self.group.generators()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "RepTriple":
        G = FinAbGroup(tuple(data["lambda"]))
        l = Pairing.from_json(G, data["pairing"])
        delta = generated_subgroup(G, [tuple(g) for g in data["delta"]["generators"]])
        iso = isotropy_data(G, l, delta)
        W = weight_decomposition(iso, {tuple(c): d for c, d in data["weights"]})
        gens = {}
        for k, v in data["s"].items():
            key = tuple(int(x) for x in k.split(",")) if k else ()
            gens[key] = CycMatrix.from_json(v)
        s = extend_from_generators(G, [gens[g] for g in G.generators()], W.n)
        return cls(G, l, delta, data["n"], s, W, iso)


class _DiagonalImages(dict):
    """s on Delta = Lambda, filled on first access."""

    def __init__(self, iso, W):
        super().__init__()
        self._iso, self._W = iso, W

    def __missing__(self, key):
        if key not in self._iso.delta:
            raise KeyError(key)
        v = diagonal_image(self._iso, self._W, key)
        self[key] = v
        return v

    def __iter__(self):
        return iter(self._iso.delta.sorted_elements())

    def __len__(self):
        return self._iso.delta.order

    def items(self):
        return [(k, self[k]) for k in self]

    def values(self):
        return [self[k] for k in self]

    def keys(self):
        return list(self)


def extend_from_generators(G: FinAbGroup, images, n: int) -> dict:
    """s(sum a_i e_i) = prod s(e_i)^{a_i}."""
    s = {}
    powers = []
    for A, d in zip(images, G.invariant_factors):
        p = [CycMatrix.identity(n)]
        for _ in range(d - 1):
            p.append(p[-1] @ A)
        powers.append(p)
    for x in G.elements():
        M = CycMatrix.identity(n)
        for i, a in enumerate(x):
            if a:
                M = M @ powers[i][a]
        s[x] = M
    return s


def induced_pairing(s, group: FinAbGroup) -> Pairing:
    """The pairing <e_i, e_j> read off from the commutators of the generator images."""
    get = s.__getitem__ if isinstance(s, dict) else s
    gens = group.generators()
    imgs = [get(g) for g in gens]
    invs = [A.inverse() for A in imgs]
    N = group.exponent
    k = len(gens)
    vals = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            c = _commutator_scalar(imgs[i], imgs[j], invs[i], invs[j])
            if c is None:
                raise NotHomomorphism(f"commutator of s(e{i}) and s(e{j}) is not scalar")
            vals[i][j] = scalar_exponent(c, N)
    for i in range(k):
        for j in range(i):
            if (vals[i][j] + vals[j][i]) % N:
                raise NotHomomorphism("commutator values are not antisymmetric")
    return pairing_from_values(group, vals)


@dataclass
class ClauseReport:
    ok: bool
    failed: list  # clause numbers 1..4
    messages: list

    def __bool__(self):
        return self.ok


def check_representative_triple(t: RepTriple, exhaustive: bool = True) -> ClauseReport:
    """Check the four defining clauses exactly; ``exhaustive`` tests all pairs."""
    G, iso, W = t.group, t.iso, t.W
    failed, msgs = [], []
    elems = G.elements()
    pairs_src = elems if exhaustive else G.generators()
    # (1) s|Delta is a homomorphism into diagonal matrices
    ok1 = True
    d_elems = t.delta.sorted_elements()
    for a in d_elems:
        if not t.image(a).is_diagonal():
            ok1, m = False, f"s({a}) is not diagonal"
            break
    else:
        if not t.image(G.zero).is_identity():
            ok1, m = False, "s(0) is not the identity"
        for a, b in itertools.product(d_elems, repeat=2):
            if not ok1:
                break
            if t.image(a) @ t.image(b) != t.image(G.add(a, b)):
                ok1, m = False, f"s({a}) s({b}) != s({a}+{b})"
    if not ok1:
        failed.append(1)
        msgs.append(m)
    # (2) Int_s is a homomorphism
    ok2 = True
    for a in pairs_src:
        for b in elems:
            P = t.image(a) @ t.image(b) @ t.image_inv(G.add(a, b))
            if P.scalar_value() is None:
                ok2 = False
                msgs.append(f"s({a}) s({b}) s({a}+{b})^-1 is not scalar")
                break
        if not ok2:
            break
    if not ok2:
        failed.append(2)
    # (3) induced pairing equals l
    ok3 = True
    N = t.N
    for a in pairs_src:
        for b in elems:
            c = _commutator_scalar(t.image(a), t.image(b), t.image_inv(a), t.image_inv(b))
            if c is None or scalar_exponent_safe(c, N) != t.pairing(a, b):
                ok3 = False
                msgs.append(f"commutator of s({a}), s({b}) does not match the pairing")
                break
        if not ok3:
            break
    if not ok3:
        failed.append(3)
    # (4) permutation matrices with scalar blocks and the prescribed shift
    ok4 = True
    Dd = iso.delta_dual
    for a in elems:
        try:
            st = analyze_permutation_matrix(t.image(a), W)
        except (NotPermutation, InconsistentShift) as exc:
            ok4 = False
            msgs.append(f"s({a}): {exc}")
            break
        if not st.all_scalar:
            ok4 = False
            msgs.append(f"s({a}) has a non-scalar block")
            break
        if st.p_image != Dd.neg(iso.f_of(a)):
            ok4 = False
            msgs.append(f"s({a}) shifts weights by {st.p_image}, expected {Dd.neg(iso.f_of(a))}")
            break
    if not ok4:
        failed.append(4)
    return ClauseReport(not failed, failed, msgs)


def scalar_exponent_safe(c: CycNum, N: int):
    try:
        return scalar_exponent(c, N)
    except NotHomomorphism:
        return None


# --- c_theta, Sigma_theta, M^gamma ---------------------------------------------------


def c_theta(g: CycMatrix, t: RepTriple, g_inv: CycMatrix | None = None) -> tuple:
    """The character lambda -> s(lambda) g s(lambda)^-1 g^-1 of Lambda."""
    G = t.group
    gi = g.inverse() if g_inv is None else g_inv
    vals = []
    for e in G.generators():
        c = _commutator_scalar(t.image(e), g, t.image_inv(e), gi)
        if c is None:
            raise NotInGTheta(f"s({e}) g s({e})^-1 g^-1 is not scalar")
        vals.append(scalar_exponent(c, t.N))
    return character_from_values(G, vals)


def in_g_theta(g: CycMatrix, t: RepTriple) -> bool:
    """Membership in the centralizer of s(Lambda)."""
    for e in t.group.generators():
        if t.image(e) @ g != g @ t.image(e):
            return False
    return True


def sigma_theta(t: RepTriple) -> Subgroup:
    """Characters whose restriction to Delta preserves the weight set and dimensions."""
    Dd = t.iso.delta_dual
    dims = t.W.dims()
    keep = []
    for gam in t.group.dual().elements():
        g = Dd.rep_of(gam)
        if all(dims.get(Dd.add(w, g), 0) == d for w, d in dims.items()):
            keep.append(gam)
    return generated_subgroup(t.group.dual(), keep)


def _orbit_reps(Dd, weights, fH) -> dict:
    """weight -> lex-min weight of its orbit under translation by fH."""
    rep = {}
    for w in sorted(weights):
        if w in rep:
            continue
        orbit = sorted({Dd.add(w, h) for h in fH})
        for x in orbit:
            rep[x] = orbit[0]
    return rep


def _m_gamma(iso, W, s, domain_q, gamma_fn, g_delta, N) -> CycMatrix:
    """The block permutation matrix M^gamma relative to s on kappa^-1(domain_q).

    ``gamma_fn(lam)`` is the exponent of gamma(lam) as a power of zeta_N and
    ``g_delta`` the restriction of gamma to Delta.
    """
    Dd = iso.delta_dual
    dims = W.dims()
    partner = {}
    for w, d in dims.items():
        tgt = Dd.add(w, g_delta)
        if dims.get(tgt, 0) != d:
            raise NotInSigma(f"weight {w} has no partner of equal dimension at {tgt}")
        partner[w] = tgt
    fH = {iso.f[h]: h for h in domain_q}
    orbit_rep = _orbit_reps(Dd, dims, fH)
    rows = [dict() for _ in range(W.n)]
    for w in sorted(dims):
        tgt = partner[w]
        base = orbit_rep[w]
        # lambda with p(lambda) = w - base, i.e. f(lambda) = base - w
        lam = fH.get(Dd.add(base, Dd.neg(w)))
        if lam is None:
            raise NotInSigma("weight not reachable inside its orbit")
        A = s[lam]
        r_w, r_b = W.range_of(w), W.range_of(base)
        r_tw, r_tb = W.range_of(tgt), W.range_of(Dd.add(base, g_delta))
        blk1 = A.block(r_tw, r_tb)
        blk0 = A.block(r_w, r_b)
        c1, c0 = blk1.scalar_value(), blk0.scalar_value()
        if c1 is None or c0 is None:
            raise NotPermutation("s has a non-scalar block")
        coef = c1 * c0.inverse() * _zeta_pow(-gamma_fn(lam), N)
        for i, j in zip(r_tw, r_w):
            rows[i][j] = coef
    return CycMatrix(W.n, W.n, rows)


def build_M_gamma(t: RepTriple, gamma) -> CycMatrix:
    """M^gamma with s(lambda) M s(lambda)^-1 = gamma(lambda) M for all lambda."""
    G = t.group
    gamma = G.reduce(gamma)
    if gamma not in sigma_theta(t):
        raise NotInSigma(f"{gamma} is not in Sigma_theta")
    return _m_gamma_full(t, gamma)


def _m_gamma_full(t: RepTriple, gamma) -> CycMatrix:
    G = t.group
    g_delta = t.iso.delta_dual.rep_of(gamma)
    return _m_gamma(t.iso, t.W, t.s, t.iso.quotient.elements(), lambda x: G.char_eval(gamma, x), g_delta, t.N)


def check_defining_relation(t: RepTriple, gamma, M: CycMatrix) -> bool:
    G = t.group
    N = t.N
    for lam in G.elements():
        lhs = t.image(lam) @ M @ t.image_inv(lam)
        if lhs != M.scale(_zeta_pow(G.char_eval(gamma, lam), N)):
            return False
    return True


def is_admissible_by_weights(t: RepTriple) -> bool:
    dims = t.W.dims()
    return set(dims) == set(t.iso.delta_dual.elements()) and len(set(dims.values())) == 1


def g_theta_generators(t: RepTriple, limit: int | None = None) -> list:
    """A generating set of the block group G^theta (unipotents and a scaling per block slot)."""
    Dd = t.iso.delta_dual
    dims = t.W.dims()
    fL = t.iso.f_image()
    reps = _orbit_reps(Dd, dims, fL)
    n = t.W.n
    N = t.N
    gens = []
    for O in sorted(set(reps.values())):
        members = [w for w in sorted(dims) if reps[w] == O]
        m = dims[O]
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                rows = [{k: CycNum.rational(1, N)} for k in range(n)]
                for w in members:
                    st = W_start(t.W, w)
                    rows[st + i][st + j] = CycNum.rational(1, N)
                gens.append(CycMatrix(n, n, rows))
            rows = [{k: CycNum.rational(1, N)} for k in range(n)]
            for w in members:
                st = W_start(t.W, w)
                rows[st + i] = {st + i: CycNum.rational(2, N)}
            gens.append(CycMatrix(n, n, rows))
            if limit is not None and len(gens) >= limit:
                return gens
    return gens


def W_start(W: WeightDecomposition, w) -> int:
    return W.range_of(w).start


def c_theta_image(t: RepTriple) -> Subgroup:
    """Image of c_theta on the group generated by G^theta generators and every M^gamma that exists.

    Construction of M^gamma is attempted for every character; no Sigma_theta
    test is applied, so this is independent of ``is_admissible_by_weights``.
    """
    G = t.group
    D = G.dual()
    found = []
    span = {D.zero}
    for g in g_theta_generators(t, limit=1):
        chi = c_theta(g, t)
        if chi not in span:
            found.append(chi)
            span = generated_subgroup_elements(D, found)
    target = D.order
    for gam in D.elements():
        if len(span) == target:
            break
        if gam in span:
            continue
        try:
            M = _m_gamma_full(t, gam)
        except (NotInSigma, NotPermutation):
            continue
        chi = c_theta(M, t, M.inverse())
        if chi not in span:
            found.append(chi)
            span = generated_subgroup_elements(D, found)
    return Subgroup(D, tuple(found), frozenset(span))


@dataclass
class AdmissibilityReport:
    by_weights: bool
    by_c_theta: bool

    @property
    def agree(self) -> bool:
        return self.by_weights == self.by_c_theta

    def __bool__(self):
        return self.by_weights


def is_admissible(t: RepTriple, cross_check: bool = True) -> AdmissibilityReport:
    w = is_admissible_by_weights(t)
    if not cross_check:
        return AdmissibilityReport(w, w)
    img = c_theta_image(t)
    return AdmissibilityReport(w, img.order == t.group.order)


# --- construction ---------------------------------------------------------------------


def triple_from_profile(group: FinAbGroup, l: Pairing, delta: Subgroup, dims: dict,
                        basis=None, iso: IsotropyData | None = None) -> RepTriple:
    """A representative triple with s|Delta diagonal of weight dimensions ``dims``.

    The weight profile must be stable under translation by f(Lambda/Delta) with
    constant dimensions on orbits.  s is extended one generator of Lambda/Delta
    at a time: s(lambda) = M^gamma d with d a correction constant on orbits.
    ``basis`` overrides the representatives of the chosen generators of
    Lambda/Delta.
    """
    if iso is None:
        iso = isotropy_data(group, l, delta)
    Dd = iso.delta_dual
    dims = {Dd.rep_of(k): v for k, v in dims.items() if v}
    fL = iso.f_image()
    for w, d in dims.items():
        for h in fL:
            if dims.get(Dd.add(w, h), 0) != d:
                raise NotAdmissible("weight profile is not stable under f(Lambda/Delta)")
    W = weight_decomposition(iso, dims)
    n = W.n
    N = group.exponent
    Q = iso.quotient
    gens = basis if basis is not None else find_basis(Q)
    if not gens:
        return RepTriple(group, l, delta, n, _DiagonalImages(iso, W), W, iso)
    s = {x: diagonal_image(iso, W, x) for x in delta.sorted_elements()}
    domain_q = [Q.zero]
    for lam in gens:
        lam = group.reduce(lam)
        lam_bar = Q.rep_of(lam)
        r = Q.element_order(lam_bar)
        gamma_char = group.neg(l.image(lam))  # x -> <x, lam>
        g_delta = Dd.rep_of(gamma_char)
        M = _m_gamma(iso, W, s, domain_q, lambda x: group.char_eval(gamma_char, x), g_delta, N)
        # correction d, constant on orbits of Delta* under f(H)
        fH = [iso.f[h] for h in domain_q]
        reps = _orbit_reps(Dd, dims, fH)
        target = s[group.reduce(group.scale(lam, r))]
        X = (M ** r) @ target.inverse()
        rho = 1
        while Dd.scale(g_delta, rho) not in set(fH):
            rho += 1
        entries = [CycNum.rational(1, N)] * n
        seen = set()
        for O in sorted(set(reps.values())):
            if O in seen:
                continue
            cycle, cur = [], O
            while reps[cur] not in cycle:
                cycle.append(reps[cur])
                cur = Dd.add(cur, g_delta)
            seen.update(cycle)
            x = X[W.range_of(O).start, W.range_of(O).start]
            dval = principal_root(x.inverse(), r // rho)
            for w in dims:
                if reps[w] == O:
                    for i in W.range_of(w):
                        entries[i] = dval
        S = M @ CycMatrix.diag(entries)
        powers = [CycMatrix.identity(n, N)]
        for _ in range(r - 1):
            powers.append(powers[-1] @ S)
        old = dict(s)
        for h, A in old.items():
            for j in range(1, r):
                s[group.add(h, group.scale(lam, j))] = A @ powers[j]
        domain_q = sorted({Q.rep_of(x) for x in s})
    return RepTriple(group, l, delta, n, s, W, iso)


def construct_admissible_s(group: FinAbGroup, l: Pairing, delta: Subgroup, n: int,
                           basis=None) -> RepTriple:
    """An admissible triple: all weights of Delta* with multiplicity n/|Delta|."""
    if n % delta.order:
        raise NotAdmissible(f"|Delta| = {delta.order} does not divide n = {n}")
    iso = isotropy_data(group, l, delta)
    m = n // delta.order
    return triple_from_profile(group, l, delta, {w: m for w in iso.delta_dual.elements()}, basis)


# --- normalization of arbitrary input -----------------------------------------------------


def _column_basis(P: CycMatrix) -> list:
    """Indices of a maximal set of independent columns (by elimination)."""
    rows = [[P[i, j] for j in range(P.n_cols)] for i in range(P.n_rows)]
    pivots = []
    r = 0
    for c in range(P.n_cols):
        piv = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                k = rows[i][c]
                rows[i] = [a - k * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def normalize_to_representative(group: FinAbGroup, raw, delta: Subgroup | None = None):
    """Conjugate a map s (dict on elements, or list of generator images) into representative form.

    Returns (triple, g) with g raw(lambda) g^-1 equal to triple.s(lambda) up to a
    scalar for every lambda.
    """
    if isinstance(raw, (list, tuple)):
        n = raw[0].n_rows
        sraw = extend_from_generators(group, list(raw), n)
    else:
        sraw = {group.reduce(k): v for k, v in raw.items()}
        n = next(iter(sraw.values())).n_rows
    l = induced_pairing(sraw, group)
    if delta is None:
        delta = maximal_isotropic_subgroups(group, l)[0]
    iso = isotropy_data(group, l, delta)
    Dd = iso.delta_dual
    N = group.exponent
    # rescale s on a basis of Delta so that s|Delta is a homomorphism
    dbasis = find_basis(_SubAsGroup(group, delta)) if delta.order > 1 else []
    sd_gens = []
    for b in dbasis:
        r = group.element_order(b)
        A = sraw[b]
        c = (A ** r).scalar_value()
        if c is None:
            raise DiagonalizationError(f"s({b})^{r} is not scalar")
        u = principal_root(c, r)
        sd_gens.append(A.scale(u.inverse()))
    sd = {}
    for coeffs in itertools.product(*[range(group.element_order(b)) for b in dbasis]):
        x = group.zero
        M = CycMatrix.identity(n, N)
        for b, k, A in zip(dbasis, coeffs, sd_gens):
            x = group.add(x, group.scale(b, k))
            M = M @ (A ** k)
        sd[x] = M
    # character projectors onto the weight spaces
    inv_order = CycNum.rational(1, 1) / delta.order
    cols = []
    dims = {}
    for psi in Dd.elements():
        P = CycMatrix.zeros(n, n, N)
        for x, A in sd.items():
            P = P + A.scale(_zeta_pow(-group.char_eval(psi, x), N))
        P = P.scale(inv_order)
        idx = _column_basis(P)
        if idx:
            dims[psi] = len(idx)
            cols.append((psi, [[P[i, j] for i in range(n)] for j in idx]))
    if sum(dims.values()) != n:
        raise DiagonalizationError("weight spaces do not span: s(Delta) is not simultaneously diagonalizable")
    # shift weights so the trivial character occurs
    shift = min(dims)
    dims = {Dd.add(w, Dd.neg(shift)): d for w, d in dims.items()}
    cols = [(Dd.add(w, Dd.neg(shift)), c) for w, c in cols]
    cols.sort()
    basis_cols = [v for _, c in cols for v in c]
    C = CycMatrix.from_rows([[basis_cols[j][i] for j in range(n)] for i in range(n)])
    Cinv = C.inverse()
    W = weight_decomposition(iso, dims)
    s1 = {}
    for x in group.elements():
        A = sd[x] if x in sd else sraw[x]
        if x in sd:
            A = A.scale(_zeta_pow(-group.char_eval(shift, x), N))
        s1[x] = Cinv @ A @ C
    # the Delta-matrix S making every block scalar
    fmap = {iso.f[q]: q for q in iso.quotient.elements()}
    reps = _orbit_reps(Dd, dims, list(fmap))
    blocks = {}
    for w in dims:
        base = reps[w]
        lam = fmap[Dd.add(base, Dd.neg(w))]
        blk = s1[lam].block(W.range_of(w), W.range_of(base))
        blocks[w] = blk.inverse() if lam != group.zero else CycMatrix.identity(dims[w], N)
    S = CycMatrix.block_diag([blocks[w] for w in W.weights])
    Sinv = S.inverse()
    s2 = {x: S @ A @ Sinv for x, A in s1.items()}
    g = S @ Cinv
    return RepTriple(group, l, delta, n, s2, W, iso), g


@dataclass(frozen=True, eq=False)
class _SubAsGroup:
    """A subgroup viewed as a group for basis searches."""

    parent: FinAbGroup
    sub: Subgroup

    @property
    def zero(self):
        return self.parent.zero

    def add(self, x, y):
        return self.parent.add(x, y)

    def neg(self, x):
        return self.parent.neg(x)

    def elements(self):
        return self.sub.sorted_elements()

    def element_order(self, x):
        return self.parent.element_order(x)

    def scale(self, x, k):
        return self.parent.scale(x, k)

    @property
    def order(self):
        return self.sub.order


def verify_conjugation(raw: dict, t: RepTriple, g: CycMatrix) -> bool:
    gi = g.inverse()
    for x, A in raw.items():
        B = g @ A @ gi
        c = t.image(x)
        ratio = None
        for i, r in enumerate(c.rows):
            for j, v in r.items():
                ratio = B[i, j] / v
                break
            if ratio is not None:
                break
        if ratio is None or B != c.scale(ratio):
            return False
    return True


# --- classes ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ThetaClassGL:
    canonical: tuple
    witness: RepTriple = field(compare=False)

    def __eq__(self, other):
        return isinstance(other, ThetaClassGL) and self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)


def theta_class(t: RepTriple) -> ThetaClassGL:
    if not is_admissible_by_weights(t):
        raise NotAdmissible("theta classes are keyed only for admissible triples")
    canon = (t.group.invariant_factors, t.pairing.matrix, t.n, t.dims_multiset())
    return ThetaClassGL(canon, t)


def _roots(M: int) -> list:
    return [root_of_unity(k, M) for k in range(M)]


def monomial_conjugator_search(t1: RepTriple, t2: RepTriple, guard: int = 10 ** 6):
    """Search g = (permutation) x (diagonal of roots of unity) with g s1 g^-1 ~ s2 on generators."""
    n = t1.n
    if t2.n != n or t1.group != t2.group:
        return None
    gens = t1.group.generators()
    A = [t1.image(e) for e in gens]
    B = [t2.image(e) for e in gens]
    M = 2 * lcm(t1.N, *(X.N for X in A + B))
    roots = _roots(M)
    if len(roots) ** (n - 1) * 24 > guard:
        raise GuardExceeded("monomial search space too large")
    for perm in itertools.permutations(range(n)):
        P = CycMatrix.monomial(perm, [CycNum.rational(1)] * n)
        Pinv = P.inverse()
        conj = [P @ X @ Pinv for X in A]
        if any(_pattern(C) != _pattern(Y) for C, Y in zip(conj, B)):
            continue
        for ds in itertools.product(roots, repeat=n - 1):
            D = CycMatrix.diag([CycNum.rational(1)] + list(ds))
            Dinv = D.inverse()
            good = True
            for C, Y in zip(conj, B):
                Z = D @ C @ Dinv
                ratio = _first_ratio(Z, Y)
                if Z != Y.scale(ratio):
                    good = False
                    break
            if good:
                return D @ P
    return None


def _pattern(X: CycMatrix) -> set:
    return {(i, j) for i, r in enumerate(X.rows) for j in r}


def _first_ratio(Z: CycMatrix, Y: CycMatrix) -> CycNum:
    for i, r in enumerate(Y.rows):
        for j, v in r.items():
            return Z[i, j] / v
    return CycNum.rational(1)


# --- block group, tau and the twisted product -------------------------------------------------


@dataclass(eq=False)
class BlockGroupData:
    labels: list  # orbit representatives in Delta*
    block_dims: dict
    tau: dict  # gamma -> {label: label}
    phi: dict  # gamma -> M^gamma
    g0_generators: list
    in_g0: object
    cocycle: object = None
    section_data: object = None


def block_group_and_tau(t: RepTriple, section=None, with_cocycle: bool = True) -> BlockGroupData:
    """G^theta as blocks indexed by Delta*/f(Lambda/Delta), tau and a section phi."""
    if not is_admissible_by_weights(t):
        raise NotAdmissible("block data is defined for admissible triples")
    Dd = t.iso.delta_dual
    dims = t.W.dims()
    reps = _orbit_reps(Dd, dims, t.iso.f_image())
    labels = sorted(set(reps.values()))
    D = t.group.dual()
    tau = {}
    phi = {}
    for gam in D.elements():
        g = Dd.rep_of(gam)
        tau[gam] = {O: reps[Dd.add(O, g)] for O in labels}
        phi[gam] = _m_gamma_full(t, gam) if section is None else section[gam]
        if gam == D.zero and section is None:
            phi[gam] = CycMatrix.identity(t.n, t.N)
    gens = g_theta_generators(t)
    data = BlockGroupData(labels, {O: dims[O] for O in labels}, tau, phi, gens, lambda g: in_g_theta(g, t))
    if with_cocycle:
        data.section_data = cocycle_from_section(MatrixGroupIface(t.n), AbelianGroup(D), phi, gens, data.in_g0)
        data.cocycle = data.section_data.cocycle
    return data


def finite_block_model(t: RepTriple, root_order: int | None = None, guard: int = 2000):
    """A finite tau-stable subgroup G0 of G^theta and the twisted group G0 x_(tau,c) Lambda*.

    G0 is generated by the cocycle values and, on every orbit slot, a root of
    unity scaling and the slot transpositions.  Returns (T, data, generators).
    """
    data = block_group_and_tau(t)
    k = root_order or t.N
    Dd = t.iso.delta_dual
    dims = t.W.dims()
    reps = _orbit_reps(Dd, dims, t.iso.f_image())
    n, N = t.n, lcm(t.N, k)
    z = root_of_unity(1, k)
    gens = []
    for O in data.labels:
        members = [w for w in sorted(dims) if reps[w] == O]
        m = dims[O]
        for i in range(m):
            d = [CycNum.rational(1)] * n
            for w in members:
                d[W_start(t.W, w) + i] = z
            gens.append(CycMatrix.diag(d, N))
        for i in range(m - 1):
            perm = list(range(n))
            for w in members:
                st = W_start(t.W, w)
                perm[st + i], perm[st + i + 1] = st + i + 1, st + i
            gens.append(CycMatrix.monomial(perm, [CycNum.rational(1)] * n, N))
    values = sorted(set(data.cocycle.table.values()), key=repr)
    tau = data.section_data.tau
    gens = list(dict.fromkeys(gens + [v for v in values if not v.is_identity()]))
    # close under tau on generators
    while True:
        extra = [tau(a, g) for a in data.phi for g in gens]
        new = [g for g in dict.fromkeys(extra) if g not in gens]
        if not new:
            break
        gens += new
    G0 = GeneratedGroup(gens, lambda a, b: a @ b, lambda a: a.inverse(), CycMatrix.identity(n, N), guard)
    G0.elements()
    T = TwistedGroup(G0, data.cocycle.gamma, tau, data.cocycle)
    return T, data, gens


def in_center_of_g_theta(z: CycMatrix, t: RepTriple) -> bool:
    """A Delta-matrix, scalar on every block and constant on f(Lambda/Delta)-orbits."""
    if not z.is_diagonal() or not in_g_theta(z, t):
        return False
    Dd = t.iso.delta_dual
    dims = t.W.dims()
    reps = _orbit_reps(Dd, dims, t.iso.f_image())
    diag = z.diagonal()
    val = {}
    for w in dims:
        for i in t.W.range_of(w):
            if val.setdefault(reps[w], diag[i]) != diag[i]:
                return False
    return True


# --- census ------------------------------------------------------------------------------------


def sl_flag(group: FinAbGroup, n: int) -> bool:
    """Fixed points with trivial determinant need Lambda inside the n-torsion."""
    return n % group.exponent == 0


def enumerate_components_gl(n: int, group: FinAbGroup, dedup_aut: bool = False, guard: int = 256,
                            verify: bool = True, select=None) -> list[dict]:
    """One row per pairing; ``select(i)`` restricts to the i-th pairing in sorted order."""
    if group.order > guard:
        raise GuardExceeded(f"|Lambda| = {group.order} exceeds guard {guard}")
    pairings = enumerate_antisymmetric_pairings(group, guard=guard)
    if dedup_aut:
        classes = [sorted(orb, key=lambda p: p.matrix) for orb in pairing_orbits(group, pairings)]
        chosen = [(c[0], len(c)) for c in classes]
    else:
        chosen = [(p, 1) for p in pairings]
    rows = []
    for idx, (l, mult) in enumerate(sorted(chosen, key=lambda pc: pc[0].matrix)):
        if select is not None and not select(idx):
            continue
        deltas = maximal_isotropic_subgroups(group, l, guard=guard)
        delta = deltas[0]
        adm = n % delta.order == 0
        iso = isotropy_data(group, l, delta)
        row = {
            "pairing": [list(r) for r in l.matrix],
            "pairing_upper": list(l.upper()),
            "orbit_size": mult,
            "delta": [list(g) for g in delta.generators],
            "delta_order": delta.order,
            "num_maximal_isotropic": len(deltas),
            "admissible": adm,
            "cover_group": list(iso.delta_dual.invariant_factors),
            "rank": n // delta.order if adm else None,
            "sl_flag": sl_flag(group, n),
            "theta_class": None,
            "witness": None,
            "checks": [],
        }
        if adm:
            t = construct_admissible_s(group, l, delta, n)
            cls = theta_class(t)
            row["theta_class"] = {"pairing": [list(r) for r in l.matrix], "dims": list(cls.canonical[3])}
            row["witness"] = t.to_json()
            if verify:
                rep = check_representative_triple(t, exhaustive=group.order <= 16)
                a = is_admissible(t)
                row["checks"] = {
                    "representative_triple": bool(rep),
                    "admissible_by_weights": a.by_weights,
                    "admissible_by_c_theta": a.by_c_theta,
                    "induced_pairing_roundtrip": induced_pairing(t.s, group) == l,
                }
        rows.append(row)
    return rows


# --- the cyclic example -------------------------------------------------------------------------


def cyclic_model(r: int, m: int):
    """M = diag(zeta^k I_m) and the cyclic block shift S acting on C^{rm}."""
    n = r * m
    M = CycMatrix.diag([root_of_unity(k, r) for k in range(r) for _ in range(m)], r)
    # S sends block k to block k-1, so that S M S^-1 = zeta M
    perm = [((i // m - 1) % r) * m + i % m for i in range(n)]
    S = CycMatrix.monomial(perm, [CycNum.rational(1, r)] * n)
    return M, S


# --- exhaustive sweep over weight profiles -----------------------------------------------------


def abelian_groups_up_to(order: int) -> list[FinAbGroup]:
    """Every finite abelian group of order <= ``order``, by invariant factors."""
    out = []

    def chains(n, smallest):
        # invariant factor chains d1 | d2 | ... with product n, d1 >= smallest
        if n == 1:
            yield ()
            return
        for d in range(max(2, smallest), n + 1):
            if n % d:
                continue
            for rest in chains(n // d, d):
                if not rest or rest[0] % d == 0:
                    yield (d,) + rest

    for n in range(1, order + 1):
        for c in chains(n, 2):
            out.append(FinAbGroup(c))
    return out


def weight_profiles(iso: IsotropyData, max_n: int) -> list[dict]:
    """f-stable weight profiles with total dimension <= max_n, one per Delta*-translation class.

    A profile is a dimension per orbit of Delta* under f(Lambda/Delta).  The
    representative of a translation class is the lexicographically largest
    dimension vector among its translates; it has the trivial orbit in its
    support.
    """
    Dd = iso.delta_dual
    fL = iso.f_image()
    reps = _orbit_reps(Dd, Dd.elements(), fL)
    orbits = sorted(set(reps.values()))
    pos = {O: i for i, O in enumerate(orbits)}
    k = len(orbits)
    # shift[t][i]: index of orbit i translated by -orbit t
    shift = [[pos[reps[Dd.add(O, Dd.neg(T))]] for O in orbits] for T in orbits]
    members = {O: [w for w in Dd.elements() if reps[w] == O] for O in orbits}
    budget = max_n // len(fL)
    out = []
    vec = [0] * k

    def canonical():
        key = tuple(vec)
        for t in range(1, k):
            if vec[t]:
                moved = [0] * k
                for i, j in enumerate(shift[t]):
                    moved[j] = vec[i]
                if tuple(moved) > key:
                    return False
        return True

    def rec(i, left):
        if i == k:
            if canonical():
                out.append({w: d for O, d in zip(orbits, vec) for w in members[O] if d})
            return
        for d in range(left + 1):
            if i == 0 and d == 0:
                continue
            vec[i] = d
            rec(i + 1, left - d)
        vec[i] = 0

    if budget and k:
        rec(0, budget)
    return out


@dataclass
class SweepResult:
    profiles: int = 0
    admissible: int = 0
    disagreements: list = field(default_factory=list)
    admissible_triples: list = field(default_factory=list)


def admissibility_sweep(max_order: int = 16, max_n: int = 8, keep_admissible: bool = True,
                        groups=None) -> SweepResult:
    """is_admissible against the c_theta image for every group, pairing, Delta and profile."""
    res = SweepResult()
    for G in groups or abelian_groups_up_to(max_order):
        for l in enumerate_antisymmetric_pairings(G):
            for D in maximal_isotropic_subgroups(G, l):
                iso = isotropy_data(G, l, D)
                for prof in weight_profiles(iso, max_n):
                    t = triple_from_profile(G, l, D, prof, iso=iso)
                    a = is_admissible(t)
                    res.profiles += 1
                    if not a.agree:
                        res.disagreements.append((G.invariant_factors, l.matrix, D.generators, prof, a))
                    if a.by_weights:
                        res.admissible += 1
                        if keep_admissible:
                            res.admissible_triples.append(t)
    return res


def relation_and_centrality_checks(t: RepTriple) -> list:
    """Failures of the defining relation and of the closing centrality property."""
    bad = []
    D = t.group.dual()
    Ms = {}
    for gam in D.elements():
        M = _m_gamma_full(t, gam)
        if c_theta(M, t) != gam or not check_defining_relation(t, gam, M):
            bad.append(("relation", gam))
        Ms[gam] = M
    for a in D.elements():
        for b in D.elements():
            z = Ms[a] @ Ms[b] @ Ms[D.add(a, b)].inverse()
            if not in_center_of_g_theta(z, t):
                bad.append(("center", a, b))
    return bad
