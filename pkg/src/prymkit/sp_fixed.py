"""Fixed points for Sp(2n): representative and admissible quadruples (l, Delta, q, s).

Here Lambda has exponent 2.  The symplectic form is J = (0, I; -I, 0) and
coordinates i and n + i are paired.  Every Delta-weight space occupies
mirrored index ranges:

* q trivial: each weight psi owns a top range R and the bottom range R + n,
  and W_psi is symplectic;
* q nontrivial: the top half carries the weights T = {psi : psi(delta_q) = -1}
  and position i + n carries the weight of position i shifted by q, so W_psi
  and W_{psi q} are isotropic and dual to each other.

Weights are sign-normalized: s(delta) acts on W_psi by psi(delta) when
q(delta) = 1 and by -i psi(delta) when q(delta) = -1.  With this choice the
element delta_q acts by diag(i I, -i I).
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from dataclasses import dataclass, field

from .abelian import (
    FinAbGroup,
    GuardExceeded,
    IsotropyData,
    Pairing,
    Subgroup,
    enumerate_antisymmetric_pairings,
    find_basis,
    generated_subgroup,
    generated_subgroup_elements,
    isotropy_data,
    maximal_isotropic_subgroups,
    pairing_orbits,
)
from .cyclotomic import (
    I,
    CycMatrix,
    CycNum,
    NotPermutation,
    exact_sqrt,
    is_symplectic,
    standard_J,
    symplectic_defect,
)
from .extensions import AbelianGroup, MatrixGroupIface, cocycle_from_section
from .gl_fixed import (
    ClauseReport,
    DiagonalizationError,
    NotAdmissible,
    NotHomomorphism,
    NotInGTheta,
    NotInSigma,
    _column_basis,
    _orbit_reps,
    _SubAsGroup,
    character_from_values,
    extend_from_generators,
    induced_pairing,
)

ONE = CycNum.rational(1, 4)
MINUS_ONE = CycNum.rational(-1, 4)


class NotExponentTwo(ValueError):
    pass


class NotSymplectic(ValueError):
    pass


class InvalidOrderChoice(ValueError):
    pass


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


def _require_exponent_two(group: FinAbGroup):
    if group.exponent > 2:
        raise NotExponentTwo(f"Lambda must have exponent 2, got invariant factors {group.invariant_factors}")


# --- layouts ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpLayout:
    """Positions of the weight spaces in C^{2n}.

    ``top`` lists (weight, dim) for the top half in order; the bottom half
    repeats it with every weight shifted by q.
    """

    dual: object
    q: tuple
    top: tuple
    sign_normalized: bool = True

    @property
    def half(self) -> int:
        return sum(d for _, d in self.top)

    @property
    def size(self) -> int:
        return 2 * self.half

    @property
    def q_trivial(self) -> bool:
        return self.q == self.dual.zero

    def partner(self, w):
        return self.dual.add(w, self.q)

    @property
    def idx(self) -> dict:
        out = {}
        pos = 0
        n = self.half
        for w, d in self.top:
            out.setdefault(w, []).extend(range(pos, pos + d))
            out.setdefault(self.partner(w), []).extend(range(n + pos, n + pos + d))
            pos += d
        return {w: tuple(v) for w, v in out.items()}

    def weight_at(self) -> list:
        out = [None] * self.size
        for w, ix in self.idx.items():
            for i in ix:
                out[i] = w
        return out

    def dims(self) -> dict:
        return {w: len(ix) for w, ix in self.idx.items()}

    @property
    def weights(self) -> list:
        return sorted(self.idx)


def _value(group, ch, x) -> int:
    return _sign(group.char_eval(ch, x))


def delta_q_choice(iso: IsotropyData, q) -> tuple | None:
    """delta_q in q^-1(-1); when q is outside f(Lambda/Delta) it is also killed by f(Lambda/Delta)."""
    G, Dd = iso.group, iso.delta_dual
    if q == Dd.zero:
        return None
    fL = iso.f_image()
    in_f = q in set(fL)
    for d in iso.delta.sorted_elements():
        if _value(G, q, d) != -1:
            continue
        if in_f or all(_value(G, phi, d) == 1 for phi in fL):
            return d
    raise ValueError("no element of Delta with the required character values")


def top_weights(iso: IsotropyData, q) -> list:
    Dd = iso.delta_dual
    dq = delta_q_choice(iso, q)
    if dq is None:
        return Dd.elements()
    return [w for w in Dd.elements() if _value(iso.group, w, dq) == -1]


def diagonal_image_sp(group: FinAbGroup, layout: SpLayout, delta_elem) -> CycMatrix:
    qv = _value(group, layout.q, delta_elem)
    entries = []
    for w in layout.weight_at():
        v = _value(group, w, delta_elem)
        entries.append(CycNum.rational(v, 4) if qv == 1 else I * (-v))
    return CycMatrix.diag(entries, 4)


# --- quadruples ---------------------------------------------------------------------------


@dataclass
class StepRecord:
    """One inductive extension step s(lambda_m) = M^gamma z."""

    generator: tuple
    case: str
    available_orders: tuple
    order: int
    correction: CycMatrix = field(repr=False)


@dataclass(eq=False)
class RepQuadruple:
    group: FinAbGroup
    pairing: Pairing
    delta: Subgroup
    q: tuple  # element of Delta* (a representative in Lambda*)
    n: int
    s: dict
    layout: SpLayout
    iso: IsotropyData
    steps: list = field(default_factory=list)
    _inv: dict = field(default_factory=dict, repr=False)

    @property
    def J(self) -> CycMatrix:
        return standard_J(self.n)

    def image(self, lam) -> CycMatrix:
        return self.s[self.group.reduce(lam)]

    def image_inv(self, lam) -> CycMatrix:
        lam = self.group.reduce(lam)
        if lam not in self._inv:
            self._inv[lam] = self.s[lam].inverse()
        return self._inv[lam]

    def q_value(self, d) -> int:
        return _value(self.group, self.q, d)

    def to_json(self) -> dict:
        return {
            "lambda": list(self.group.invariant_factors),
            "pairing": self.pairing.to_json(),
            "delta": self.delta.to_json(),
            "q": list(self.q),
            "n": self.n,
            "top_weights": [[list(w), d] for w, d in self.layout.top],
            "s": {",".join(map(str, g)): self.image(g).to_json() for g in self.group.generators()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "RepQuadruple":
        """Rebuild from generator images; s on other elements is the product (Int_s is unchanged)."""
        G = FinAbGroup(tuple(data["lambda"]))
        l = Pairing.from_json(G, data["pairing"])
        delta = generated_subgroup(G, [tuple(g) for g in data["delta"]["generators"]])
        iso = isotropy_data(G, l, delta)
        q = iso.delta_dual.rep_of(tuple(data["q"]))
        top = tuple((iso.delta_dual.rep_of(tuple(w)), d) for w, d in data["top_weights"])
        layout = SpLayout(iso.delta_dual, q, top)
        gens = {}
        for k, v in data["s"].items():
            key = tuple(int(x) for x in k.split(",")) if k else ()
            gens[key] = CycMatrix.from_json(v)
        s = extend_from_generators(G, [gens[g] for g in G.generators()], 2 * data["n"])
        return cls(G, l, delta, q, data["n"], s, layout, iso)


def characteristic_hom(group: FinAbGroup, delta: Subgroup, s, dual=None) -> tuple:
    """q as a character of Delta, represented in Lambda* (reduced to Delta* when ``dual`` is given).

    s(delta) must be diagonal; q(delta) = -1 exactly when its eigenvalues are +-i.
    """
    get = s.__getitem__ if isinstance(s, dict) else s
    vals = {}
    for d in delta.sorted_elements():
        A = get(d)
        if not A.is_diagonal():
            raise ValueError(f"s({d}) is not diagonal")
        sq = {x * x for x in A.diagonal()}
        if sq == {CycNum.rational(1)}:
            vals[d] = 1
        elif sq == {CycNum.rational(-1)}:
            vals[d] = -1
        else:
            raise ValueError(f"s({d}) has mixed eigenvalues")
    for a in delta.sorted_elements():
        for b in delta.sorted_elements():
            if vals[a] * vals[b] != vals[group.add(a, b)]:
                raise ValueError("the characteristic map is not a homomorphism")
    for chi in group.dual().elements():
        if all(_value(group, chi, d) == v for d, v in vals.items()):
            return dual.rep_of(chi) if dual is not None else chi
    raise ValueError("no character of Lambda restricts to the characteristic map")


def eigenspace_type(A: CycMatrix) -> str:
    """'symplectic' or 'isotropic' for a diagonal symplectic A of order dividing 4."""
    n = A.n_rows // 2
    d = A.diagonal()
    iso = sym = False
    for i in range(n):
        if d[i] == d[n + i]:
            sym = True
        else:
            iso = True
    if iso and sym:
        return "mixed"
    return "isotropic" if iso else "symplectic"


def block_structure(M: CycMatrix, layout: SpLayout):
    """(shift, {weight: scalar}) when M maps each W_psi onto one W_psi' by a scalar."""
    idx = layout.idx
    wat = layout.weight_at()
    Dd = layout.dual
    shift = None
    scal = {}
    cols = {}
    for i, r in enumerate(M.rows):
        for j, v in r.items():
            cols.setdefault(j, []).append((i, v))
    for w, ix in idx.items():
        entries = cols.get(ix[0], [])
        if len(entries) != 1:
            raise NotPermutation(f"column {ix[0]} is not a single entry")
        tgt = wat[entries[0][0]]
        c = entries[0][1]
        tix = idx[tgt]
        if len(tix) != len(ix):
            raise NotPermutation(f"weights {w} and {tgt} have different dimensions")
        for a, b in zip(ix, tix):
            col = cols.get(a, [])
            if len(col) != 1 or col[0][0] != b or col[0][1] != c:
                raise NotPermutation(f"block {w} -> {tgt} is not scalar")
        p = Dd.add(tgt, Dd.neg(w))
        if shift is None:
            shift = p
        elif shift != p:
            raise NotPermutation(f"block shifts {shift} and {p} disagree")
        scal[w] = c
    return shift, scal


def check_representative_quadruple(t: RepQuadruple, exhaustive: bool = True) -> ClauseReport:
    """Clauses 1-5 and symplecticity of every image, checked exactly.

    Clause numbers: 1 Int_s homomorphism, 2 s(Delta) diagonal, 3 induced
    pairing and weight shifts, 4 scalar block permutations, 5 characteristic
    homomorphism equals q and eigenvalues follow the sign convention; 0 marks
    a non-symplectic image.
    """
    G, iso = t.group, t.iso
    Dd = iso.delta_dual
    failed, msgs = [], []
    elems = G.elements()
    src = elems if exhaustive else G.generators()

    bad = [a for a in elems if not is_symplectic(t.image(a))]
    if bad:
        failed.append(0)
        msgs.append(f"s({bad[0]}) does not preserve J")
    ok = True
    for a in src:
        for b in elems:
            if (t.image(a) @ t.image(b) @ t.image_inv(G.add(a, b))).scalar_value() is None:
                ok = False
                msgs.append(f"s({a}) s({b}) s({a}+{b})^-1 is not scalar")
                break
        if not ok:
            break
    if not ok:
        failed.append(1)
    if any(not t.image(d).is_diagonal() for d in t.delta.sorted_elements()):
        failed.append(2)
        msgs.append("s(Delta) is not diagonal")
    ok = True
    for a in src:
        for b in elems:
            c = (t.image(a) @ t.image(b) @ t.image_inv(a) @ t.image_inv(b)).scalar_value()
            if c is None or c != CycNum.rational(_sign(t.pairing(a, b))):
                ok = False
                msgs.append(f"commutator of s({a}), s({b}) does not match the pairing")
                break
        if not ok:
            break
    if not ok:
        failed.append(3)
    ok4 = True
    for a in elems:
        try:
            shift, _ = block_structure(t.image(a), t.layout)
        except NotPermutation as exc:
            ok4 = False
            msgs.append(f"s({a}): {exc}")
            break
        if shift != iso.f_of(a):
            if 3 not in failed:
                failed.append(3)
            msgs.append(f"s({a}) shifts weights by {shift}, expected {iso.f_of(a)}")
            break
    if not ok4:
        failed.append(4)
    if 2 not in failed:
        try:
            q = characteristic_hom(G, t.delta, t.s, Dd)
            if q != Dd.rep_of(t.q):
                failed.append(5)
                msgs.append(f"characteristic homomorphism {q} differs from q = {t.q}")
            else:
                for d in t.delta.sorted_elements():
                    A = t.image(d)
                    want = diagonal_image_sp(G, t.layout, d)
                    if A != want and A != -want:
                        failed.append(5)
                        msgs.append(f"s({d}) does not follow the weight convention")
                        break
        except ValueError as exc:
            failed.append(5)
            msgs.append(str(exc))
    return ClauseReport(not failed, sorted(failed), msgs)


# --- M^gamma and its symplectic correction --------------------------------------------------------


def _m_gamma_sp(t_group, iso, layout, s, domain_q, gamma, g) -> CycMatrix:
    """Positional block matrix W_w -> W_{w g}, relative to s on the cosets ``domain_q``."""
    Dd = iso.delta_dual
    idx = layout.idx
    dims = layout.dims()
    for w, d in dims.items():
        if dims.get(Dd.add(w, g), 0) != d:
            raise NotInSigma(f"weight {w} has no partner of equal dimension")
    fH = {iso.f[h]: h for h in domain_q}
    reps = _orbit_reps(Dd, dims, fH)
    rows = [dict() for _ in range(layout.size)]
    for w in sorted(dims):
        base = reps[w]
        lam = fH[Dd.add(base, Dd.neg(w))]
        A = s[lam]
        c1 = A[idx[Dd.add(w, g)][0], idx[Dd.add(base, g)][0]]
        c0 = A[idx[w][0], idx[base][0]]
        if c1.is_zero() or c0.is_zero():
            raise NotPermutation("s does not map the orbit representative as expected")
        coef = c1 / c0 * _sign(t_group.char_eval(gamma, lam))
        for i, j in zip(idx[Dd.add(w, g)], idx[w]):
            rows[i][j] = coef
    return CycMatrix(layout.size, layout.size, rows)


class NotCorrectable(NotInSigma):
    """No central factor makes M^gamma symplectic (with the requested square)."""


def _solve_orbit_scalars(M: CycMatrix, layout: SpLayout, reps: dict, target=None) -> CycMatrix:
    """Orbit-constant diagonal z with M z symplectic and, if ``target`` is set, (M z)^2 = target.

    Constraints z_A z_B = v are propagated from the lex-min orbit of each
    component; only that orbit can need a square root, every other value is
    obtained by division.
    """
    n = layout.half
    wat = layout.weight_at()
    P = M.transpose() @ standard_J(n) @ M
    edges = []
    for i in range(n):
        p = P[i, n + i]
        if p.is_zero():
            raise NotCorrectable("M^gamma does not pair position i with i + n")
        edges.append((reps[wat[i]], reps[wat[n + i]], p.inverse()))
    for i, r in enumerate(P.rows):
        for j in r:
            if j != (i + n) % (2 * n):
                raise NotCorrectable("M^T J M is not a multiple of J position-wise")
    if target is not None:
        M2 = M @ M
        if not M2.is_diagonal():
            raise NotCorrectable("(M^gamma)^2 is not diagonal")
        d2 = M2.diagonal()
        img = {}
        for i, r in enumerate(M.rows):
            for j in r:
                img[j] = i
        for i in range(2 * n):
            edges.append((reps[wat[i]], reps[wat[img[i]]], CycNum.rational(target) / d2[i]))
    adj = {}
    for a, b, v in edges:
        adj.setdefault(a, []).append((b, v))
        adj.setdefault(b, []).append((a, v))
    z = {}
    for root in sorted(adj):
        if root in z:
            continue
        loop = next((v for b, v in adj[root] if b == root), None)
        z[root] = exact_sqrt(loop) if loop is not None else ONE
        stack = [root]
        while stack:
            a = stack.pop()
            for b, v in adj[a]:
                if b not in z:
                    z[b] = v / z[a]
                    stack.append(b)
    for a, b, v in edges:
        if z[a] * z[b] != v:
            raise NotCorrectable("the orbit constraints are inconsistent")
    return CycMatrix.diag([z[reps[w]] for w in wat])


def step_case(Dd, q, g, fH) -> str:
    """Which branch of the inductive step applies: 'q_in_f', 'q_gamma' or 'q_generic'.

    Membership is tested modulo f of the already extended part.
    """
    fH = set(fH)
    if q in fH:
        return "q_in_f"
    if Dd.add(q, g) in fH:
        return "q_gamma"
    return "q_generic"


def forced_square(case: str) -> int:
    """(M^gamma)^2 in the default branch of each case."""
    return -1 if case == "q_gamma" else 1


def variant_count(case: str) -> int:
    """Number of classes an extension step can produce.

    Two whenever an orbit-constant symplectic factor can flip the sign of the
    square, i.e. unless q agrees with gamma modulo f of the extended part.
    """
    return 1 if case == "q_gamma" else 2


def m_gamma_case(t: RepQuadruple, gamma) -> str:
    Dd = t.iso.delta_dual
    if t.layout.q_trivial:
        return "q_trivial"
    if Dd.rep_of(gamma) == Dd.rep_of(t.q):
        return "q_eq_gamma"
    if Dd.rep_of(t.q) in set(t.iso.f_image()):
        return "q_in_f"
    return "q_not_in_f"


@dataclass
class MGammaSp:
    matrix: CycMatrix
    uncorrected: CycMatrix = field(repr=False)
    correction: CycMatrix = field(repr=False)
    case: str = ""


def _m_gamma_sp_full(t: RepQuadruple, gamma) -> MGammaSp:
    G, iso = t.group, t.iso
    g = iso.delta_dual.rep_of(gamma)
    M = _m_gamma_sp(G, iso, t.layout, t.s, iso.quotient.elements(), gamma, g)
    reps = _orbit_reps(iso.delta_dual, t.layout.dims(), iso.f_image())
    z = _solve_orbit_scalars(M, t.layout, reps)
    return MGammaSp(M @ z, M, z, m_gamma_case(t, gamma))


def build_M_gamma_sp(t: RepQuadruple, gamma) -> MGammaSp:
    """Symplectic M^gamma with s(lambda) M s(lambda)^-1 = gamma(lambda) M; the central factor is recorded."""
    gamma = t.group.reduce(gamma)
    if gamma not in sigma_theta_sp(t):
        raise NotInSigma(f"{gamma} is not in Sigma_theta")
    return _m_gamma_sp_full(t, gamma)


def sigma_theta_sp(t: RepQuadruple) -> Subgroup:
    Dd = t.iso.delta_dual
    dims = t.layout.dims()
    keep = []
    for gam in t.group.dual().elements():
        g = Dd.rep_of(gam)
        if all(dims.get(Dd.add(w, g), 0) == d for w, d in dims.items()):
            try:
                _m_gamma_sp_full(t, gam)
            except (NotInSigma, NotPermutation):
                continue
            keep.append(gam)
    return generated_subgroup(t.group.dual(), keep)


def half_sign_matrix(t: RepQuadruple) -> CycMatrix:
    """+1 on the top half, -1 on the bottom half."""
    n = t.n
    return CycMatrix.diag([ONE] * n + [MINUS_ONE] * n)


def c_theta_sp(g: CycMatrix, t: RepQuadruple) -> tuple:
    G = t.group
    gi = g.inverse()
    vals = []
    for e in G.generators():
        c = (t.image(e) @ g @ t.image_inv(e) @ gi).scalar_value()
        if c is None or c not in (CycNum.rational(1), CycNum.rational(-1)):
            raise NotInGTheta(f"s({e}) g s({e})^-1 g^-1 is not +-1")
        vals.append(0 if c == 1 else 1)
    return character_from_values(G, vals)


def check_defining_relation_sp(t: RepQuadruple, gamma, M: CycMatrix) -> bool:
    G = t.group
    for lam in G.elements():
        if t.image(lam) @ M @ t.image_inv(lam) != M.scale(CycNum.rational(_sign(G.char_eval(gamma, lam)))):
            return False
    return True


def c_theta_image_sp(t: RepQuadruple) -> Subgroup:
    """Image of c_theta on the symplectic M^gamma that can be built, with no Sigma_theta test."""
    D = t.group.dual()
    found, span = [], {D.zero}
    for gam in D.elements():
        if len(span) == D.order:
            break
        if gam in span:
            continue
        try:
            M = _m_gamma_sp_full(t, gam).matrix
        except (NotInSigma, NotPermutation):
            continue
        if not is_symplectic(M):
            continue
        chi = c_theta_sp(M, t)
        if chi not in span:
            found.append(chi)
            span = generated_subgroup_elements(D, found)
    return Subgroup(D, tuple(found), frozenset(span))


@dataclass
class AdmissibilityReportSp:
    by_weights: bool
    by_c_theta: bool

    @property
    def agree(self) -> bool:
        return self.by_weights == self.by_c_theta

    def __bool__(self):
        return self.by_weights


def is_admissible_sp(t: RepQuadruple, cross_check: bool = True) -> AdmissibilityReportSp:
    dims = t.layout.dims()
    w = set(dims) == set(t.iso.delta_dual.elements()) and len(set(dims.values())) == 1
    if not cross_check:
        return AdmissibilityReportSp(w, w)
    return AdmissibilityReportSp(w, c_theta_image_sp(t).order == t.group.order)


# --- construction ---------------------------------------------------------------------------------


def _ker_q_order(iso: IsotropyData, q) -> int:
    return iso.delta.order if q == iso.delta_dual.zero else iso.delta.order // 2


def _choice_for(order_choice, k: int):
    if order_choice is None or isinstance(order_choice, int):
        return order_choice
    return order_choice[k] if k < len(order_choice) else None


def construct_admissible_s_sp(group: FinAbGroup, l: Pairing, delta: Subgroup, q, n: int,
                              order_choice=None, basis=None) -> RepQuadruple:
    """An admissible quadruple with every weight of Delta* of dimension 2n/|Delta|.

    ``order_choice`` (2 or 4, or one entry per generator of Lambda/Delta)
    selects the order of s(lambda_m) at steps offering two classes; at other
    steps a value different from the forced order raises InvalidOrderChoice.
    """
    _require_exponent_two(group)
    iso = isotropy_data(group, l, delta)
    Dd = iso.delta_dual
    q = Dd.rep_of(group.reduce(q)) if len(q) == group.rank else q
    k = _ker_q_order(iso, q)
    if n % k:
        raise NotAdmissible(f"|ker q| = {k} does not divide n = {n}")
    m = n // k
    layout = SpLayout(Dd, q, tuple((w, m) for w in top_weights(iso, q)))
    s = {d: diagonal_image_sp(group, layout, d) for d in delta.sorted_elements()}
    Q = iso.quotient
    gens = basis if basis is not None else find_basis(Q)
    domain_q = [Q.zero]
    steps = []
    dims = layout.dims()
    for step, lam in enumerate(gens):
        lam = group.reduce(lam)
        gamma = l.image(lam)
        g = Dd.rep_of(gamma)
        M = _m_gamma_sp(group, iso, layout, s, domain_q, gamma, g)
        fH = [iso.f[h] for h in domain_q]
        reps = _orbit_reps(Dd, dims, fH)
        options = {}
        for target, order in ((1, 2), (-1, 4)):
            try:
                options[order] = _solve_orbit_scalars(M, layout, reps, target)
            except NotCorrectable:
                pass
        if not options:
            raise NotCorrectable("no symplectic extension with square +-1")
        want = _choice_for(order_choice, step)
        if want is None:
            want = min(options)
        if want not in options:
            raise InvalidOrderChoice(f"order {want} is not available at step {step}; options {sorted(options)}")
        z = options[want]
        S = M @ z
        for h, A in list(s.items()):
            s[group.add(h, lam)] = A @ S
        steps.append(StepRecord(lam, step_case(Dd, q, g, fH), tuple(sorted(options)), want, z))
        domain_q = sorted({Q.rep_of(x) for x in s})
    return RepQuadruple(group, l, delta, q, n, s, layout, iso, steps)


def apply_variant(t: RepQuadruple, C: CycMatrix) -> RepQuadruple:
    """Replace s(lambda_m) by s(lambda_m) C for the last extension step."""
    if not t.steps:
        raise ValueError("no extension step to modify")
    G = t.group
    lam = t.steps[-1].generator
    s = dict(t.s)
    for h in _domain(t):
        s[G.add(h, lam)] = t.s[G.add(h, lam)] @ C
    return RepQuadruple(G, t.pairing, t.delta, t.q, t.n, s, t.layout, t.iso, list(t.steps))


def _domain(t: RepQuadruple) -> set:
    """Elements of the part of Lambda built before the last step."""
    prior = [st.generator for st in t.steps[:-1]]
    return generated_subgroup_elements(t.group, list(t.delta.generators) + prior)


# --- classes --------------------------------------------------------------------------------------


def order_tags(t: RepQuadruple) -> tuple:
    """(element, order of s(element) up to sign) for every element of Lambda."""
    out = []
    for x in t.group.elements():
        if x == t.group.zero:
            out.append((x, 1))
            continue
        sq = (t.image(x) @ t.image(x)).scalar_value()
        if sq == 1:
            out.append((x, 2))
        elif sq == -1:
            out.append((x, 4))
        else:
            raise NotHomomorphism(f"s({x})^2 is not +-1")
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ThetaClassSp:
    canonical: tuple
    witness: RepQuadruple = field(compare=False)

    def __eq__(self, other):
        return isinstance(other, ThetaClassSp) and self.canonical == other.canonical

    def __hash__(self):
        return hash(self.canonical)

    @property
    def tags(self) -> tuple:
        return self.canonical[3]


def theta_class_sp(t: RepQuadruple) -> ThetaClassSp:
    """Canonical form (Lambda, l, n, order tags); the tags restrict to q on Delta."""
    if not is_admissible_sp(t, cross_check=False):
        raise NotAdmissible("theta classes are keyed only for admissible quadruples")
    canon = (t.group.invariant_factors, t.pairing.matrix, t.n, order_tags(t))
    return ThetaClassSp(canon, t)


def variant_conjugators(t: RepQuadruple, C: CycMatrix) -> list:
    """The diagonal conjugators that should take s(lambda_m) C back to s(lambda_m).

    q_gamma: one matrix, c^-1/2 on the root orbit of each pair and c^1/2 on its
    partner.  q_generic: the k-reduction diag(1, k^-1/2, 1, k^1/2) followed by
    diag(c^-1/2, c^-1/2, c^1/2, c^1/2), on each quadruple of orbits
    O, O gamma, O q, O gamma q.  Roots of the partner orbits are obtained by
    inverting the root-orbit values.
    """
    st = t.steps[-1]
    Dd = t.iso.delta_dual
    G = t.group
    dims = t.layout.dims()
    fH = [t.iso.f[h] for h in sorted({t.iso.quotient.rep_of(x) for x in _domain(t)})]
    reps = _orbit_reps(Dd, dims, fH)
    g = Dd.rep_of(t.pairing.image(st.generator))
    q = t.q
    wat = t.layout.weight_at()
    diagC = C.diagonal()
    val = {}
    for i, w in enumerate(wat):
        val.setdefault(reps[w], diagC[i])
    orbits = sorted(set(reps.values()))

    def mat(f):
        return CycMatrix.diag([f[reps[w]] for w in wat])

    if st.case == "q_gamma":
        K = {}
        for O in orbits:
            if O in K:
                continue
            c = val[O]
            r = exact_sqrt(c)
            K[O] = r.inverse()
            K[reps[Dd.add(O, g)]] = r
        return [mat(K)]
    if st.case == "q_generic":
        K1, K2 = {}, {}
        for O in orbits:
            if O in K1:
                continue
            Og, Oq = reps[Dd.add(O, g)], reps[Dd.add(O, q)]
            Ogq = reps[Dd.add(Og, q)]
            k = val[Og] / val[O]
            r = exact_sqrt(k)
            K1.update({O: ONE, Og: r.inverse(), Oq: ONE, Ogq: r})
            c = val[O] * r
            rc = exact_sqrt(c)
            K2.update({O: rc.inverse(), Og: rc.inverse(), Oq: rc, Ogq: rc})
        return [mat(K1), mat(K2)]
    raise ValueError("the last step offers two classes; no conjugator identifies them")


def conjugate_quadruple(t: RepQuadruple, K: CycMatrix) -> dict:
    Ki = K.inverse()
    return {x: Ki @ A @ K for x, A in t.s.items()}


def same_int(s1: dict, s2: dict) -> bool:
    """s1(lambda) = +-s2(lambda) for every lambda."""
    return all(s1[x] == s2[x] or s1[x] == -s2[x] for x in s1)


def variant_factor(t: RepQuadruple, values: dict) -> CycMatrix:
    """Orbit-constant diagonal C from values on the orbits O, O gamma, O q, O gamma q.

    ``values`` maps the labels "O", "Og", "Oq", "Ogq" to scalars; the same
    pattern is used on every quadruple (or pair, when q = gamma) of orbits.
    """
    st = t.steps[-1]
    Dd = t.iso.delta_dual
    dims = t.layout.dims()
    fH = [t.iso.f[h] for h in sorted({t.iso.quotient.rep_of(x) for x in _domain(t)})]
    reps = _orbit_reps(Dd, dims, fH)
    g = Dd.rep_of(t.pairing.image(st.generator))
    q = t.q
    val = {}
    for O in sorted(set(reps.values())):
        if O in val:
            continue
        Og, Oq = reps[Dd.add(O, g)], reps[Dd.add(O, q)]
        Ogq = reps[Dd.add(Og, q)]
        for key, P in (("O", O), ("Og", Og), ("Oq", Oq), ("Ogq", Ogq)):
            val.setdefault(P, CycNum.rational(values[key], 4) if not isinstance(values[key], CycNum) else values[key])
    return CycMatrix.diag([val[reps[w]] for w in t.layout.weight_at()])


def order_variant_report(group: FinAbGroup, l: Pairing, delta: Subgroup, q, n: int) -> dict:
    """Order variants at the last extension step and whether the diagonal conjugators merge them."""
    base = construct_admissible_s_sp(group, l, delta, q, n)
    if not base.steps:
        return {"case": None}
    st = base.steps[-1]
    prior = [x.order for x in base.steps[:-1]]
    variants = []
    for o in st.available_orders:
        t = construct_admissible_s_sp(group, l, delta, q, n, order_choice=prior + [o])
        variants.append(t)
    out = {
        "case": st.case,
        "available_orders": list(st.available_orders),
        "last_generator": list(st.generator),
        "element_orders": sorted({dict(order_tags(t))[st.generator] for t in variants}),
        "classes": len({theta_class_sp(t) for t in variants}),
    }
    if st.case in ("q_gamma", "q_generic"):
        pattern = {"O": 3, "Og": Fraction(1, 3), "Oq": 3, "Ogq": Fraction(1, 3)}
        if st.case == "q_generic":
            pattern = {"O": 2, "Og": Fraction(1, 2), "Oq": Fraction(1, 2), "Ogq": 2}
        C = variant_factor(base, pattern)
        tv = apply_variant(base, C)
        ok = is_symplectic(C) and bool(check_representative_quadruple(tv))
        s1 = dict(tv.s)
        for K in variant_conjugators(base, C):
            s1 = {x: K.inverse() @ A @ K for x, A in s1.items()}
        out["same_square_variant_valid"] = ok
        out["printed_conjugators_identify"] = ok and same_int(s1, base.s)
        if st.case == "q_generic":
            C4 = variant_factor(base, {"O": 1, "Og": -1, "Oq": 1, "Ogq": -1})
            t4 = apply_variant(base, C4)
            out["sign_variant_valid"] = is_symplectic(C4) and bool(check_representative_quadruple(t4))
            out["sign_variant_square"] = (t4.image(st.generator) @ t4.image(st.generator)).scalar_value() == -1
            out["sign_variant_same_class"] = theta_class_sp(t4) == theta_class_sp(base)
    out["single_class"] = out["classes"] == 1
    return out


# --- normalization -------------------------------------------------------------------------------


def _omega(u: list, v: list, n: int) -> CycNum:
    acc = CycNum.rational(0)
    for i in range(n):
        if not u[i].is_zero() and not v[n + i].is_zero():
            acc = acc + u[i] * v[n + i]
        if not u[n + i].is_zero() and not v[i].is_zero():
            acc = acc - u[n + i] * v[i]
    return acc


def _lin(a, u, b, v):
    return [a * x + b * y for x, y in zip(u, v)]


def _symplectic_basis(vectors: list, n: int):
    """(e, f) with omega(e_j, f_k) = delta_jk spanning the symplectic span of ``vectors``."""
    rest = [list(v) for v in vectors]
    es, fs = [], []
    while rest:
        e = rest.pop(0)
        j = next((j for j, v in enumerate(rest) if not _omega(e, v, n).is_zero()), None)
        if j is None:
            raise DiagonalizationError("weight space is not symplectic")
        f = rest.pop(j)
        f = [x / _omega(e, f, n) for x in f]
        new = []
        for v in rest:
            # v - omega(v, f) e + omega(v, e) f is orthogonal to e and f
            a, b = _omega(v, f, n), _omega(v, e, n)
            new.append([x - a * y + b * w for x, y, w in zip(v, e, f)])
        rest = new
        es.append(e)
        fs.append(f)
    return es, fs


def _dual_basis(es: list, vectors: list, n: int) -> list:
    Gm = CycMatrix.from_rows([[_omega(e, v, n) for v in vectors] for e in es])
    X = Gm.inverse()
    m = len(es)
    return [[sum((vectors[l][i] * X[l, k] for l in range(m)), CycNum.rational(0)) for i in range(2 * n)]
            for k in range(m)]


def _congruence_normalizer(A: CycMatrix) -> CycMatrix:
    """X with X A X^T = I for a symmetric invertible A.

    Symmetric elimination followed by exact square roots of the pivots; the
    pivots must be rational multiples of roots of unity.
    """
    m = A.n_rows
    B = [[A[i, j] for j in range(m)] for i in range(m)]
    X = [[CycNum.rational(1 if i == j else 0) for j in range(m)] for i in range(m)]

    def add_row(dst, src, c):
        X[dst] = [a + c * b for a, b in zip(X[dst], X[src])]
        B[dst] = [a + c * b for a, b in zip(B[dst], B[src])]
        for r in range(m):
            B[r][dst] = B[r][dst] + c * B[r][src]

    for k in range(m):
        if B[k][k].is_zero():
            j = next((j for j in range(k + 1, m) if not B[j][j].is_zero()), None)
            if j is not None:
                add_row(k, j, CycNum.rational(1))
            else:
                j = next((j for j in range(k + 1, m) if not B[k][j].is_zero()), None)
                if j is None:
                    raise DiagonalizationError("degenerate form")
                add_row(k, j, CycNum.rational(1))
        piv = B[k][k]
        for j in range(k + 1, m):
            if not B[j][k].is_zero():
                add_row(j, k, -(B[j][k] / piv))
    out = []
    for k in range(m):
        r = exact_sqrt(B[k][k]).inverse()
        out.append([r * x for x in X[k]])
    return CycMatrix.from_rows(out)


def normalize_sp(group: FinAbGroup, raw, delta: Subgroup | None = None):
    """Conjugate s: Lambda -> Sp(2n) into a representative quadruple.

    Returns (quadruple, g) with g raw(lambda) g^-1 = +-quadruple.s(lambda) and
    g symplectic up to a scalar.
    """
    _require_exponent_two(group)
    if isinstance(raw, (list, tuple)):
        sraw = extend_from_generators(group, list(raw), raw[0].n_rows)
    else:
        sraw = {group.reduce(k): v for k, v in raw.items()}
    size = next(iter(sraw.values())).n_rows
    n = size // 2
    for x, A in sraw.items():
        if not is_symplectic(A):
            raise NotSymplectic(f"s({x}) does not preserve J")
    l = induced_pairing(sraw, group)
    if delta is None:
        delta = maximal_isotropic_subgroups(group, l)[0]
    iso = isotropy_data(group, l, delta)
    Dd = iso.delta_dual
    dbasis = find_basis(_SubAsGroup(group, delta)) if delta.order > 1 else []
    qvals, tilde = [], []
    for b in dbasis:
        sq = (sraw[b] @ sraw[b]).scalar_value()
        if sq == 1:
            qvals.append(1)
            tilde.append(sraw[b])
        elif sq == -1:
            qvals.append(-1)
            tilde.append(sraw[b].scale(I))
        else:
            raise DiagonalizationError(f"s({b})^2 is not +-1")
    q = next(chi for chi in Dd.elements()
             if all(_value(group, chi, b) == v for b, v in zip(dbasis, qvals)))
    half = CycNum.rational(1, 4) / 2
    spaces = {}
    for signs in itertools.product((1, -1), repeat=len(dbasis)):
        P = CycMatrix.identity(size, 4)
        for sg, A in zip(signs, tilde):
            P = P @ (CycMatrix.identity(size, 4) + A.scale(sg)).scale(half)
        cols = _column_basis(P)
        if cols:
            w = next(chi for chi in Dd.elements()
                     if all(_value(group, chi, b) == sg for b, sg in zip(dbasis, signs)))
            spaces[w] = [[P[i, j] for i in range(size)] for j in cols]
    if sum(len(v) for v in spaces.values()) != size:
        raise DiagonalizationError("s(Delta) is not simultaneously diagonalizable")
    # rescale by a character so that the trivial weight occurs
    shift = Dd.zero if Dd.zero in spaces else min(spaces)
    spaces = {Dd.add(w, shift): v for w, v in spaces.items()}
    qtriv = q == Dd.zero
    if qtriv:
        tops = sorted(spaces)
    else:
        T = set(top_weights(iso, q))
        tops = sorted(w for w in spaces if w in T)
        if any(Dd.add(w, q) not in spaces or len(spaces[w]) != len(spaces[Dd.add(w, q)]) for w in tops):
            raise DiagonalizationError("isotropic weight spaces are not paired")
    top_cols, bot_cols, top = [], [], []
    for w in tops:
        if qtriv:
            es, fs = _symplectic_basis(spaces[w], n)
        else:
            es = spaces[w]
            fs = _dual_basis(es, spaces[Dd.add(w, q)], n)
        top.append((w, len(es)))
        top_cols += es
        bot_cols += fs
    cols = top_cols + bot_cols
    C = CycMatrix.from_rows([[cols[j][i] for j in range(size)] for i in range(size)])
    layout = SpLayout(Dd, q, tuple(top))
    Ci = C.inverse()
    s1 = {}
    for x, A in sraw.items():
        if x in delta:
            s1[x] = diagonal_image_sp(group, layout, x)
        else:
            s1[x] = Ci @ A @ C
    # Delta-matrix S making the blocks scalar along orbits of K
    fL = iso.f_image()
    dq = delta_q_choice(iso, q)
    if qtriv or dq is None:
        K = fL
    else:
        K = [phi for phi in fL if _value(group, phi, dq) == 1]
    fmap = {iso.f[r]: r for r in iso.quotient.elements()}
    idx = layout.idx
    reps = _orbit_reps(Dd, layout.dims(), K)
    Sblocks = {}
    for w in tops:
        base = reps[w]
        lam = fmap[Dd.add(base, Dd.neg(w))]
        Sblocks[w] = _block(s1[lam], idx[w], idx[base])
        if not qtriv:
            Sblocks[Dd.add(w, q)] = _block(s1[lam], idx[Dd.add(w, q)], idx[Dd.add(base, q)])
    S = _assemble(layout, {w: (B.inverse() if B.scalar_value() is None else None) for w, B in Sblocks.items()})
    s2 = {x: S @ A @ S.inverse() for x, A in s1.items()}
    g = S @ Ci
    if not qtriv and Dd.rep_of(q) in set(fL):
        lam_q = fmap[q]
        Xs = {}
        for w in tops:
            base = reps[w]
            if base in Xs:
                Xs[w] = Xs[base]
                continue
            A = _block(s2[lam_q], idx[w], idx[Dd.add(w, q)])
            Xs[w] = None if A.scalar_value() is not None else _congruence_normalizer(A)
        blocks = {}
        for w in tops:
            X = Xs[w]
            if X is not None:
                blocks[w] = X
                blocks[Dd.add(w, q)] = X.inverse().transpose()
        S2 = _assemble(layout, blocks)
        s2 = {x: S2 @ A @ S2.inverse() for x, A in s2.items()}
        g = S2 @ g
    t = RepQuadruple(group, l, delta, q, n, s2, layout, iso)
    return t, g


def random_integer_symplectic(n: int, rng: random.Random, steps: int = 4, bound: int = 1) -> CycMatrix:
    """Product of elementary integral symplectic matrices (I,S;0,I), (I,0;S,I), diag(X, X^-T)."""
    g = CycMatrix.identity(2 * n)
    for _ in range(steps):
        kind = rng.randrange(3)
        if kind < 2:
            S = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    S[i][j] = S[j][i] = rng.randint(-bound, bound)
            rows = [[int(i == j) for j in range(2 * n)] for i in range(2 * n)]
            for i in range(n):
                for j in range(n):
                    if kind == 0:
                        rows[i][n + j] = S[i][j]
                    else:
                        rows[n + i][j] = S[i][j]
            A = CycMatrix.from_rows(rows)
        else:
            rows = [[int(a == b) for b in range(n)] for a in range(n)]
            if n > 1:
                i, j = rng.sample(range(n), 2)
                rows[i][j] = rng.choice((-1, 1))
            X = CycMatrix.from_rows(rows)
            A = CycMatrix.block_diag([X, X.inverse().transpose()])
        g = g @ A
    return g


def _block(A: CycMatrix, rows, cols) -> CycMatrix:
    return CycMatrix.from_rows([[A[i, j] for j in cols] for i in rows])


def _assemble(layout: SpLayout, blocks: dict) -> CycMatrix:
    """Block-diagonal matrix over the weight index lists; ``None`` or missing means identity."""
    size = layout.size
    rows = [{i: CycNum.rational(1)} for i in range(size)]
    for w, ix in layout.idx.items():
        B = blocks.get(w)
        if B is None:
            continue
        for a, i in enumerate(ix):
            rows[i] = {j: B[a, b] for b, j in enumerate(ix) if not B[a, b].is_zero()}
    return CycMatrix(size, size, rows)


def verify_conjugation_sp(raw: dict, t: RepQuadruple, g: CycMatrix) -> bool:
    gi = g.inverse()
    return all((g @ A @ gi) in (t.image(x), -t.image(x)) for x, A in raw.items())


# --- the order-two catalog -------------------------------------------------------------------------


def K_matrix(p: int, q: int) -> CycMatrix:
    """i diag(-I_p, I_q, -I_p, I_q)."""
    d = [-I] * p + [I] * q
    return CycMatrix.diag(d + d, 4)


def S_form(n: int) -> CycMatrix:
    return CycMatrix.diag([I] * n + [-I] * n, 4)


def T_matrix(n: int) -> CycMatrix:
    """Swap of the two halves of each Lagrangian summand (n even)."""
    if n % 2:
        raise ValueError("T needs n even")
    h = n // 2
    perm = []
    for i in range(2 * n):
        blk, r = divmod(i, h)
        perm.append((blk ^ 1) * h + r)
    return CycMatrix.monomial(perm, [CycNum.rational(1)] * (2 * n))


def P_matrix(n: int) -> CycMatrix:
    """(1, -i; 1, i) tensored with I_n."""
    one = CycNum.rational(1, 4)
    rows = []
    for i in range(n):
        rows.append({i: one, n + i: -I})
    for i in range(n):
        rows.append({i: one, n + i: I})
    return CycMatrix(2 * n, 2 * n, rows)


@dataclass
class SpCatalog:
    n: int
    J: CycMatrix
    S: CycMatrix
    P: CycMatrix
    K: dict
    T: CycMatrix | None
    checks: dict
    cocycle_J: object = None
    cocycle_T: object = None


def sp_order2_catalog(n: int) -> SpCatalog:
    """The standard involutions of Sp(2n), the conjugation J ~ S and the two cocycles."""
    J = standard_J(n).with_conductor(4)
    S = S_form(n)
    P = P_matrix(n)
    Pi = P.inverse()
    Ks = {(p, n - p): K_matrix(p, n - p) for p in range(n + 1)}
    T = T_matrix(n) if n % 2 == 0 else None
    Id = CycMatrix.identity(2 * n)
    defect = symplectic_defect(P)
    checks = {
        "J_squared_minus_identity": J @ J == -Id,
        "J_equals_Pinv_S_P": Pi @ S @ P == J,
        "P_S_Pinv_equals_J": P @ S @ Pi == J,
        "P_defect": defect,
        "P_normalized_symplectic": is_symplectic(P.scale((1 + I).inverse())),
        "S_symplectic": is_symplectic(S),
        "K_defects": {k: symplectic_defect(v) for k, v in Ks.items()},
    }
    gam = AbelianGroup(FinAbGroup((2,)))
    e, a = (0,), (1,)
    # G^theta for theta = Int_S: block-diagonal (A, A^-T); generators over a few elementary A
    g0 = _gl_block_generators(n)
    inJ = lambda x: x @ S == S @ x  # noqa: E731
    cJ = cocycle_from_section(MatrixGroupIface(2 * n), gam, {e: Id, a: J}, g0)
    checks["cocycle_J"] = cJ.cocycle.table[(a, a)] == -Id
    checks["J_normalizes_G_theta"] = all(inJ(cJ.tau(a, x)) for x in g0)
    cT = None
    if T is not None:
        K = Ks[(n // 2, n // 2)]
        g0T = _sp_pair_generators(n)
        cT = cocycle_from_section(MatrixGroupIface(2 * n), gam, {e: Id, a: T}, g0T)
        checks["T_squared_identity"] = T @ T == Id
        checks["T_symplectic"] = is_symplectic(T)
        checks["cocycle_T_trivial"] = all(v == Id for v in cT.cocycle.table.values())
        checks["T_normalizes_G_tau"] = all(cT.tau(a, x) @ K == K @ cT.tau(a, x) for x in g0T)
    return SpCatalog(n, J, S, P, Ks, T, checks, cJ, cT)


def _gl_block_generators(n: int) -> list:
    out = []
    one = CycNum.rational(1, 4)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            rows = [{k: one} for k in range(n)]
            rows[i][j] = one
            A = CycMatrix(n, n, rows)
            out.append(CycMatrix.block_diag([A, A.inverse().transpose()]))
    D = CycMatrix.diag([CycNum.rational(2, 4)] + [one] * (n - 1))
    out.append(CycMatrix.block_diag([D, D.inverse()]))
    return out


def _sp_pair_generators(n: int) -> list:
    """Generators of Sp(n/2) x Sp(n/2) inside Sp(2n), in the split layout."""
    h = n // 2
    one = CycNum.rational(1, 4)
    out = []
    for blk in (0, 1):
        for r in range(h):
            # (I, E; 0, I) and (I, 0; E, I) shears on one Lagrangian pair
            a = blk * h + r
            for up in (True, False):
                rows = [{k: one} for k in range(2 * n)]
                if up:
                    rows[a][n + a] = one
                else:
                    rows[n + a][a] = one
                out.append(CycMatrix(2 * n, 2 * n, rows))
    return out


# --- census ---------------------------------------------------------------------------------------


def bundle_shape(q_trivial: bool) -> str:
    return "symplectic_on_E" if q_trivial else "pairing_E_qE_dual"


def variants_of(group, l, delta, q, n) -> list:
    """All quadruples obtained by the order choices at each extension step, one per class."""
    base = construct_admissible_s_sp(group, l, delta, q, n)
    options = [st.available_orders for st in base.steps]
    out = {}
    for choice in itertools.product(*options):
        t = construct_admissible_s_sp(group, l, delta, q, n, order_choice=list(choice))
        out.setdefault(theta_class_sp(t), t)
    return [out[k] for k in sorted(out, key=lambda c: c.canonical)]


def enumerate_components_sp(n: int, group: FinAbGroup, dedup_aut: bool = False, guard: int = 64,
                            verify: bool = True, select=None) -> list[dict]:
    """One row per (pairing, q); ``select(i)`` restricts to the i-th pairing in sorted order."""
    _require_exponent_two(group)
    if group.order > guard:
        raise GuardExceeded(f"|Lambda| = {group.order} exceeds guard {guard}")
    pairings = enumerate_antisymmetric_pairings(group, guard=guard)
    if dedup_aut:
        chosen = [(sorted(o, key=lambda p: p.matrix)[0], len(o)) for o in pairing_orbits(group, pairings)]
    else:
        chosen = [(p, 1) for p in pairings]
    rows = []
    for idx, (l, mult) in enumerate(sorted(chosen, key=lambda pc: pc[0].matrix)):
        if select is not None and not select(idx):
            continue
        delta = maximal_isotropic_subgroups(group, l, guard=guard)[0]
        iso = isotropy_data(group, l, delta)
        Dd = iso.delta_dual
        fL = set(iso.f_image())
        for q in Dd.elements():
            k = _ker_q_order(iso, q)
            adm = n % k == 0
            row = {
                "pairing": [list(r) for r in l.matrix],
                "pairing_upper": list(l.upper()),
                "orbit_size": mult,
                "delta": [list(g) for g in delta.generators],
                "delta_order": delta.order,
                "q": list(q),
                "q_trivial": q == Dd.zero,
                "q_in_f": q in fL,
                "ker_q_order": k,
                "admissible": adm,
                "cover_group": list(Dd.invariant_factors),
                "rank": 2 * n // delta.order if adm else None,
                "bundle_shape": bundle_shape(q == Dd.zero),
                "variant_count": 0,
                "variants": [],
                "checks": {},
            }
            if adm:
                vs = variants_of(group, l, delta, q, n)
                row["variant_count"] = len(vs)
                for t in vs:
                    entry = {
                        "order_tags": [[list(x), o] for x, o in order_tags(t)],
                        "step_orders": [st.order for st in t.steps],
                        "step_cases": [st.case for st in t.steps],
                        "witness": t.to_json(),
                    }
                    if verify:
                        rep = check_representative_quadruple(t, exhaustive=group.order <= 16)
                        a = is_admissible_sp(t)
                        entry["checks"] = {
                            "representative_quadruple": bool(rep),
                            "admissible_by_weights": a.by_weights,
                            "admissible_by_c_theta": a.by_c_theta,
                            "induced_pairing_roundtrip": induced_pairing(t.s, group) == l,
                            "characteristic_hom_roundtrip": characteristic_hom(group, delta, t.s, Dd) == q,
                        }
                    row["variants"].append(entry)
            rows.append(row)
    return rows
