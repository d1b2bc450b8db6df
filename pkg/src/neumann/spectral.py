"""Spectral curve, first integrals and classification.

The characteristic polynomial is ``det(mu*I - L(lambda))`` (monic in mu).
With ``z = mu / lambda^2`` it factors as

    lambda^{2n} prod_{m_i>1} (z-a_i)^{m_i-2} (lambda^2 D(z) + Q(z)),
    D(z) = prod_{m_i=1} (z-a_i) prod_{m_j>1} (z-a_j)^2,

where Q/D is the rational function

    sum_i F_i/(z-a_i) + sum_{m_j>1} K_j^2/(z-a_j)^2.

F_i are the Uhlenbeck-type integrals and K_j^2 the total angular momenta of
the degenerate eigenvalue groups.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import FactorizationMismatch, ZeroBranchPolynomial
from .laxflow import MatrixPoly2, assemble_lax, wedge
from .phase import GroupMoments, PhasePoint, PotentialSpec, group_moments, hamiltonian
from .ratpoly import (
    BivarPoly,
    PartialFraction,
    UniPoly,
    charpoly_coeffs,
    partial_fractions,
    squarefree_part,
)

# characteristic polynomial


def char_poly(L: MatrixPoly2) -> BivarPoly:
    """Exact det(mu*I - L(lambda)) as a polynomial in (lambda, mu)."""
    n = L.coeff0.shape[0]
    entries = [
        [UniPoly([L.coeff0[i, j], L.coeff1[i, j], L.coeff2[i, j]]) for j in range(n)]
        for i in range(n)
    ]
    return BivarPoly.from_mu_coeffs(charpoly_coeffs(entries, one=UniPoly([1])))


def char_poly_float(L: MatrixPoly2) -> np.ndarray:
    """Binary64 coefficients ``c[i, j]`` of lambda^i mu^j in det(mu*I - L).

    Same Faddeev-LeVerrier recursion as the exact path, on polynomial
    matrices stored as arrays of shape (degree+1, N, N).
    """
    N = L.coeff0.shape[0]
    Lp = np.stack([np.asarray(c, dtype=float) for c in (L.coeff0, L.coeff1, L.coeff2)])
    eye = np.eye(N)
    out = np.zeros((2 * N + 1, N + 1))
    out[0, N] = 1.0
    prev = np.zeros((1, N, N))
    c_prev = np.zeros(1)
    c_prev[0] = 1.0
    for k in range(1, N + 1):
        inner = np.zeros((max(prev.shape[0], len(c_prev)), N, N))
        inner[: prev.shape[0]] += prev
        inner[: len(c_prev)] += c_prev[:, None, None] * eye
        prod = np.zeros((inner.shape[0] + 2, N, N))
        for d in range(3):
            prod[d : d + inner.shape[0]] += np.einsum("ij,djk->dik", Lp[d], inner)
        c = -np.trace(prod, axis1=1, axis2=2) / k
        out[: len(c), N - k] = c
        prev, c_prev = prod, c
    return out


# first integrals


def residue_integrals(m: GroupMoments, a: PotentialSpec) -> tuple[tuple, tuple]:
    """Closed-form (F, Ksq) from group moments.

    F_i = qq_i + sum_{j!=i} (qq_i pp_j + qq_j pp_i - 2 qp_i qp_j)/(a_i - a_j),
    K_j^2 = qq_j pp_j - qp_j^2.
    """
    vals = a.eigenvalues
    F = []
    for i in range(a.k):
        f = m.qq[i]
        for j in range(a.k):
            if j != i:
                f = f + (m.qq[i] * m.pp[j] + m.qq[j] * m.pp[i] - 2 * m.qp[i] * m.qp[j]) / (
                    vals[i] - vals[j]
                )
        F.append(f)
    Ksq = tuple(m.qq[j] * m.pp[j] - m.qp[j] ** 2 for j in a.degenerate)
    return tuple(F), Ksq


def _poles(a: PotentialSpec) -> list[tuple[Fraction, int]]:
    return [(v, 1 if m == 1 else 2) for v, m in zip(a.eigenvalues, a.multiplicities)]


def phi_numerator(s: PhasePoint, a: PotentialSpec) -> UniPoly:
    """Numerator of -lambda^2 Phi_z over prod_i (z - a_i)^2 (all eigenvalues)."""
    mom = group_moments(s, a)
    P = UniPoly.from_roots(a.eigenvalues)
    cof = [P // UniPoly.linear_root(v) for v in a.eigenvalues]

    def weighted(xs):
        return sum((c * x for c, x in zip(cof, xs)), UniPoly())

    Sq, Sp, Sqp = weighted(mom.qq), weighted(mom.pp), weighted(mom.qp)
    return P * Sq + Sq * Sp - Sqp * Sqp


def _hyper_numerator(s: PhasePoint, a: PotentialSpec) -> UniPoly:
    """Q(z) assembled directly from -lambda^2 Phi_z, without residues."""
    num = phi_numerator(s, a)
    lins = [UniPoly.linear_root(v) for v in a.eigenvalues]
    for lin, mult in zip(lins, a.multiplicities):
        if mult == 1:
            num, rem = divmod(num, lin)
            if not rem.is_zero():
                raise ArithmeticError("double pole at a simple eigenvalue does not cancel")
    return num


def hyper_denominator(a: PotentialSpec) -> UniPoly:
    return UniPoly.from_roots(v for v, m in zip(a.eigenvalues, a.multiplicities) for _ in range(min(m, 2)))


def wa_decomposition(s: PhasePoint, a: PotentialSpec) -> PartialFraction:
    """Partial fractions of -lambda^2 Phi_z: simple residues F_i, double K_j^2."""
    if not s.exact:
        raise TypeError("wa_decomposition needs an exact phase point")
    return partial_fractions(_hyper_numerator(s, a), _poles(a))


def q_polynomial(s: PhasePoint, a: PotentialSpec) -> UniPoly:
    if not s.exact:
        raise TypeError("q_polynomial needs an exact phase point")
    return _hyper_numerator(s, a)


@dataclass(frozen=True, eq=False)
class InvariantSet:
    F: tuple
    Ksq: tuple
    Kblocks: tuple
    groups: tuple[int, ...]  # eigenvalue index of each Ksq / Kblock entry

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in self.F)


def k_blocks(s: PhasePoint, a: PotentialSpec) -> tuple[np.ndarray, ...]:
    """Antisymmetric blocks k_ik = q_u p_v - q_v p_u of each degenerate group."""
    out = []
    for j in a.degenerate:
        g = list(a.groups[j])
        out.append(wedge(s.q[g], s.p[g]))
    return tuple(out)


def invariants(s: PhasePoint, a: PotentialSpec) -> InvariantSet:
    """F_i, K_j^2 and the K_j blocks.

    Exact points go through the partial fraction route and are cross-checked
    against the closed-form residues, the Lagrange identity and the block
    norms.  Float points use the closed form only.
    """
    mom = group_moments(s, a)
    F_closed, Ksq_closed = residue_integrals(mom, a)
    blocks = k_blocks(s, a)
    if not s.exact:
        return InvariantSet(F_closed, Ksq_closed, blocks, a.degenerate)

    pf = wa_decomposition(s, a)
    F = tuple(pf.simple[v] for v in a.eigenvalues)
    Ksq = tuple(pf.double[a.eigenvalues[j]] for j in a.degenerate)
    if F != F_closed or Ksq != Ksq_closed:
        raise ArithmeticError("partial fractions disagree with closed-form residues")
    for ksq, block in zip(Ksq, blocks):
        if ksq != sum(x * x for x in block.flat) / 2:
            raise ArithmeticError("K_j^2 differs from half the squared block norm")
    return InvariantSet(F, Ksq, blocks, a.degenerate)


def energy_identity(s: PhasePoint, a: PotentialSpec):
    """(H, (sum a_i F_i + sum K_j^2)/2); the two agree on T*S^n."""
    inv = invariants(s, a)
    rhs = (sum(v * f for v, f in zip(a.eigenvalues, inv.F)) + sum(inv.Ksq)) / 2
    return hamiltonian(s, a), rhs


# curve factorization


def _homogenize(u: UniPoly, total: int) -> BivarPoly:
    # z^j -> mu^j lambda^{2(total-j)}
    if u.degree > total:
        raise ValueError(f"degree {u.degree} exceeds {total}")
    return BivarPoly({(2 * (total - j), j): c for j, c in enumerate(u.coeffs)})


@dataclass(frozen=True)
class CurveDecomposition:
    point_component: bool
    parabolas: tuple[Fraction, ...]
    hyper_numerator: UniPoly
    hyper_denominator: UniPoly
    branch_poly: UniPoly
    lambda_exponent: int
    z_exponents: dict = field(default_factory=dict)  # a_i -> m_i - 2 for m_i > 1
    factored: BivarPoly | None = None


def factored_form(a: PotentialSpec, Q: UniPoly) -> BivarPoly:
    """The right-hand side of the factorization, as a polynomial in (lambda, mu)."""
    G = UniPoly.from_roots(v for v, m in zip(a.eigenvalues, a.multiplicities) for _ in range(max(m - 2, 0)))
    D = hyper_denominator(a)
    n = a.n
    return _homogenize(G * D, n + 1) + _homogenize(G * Q, n)


def factor_curve(P: BivarPoly, a: PotentialSpec, Q: UniPoly) -> CurveDecomposition:
    """Check det(mu - L) against its factored form exactly and list components."""
    rhs = factored_form(a, Q)
    for key in sorted(set(P.terms) | set(rhs.terms)):
        if P.coeff(*key) != rhs.coeff(*key):
            raise FactorizationMismatch(key, P.coeff(*key), rhs.coeff(*key))
    simple = [v for v, m in zip(a.eigenvalues, a.multiplicities) if m == 1]
    return CurveDecomposition(
        point_component=True,
        parabolas=tuple(a.eigenvalues[j] for j in a.degenerate),
        hyper_numerator=Q,
        hyper_denominator=hyper_denominator(a),
        branch_poly=Q * UniPoly.from_roots(simple),
        lambda_exponent=2 * a.n,
        z_exponents={a.eigenvalues[j]: a.multiplicities[j] - 2 for j in a.degenerate},
        factored=rhs,
    )


@dataclass(frozen=True)
class GenusReport:
    arithmetic_genus: int
    geometric_genus: int
    torus_dimension: int
    squarefree_branch: UniPoly
    cancellations: tuple[Fraction, ...]


def genus_report(d: CurveDecomposition, a: PotentialSpec) -> GenusReport:
    if d.branch_poly.is_zero():
        raise ZeroBranchPolynomial("branch polynomial vanishes identically")
    sf = squarefree_part(d.branch_poly)
    # w^2 = f(z) with f squarefree of degree d has genus floor((d-1)/2)
    geometric = max(0, (sf.degree - 1) // 2)
    ga = a.k + a.r - 1
    cancels = tuple(v for v in a.eigenvalues if d.hyper_numerator(v) == 0)
    return GenusReport(ga, geometric, ga, sf, cancels)


# classification


@dataclass(frozen=True)
class Classification:
    superintegrable: bool
    torus_dimension: int
    degrees_of_freedom: int
    max_multiplicity: int


def classify(a: PotentialSpec) -> Classification:
    mmax = max(a.multiplicities)
    torus = a.k + a.r - 1
    sup = mmax >= 3
    if sup != (torus < a.n):
        raise AssertionError(f"classification inconsistent for multiplicities {a.multiplicities}")
    return Classification(sup, torus, a.n, mmax)


def is_regular(block) -> bool:
    """True iff every eigenvalue of the square matrix has a 1-dim eigenspace.

    Decided exactly: antisymmetric (normal) matrices are diagonalizable, so
    regularity is equivalent to a squarefree characteristic polynomial.
    Float entries are converted to their exact binary values.
    """
    m = np.asarray(block)
    n = m.shape[0]
    if n == 0:
        return True
    rows = [[Fraction(x) for x in row] for row in m.tolist()]
    chi = UniPoly(charpoly_coeffs(rows, one=Fraction(1)))
    return chi.gcd(chi.derivative()).degree == 0


def k_regularity(inv: InvariantSet) -> list[tuple[int, bool]]:
    return [(g, is_regular(b)) for g, b in zip(inv.groups, inv.Kblocks)]


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    char_poly: BivarPoly
    invariants: InvariantSet
    decomposition: CurveDecomposition
    genus: GenusReport
    classification: Classification
    regularity: list


def spectral_summary(s: PhasePoint, a: PotentialSpec) -> SpectralSummary:
    """Run the whole exact spectral pipeline on one point."""
    P = char_poly(assemble_lax(s, a))
    inv = invariants(s, a)
    d = factor_curve(P, a, q_polynomial(s, a))
    return SpectralSummary(P, inv, d, genus_report(d, a), classify(a), k_regularity(inv))
