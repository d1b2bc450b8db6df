"""Lax representation L(lambda) = lambda^2 A + lambda q^p - q(x)q.

The wedge convention is ``q^p = q(x)p - p(x)q``, so ``(q^p)[u, v] =
q_u p_v - q_v p_u``.  The flow is dL/dt = [L, M] with M = lambda A + q^p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormViolation, IntegrationFailure
from .phase import PhasePoint, PotentialSpec, _check_dim

FLOAT_FORM_TOL = 1e-12


def _comm(x, y):
    return x @ y - y @ x


@dataclass(frozen=True, eq=False)
class MatrixPoly2:
    """coeff2 * lambda^2 + coeff1 * lambda + coeff0."""

    coeff2: np.ndarray
    coeff1: np.ndarray
    coeff0: np.ndarray

    @property
    def exact(self) -> bool:
        return self.coeff0.dtype == object

    def __call__(self, lam):
        return self.coeff2 * (lam * lam) + self.coeff1 * lam + self.coeff0

    def coefficients(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.coeff2, self.coeff1, self.coeff0

    def __sub__(self, other: MatrixPoly2) -> MatrixPoly2:
        return MatrixPoly2(
            self.coeff2 - other.coeff2, self.coeff1 - other.coeff1, self.coeff0 - other.coeff0
        )

    def frobenius(self) -> float:
        """Frobenius norm of the stacked coefficient triple."""
        return float(
            np.sqrt(sum(float(np.sum(np.asarray(c, dtype=float) ** 2)) for c in self.coefficients()))
        )


@dataclass(frozen=True, eq=False)
class MatrixPoly1:
    """coeff1 * lambda + coeff0."""

    coeff1: np.ndarray
    coeff0: np.ndarray

    def __call__(self, lam):
        return self.coeff1 * lam + self.coeff0


def wedge(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    return np.outer(q, p) - np.outer(p, q)


def assemble_lax(s: PhasePoint, a: PotentialSpec) -> MatrixPoly2:
    _check_dim(s, a)
    return MatrixPoly2(a.matrix(exact=s.exact), wedge(s.q, s.p), -np.outer(s.q, s.q))


def plus_part(L: MatrixPoly2) -> MatrixPoly1:
    """Polynomial part of L(lambda)/lambda."""
    return MatrixPoly1(L.coeff2, L.coeff1)


def lax_rhs(L: MatrixPoly2) -> MatrixPoly2:
    """[L(lambda), M(lambda)] expanded in powers of lambda.

    The lambda^3 and lambda^2 coefficients must vanish for Neumann-form L;
    what remains is lambda*[C, A] + [C, B].
    """
    M = plus_part(L)
    A, B, C = L.coefficients()
    c3 = _comm(A, M.coeff1)
    c2 = _comm(A, M.coeff0) + _comm(B, M.coeff1)
    for power, c in ((3, c3), (2, c2)):
        if L.exact:
            if any(x != 0 for x in c.flat):
                raise FormViolation(f"lambda^{power} coefficient of [L, M] is nonzero")
        elif c.size and np.max(np.abs(c)) > FLOAT_FORM_TOL:
            raise FormViolation(f"lambda^{power} coefficient of [L, M] is {np.max(np.abs(c)):.3e}")
    c1 = _comm(B, M.coeff0) + _comm(C, M.coeff1)
    c0 = _comm(C, M.coeff0)
    return MatrixPoly2(c2, c1, c0)


def _rhs(q, p, diag):
    eps = np.dot(diag * q, q) - np.dot(p, p)
    return p, -diag * q + eps * q


def rk4_flow(q: np.ndarray, p: np.ndarray, diag: np.ndarray, t: float, substeps: int):
    """Classical RK4 on the ambient equations of motion (no projection)."""
    h = t / substeps
    for _ in range(substeps):
        k1 = _rhs(q, p, diag)
        k2 = _rhs(q + h / 2 * k1[0], p + h / 2 * k1[1], diag)
        k3 = _rhs(q + h / 2 * k2[0], p + h / 2 * k2[1], diag)
        k4 = _rhs(q + h * k3[0], p + h * k3[1], diag)
        q = q + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        p = p + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise IntegrationFailure("non-finite state in RK4 flow")
    return q, p


@dataclass(frozen=True)
class FormReport:
    h: float
    residual: float
    rhs_norm: float

    @property
    def relative(self) -> float:
        return self.residual / self.rhs_norm if self.rhs_norm else self.residual


def check_form_preservation(s: PhasePoint, a: PotentialSpec, h: float, substeps: int = 8) -> FormReport:
    """Central difference of L along the flow against lax_rhs(L).

    The residual is O(h^2); halving h should divide it by about 4.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    sf = s.as_float()
    diag = np.asarray([float(x) for x in a.diagonal])
    states = []
    for sign in (1.0, -1.0):
        q, p = rk4_flow(sf.q, sf.p, diag, sign * h, substeps)
        states.append(assemble_lax(PhasePoint(q, p), a))
    plus, minus = states
    D = MatrixPoly2(
        (plus.coeff2 - minus.coeff2) / (2 * h),
        (plus.coeff1 - minus.coeff1) / (2 * h),
        (plus.coeff0 - minus.coeff0) / (2 * h),
    )
    rhs = lax_rhs(assemble_lax(sf, a))
    return FormReport(h, (D - rhs).frobenius(), rhs.frobenius())


def check_neumann_form(L: MatrixPoly2, a: PotentialSpec, tol: float = 0.0) -> list[str]:
    """List the structural invariants of a Neumann-form L that fail."""
    problems = []
    A = a.matrix(exact=L.exact)

    def bad(x):
        if L.exact:
            return any(v != 0 for v in np.asarray(x).flat)
        return np.size(x) and float(np.max(np.abs(np.asarray(x, dtype=float)))) > tol

    if bad(L.coeff2 - A):
        problems.append("coeff2 != A")
    if bad(L.coeff1 + L.coeff1.T):
        problems.append("coeff1 not antisymmetric")
    if bad(L.coeff0 - L.coeff0.T):
        problems.append("coeff0 not symmetric")
    if bad(np.trace(L.coeff0) + 1):
        problems.append("trace(coeff0) != -1")
    return problems


__all__ = [
    "MatrixPoly1",
    "MatrixPoly2",
    "FormReport",
    "assemble_lax",
    "check_form_preservation",
    "check_neumann_form",
    "lax_rhs",
    "plus_part",
    "rk4_flow",
    "wedge",
]
