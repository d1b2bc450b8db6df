"""Phase space of the Neumann system on T*S^n.

Every operation accepts either an exact point (coordinates are Fractions,
stored in numpy object arrays) or a binary64 point, with identical
semantics.  Exact points must satisfy the constraints exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    ConstraintViolation,
    DimensionMismatch,
    DuplicateEigenvalue,
    EmptySpec,
    NonpositiveEigenvalue,
    ZeroPosition,
)
from .ratpoly import to_fraction

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class PotentialSpec:
    """Distinct eigenvalues a_1 < ... < a_k of A with their multiplicities.

    Coordinates are grouped contiguously: the first ``m_1`` coordinates carry
    ``a_1``, the next ``m_2`` carry ``a_2``, and so on.
    """

    eigenvalues: tuple[Fraction, ...]
    multiplicities: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.eigenvalues)

    @property
    def r(self) -> int:
        return sum(1 for m in self.multiplicities if m > 1)

    @property
    def dim(self) -> int:
        """Ambient dimension n+1."""
        return sum(self.multiplicities)

    @property
    def n(self) -> int:
        return self.dim - 1

    @property
    def groups(self) -> tuple[tuple[int, ...], ...]:
        out, start = [], 0
        for m in self.multiplicities:
            out.append(tuple(range(start, start + m)))
            start += m
        return tuple(out)

    @property
    def degenerate(self) -> tuple[int, ...]:
        """Indices i of eigenvalues with m_i > 1, ascending."""
        return tuple(i for i, m in enumerate(self.multiplicities) if m > 1)

    @property
    def diagonal(self) -> tuple[Fraction, ...]:
        return tuple(a for a, m in zip(self.eigenvalues, self.multiplicities) for _ in range(m))

    def matrix(self, exact: bool = True) -> np.ndarray:
        if exact:
            out = np.zeros((self.dim, self.dim), dtype=object)
            out[...] = Fraction(0)
            for i, a in enumerate(self.diagonal):
                out[i, i] = a
            return out
        return np.diag([float(a) for a in self.diagonal])


def make_potential(values: Sequence, mults: Sequence[int]) -> PotentialSpec:
    if len(values) != len(mults):
        raise EmptySpec(f"{len(values)} eigenvalues but {len(mults)} multiplicities")
    if not values:
        raise EmptySpec("no eigenvalues given")
    vals = [to_fraction(v) for v in values]
    ms = [int(m) for m in mults]
    if any(m < 1 for m in ms):
        raise EmptySpec(f"multiplicities must be positive: {ms}")
    if any(v <= 0 for v in vals):
        raise NonpositiveEigenvalue(f"eigenvalues must be positive: {[str(v) for v in vals]}")
    if len(set(vals)) != len(vals):
        raise DuplicateEigenvalue(f"eigenvalues must be distinct: {[str(v) for v in vals]}")
    if len(vals) < 2:
        raise EmptySpec("need at least two distinct eigenvalues")
    pairs = sorted(zip(vals, ms))
    return PotentialSpec(tuple(v for v, _ in pairs), tuple(m for _, m in pairs))


@dataclass(frozen=True, eq=False)
class PhasePoint:
    q: np.ndarray
    p: np.ndarray

    @property
    def exact(self) -> bool:
        return self.q.dtype == object

    @property
    def dim(self) -> int:
        return len(self.q)

    def as_float(self) -> PhasePoint:
        if not self.exact:
            return self
        return PhasePoint(self.q.astype(float), self.p.astype(float))

    def __eq__(self, other):
        if not isinstance(other, PhasePoint):
            return NotImplemented
        return (
            self.exact == other.exact
            and np.array_equal(self.q, other.q)
            and np.array_equal(self.p, other.p)
        )


def _is_exact_input(xs) -> bool:
    return all(isinstance(x, (int, Fraction, str)) and not isinstance(x, bool) for x in xs)


def _vector(xs, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(len(xs), dtype=object)
        out[:] = [to_fraction(x) for x in xs]
        return out
    return np.asarray([float(x) for x in xs], dtype=float)


def make_state(q: Sequence, p: Sequence, tol: float = DEFAULT_TOL, exact: bool | None = None) -> PhasePoint:
    """Validate (q, p) against |q|^2 = 1 and <q,p> = 0; never projects.

    With ``exact=None`` the mode is inferred: ints, Fractions and decimal
    strings give an exact point, anything else a float point.
    """
    if len(q) != len(p):
        raise DimensionMismatch(f"len(q)={len(q)} != len(p)={len(p)}")
    if exact is None:
        exact = _is_exact_input(list(q) + list(p))
    qv, pv = _vector(q, exact), _vector(p, exact)
    qq = sum(qv * qv) - 1
    qp = sum(qv * pv)
    if exact:
        if qq != 0:
            raise ConstraintViolation("<q,q>=1", abs(qq))
        if qp != 0:
            raise ConstraintViolation("<q,p>=0", abs(qp))
    else:
        if abs(qq) > tol:
            raise ConstraintViolation("<q,q>=1", abs(qq))
        if abs(qp) > tol:
            raise ConstraintViolation("<q,p>=0", abs(qp))
    return PhasePoint(qv, pv)


def project_to_manifold(q: Sequence, p: Sequence) -> PhasePoint:
    """Normalize q and remove the normal component of p (binary64)."""
    qv = np.asarray(q, dtype=float)
    pv = np.asarray(p, dtype=float)
    if qv.shape != pv.shape:
        raise DimensionMismatch(f"shapes {qv.shape} and {pv.shape}")
    norm = np.linalg.norm(qv)
    if norm == 0:
        raise ZeroPosition("cannot project q = 0 onto the sphere")
    qh = qv / norm
    return PhasePoint(qh, pv - np.dot(pv, qh) * qh)


def _check_dim(s: PhasePoint, a: PotentialSpec):
    if s.dim != a.dim or len(s.p) != a.dim:
        raise DimensionMismatch(f"state has dimension {s.dim}, potential has {a.dim}")


def _diag(s: PhasePoint, a: PotentialSpec) -> np.ndarray:
    d = a.diagonal
    if s.exact:
        out = np.empty(len(d), dtype=object)
        out[:] = d
        return out
    return np.asarray([float(x) for x in d])


def hamiltonian(s: PhasePoint, a: PotentialSpec):
    _check_dim(s, a)
    diag = _diag(s, a)
    return (sum(s.p * s.p) + sum(diag * s.q * s.q)) / 2


def multiplier(s: PhasePoint, a: PotentialSpec):
    """Tangency-preserving Lagrange multiplier <Aq,q> - |p|^2."""
    diag = _diag(s, a)
    return sum(diag * s.q * s.q) - sum(s.p * s.p)


def vector_field(s: PhasePoint, a: PotentialSpec) -> tuple[np.ndarray, np.ndarray]:
    """(dq, dp) = (p, -Aq + eps*q) with eps = <Aq,q> - |p|^2."""
    _check_dim(s, a)
    eps = multiplier(s, a)
    return s.p.copy(), -_diag(s, a) * s.q + eps * s.q


@dataclass(frozen=True)
class GroupMoments:
    """Per-group bilinear moments ||q||_i^2, <q,p>_i, ||p||_i^2."""

    qq: tuple
    qp: tuple
    pp: tuple

    def __iter__(self):
        return iter(zip(self.qq, self.qp, self.pp))


def group_moments(s: PhasePoint, a: PotentialSpec) -> GroupMoments:
    _check_dim(s, a)
    qq, qp, pp = [], [], []
    zero = Fraction(0) if s.exact else 0.0
    for g in a.groups:
        qq.append(sum((s.q[i] * s.q[i] for i in g), zero))
        qp.append(sum((s.q[i] * s.p[i] for i in g), zero))
        pp.append(sum((s.p[i] * s.p[i] for i in g), zero))
    return GroupMoments(tuple(qq), tuple(qp), tuple(pp))


def random_state(a: PotentialSpec, seed: int) -> PhasePoint:
    """A float point: q uniform on the sphere, p Gaussian projected to T_qS^n."""
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(a.dim)
    p = rng.standard_normal(a.dim)
    return project_to_manifold(q, p)


def _inverse_stereographic(t: Sequence[Fraction], axis: int, sign: int, dim: int) -> list[Fraction]:
    # pole at sign*e_axis; the image of t is (2t, sign*(|t|^2-1)) / (|t|^2+1)
    t2 = sum(x * x for x in t)
    q, it = [], iter(t)
    for i in range(dim):
        if i == axis:
            q.append(sign * (t2 - 1) / (t2 + 1))
        else:
            q.append(2 * next(it) / (t2 + 1))
    return q


def _exact_point(q: list[Fraction], p: list[Fraction]) -> PhasePoint:
    qp = sum(x * y for x, y in zip(q, p))
    p = [y - qp * x for x, y in zip(q, p)]
    return PhasePoint(_vector(q, True), _vector(p, True))


def random_rational_state(a: PotentialSpec, seed: int, height: int = 5) -> PhasePoint:
    """An exact point with small-height rational coordinates.

    q is the inverse stereographic image of a random rational vector, p a
    random rational vector made tangent exactly.
    """
    rng = random.Random(seed)

    def rat():
        return Fraction(rng.randint(-height, height), rng.randint(1, height))

    t = [rat() for _ in range(a.n)]
    q = _inverse_stereographic(t, rng.randrange(a.dim), rng.choice((-1, 1)), a.dim)
    return _exact_point(q, [rat() for _ in range(a.dim)])


def rationalize_state(s: PhasePoint, max_denominator: int = 10**12) -> PhasePoint:
    """An exact point within roughly 1/max_denominator of a float point."""
    if s.exact:
        return s
    q = np.asarray(s.q, dtype=float)
    q = q / np.linalg.norm(q)
    axis = int(np.argmax(np.abs(q)))
    sign = -1 if q[axis] > 0 else 1  # project from the pole farthest from q
    t = [
        Fraction(float(q[i] / (1 - sign * q[axis]))).limit_denominator(max_denominator)
        for i in range(len(q))
        if i != axis
    ]
    qe = _inverse_stereographic(t, axis, sign, len(q))
    pe = [Fraction(float(x)).limit_denominator(max_denominator) for x in s.p]
    return _exact_point(qe, pe)
