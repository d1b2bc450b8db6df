"""Exact rational polynomials.

Coefficients are :class:`fractions.Fraction`.  ``UniPoly`` stores its
coefficients lowest degree first with no trailing zeros, so the zero
polynomial is the empty tuple.  ``BivarPoly`` is a sparse map
``(deg_lambda, deg_mu) -> coefficient`` without stored zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DegreeTooHigh, DuplicatePole, ZeroPolynomial

__all__ = [
    "Fraction",
    "to_fraction",
    "UniPoly",
    "BivarPoly",
    "PartialFraction",
    "partial_fractions",
    "squarefree_part",
    "solve_exact",
    "charpoly_coeffs",
]


def to_fraction(x) -> Fraction:
    """Convert ints, Fractions, decimal strings and floats to a Fraction.

    Strings are parsed without going through binary floating point, so
    ``"0.1"`` becomes ``1/10``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class UniPoly:
    """Univariate polynomial with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _strip(to_fraction(c) for c in coeffs)

    @classmethod
    def constant(cls, c) -> UniPoly:
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c=1) -> UniPoly:
        return cls([0] * degree + [c])

    @classmethod
    def linear_root(cls, a) -> UniPoly:
        """The monic polynomial ``z - a``."""
        return cls([-to_fraction(a), 1])

    @classmethod
    def from_roots(cls, roots: Iterable) -> UniPoly:
        out = cls([1])
        for a in roots:
            out = out * cls.linear_root(a)
        return out

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = UniPoly([other])
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return format_poly(self.coeffs, "z")

    def _coerce(self, other):
        if isinstance(other, UniPoly):
            return other
        return UniPoly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            c = to_fraction(other)
            return UniPoly(c * x for x in self.coeffs)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = UniPoly([1])
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __divmod__(self, other: UniPoly):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [Fraction(0)] * max(0, len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            if c:
                quot[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return UniPoly(quot), UniPoly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> UniPoly:
        return UniPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> UniPoly:
        if self.is_zero():
            raise ZeroPolynomial("zero polynomial has no monic form")
        return self * (1 / self.leading)

    def gcd(self, other: UniPoly) -> UniPoly:
        """Monic gcd by the Euclidean algorithm (zero if both are zero)."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a if a.is_zero() else a.monic()


def format_poly(coeffs: Sequence, var: str) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and c == 1:
            terms.append(mono)
        elif mono and c == -1:
            terms.append("-" + mono)
        else:
            terms.append(f"{c}{'*' + mono if mono else ''}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


class BivarPoly:
    """Sparse bivariate polynomial in (lambda, mu)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean = {}
        for key, c in (terms or {}).items():
            c = to_fraction(c)
            if c != 0:
                clean[(int(key[0]), int(key[1]))] = c
        self.terms = clean

    @classmethod
    def lam(cls) -> BivarPoly:
        return cls({(1, 0): 1})

    @classmethod
    def mu(cls) -> BivarPoly:
        return cls({(0, 1): 1})

    @classmethod
    def constant(cls, c) -> BivarPoly:
        return cls({(0, 0): c})

    @classmethod
    def from_mu_coeffs(cls, coeffs: Sequence[UniPoly]) -> BivarPoly:
        """Build ``sum_j coeffs[j](lambda) * mu^j``."""
        return cls({(i, j): c for j, u in enumerate(coeffs) for i, c in enumerate(u.coeffs)})

    def coeff(self, i: int, j: int) -> Fraction:
        return self.terms.get((i, j), Fraction(0))

    def mu_coeff(self, j: int) -> UniPoly:
        """Coefficient of mu^j as a polynomial in lambda."""
        d = self.degree_lambda
        return UniPoly(self.coeff(i, j) for i in range(d + 1))

    @property
    def degree_lambda(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    @property
    def degree_mu(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self.terms.items()))
        return f"BivarPoly({{{body}}})"

    def _coerce(self, other):
        return other if isinstance(other, BivarPoly) else BivarPoly.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return BivarPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivarPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0) + a * b
        return BivarPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = BivarPoly.constant(1)
        for _ in range(e):
            out = out * self
        return out

    def __call__(self, lam, mu):
        return sum(c * lam**i * mu**j for (i, j), c in self.terms.items())


def solve_exact(matrix: Sequence[Sequence], rhs: Sequence) -> list[Fraction]:
    """Solve a square linear system exactly by Gauss-Jordan elimination.

    Raises ZeroDivisionError if the matrix is singular.
    """
    n = len(matrix)
    aug = [[to_fraction(x) for x in row] + [to_fraction(b)] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular linear system")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            f = aug[r][col]
            if r != col and f != 0:
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n] for row in aug]


def charpoly_coeffs(matrix, one=1):
    """Coefficients of det(mu*I - M), lowest power of mu first.

    Faddeev-LeVerrier recursion.  Works for any square matrix whose entries
    form a commutative ring containing the rationals (Fractions, UniPoly,
    floats); ``one`` is the ring identity used to build ``c*I``.
    """
    n = len(matrix)
    coeffs = [None] * (n + 1)
    coeffs[n] = one * 1
    prev = [[one * 0 for _ in range(n)] for _ in range(n)]
    for k in range(1, n + 1):
        c_prev = coeffs[n - k + 1]
        inner = [
            [prev[i][j] + (c_prev if i == j else one * 0) for j in range(n)] for i in range(n)
        ]
        prod = [
            [sum((matrix[i][l] * inner[l][j] for l in range(n)), one * 0) for j in range(n)]
            for i in range(n)
        ]
        trace = sum((prod[i][i] for i in range(n)), one * 0)
        coeffs[n - k] = trace * Fraction(-1, k)
        prev = prod
    return coeffs


@dataclass(frozen=True)
class PartialFraction:
    """sum_i simple[a_i]/(z - a_i) + sum_j double[a_j]/(z - a_j)^2."""

    poles: tuple[tuple[Fraction, int], ...]
    simple: dict = field(default_factory=dict)
    double: dict = field(default_factory=dict)

    def denominator(self) -> UniPoly:
        out = UniPoly([1])
        for a, order in self.poles:
            out = out * UniPoly.linear_root(a) ** order
        return out

    def numerator(self) -> UniPoly:
        """Numerator over :meth:`denominator` after recombining the terms."""
        den = self.denominator()
        out = UniPoly()
        for a, order in self.poles:
            lin = UniPoly.linear_root(a)
            out = out + (den // lin) * self.simple.get(a, 0)
            if order == 2:
                out = out + (den // (lin * lin)) * self.double.get(a, 0)
        return out

    def __call__(self, z):
        total = Fraction(0)
        for a, order in self.poles:
            total += self.simple.get(a, 0) / (z - a)
            if order == 2:
                total += self.double.get(a, 0) / (z - a) ** 2
        return total


def partial_fractions(numerator: UniPoly, poles: Sequence[tuple]) -> PartialFraction:
    """Decompose ``numerator / prod (z - a)^order`` with orders 1 or 2.

    The unknown coefficients are found from the coefficient-matching linear
    system obtained by clearing denominators.
    """
    poles = tuple((to_fraction(a), int(o)) for a, o in poles)
    if len({a for a, _ in poles}) != len(poles):
        raise DuplicatePole(f"pole locations must be distinct: {[str(a) for a, _ in poles]}")
    for a, o in poles:
        if o not in (1, 2):
            raise ValueError(f"pole order must be 1 or 2, got {o} at {a}")
    total = sum(o for _, o in poles)
    if numerator.degree >= total:
        raise DegreeTooHigh(f"numerator degree {numerator.degree} >= denominator degree {total}")

    den = UniPoly([1])
    for a, o in poles:
        den = den * UniPoly.linear_root(a) ** o
    basis = []  # (pole, order, polynomial multiplying the unknown)
    for a, o in poles:
        lin = UniPoly.linear_root(a)
        basis.append((a, 1, den // lin))
        if o == 2:
            basis.append((a, 2, den // (lin * lin)))
    rows = [[b[2][d] for b in basis] for d in range(total)]
    sol = solve_exact(rows, [numerator[d] for d in range(total)])
    simple, double = {}, {}
    for (a, order, _), x in zip(basis, sol):
        (simple if order == 1 else double)[a] = x
    return PartialFraction(poles, simple, double)


def squarefree_part(p: UniPoly) -> UniPoly:
    """Monic ``p / gcd(p, p')``."""
    if p.is_zero():
        raise ZeroPolynomial("squarefree part of the zero polynomial")
    if p.degree == 0:
        return UniPoly([1])
    return (p // p.gcd(p.derivative())).monic()
