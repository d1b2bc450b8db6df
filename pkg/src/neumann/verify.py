"""Property checks run by ``neumann verify`` on a single configured state."""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import drift_report, integrate, integrate_lax
from .errors import FactorizationMismatch, FormViolation
from .laxflow import assemble_lax, check_form_preservation, lax_rhs
from .phase import PhasePoint, group_moments
from .spectral import (
    char_poly,
    classify,
    energy_identity,
    factor_curve,
    genus_report,
    invariants,
    q_polynomial,
)


@dataclass(frozen=True)
class Check:
    name: str
    kind: str  # identity | factorization | genus | lax | drift | crossval
    passed: bool
    detail: str


def uhlenbeck(s: PhasePoint, a) -> list:
    """Per-coordinate Uhlenbeck integrals for a nondegenerate potential."""
    d = a.diagonal
    out = []
    for i in range(a.dim):
        f = s.q[i] ** 2
        for j in range(a.dim):
            if j != i:
                f += (s.q[i] * s.p[j] - s.q[j] * s.p[i]) ** 2 / (d[i] - d[j])
        out.append(f)
    return out


def exact_checks(s: PhasePoint, a) -> list[Check]:
    checks = []
    inv = invariants(s, a)
    checks.append(Check("sum F_i = 1", "identity", sum(inv.F) == 1, f"sum F = {sum(inv.F)}"))
    mom = group_moments(s, a)
    lag = all(
        k == mom.qq[j] * mom.pp[j] - mom.qp[j] ** 2 == sum(x * x for x in b.flat) / 2
        for k, j, b in zip(inv.Ksq, inv.groups, inv.Kblocks)
    )
    checks.append(Check("Ksq = Lagrange = |K|_F^2/2", "identity", lag, f"Ksq = {[str(x) for x in inv.Ksq]}"))
    lhs, rhs = energy_identity(s, a)
    checks.append(Check("H = (sum a_i F_i + sum Ksq)/2", "identity", lhs == rhs, f"{lhs} vs {rhs}"))
    if a.r == 0:
        ok = tuple(uhlenbeck(s, a)) == inv.F
        checks.append(Check("nondegenerate F = Uhlenbeck", "identity", ok, "closed form compared"))

    L = assemble_lax(s, a)
    try:
        rhs_L = lax_rhs(L)
        sym = all(x == 0 for x in (rhs_L.coeff1 + rhs_L.coeff1.T).flat) and all(
            x == 0 for x in (rhs_L.coeff0 - rhs_L.coeff0.T).flat
        )
        checks.append(Check("[L,M] has Neumann form", "lax", sym, "lambda^3, lambda^2 vanish exactly"))
    except FormViolation as e:
        checks.append(Check("[L,M] has Neumann form", "lax", False, str(e)))

    try:
        d = factor_curve(char_poly(L), a, q_polynomial(s, a))
        checks.append(Check("spectral polynomial factorization", "factorization", True, "exact"))
        g = genus_report(d, a)
        ok = g.arithmetic_genus == a.k + a.r - 1 and g.geometric_genus <= g.arithmetic_genus
        checks.append(
            Check("genus", "genus", ok, f"g_a = {g.arithmetic_genus}, g = {g.geometric_genus}")
        )
    except FactorizationMismatch as e:
        checks.append(Check("spectral polynomial factorization", "factorization", False, str(e)))
    c = classify(a)
    checks.append(
        Check(
            "classification",
            "genus",
            c.superintegrable == (c.torus_dimension < c.degrees_of_freedom),
            f"superintegrable={c.superintegrable}, torus={c.torus_dimension}, n={c.degrees_of_freedom}",
        )
    )
    return checks


def numeric_checks(s: PhasePoint, a, t_final, h, stride, tol) -> list[Check]:
    checks = []
    r1 = check_form_preservation(s, a, 1e-3)
    r2 = check_form_preservation(s, a, 5e-4)
    if r1.residual < 1e-12:
        checks.append(Check("Lax equation residual O(h^2)", "lax", True, "stationary point"))
    else:
        ratio = r1.residual / r2.residual
        ok = tol["form_ratio_low"] <= ratio <= tol["form_ratio_high"]
        checks.append(Check("Lax equation residual O(h^2)", "lax", ok, f"ratio {ratio:.4f}"))

    traj = integrate(s, a, t_final, h, stride)
    rep = drift_report(traj, a)
    bad = rep.exceeding(tol["drift"])
    worst = max(rep.entries.items(), key=lambda kv: kv[1].max_rel)
    checks.append(
        Check(
            "conservation drift",
            "drift",
            not bad,
            f"worst {worst[0]} rel {worst[1].max_rel:.3e}" + (f"; exceeding {bad}" if bad else ""),
        )
    )
    checks.append(
        Check(
            "constraint drift",
            "drift",
            rep.constraint <= tol["constraint_drift"],
            f"{rep.constraint:.3e}",
        )
    )

    lax_end = integrate_lax(s, a, 1.0, 1e-4, stride=10_000)[-1]
    tr = integrate(s, a, 1.0, 1e-4, 10_000)
    phase_end = assemble_lax(PhasePoint(tr.q[-1], tr.p[-1]), a)
    err = (phase_end - lax_end).frobenius()
    checks.append(Check("phase flow vs Lax flow at t=1", "crossval", err <= tol["crossval"], f"{err:.3e}"))
    return checks


def run_checks(cfg) -> list[Check]:
    a = cfg.potential
    s_exact, _ = cfg.exact_state()
    s_float = cfg.state().as_float()
    return exact_checks(s_exact, a) + numeric_checks(
        s_float, a, cfg.t_final, cfg.h, cfg.stride, cfg.tolerances
    )


__all__ = ["Check", "exact_checks", "numeric_checks", "run_checks", "uhlenbeck"]
