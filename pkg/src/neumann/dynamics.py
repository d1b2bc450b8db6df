"""Time evolution on T*S^n and conservation diagnostics.

``step`` is a RATTLE scheme for H = |p|^2/2 + <Aq,q>/2 with the holonomic
constraint |q|^2 = 1.  ``integrate_lax`` integrates the Lax equation for
(B, C) directly with classical RK4 and serves only as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IntegrationFailure, MultiplierNoRealRoot
from .laxflow import MatrixPoly2, assemble_lax
from .phase import PhasePoint, PotentialSpec, group_moments, hamiltonian
from .spectral import char_poly_float, k_blocks, residue_integrals

DEFAULT_H = 1e-3
DEFAULT_STRIDE = 100
DEFAULT_T_FINAL = 100.0


def _diag(a: PotentialSpec) -> np.ndarray:
    return np.asarray([float(x) for x in a.diagonal])


def _rattle(q, p, diag, h):
    c = h * h / 2
    u = q + h * p - c * diag * q
    # |u + x q|^2 = 1 with x = c*nu
    qq = q @ q
    b = u @ q
    c0 = u @ u - 1.0
    disc = b * b - qq * c0
    if disc < 0:
        raise MultiplierNoRealRoot(f"no real multiplier for step {h}; reduce the step")
    # root that vanishes with h, in cancellation-free form
    x = -c0 / (b + math.copysign(math.sqrt(disc), b))
    q_new = u + x * q
    p_half = (q_new - q) / h
    w = p_half - (h / 2) * diag * q_new
    p_new = w - (w @ q_new) / (q_new @ q_new) * q_new
    return q_new, p_new


def step(s: PhasePoint, a: PotentialSpec, h: float) -> PhasePoint:
    """One RATTLE step (negative h runs the adjoint, which is the same scheme)."""
    if h == 0:
        raise ValueError("step size must be nonzero")
    sf = s.as_float()
    q, p = _rattle(sf.q, sf.p, _diag(a), float(h))
    return PhasePoint(q, p)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    q: np.ndarray  # (samples, n+1)
    p: np.ndarray
    step: float
    stride: int
    scheme: str = "rattle"

    @property
    def states(self) -> list[PhasePoint]:
        return [PhasePoint(qi, pi) for qi, pi in zip(self.q, self.p)]

    def __len__(self):
        return len(self.times)


def integrate(
    s: PhasePoint,
    a: PotentialSpec,
    t_final: float = DEFAULT_T_FINAL,
    h: float = DEFAULT_H,
    stride: int = DEFAULT_STRIDE,
) -> Trajectory:
    """Fixed-step RATTLE integration storing every ``stride``-th sample.

    The number of steps is round(t_final/h); sample i sits at i*stride*h.
    """
    if not t_final > 0 or not h > 0:
        raise ValueError("t_final and h must be positive")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    nsteps = int(round(t_final / h))
    diag = _diag(a)
    sf = s.as_float()
    q, p = sf.q.copy(), sf.p.copy()
    qs, ps, ts = [q], [p], [0.0]
    for i in range(1, nsteps + 1):
        q, p = _rattle(q, p, diag, h)
        if i % stride == 0:
            qs.append(q)
            ps.append(p)
            ts.append(i * h)
    if not np.all(np.isfinite(q)):
        raise IntegrationFailure("trajectory left the finite range")
    return Trajectory(np.asarray(ts), np.asarray(qs), np.asarray(ps), h, stride)


def _lax_rhs_bc(B, C, A):
    return C @ A - A @ C, C @ B - B @ C


def integrate_lax(
    s: PhasePoint, a: PotentialSpec, t_final: float, h: float, stride: int = 1
) -> list[MatrixPoly2]:
    """RK4 on dB/dt = [C, A], dC/dt = [C, B] with A frozen."""
    if not t_final > 0 or not h > 0:
        raise ValueError("t_final and h must be positive")
    L0 = assemble_lax(s.as_float(), a)
    A = np.asarray(L0.coeff2, dtype=float)
    B, C = L0.coeff1.copy(), L0.coeff0.copy()
    out = [MatrixPoly2(A, B, C)]
    nsteps = int(round(t_final / h))
    for i in range(1, nsteps + 1):
        k1 = _lax_rhs_bc(B, C, A)
        k2 = _lax_rhs_bc(B + h / 2 * k1[0], C + h / 2 * k1[1], A)
        k3 = _lax_rhs_bc(B + h / 2 * k2[0], C + h / 2 * k2[1], A)
        k4 = _lax_rhs_bc(B + h * k3[0], C + h * k3[1], A)
        B = B + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        C = C + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if i % stride == 0 or i == nsteps:
            out.append(MatrixPoly2(A, B, C))
    return out


# drift diagnostics


@dataclass(frozen=True)
class Drift:
    initial: float
    max_abs: float
    max_rel: float


@dataclass(frozen=True, eq=False)
class DriftReport:
    """Max drift of every monitored quantity along a trajectory.

    Relative drift divides by max(1, |initial value|).
    """

    entries: dict = field(default_factory=dict)
    constraint_norm: float = 0.0  # max | |q|^2 - 1 |
    constraint_tangency: float = 0.0  # max |<q,p>|

    @property
    def constraint(self) -> float:
        return max(self.constraint_norm, self.constraint_tangency)

    def max_relative(self, prefix: str = "") -> float:
        vals = [d.max_rel for k, d in self.entries.items() if k.startswith(prefix)]
        return max(vals, default=0.0)

    def exceeding(self, rel_tol: float, names=None) -> list[str]:
        keys = self.entries if names is None else names
        return [k for k in keys if self.entries[k].max_rel > rel_tol]


def monitored_quantities(s: PhasePoint, a: PotentialSpec, char_poly_keys=None) -> dict[str, float]:
    """Float values of H, F_i, K_j^2, K_j block entries and char-poly coefficients."""
    s = s.as_float()
    out = {"H": float(hamiltonian(s, a))}
    F, Ksq = residue_integrals(group_moments(s, a), a)
    for i, f in enumerate(F, 1):
        out[f"F_{i}"] = float(f)
    for j, ksq in zip(a.degenerate, Ksq):
        out[f"Ksq_{j + 1}"] = float(ksq)
    for j, block in zip(a.degenerate, k_blocks(s, a)):
        m = block.shape[0]
        for u in range(m):
            for v in range(u + 1, m):
                out[f"K_{j + 1}[{u + 1},{v + 1}]"] = float(block[u, v])
    P = char_poly_float(assemble_lax(s, a))
    if char_poly_keys is None:
        char_poly_keys = [tuple(ij) for ij in np.argwhere(np.abs(P) > 1e-12)]
    for i, j in char_poly_keys:
        out[f"P[{i},{j}]"] = float(P[i, j])
    return out


def drift_report(traj: Trajectory, a: PotentialSpec) -> DriftReport:
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    states = traj.states
    P0 = char_poly_float(assemble_lax(states[0], a))
    keys = [tuple(int(x) for x in ij) for ij in np.argwhere(np.abs(P0) > 1e-12)]
    first = monitored_quantities(states[0], a, keys)
    worst = {k: 0.0 for k in first}
    for st in states[1:]:
        vals = monitored_quantities(st, a, keys)
        for k, v in vals.items():
            worst[k] = max(worst[k], abs(v - first[k]))
    entries = {
        k: Drift(first[k], worst[k], worst[k] / max(1.0, abs(first[k]))) for k in first
    }
    norm = float(np.max(np.abs(np.einsum("ij,ij->i", traj.q, traj.q) - 1.0)))
    tang = float(np.max(np.abs(np.einsum("ij,ij->i", traj.q, traj.p))))
    return DriftReport(entries, norm, tang)


def coordinate_drift(traj: Trajectory, index: int = 0) -> float:
    """Spread of a single position coordinate; a non-conserved probe."""
    x = traj.q[:, index]
    return float(np.max(np.abs(x - x[0])))
