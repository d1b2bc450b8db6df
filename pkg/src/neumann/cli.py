"""Command-line entry point.

    neumann {classify,invariants,spectral,simulate,verify} --config run.json

Exit codes: 0 success, 1 a verify check failed, 2 bad config, 3 constraint
violation, 4 factorization mismatch, 5 drift above tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from .dynamics import (
    DEFAULT_H,
    DEFAULT_STRIDE,
    DEFAULT_T_FINAL,
    drift_report,
    integrate,
)
from .errors import (
    ConfigError,
    ConstraintViolation,
    FactorizationMismatch,
    InvalidPotential,
    ParseError,
    SchemaError,
)
from .phase import (
    DEFAULT_TOL,
    PhasePoint,
    PotentialSpec,
    group_moments,
    hamiltonian,
    make_potential,
    make_state,
    random_rational_state,
    random_state,
    rationalize_state,
)
from .ratpoly import to_fraction
from .spectral import (
    classify,
    energy_identity,
    invariants,
    k_regularity,
    residue_integrals,
    spectral_summary,
)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_CONSTRAINT, EXIT_FACTOR, EXIT_DRIFT = 0, 1, 2, 3, 4, 5

DEFAULT_TOLERANCES = {
    "constraint": DEFAULT_TOL,
    "drift": 1e-6,
    "constraint_drift": 1e-9,
    "crossval": 1e-6,
    "form_ratio_low": 3.5,
    "form_ratio_high": 4.5,
}

_DECIMAL = {"type": ["string", "integer"], "pattern": r"^\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?\s*$|^\s*[-+]?\d+\s*/\s*\d+\s*$"}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["potential", "state"],
    "additionalProperties": False,
    "properties": {
        "potential": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["value", "multiplicity"],
                "additionalProperties": False,
                "properties": {
                    "value": _DECIMAL,
                    "multiplicity": {"type": "integer", "minimum": 1},
                },
            },
        },
        "state": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "q": {"type": "array", "items": _DECIMAL},
                "p": {"type": "array", "items": _DECIMAL},
                "seed": {"type": "integer"},
            },
        },
        "numbers_mode": {"enum": ["exact", "float"]},
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_final": {"type": ["string", "integer"]},
                "h": {"type": ["string", "integer"]},
                "stride": {"type": "integer", "minimum": 1},
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": ["string", "integer"]} for k in DEFAULT_TOLERANCES},
        },
    },
}


@dataclass
class RunConfig:
    potential: PotentialSpec
    q: list | None = None
    p: list | None = None
    seed: int | None = None
    numbers_mode: str = "exact"
    t_final: float = DEFAULT_T_FINAL
    h: float = DEFAULT_H
    stride: int = DEFAULT_STRIDE
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    @property
    def exact(self) -> bool:
        return self.numbers_mode == "exact"

    def state(self) -> PhasePoint:
        """The configured point in the configured number mode."""
        if self.seed is not None:
            if self.exact:
                return random_rational_state(self.potential, self.seed)
            return random_state(self.potential, self.seed)
        if len(self.q) != self.potential.dim or len(self.p) != self.potential.dim:
            raise SchemaError("state", f"q and p need {self.potential.dim} entries")
        return make_state(self.q, self.p, tol=self.tolerances["constraint"], exact=self.exact)

    def exact_state(self) -> tuple[PhasePoint, bool]:
        """An exact point for the symbolic pipeline and whether it was rationalized."""
        s = self.state()
        if s.exact:
            return s, False
        return rationalize_state(s), True


def _parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    try:
        # keep float literals as text so "0.1" and 0.1 both parse to 1/10
        raw = json.loads(text, parse_float=str)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}: {e.msg}", line=e.lineno) from None
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(x) for x in e.absolute_path) or "<root>"
        raise SchemaError(where, e.message) from None

    st = raw["state"]
    has_qp = "q" in st or "p" in st
    if has_qp and "seed" in st:
        raise SchemaError("state", "give either q/p or seed, not both")
    if not has_qp and "seed" not in st:
        raise SchemaError("state", "give either q/p or seed")
    if has_qp and not ("q" in st and "p" in st):
        raise SchemaError("state", "q and p must both be present")

    def num(x, name):
        try:
            return to_fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise SchemaError(name, str(e)) from None

    try:
        pot = make_potential(
            [num(e["value"], "potential/value") for e in raw["potential"]],
            [e["multiplicity"] for e in raw["potential"]],
        )
    except InvalidPotential as e:
        raise SchemaError("potential", str(e)) from None

    cfg = RunConfig(potential=pot, numbers_mode=raw.get("numbers_mode", "exact"))
    if has_qp:
        cfg.q = [num(x, "state/q") for x in st["q"]]
        cfg.p = [num(x, "state/p") for x in st["p"]]
    else:
        cfg.seed = st["seed"]
    integ = raw.get("integrator", {})
    if "t_final" in integ:
        cfg.t_final = float(num(integ["t_final"], "integrator/t_final"))
    if "h" in integ:
        cfg.h = float(num(integ["h"], "integrator/h"))
    if "stride" in integ:
        cfg.stride = integ["stride"]
    for k, v in raw.get("tolerances", {}).items():
        cfg.tolerances[k] = float(num(v, f"tolerances/{k}"))
    if not cfg.t_final > 0 or not cfg.h > 0:
        raise SchemaError("integrator", "t_final and h must be positive")
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
    return _parse_config_text(text, str(path))


# serialization


def _ser(x):
    """Fractions -> "p/q" strings, floats stay JSON numbers, arrays -> lists."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_ser(v) for v in x.tolist()] if x.dtype != object else [_ser(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _ser(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_ser(v) for v in x]
    return x


def _dump(obj) -> str:
    return json.dumps(_ser(obj), indent=2) + "\n"


def _fmt(x) -> str:
    return format(float(x), ".17g")


def classification_json(a: PotentialSpec) -> dict:
    c = classify(a)
    return {
        "superintegrable": c.superintegrable,
        "torus_dimension": c.torus_dimension,
        "degrees_of_freedom": c.degrees_of_freedom,
        "max_multiplicity": c.max_multiplicity,
    }


def invariants_json(cfg: RunConfig) -> dict:
    a = cfg.potential
    s = cfg.state()
    inv = invariants(s, a)
    if s.exact:
        lhs, rhs = energy_identity(s, a)
    else:
        lhs = hamiltonian(s, a)
        rhs = (sum(float(v) * f for v, f in zip(a.eigenvalues, inv.F)) + sum(inv.Ksq)) / 2
    return {
        "mode": "exact" if s.exact else "float",
        "F": list(inv.F),
        "Ksq": list(inv.Ksq),
        "Ksq_eigenvalues": [a.eigenvalues[j] for j in inv.groups],
        "Kblocks": [b for b in inv.Kblocks],
        "energy": {"lhs": lhs, "rhs": rhs, "equal": bool(lhs == rhs) if s.exact else bool(abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs)))},
        "k_regularity": [{"eigenvalue": a.eigenvalues[g], "regular": r} for g, r in k_regularity(inv)],
    }


def spectral_json(cfg: RunConfig) -> dict:
    a = cfg.potential
    s, rationalized = cfg.exact_state()
    summ = spectral_summary(s, a)
    d, g = summ.decomposition, summ.genus
    return {
        "rationalized": rationalized,
        "char_poly": [
            {"lambda": i, "mu": j, "coeff": c} for (i, j), c in sorted(summ.char_poly.terms.items())
        ],
        "Q": list(d.hyper_numerator.coeffs),
        "components": {
            "point": d.point_component,
            "parabolas": list(d.parabolas),
            "hyperelliptic": {
                "numerator": list(d.hyper_numerator.coeffs),
                "denominator": list(d.hyper_denominator.coeffs),
                "branch": list(d.branch_poly.coeffs),
            },
            "prefactor": {
                "lambda_exponent": d.lambda_exponent,
                "z_minus_a_exponents": [{"a": k, "exponent": v} for k, v in d.z_exponents.items()],
            },
        },
        "genus": {
            "arithmetic_genus": g.arithmetic_genus,
            "geometric_genus": g.geometric_genus,
            "torus_dimension": g.torus_dimension,
            "squarefree_branch": list(g.squarefree_branch.coeffs),
            "cancellations": list(g.cancellations),
        },
        "identity_verified": True,
    }


def drift_json(report, traj, cfg: RunConfig) -> dict:
    return {
        "scheme": traj.scheme,
        "step": traj.step,
        "stride": traj.stride,
        "t_final": float(traj.times[-1]),
        "samples": len(traj),
        "entries": {
            k: {"initial": d.initial, "max_abs": d.max_abs, "max_rel": d.max_rel}
            for k, d in report.entries.items()
        },
        "constraint": {"norm": report.constraint_norm, "tangency": report.constraint_tangency},
    }


def trajectory_csv(traj, a: PotentialSpec) -> str:
    dim = a.dim
    header = ["t"] + [f"q_{i + 1}" for i in range(dim)] + [f"p_{i + 1}" for i in range(dim)]
    header += ["H"] + [f"F_{i + 1}" for i in range(a.k)] + [f"Ksq_{j + 1}" for j in a.degenerate]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for t, st in zip(traj.times, traj.states):
        F, Ksq = residue_integrals(group_moments(st, a), a)
        row = [t, *st.q, *st.p, hamiltonian(st, a), *F, *Ksq]
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def read_trajectory_csv(text: str) -> tuple[list[str], np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.asarray([[float(x) for x in r] for r in rows[1:]])


def _write(text: str, out):
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# commands


def cmd_classify(cfg, args):
    _write(_dump(classification_json(cfg.potential)), args.out)
    return EXIT_OK


def cmd_invariants(cfg, args):
    _write(_dump(invariants_json(cfg)), args.out)
    return EXIT_OK


def cmd_spectral(cfg, args):
    try:
        report = spectral_json(cfg)
    except FactorizationMismatch as e:
        _write(_dump({"identity_verified": False, "error": str(e)}), args.out)
        return EXIT_FACTOR
    _write(_dump(report), args.out)
    return EXIT_OK


def _csv_path(args):
    if args.csv:
        return Path(args.csv)
    if args.out and args.out != "-":
        return Path(args.out).with_suffix(".csv")
    return None


def cmd_simulate(cfg, args):
    a = cfg.potential
    traj = integrate(cfg.state(), a, cfg.t_final, cfg.h, cfg.stride)
    report = drift_report(traj, a)
    csv_path = _csv_path(args)
    if csv_path is not None:
        csv_path.write_text(trajectory_csv(traj, a), encoding="utf-8", newline="")
    _write(_dump(drift_json(report, traj, cfg)), args.out)
    tol = cfg.tolerances
    if report.exceeding(tol["drift"]) or report.constraint > tol["constraint_drift"]:
        return EXIT_DRIFT
    return EXIT_OK


def cmd_verify(cfg, args):
    from .verify import run_checks

    checks = run_checks(cfg)
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}", file=sys.stderr)
    ok = all(c.passed for c in checks)
    _write(
        _dump({"passed": ok, "checks": [{"name": c.name, "kind": c.kind, "passed": c.passed, "detail": c.detail} for c in checks]}),
        args.out,
    )
    if ok:
        return EXIT_OK
    kinds = {c.kind for c in checks if not c.passed}
    if "factorization" in kinds:
        return EXIT_FACTOR
    if "drift" in kinds:
        return EXIT_DRIFT
    return EXIT_CHECK


COMMANDS = {
    "classify": cmd_classify,
    "invariants": cmd_invariants,
    "spectral": cmd_spectral,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neumann", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", default=None, help="JSON report path (default stdout)")
    parser.add_argument("--csv", default=None, help="simulate: trajectory CSV path")
    parser.add_argument("--t-final", type=float, default=None)
    parser.add_argument("--dt", type=float, default=None)
    parser.add_argument("--stride", type=int, default=None)
    parser.add_argument("--mode", choices=["exact", "float"], default=None)
    return parser


def run(command: str, cfg: RunConfig, args) -> int:
    try:
        return COMMANDS[command](cfg, args)
    except ConstraintViolation as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except FactorizationMismatch as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FACTOR
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if args.t_final is not None:
        cfg.t_final = args.t_final
    if args.dt is not None:
        cfg.h = args.dt
    if args.stride is not None:
        cfg.stride = args.stride
    if args.mode is not None:
        cfg.numbers_mode = args.mode
    if not cfg.t_final > 0 or not cfg.h > 0 or cfg.stride < 1:
        print("config error: t_final, dt and stride must be positive", file=sys.stderr)
        return EXIT_CONFIG
    return run(args.command, cfg, args)


if __name__ == "__main__":
    sys.exit(main())
