"""Batch front end: config parsing, solver orchestration, CSV emission.

One invocation runs one problem (a benchmark preset or a config file),
solves it with one or both solution routes, and writes per-circle CSV
files plus a plain-text run report (and optionally a validation report).
Outputs are byte-deterministic: rerunning the same configuration
reproduces every file exactly.

Config file grammar: one ``key = value`` per line, ``#`` starts a comment.
Traction harmonics are written ``p[-1] = 1.0`` / ``q[0] = 2.5``. Problem
keys: case, nu, plane (strain|stress), r, theta1, theta2, p[k], q[k].
Solver keys: N, epsilon, max_reps, M1, M2. Run keys: label, solution
(1|2|both), radii (comma list), samples, out, sign_flip (true|false),
validate (true|false), m2_multiplier.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import fields, solver1, solver2, validate
from .model import (
    CASE_IDS,
    PLANE_STRAIN,
    PLANE_STRESS,
    ProblemSpec,
    SolverConfig,
    TractionSpectrum,
    build_case_preset,
    preset_sample_radii,
)
from .quadrature import build_quadrature
from .series import continuation_params, taylor_coefficients
from .solver1 import ConvergenceError


class ConfigError(ValueError):
    """Config-file problem, carrying the offending line number."""

    def __init__(self, lineno: int | None, message: str):
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)
        self.lineno = lineno


@dataclass
class RunConfig:
    """Everything about a run that is not the problem or the solver."""

    label: str = "custom"
    solution_choice: str = "both"  # "1" | "2" | "both"
    sample_radii: tuple[float, ...] | None = None
    samples_per_circle: int = 720
    output_dir: Path = Path("results")
    sign_flip: bool = True
    emit_validation: bool = False
    m2_multiplier: int = 10

    def __post_init__(self) -> None:
        if self.solution_choice not in ("1", "2", "both"):
            raise ValueError(f"solution must be 1, 2 or both, got {self.solution_choice!r}")
        if self.samples_per_circle < 8:
            raise ValueError(f"samples must be >= 8, got {self.samples_per_circle}")
        if self.m2_multiplier < 1:
            raise ValueError(f"m2_multiplier must be >= 1, got {self.m2_multiplier}")


_HARMONIC_KEY = re.compile(r"^([pq])\[(-?\d+)\]$")

_PROBLEM_KEYS = {"case", "nu", "plane", "r", "theta1", "theta2"}
_SOLVER_KEYS = {"N", "epsilon", "max_reps", "M1", "M2"}
_RUN_KEYS = {
    "label",
    "solution",
    "radii",
    "samples",
    "out",
    "sign_flip",
    "validate",
    "m2_multiplier",
}


def _parse_float(value: str, lineno: int, key: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(lineno, f"malformed number for {key}: {value!r}") from None


def _parse_int(value: str, lineno: int, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(lineno, f"malformed integer for {key}: {value!r}") from None


def _parse_bool(value: str, lineno: int, key: str) -> bool:
    low = value.lower()
    if low in ("true", "on", "yes", "1"):
        return True
    if low in ("false", "off", "no", "0"):
        return False
    raise ConfigError(lineno, f"malformed boolean for {key}: {value!r}")


def parse_config(text: str) -> tuple[ProblemSpec, SolverConfig, RunConfig]:
    """Parse a config file into the three run ingredients.

    Raises ConfigError (with the line number) on unknown keys, malformed
    values, traction harmonics beyond the truncation order, or geometry
    that fails validation.
    """
    entries: dict[str, tuple[str, int]] = {}
    harmonics: dict[int, list] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        m = _HARMONIC_KEY.match(key)
        if m:
            which, k = m.group(1), int(m.group(2))
            slot = harmonics.setdefault(k, [0.0, 0.0, lineno])
            slot[0 if which == "p" else 1] = _parse_float(value, lineno, key)
            slot[2] = lineno
            continue
        if key not in _PROBLEM_KEYS | _SOLVER_KEYS | _RUN_KEYS:
            raise ConfigError(lineno, f"unknown key: {key!r}")
        entries[key] = (value, lineno)

    if not entries and not harmonics:
        raise ConfigError(None, "no case or geometry specified")

    spec: ProblemSpec | None = None
    solver_cfg = SolverConfig()
    run_cfg = RunConfig()

    if "case" in entries:
        value, lineno = entries["case"]
        case_id = value.upper()
        if case_id not in CASE_IDS:
            raise ConfigError(lineno, f"unknown case: {value!r}")
        spec, solver_cfg = build_case_preset(case_id)
        run_cfg = replace(
            run_cfg, label=f"case{case_id}", sample_radii=preset_sample_radii(case_id)
        )

    # solver overrides first: the harmonic bound check needs N
    if "N" in entries:
        value, lineno = entries["N"]
        solver_cfg = _replace_validated(solver_cfg, "N", _parse_int(value, lineno, "N"), lineno)
    if "epsilon" in entries:
        value, lineno = entries["epsilon"]
        solver_cfg = _replace_validated(
            solver_cfg, "epsilon", _parse_float(value, lineno, "epsilon"), lineno
        )
    if "max_reps" in entries:
        value, lineno = entries["max_reps"]
        solver_cfg = _replace_validated(
            solver_cfg, "max_reps", _parse_int(value, lineno, "max_reps"), lineno
        )
    for key in ("M1", "M2"):
        if key in entries:
            value, lineno = entries[key]
            solver_cfg = _replace_validated(
                solver_cfg, key, _parse_int(value, lineno, key), lineno
            )

    problem_overrides = {}
    if "nu" in entries:
        value, lineno = entries["nu"]
        nu = _parse_float(value, lineno, "nu")
        if not 0.0 < nu < 0.5:
            raise ConfigError(lineno, f"nu out of range (0, 0.5): {nu}")
        problem_overrides["nu"] = nu
    if "plane" in entries:
        value, lineno = entries["plane"]
        table = {"strain": PLANE_STRAIN, "stress": PLANE_STRESS}
        if value.lower() not in table:
            raise ConfigError(lineno, f"plane must be strain or stress, got {value!r}")
        problem_overrides["plane_condition"] = table[value.lower()]
    if "r" in entries:
        value, lineno = entries["r"]
        problem_overrides["r"] = _parse_float(value, lineno, "r")
    for key in ("theta1", "theta2"):
        if key in entries:
            value, lineno = entries[key]
            problem_overrides[key] = _parse_float(value, lineno, key)

    if harmonics:
        for k, (p, q, lineno) in sorted(harmonics.items()):
            if abs(k) > solver_cfg.N:
                raise ConfigError(
                    lineno,
                    f"traction harmonic |{k}| exceeds truncation order N = {solver_cfg.N}",
                )
        problem_overrides["traction"] = TractionSpectrum(
            {k: complex(p, q) for k, (p, q, _) in harmonics.items()}
        )
    elif spec is None:
        problem_overrides.setdefault("traction", TractionSpectrum())

    if spec is None:
        missing = [k for k in ("nu", "r", "theta1", "theta2") if k not in problem_overrides]
        if missing:
            raise ConfigError(
                None, f"no case or geometry specified (missing: {', '.join(missing)})"
            )
        problem_overrides.setdefault("plane_condition", PLANE_STRAIN)
        try:
            spec = ProblemSpec(**problem_overrides)
        except ValueError as exc:
            raise ConfigError(None, str(exc)) from None
    elif problem_overrides:
        try:
            spec = replace(spec, **problem_overrides)
        except ValueError as exc:
            raise ConfigError(None, str(exc)) from None
    if spec.traction.max_order() > solver_cfg.N:
        raise ConfigError(
            None,
            f"traction harmonic |{spec.traction.max_order()}| exceeds truncation "
            f"order N = {solver_cfg.N}",
        )

    run_overrides: dict = {}
    if "label" in entries:
        run_overrides["label"] = entries["label"][0]
    if "solution" in entries:
        run_overrides["solution_choice"] = entries["solution"][0]
    if "samples" in entries:
        value, lineno = entries["samples"]
        run_overrides["samples_per_circle"] = _parse_int(value, lineno, "samples")
    if "radii" in entries:
        value, lineno = entries["radii"]
        radii = tuple(
            _parse_float(part.strip(), lineno, "radii") for part in value.split(",")
        )
        run_overrides["sample_radii"] = radii
    if "out" in entries:
        run_overrides["output_dir"] = Path(entries["out"][0])
    if "sign_flip" in entries:
        value, lineno = entries["sign_flip"]
        run_overrides["sign_flip"] = _parse_bool(value, lineno, "sign_flip")
    if "validate" in entries:
        value, lineno = entries["validate"]
        run_overrides["emit_validation"] = _parse_bool(value, lineno, "validate")
    if "m2_multiplier" in entries:
        value, lineno = entries["m2_multiplier"]
        run_overrides["m2_multiplier"] = _parse_int(value, lineno, "m2_multiplier")
    try:
        run_cfg = replace(run_cfg, **run_overrides)
    except ValueError as exc:
        raise ConfigError(None, str(exc)) from None

    radii = run_cfg.sample_radii
    if radii is not None:
        for rho in radii:
            if not spec.r - 1e-12 <= rho <= 1.0 + 1e-12:
                raise ConfigError(
                    None, f"sample radius {rho} outside the annulus [{spec.r}, 1]"
                )
    return spec, solver_cfg, run_cfg


def _replace_validated(cfg: SolverConfig, key: str, value, lineno: int) -> SolverConfig:
    try:
        return replace(cfg, **{key: value})
    except ValueError as exc:
        raise ConfigError(lineno, str(exc)) from None


def format_samples(
    sol: fields.SeriesSolution,
    rigid: fields.RigidBody,
    rho: float,
    samples: int,
    sign_flip: bool,
) -> str:
    """CSV text for one sampling circle: one row per angle, increasing."""
    thetas = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    s_theta, s_rho, s_rt = fields.stress_on_circle(sol, rho, thetas)
    w = fields.displacement_complex_on_circle(sol, rho, thetas, rigid)
    sign = -1.0 if sign_flip else 1.0
    lines = ["theta_deg,rho,sigma_theta,sigma_rho,tau_rhotheta,u,v"]
    for i, th in enumerate(thetas):
        row = (
            math.degrees(th),
            rho,
            sign * s_theta[i],
            sign * s_rho[i],
            sign * s_rt[i],
            sign * w[i].real,
            sign * w[i].imag,
        )
        lines.append(",".join(f"{v:.17e}" for v in row))
    return "\n".join(lines) + "\n"


def emit_csv(
    path: Path,
    sol: fields.SeriesSolution,
    rigid: fields.RigidBody,
    rho: float,
    samples: int,
    sign_flip: bool,
) -> None:
    path.write_text(format_samples(sol, rigid, rho, samples, sign_flip))


def run_case(
    spec: ProblemSpec, solver_cfg: SolverConfig, run_cfg: RunConfig
) -> list[Path]:
    """Solve, sample and write all artifacts; returns the written paths.

    Raises ConvergenceError if a solver hits its rep cap.
    """
    out = run_cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    params = continuation_params(spec.kappa())
    coeffs = taylor_coefficients(spec, params, solver_cfg.N)
    quad = build_quadrature(spec, params, solver_cfg.N, solver_cfg.M1, solver_cfg.M2)

    solutions: dict[str, tuple[fields.SeriesSolution, solver1.IterationReport]] = {}
    if run_cfg.solution_choice in ("1", "both"):
        solutions["sol1"] = solver1.run(spec, solver_cfg)
    if run_cfg.solution_choice in ("2", "both"):
        solutions["sol2"] = solver2.run2(spec, solver_cfg, quad=quad)

    radii = run_cfg.sample_radii
    if radii is None:
        radii = (spec.r, 0.5 * (spec.r + 1.0), 1.0)

    for name in sorted(solutions):
        sol, _ = solutions[name]
        rigid = fields.rigid_body_constant(sol)
        for rho in radii:
            path = out / f"{run_cfg.label}_{name}_rho{rho:.3f}.csv"
            emit_csv(path, sol, rigid, rho, run_cfg.samples_per_circle, run_cfg.sign_flip)
            written.append(path)

    report_path = out / f"{run_cfg.label}_report.txt"
    report_path.write_text(_format_run_report(spec, solver_cfg, run_cfg, solutions, radii))
    written.append(report_path)

    if run_cfg.emit_validation:
        vreport = validate.ValidationReport(label=run_cfg.label)
        for name in sorted(solutions):
            vreport.checks[name] = validate.solution_checks(
                solutions[name][0], quad, run_cfg.samples_per_circle
            )
        if len(solutions) == 2:
            vreport.cross_solution_max_diff = validate.compare_solutions(
                solutions["sol1"][0], solutions["sol2"][0]
            )
            vreport.field_grid_max_diff = validate.field_grid_difference(
                solutions["sol1"][0], solutions["sol2"][0]
            )
        vreport.s_ratios = validate.check_c12_identity(
            spec, params, coeffs, solver_cfg.M2 * run_cfg.m2_multiplier
        )
        vpath = out / f"{run_cfg.label}_validation.txt"
        vpath.write_text(validate.format_report(vreport))
        written.append(vpath)
    return written


def _format_run_report(
    spec: ProblemSpec,
    solver_cfg: SolverConfig,
    run_cfg: RunConfig,
    solutions: dict,
    radii: tuple[float, ...],
) -> str:
    tr = spec.traction
    harmonic_bits = []
    for k in sorted(tr.coefficients):
        c = tr.coefficients[k]
        if c.real:
            harmonic_bits.append(f"p[{k}] = {c.real:g}")
        if c.imag:
            harmonic_bits.append(f"q[{k}] = {c.imag:g}")
    lines = [
        f"run report: {run_cfg.label}",
        "=" * (12 + len(run_cfg.label)),
        f"nu = {spec.nu:g} ({spec.plane_condition})   kappa = {spec.kappa():.12g}",
        f"r = {spec.r:g}   theta1 = {spec.theta1:.17g}   theta2 = {spec.theta2:.17g}",
        "traction: " + ("; ".join(harmonic_bits) if harmonic_bits else "none"),
        f"N = {solver_cfg.N}   epsilon = {solver_cfg.epsilon:g}   "
        f"M1 = {solver_cfg.M1}   M2 = {solver_cfg.M2}",
        f"sign convention: {'flipped' if run_cfg.sign_flip else 'raw'}   "
        f"samples per circle: {run_cfg.samples_per_circle}",
        f"sample radii: {', '.join(f'{rho:.3f}' for rho in radii)}",
    ]
    for name in sorted(solutions):
        _, rep = solutions[name]
        lines.append(
            f"{name}: Q = {rep.Q}   cond(alpha-system) = {rep.cond_alpha:.6g}   "
            f"cond(beta-system) = {rep.cond_beta:.6g}"
        )
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annulus-bvp",
        description=(
            "Stress and displacement in a unit annulus with a partially "
            "clamped outer boundary and a Fourier-specified inner traction."
        ),
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--case", choices=list(CASE_IDS), help="benchmark case preset")
    source.add_argument("--config", type=Path, help="config file path")
    parser.add_argument(
        "--solution", choices=["1", "2", "both"], default=None, help="solution route(s)"
    )
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--samples", type=int, default=None, help="angles per circle")
    parser.add_argument(
        "--radii", default=None, help="comma-separated sampling radii (in [r, 1])"
    )
    parser.add_argument(
        "--no-sign-flip",
        action="store_true",
        help="emit the raw analytic sign convention instead of the flipped one",
    )
    parser.add_argument(
        "--validate", action="store_true", help="also write the validation report"
    )
    parser.add_argument(
        "--m2-multiplier",
        type=int,
        default=None,
        help="clamped-arc point-count multiplier for the identity suite",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.case:
            spec, solver_cfg = build_case_preset(args.case)
            run_cfg = RunConfig(
                label=f"case{args.case}", sample_radii=preset_sample_radii(args.case)
            )
        else:
            try:
                text = args.config.read_text()
            except OSError as exc:
                print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
                return 2
            spec, solver_cfg, run_cfg = parse_config(text)

        overrides: dict = {}
        if args.solution is not None:
            overrides["solution_choice"] = args.solution
        if args.out is not None:
            overrides["output_dir"] = args.out
        if args.samples is not None:
            overrides["samples_per_circle"] = args.samples
        if args.radii is not None:
            overrides["sample_radii"] = tuple(
                float(part.strip()) for part in args.radii.split(",")
            )
        if args.no_sign_flip:
            overrides["sign_flip"] = False
        if args.validate:
            overrides["emit_validation"] = True
        if args.m2_multiplier is not None:
            overrides["m2_multiplier"] = args.m2_multiplier
        run_cfg = replace(run_cfg, **overrides)
        if run_cfg.sample_radii is not None:
            for rho in run_cfg.sample_radii:
                if not spec.r - 1e-12 <= rho <= 1.0 + 1e-12:
                    raise ConfigError(None, f"sample radius {rho} outside [{spec.r}, 1]")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        written = run_case(spec, solver_cfg, run_cfg)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
