"""Scenario-file front end: simulate, verify, eigen and compare subcommands.

Scenario files are flat JSON (schema in the README); trajectory output is CSV
with a fixed header, 17-significant-digit values, LF line endings and
``#``-prefixed footer comments.  Exit codes: 0 success, 1 I/O or parse
failure, 2 resonance/consistency violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConditionError,
    ConvergenceError,
    DegenerateSpectrumError,
    IntegrationError,
    InvalidInputError,
)
from .model import (
    LevelSystem,
    StateVector,
    build_q,
    check_consistency,
    check_resonance,
    full_solution,
    hamiltonian_full,
    hamiltonian_rwa,
)
from .oracle import IntegrationConfig, integrate_schrodinger
from .propagator import Method, eigenvectors_three_level, jacobi_eigendecompose
from .roots import closed_form_spectrum

_DEFAULT_SAMPLES = 1001
_KNOWN_OUTPUTS = ("populations", "amplitudes", "propagator", "conditions")


class ScenarioError(ValueError):
    """Scenario file could not be read, parsed or validated."""


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario: the physical system plus run parameters.

    ``initial`` is either a level index or a tuple of (re, im) pairs;
    ``outputs`` is advisory metadata naming the quantities of interest.
    """

    system: LevelSystem
    initial: int | tuple[tuple[float, float], ...]
    t_end: float
    samples: int = _DEFAULT_SAMPLES
    method: str | None = None
    outputs: tuple[str, ...] = field(default=("populations",))

    def initial_state(self) -> StateVector:
        if isinstance(self.initial, int):
            return StateVector.basis(self.system.n, self.initial)
        amplitudes = np.array([complex(re, im) for re, im in self.initial])
        return StateVector.normalized(amplitudes)


def scenario_from_dict(data: dict) -> Scenario:
    try:
        levels = [float(x) for x in data["levels"]]
        entries = data["couplings"]
        couplings = {}
        freqs = {}
        phases = {}
        for item in entries:
            pair = (int(item["i"]), int(item["j"]))
            couplings[pair] = float(item["g"])
            freqs[pair] = float(item["omega"])
            if "phi" in item:
                phases[pair] = float(item["phi"])
        system = LevelSystem(tuple(levels), couplings, freqs, phases)
        raw_initial = data["initial"]
        if isinstance(raw_initial, (int, float)) and not isinstance(raw_initial, bool):
            if int(raw_initial) != raw_initial or not 0 <= int(raw_initial) < system.n:
                raise ScenarioError(f"initial level index {raw_initial!r} out of range")
            initial: int | tuple = int(raw_initial)
        else:
            initial = tuple((float(re), float(im)) for re, im in raw_initial)
            if len(initial) != system.n:
                raise ScenarioError("initial amplitude list length must equal n")
        t_end = float(data["t_end"])
        if t_end < 0.0:
            raise ScenarioError("t_end must be non-negative")
        samples = int(data.get("samples", _DEFAULT_SAMPLES))
        if samples < 1 or (t_end > 0.0 and samples < 2):
            raise ScenarioError("samples must be at least 2 (1 when t_end is 0)")
        method = data.get("method")
        if method is not None:
            method = str(method)
            if method != "auto" and method not in Method._value2member_map_:
                raise ScenarioError(f"unknown method {method!r}")
        outputs = tuple(str(o) for o in data.get("outputs", ("populations",)))
        for o in outputs:
            if o not in _KNOWN_OUTPUTS:
                raise ScenarioError(f"unknown output kind {o!r}")
        return Scenario(system, initial, t_end, samples, method, outputs)
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ScenarioError(f"invalid scenario: {exc}") from exc


def scenario_to_dict(scenario: Scenario) -> dict:
    system = scenario.system
    couplings = []
    for (i, j) in sorted(system.couplings):
        item = {
            "i": i,
            "j": j,
            "g": system.couplings[(i, j)],
            "omega": system.drive_frequencies[(i, j)],
        }
        if system.phases[(i, j)] != 0.0:
            item["phi"] = system.phases[(i, j)]
        couplings.append(item)
    data = {
        "levels": list(system.energies),
        "couplings": couplings,
        "initial": scenario.initial
        if isinstance(scenario.initial, int)
        else [list(pair) for pair in scenario.initial],
        "t_end": scenario.t_end,
        "samples": scenario.samples,
    }
    if scenario.method is not None:
        data["method"] = scenario.method
    if scenario.outputs != ("populations",):
        data["outputs"] = list(scenario.outputs)
    return data


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: scenario must be a JSON object")
    return scenario_from_dict(data)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: str, header: list[str], rows, footer: list[str]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
            for line in footer:
                fh.write(f"# {line}\n")
    except OSError as exc:
        raise ScenarioError(f"cannot write {path}: {exc}") from exc


def _times(scenario: Scenario) -> np.ndarray:
    if scenario.t_end == 0.0:
        return np.array([0.0])
    return np.linspace(0.0, scenario.t_end, scenario.samples)


def _report_lines(name: str, report) -> list[str]:
    lines = [
        f"  {name:<12} {label:<16} {residual:.6e}"
        for label, residual in sorted(report.residuals.items())
    ]
    verdict = "OK" if report.satisfied else "VIOLATED"
    lines.append(f"{name}: {verdict} (worst {report.worst:.1e}, tol {report.tolerance:.1e})")
    return lines


def _check_conditions(system: LevelSystem, stream) -> bool:
    resonance = check_resonance(system)
    consistency = check_consistency(system)
    ok = resonance.satisfied and consistency.satisfied
    if not ok:
        print("condition check failed:", file=stream)
        for name, report in (("resonance", resonance), ("consistency", consistency)):
            for line in _report_lines(name, report):
                print(line, file=stream)
    return ok


def _resolve_method(scenario: Scenario, flag: str | None):
    chosen = flag if flag is not None else scenario.method
    if chosen in (None, "auto"):
        return None
    return Method(chosen)


def cmd_simulate(scenario_path: str, out_path: str, method: str | None = None) -> int:
    """Closed-form evolution of a scenario, written as a CSV trajectory."""
    scenario = load_scenario(scenario_path)
    system = scenario.system
    if not _check_conditions(system, sys.stderr):
        return 2
    psi0 = scenario.initial_state()
    forced = _resolve_method(scenario, method)
    times = _times(scenario)
    n = system.n
    rows = []
    worst_pop = 0.0
    for t in times:
        state = full_solution(system, psi0, float(t), forced)
        pops = state.populations()
        worst_pop = max(worst_pop, abs(float(np.sum(pops)) - 1.0))
        row = [t, *pops]
        for amp in state.amplitudes:
            row.extend((amp.real, amp.imag))
        rows.append(row)
    header = ["t"]
    header += [f"pop_{k}" for k in range(n)]
    for k in range(n):
        header += [f"re_{k}", f"im_{k}"]
    footer = [
        f"method = {(forced.value if forced else 'auto')}",
        f"max |sum(populations) - 1| = {worst_pop:.3e}",
    ]
    _write_csv(out_path, header, rows, footer)
    return 0


def cmd_verify(scenario_path: str) -> int:
    """Print the resonance and consistency reports; exit 0 iff both hold."""
    scenario = load_scenario(scenario_path)
    resonance = check_resonance(scenario.system)
    consistency = check_consistency(scenario.system)
    print(f"{'condition':<14} {'pair':<16} residual")
    for name, report in (("resonance", resonance), ("consistency", consistency)):
        for line in _report_lines(name, report):
            print(line)
    return 0 if (resonance.satisfied and consistency.satisfied) else 2


def cmd_eigen(scenario_path: str) -> int:
    """Print closed-form and Jacobi spectra side by side (eigenvectors for n = 3)."""
    scenario = load_scenario(scenario_path)
    q = build_q(scenario.system)
    jacobi = jacobi_eigendecompose(q)
    closed = None
    if q.n in (3, 4):
        closed = closed_form_spectrum(q)
    print(f"eigenvalues (n = {q.n})")
    print(f"  {'#':>2}  {'closed-form':>22}  {'jacobi':>22}  |difference|")
    for k in range(q.n):
        jac = jacobi.spectrum.eigenvalues[k]
        if closed is None:
            print(f"  {k:>2}  {'unavailable':>22}  {jac:>22.15g}  -")
        else:
            cf = closed.eigenvalues[k]
            print(f"  {k:>2}  {cf:>22.15g}  {jac:>22.15g}  {abs(cf - jac):.3e}")
    if q.n == 3:
        try:
            decomp = eigenvectors_three_level(q, closed)
        except DegenerateSpectrumError as exc:
            print(f"closed-form eigenvectors unavailable: {exc}")
        else:
            print("closed-form eigenvectors (columns match the eigenvalue order):")
            for row in decomp.vectors:
                print("  [" + "  ".join(f"{v:>22.15g}" for v in row) + "]")
    return 0


def cmd_compare(
    scenario_path: str,
    out_path: str,
    method: str | None = None,
    rtol: float | None = None,
    atol: float | None = None,
) -> int:
    """Closed form vs RK4-on-RWA vs RK4-on-cosine-drive population trajectories."""
    scenario = load_scenario(scenario_path)
    system = scenario.system
    stripped = system.without_phases()
    if not _check_conditions(stripped, sys.stderr):
        return 2
    psi0 = scenario.initial_state()
    forced = _resolve_method(scenario, method)
    times = _times(scenario)
    n = system.n

    closed = np.empty((len(times), n))
    for k, t in enumerate(times):
        closed[k] = full_solution(stripped, psi0, float(t), forced).populations()
    if scenario.t_end == 0.0:
        rwa_pops = closed.copy()
        full_pops = closed.copy()
    else:
        cfg = IntegrationConfig(
            rel_tol=rtol if rtol is not None else IntegrationConfig.rel_tol,
            abs_tol=atol if atol is not None else IntegrationConfig.abs_tol,
        )
        rwa = integrate_schrodinger(
            lambda t: hamiltonian_rwa(stripped, t),
            psi0,
            scenario.t_end,
            scenario.samples,
            cfg,
        )
        full = integrate_schrodinger(
            lambda t: hamiltonian_full(system, t),
            psi0,
            scenario.t_end,
            scenario.samples,
            cfg,
        )
        rwa_pops = rwa.populations
        full_pops = full.populations

    header = ["t"]
    for tag in ("closed", "rwa", "full"):
        header += [f"{tag}_pop_{k}" for k in range(n)]
    rows = [
        [t, *closed[k], *rwa_pops[k], *full_pops[k]] for k, t in enumerate(times)
    ]
    footer = [
        f"max |closed - rwa| = {float(np.max(np.abs(closed - rwa_pops))):.3e}",
        f"max |closed - full| = {float(np.max(np.abs(closed - full_pops))):.3e}",
        f"max |rwa - full| = {float(np.max(np.abs(rwa_pops - full_pops))):.3e}",
    ]
    _write_csv(out_path, header, rows, footer)
    return 0


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; route them to exit code 1
    def error(self, message):
        raise ScenarioError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nrabi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    method_choices = ["auto"] + [m.value for m in Method]

    sim = sub.add_parser("simulate", help="closed-form trajectory to CSV")
    sim.add_argument("scenario")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.add_argument("--method", choices=method_choices)

    ver = sub.add_parser("verify", help="report the reduction conditions")
    ver.add_argument("scenario")

    eig = sub.add_parser("eigen", help="closed-form vs Jacobi spectrum")
    eig.add_argument("scenario")

    cmp_ = sub.add_parser("compare", help="closed form vs RWA vs cosine drive")
    cmp_.add_argument("scenario")
    cmp_.add_argument("--out", required=True, help="output CSV path")
    cmp_.add_argument("--method", choices=method_choices)
    cmp_.add_argument("--rtol", type=float, help="integrator relative tolerance")
    cmp_.add_argument("--atol", type=float, help="integrator absolute tolerance")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate":
            return cmd_simulate(args.scenario, args.out, args.method)
        if args.command == "verify":
            return cmd_verify(args.scenario)
        if args.command == "eigen":
            return cmd_eigen(args.scenario)
        if args.command == "compare":
            return cmd_compare(args.scenario, args.out, args.method, args.rtol, args.atol)
        raise ScenarioError(f"unknown command {args.command!r}")
    except ConditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for name, report in (("resonance", exc.resonance), ("consistency", exc.consistency)):
            for line in _report_lines(name, report):
                print(line, file=sys.stderr)
        return 2
    except (
        ScenarioError,
        InvalidInputError,
        DegenerateSpectrumError,
        IntegrationError,
        ConvergenceError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
