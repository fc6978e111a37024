"""Experiment harness: reproduce the standard figures as CSV/JSON data files.

Subcommands
-----------
phase-dist     phase-basis probability curves of the coherent state, deformed
               vs undeformed, one block per S  (columns S,m,theta_m,prob_pb,prob_qpb)
entropy-curve  entanglement entropy vs r for both truncated families next to
               the analytic reference       (columns r,S,E_sg,E_pb,E_qpb)
s-required     minimal even S meeting a relative entropy tolerance, per r
                                            (columns r,S_pb,S_qpb)
saturation     E/log2(S+1) at fixed large r vs S  (columns S,ratio_pb,ratio_qpb)
verify         run the numerical identity suites and write a JSON report

Flags override config-file values, which override the built-in defaults.  The
config file is plain ``key = value`` text with the same keys as the long
flags.  Exit codes: 0 success, 1 failed verification, 2 bad arguments,
3 numeric overflow.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .qcore import (
    BRANCH_MODULUS,
    BRANCHES,
    BRANCH_PRINCIPAL,
    DeformationParams,
    kronecker_comb,
)
from .states import (
    _log_tanh,
    coherent_pb,
    coherent_qpb,
    coherent_qpb_folded,
    diagonal_fidelity,
    k_series_closed,
    k_series_direct,
    squeeze_scale,
    squeezed_pb,
    squeezed_qpb,
    squeezed_qpb_truncated,
    state_fidelity,
)
from .phase import distribution_shift_check, number_amplitudes, phase_amplitudes
from .operators import verify_algebra
from .entanglement import (
    FAMILY_PB,
    FAMILY_QPB,
    e_max,
    entropy_sg_analytic,
    s_required,
    von_neumann_entropy,
)

THREADS_ENV = "QPB_SIM_THREADS"

COMMANDS = ("phase-dist", "entropy-curve", "s-required", "saturation", "verify")

DEFAULT_ALPHA = complex(5.0, 0.0)
DEFAULT_THETA0 = -math.pi
DEFAULT_TOLERANCE = 0.005
DEFAULT_PHASE_S = (30, 60, 100, 200, 500)
DEFAULT_ENTROPY_S = (30, 100)
DEFAULT_ENTROPY_R = tuple(np.round(np.linspace(0.0, 6.0, 61), 10))
DEFAULT_SREQ_R = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
DEFAULT_SAT_S = tuple(range(10, 401, 10))
DEFAULT_SAT_R = (20.0,)
DEFAULT_VERIFY_S = (4, 30, 100)
# the deformed family needs S near 5e4 at r = 3, so the harness default cap
# is far above the library default
DEFAULT_CLI_S_CAP = 65536


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved, deterministic description of one harness run."""

    command: str
    alpha: complex = DEFAULT_ALPHA
    theta0: float = DEFAULT_THETA0
    r_grid: tuple = ()
    s_list: tuple = ()
    tolerance: float = DEFAULT_TOLERANCE
    branch: str = BRANCH_MODULUS
    s_cap: int = DEFAULT_CLI_S_CAP
    output: str = ""
    fmt: str = "csv"
    threads: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.branch not in BRANCHES:
            raise ValueError(f"unknown branch {self.branch!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")
        for s in self.s_list:
            if s < 2 or s % 2:
                raise ValueError(f"S values must be even and >= 2, got {s}")
        for r in self.r_grid:
            if r < 0:
                raise ValueError(f"r values must be non-negative, got {r}")


def _parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _parse_float_list(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a complex number, got {text!r}")


_CONFIG_PARSERS = {
    "alpha": _parse_complex,
    "theta0": float,
    "r": _parse_float_list,
    "S": _parse_int_list,
    "tol": float,
    "branch": str,
    "s_cap": int,
    "output": str,
    "format": str,
}


def _read_config_file(path: str, parser: argparse.ArgumentParser) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    parser.error(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _CONFIG_PARSERS:
                    parser.error(f"{path}:{lineno}: unknown config key {key!r}")
                try:
                    values[key] = _CONFIG_PARSERS[key](value.strip())
                except (ValueError, argparse.ArgumentTypeError) as exc:
                    parser.error(f"{path}:{lineno}: {exc}")
    except OSError as exc:
        parser.error(f"cannot read config file {path}: {exc}")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpbsim",
        description="Phase distributions and entanglement entropies of coherent "
                    "and two-mode squeezed states in truncated and deformed "
                    "number spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key = value file; flags take precedence")
        p.add_argument("--output", "-o", help="output file path")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"),
                       help="output format (default csv)")

    p_phase = sub.add_parser("phase-dist", help="phase-basis coherent-state curves")
    p_phase.add_argument("--S", type=_parse_int_list, help="comma list of even truncations")
    p_phase.add_argument("--alpha", type=_parse_complex, help="coherent amplitude (default 5)")
    p_phase.add_argument("--theta0", type=float, help="reference phase (default -pi)")
    p_phase.add_argument("--branch", choices=BRANCHES, help="sqrt branch (default modulus)")
    add_common(p_phase)

    p_ent = sub.add_parser("entropy-curve", help="entropy vs r for both families")
    p_ent.add_argument("--S", type=_parse_int_list, help="comma list of even truncations")
    p_ent.add_argument("--r", type=_parse_float_list, help="comma list of r values")
    add_common(p_ent)

    p_req = sub.add_parser("s-required", help="minimal even S meeting the tolerance")
    p_req.add_argument("--r", type=_parse_float_list, help="comma list of r values")
    p_req.add_argument("--tol", type=float, help="relative tolerance (default 0.005)")
    p_req.add_argument("--s-cap", dest="s_cap", type=int,
                       help=f"search cap (default {DEFAULT_CLI_S_CAP})")
    add_common(p_req)

    p_sat = sub.add_parser("saturation", help="E/log2(S+1) at fixed r vs S")
    p_sat.add_argument("--S", type=_parse_int_list, help="comma list of even truncations")
    p_sat.add_argument("--r", type=_parse_float_list, help="squeezing (default 20)")
    add_common(p_sat)

    p_ver = sub.add_parser("verify", help="run the numerical identity suites")
    p_ver.add_argument("--S", type=_parse_int_list, help="comma list of even truncations")
    p_ver.add_argument("--theta0", type=float, help="reference phase (default -pi)")
    add_common(p_ver)

    return parser


_COMMAND_DEFAULTS = {
    "phase-dist": {"S": DEFAULT_PHASE_S, "r": ()},
    "entropy-curve": {"S": DEFAULT_ENTROPY_S, "r": DEFAULT_ENTROPY_R},
    "s-required": {"S": (), "r": DEFAULT_SREQ_R},
    "saturation": {"S": DEFAULT_SAT_S, "r": DEFAULT_SAT_R},
    "verify": {"S": DEFAULT_VERIFY_S, "r": ()},
}


def parse_config(argv) -> ExperimentConfig:
    """Resolve argv (plus optional config file) into an ExperimentConfig.

    Precedence: command-line flags, then config-file values, then defaults.
    Bad values (odd S, malformed numbers, unknown keys) exit with code 2.
    """
    parser = _build_parser()
    args = parser.parse_args(argv)
    command = args.command

    file_values = {}
    if getattr(args, "config", None):
        file_values = _read_config_file(args.config, parser)

    def resolve(flag_name, file_key, default):
        flag = getattr(args, flag_name, None)
        if flag is not None:
            return flag
        if file_key in file_values:
            return file_values[file_key]
        return default

    defaults = _COMMAND_DEFAULTS[command]
    s_list = tuple(resolve("S", "S", defaults["S"]))
    r_grid = tuple(resolve("r", "r", defaults["r"]))
    alpha = resolve("alpha", "alpha", DEFAULT_ALPHA)
    theta0 = resolve("theta0", "theta0", DEFAULT_THETA0)
    tolerance = resolve("tol", "tol", DEFAULT_TOLERANCE)
    branch = resolve("branch", "branch", BRANCH_MODULUS)
    s_cap = resolve("s_cap", "s_cap", DEFAULT_CLI_S_CAP)
    fmt = resolve("fmt", "format", "csv")
    default_output = f"{command}.json" if command == "verify" or fmt == "json" else f"{command}.csv"
    output = resolve("output", "output", default_output)

    for s in s_list:
        if s < 2 or s % 2:
            parser.error(f"S must be even and >= 2 (the deformed ladder needs an "
                         f"even truncation); got {s}")
    for r in r_grid:
        if r < 0:
            parser.error(f"r must be non-negative, got {r}")
    if not 0.0 < tolerance < 1.0:
        parser.error(f"tolerance must be in (0, 1), got {tolerance}")

    try:
        threads = int(os.environ.get(THREADS_ENV, "0"))
    except ValueError:
        threads = 0

    try:
        return ExperimentConfig(
            command=command, alpha=alpha, theta0=theta0, r_grid=r_grid,
            s_list=s_list, tolerance=tolerance, branch=branch, s_cap=s_cap,
            output=output, fmt=fmt, threads=threads,
        )
    except ValueError as exc:
        parser.error(str(exc))
        raise AssertionError("unreachable")


def _map_grid(config: ExperimentConfig, fn, items):
    """Evaluate fn over grid points, keeping the output in grid order."""
    items = list(items)
    workers = config.threads
    if workers == 0:
        workers = min(len(items), os.cpu_count() or 1)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt_num(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_rows(config: ExperimentConfig, header, rows):
    if config.fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [",".join(header)]
        lines.extend(",".join(_fmt_num(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    with open(config.output, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _run_phase_dist(config: ExperimentConfig) -> int:
    def block(s):
        params = DeformationParams(s)
        pb = phase_amplitudes(coherent_pb(config.alpha, params), config.theta0)
        qpb = phase_amplitudes(coherent_qpb(config.alpha, params, config.branch),
                               config.theta0)
        return [(s, m, pb.thetas[m], pb.probabilities[m], qpb.probabilities[m])
                for m in range(s + 1)]

    rows = [row for rows in _map_grid(config, block, config.s_list) for row in rows]
    _write_rows(config, ("S", "m", "theta_m", "prob_pb", "prob_qpb"), rows)
    return 0


def _run_entropy_curve(config: ExperimentConfig) -> int:
    grid = [(r, s) for s in config.s_list for r in config.r_grid]

    def row(point):
        r, s = point
        params = DeformationParams(s)
        e_sg = entropy_sg_analytic(r)
        e_pb = 0.0 if r == 0 else von_neumann_entropy(squeezed_pb(r, params).probabilities)
        e_qpb = 0.0 if r == 0 else von_neumann_entropy(squeezed_qpb(r, params).probabilities)
        return (r, s, e_sg, e_pb, e_qpb)

    rows = _map_grid(config, row, grid)
    _write_rows(config, ("r", "S", "E_sg", "E_pb", "E_qpb"), rows)
    return 0


def _run_s_required(config: ExperimentConfig) -> int:
    def row(r):
        s_pb = s_required(r, config.tolerance, FAMILY_PB, config.s_cap)
        s_qpb = s_required(r, config.tolerance, FAMILY_QPB, config.s_cap)
        return (r, s_pb, s_qpb)

    rows = _map_grid(config, row, config.r_grid)
    _write_rows(config, ("r", "S_pb", "S_qpb"), rows)
    return 0


def _run_saturation(config: ExperimentConfig) -> int:
    r = config.r_grid[0] if config.r_grid else 20.0

    def row(s):
        params = DeformationParams(s)
        e_ceiling = e_max(params)
        ratio_pb = von_neumann_entropy(squeezed_pb(r, params).probabilities) / e_ceiling
        ratio_qpb = von_neumann_entropy(squeezed_qpb(r, params).probabilities) / e_ceiling
        return (s, ratio_pb, ratio_qpb)

    rows = _map_grid(config, row, config.s_list)
    _write_rows(config, ("S", "ratio_pb", "ratio_qpb"), rows)
    return 0


def _verify_checks(config: ExperimentConfig, s: int):
    """Identity checks at one truncation: (name, residual, tolerance) rows."""
    params = DeformationParams(s)
    alpha = config.alpha
    checks = []

    report = verify_algebra(params, config.theta0, BRANCH_PRINCIPAL)
    for name, residual in report.residuals.items():
        checks.append((name, residual, 1e-10))

    kron_worst = 0.0
    for delta in range(-2 * (s + 1), 2 * (s + 1) + 1):
        expected = (s + 1.0) if delta % (s + 1) == 0 else 0.0
        kron_worst = max(kron_worst, abs(kronecker_comb(delta, params) - expected))
    checks.append(("kronecker_filter", kron_worst, 1e-10 * (s + 1)))

    b = squeeze_scale(1.0, params).b
    stride = max(1, (s + 1) // 40)
    n_samples = sorted(set(range(0, s + 1, stride)) | {s})
    k_worst = 0.0
    for n in n_samples:
        direct = k_series_direct(n, b, params)
        closed = k_series_closed(n, b, params)
        k_worst = max(k_worst, abs(closed - direct) / direct)
    checks.append(("resummation_identity", k_worst, 1e-10))

    coh = coherent_qpb(alpha, params, config.branch)
    checks.append(("coherent_norm", abs(float(np.sum(coh.moduli ** 2)) - 1.0), 1e-12))
    dist = phase_amplitudes(coh, config.theta0)
    checks.append(("parseval", abs(float(dist.probabilities.sum()) - 1.0), 1e-12))
    round_trip = number_amplitudes(dist)
    checks.append(("phase_round_trip",
                   float(np.max(np.abs(round_trip.amplitudes - coh.amplitudes))), 1e-12))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        folded = coherent_qpb_folded(alpha, params, k_max=8)
    checks.append(("fold_fidelity",
                   1.0 - state_fidelity(folded, coherent_qpb(alpha, params)), 1e-10))

    shift = distribution_shift_check(coherent_pb(alpha, params), config.theta0,
                                     config.theta0 + 2 * math.pi / (s + 1))
    checks.append(("shift_invariance", shift, 1e-12))

    for r in (1.0, 20.0):
        pb_state = squeezed_pb(r, params)
        qpb_state = squeezed_qpb(r, params)
        checks.append((f"squeezed_pb_norm_r{r:g}",
                       abs(float(pb_state.probabilities.sum()) - 1.0), 1e-12))
        checks.append((f"squeezed_qpb_norm_r{r:g}",
                       abs(float(qpb_state.probabilities.sum()) - 1.0), 1e-12))
        ratio_dev = float(np.max(np.abs(np.diff(pb_state.coeff_log) - _log_tanh(r))))
        checks.append((f"geometric_ratio_r{r:g}", ratio_dev, 1e-12))
        e_pb = von_neumann_entropy(pb_state.probabilities)
        e_qpb = von_neumann_entropy(qpb_state.probabilities)
        bound = e_max(params) + 1e-12
        checks.append((f"entropy_bounds_r{r:g}",
                       max(0.0, e_pb - bound, e_qpb - bound, -e_pb, -e_qpb), 1e-12))

    if s >= 30:
        trunc = squeezed_qpb_truncated(1.0, params)
        closed = squeezed_qpb(1.0, params)
        checks.append(("truncated_vs_closed_fidelity",
                       1.0 - diagonal_fidelity(trunc, closed), 1e-6))

    return checks


def _run_verify(config: ExperimentConfig) -> int:
    report = {"S": list(config.s_list), "theta0": config.theta0,
              "branch": config.branch, "checks": []}
    all_pass = True
    for s in config.s_list:
        for name, residual, tolerance in _verify_checks(config, s):
            ok = residual < tolerance
            all_pass = all_pass and ok
            report["checks"].append({
                "S": s, "name": name, "residual": float(residual),
                "tolerance": float(tolerance), "pass": bool(ok),
            })
    report["all_pass"] = bool(all_pass)
    output = config.output
    with open(output, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(report, handle, indent=2)
        handle.write("\n")
    print(f"wrote {output}: {'all checks passed' if all_pass else 'FAILURES present'}")
    return 0 if all_pass else 1


def run_experiment(config: ExperimentConfig) -> int:
    """Execute one resolved config; returns the process exit code."""
    runners = {
        "phase-dist": _run_phase_dist,
        "entropy-curve": _run_entropy_curve,
        "s-required": _run_s_required,
        "saturation": _run_saturation,
        "verify": _run_verify,
    }
    try:
        code = runners[config.command](config)
    except OverflowError as exc:
        print(f"numeric overflow: {exc}", file=sys.stderr)
        return 3
    if config.command != "verify":
        print(f"wrote {config.output}")
    return code


def main(argv=None) -> int:
    config = parse_config(argv if argv is not None else sys.argv[1:])
    return run_experiment(config)


if __name__ == "__main__":
    sys.exit(main())
