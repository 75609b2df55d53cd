"""Command-line front end: table runs, profile/front exports, convergence scans.

Configuration is a flat key=value text file; command-line flags override
file values and anything left unset takes the built-in defaults.  All CSV
output is written with fixed column order and 10-significant-digit
formatting so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__, backend
from .analytic import (
    ExactSolution,
    PhysicalParams,
    solve_p_exact,
    u1_exact,
    u2_exact,
)
from .errors import (
    DomainError,
    FracStefanError,
    InvalidInputError,
    NonConvergenceError,
    ParseError,
    ValidationError,
)
from .fronttrack import bisection_solve, final_time, front_series
from .scheme import MeshConfig, advance_phase, make_phase_grid, recover_physical

__all__ = ["RunConfig", "main", "parse_config", "run_convergence", "run_profiles", "run_tables"]

logger = logging.getLogger(__name__)

#: The three built-in parameter quadruples (lambda1, lambda2, kappa1, kappa2)
#: swept by the table runs, and the derivative orders forming the columns.
TABLE_ROWS = ((1.0, 1.0, 1.0, 1.0), (1.0, 2.0, 1.0, 1.0), (1.0, 1.0, 2.0, 1.0))
TABLE_ALPHAS = (0.25, 0.5, 0.75, 1.0)

MODES = ("exact", "numeric", "tables", "profiles", "convergence")

_FLOAT_KEYS = ("alpha", "lambda1", "lambda2", "kappa1", "kappa2", "theta_inf",
               "ratio", "tau0_factor", "p_min", "p_max", "epsilon")
_INT_KEYS = ("m1", "m2", "n", "max_iter")

_DEFAULTS = {
    "alpha": 0.5,
    "lambda1": 1.0,
    "lambda2": 1.0,
    "kappa1": 1.0,
    "kappa2": 1.0,
    "theta_inf": -0.5,
    "ratio": 10.0,
    "m1": 100,
    "m2": 500,
    "n": 400,
    "tau0_factor": 1e-3,
    "p_min": 0.1,
    "p_max": 2.0,
    "epsilon": 1e-3,
    "max_iter": 60,
    "profile_times": None,
    "extra_rows": (),
}


@dataclass
class RunConfig:
    """Fully resolved run settings."""

    params: PhysicalParams
    mesh: MeshConfig
    mode: str
    output_dir: Path
    bracket: tuple
    eps: float
    max_iter: int
    profile_times: tuple | None
    extra_rows: tuple


def _parse_value(key: str, text: str):
    text = text.strip()
    if key in _FLOAT_KEYS:
        return float(text)
    if key in _INT_KEYS:
        return int(text)
    if key == "profile_times":
        return tuple(float(part) for part in text.split(",") if part.strip())
    if key == "extra_rows":
        rows = []
        for chunk in text.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            vals = tuple(float(part) for part in chunk.split(","))
            if len(vals) != 4:
                raise ValueError(f"expected 4 values per row, got {len(vals)}")
            rows.append(vals)
        return tuple(rows)
    raise KeyError(key)


def _read_config_file(path) -> dict:
    values = {}
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config file {path}: {exc}") from exc
    with handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, text = line.partition("=")
            key = key.strip().lower()
            if key not in _DEFAULTS:
                raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = _parse_value(key, text)
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def parse_config(path=None, overrides=None, *, mode: str = "exact",
                 output_dir="out") -> RunConfig:
    """Resolve file values, flag overrides and defaults into a RunConfig.

    Raises ParseError on malformed files and ValidationError listing every
    violated invariant at once.
    """
    resolved = dict(_DEFAULTS)
    if path is not None:
        resolved.update(_read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            resolved[key] = value

    problems = []
    params = mesh = None
    try:
        params = PhysicalParams(
            alpha=resolved["alpha"],
            kappa1=resolved["kappa1"],
            kappa2=resolved["kappa2"],
            lambda1=resolved["lambda1"],
            lambda2=resolved["lambda2"],
            theta_inf=resolved["theta_inf"],
        )
    except InvalidInputError as exc:
        problems.append(str(exc))
    try:
        mesh = MeshConfig(
            m1=resolved["m1"],
            m2=resolved["m2"],
            n=resolved["n"],
            ratio=resolved["ratio"],
            tau0_factor=resolved["tau0_factor"],
        )
    except InvalidInputError as exc:
        problems.append(str(exc))
    if not 0.0 < resolved["p_min"] < resolved["p_max"]:
        problems.append(
            f"bracket must satisfy 0 < p_min < p_max, got "
            f"({resolved['p_min']}, {resolved['p_max']})"
        )
    if not resolved["epsilon"] > 0.0:
        problems.append(f"epsilon must be > 0, got {resolved['epsilon']}")
    if resolved["max_iter"] < 1:
        problems.append(f"max_iter must be >= 1, got {resolved['max_iter']}")
    if resolved["profile_times"] is not None:
        for t in resolved["profile_times"]:
            if not t > 0.0:
                problems.append(f"profile_times entries must be > 0, got {t}")
    for row in resolved["extra_rows"]:
        if any(not v > 0.0 for v in row):
            problems.append(f"extra_rows entries must be positive, got {row}")
    if mode not in MODES:
        problems.append(f"mode must be one of {MODES}, got {mode!r}")
    if problems:
        raise ValidationError("; ".join(problems))

    return RunConfig(
        params=params,
        mesh=mesh,
        mode=mode,
        output_dir=Path(output_dir),
        bracket=(resolved["p_min"], resolved["p_max"]),
        eps=resolved["epsilon"],
        max_iter=resolved["max_iter"],
        profile_times=resolved["profile_times"],
        extra_rows=resolved["extra_rows"],
    )


def _fmt(value) -> str:
    return f"{value:.10g}"


def _write_metadata(config: RunConfig) -> Path:
    path = config.output_dir / "run.txt"
    p = config.params
    m = config.mesh
    pairs = [
        ("version", __version__),
        ("backend", backend.active()),
        ("mode", config.mode),
        ("alpha", _fmt(p.alpha)),
        ("lambda1", _fmt(p.lambda1)),
        ("lambda2", _fmt(p.lambda2)),
        ("kappa1", _fmt(p.kappa1)),
        ("kappa2", _fmt(p.kappa2)),
        ("theta_inf", _fmt(p.theta_inf)),
        ("ratio", _fmt(m.ratio)),
        ("m1", str(m.m1)),
        ("m2", str(m.m2)),
        ("n", str(m.n)),
        ("tau0_factor", _fmt(m.tau0_factor)),
        ("p_min", _fmt(config.bracket[0])),
        ("p_max", _fmt(config.bracket[1])),
        ("epsilon", _fmt(config.eps)),
        ("max_iter", str(config.max_iter)),
        ("profile_times", "" if config.profile_times is None
         else ",".join(_fmt(t) for t in config.profile_times)),
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for key, value in pairs:
            handle.write(f"{key}={value}\n")
    return path


def _table_header(prefix: str) -> list:
    return ["lambda1", "lambda2", "kappa1", "kappa2"] + [
        f"{prefix}[alpha={_fmt(a)}]" for a in TABLE_ALPHAS
    ]


def _error_token(exc: Exception) -> str:
    name = type(exc).__name__
    return name.removesuffix("Error")


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _render_table(title: str, header, rows) -> str:
    # 4-decimal view of the CSV content for the terminal
    lines = [title]
    lines.append("  ".join(f"{h:>16}" for h in header))
    for row in rows:
        cells = []
        for cell in row:
            try:
                cells.append(f"{float(cell):16.4f}")
            except (TypeError, ValueError):
                cells.append(f"{cell:>16}")
        lines.append("  ".join(cells))
    return "\n".join(lines)


def run_tables(config: RunConfig) -> dict:
    """Sweep the built-in parameter rows over the four derivative orders.

    Writes table1.csv (front coefficients from the transcendental
    equation), table2.csv (front coefficients from the grid solver) and
    table3.csv (times at which the front reaches x = 1, mapped from
    table2 by p -> p**(-2/alpha)).  Failed cells carry the error name and
    the run continues.
    """
    config.output_dir.mkdir(parents=True, exist_ok=True)
    rows = TABLE_ROWS + tuple(config.extra_rows)

    exact_rows, numeric_rows, time_rows = [], [], []
    for l1, l2, k1, k2 in rows:
        exact_cells, numeric_cells, time_cells = [], [], []
        for a in TABLE_ALPHAS:
            params = replace(config.params, alpha=a, lambda1=l1, lambda2=l2,
                             kappa1=k1, kappa2=k2)
            try:
                exact_cells.append(_fmt(solve_p_exact(params, config.bracket)))
            except FracStefanError as exc:
                logger.warning("exact cell (%s, alpha=%s) failed: %s", (l1, l2, k1, k2), a, exc)
                exact_cells.append(_error_token(exc))
            try:
                result = bisection_solve(params, config.mesh, config.bracket,
                                         config.eps, config.max_iter)
                if result.converged:
                    tau_n = final_time(result.p, a)
                    # emit-time identity: the time cell must be the exact
                    # p**(-2/alpha) image of the coefficient cell
                    if abs(tau_n - result.p ** (-2.0 / a)) > 1e-12 * tau_n:
                        raise FracStefanError(
                            f"internal: time table inconsistent with "
                            f"p**(-2/alpha) at alpha={a}"
                        )
                    numeric_cells.append(_fmt(result.p))
                    time_cells.append(_fmt(tau_n))
                else:
                    numeric_cells.append("NotConverged")
                    time_cells.append("NotConverged")
            except FracStefanError as exc:
                logger.warning("numeric cell (%s, alpha=%s) failed: %s", (l1, l2, k1, k2), a, exc)
                numeric_cells.append(_error_token(exc))
                time_cells.append(_error_token(exc))
            logger.info("tables: row (%g, %g, %g, %g) alpha=%g done", l1, l2, k1, k2, a)
        prefix = [_fmt(l1), _fmt(l2), _fmt(k1), _fmt(k2)]
        exact_rows.append(prefix + exact_cells)
        numeric_rows.append(prefix + numeric_cells)
        time_rows.append(prefix + time_cells)

    paths = {
        "table1": config.output_dir / "table1.csv",
        "table2": config.output_dir / "table2.csv",
        "table3": config.output_dir / "table3.csv",
    }
    _write_csv(paths["table1"], _table_header("p_exact"), exact_rows)
    _write_csv(paths["table2"], _table_header("p_numeric"), numeric_rows)
    _write_csv(paths["table3"], _table_header("tau_final"), time_rows)
    _write_metadata(config)

    print(_render_table("front coefficient, transcendental equation:",
                        _table_header("p_exact"), exact_rows))
    print(_render_table("front coefficient, grid solver:",
                        _table_header("p_numeric"), numeric_rows))
    print(_render_table("time to reach x=1, grid solver:",
                        _table_header("tau_final"), time_rows))
    return paths


def _resolve_profile_levels(config: RunConfig, tau) -> list:
    n = config.mesh.n
    tau_n = tau[n]
    if config.profile_times is None:
        times = [tau_n / 4.0, tau_n / 2.0, 3.0 * tau_n / 4.0, tau_n]
    else:
        times = list(config.profile_times)
        bad = [t for t in times if not 0.0 < t <= tau_n * (1.0 + 1e-12)]
        if bad:
            raise ValidationError(
                f"profile_times must lie in (0, {_fmt(tau_n)}], offending: {bad}"
            )
    dtau = tau[1]
    levels = sorted({max(1, min(n, round(t / dtau))) for t in times})
    return levels


def run_profiles(config: RunConfig) -> dict:
    """Temperature profiles and front position for one parameter set.

    profiles.csv columns: tau, x, u, phase, source (numeric|exact).  The
    exact temperatures are evaluated at the numeric grid points from the
    transcendental-equation solution; cells are left empty where the point
    falls outside that solution's phase region or where the series stops
    converging (large similarity arguments).

    front.csv columns: tau, S_numeric, S_exact.  S_numeric is the front
    recovered from the discrete interface heat balance at each level;
    S_exact is the similarity law p * tau**(alpha/2) at the converged
    numeric coefficient, which reaches 1 at the final level by
    construction.
    """
    config.output_dir.mkdir(parents=True, exist_ok=True)
    params = config.params
    result = bisection_solve(params, config.mesh, config.bracket,
                             config.eps, config.max_iter)
    if not result.converged:
        raise NonConvergenceError(
            f"front search not converged after {result.iterations} iterations "
            f"(|1 - S| = {abs(result.residual):.3e}); config: alpha={params.alpha}"
        )
    p_num = result.p
    g1 = advance_phase(make_phase_grid(1, p_num, config.mesh, params))
    g2 = advance_phase(make_phase_grid(2, p_num, config.mesh, params))
    f1 = recover_physical(g1)
    f2 = recover_physical(g2)

    sol_exact = None
    try:
        sol_exact = ExactSolution(solve_p_exact(params, config.bracket), params)
    except FracStefanError as exc:
        logger.warning("transcendental solution unavailable, exact columns empty: %s", exc)

    def exact_cell(fn, x, tau):
        if sol_exact is None:
            return ""
        try:
            return _fmt(fn(float(x), float(tau), sol_exact))
        except (DomainError, NonConvergenceError):
            return ""

    levels = _resolve_profile_levels(config, g1.tau)
    profile_rows = []
    for j in levels:
        tau_j = g1.tau[j]
        for i in range(config.mesh.m1 + 1):
            profile_rows.append([_fmt(tau_j), _fmt(f1.x[j, i]), _fmt(f1.u[j, i]),
                                 "1", "numeric"])
        for i in range(config.mesh.m2 + 1):
            profile_rows.append([_fmt(tau_j), _fmt(f2.x[j, i]), _fmt(f2.u[j, i]),
                                 "2", "numeric"])
        for i in range(config.mesh.m1 + 1):
            profile_rows.append([_fmt(tau_j), _fmt(f1.x[j, i]),
                                 exact_cell(u1_exact, f1.x[j, i], tau_j), "1", "exact"])
        for i in range(config.mesh.m2 + 1):
            profile_rows.append([_fmt(tau_j), _fmt(f2.x[j, i]),
                                 exact_cell(u2_exact, f2.x[j, i], tau_j), "2", "exact"])

    series = front_series(g1, g2)
    a = params.alpha
    front_rows = []
    for j in range(1, config.mesh.n + 1):
        tau_j = g1.tau[j]
        front_rows.append([_fmt(tau_j), _fmt(series[j]),
                           _fmt(p_num * tau_j ** (a / 2.0))])

    paths = {
        "profiles": config.output_dir / "profiles.csv",
        "front": config.output_dir / "front.csv",
    }
    _write_csv(paths["profiles"], ["tau", "x", "u", "phase", "source"], profile_rows)
    _write_csv(paths["front"], ["tau", "S_numeric", "S_exact"], front_rows)
    _write_metadata(config)
    print(f"p_numeric = {_fmt(p_num)} (|1 - S| = {abs(result.residual):.3e}, "
          f"{result.iterations} iterations)")
    if sol_exact is not None:
        print(f"p_exact = {_fmt(sol_exact.p)}")
    return paths


def _profile_errors(config: RunConfig, mesh: MeshConfig, p_num: float,
                    sol_exact: ExactSolution):
    """Max-abs deviation of the recovered temperatures from the exact route.

    Sampled on up to 8 evenly spaced time levels plus the final one; exact
    values are skipped where their phase region or series range ends.
    """
    params = config.params
    g1 = advance_phase(make_phase_grid(1, p_num, mesh, params))
    g2 = advance_phase(make_phase_grid(2, p_num, mesh, params))
    f1 = recover_physical(g1)
    f2 = recover_physical(g2)
    n = mesh.n
    stride = max(1, n // 8)
    levels = sorted(set(range(stride, n + 1, stride)) | {n})
    err1 = 0.0
    err2 = 0.0
    for j in levels:
        tau_j = g1.tau[j]
        for i in range(mesh.m1 + 1):
            try:
                exact = u1_exact(float(f1.x[j, i]), float(tau_j), sol_exact)
            except (DomainError, NonConvergenceError):
                continue
            err1 = max(err1, abs(exact - f1.u[j, i]))
        for i in range(mesh.m2 + 1):
            try:
                exact = u2_exact(float(f2.x[j, i]), float(tau_j), sol_exact)
            except (DomainError, NonConvergenceError):
                continue
            err2 = max(err2, abs(exact - f2.u[j, i]))
    return err1, err2


def run_convergence(config: RunConfig, levels: int = 2) -> Path:
    """Mesh-refinement scan: p and temperature errors per refinement level.

    Level l runs the front search on the base mesh scaled by 2**l and
    reports |p_num - p_exact| plus max-abs temperature deviations from the
    exact route.  Failed levels carry the error name and the scan
    continues.
    """
    if levels < 2:
        raise InvalidInputError(f"levels must be >= 2, got {levels}")
    config.output_dir.mkdir(parents=True, exist_ok=True)
    params = config.params
    p_exact = solve_p_exact(params, config.bracket)
    sol_exact = ExactSolution(p_exact, params)

    rows = []
    base = config.mesh
    for level in range(levels):
        scale = 2 ** level
        mesh = MeshConfig(m1=base.m1 * scale, m2=base.m2 * scale, n=base.n * scale,
                          ratio=base.ratio, tau0_factor=base.tau0_factor)
        row = [str(level), str(mesh.m1), str(mesh.m2), str(mesh.n), _fmt(p_exact)]
        try:
            result = bisection_solve(params, mesh, config.bracket,
                                     config.eps, config.max_iter)
            if not result.converged:
                raise NonConvergenceError(
                    f"not converged after {result.iterations} iterations"
                )
            err1, err2 = _profile_errors(config, mesh, result.p, sol_exact)
            row += [_fmt(result.p), _fmt(abs(result.p - p_exact)),
                    _fmt(err1), _fmt(err2), "ok"]
        except FracStefanError as exc:
            logger.warning("convergence level %d failed: %s", level, exc)
            row += ["", "", "", "", _error_token(exc)]
        rows.append(row)
        logger.info("convergence level %d done", level)

    path = config.output_dir / "convergence.csv"
    _write_csv(path, ["level", "m1", "m2", "n", "p_exact", "p_num",
                      "p_abs_err", "u1_max_err", "u2_max_err", "status"], rows)
    _write_metadata(config)
    print(_render_table("mesh refinement scan:", ["level", "m1", "m2", "n",
                        "p_exact", "p_num", "p_abs_err", "u1_max_err",
                        "u2_max_err", "status"], rows))
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracstefan",
        description="Two-phase melting-front solver with power-law memory.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("exact", "front coefficient from the transcendental equation"),
        ("numeric", "front coefficient from the grid solver"),
        ("tables", "parameter sweep: exact and numeric coefficients plus final times"),
        ("profiles", "temperature profiles and front-position export"),
        ("convergence", "mesh refinement scan"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", type=Path, default=None, help="key=value config file")
        cmd.add_argument("--alpha", type=float, default=None)
        cmd.add_argument("--lambda1", type=float, default=None)
        cmd.add_argument("--lambda2", type=float, default=None)
        cmd.add_argument("--kappa1", type=float, default=None)
        cmd.add_argument("--kappa2", type=float, default=None)
        cmd.add_argument("--theta-inf", dest="theta_inf", type=float, default=None)
        cmd.add_argument("--ratio", type=float, default=None)
        cmd.add_argument("--m1", type=int, default=None)
        cmd.add_argument("--m2", type=int, default=None)
        cmd.add_argument("--n", type=int, default=None)
        cmd.add_argument("--eps", dest="epsilon", type=float, default=None)
        cmd.add_argument("--tau0-factor", dest="tau0_factor", type=float, default=None)
        cmd.add_argument("--p-min", dest="p_min", type=float, default=None)
        cmd.add_argument("--p-max", dest="p_max", type=float, default=None)
        cmd.add_argument("--max-iter", dest="max_iter", type=int, default=None)
        cmd.add_argument("--profile-times", dest="profile_times", default=None,
                         help="comma-separated sample times")
        cmd.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        cmd.add_argument("-v", "--verbose", action="store_true")
        if name == "convergence":
            cmd.add_argument("--levels", type=int, default=2)
    return parser


_OVERRIDE_KEYS = ("alpha", "lambda1", "lambda2", "kappa1", "kappa2", "theta_inf",
                  "ratio", "m1", "m2", "n", "epsilon", "tau0_factor",
                  "p_min", "p_max", "max_iter")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {key: getattr(args, key) for key in _OVERRIDE_KEYS}
    if args.profile_times is not None:
        try:
            overrides["profile_times"] = _parse_value("profile_times", args.profile_times)
        except ValueError as exc:
            print(f"error: bad --profile-times: {exc}", file=sys.stderr)
            return 2
    try:
        config = parse_config(args.config, overrides, mode=args.command,
                              output_dir=args.out)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "exact":
            p = solve_p_exact(config.params, config.bracket)
            print(f"p_exact = {_fmt(p)}")
            print(f"final_time = {_fmt(final_time(p, config.params.alpha))}")
        elif args.command == "numeric":
            result = bisection_solve(config.params, config.mesh, config.bracket,
                                     config.eps, config.max_iter)
            print(f"p_numeric = {_fmt(result.p)}")
            print(f"S_final = {_fmt(result.s_final)}")
            print(f"iterations = {result.iterations}")
            print(f"converged = {result.converged}")
            print(f"final_time = {_fmt(final_time(result.p, config.params.alpha))}")
            if not result.converged:
                return 3
        elif args.command == "tables":
            run_tables(config)
        elif args.command == "profiles":
            run_profiles(config)
        elif args.command == "convergence":
            run_convergence(config, args.levels)
    except (ParseError, ValidationError, InvalidInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FracStefanError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    return 0


def console_entry():  # pragma: no cover
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    console_entry()
