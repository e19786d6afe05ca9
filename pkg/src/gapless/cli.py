"""Command-line experiment runner.

Subcommands: ``gap-sweep`` (CSV of the diameter-scaled gap along a mu sweep,
optional SVG), ``verify`` (the full inequality battery as a JSON report),
``eigen`` (eigenfunction profile dump), ``geometry`` (distance and diameter
queries).  Configuration comes from flags, optionally seeded from a JSON
file; flags win.  Exit codes: 0 success, 1 bad configuration, 2 solver
failure, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import chain as chain_mod
from . import geometry
from .errors import (
    ConfigError,
    DegenerateInputError,
    DomainError,
    GaplessError,
    UnsupportedDimensionError,
)
from .gap import analyze_gap
from .logspace import format_number
from .slcore import DEFAULT_CONFIG, WeightedSLProblem, solve_eigen_shooting, with_config
from .verify import run_verification

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VERIFY = 3

ERROR_TOKEN = "ERROR"

GAP_SWEEP_COLUMNS = (
    "mu",
    "lambda1",
    "lambda2",
    "gap",
    "diameter",
    "d2gap",
    "rayleigh_upper",
    "h1_at_0",
    "max_location",
)


def default_mu_values() -> tuple:
    return tuple(float(x) for x in np.logspace(2, 6, 9))


@dataclass
class SweepConfig:
    n: int = 2
    L: float = math.pi / 3
    deltas: tuple = ()
    mu_values: tuple = field(default_factory=default_mu_values)
    phi0: float = None
    rel_tol: float = 1e-13
    m_cap: float = DEFAULT_CONFIG.m_cap
    workers: int = 1
    out_csv: str = None
    out_svg: str = None
    out_json: str = None

    def __post_init__(self):
        self.deltas = tuple(float(d) for d in self.deltas)
        self.mu_values = tuple(float(m) for m in self.mu_values)
        if self.n < 2:
            raise ConfigError(f"dimension must be >= 2, got {self.n}")
        if not 0.0 < self.L < math.pi / 2:
            raise ConfigError(f"L must lie in (0, pi/2), got {self.L}")
        if len(self.deltas) != self.n - 2:
            raise ConfigError(f"need {self.n - 2} deltas for n={self.n}, got {len(self.deltas)}")
        for d in self.deltas:
            if not 0.0 < d < math.pi / 2:
                raise ConfigError(f"every delta must lie in (0, pi/2), got {d}")
        if not self.mu_values:
            raise ConfigError("mu_values must not be empty")
        if any(m <= 0 for m in self.mu_values):
            raise ConfigError("mu values must be positive")
        if any(b <= a for a, b in zip(self.mu_values, self.mu_values[1:])):
            raise ConfigError("mu values must be strictly increasing")
        if self.phi0 is not None and not 0.0 < self.phi0 < self.L / 2:
            raise ConfigError(f"phi0 must lie in (0, L/2), got {self.phi0}")
        if not 1e-14 <= self.rel_tol <= 1e-6:
            raise ConfigError(f"rel_tol must lie in [1e-14, 1e-6], got {self.rel_tol}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def solver_config(self):
        return with_config(DEFAULT_CONFIG, rel_tol=self.rel_tol, m_cap=self.m_cap)


def _planar_sweep_row(args) -> tuple:
    """One sweep point; module-level for process pools."""
    mu, L, phi0, rel_tol, m_cap = args
    config = with_config(DEFAULT_CONFIG, rel_tol=rel_tol, m_cap=m_cap)
    r = analyze_gap(geometry.StripDomain(n=2, mu=mu, L=L), phi0, config)
    row = [
        format_number(r.mu),
        format_number(r.lambda1),
        format_number(r.lambda2),
        format_number(r.gap_log),
        format_number(r.diameter),
        format_number(r.d2gap_log),
        format_number(r.rayleigh_upper_log),
        format_number(r.shape.h1_at_0_log),
        format_number(r.shape.max_location),
    ]
    return row, r.d2gap_log.log10(), r.warnings


def _chain_sweep_row(args) -> tuple:
    mu, n, deltas, L, rel_tol, m_cap = args
    config = with_config(DEFAULT_CONFIG, rel_tol=rel_tol, m_cap=m_cap)
    ch = chain_mod.chain_gap(n, mu, deltas, L, config)
    row = [format_number(mu)]
    row += [format_number(k) for k in ch.kappas]
    row += [format_number(ch.lambda1), format_number(ch.lambda2), format_number(ch.gap_log)]
    return row, ch.gap_log.log10(), ()


def _emit_csv(path: str, header: list, rows: list):
    text = ",".join(header) + "\n" + "".join(",".join(r) + "\n" for r in rows)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def _emit_svg_sweep(path: str, mu_values, log10_values, ylabel: str):
    import matplotlib

    matplotlib.use("svg")
    matplotlib.rcParams["svg.hashsalt"] = "gapless"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(mu_values, log10_values, "o-")
    ax.set_xlabel("mu")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def _emit_svg_profile(path: str, grid, values, title: str):
    import matplotlib

    matplotlib.use("svg")
    matplotlib.rcParams["svg.hashsalt"] = "gapless"
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(grid, values)
    ax.set_xlabel("phi")
    ax.set_ylabel("h")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def cmd_gap_sweep(config: SweepConfig) -> int:
    """Sweep the separation constant and emit one CSV row per mu."""
    if config.n == 2:
        header = list(GAP_SWEEP_COLUMNS)
        tasks = [(mu, config.L, config.phi0, config.rel_tol, config.m_cap) for mu in config.mu_values]
        worker = _planar_sweep_row
    else:
        header = (
            ["mu"]
            + [f"kappa{i}" for i in range(1, config.n)]
            + ["lambda1", "lambda2", "gap"]
        )
        tasks = [
            (mu, config.n, config.deltas, config.L, config.rel_tol, config.m_cap)
            for mu in config.mu_values
        ]
        worker = _chain_sweep_row

    rows = []
    curve = []
    failed = False
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = []
            for task in tasks:
                outcomes.append(pool.submit(worker, task))
            results = []
            for out in outcomes:
                try:
                    results.append(out.result())
                except GaplessError as exc:
                    results.append(exc)
    else:
        results = []
        for task in tasks:
            try:
                results.append(worker(task))
            except GaplessError as exc:
                results.append(exc)

    for task, res in zip(tasks, results):
        if isinstance(res, Exception):
            rows.append([format_number(task[0])] + [ERROR_TOKEN] * (len(header) - 1))
            print(f"solver failure at mu={task[0]:g}: {res}", file=sys.stderr)
            failed = True
            continue
        row, log10_val, warnings = res
        rows.append(row)
        curve.append((task[0], log10_val))
        for w in warnings:
            print(f"warning (mu={task[0]:g}): {w}", file=sys.stderr)

    _emit_csv(config.out_csv, header, rows)
    if config.out_svg and curve:
        ylabel = "log10(D^2 * gap)" if config.n == 2 else "log10(gap)"
        _emit_svg_sweep(config.out_svg, [c[0] for c in curve], [c[1] for c in curve], ylabel)
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_verify(config: SweepConfig) -> int:
    """Run the inequality battery; write the JSON report; exit 0 iff all pass."""
    result = run_verification(
        L=config.L,
        mu_values=config.mu_values,
        phi0=config.phi0,
        config=config.solver_config(),
        include_chain=True,
    )
    payload = {
        "config": {
            "n": config.n,
            "L": config.L,
            "mu_values": list(config.mu_values),
            "phi0": config.phi0,
            "rel_tol": config.rel_tol,
            "m_cap": config.m_cap,
        },
        **result.as_dict(),
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if config.out_json is None:
        sys.stdout.write(text + "\n")
    else:
        with open(config.out_json, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    for c in result.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name} (margin {c.margin:.3e})", file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_VERIFY


def cmd_eigen(config: SweepConfig, mu: float, k: int) -> int:
    """Dump one eigenfunction profile as a two-column CSV."""
    p = WeightedSLProblem(a=config.L, m=mu)
    sol = solve_eigen_shooting(p, k, config=config.solver_config())
    rows = [[format_number(phi), format_number(v)] for phi, v in zip(sol.grid, sol.values)]
    _emit_csv(config.out_csv, ["phi", "h"], rows)
    if config.out_svg:
        _emit_svg_profile(
            config.out_svg, sol.grid, sol.values, f"eigenfunction k={k}, mu={mu:g}, L={config.L:g}"
        )
    return EXIT_OK


def cmd_geometry(config: SweepConfig, mu: float, distance: tuple = None) -> int:
    """Distance / diameter queries for one strip domain."""
    if distance is not None:
        x1, y1, x2, y2 = distance
        d = geometry.hyperbolic_distance(
            geometry.HalfPlanePoint(x1, y1), geometry.HalfPlanePoint(x2, y2)
        )
        sys.stdout.write(json.dumps({"distance": d}) + "\n")
        return EXIT_OK
    dom = geometry.StripDomain(n=2, mu=mu, L=config.L)
    pts = geometry.corner_points(dom)
    lo, hi = geometry.diameter_bounds(dom)
    rs, tu, ok = geometry.neck_check(dom)
    payload = {
        "mu": mu,
        "L": config.L,
        "corners": {k: [v.x, v.y] for k, v in pts.items()},
        "diameter": geometry.diameter(dom),
        "diameter_bounds": [lo, hi],
        "neck": {"dist_RS": rs, "dist_TU": tu, "ratio_ok": ok},
    }
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _load_file_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    allowed = set(SweepConfig.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def build_config(args: argparse.Namespace) -> SweepConfig:
    data: dict = {}
    if getattr(args, "config", None):
        data.update(_load_file_config(args.config))
    for key in (
        "n",
        "L",
        "deltas",
        "mu_values",
        "phi0",
        "rel_tol",
        "m_cap",
        "workers",
        "out_csv",
        "out_svg",
        "out_json",
    ):
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if "workers" not in data:
        env = os.environ.get("GAPLESS_WORKERS")
        if env is not None:
            try:
                data["workers"] = int(env)
            except ValueError as exc:
                raise ConfigError(f"GAPLESS_WORKERS must be an integer, got {env!r}") from exc
    try:
        return SweepConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="JSON config file; explicit flags override it")
    sub.add_argument("--n", type=int, help="ambient dimension (default 2)")
    sub.add_argument("--L", type=float, help="angular half-width of the last angle")
    sub.add_argument("--deltas", type=float, nargs="*", help="half-widths of the intermediate angles")
    sub.add_argument("--mu-values", dest="mu_values", type=float, nargs="*", help="sweep values of mu")
    sub.add_argument("--phi0", type=float, help="test-function parameter (default L/4)")
    sub.add_argument("--rel-tol", dest="rel_tol", type=float, help="eigenvalue relative tolerance")
    sub.add_argument("--m-cap", dest="m_cap", type=float, help="precision budget cap on mu")
    sub.add_argument("--workers", type=int, help="parallel sweep workers (env GAPLESS_WORKERS)")
    sub.add_argument("--out-csv", dest="out_csv", help="CSV output path (default stdout)")
    sub.add_argument("--out-svg", dest="out_svg", help="optional SVG plot path")
    sub.add_argument("--out-json", dest="out_json", help="JSON report path (default stdout)")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapless",
        description="Fundamental-gap laboratory for hyperbolic strip domains",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_sweep = subs.add_parser("gap-sweep", help="sweep mu and emit CSV (+ optional SVG)")
    _add_common(p_sweep)

    p_verify = subs.add_parser("verify", help="run the inequality battery, emit JSON report")
    _add_common(p_verify)

    p_eigen = subs.add_parser("eigen", help="dump one eigenfunction profile as CSV")
    _add_common(p_eigen)
    p_eigen.add_argument("--mu", type=float, required=True)
    p_eigen.add_argument("--k", type=int, default=1, help="eigenvalue index (default 1)")

    p_geom = subs.add_parser("geometry", help="distance/diameter queries")
    _add_common(p_geom)
    p_geom.add_argument("--mu", type=float, help="separation constant (for domain queries)")
    p_geom.add_argument(
        "--distance",
        type=float,
        nargs=4,
        metavar=("X1", "Y1", "X2", "Y2"),
        help="distance between two half-plane points",
    )
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        if args.command == "gap-sweep":
            return cmd_gap_sweep(config)
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "eigen":
            return cmd_eigen(config, args.mu, args.k)
        if args.command == "geometry":
            if args.distance is None and args.mu is None:
                raise ConfigError("geometry needs --mu or --distance")
            return cmd_geometry(config, args.mu, tuple(args.distance) if args.distance else None)
        raise ConfigError(f"unknown command {args.command}")
    except (ConfigError, DomainError, UnsupportedDimensionError, DegenerateInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GaplessError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except BrokenPipeError:
        # downstream consumer (e.g. head) closed the pipe; not an error
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
