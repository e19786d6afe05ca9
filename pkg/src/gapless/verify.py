"""The inequality battery behind ``gapless verify``.

Every quantitative statement the analysis relies on is checked here with its
measured margin: geometry bounds, eigenvalue brackets, the gap upper bound
and its decomposition, the eigenfunction shape diagnostics, and the
higher-dimensional chain bound.  Thresholds of the form "for mu large
enough" are located empirically along the sweep and reported, never
hard-coded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import chain as chain_mod
from . import geometry
from .errors import GaplessError
from .gap import GapReport, analyze_gap, integral_bound_check
from .logspace import LogValue
from .slcore import (
    DEFAULT_CONFIG,
    SolverConfig,
    WeightedSLProblem,
    bracket_lambda1,
    matrix_eigenvalue_extrapolated,
    solve_eigen_matrix,
    solve_eigen_shooting,
    solve_gap_pair,
)

THREE_PI_SQ = 3.0 * math.pi**2


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ""

    def as_dict(self) -> dict:
        margin = float(self.margin)
        if math.isinf(margin):
            margin = math.copysign(1e300, margin)
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "margin": margin,
            "detail": self.detail,
        }


@dataclass
class VerifyResult:
    checks: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)
    skipped: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, margin: float, detail: str = ""):
        self.checks.append(Check(name, bool(passed), float(margin), detail))

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
            "thresholds": self.thresholds,
            "skipped_above_cap": self.skipped,
            "warnings": self.warnings,
        }


def _strictly_decreasing(vals) -> tuple[bool, float]:
    diffs = [a - b for a, b in zip(vals, vals[1:])]
    return all(d > 0 for d in diffs), min(diffs) if diffs else math.inf


def _strictly_increasing(vals) -> tuple[bool, float]:
    ok, m = _strictly_decreasing([-v for v in vals])
    return ok, m


def _first_holding_threshold(mu_values, flags) -> float | None:
    """Smallest sweep mu from which a property holds through the cap."""
    for i in range(len(flags)):
        if all(flags[i:]):
            return mu_values[i]
    return None


def geometry_checks(result: VerifyResult, L: float, mu_values, n_triples: int = 1000, seed: int = 20260811):
    rng = np.random.default_rng(seed)
    worst_prop22 = math.inf
    worst_pair = math.inf
    worst_neck_true = math.inf
    worst_neck_stated = math.inf
    worst_chain = math.inf
    for mu in mu_values:
        d = geometry.StripDomain(n=2, mu=mu, L=L)
        dia = geometry.diameter(d)
        lo, hi = geometry.diameter_bounds(d)
        worst_prop22 = min(worst_prop22, dia - lo, hi - dia)
        pts = geometry.corner_points(d)
        d_pq = geometry.hyperbolic_distance(pts["P"], pts["Q"])
        d_pr = geometry.hyperbolic_distance(pts["P"], pts["R"])
        d_rs = geometry.hyperbolic_distance(pts["R"], pts["S"])
        worst_pair = min(worst_pair, d_pr - max(d_pq, d_rs), 1e-9 - abs(d_pq - d_rs))
        rs, tu, _ = geometry.neck_check(d)
        worst_neck_true = min(worst_neck_true, rs - tu)
        worst_neck_stated = min(worst_neck_stated, rs - tu / math.cos(L))
        worst_chain = min(worst_chain, d_pr - d_rs, d_rs - tu)
    result.add("geometry.diameter_bounds", worst_prop22 >= -1e-12, worst_prop22,
               "arcosh(1+2tan^2 L) <= D <= arcosh(1+2tan^2 L) + pi/sqrt(mu)")
    result.add("geometry.max_pair", worst_pair >= -1e-12, worst_pair,
               "diameter realized between opposite outer corners; symmetric sides equal")
    result.add("geometry.neck_ratio_corrected", worst_neck_true >= -1e-12, worst_neck_true,
               "dist(R,S) >= dist(T,U): the neck is wider than the central axis")
    result.add("geometry.distance_chain", worst_chain >= -1e-12, worst_chain,
               "dist(P,R) >= dist(R,S) >= dist(T,U)")
    if worst_neck_stated < 0.0:
        result.warnings.append(
            "the published neck comparison dist(R,S) >= dist(T,U)/cos(L) is violated "
            f"(worst margin {worst_neck_stated:.3e}); the auxiliary bound it rests on "
            "(arcosh(1+x^2) >= sqrt(2) x) holds with the opposite sign, so only "
            "dist(R,S) >= dist(T,U) is true; see the neck_ratio_corrected check"
        )

    worst_tri = math.inf
    for _ in range(n_triples):
        pts = [geometry.HalfPlanePoint(rng.uniform(-3, 3), rng.uniform(0.05, 4)) for _ in range(3)]
        dab = geometry.hyperbolic_distance(pts[0], pts[1])
        dbc = geometry.hyperbolic_distance(pts[1], pts[2])
        dac = geometry.hyperbolic_distance(pts[0], pts[2])
        worst_tri = min(worst_tri, dab + dbc - dac)
    result.add("geometry.triangle_inequality", worst_tri >= -1e-12, worst_tri,
               f"{n_triples} random triples")

    worst_rt = 0.0
    for _ in range(200):
        mu = float(rng.uniform(10, 1e6))
        r = float(rng.uniform(1.0, math.exp(math.pi / math.sqrt(mu))))
        phi = float(rng.uniform(-HALFPI_SAFE, HALFPI_SAFE))
        x, y = geometry.polar_to_cartesian(r, phi)
        r2, phi2 = geometry.cartesian_to_polar(x, y)
        worst_rt = max(worst_rt, abs(r2 - r), abs(phi2 - phi))
    result.add("geometry.coordinate_roundtrip", worst_rt <= 1e-12, 1e-12 - worst_rt,
               "(r,phi) -> (x,y) -> (r,phi)")


HALFPI_SAFE = math.pi / 2 - 1e-6


def sweep_reports(
    L: float,
    mu_values,
    phi0: float = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> list[GapReport]:
    return [analyze_gap(geometry.StripDomain(n=2, mu=mu, L=L), phi0, config) for mu in mu_values]


def eigenvalue_checks(result: VerifyResult, reports: list[GapReport], L: float):
    mu_values = [r.mu for r in reports]
    worst_lo = math.inf
    upper_flags = []
    cos2_half = math.cos(L / 2.0) ** 2
    for r in reports:
        p = WeightedSLProblem(a=L, m=r.mu)
        lo, hi = bracket_lambda1(p)
        worst_lo = min(worst_lo, r.lambda1 - lo, hi - r.lambda1)
        upper_flags.append(r.lambda1 <= r.mu * cos2_half)
    result.add("slcore.bracket_lambda1", worst_lo >= 0.0, worst_lo,
               "cos^2 L (pi^2/4L^2 + mu) <= lambda1 <= mu + pi^2/4L^2 at every sweep point")
    mu2 = _first_holding_threshold(mu_values, upper_flags)
    result.thresholds["lambda1_upper_mu2"] = mu2
    result.add("slcore.lambda1_upper_threshold", mu2 is not None,
               0.0 if mu2 is None else mu_values[-1] - mu2,
               f"lambda1 <= mu cos^2(L/2) from mu = {mu2}")

    ratios = [r.lambda1 / r.mu for r in reports]
    dec, margin = _strictly_decreasing(ratios)
    result.add("slcore.cor43_decreasing", dec, margin, "lambda1/mu strictly decreasing")
    cos2 = math.cos(L) ** 2
    above = min(q - cos2 for q in ratios)
    result.add("slcore.cor43_above_limit", above > 0.0, above, "lambda1/mu > cos^2 L")
    excess_ratio = (ratios[-1] - cos2) / (ratios[0] - cos2)
    result.add("slcore.cor43_excess_decay", excess_ratio < 0.20, 0.20 - excess_ratio,
               f"final excess fraction {excess_ratio:.4f} of initial")


def gap_checks(result: VerifyResult, reports: list[GapReport]):
    worst_pos = math.inf
    worst_upper = math.inf
    worst_recon = 0.0
    worst_ad = math.inf
    for r in reports:
        worst_pos = min(worst_pos, r.gap_log.log if r.gap_log.sign > 0 else -math.inf)
        # gap <= upper + 1e-9 absolute; margin measured in log units
        u = r.rayleigh_upper_log
        g = r.gap_log
        if g <= u:
            worst_upper = min(worst_upper, u.log - g.log)
        elif g.to_float() <= u.to_float() + 1e-9:
            worst_upper = min(worst_upper, 0.0)
        else:
            worst_upper = min(worst_upper, u.log - g.log)
        rec, direct = r.rayleigh_upper_log, r.rayleigh_upper_direct_log
        rel = abs((rec - direct).to_float()) / abs(rec.to_float()) if rec.to_float() != 0 else abs(
            math.expm1(rec.log - direct.log) if direct.sign == rec.sign else math.inf
        )
        worst_recon = max(worst_recon, rel)
        a_t, d_t = r.terms_log.A, r.terms_log.D
        if r.lambda1 >= 1.0:
            worst_ad = min(worst_ad, d_t.log - a_t.log if a_t.sign > 0 and d_t.sign > 0 else -math.inf)
    result.add("gap.positive", worst_pos > -math.inf, worst_pos, "ln(gap) finite, gap > 0")
    result.add("gap.upper_bound", worst_upper >= 0.0, worst_upper,
               "lambda2 - lambda1 <= R[psi h1] - R[h1] (+1e-9); margin in log units")
    result.add("gap.reconstruction_vs_direct", worst_recon <= 1e-6, 1e-6 - worst_recon,
               "(B+C+D)/(1-A) against independently assembled quotient difference")
    result.add("gap.A_le_D", worst_ad >= 0.0, worst_ad, "0 < A <= D whenever lambda1 >= 1")

    d2_logs = [r.d2gap_log.log for r in reports]
    dec, margin = _strictly_decreasing(d2_logs)
    result.add("gap.d2gap_decreasing", dec, margin, "D^2 (lambda2-lambda1) strictly decreasing (log scale)")
    result.add("gap.d2gap_below_3pi2", min(d2_logs) < math.log(THREE_PI_SQ),
               math.log(THREE_PI_SQ) - min(d2_logs), "at least one sweep point beats the flat-space benchmark")
    final_ratio = math.exp(d2_logs[-1] - d2_logs[0])
    result.add("gap.d2gap_final_fraction", final_ratio < 0.2, 0.2 - final_ratio,
               f"final/initial = {final_ratio:.3e}")


def locate_d2gap_crossing(L: float, mu_hint: float = 100.0, config: SolverConfig = DEFAULT_CONFIG):
    """Empirical mu where D^2 * gap crosses 3 pi^2 (scanning below the sweep)."""

    def d2gap_at(mu: float) -> float:
        d = geometry.StripDomain(n=2, mu=mu, L=L)
        p = WeightedSLProblem(a=L, m=mu)
        _, _, gl = solve_gap_pair(p, config)
        dia = geometry.diameter(d)
        return (gl * LogValue.from_float(dia * dia)).to_float()

    hi = mu_hint
    val_hi = d2gap_at(hi)
    if val_hi >= THREE_PI_SQ:
        return None, val_hi  # crossing above the hint; caller reports raw value
    lo = hi
    val = val_hi
    while val < THREE_PI_SQ:
        lo /= 2.0
        if lo < 1.0:
            return None, val
        val = d2gap_at(lo)
    for _ in range(40):
        mid = math.sqrt(lo * hi)
        if d2gap_at(mid) >= THREE_PI_SQ:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-6:
            break
    return math.sqrt(lo * hi), None


def shape_checks(result: VerifyResult, reports: list[GapReport], config: SolverConfig = DEFAULT_CONFIG):
    mu_values = [r.mu for r in reports]

    # positivity and evenness are structural for the parity solver; check the
    # sign pattern and also one matrix-route eigenvector where the pair is
    # resolvable
    pos_ok = all(np.all(r.h1.signs[1:-1] > 0) for r in reports)
    result.add("shape.positivity", pos_ok, 1.0 if pos_ok else -1.0,
               "index-1 eigenfunction positive at all interior nodes (exact sign data)")
    even_worst = 0.0
    for r in reports:
        v = r.h1.values
        even_worst = max(even_worst, float(np.max(np.abs(v - v[::-1]))) / float(np.max(np.abs(v))))
    result.add("shape.evenness", even_worst <= 1e-10, 1e-10 - even_worst,
               "|h1(phi) - h1(-phi)| <= 1e-10 max h1 on the grid")
    # independent route: the pencil eigenvector is symmetric up to its
    # backward error eps*||T||/gap, far looser than the parity solver
    first = reports[0]
    pm = WeightedSLProblem(a=first.L, m=first.mu)
    sol_m = solve_eigen_matrix(pm, 1, 4096)
    vm = sol_m.values
    even_matrix = float(np.max(np.abs(vm - vm[::-1]))) / float(np.max(np.abs(vm)))
    result.add("shape.evenness_matrix_route", even_matrix <= 1e-6, 1e-6 - even_matrix,
               "pencil eigenvector mirror symmetry within its backward-error budget")

    maxlocs = [r.shape.max_location for r in reports]
    inc, margin = _strictly_increasing(maxlocs)
    result.add("shape.max_location_increasing", inc, margin,
               "the two maxima move outward toward the corners")
    center_ratio_logs = [r.shape.h1_at_0_log.log - math.log(r.shape.h1_max) for r in reports]
    dec, margin = _strictly_decreasing(center_ratio_logs)
    result.add("shape.center_depth_decreasing", dec, margin,
               "h1(0)/max h1 strictly decreasing (log scale)")

    worst_ip = 0.0
    for r in reports:
        worst_ip = max(worst_ip, abs(math.cos(r.shape.inflection_point) ** 2 - r.lambda1 / r.mu))
    result.add("shape.inflection_relation", worst_ip <= 1e-6, 1e-6 - worst_ip,
               "cos^2(phi_IP) = lambda1/mu within 1e-6")

    env_flags = [r.shape.envelopes_ok for r in reports]
    mu_env = _first_holding_threshold(mu_values, env_flags)
    result.thresholds["envelope_mu2"] = mu_env
    result.add("shape.envelopes_threshold", mu_env is not None,
               0.0 if mu_env is None else mu_values[-1] - mu_env,
               f"cosh envelopes hold pointwise from mu = {mu_env}")
    h0_flags = [r.shape.h0_bound_ok for r in reports]
    mu_h0 = _first_holding_threshold(mu_values, h0_flags)
    result.thresholds["h0_bound_mu2"] = mu_h0
    result.add("shape.h0_bound_threshold", mu_h0 is not None,
               0.0 if mu_h0 is None else mu_values[-1] - mu_h0,
               f"h1(0)^2 <= 4 b exp(-sqrt(mu c1) phi0/2) from mu = {mu_h0}")

    lemma_ok = True
    worst_lemma = math.inf
    mass_logs, deriv_logs = [], []
    for r in reports:
        chk = integral_bound_check(r.h1, r.mu, r.lambda1, r.shape.phi0, config)
        lemma_ok &= chk.lemma_bound_ok
        worst_lemma = min(worst_lemma, math.log(chk.b_bound) - chk.weighted_mass_log.log)
        mass_logs.append(chk.mass_center_log.log)
        deriv_logs.append(chk.deriv_mass_log.log)
    result.add("shape.lemma_integral_bound", lemma_ok, worst_lemma,
               "weighted center mass below its closed-form bound at every sweep point (log margin)")
    dec1, m1 = _strictly_decreasing(mass_logs)
    dec2, m2 = _strictly_decreasing(deriv_logs)
    result.add("shape.center_mass_decreasing", dec1, m1, "mu^2 int h1^2 over the kink interval (log scale)")
    result.add("shape.deriv_mass_decreasing", dec2, m2, "int h1'^2 over the kink interval (log scale)")


def chain_checks(result: VerifyResult, mu_values, L: float, dims=(3, 4), delta: float = math.pi / 4,
                 config: SolverConfig = DEFAULT_CONFIG, reports: list[GapReport] = None):
    worst_bound = math.inf
    for n in dims:
        deltas = (delta,) * (n - 2)
        gap_logs = []
        kappa_rows = []
        for mu in mu_values:
            ch = chain_mod.chain_gap(n, mu, deltas, L, config)
            for m in chain_mod.chain_bound_margins(ch):
                worst_bound = min(worst_bound, m)
            gap_logs.append(ch.gap_log.log)
            kappa_rows.append(ch.kappas)
        dec, margin = _strictly_decreasing(gap_logs)
        result.add(f"chain.gap_decreasing_n{n}", dec, margin,
                   f"final-level gap strictly decreasing along the sweep (n={n})")
        kappa_margin = math.inf
        for level in range(len(kappa_rows[0])):
            _, m_lvl = _strictly_increasing([row[level] for row in kappa_rows])
            kappa_margin = min(kappa_margin, m_lvl)
        result.add(f"chain.kappa_increasing_n{n}", kappa_margin > 0.0, kappa_margin,
                   "every separation constant increases with mu")
    result.add("chain.level_bound", worst_bound >= 0.0, worst_bound,
               "kappa_i - a_i(a_i-1) >= cos^2(delta_i)(kappa_{i-1} - a_i^2) at every level")

    # planar reduction: the degenerate chain must reproduce the direct analysis
    mu0 = mu_values[0]
    ch2 = chain_mod.chain_gap(2, mu0, (), L, config)
    if reports is not None and reports[0].mu == mu0:
        r0 = reports[0]
    else:
        r0 = analyze_gap(geometry.StripDomain(n=2, mu=mu0, L=L), config=config)
    rel = max(
        abs(ch2.lambda1 - r0.lambda1) / r0.lambda1,
        abs(ch2.lambda2 - r0.lambda2) / r0.lambda2,
    )
    result.add("chain.n2_consistency", rel <= 1e-8, 1e-8 - rel,
               "alpha_n = 0 reduction matches the planar analysis")


def cross_method_check(result: VerifyResult, L: float, m: float = 1000.0, N: int = 8192):
    p = WeightedSLProblem(a=L, m=m)
    worst = 0.0
    for k in (1, 2):
        lam_s = solve_eigen_shooting(p, k).lam
        lam_m = matrix_eigenvalue_extrapolated(p, k, N, levels=3)
        worst = max(worst, abs(lam_s - lam_m) / abs(lam_m))
    result.add("slcore.cross_method_spotcheck", worst <= 1e-8, 1e-8 - worst,
               f"shooting vs extrapolated pencil at m={m:g} (relative)")


def run_verification(
    L: float = math.pi / 3,
    mu_values=None,
    phi0: float = None,
    config: SolverConfig = DEFAULT_CONFIG,
    include_chain: bool = True,
    chain_dims=(3, 4),
) -> VerifyResult:
    """Run the whole battery and return the structured result."""
    result = VerifyResult()
    if mu_values is None:
        mu_values = list(np.logspace(2, 6, 9))
    mu_values = [float(m) for m in mu_values]
    if any(b <= a for a, b in zip(mu_values, mu_values[1:])):
        raise GaplessError("mu values must be strictly increasing")

    usable = [m for m in mu_values if m <= config.m_cap]
    result.skipped = [m for m in mu_values if m > config.m_cap]
    if result.skipped:
        result.warnings.append(
            f"{len(result.skipped)} sweep point(s) above the precision cap "
            f"{config.m_cap:g} were skipped: gap diagnostics are not certified there"
        )
    if len(usable) < 2:
        raise GaplessError("need at least two sweep points at or below the precision cap")

    geometry_checks(result, L, usable)
    reports = sweep_reports(L, usable, phi0, config)
    eigenvalue_checks(result, reports, L)
    gap_checks(result, reports)
    shape_checks(result, reports, config)
    cross_method_check(result, L)
    if include_chain:
        chain_checks(result, usable, L, chain_dims, config=config, reports=reports)

    crossing, raw = locate_d2gap_crossing(L, usable[0], config)
    result.thresholds["d2gap_crosses_3pi2_at_mu"] = crossing
    if crossing is None and raw is not None:
        result.warnings.append(
            f"D^2*gap is below 3 pi^2 already at the sweep start and down to mu=1 "
            f"(value {raw:.3e} at the scan edge); no crossing recorded"
        )
    return result
