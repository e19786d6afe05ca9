"""Fundamental-gap analysis for the planar strip family.

For each (mu, L) the separated problem is solved for its first two
eigenpairs, the diameter-scaled gap is formed, and the test-function upper
bound for the gap is assembled together with the eigenfunction-shape
diagnostics (envelopes, inner-interval masses, inflection points).

Everything that collapses like exp(-c sqrt(mu)) is carried as a LogValue;
the float fields of the reports are best-effort float64 images and underflow
to 0 near the top of the sweep, which is expected and documented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from ._prufer import prufer_nodes
from .errors import ConfigError, ResolutionError, ShapeAnomalyError, UnsupportedDimensionError
from .logspace import LogValue, composite_weights, logsumexp_signed
from .slcore import (
    DEFAULT_CONFIG,
    EigenSolution,
    SolverConfig,
    WeightedSLProblem,
    WeightMode,
    _max_step,
    eigenvalue_gap,
    solve_eigen_shooting,
)


@dataclass(frozen=True)
class PiecewisePsi:
    """The odd, continuous, piecewise-linear test function.

    Equal to 1 left of -phi1, to -phi/phi1 on [-phi1, phi1], to -1 right of
    phi1, with phi1 = phi0/mu.
    """

    phi0: float
    mu: float
    phi1: float
    grid: np.ndarray
    values: np.ndarray

    def __call__(self, phi):
        phi = np.asarray(phi, dtype=float)
        return np.where(np.abs(phi) <= self.phi1, -phi / self.phi1, -np.sign(phi))


def test_function_psi(phi0: float, mu: float, grid: np.ndarray) -> PiecewisePsi:
    grid = np.asarray(grid, dtype=float)
    if not phi0 > 0.0 or not mu > 0.0:
        raise ConfigError("phi0 and mu must be positive")
    phi1 = phi0 / mu
    half_width = float(np.max(np.abs(grid)))
    if not phi1 < half_width:
        raise ConfigError(f"phi1 = phi0/mu = {phi1:g} must be smaller than the half-width")
    values = np.where(np.abs(grid) <= phi1, -grid / np.maximum(phi1, 1e-300), -np.sign(grid))
    return PiecewisePsi(phi0=phi0, mu=mu, phi1=phi1, grid=grid, values=values)


@dataclass
class GapTerms:
    """The four pieces of the Rayleigh-difference decomposition (log-scale)."""

    A: LogValue
    B: LogValue
    C: LogValue
    D: LogValue

    def upper_bound(self) -> LogValue:
        """(B + C + D) / (1 - A)."""
        one_minus_a = LogValue.from_float(1.0) - self.A
        return (self.B + self.C + self.D) / one_minus_a

    def floats(self) -> tuple:
        return tuple(t.to_float() for t in (self.A, self.B, self.C, self.D))


@dataclass
class ShapeReport:
    h1_at_0: float
    h1_max: float
    max_location: float
    inflection_point: float
    phi0: float
    phi1: float
    c1: float
    b_bound: float
    mass_center: float
    deriv_mass: float
    envelopes_ok: bool
    h1_at_0_log: LogValue = None
    mass_center_log: LogValue = None
    deriv_mass_log: LogValue = None
    envelope_lower_ok: bool = True
    envelope_upper_ok: bool = True
    h0_bound_ok: bool = True


@dataclass
class IntegralBoundCheck:
    weighted_mass: float
    weighted_mass_log: LogValue
    b_bound: float
    lemma_bound_ok: bool
    mass_center: float
    mass_center_log: LogValue
    deriv_mass: float
    deriv_mass_log: LogValue


@dataclass
class GapReport:
    mu: float
    L: float
    lambda1: float
    lambda2: float
    gap: float
    diameter: float
    d2gap: float
    rayleigh_upper: float
    terms: tuple
    shape: ShapeReport
    gap_log: LogValue = None
    d2gap_log: LogValue = None
    rayleigh_upper_log: LogValue = None
    rayleigh_upper_direct_log: LogValue = None
    terms_log: GapTerms = None
    h1: EigenSolution = field(default=None, repr=False)
    h2: EigenSolution = field(default=None, repr=False)
    warnings: tuple = ()


def _gauge_samples(p: WeightedSLProblem, lam: float, nodes: np.ndarray, config: SolverConfig):
    """Even solution y (gauge y(0)=1, y'(0)=0) and y' at the given nodes."""
    theta, lnrho = prufer_nodes(
        lam, p.m, p.unit_weight, math.pi / 2.0, nodes,
        config.sample_atol, config.sample_rtol, _max_step(p, p.a, config),
    )
    return theta, lnrho


def _inner_integrals(h1: EigenSolution, phi1: float, config: SolverConfig):
    """Plain-float integrals of the gauge solution over [0, phi1].

    Over the kink interval the gauge solution is O(1) (its scale is set at
    the center), so ordinary float arithmetic is exact enough here; the
    global exp(-S) scale enters only through h1's normalization constant.
    """
    n_half = max(64, config.inner_nodes // 2)
    p = h1.problem
    nodes = np.linspace(0.0, phi1, n_half + 1)
    theta, lnrho = _gauge_samples(p, h1.lam, nodes, config)
    y = np.exp(lnrho) * np.sin(theta)
    yp = np.exp(lnrho) * np.cos(theta)
    w = composite_weights(n_half + 1, nodes[1] - nodes[0])
    sec2 = p.weight(nodes)
    ratio = nodes / phi1
    int_y2 = float(np.sum(w * y * y))
    int_y2_sec = float(np.sum(w * y * y * sec2))
    int_psi_gap_sec = float(np.sum(w * (1.0 - ratio**2) * y * y * sec2))
    int_psi_gap = float(np.sum(w * (1.0 - ratio**2) * y * y))
    int_dpsi = float(np.sum(w * ((y + nodes * yp) ** 2 / phi1**2 - yp * yp)))
    int_yp2 = float(np.sum(w * yp * yp))
    return {
        "y2": int_y2,
        "y2_sec": int_y2_sec,
        "gap_sec": int_psi_gap_sec,
        "gap_plain": int_psi_gap,
        "dpsi": int_dpsi,
        "yp2": int_yp2,
    }


def rayleigh_difference_terms(
    h1: EigenSolution,
    psi: PiecewisePsi,
    mu: float = None,
    lambda1: float = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> GapTerms:
    """The decomposition terms, all supported on the kink interval:

    A = int (h1^2 - (psi h1)^2) sec^2,  B = int ((psi h1)'^2 - h1'^2),
    C = mu int ((psi h1)^2 - h1^2),     D = lambda1 * A.
    """
    if mu is None:
        mu = h1.problem.m
    if lambda1 is None:
        lambda1 = h1.lam
    if config.inner_nodes < 64:
        raise ResolutionError("inner interval needs at least 64 quadrature points")
    phi1 = psi.phi1
    if not 0.0 < phi1 < h1.problem.a:
        raise ResolutionError(f"kink half-width {phi1:g} outside the domain")
    ints = _inner_integrals(h1, phi1, config)
    c2_log = 2.0 * h1.log_norm  # squared normalization constant of h1
    # factor 2: integrands are even, integrals taken over [0, phi1]
    a_term = LogValue.from_float(2.0 * ints["gap_sec"]) * LogValue.exp(c2_log)
    b_term = LogValue.from_float(2.0 * ints["dpsi"]) * LogValue.exp(c2_log)
    c_term = LogValue.from_float(-2.0 * mu * ints["gap_plain"]) * LogValue.exp(c2_log)
    d_term = a_term * LogValue.from_float(lambda1)
    return GapTerms(A=a_term, B=b_term, C=c_term, D=d_term)


def rayleigh_difference_direct(
    h1: EigenSolution,
    psi: PiecewisePsi,
    mu: float = None,
    lambda1: float = None,
    n_gauss: int = 64,
) -> LogValue:
    """R[psi h1] - R[h1] assembled independently of the A/B/C/D route.

    Outside the kink interval the integrands of the two quotients agree
    pointwise, so the quotient difference reduces exactly to

        (dN - lambda1 dD) / (1 + dD),

    with dN, dD the numerator/denominator increments over the kink interval.
    Those are evaluated here with Gauss-Legendre quadrature (the production
    route uses composite Simpson), giving a second, independently assembled
    value of the same quantity that stays meaningful when the naive
    subtraction of the two quotients would cancel to noise.
    """
    if mu is None:
        mu = h1.problem.m
    if lambda1 is None:
        lambda1 = h1.lam
    p = h1.problem
    phi1 = psi.phi1
    x, wq = np.polynomial.legendre.leggauss(n_gauss)
    nodes = 0.5 * phi1 * (x + 1.0)
    wq = 0.5 * phi1 * wq
    order = np.argsort(nodes)
    nodes, wq = nodes[order], wq[order]
    all_nodes = np.concatenate(([0.0], nodes))
    theta, lnrho = _gauge_samples(p, lambda1, all_nodes, DEFAULT_CONFIG)
    y = np.exp(lnrho[1:]) * np.sin(theta[1:])
    yp = np.exp(lnrho[1:]) * np.cos(theta[1:])
    sec2 = p.weight(nodes)
    psi_v = -nodes / phi1
    psi_p = -1.0 / phi1
    g = psi_v * y
    gp = psi_p * y + psi_v * yp
    d_num = 2.0 * float(np.sum(wq * ((gp**2 + mu * g**2) - (yp**2 + mu * y**2))))
    d_den = 2.0 * float(np.sum(wq * (g**2 - y**2) * sec2))
    c2 = LogValue.exp(2.0 * h1.log_norm)
    d_num_l = LogValue.from_float(d_num) * c2
    d_den_l = LogValue.from_float(d_den) * c2
    numer = d_num_l - d_den_l * LogValue.from_float(lambda1)
    denom = LogValue.from_float(1.0) + d_den_l
    return numer / denom


def _log_cosh(x: np.ndarray) -> np.ndarray:
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def shape_report(
    h1: EigenSolution,
    mu: float = None,
    lambda1: float = None,
    phi0: float = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> ShapeReport:
    """Locate the maxima and inflection points of the ground eigenfunction and
    evaluate the near-center envelope and mass diagnostics."""
    p = h1.problem
    if mu is None:
        mu = p.m
    if lambda1 is None:
        lambda1 = h1.lam
    L = p.a
    if phi0 is None:
        phi0 = L / 4.0
    if not 0.0 < phi0 < L / 2.0:
        raise ConfigError(f"phi0 must lie in (0, L/2), got {phi0}")
    phi1 = phi0 / mu

    n = len(h1.grid) - 1
    half = n // 2
    grid_r = h1.grid[half:]
    vals_r = h1.values[half:]

    # right maximum, refined by a parabola through the three nearest samples
    i_max = int(np.argmax(vals_r))
    if i_max in (0, len(vals_r) - 1):
        raise ShapeAnomalyError("no interior maximum found")
    y0, y1, y2 = vals_r[i_max - 1 : i_max + 2]
    denom = y0 - 2.0 * y1 + y2
    delta = 0.5 * (y0 - y2) / denom if denom != 0.0 else 0.0
    dx = grid_r[1] - grid_r[0]
    max_location = float(grid_r[i_max] + delta * dx)
    h1_max = float(y1 - 0.25 * (y0 - y2) * delta)

    # inflection: sign change of the (fourth-order) second difference,
    # linearly interpolated.  The search is restricted to well-represented
    # samples (the deep tunneling tail underflows to subnormal noise) and
    # takes the outermost flip, the convex-to-concave transition of the
    # boundary layer.
    log_r = h1.log_abs[half:]
    idx = np.arange(2, len(vals_r) - 2)
    d2 = (
        -vals_r[idx - 2]
        + 16.0 * vals_r[idx - 1]
        - 30.0 * vals_r[idx]
        + 16.0 * vals_r[idx + 1]
        - vals_r[idx + 2]
    )
    log_peak = np.max(log_r[np.isfinite(log_r)])
    ok = log_r[idx] > log_peak - 600.0
    flips = np.nonzero((d2[:-1] > 0.0) & (d2[1:] <= 0.0) & ok[:-1] & ok[1:])[0]
    if len(flips) == 0:
        raise ShapeAnomalyError("no concavity change: eigenfunction is single-peaked")
    j = int(flips[-1])
    frac = d2[j] / (d2[j] - d2[j + 1]) if d2[j] != d2[j + 1] else 0.0
    if 1 <= j < len(d2) - 1:
        # quadratic root through the three samples around the crossing
        a_q = 0.5 * (d2[j + 1] + d2[j - 1]) - d2[j]
        b_q = 0.5 * (d2[j + 1] - d2[j - 1])
        disc = b_q * b_q - 4.0 * a_q * d2[j]
        if abs(a_q) > 1e-30 * abs(b_q) and disc >= 0.0:
            for root in ((-b_q + math.sqrt(disc)) / (2.0 * a_q), (-b_q - math.sqrt(disc)) / (2.0 * a_q)):
                if 0.0 <= root <= 1.0:
                    frac = root
                    break
    inflection_point = float(grid_r[idx[j]] + frac * dx)

    c1 = 1.0 - (math.cos(2.0 * phi0) / math.cos(phi0)) ** 2
    cos2_l = math.cos(L) ** 2
    b_bound = (lambda1 / mu - cos2_l) / (math.cos(phi0) ** 2 - cos2_l)

    ints = _inner_integrals(h1, phi1, config)
    c2_log = 2.0 * h1.log_norm
    mass_center_log = LogValue.from_float(2.0 * mu * mu * ints["y2"]) * LogValue.exp(c2_log)
    deriv_mass_log = LogValue.from_float(2.0 * ints["yp2"]) * LogValue.exp(c2_log)
    h1_at_0_log = LogValue.exp(h1.log_norm)  # gauge value 1 times normalization

    # pointwise envelopes on (0, phi0], from the raw center-out log data
    half_nodes = np.linspace(0.0, p.a, len(h1.theta_half))
    mask = (half_nodes > 0.0) & (half_nodes <= phi0)
    with np.errstate(divide="ignore"):
        log_y = h1.lnrho_half[mask] + np.log(np.abs(np.sin(h1.theta_half[mask])))
    phis = half_nodes[mask]
    lower = _log_cosh(math.sqrt(mu * c1) * phis)
    upper = _log_cosh(math.sqrt(mu) * math.sin(L) * phis)
    envelope_lower_ok = bool(np.all(log_y >= lower - 1e-8))
    envelope_upper_ok = bool(np.all(log_y <= upper + 1e-8))

    # value bound at the center: h1(0)^2 <= 4 b exp(-sqrt(mu c1) phi0 / 2)
    rhs_log = math.log(4.0 * b_bound) - 0.5 * math.sqrt(mu * c1) * phi0 if b_bound > 0 else -np.inf
    h0_bound_ok = bool(2.0 * h1.log_norm <= rhs_log)

    return ShapeReport(
        h1_at_0=h1_at_0_log.to_float(),
        h1_max=h1_max,
        max_location=max_location,
        inflection_point=inflection_point,
        phi0=phi0,
        phi1=phi1,
        c1=c1,
        b_bound=b_bound,
        mass_center=mass_center_log.to_float(),
        deriv_mass=deriv_mass_log.to_float(),
        envelopes_ok=envelope_lower_ok and envelope_upper_ok,
        h1_at_0_log=h1_at_0_log,
        mass_center_log=mass_center_log,
        deriv_mass_log=deriv_mass_log,
        envelope_lower_ok=envelope_lower_ok,
        envelope_upper_ok=envelope_upper_ok,
        h0_bound_ok=h0_bound_ok,
    )


def integral_bound_check(
    h1: EigenSolution,
    mu: float = None,
    lambda1: float = None,
    phi0: float = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> IntegralBoundCheck:
    """Weighted center mass against its closed-form bound, plus the two
    inner-interval quantities whose sweep-decrease the verification asserts."""
    p = h1.problem
    if mu is None:
        mu = p.m
    if lambda1 is None:
        lambda1 = h1.lam
    L = p.a
    if phi0 is None:
        phi0 = L / 4.0
    phi1 = phi0 / mu

    # log-space quadrature of h^2 sec^2 over [0, phi0]; the integrand spans
    # exp(2 kappa phi0), far beyond float range at large mu
    n_seg = max(2048, int(16.0 * math.sqrt(mu) * phi0))
    n_seg += n_seg % 2
    nodes = np.linspace(0.0, phi0, n_seg + 1)
    theta, lnrho = _gauge_samples(p, lambda1, nodes, config)
    with np.errstate(divide="ignore"):
        log_y2sec = 2.0 * (lnrho + np.log(np.maximum(np.abs(np.sin(theta)), 1e-300))) - 2.0 * np.log(
            np.cos(nodes)
        )
    wq = composite_weights(n_seg + 1, nodes[1] - nodes[0])
    half_int = logsumexp_signed(log_y2sec + np.log(wq), np.ones(n_seg + 1))
    weighted_mass_log = LogValue.exp(math.log(2.0) + half_int.log + 2.0 * h1.log_norm)

    cos2_l = math.cos(L) ** 2
    b_bound = (lambda1 / mu - cos2_l) / (math.cos(phi0) ** 2 - cos2_l)
    lemma_ok = bool(weighted_mass_log < LogValue.from_float(b_bound))

    ints = _inner_integrals(h1, phi1, config)
    c2 = LogValue.exp(2.0 * h1.log_norm)
    mass_center_log = LogValue.from_float(2.0 * mu * mu * ints["y2"]) * c2
    deriv_mass_log = LogValue.from_float(2.0 * ints["yp2"]) * c2

    return IntegralBoundCheck(
        weighted_mass=weighted_mass_log.to_float(),
        weighted_mass_log=weighted_mass_log,
        b_bound=b_bound,
        lemma_bound_ok=lemma_ok,
        mass_center=mass_center_log.to_float(),
        mass_center_log=mass_center_log,
        deriv_mass=deriv_mass_log.to_float(),
        deriv_mass_log=deriv_mass_log,
    )


def analyze_gap(
    d: geometry.StripDomain,
    phi0: float = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> GapReport:
    """Full gap analysis of one planar strip: eigenpairs, diameter-scaled gap,
    test-function upper bound with its decomposition, and shape diagnostics."""
    if d.n != 2:
        raise UnsupportedDimensionError("analyze_gap handles n = 2; use the chain module otherwise")
    L = d.L
    mu = d.mu
    if phi0 is None:
        phi0 = L / 4.0
    if not 0.0 < phi0 < L / 2.0:
        raise ConfigError(f"phi0 must lie in (0, L/2), got {phi0}")

    p = WeightedSLProblem(a=L, m=mu, weight_mode=WeightMode.SECANT2)
    h1 = solve_eigen_shooting(p, 1, config=config)
    h2 = solve_eigen_shooting(p, 2, config=config)
    gap_log = eigenvalue_gap(p, h1, h2, config)

    diam = geometry.diameter(d)
    d2gap_log = gap_log * LogValue.from_float(diam * diam)

    psi = test_function_psi(phi0, mu, h1.grid)
    terms = rayleigh_difference_terms(h1, psi, mu, h1.lam, config)
    upper_log = terms.upper_bound()
    upper_direct_log = rayleigh_difference_direct(h1, psi, mu, h1.lam)
    shape = shape_report(h1, mu, h1.lam, phi0, config)

    return GapReport(
        mu=mu,
        L=L,
        lambda1=h1.lam,
        lambda2=h2.lam,
        gap=gap_log.to_float(),
        diameter=diam,
        d2gap=d2gap_log.to_float(),
        rayleigh_upper=upper_log.to_float(),
        terms=terms.floats(),
        shape=shape,
        gap_log=gap_log,
        d2gap_log=d2gap_log,
        rayleigh_upper_log=upper_log,
        rayleigh_upper_direct_log=upper_direct_log,
        terms_log=terms,
        h1=h1,
        h2=h2,
        warnings=h1.warnings + h2.warnings,
    )
