"""Higher-dimensional strips via iterated separation of variables.

In dimension n the radial factor is explicit and each angular level reduces,
after the substitution phi = omega - pi/2, to the same weighted problem the
planar case solves: the level passes its first eigenvalue down the chain as
the next shift constant.  Only at the last level (half-width L) are the first
two eigenvalues extracted; the exponent shift cancels in their difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, DomainError
from .logspace import LogValue
from .slcore import (
    DEFAULT_CONFIG,
    SolverConfig,
    WeightedSLProblem,
    WeightMode,
    eigenvalue_gap,
    solve_eigen_shooting,
)


@dataclass(frozen=True)
class KappaChain:
    """Separation constants and exponents of one n-dimensional run."""

    n: int
    mu: float
    deltas: tuple
    L: float
    kappas: tuple      # kappa_1 .. kappa_{n-1}
    alphas: tuple      # alpha_2 .. alpha_n
    lambda1: float
    lambda2: float
    gap: float
    gap_log: LogValue

    @property
    def final_shift(self) -> float:
        return self.kappas[-1] - self.alphas[-1] ** 2


def radial_separation_constant(n: int, mu: float, k: int = 1) -> float:
    """k-th radial separation constant: k^2 mu in the plane, (n-2)^2 + k^2 mu above."""
    if n < 2:
        raise ConfigError(f"dimension must be >= 2, got {n}")
    if not mu > 0.0:
        raise ConfigError(f"mu must be positive, got {mu}")
    if k < 1:
        raise ConfigError(f"radial index must be >= 1, got {k}")
    if n == 2:
        return k * k * mu
    return (n - 2) ** 2 + k * k * mu


def radial_interval(n: int, mu: float) -> tuple[float, float]:
    """Domain of the log-substituted radial variable for n >= 3."""
    if n < 3:
        raise ConfigError("the log-substituted radial factor exists for n >= 3")
    left = -(n - 2) * math.pi / math.sqrt(mu) - math.log(n - 2)
    right = -math.log(n - 2)
    return left, right


def radial_eigenfunction(n: int, mu: float, s: float) -> float:
    """Closed-form ground radial factor -e^s sin(sqrt(mu)/(n-2) (s + log(n-2))).

    Vanishes at both interval endpoints and is positive between them.
    """
    left, right = radial_interval(n, mu)
    if not left - 1e-12 <= s <= right + 1e-12:
        raise DomainError(f"s={s:g} outside the radial interval [{left:g}, {right:g}]")
    return -math.exp(s) * math.sin(math.sqrt(mu) / (n - 2) * (s + math.log(n - 2)))


def alpha_exponent(n: int, i: int) -> float:
    """Symmetrizing exponent of level i: n - 1 - i/2, and n/2 - 1 at the last level."""
    if not 2 <= i <= n:
        raise ConfigError(f"level index must lie in [2, {n}], got {i}")
    if i == n:
        return n / 2.0 - 1.0
    return n - 1.0 - i / 2.0


def kappa_step(
    kappa_prev: float,
    n: int,
    i: int,
    delta_i: float,
    config: SolverConfig = DEFAULT_CONFIG,
) -> float:
    """One chain level: solve the weighted problem on (-delta_i, delta_i) with
    shift kappa_prev - alpha_i^2 and return kappa_i = Lam_1 + alpha_i(alpha_i - 1)."""
    if not 2 <= i <= n - 1:
        raise ConfigError(f"intermediate level index must lie in [2, {n - 1}], got {i}")
    alpha = alpha_exponent(n, i)
    p = WeightedSLProblem(a=delta_i, m=kappa_prev - alpha * alpha, weight_mode=WeightMode.SECANT2)
    lam1 = solve_eigen_shooting(p, 1, config=config).lam
    return lam1 + alpha * (alpha - 1.0)


def chain_gap(
    n: int,
    mu: float,
    deltas,
    L: float,
    config: SolverConfig = DEFAULT_CONFIG,
) -> KappaChain:
    """Run the full chain and extract the two lowest eigenvalues at the last level.

    n = 2 is accepted as the degenerate chain (no intermediate levels,
    alpha_n = 0); it reproduces the planar analysis and serves as the
    consistency check between the two formulations.
    """
    deltas = tuple(float(x) for x in deltas)
    if n < 2:
        raise ConfigError(f"dimension must be >= 2, got {n}")
    if len(deltas) != n - 2:
        raise ConfigError(f"need {n - 2} delta half-widths for n={n}, got {len(deltas)}")

    kappas = [radial_separation_constant(n, mu, 1)]
    alphas = []
    for i in range(2, n):
        alphas.append(alpha_exponent(n, i))
        kappas.append(kappa_step(kappas[-1], n, i, deltas[i - 2], config))

    alpha_n = alpha_exponent(n, n)
    alphas.append(alpha_n)
    shift = alpha_n * (alpha_n - 1.0)
    p = WeightedSLProblem(a=L, m=kappas[-1] - alpha_n * alpha_n, weight_mode=WeightMode.SECANT2)
    s1 = solve_eigen_shooting(p, 1, config=config)
    s2 = solve_eigen_shooting(p, 2, config=config)
    gap_log = eigenvalue_gap(p, s1, s2, config)

    return KappaChain(
        n=n,
        mu=mu,
        deltas=deltas,
        L=L,
        kappas=tuple(kappas),
        alphas=tuple(alphas),
        lambda1=s1.lam + shift,
        lambda2=s2.lam + shift,
        gap=gap_log.to_float(),
        gap_log=gap_log,
    )


def chain_bound_margins(chain: KappaChain) -> list[float]:
    """Margins of kappa_i - alpha_i(alpha_i - 1) >= cos^2(delta_i) (kappa_{i-1} - alpha_i^2),
    one per intermediate level (positive = satisfied)."""
    margins = []
    for idx, delta in enumerate(chain.deltas):
        alpha = chain.alphas[idx]  # alpha_{i} with i = idx + 2
        lhs = chain.kappas[idx + 1] - alpha * (alpha - 1.0)
        rhs = math.cos(delta) ** 2 * (chain.kappas[idx] - alpha * alpha)
        margins.append(lhs - rhs)
    return margins
