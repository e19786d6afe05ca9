"""Poincare half-plane geometry for the hyperbolic strip domains.

Points live in {(x, y) : y > 0} with metric (dx^2 + dy^2)/y^2.  The strip
coordinates (r, phi) measure phi from the positive y-axis: x = r sin(phi),
y = r cos(phi), so the strip {1 <= r <= exp(pi/sqrt(mu)), |phi| <= L} is a
thin annular band around the upper unit circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError, UnsupportedDimensionError

HALF_PI = math.pi / 2.0


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point of the upper half-plane model."""

    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0.0:
            raise DomainError(f"half-plane point needs y > 0, got y={self.y}")


@dataclass(frozen=True)
class StripDomain:
    """Parameters of the strip domain: dimension, separation constant mu,
    angular half-widths (deltas for the intermediate angles, L for the last).
    """

    n: int = 2
    mu: float = 100.0
    L: float = math.pi / 3.0
    deltas: tuple = field(default=())

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"dimension must be >= 2, got {self.n}")
        if not self.mu > 0.0:
            raise ConfigError(f"mu must be positive, got {self.mu}")
        if not 0.0 < self.L < HALF_PI:
            raise ConfigError(f"L must lie in (0, pi/2), got {self.L}")
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))
        if len(self.deltas) != self.n - 2:
            raise ConfigError(
                f"need {self.n - 2} delta half-widths for n={self.n}, got {len(self.deltas)}"
            )
        for d in self.deltas:
            if not 0.0 < d < HALF_PI:
                raise ConfigError(f"every delta must lie in (0, pi/2), got {d}")

    @property
    def r_max(self) -> float:
        """Outer radius exp(pi/sqrt(mu)); the inner radius is 1."""
        return math.exp(math.pi / math.sqrt(self.mu))


def polar_to_cartesian(r: float, phi: float) -> tuple[float, float]:
    """Strip coordinates to half-plane coordinates (phi from the y-axis)."""
    return r * math.sin(phi), r * math.cos(phi)


def cartesian_to_polar(x: float, y: float) -> tuple[float, float]:
    if y <= 0.0:
        raise DomainError("point must have y > 0")
    return math.hypot(x, y), math.atan2(x, y)


def hyperbolic_distance(p: HalfPlanePoint, q: HalfPlanePoint) -> float:
    """Geodesic distance between two half-plane points.

    arcosh argument is clamped to 1 from below: for nearly coincident points
    rounding can push it a few ulp under 1, which would produce NaN.
    """
    num = (p.x * p.x + p.y * p.y) + (q.x * q.x + q.y * q.y) - 2.0 * p.x * q.x
    arg = num / (2.0 * p.y * q.y)
    return math.acosh(max(arg, 1.0))


def corner_points(d: StripDomain) -> dict[str, HalfPlanePoint]:
    """The six labeled boundary points P, Q, R, S, T, U of a planar strip."""
    if d.n != 2:
        raise UnsupportedDimensionError("corner labels are defined for n = 2 only")
    s, c = math.sin(d.L), math.cos(d.L)
    rm = d.r_max
    return {
        "P": HalfPlanePoint(s, c),
        "Q": HalfPlanePoint(rm * s, rm * c),
        "R": HalfPlanePoint(-rm * s, rm * c),
        "S": HalfPlanePoint(-s, c),
        "T": HalfPlanePoint(0.0, 1.0),
        "U": HalfPlanePoint(0.0, rm),
    }


def diameter(d: StripDomain) -> float:
    """Diameter of the planar strip, realized between opposite outer corners."""
    if d.n != 2:
        raise UnsupportedDimensionError(
            "no closed-form diameter for n >= 3; higher-dimensional runs report raw gap"
        )
    e = d.r_max
    s2 = math.sin(d.L) ** 2
    c2 = math.cos(d.L) ** 2
    arg = (1.0 + e * e + 2.0 * e * s2) / (2.0 * e * c2)
    return math.acosh(max(arg, 1.0))


def diameter_bounds(d: StripDomain) -> tuple[float, float]:
    """Closed-form bracket [arcosh(1+2tan^2 L), arcosh(1+2tan^2 L) + pi/sqrt(mu)]."""
    base = math.acosh(1.0 + 2.0 * math.tan(d.L) ** 2)
    return base, base + math.pi / math.sqrt(d.mu)


def neck_check(d: StripDomain) -> tuple[float, float, bool]:
    """Distances across the neck: (dist(R,S), dist(T,U), dist_RS >= dist_TU/cos L).

    dist(T,U) is the geodesic length of the central axis segment, pi/sqrt(mu).
    """
    if d.n != 2:
        raise UnsupportedDimensionError("neck comparison is defined for n = 2 only")
    pts = corner_points(d)
    dist_rs = hyperbolic_distance(pts["R"], pts["S"])
    dist_tu = math.pi / math.sqrt(d.mu)
    ratio_ok = dist_rs >= dist_tu / math.cos(d.L)
    return dist_rs, dist_tu, ratio_ok
