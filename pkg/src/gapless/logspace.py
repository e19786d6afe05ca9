"""Signed log-scale scalars and log-space quadrature.

Several quantities in the large-separation regime (the fundamental gap, the
eigenfunction value at the origin, the inner-interval integrals) collapse
like exp(-c*sqrt(mu)) and leave the double-precision range long before the
sweep cap.  They are carried as (sign, log|value|) pairs so comparisons and
reports stay exact even when ``float(value)`` underflows to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class LogValue:
    """A real number stored as sign and natural log of its magnitude.

    ``sign`` is -1, 0 or +1; for sign 0 the log is -inf by convention.
    """

    sign: int
    log: float

    @staticmethod
    def zero() -> "LogValue":
        return LogValue(0, float("-inf"))

    @staticmethod
    def from_float(x: float) -> "LogValue":
        if x == 0.0:
            return LogValue.zero()
        return LogValue(1 if x > 0 else -1, math.log(abs(x)))

    @staticmethod
    def exp(log: float, sign: int = 1) -> "LogValue":
        if sign == 0 or log == float("-inf"):
            return LogValue.zero()
        return LogValue(sign, log)

    def to_float(self) -> float:
        """Best-effort float64 value; may underflow to 0 or overflow to inf."""
        if self.sign == 0:
            return 0.0
        if self.log > 709.0:
            return math.inf * self.sign
        if self.log < -745.0:
            return 0.0 * self.sign
        return self.sign * math.exp(self.log)

    def __mul__(self, other: "LogValue | float") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.from_float(float(other))
        s = self.sign * other.sign
        if s == 0:
            return LogValue.zero()
        return LogValue(s, self.log + other.log)

    def __truediv__(self, other: "LogValue | float") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.from_float(float(other))
        if other.sign == 0:
            raise ZeroDivisionError("LogValue division by zero")
        if self.sign == 0:
            return LogValue.zero()
        return LogValue(self.sign * other.sign, self.log - other.log)

    def __add__(self, other: "LogValue | float") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.from_float(float(other))
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        hi, lo = (self, other) if self.log >= other.log else (other, self)
        d = lo.log - hi.log  # <= 0
        if self.sign == other.sign:
            return LogValue(self.sign, hi.log + math.log1p(math.exp(d)))
        r = math.exp(d)
        if r == 1.0:
            return LogValue.zero()
        return LogValue(hi.sign, hi.log + math.log1p(-r))

    def __sub__(self, other: "LogValue | float") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.from_float(float(other))
        return self + LogValue(-other.sign, other.log)

    def __neg__(self) -> "LogValue":
        return LogValue(-self.sign, self.log)

    def __abs__(self) -> "LogValue":
        return LogValue(abs(self.sign), self.log)

    def _key(self) -> float:
        if self.sign == 0:
            return 0.0
        # monotone embedding into the reals for comparisons
        return self.sign * (self.log + 1e6 if self.log > -1e6 else 0.0)

    def __lt__(self, other: "LogValue | float") -> bool:
        if not isinstance(other, LogValue):
            other = LogValue.from_float(float(other))
        if self.sign != other.sign:
            return self.sign < other.sign
        if self.sign == 0:
            return False
        if self.sign > 0:
            return self.log < other.log
        return self.log > other.log

    def __le__(self, other: "LogValue | float") -> bool:
        return self < other or self == other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (LogValue, float, int)):
            return NotImplemented
        if not isinstance(other, LogValue):
            other = LogValue.from_float(float(other))
        return self.sign == other.sign and (self.sign == 0 or self.log == other.log)

    def log10(self) -> float:
        return self.log / _LN10

    def decimal(self, sig: int = 17) -> str:
        """Decimal string with ``sig`` significant digits, valid beyond float range."""
        if self.sign == 0:
            return "0"
        e10 = self.log / _LN10
        expo = math.floor(e10)
        mant = 10.0 ** (e10 - expo)
        # rounding may push the mantissa to 10.0
        if mant >= 10.0 - 0.5 * 10.0 ** (1 - sig):
            mant /= 10.0
            expo += 1
        body = f"{mant:.{sig - 1}f}"
        s = "-" if self.sign < 0 else ""
        return f"{s}{body}e{expo:+03d}"


def format_number(x: "float | LogValue") -> str:
    """Round-trip text for a report cell: 17 significant digits.

    LogValues inside the double range are printed through their float64
    image so columns stay consistent; values beyond it keep full log-scale
    information in the text even though ``float()`` of the field is 0.
    """
    if isinstance(x, LogValue):
        f = x.to_float()
        if f == 0.0 and x.sign != 0 or math.isinf(f):
            return x.decimal(17)
        x = f
    return f"{float(x):.17g}"


def composite_weights(n_nodes: int, dx: float) -> np.ndarray:
    """Composite quadrature weights on a uniform grid of ``n_nodes`` points.

    Simpson when the segment count is even; Simpson plus a trailing 3/8 rule
    when it is odd (so matrix-solver grids with an odd segment count still
    integrate at fourth order).
    """
    if n_nodes < 2:
        raise ValueError("need at least two nodes")
    n_seg = n_nodes - 1
    w = np.zeros(n_nodes)
    if n_seg == 1:
        w[:] = 0.5
    elif n_seg % 2 == 0:
        w[0] = w[-1] = 1.0
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w /= 3.0
    elif n_seg == 3:
        w[:] = [3.0 / 8, 9.0 / 8, 9.0 / 8, 3.0 / 8]
    else:
        w[: n_seg - 2] = composite_weights(n_seg - 2, 1.0)
        w[n_seg - 3 :] += np.array([3.0 / 8, 9.0 / 8, 9.0 / 8, 3.0 / 8])
    return w * dx


def logsumexp_signed(logs: np.ndarray, signs: np.ndarray) -> LogValue:
    """Sum of ``sign_i * exp(log_i)`` as a LogValue."""
    logs = np.asarray(logs, dtype=float)
    signs = np.asarray(signs)
    mask = (signs != 0) & np.isfinite(logs)
    if not mask.any():
        return LogValue.zero()
    logs = logs[mask]
    signs = signs[mask]
    m = logs.max()
    acc = float(np.sum(signs * np.exp(logs - m)))
    if acc == 0.0:
        return LogValue.zero()
    return LogValue(1 if acc > 0 else -1, m + math.log(abs(acc)))


def log_quadrature(log_f: np.ndarray, signs: np.ndarray, weights: np.ndarray) -> LogValue:
    """Quadrature sum(w_i * f_i) where f_i = sign_i*exp(log_f_i), w_i > 0."""
    with np.errstate(divide="ignore"):
        lw = np.log(weights)
    return logsumexp_signed(log_f + lw, signs)
