"""Adaptive Dormand-Prince integration of the Pruefer system.

For -h'' + m h = lam * w(phi) * h the polar substitution h = rho sin(theta),
h' = rho cos(theta) gives the bounded phase/log-amplitude system

    theta'  = cos^2(theta) + (lam*w - m) sin^2(theta)
    lnrho'  = (1 - (lam*w - m)) sin(theta) cos(theta)

which is integrated here with an embedded 5(4) pair.  The phase is what the
eigenvalue bisection needs; the log-amplitude makes the exponentially
decaying/growing eigenfunctions representable at any separation constant.
Kernels are njit-compiled; keep them free of Python objects.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


@njit(cache=True)
def _rhs(t, th, lr, lam, m, unit_weight):
    if unit_weight:
        w = 1.0
    else:
        c = np.cos(t)
        w = 1.0 / (c * c)
    q = lam * w - m
    s = np.sin(th)
    c2 = np.cos(th)
    dth = c2 * c2 + q * s * s
    dlr = (1.0 - q) * s * c2
    return dth, dlr


@njit(cache=True)
def _advance(lam, m, unit_weight, t0, t1, th0, lr0, atol, rtol, max_step):
    """Integrate from t0 to t1 (t1 >= t0); returns (theta, lnrho) at t1."""
    t = t0
    th = th0
    lr = lr0
    if t1 <= t0:
        return th, lr
    h = max_step
    if h > t1 - t0:
        h = t1 - t0
    k1t, k1r = _rhs(t, th, lr, lam, m, unit_weight)
    n_reject = 0
    while t < t1:
        last = False
        if h >= t1 - t:
            h = t1 - t
            last = True
        if h <= 0.0 or (not last and h < 1e-15 * (t1 - t0)):
            raise ValueError("step size underflow in Pruefer integration")

        k2t, k2r = _rhs(t + 0.2 * h, th + h * _A21 * k1t, lr + h * _A21 * k1r, lam, m, unit_weight)
        k3t, k3r = _rhs(
            t + 0.3 * h,
            th + h * (_A31 * k1t + _A32 * k2t),
            lr + h * (_A31 * k1r + _A32 * k2r),
            lam,
            m,
            unit_weight,
        )
        k4t, k4r = _rhs(
            t + 0.8 * h,
            th + h * (_A41 * k1t + _A42 * k2t + _A43 * k3t),
            lr + h * (_A41 * k1r + _A42 * k2r + _A43 * k3r),
            lam,
            m,
            unit_weight,
        )
        k5t, k5r = _rhs(
            t + 8.0 / 9.0 * h,
            th + h * (_A51 * k1t + _A52 * k2t + _A53 * k3t + _A54 * k4t),
            lr + h * (_A51 * k1r + _A52 * k2r + _A53 * k3r + _A54 * k4r),
            lam,
            m,
            unit_weight,
        )
        k6t, k6r = _rhs(
            t + h,
            th + h * (_A61 * k1t + _A62 * k2t + _A63 * k3t + _A64 * k4t + _A65 * k5t),
            lr + h * (_A61 * k1r + _A62 * k2r + _A63 * k3r + _A64 * k4r + _A65 * k5r),
            lam,
            m,
            unit_weight,
        )
        th_new = th + h * (_B1 * k1t + _B3 * k3t + _B4 * k4t + _B5 * k5t + _B6 * k6t)
        lr_new = lr + h * (_B1 * k1r + _B3 * k3r + _B4 * k4r + _B5 * k5r + _B6 * k6r)
        k7t, k7r = _rhs(t + h, th_new, lr_new, lam, m, unit_weight)

        et = h * (_E1 * k1t + _E3 * k3t + _E4 * k4t + _E5 * k5t + _E6 * k6t + _E7 * k7t)
        er = h * (_E1 * k1r + _E3 * k3r + _E4 * k4r + _E5 * k5r + _E6 * k6r + _E7 * k7r)
        st = atol + rtol * max(abs(th), abs(th_new))
        sr = atol + rtol * max(abs(lr), abs(lr_new))
        err = max(abs(et) / st, abs(er) / sr)

        if err <= 1.0:
            t = t1 if last else t + h
            th = th_new
            lr = lr_new
            k1t, k1r = k7t, k7r  # FSAL
            n_reject = 0
        else:
            n_reject += 1
            if n_reject > 60:
                raise ValueError("repeated step rejection in Pruefer integration")
        if err < 1e-30:
            fac = 5.0
        else:
            fac = 0.9 * err ** (-0.2)
            if fac > 5.0:
                fac = 5.0
            elif fac < 0.2:
                fac = 0.2
        h *= fac
        if h > max_step:
            h = max_step
    return th, lr


@njit(cache=True)
def prufer_end(lam, m, unit_weight, th0, t_start, t_end, atol, rtol, max_step):
    """Phase and log-amplitude at t_end starting from (th0, 0) at t_start."""
    return _advance(lam, m, unit_weight, t_start, t_end, th0, 0.0, atol, rtol, max_step)


@njit(cache=True)
def prufer_nodes(lam, m, unit_weight, th0, nodes, atol, rtol, max_step):
    """Phase and log-amplitude recorded at every node (ascending, nodes[0] = start)."""
    n = nodes.shape[0]
    th_out = np.empty(n)
    lr_out = np.empty(n)
    th = th0
    lr = 0.0
    th_out[0] = th
    lr_out[0] = lr
    for i in range(1, n):
        th, lr = _advance(lam, m, unit_weight, nodes[i - 1], nodes[i], th, lr, atol, rtol, max_step)
        th_out[i] = th
        lr_out[i] = lr
    return th_out, lr_out
