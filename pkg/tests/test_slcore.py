import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gapless import slcore
from gapless.errors import ConfigError, DegenerateInputError, NotAnEigenvalueError
from gapless.slcore import (
    EigenSolution,
    Parity,
    WeightMode,
    WeightedSLProblem,
    bracket_lambda1,
    eigenfunction_residual,
    eigenfunction_samples,
    eigenvalue_bracket,
    eigenvalue_gap,
    matrix_eigenvalue_extrapolated,
    rayleigh_quotient,
    solution_rayleigh,
    solve_eigen_matrix,
    solve_eigen_shooting,
    solve_gap_pair,
)

L3 = math.pi / 3

# 40-digit mpmath finite-difference oracle (parity split, 4-level Richardson);
# see the high-precision helper at the bottom of this file
LAM1_M100 = 60.307159310851161561
LAM2_M100 = 60.316556873231350068
LAM1_M1000 = 399.01855002704969796
LN_GAP_M1000 = -32.80339757275599
LAM1_M316 = 151.22703270481386983

UNIT_STRING = WeightedSLProblem(a=1.0, m=0.0, weight_mode=WeightMode.UNIT)


def test_unit_string_eigenvalues():
    s1 = solve_eigen_shooting(UNIT_STRING, 1)
    s2 = solve_eigen_shooting(UNIT_STRING, 2)
    assert s1.lam == pytest.approx(math.pi**2 / 4, rel=1e-10)
    assert s2.lam == pytest.approx(math.pi**2, rel=1e-10)


def test_unit_string_matrix_oracle():
    s2 = solve_eigen_matrix(UNIT_STRING, 2, 4096)
    assert s2.lam == pytest.approx(math.pi**2, rel=1e-5)


def test_frozen_secant2_values():
    p = WeightedSLProblem(a=L3, m=100.0)
    s1 = solve_eigen_shooting(p, 1)
    s2 = solve_eigen_shooting(p, 2)
    assert s1.lam == pytest.approx(LAM1_M100, rel=1e-10)
    assert s2.lam == pytest.approx(LAM2_M100, rel=1e-10)
    # Lemma bracket: lambda1 in [cos^2 L (pi^2/4L^2 + m), m cos^2 eta) for
    # large m; at minimum it lies in [25.5625, 100)
    assert 25.5625 <= s1.lam < 100.0


def test_frozen_secant2_m1000():
    p = WeightedSLProblem(a=L3, m=1000.0)
    s1, s2, gap = solve_gap_pair(p)
    assert s1.lam == pytest.approx(LAM1_M1000, rel=1e-10)
    assert gap.log == pytest.approx(LN_GAP_M1000, abs=1e-7)
    # direct subtraction is pure bisection noise here; consistency only
    assert abs((s2.lam - s1.lam) - gap.to_float()) <= 1e-12 * s1.lam


def test_bracket_lambda1():
    p = WeightedSLProblem(a=L3, m=100.0)
    lo, hi = bracket_lambda1(p)
    assert lo == pytest.approx(25.5625, rel=1e-14)
    assert hi == pytest.approx(102.25, rel=1e-14)
    lam1 = solve_eigen_shooting(p, 1).lam
    assert lo <= lam1 <= hi
    # unit mode is explicit
    lo_u, hi_u = bracket_lambda1(UNIT_STRING)
    assert lo_u == hi_u == pytest.approx(math.pi**2 / 4, rel=1e-15)
    with pytest.raises(ConfigError):
        bracket_lambda1(WeightedSLProblem(a=L3, m=-5.0))


def test_problem_validation():
    with pytest.raises(ConfigError):
        WeightedSLProblem(a=math.pi / 2, m=1.0)
    with pytest.raises(ConfigError):
        WeightedSLProblem(a=0.0, m=1.0)
    p = WeightedSLProblem(a=L3, m=1.0)
    with pytest.raises(ConfigError):
        solve_eigen_shooting(p, 0)
    with pytest.raises(ConfigError):
        solve_eigen_shooting(p, 5)  # default max index 4
    with pytest.raises(ConfigError):
        solve_eigen_shooting(p, 1, rel_tol=1e-3)
    with pytest.raises(ConfigError):
        solve_eigen_shooting(p, 1, rel_tol=1e-15)


def _solution_invariants(sol: EigenSolution):
    p = sol.problem
    assert sol.values[0] == 0.0 and sol.values[-1] == 0.0
    # normalization within 1e-10 under the package quadrature
    w = slcore.composite_weights(len(sol.grid), sol.grid[1] - sol.grid[0])
    norm = float(np.sum(w * p.weight(sol.grid) * sol.values**2))
    if np.max(np.abs(sol.values)) > 0:
        assert norm == pytest.approx(1.0, abs=1e-10)
    assert sol.interior_zero_count() == sol.index - 1
    expected_parity = Parity.EVEN if sol.index % 2 == 1 else Parity.ODD
    assert sol.parity is expected_parity
    # sign convention: positive at the leftmost peak
    half = len(sol.grid) // 2
    peak = 1 + int(np.argmax(np.abs(sol.values[1 : half + 1])))
    assert sol.values[peak] > 0.0


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("m", [0.0, 100.0])
def test_solution_invariants_shooting(k, m):
    mode = WeightMode.UNIT if m == 0.0 else WeightMode.SECANT2
    p = WeightedSLProblem(a=1.0, m=m, weight_mode=mode)
    sol = solve_eigen_shooting(p, k)
    _solution_invariants(sol)
    assert eigenfunction_residual(sol) <= 1e-6
    if k == 1:
        assert np.all(sol.signs[1:-1] > 0)


def test_ordering_where_resolvable():
    p = WeightedSLProblem(a=L3, m=10.0)
    lams = [solve_eigen_shooting(p, k).lam for k in (1, 2, 3, 4)]
    assert lams[0] < lams[1] < lams[2] < lams[3]
    pm = WeightedSLProblem(a=L3, m=100.0)
    m_lams = [solve_eigen_matrix(pm, k, 2048).lam for k in (1, 2, 3)]
    assert m_lams[0] < m_lams[1] < m_lams[2]


def test_eigenfunction_samples_closed_form():
    # unit mode ground state is c cos(pi phi / 2)
    sol = eigenfunction_samples(UNIT_STRING, math.pi**2 / 4, 512)
    assert sol.index == 1
    c = 1.0  # normalization of cos(pi phi/2) on (-1, 1): int cos^2 = 1
    want = c * np.cos(math.pi * sol.grid / 2.0)
    assert np.max(np.abs(sol.values - want)) <= 1e-8
    assert solution_rayleigh(sol) == pytest.approx(math.pi**2 / 4, rel=1e-9)


def test_eigenfunction_samples_parity_detection():
    p = WeightedSLProblem(a=L3, m=100.0)
    lam2 = solve_eigen_shooting(p, 2).lam
    sol = eigenfunction_samples(p, lam2, 4096)
    assert sol.index == 2
    assert sol.parity is Parity.ODD
    center = len(sol.grid) // 2
    assert sol.values[center] == 0.0
    assert sol.interior_zero_count() == 1


def test_eigenfunction_samples_rejects_non_eigenvalue():
    p = WeightedSLProblem(a=L3, m=100.0)
    lam1 = solve_eigen_shooting(p, 1).lam
    with pytest.raises(NotAnEigenvalueError):
        eigenfunction_samples(p, lam1 * 1.01, 1024)


def test_secant2_first_eigenfunction_positive_even():
    p = WeightedSLProblem(a=L3, m=100.0)
    sol = solve_eigen_shooting(p, 1)
    assert np.all(sol.signs[1:-1] > 0)
    assert np.array_equal(sol.values, sol.values[::-1])


def test_rayleigh_quotient_properties():
    p = WeightedSLProblem(a=L3, m=100.0)
    sol = solve_eigen_shooting(p, 1)
    r = solution_rayleigh(sol)
    assert r == pytest.approx(sol.lam, rel=1e-8)
    # scaling invariance
    r_scaled = rayleigh_quotient(sol.grid, 7.3 * sol.values, p.m, p.weight_mode, derivs=7.3 * sol.derivs)
    assert r_scaled == pytest.approx(r, rel=1e-13)
    # exact minimizer of the unit problem via central differences
    grid = np.linspace(-1.0, 1.0, 4097)
    vals = np.cos(math.pi * grid / 2.0)
    vals[0] = vals[-1] = 0.0
    r_cos = rayleigh_quotient(grid, vals, 0.0, WeightMode.UNIT)
    assert r_cos == pytest.approx(math.pi**2 / 4, rel=1e-5)
    with pytest.raises(DegenerateInputError):
        rayleigh_quotient(grid, np.zeros_like(grid), 0.0, WeightMode.UNIT)
    with pytest.raises(ConfigError):
        rayleigh_quotient(grid, np.ones_like(grid), 0.0, WeightMode.UNIT)


def test_rayleigh_minimization_over_random_trials():
    p = WeightedSLProblem(a=L3, m=50.0)
    lam1 = solve_eigen_shooting(p, 1).lam
    rng = np.random.default_rng(42)
    grid = np.linspace(-p.a, p.a, 2049)
    worst = math.inf
    for _ in range(100):
        coeff = rng.normal(size=8)
        vals = np.zeros_like(grid)
        derivs = np.zeros_like(grid)
        for j, c in enumerate(coeff, start=1):
            k = j * math.pi / (2 * p.a)
            vals += c * np.sin(k * (grid + p.a))
            derivs += c * k * np.cos(k * (grid + p.a))
        vals[0] = vals[-1] = 0.0
        r = rayleigh_quotient(grid, vals, p.m, p.weight_mode, derivs=derivs)
        worst = min(worst, r - lam1)
    assert worst >= -1e-6


def test_cor43_ratio_trend():
    cos2 = math.cos(L3) ** 2
    ratios = []
    for m in (1e2, 1e3, 1e4, 1e5, 1e6):
        p = WeightedSLProblem(a=L3, m=m)
        ratios.append(solve_eigen_shooting(p, 1).lam / m)
    assert all(r > cos2 for r in ratios)
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_matrix_solver_agrees_and_warns():
    p = WeightedSLProblem(a=L3, m=100.0)
    sol = solve_eigen_matrix(p, 1, 8192, richardson=True)
    assert sol.lam == pytest.approx(LAM1_M100, rel=1e-9)
    assert sol.warnings == ()
    _solution_invariants(sol)
    # deliberately unresolvable: large m on a tiny grid
    coarse = solve_eigen_matrix(WeightedSLProblem(a=1.2, m=1e5), 1, 64)
    assert any("resolve" in w for w in coarse.warnings)
    with pytest.raises(ConfigError):
        solve_eigen_matrix(p, 1, 32)


def test_matrix_parity_detection():
    p = WeightedSLProblem(a=L3, m=100.0)
    assert solve_eigen_matrix(p, 1, 2048).parity is Parity.EVEN
    assert solve_eigen_matrix(p, 2, 2048).parity is Parity.ODD


def test_gap_pair_cross_integral_consistency():
    # where the pair is resolvable in double precision the cross-integral and
    # the bisected difference must agree
    p = WeightedSLProblem(a=L3, m=100.0)
    s1, s2, gap = solve_gap_pair(p)
    direct = s2.lam - s1.lam
    assert gap.to_float() == pytest.approx(direct, rel=1e-7)
    assert gap.to_float() > 0.0
    with pytest.raises(ConfigError):
        eigenvalue_gap(p, s2, s1)


def test_precision_cap_warning():
    p = WeightedSLProblem(a=L3, m=2e6)
    sol = solve_eigen_shooting(p, 1, config=slcore.with_config(grid_base=4096))
    assert any("precision budget" in w for w in sol.warnings)


@settings(max_examples=20, deadline=None)
@given(
    st.floats(min_value=0.3, max_value=1.4),
    st.floats(min_value=1.0, max_value=300.0),
)
def test_bracket_containment_property(a, m):
    p = WeightedSLProblem(a=a, m=m)
    for k in (1, 2):
        lo, hi = eigenvalue_bracket(p, k)
        lam = solve_eigen_shooting(p, k).lam
        assert lo - 1e-9 <= lam <= hi + 1e-9


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.3, max_value=1.4), st.floats(min_value=1.0, max_value=60.0))
def test_pair_order_property(a, m):
    p = WeightedSLProblem(a=a, m=m)
    s1, s2, gap = solve_gap_pair(p)
    assert gap.to_float() > 0.0
    assert s2.lam > s1.lam  # resolvable at these shift constants


# ---------------------------------------------------------------------------
# independent high-precision oracle for the deep-tunneling regime


def _mpmath_fd_eigenvalue(L, m, n_seg, parity, dps=30):
    from mpmath import mp, mpf
    from mpmath import cos as mcos

    mp.dps = dps
    h = mpf(L) / n_seg
    w = [1 / mcos(j * h) ** 2 for j in range(n_seg + 1)]
    mu = mpf(m)
    if parity == "even":
        dd = [(mpf(1) / h**2 + mu / 2) / (w[0] / 2)]
        ee2 = [(mpf(1) / h**4) / ((w[0] / 2) * w[1])]
        for j in range(1, n_seg):
            dd.append((2 / h**2 + mu) / w[j])
            if j < n_seg - 1:
                ee2.append((mpf(1) / h**4) / (w[j] * w[j + 1]))
    else:
        dd = [(2 / h**2 + mu) / w[j] for j in range(1, n_seg)]
        ee2 = [(mpf(1) / h**4) / (w[j] * w[j + 1]) for j in range(1, n_seg - 1)]

    def count_below(x):
        cnt = 0
        q = dd[0] - x
        if q < 0:
            cnt += 1
        for i in range(1, len(dd)):
            q = dd[i] - x - (ee2[i - 1] / q if q != 0 else ee2[i - 1] / mpf("1e-50"))
            if q < 0:
                cnt += 1
        return cnt

    lo, hi = mpf(0), mu + 100
    for _ in range(120):
        mid = (lo + hi) / 2
        if count_below(mid) >= 1:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


@pytest.mark.slow
def test_deep_gap_against_mpmath_oracle():
    """The log-space cross-integral gap at mu=1000, where the direct float64
    subtraction is pure noise, against an arbitrary-precision FD pencil."""
    from mpmath import mp, mpf

    sizes = (512, 1024, 2048)
    gaps = []
    for n_seg in sizes:
        l1 = _mpmath_fd_eigenvalue(L3, 1000, n_seg, "even")
        l2 = _mpmath_fd_eigenvalue(L3, 1000, n_seg, "odd")
        gaps.append(l2 - l1)
    # two Richardson passes (h^2 then h^4)
    g1 = (4 * gaps[1] - gaps[0]) / 3
    g2 = (4 * gaps[2] - gaps[1]) / 3
    g_ext = (16 * g2 - g1) / 15
    ln_oracle = float(mp.log(g_ext))

    p = WeightedSLProblem(a=L3, m=1000.0)
    _, _, gap = solve_gap_pair(p)
    assert gap.log == pytest.approx(ln_oracle, abs=1e-5)
    assert gap.log == pytest.approx(LN_GAP_M1000, abs=1e-5)
