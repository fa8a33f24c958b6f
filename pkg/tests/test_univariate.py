import itertools
import math

import numpy as np
import pytest
from scipy import integrate, stats

from robkit import kernel, univariate


# ---------------------------------------------------------------- oracles

def umcd_exhaustive(x, h, consistent=False):
    """Minimum-variance h-subset by full C(n,h) enumeration."""
    x = np.asarray(x, dtype=float)
    best = None
    for idx in itertools.combinations(range(len(x)), h):
        sub = x[list(idx)]
        v = np.var(sub, ddof=1)
        if best is None or v < best[0]:
            best = (v, float(np.mean(sub)))
    var, loc = best
    if consistent:
        var *= kernel.mcd_consistency_factor(1, h / len(x))
    return loc, math.sqrt(var)


def qn_naive(x):
    x = np.asarray(x, dtype=float)
    n = len(x)
    gaps = sorted(abs(x[i] - x[j]) for i in range(n) for j in range(i + 1, n))
    h = n // 2 + 1
    k = h * (h - 1) // 2
    return 2.219 * gaps[k - 1]


# ---------------------------------------------------------------- univariate MCD

def test_umcd_documented_example():
    fit = univariate.fit_univariate_mcd([0, 1, 2, 3, 100], alpha=0.8, reweight=False, consistent=False)
    assert fit.location == pytest.approx(1.5)
    assert fit.scale == pytest.approx(math.sqrt(5.0 / 3.0))
    assert fit.h == 4


def test_umcd_equals_exhaustive_enumeration():
    rng = np.random.default_rng(0)
    for n in range(4, 13):
        x = rng.normal(size=n)
        for h in range(2, n + 1):
            fit = univariate.fit_univariate_mcd(x, alpha=h / n, reweight=False, consistent=False)
            loc, scale = umcd_exhaustive(x, h)
            assert fit.location == pytest.approx(loc, abs=1e-12)
            assert fit.scale == pytest.approx(scale, abs=1e-12)


def test_umcd_shift_equivariance():
    rng = np.random.default_rng(1)
    x = rng.normal(size=30)
    base = univariate.fit_univariate_mcd(x)
    shifted = univariate.fit_univariate_mcd(x + 7.5)
    assert shifted.location == pytest.approx(base.location + 7.5, abs=1e-10)
    assert shifted.scale == pytest.approx(base.scale, abs=1e-10)


def test_umcd_full_subset_is_classical():
    rng = np.random.default_rng(2)
    x = rng.normal(size=25)
    fit = univariate.fit_univariate_mcd(x, alpha=1.0, reweight=False, consistent=False)
    assert fit.location == pytest.approx(np.mean(x))
    assert fit.scale == pytest.approx(np.std(x, ddof=1))


def test_umcd_degenerate():
    with pytest.warns(UserWarning, match="degenerate"):
        fit = univariate.fit_univariate_mcd([3.0] * 8)
    assert fit.scale == 0.0


def test_umcd_h_too_small():
    with pytest.raises(ValueError, match="h-subset"):
        univariate.fit_univariate_mcd([1.0, 2.0], alpha=0.5)


# ---------------------------------------------------------------- one-step M

def test_one_step_m_symmetric():
    fit = univariate.fit_one_step_m([-1.0, 0.0, 1.0])
    assert fit.location == pytest.approx(0.0, abs=1e-12)


def test_one_step_m_scale_equivariance():
    rng = np.random.default_rng(3)
    x = rng.normal(size=21)
    base = univariate.fit_one_step_m(x)
    scaled = univariate.fit_one_step_m(3.0 * x)
    assert scaled.scale == pytest.approx(3.0 * base.scale, rel=1e-10)
    assert scaled.location == pytest.approx(3.0 * base.location, abs=1e-10)


def test_one_step_m_direct_formula():
    x = np.array([-2.0, -0.5, 0.0, 0.25, 0.5, 1.5, 9.0])
    n = len(x)
    loc0 = np.median(x)
    scale0 = 1.4833 * np.median(np.abs(x - loc0))
    r = (x - loc0) / scale0
    w1 = np.minimum(1.0, 1.5 / np.abs(np.where(r == 0, np.inf, r)))
    w1 = np.where(r == 0, 1.0, w1)
    w2 = w1**2
    delta = integrate.quad(
        lambda z: min(1.0, 1.5 / abs(z)) ** 2 * z * z * stats.norm.pdf(z) if z != 0 else 0.0,
        -12,
        12,
        limit=200,
    )[0]
    loc_expected = np.sum(w1 * x) / np.sum(w1)
    scale_expected = math.sqrt(scale0**2 / (n * delta) * np.sum(w2 * r * r))
    fit = univariate.fit_one_step_m(x)
    assert fit.location == pytest.approx(loc_expected, rel=1e-10)
    assert fit.scale == pytest.approx(scale_expected, rel=1e-8)


def test_one_step_m_zero_mad():
    with pytest.raises(ValueError, match="degenerate scale"):
        univariate.fit_one_step_m([1.0, 1.0, 1.0, 9.0])


def test_one_step_delta_closed_form():
    # E[W2(Z) Z^2] = F_chi2_3(1.5^2) + 1.5^2 P(|Z| > 1.5)
    expected = stats.chi2.cdf(2.25, 3) + 2.25 * 2 * stats.norm.sf(1.5)
    assert univariate._onestep_delta() == pytest.approx(expected, rel=1e-9)


# ---------------------------------------------------------------- Qn

def test_qn_documented_examples():
    assert univariate.fit_qn([1, 2, 3]).scale == pytest.approx(2.219)
    assert univariate.fit_qn([1, 2, 4, 8]).scale == pytest.approx(2.219 * 3)
    assert univariate.fit_qn([5.0] * 6).scale == 0.0


def test_qn_matches_naive():
    rng = np.random.default_rng(4)
    for n in (2, 3, 5, 17, 50, 117, 200):
        x = rng.normal(size=n)
        assert univariate.fit_qn(x).scale == pytest.approx(qn_naive(x), rel=1e-12)


def test_qn_errors():
    with pytest.raises(ValueError):
        univariate.fit_qn([1.0])


# ---------------------------------------------------------------- tau

def test_tau_symmetric_location():
    fit = univariate.fit_tau([-1.0, 0.0, 1.0])
    assert fit.location == pytest.approx(0.0, abs=1e-12)


def test_tau_documented_scale():
    fit = univariate.fit_tau([-1.0, 0.0, 1.0])
    assert fit.scale == pytest.approx(math.sqrt(2.0 / 3.0), rel=1e-12)


def test_tau_equivariance():
    rng = np.random.default_rng(5)
    x = rng.normal(size=33)
    base = univariate.fit_tau(x)
    moved = univariate.fit_tau(2.0 * x - 4.0)
    assert moved.location == pytest.approx(2.0 * base.location - 4.0, abs=1e-10)
    assert moved.scale == pytest.approx(2.0 * base.scale, rel=1e-10)


# ---------------------------------------------------------------- equivariance sweep

@pytest.mark.parametrize("fitter", [
    univariate.fit_univariate_mcd,
    univariate.fit_one_step_m,
    univariate.fit_qn,
    univariate.fit_tau,
])
def test_location_scale_equivariance(fitter):
    rng = np.random.default_rng(6)
    x = rng.standard_t(df=4, size=45)
    base = fitter(x)
    for _ in range(10):
        a = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
        b = rng.uniform(-5.0, 5.0)
        fit = fitter(a * x + b)
        assert fit.location == pytest.approx(a * base.location + b, abs=1e-10 * max(1, abs(a)))
        assert fit.scale == pytest.approx(abs(a) * base.scale, rel=1e-10)


# ---------------------------------------------------------------- consistency smoke

def test_scale_estimators_consistent_at_normal():
    rng = np.random.default_rng(7)
    sums = {"umcd": 0.0, "qn": 0.0, "tau": 0.0}
    reps = 60
    for _ in range(reps):
        x = rng.normal(size=1000)
        sums["umcd"] += univariate.fit_univariate_mcd(x).scale
        sums["qn"] += univariate.fit_qn(x).scale
        sums["tau"] += univariate.fit_tau(x).scale
    for name, total in sums.items():
        assert abs(total / reps - 1.0) < 0.03, name


# ---------------------------------------------------------------- adjusted boxplot

def test_fences_symmetric_matches_classical():
    # symmetric sample with Q1=1, Q3=3 and MC=0
    x = np.array([0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0])
    f = univariate.adjusted_boxplot_fences(x)
    assert f.mc == 0.0
    assert f.lower == pytest.approx(f.q1 - 1.5 * f.iqr)
    assert f.upper == pytest.approx(f.q3 + 1.5 * f.iqr)


def test_fences_formula_positive_mc():
    # direct fence evaluation for Q1=1, Q3=3, MC=0.2
    lower = 1 - 3 * math.exp(-0.8)
    upper = 3 + 3 * math.exp(0.6)
    assert lower == pytest.approx(-0.3480, abs=5e-5)
    assert upper == pytest.approx(8.4664, abs=5e-5)
    rng = np.random.default_rng(8)
    x = rng.exponential(size=300)
    f = univariate.adjusted_boxplot_fences(x)
    assert f.mc > 0
    assert f.lower == pytest.approx(f.q1 - 1.5 * math.exp(-4 * f.mc) * f.iqr)
    assert f.upper == pytest.approx(f.q3 + 1.5 * math.exp(3 * f.mc) * f.iqr)


def test_fences_negation_swaps():
    rng = np.random.default_rng(9)
    x = rng.exponential(size=101)
    f = univariate.adjusted_boxplot_fences(x)
    g = univariate.adjusted_boxplot_fences(-x)
    assert g.mc == pytest.approx(-f.mc, abs=1e-12)
    assert g.lower == pytest.approx(-f.upper, rel=1e-10)
    assert g.upper == pytest.approx(-f.lower, rel=1e-10)
    np.testing.assert_array_equal(f.outlier_flags, g.outlier_flags)


def test_fences_constant_sample():
    with pytest.raises(ValueError, match="degenerate"):
        univariate.adjusted_boxplot_fences([2.0] * 9)


def test_fit_scale_selector():
    x = np.random.default_rng(10).normal(size=40)
    assert univariate.fit_scale(x, "qn").method == "qn"
    with pytest.raises(ValueError, match="unknown scale estimator"):
        univariate.fit_scale(x, "nope")
