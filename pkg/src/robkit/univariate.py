"""Robust univariate location/scale estimators and adjusted boxplot fences."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from . import kernel

# Cutoff applied in reweighting steps: sqrt of the 0.975 chi-square(1) quantile.
_REWEIGHT_CUTOFF_PROB = 0.975


@dataclass(frozen=True)
class UnivariateFit:
    location: float
    scale: float
    method: str
    h: int | None = None
    consistency_applied: bool = False


@dataclass(frozen=True)
class BoxplotFences:
    q1: float
    q3: float
    iqr: float
    mc: float
    lower: float
    upper: float
    outlier_flags: np.ndarray


def _check(x, n_min: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    if np.isnan(x).any():
        raise ValueError("sample contains missing values")
    if x.size < n_min:
        raise ValueError(f"need at least {n_min} observations")
    return x


def fit_univariate_mcd(
    x, alpha: float = 0.75, reweight: bool = True, consistent: bool = True
) -> UnivariateFit:
    """Univariate MCD: mean/SD of the variance-minimizing h-subset.

    The optimal h-subset is always contiguous in sorted order, so the search
    scans all n-h+1 sorted windows.  The scale optionally gets the normal
    consistency factor, and one hard-rejection reweighting step can follow.
    """
    x = _check(x, 2)
    n = x.size
    h = int(np.floor(alpha * n))
    if h < 2:
        raise ValueError("h-subset smaller than 2")
    if h > n:
        raise ValueError("alpha must be at most 1")
    xs = np.sort(x)
    if xs[0] == xs[-1]:
        warnings.warn("degenerate sample: all points identical", stacklevel=2)
        return UnivariateFit(float(xs[0]), 0.0, "umcd", h=h, consistency_applied=False)

    # windowed mean/variance via cumulative sums
    cs = np.concatenate([[0.0], np.cumsum(xs)])
    cs2 = np.concatenate([[0.0], np.cumsum(xs * xs)])
    sums = cs[h:] - cs[:-h]
    sq = cs2[h:] - cs2[:-h]
    means = sums / h
    variances = np.maximum(sq - h * means**2, 0.0) / (h - 1)
    best = int(np.argmin(variances))
    loc = float(means[best])
    var = float(variances[best])
    if consistent:
        var *= kernel.mcd_consistency_factor(1, alpha)

    if reweight:
        scale = np.sqrt(var)
        if scale > 0:
            cut = np.sqrt(kernel.chi2_quantile(_REWEIGHT_CUTOFF_PROB, 1))
            w = np.abs(x - loc) / scale <= cut
            if w.sum() >= 2:
                loc = float(np.mean(x[w]))
                var = float(np.var(x[w], ddof=1))
                if consistent:
                    var *= kernel.mcd_consistency_factor(1, _REWEIGHT_CUTOFF_PROB)
    return UnivariateFit(loc, float(np.sqrt(var)), "umcd", h=h, consistency_applied=consistent)


def _onestep_w1(r: np.ndarray) -> np.ndarray:
    """Huber weight min(1, 1.5/|r|)."""
    ar = np.abs(r)
    return np.where(ar <= 1.5, 1.0, 1.5 / np.where(ar > 0, ar, 1.0))


_ONESTEP_DELTA = None


def _onestep_delta() -> float:
    """Normal-consistency constant E[W2(Z) Z^2], computed once by quadrature."""
    global _ONESTEP_DELTA
    if _ONESTEP_DELTA is None:
        integrand = lambda z: _onestep_w1(np.array(z)) ** 2 * z * z * stats.norm.pdf(z)
        _ONESTEP_DELTA, _ = integrate.quad(integrand, -12, 12, limit=200)
    return _ONESTEP_DELTA


def fit_one_step_m(x) -> UnivariateFit:
    """One-step M-estimator started at (median, consistent MAD).

    One reweighting pass with W1 the Huber weight min(1, 1.5/|r|) and
    W2 = W1^2; the constant delta = E[W2(Z) Z^2] enforces normal consistency.
    """
    x = _check(x, 2)
    n = x.size
    loc0 = float(np.median(x))
    scale0 = kernel.mad(x, consistent=True)
    if scale0 <= 0:
        raise ValueError("degenerate scale")
    r = (x - loc0) / scale0
    w1 = _onestep_w1(r)
    w2 = w1 * w1
    loc1 = float(np.sum(w1 * x) / np.sum(w1))
    scale1 = float(np.sqrt(scale0**2 / (n * _onestep_delta()) * np.sum(w2 * r * r)))
    return UnivariateFit(loc1, scale1, "onestep_m", consistency_applied=True)


def fit_qn(x) -> UnivariateFit:
    """Qn scale: 2.219 times the k-th smallest pairwise gap, k = C(h,2),
    h = floor(n/2) + 1.  Location reported as the median."""
    x = _check(x, 2)
    n = x.size
    h = n // 2 + 1
    k = h * (h - 1) // 2
    diffs = np.abs(x[:, None] - x[None, :])[np.triu_indices(n, 1)]
    gap = float(np.partition(diffs, k - 1)[k - 1])
    return UnivariateFit(float(np.median(x)), 2.219 * gap, "qn", consistency_applied=True)


def _tau_wc(u: np.ndarray, c: float) -> np.ndarray:
    z = (u / c) ** 2
    return np.where(z <= 1.0, (1.0 - z) ** 2, 0.0)


def fit_tau(x, c1: float = 4.5, c2: float = 3.0) -> UnivariateFit:
    """Tau estimator of location and scale.

    location = weighted mean with W_{c1} weights of the MAD-standardized data;
    scale^2 = MAD^2/n * sum rho_{c2}((x - location)/MAD), rho_c(u) = min(c^2, u^2).
    """
    x = _check(x, 2)
    n = x.size
    s0 = kernel.mad(x, consistent=True)
    if s0 <= 0:
        raise ValueError("degenerate scale")
    med = float(np.median(x))
    w = _tau_wc((x - med) / s0, c1)
    loc = float(np.sum(w * x) / np.sum(w))
    u = (x - loc) / s0
    rho = np.minimum(c2**2, u * u)
    scale = float(np.sqrt(s0**2 / n * np.sum(rho)))
    return UnivariateFit(loc, scale, "tau", consistency_applied=True)


def adjusted_boxplot_fences(x) -> BoxplotFences:
    """Medcouple-adjusted boxplot fences.

    MC >= 0: [Q1 - 1.5 e^{-4 MC} IQR, Q3 + 1.5 e^{3 MC} IQR];
    MC < 0 uses the mirrored exponents (-3, 4).  Quartiles follow the
    linear-interpolation (type 7) convention, which the fences inherit.
    """
    x = _check(x, 5)
    if np.min(x) == np.max(x):
        raise ValueError("degenerate sample")
    q1, q3 = np.quantile(x, [0.25, 0.75])
    iqr = q3 - q1
    mc = kernel.medcouple(x)
    if mc >= 0:
        lower = q1 - 1.5 * np.exp(-4.0 * mc) * iqr
        upper = q3 + 1.5 * np.exp(3.0 * mc) * iqr
    else:
        lower = q1 - 1.5 * np.exp(-3.0 * mc) * iqr
        upper = q3 + 1.5 * np.exp(4.0 * mc) * iqr
    flags = (x < lower) | (x > upper)
    return BoxplotFences(float(q1), float(q3), float(iqr), float(mc), float(lower), float(upper), flags)


_SCALE_ESTIMATORS = {
    "umcd": fit_univariate_mcd,
    "onestep_m": fit_one_step_m,
    "qn": fit_qn,
    "tau": fit_tau,
}


def fit_scale(x, method: str = "umcd") -> UnivariateFit:
    """Fit one of the named univariate estimators ("umcd", "onestep_m", "qn", "tau")."""
    try:
        est = _SCALE_ESTIMATORS[method]
    except KeyError:
        raise ValueError(f"unknown scale estimator {method!r}") from None
    return est(x)
