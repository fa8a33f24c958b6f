"""Low-level robust building blocks shared by every estimator module.

Medians and MAD, the weighted median, the medcouple skewness kernel,
statistical distances, the spatial median, projection outlyingness, bounded
loss functions and a handful of distribution helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats

# Normal-consistency factor for the MAD quoted by the robustness literature.
MAD_CONSISTENCY = 1.4833


class ConvergenceError(RuntimeError):
    """Iteration failed to converge; ``last`` carries the final iterate."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


def _as_sample(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    if np.isnan(x).any():
        raise ValueError("sample contains missing values")
    return x


def median(x) -> float:
    """Sample median: order statistic for odd n, lower/upper-mid average for even n."""
    return float(np.median(_as_sample(x)))


def mad(x, consistent: bool = False) -> float:
    """Median absolute deviation, times 1.4833 when ``consistent`` is set."""
    x = _as_sample(x)
    m = float(np.median(np.abs(x - np.median(x))))
    return m * MAD_CONSISTENCY if consistent else m


def weighted_median(x, w) -> float:
    """Lower weighted median: smallest x(k) whose cumulative sorted weight
    reaches half the total weight."""
    x = _as_sample(x)
    w = np.asarray(w, dtype=float).ravel()
    if w.shape != x.shape:
        raise ValueError("length mismatch")
    if np.any(w <= 0):
        raise ValueError("nonpositive weight")
    order = np.argsort(x, kind="stable")
    cw = np.cumsum(w[order])
    k = int(np.searchsorted(cw, 0.5 * cw[-1]))
    return float(x[order][k])


def medcouple(x) -> float:
    """Robust skewness: the median of the kernel
    h(xi, xj) = ((xj - m) - (m - xi)) / (xj - xi) over pairs xi <= m <= xj, i != j.

    Pairs of points tied with the median m use the sign kernel
    sign(ti + tj - 1 - k), with ti < tj the 1-based positions inside the
    tie group of size k, so ties contribute a balanced -1/0/+1 pattern.
    """
    x = _as_sample(x)
    if x.size < 3:
        raise ValueError("need at least 3 observations")
    xs = np.sort(x)
    m = float(np.median(xs))
    if xs[0] == xs[-1]:
        raise ValueError("degenerate medcouple")
    zl = xs[xs < m] - m  # strictly below
    zu = xs[xs > m] - m  # strictly above
    k = int(np.sum(xs == m))

    parts = []
    if zl.size and zu.size:
        parts.append(((zu[:, None] + zl[None, :]) / (zu[:, None] - zl[None, :])).ravel())
    if k:
        # ties paired with strict sides give exactly +/-1
        parts.append(np.full(k * zu.size, 1.0))
        parts.append(np.full(k * zl.size, -1.0))
        if k >= 2:
            ti, tj = np.triu_indices(k, 1)
            parts.append(np.sign((ti + 1) + (tj + 1) - 1 - k).astype(float))
    return float(np.median(np.concatenate(parts)))


def mahalanobis_distances(X, mu, sigma) -> np.ndarray:
    """Statistical distances sqrt((x - mu)' sigma^-1 (x - mu)) via Cholesky."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    mu = np.asarray(mu, dtype=float).ravel()
    sigma = np.asarray(sigma, dtype=float)
    p = mu.size
    if X.shape[1] != p or sigma.shape != (p, p):
        raise ValueError("shape mismatch")
    sigma = 0.5 * (sigma + sigma.T)
    try:
        chol = linalg.cholesky(sigma, lower=True)
    except linalg.LinAlgError:
        raise ValueError("singular scatter") from None
    d = np.diag(chol)
    if np.min(d) ** 2 <= 1e-14 * np.max(np.diag(sigma)):
        raise ValueError("singular scatter")
    z = linalg.solve_triangular(chol, (X - mu).T, lower=True)
    return np.sqrt(np.sum(z * z, axis=0))


def l1median(X, tol: float = 1e-8, max_iter: int = 1000) -> np.ndarray:
    """Spatial median: minimizer of the summed Euclidean distances.

    Damped Weiszfeld iteration; if the iterate lands on a data point, that
    anchor is escaped by a machine-epsilon-scaled jitter.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.size == 0:
        raise ValueError("empty sample")
    n, p = X.shape
    if n == 1:
        return X[0].copy()
    scale = max(1.0, float(np.max(np.abs(X))))
    mu = np.median(X, axis=0)
    for _ in range(max_iter):
        diff = X - mu
        d = np.sqrt(np.sum(diff * diff, axis=1))
        anchored = d < 1e3 * np.finfo(float).eps * scale
        if anchored.any():
            mu = mu + 1e2 * np.finfo(float).eps * scale * (1.0 + np.arange(p))
            diff = X - mu
            d = np.sqrt(np.sum(diff * diff, axis=1))
        w = 1.0 / d
        mu_new = w @ X / np.sum(w)
        step = np.sqrt(np.sum((mu_new - mu) ** 2))
        mu = mu_new
        if step <= tol * (1.0 + np.sqrt(np.sum(mu * mu))):
            return mu
    raise ConvergenceError("spatial median did not converge", last=mu)


@dataclass(frozen=True)
class DirectionSampler:
    """Deterministic sampler of unit projection directions through data point pairs."""

    n_directions: int
    seed: int

    def sample(self, X: np.ndarray) -> np.ndarray:
        """Return up to n_directions unit row vectors X[i] - X[j], i != j."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        n, p = X.shape
        if p == 1:
            return np.ones((1, 1))
        rng = np.random.default_rng(self.seed)
        dirs = []
        attempts = 0
        while len(dirs) < self.n_directions and attempts < 10 * self.n_directions:
            m = self.n_directions - len(dirs)
            i = rng.integers(0, n, size=m)
            j = rng.integers(0, n, size=m)
            keep = i != j
            d = X[i[keep]] - X[j[keep]]
            norms = np.sqrt(np.sum(d * d, axis=1))
            ok = norms > 1e-12 * max(1.0, float(np.max(np.abs(X))))
            dirs.extend(d[ok] / norms[ok, None])
            attempts += m
        if not dirs:
            raise ValueError("directionally degenerate data")
        return np.asarray(dirs)


def default_direction_count(p: int) -> int:
    return min(250 * p, 2500)


def stahel_donoho(X, sampler: DirectionSampler | None = None, seed: int = 0) -> np.ndarray:
    """Projection outlyingness: max over sampled directions a of
    |a'x - med(a'X)| / MAD(a'X).

    Directions run through random pairs of distinct data points; directions
    whose projected MAD vanishes are skipped.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, p = X.shape
    if sampler is None:
        sampler = DirectionSampler(default_direction_count(p), seed)
    A = sampler.sample(X)
    proj = X @ A.T  # (n, m)
    med = np.median(proj, axis=0)
    madv = np.median(np.abs(proj - med), axis=0)
    ok = madv > 1e-12 * np.maximum(1.0, np.max(np.abs(proj), axis=0))
    if not ok.any():
        raise ValueError("directionally degenerate data")
    out = np.abs(proj[:, ok] - med[ok]) / madv[ok]
    return np.max(out, axis=1)


@dataclass(frozen=True)
class LossFunction:
    """Bounded loss with rho, psi and weight evaluations.

    kind "huber": rho(u) = u^2/2 capped linearly beyond b, psi = clipped identity.
    kind "tukey-bisquare": rho normalized so rho(u) = 1 for |u| >= c,
    psi(u) = u (1 - (u/c)^2)^2 inside.
    """

    kind: str
    tuning: float

    def __post_init__(self):
        if self.kind not in ("huber", "tukey-bisquare"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.tuning <= 0:
            raise ValueError("tuning must be positive")

    def rho(self, u):
        u = np.asarray(u, dtype=float)
        t = self.tuning
        if self.kind == "huber":
            au = np.abs(u)
            return np.where(au <= t, 0.5 * u * u, t * au - 0.5 * t * t)
        w = np.clip(1.0 - (u / t) ** 2, 0.0, None)
        return 1.0 - w**3

    def psi(self, u):
        u = np.asarray(u, dtype=float)
        t = self.tuning
        if self.kind == "huber":
            return np.clip(u, -t, t)
        inside = np.abs(u) <= t
        return np.where(inside, u * (1.0 - (u / t) ** 2) ** 2, 0.0)

    def weight(self, u):
        """psi(u)/u extended continuously with weight(0) = psi'(0)."""
        u = np.asarray(u, dtype=float)
        t = self.tuning
        if self.kind == "huber":
            au = np.abs(u)
            return np.where(au <= t, 1.0, t / np.where(au > 0, au, 1.0))
        inside = np.abs(u) <= t
        return np.where(inside, (1.0 - (u / t) ** 2) ** 2, 0.0)


def huber(b: float = 1.5) -> LossFunction:
    return LossFunction("huber", b)


def bisquare(c: float = 4.685) -> LossFunction:
    return LossFunction("tukey-bisquare", c)


def loss_eval(f: LossFunction, u, which: str):
    """Evaluate rho, psi or weight of a LossFunction at u."""
    if which not in ("rho", "psi", "weight"):
        raise ValueError(f"unknown evaluation {which!r}")
    return getattr(f, which)(u)


def chi2_quantile(prob: float, df: int) -> float:
    """Inverse chi-square CDF."""
    if not 0.0 < prob < 1.0:
        raise ValueError("prob outside (0,1)")
    if df < 1:
        raise ValueError("df must be a positive integer")
    return float(stats.chi2.ppf(prob, df))


def propagation_fraction(eps: float, p: int) -> float:
    """Expected fraction of rows touched by a fraction eps of random bad cells."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError("eps outside [0,1]")
    if p < 1:
        raise ValueError("p must be a positive integer")
    return 1.0 - (1.0 - eps) ** p


def normal_quantile(prob: float) -> float:
    """Standard normal quantile (helper for cutoff rules)."""
    return float(stats.norm.ppf(prob))


def mcd_consistency_factor(p: int, frac: float) -> float:
    """Multiplier making an h-subset (or truncated) scatter consistent at the
    normal model: frac / F_{chi2_{p+2}}(chi2_{p, frac} quantile)."""
    if frac >= 1.0:
        return 1.0
    q = stats.chi2.ppf(frac, p)
    return float(frac / stats.chi2.cdf(q, p + 2))
