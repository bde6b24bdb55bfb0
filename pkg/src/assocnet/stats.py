"""Statistical primitives: paired Wilcoxon test, OLS fitting, Wald test.

Wilcoxon signed-rank: zero differences are dropped, absolute values are
ranked with average ranks for ties, and the statistic is W+ (sum of ranks of
positive differences). For n <= 25 without ties the two-sided p-value comes
from exact enumeration of the 2^n sign assignments; otherwise from the
normal approximation with tie-corrected variance and a 0.5 continuity
correction. The signed effect size is r = Z / sqrt(n) where Z is the
uncorrected standardized statistic, positive when positive differences
dominate.

OLS is solved by orthogonal decomposition (SVD), never the normal equations;
the coefficient covariance is sigma^2 (X'X)^(-1) computed from the same
decomposition. The Wald test of "all selected coefficients are equal" uses
chained contrasts C (rows beta_i - beta_{i+1}) and the quadratic form
(C beta)' (C Cov C')^(-1) (C beta) ~ chi^2 with m-1 degrees of freedom;
its effect size is Cohen's w = sqrt(chi^2 / n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla
from scipy import stats as sct

from .errors import ComputeError, ValidationError


@dataclass(frozen=True)
class TestResult:
    statistic: float
    z_value: float | None
    p_value: float
    effect_size: float
    n: int
    method: str


@dataclass(frozen=True)
class GlmFit:
    coefficients: np.ndarray
    covariance: np.ndarray
    residual_variance: float
    n: int
    predictor_labels: tuple[str, ...]


def average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks starting at 1, with tied values receiving their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def signed_rank_count_distribution(n: int) -> np.ndarray:
    """Number of subsets of {1..n} with each possible rank sum (object dtype).

    This is the exact null distribution of W+ (times 2^-n) for tie-free
    samples; counts are exact Python ints so no precision is lost even for
    n = 25.
    """
    max_sum = n * (n + 1) // 2
    counts = np.zeros(max_sum + 1, dtype=object)
    counts[0] = 1
    for rank in range(1, n + 1):
        counts[rank:] = counts[rank:] + counts[:-rank]
    return counts


def exact_two_sided_p(counts: np.ndarray, w_plus: int, n: int) -> float:
    """Two-sided exact p: doubled smaller tail of the W+ distribution."""
    c_le = int(sum(counts[: w_plus + 1]))
    c_ge = int(sum(counts[w_plus:]))
    return min(1.0, 2.0 * min(c_le, c_ge) / 2.0**n)


def wilcoxon_signed_rank(differences) -> TestResult:
    """Paired Wilcoxon signed-rank test with signed effect size r = Z/sqrt(n)."""
    d = np.asarray(differences, dtype=np.float64)
    if d.size == 0:
        raise ComputeError("wilcoxon: empty difference vector")
    d = d[d != 0.0]
    if d.size == 0:
        raise ComputeError("wilcoxon: degenerate sample (all differences zero)")
    n = int(d.size)
    magnitudes = np.abs(d)
    ranks = average_ranks(magnitudes)
    w_plus = float(ranks[d > 0].sum())
    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(magnitudes, return_counts=True)
    tie_term = float((tie_counts.astype(np.float64) ** 3 - tie_counts).sum()) / 48.0
    sigma = np.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term)
    z = (w_plus - mean) / sigma
    # |r| = 1 is attainable (all differences tied, one sign); keep rounding
    # artifacts from leaking outside the documented [-1, 1] interval
    effect = float(np.clip(z / np.sqrt(n), -1.0, 1.0))

    has_ties = tie_counts.size < n
    if n <= 25 and not has_ties:
        counts = signed_rank_count_distribution(n)
        p = exact_two_sided_p(counts, int(round(w_plus)), n)
        method = "wilcoxon-signed-rank/exact"
    else:
        shift = w_plus - mean
        corrected = np.sign(shift) * max(abs(shift) - 0.5, 0.0)
        p = float(2.0 * sct.norm.sf(abs(corrected) / sigma))
        method = "wilcoxon-signed-rank/normal-approx"
    return TestResult(
        statistic=w_plus,
        z_value=float(z),
        p_value=p,
        effect_size=float(effect),
        n=n,
        method=method,
    )


def ols_fit(response, predictors, labels=None) -> GlmFit:
    """Least-squares fit of response on predictors plus an intercept.

    `predictors` holds the non-constant columns; the intercept column is
    prepended here and appears first in the coefficient vector. Raises when
    the design is rank-deficient, naming the collinear columns.
    """
    y = np.asarray(response, dtype=np.float64)
    x0 = np.asarray(predictors, dtype=np.float64)
    if x0.ndim == 1:
        x0 = x0[:, None]
    n, k0 = x0.shape
    if y.shape != (n,):
        raise ValidationError(f"response length {y.shape} does not match {n} rows")
    if labels is None:
        labels = [f"x{j + 1}" for j in range(k0)]
    if len(labels) != k0:
        raise ValidationError("one label per predictor column required")
    labels = ("intercept", *labels)
    k = k0 + 1
    if n <= k0 + 1:
        raise ComputeError(f"ols: need more than {k0 + 1} observations, got {n}")

    x = np.column_stack([np.ones(n), x0])
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    tol = s[0] * max(n, k) * np.finfo(np.float64).eps if s.size else 0.0
    rank = int((s > tol).sum())
    if rank < k:
        raise ComputeError(
            f"ols: rank-deficient design; collinear columns: {_collinear_columns(x, labels, rank)}"
        )
    beta = vt.T @ ((u.T @ y) / s)
    residuals = y - x @ beta
    rss = float(residuals @ residuals)
    sigma2 = rss / (n - k)
    xtx_inv = (vt.T / (s * s)) @ vt
    return GlmFit(
        coefficients=beta,
        covariance=sigma2 * xtx_inv,
        residual_variance=sigma2,
        n=n,
        predictor_labels=labels,
    )


def _collinear_columns(x, labels, rank):
    _, _, pivots = sla.qr(x, mode="economic", pivoting=True)
    return ", ".join(sorted(labels[j] for j in pivots[rank:]))


def wald_equal_coefficients(fit: GlmFit, indices) -> TestResult:
    """Wald chi-square test that the selected coefficients are all equal."""
    indices = list(indices)
    if len(indices) < 2:
        raise ValidationError("wald: need at least two coefficient indices")
    if len(set(indices)) != len(indices):
        raise ValidationError("wald: duplicate coefficient indices")
    k = fit.coefficients.size
    if any(i == 0 for i in indices):
        raise ValidationError("wald: indices must exclude the intercept (index 0)")
    if any(not 0 < i < k for i in indices):
        raise ValidationError(f"wald: indices out of range for {k} coefficients")

    m = len(indices)
    contrast = np.zeros((m - 1, k))
    for row in range(m - 1):
        contrast[row, indices[row]] = 1.0
        contrast[row, indices[row + 1]] = -1.0
    cb = contrast @ fit.coefficients
    scale = max(1.0, float(np.max(np.abs(fit.coefficients[indices]))))
    if float(np.max(np.abs(cb))) <= 1e-9 * scale:
        # coefficients equal to numerical precision: the null holds exactly,
        # even when a perfect fit makes the contrast covariance singular
        return TestResult(
            statistic=0.0,
            z_value=None,
            p_value=1.0,
            effect_size=0.0,
            n=fit.n,
            method="wald-chi2/equal-coefficients",
        )
    v = contrast @ fit.covariance @ contrast.T
    try:
        solved = np.linalg.solve(v, cb)
    except np.linalg.LinAlgError:
        raise ComputeError("wald: degenerate contrast (singular contrast covariance)")
    if not np.isfinite(solved).all() or np.linalg.cond(v) > 1e12:
        raise ComputeError("wald: degenerate contrast (singular contrast covariance)")
    chi2 = float(max(cb @ solved, 0.0))
    df = m - 1
    return TestResult(
        statistic=chi2,
        z_value=None,
        p_value=float(sct.chi2.sf(chi2, df)),
        effect_size=float(np.sqrt(chi2 / fit.n)),
        n=fit.n,
        method="wald-chi2/equal-coefficients",
    )


def significance_stars(p: float) -> str:
    """Conventional cutoffs: * <0.05, ** <0.01, *** <0.001."""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""
