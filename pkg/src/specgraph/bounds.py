"""Closed-form concentration bounds, recovery thresholds, and regime labels.

Every evaluator takes its hidden absolute constant as an explicit parameter
C defaulting to 1, since the source inequalities only pin the shape.  All
logarithms are natural.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


def bai_yin_limit(d):
    """2 sqrt(d): the almost-sure norm limit scale for dense-enough graphs."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    return 2.0 * math.sqrt(d)


def bernstein_tail(sigma2, K, n, t):
    """Matrix Bernstein tail: min(1, 2n exp(-(t^2/2) / (sigma^2 + K t / 3)))."""
    if sigma2 < 0 or K <= 0 or t < 0:
        raise ValueError("need sigma2 >= 0, K > 0, t >= 0")
    if t == 0:
        return 1.0
    return min(1.0, 2.0 * n * math.exp(-(t * t / 2.0) / (sigma2 + K * t / 3.0)))


def bernstein_expectation(sigma, K, n, C=1.0):
    """C (sigma sqrt(log n) + K log n)."""
    if sigma < 0 or K < 0:
        raise ValueError("sigma and K must be nonnegative")
    if n < 2:
        raise ValueError("n must be at least 2")
    ln = math.log(n)
    return C * (sigma * math.sqrt(ln) + K * ln)


def bvh_bound(variances, sup_bounds, C=1.0):
    """max_i sqrt(sum_j sigma_ij^2) + C sqrt(log n) max_ij K_ij."""
    var = np.asarray(variances, dtype=np.float64)
    sup = np.asarray(sup_bounds, dtype=np.float64)
    if var.shape != sup.shape or var.ndim != 2 or var.shape[0] != var.shape[1]:
        raise ValueError("variances and sup_bounds must be equal-shape square arrays")
    if var.min(initial=0.0) < 0 or sup.min(initial=0.0) < 0:
        raise ValueError("entries must be nonnegative")
    n = var.shape[0]
    if n < 2:
        raise ValueError("n must be at least 2")
    row = math.sqrt(float(var.sum(axis=1).max()))
    return row + C * math.sqrt(math.log(n)) * float(sup.max())


def bvh_er(n, p, C=1.0):
    """bvh_bound specialized to constant-p ER: sqrt((n-1)p(1-p)) + C sqrt(log n)."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if n < 2:
        raise ValueError("n must be at least 2")
    return math.sqrt((n - 1) * p * (1 - p)) + C * math.sqrt(math.log(n)) * (1.0 if 0 < p < 1 else 0.0)


def seginer_stat(graph, expected=None):
    """max_i ||column i||_2 of A, or of A - E[A] when an expectation is given.

    The centered column norms are exact: ||col_i||^2 =
    sum_{j != i} P_ij^2 + sum_{j ~ i} (w_ij^2 - 2 w_ij P_ij).
    """
    w2 = graph.w ** 2
    if expected is None:
        col2 = (np.bincount(graph.i, weights=w2, minlength=graph.n)
                + np.bincount(graph.j, weights=w2, minlength=graph.n))
    else:
        pe = expected.entries(graph.i, graph.j)
        contrib = w2 - 2.0 * graph.w * pe
        col2 = expected.row_sq_sums()
        col2 = col2 + np.bincount(graph.i, weights=contrib, minlength=graph.n)
        col2 = col2 + np.bincount(graph.j, weights=contrib, minlength=graph.n)
    if len(col2) == 0:
        return 0.0
    return float(math.sqrt(max(float(col2.max()), 0.0)))


def benaych_bound(d, n, C=1.0):
    """2 sqrt(d) + C sqrt(log n / (1 + log(log n / d))).

    Stated for 4 <= d <= n^(2/13); outside that window the formula is still
    evaluated but a warning is issued.  Where the inner logarithm's argument
    makes 1 + log(log n / d) nonpositive the bound is undefined: warns and
    returns nan.
    """
    if d < 0 or n < 2:
        raise ValueError("need d >= 0 and n >= 2")
    if not 4 <= d <= n ** (2.0 / 13.0):
        warnings.warn(f"benaych bound stated for 4 <= d <= n^(2/13); got d={d}, n={n}")
    ln = math.log(n)
    if d <= 0 or ln / d <= 0 or 1.0 + math.log(ln / d) <= 0:
        warnings.warn("benaych bound undefined here (inner log nonpositive)")
        return math.nan
    return 2.0 * math.sqrt(d) + C * math.sqrt(ln / (1.0 + math.log(ln / d)))


def regularized_concentration_bound(r, d, C=1.0):
    """C r^(3/2) sqrt(d), holding with probability 1 - n^(-r) after capping."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if d < 0:
        raise ValueError("d must be nonnegative")
    return C * r ** 1.5 * math.sqrt(d)


def regularized_laplacian_bound(r, tau, d, C=1.0):
    """(C r^2 / sqrt(tau)) (1 + d/tau)^(5/2) for the Laplacian deviation."""
    if r < 1:
        raise ValueError("r must be at least 1")
    if tau <= 0:
        raise ValueError("tau must be positive")
    if d < 0:
        raise ValueError("d must be nonnegative")
    return (C * r * r / math.sqrt(tau)) * (1.0 + d / tau) ** 2.5


@dataclass(frozen=True)
class RecoveryThresholds:
    """Sharp-threshold predicates for the balanced planted partition."""

    snr: float
    weak_recovery: bool
    strong_consistency: bool
    partial_recovery: bool


def recovery_thresholds(a, b, n, C=1.0):
    """Threshold predicates at (a, b): detection, exact recovery, partial recovery.

    snr = (a-b)^2 / (a+b) (0 when a = b = 0); weak recovery iff snr > 2;
    strong consistency iff |sqrt(a/log n) - sqrt(b/log n)| > sqrt(2); partial
    recovery reported as snr > C with the caller's constant.
    """
    if a < 0 or b < 0:
        raise ValueError("a and b must be nonnegative")
    if n < 2:
        raise ValueError("n must be at least 2")
    snr = 0.0 if a + b == 0 else (a - b) ** 2 / (a + b)
    ln = math.log(n)
    strong = abs(math.sqrt(a / ln) - math.sqrt(b / ln)) > math.sqrt(2.0)
    return RecoveryThresholds(
        snr=snr,
        weak_recovery=snr > 2.0,
        strong_consistency=strong,
        partial_recovery=snr > C,
    )


REGIMES = ("sparse", "semi-sparse", "semi-dense", "dense")


def classify_regime(n, d):
    """Finite-n proxy for the asymptotic density classes.

    dense: d >= n/10; sparse: d <= 10; semi-sparse: d <= 3 log n; else
    semi-dense.  Checked in that order so each (n, d) gets exactly one label.
    """
    if n < 2 or d < 0:
        raise ValueError("need n >= 2 and d >= 0")
    if d >= n / 10.0:
        return "dense"
    if d <= 10.0:
        return "sparse"
    if d <= 3.0 * math.log(n):
        return "semi-sparse"
    return "semi-dense"


# Registry for CLI dispatch: maps the public bound name to (callable, the
# parameter names it draws from the CLI flag pool).
BOUND_REGISTRY = {
    "bai-yin": (lambda p: bai_yin_limit(p["d"]), ("d",)),
    "bernstein": (lambda p: bernstein_expectation(p["sigma"], p["bigk"], p["n"], p["c"]),
                  ("sigma", "bigk", "n", "c")),
    "bvh": (lambda p: bvh_er(p["n"], p["d"] / p["n"], p["c"]), ("n", "d", "c")),
    "benaych": (lambda p: benaych_bound(p["d"], p["n"], p["c"]), ("d", "n", "c")),
    "thm51": (lambda p: regularized_concentration_bound(p["r"], p["d"], p["c"]),
              ("r", "d", "c")),
    "thm54": (lambda p: regularized_laplacian_bound(p["r"], p["tau"], p["d"], p["c"]),
              ("r", "tau", "d", "c")),
}
