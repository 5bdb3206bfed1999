"""Log-linear least squares on separation histograms.

The trimming protocol drops the first bins (head of the curve, where the
geometric-series approximations are worst) and the sparse tail where counts
fluctuate wildly; what remains is fit as ln(mu) = ln(a) - b*s.  Zero-count
bins never appear (the histograms store nonzero bins only), so the log is
always defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, InsufficientDataError
from .scanstats import Checkpoint, Histogram
from .theory import TheoryPrediction

DEFAULT_SKIP_HEAD = 15
DEFAULT_TAIL_KEPT_FRACTION = 0.6


@dataclass(frozen=True)
class FitResult:
    a_exp: float
    b_exp: float
    points_used: int
    r_squared: float
    skip_head: int
    tail_kept_fraction: float
    weighted: bool = False


def select_bins(
    hist: Histogram, skip_head: int, tail_kept_fraction: float
) -> list[tuple[int, int]]:
    """Bins the protocol keeps: drop keys < skip_head, then keep the first
    tail_kept_fraction of the remaining nonzero bins in key order."""
    if not 0 < tail_kept_fraction <= 1:
        raise ValueError("tail_kept_fraction must be in (0, 1]")
    remaining = [(s, c) for s, c in hist.sorted_items() if s >= skip_head]
    return remaining[: int(len(remaining) * tail_kept_fraction)]


def fit_exponential(
    hist: Histogram,
    skip_head: int = DEFAULT_SKIP_HEAD,
    tail_kept_fraction: float = DEFAULT_TAIL_KEPT_FRACTION,
    weighted: bool = False,
) -> FitResult:
    """Least-squares a_exp*exp(-b_exp*s) through the kept bins.

    Unweighted by default; weighted=True weights each bin by its count (the
    variance-stabilizing choice for Poisson counts in log space).
    """
    kept = select_bins(hist, skip_head, tail_kept_fraction)
    if len(kept) < 2:
        raise InsufficientDataError(
            f"{len(kept)} usable bins after trimming (need >= 2)"
        )
    s = np.array([k for k, _ in kept], dtype=np.float64)
    y = np.log(np.array([c for _, c in kept], dtype=np.float64))
    w = np.array([c for _, c in kept], dtype=np.float64) if weighted else np.ones_like(s)

    wsum = w.sum()
    s_bar = (w * s).sum() / wsum
    y_bar = (w * y).sum() / wsum
    var = (w * (s - s_bar) ** 2).sum()
    if var == 0.0:
        raise InsufficientDataError("kept bins share a single s value")
    slope = (w * (s - s_bar) * (y - y_bar)).sum() / var
    intercept = y_bar - slope * s_bar

    ss_res = (w * (y - intercept - slope * s) ** 2).sum()
    ss_tot = (w * (y - y_bar) ** 2).sum()
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    r_squared = min(1.0, max(0.0, r_squared))

    return FitResult(
        a_exp=math.exp(intercept),
        b_exp=-slope,
        points_used=len(kept),
        r_squared=r_squared,
        skip_head=skip_head,
        tail_kept_fraction=tail_kept_fraction,
        weighted=weighted,
    )


@dataclass(frozen=True)
class ResidualDiagnostics:
    """Per-bin residuals ln(mu) - (ln(a_exp) - b_exp*s) over the kept bins."""

    s_values: tuple[int, ...]
    residuals: tuple[float, ...]
    max_abs: float
    sign_runs: int


def residual_diagnostics(hist: Histogram, fit: FitResult) -> ResidualDiagnostics:
    """Residuals of the fit on the bins it used; sign_runs counts maximal
    runs of equal residual sign (low run counts flag systematic curvature)."""
    kept = select_bins(hist, fit.skip_head, fit.tail_kept_fraction)
    ln_a = math.log(fit.a_exp)
    s_values = []
    residuals = []
    for s, c in kept:
        s_values.append(s)
        residuals.append(math.log(c) - (ln_a - fit.b_exp * s))
    signs = [1 if r >= 0 else -1 for r in residuals]
    runs = 1 + sum(1 for i in range(1, len(signs)) if signs[i] != signs[i - 1]) if signs else 0
    return ResidualDiagnostics(
        s_values=tuple(s_values),
        residuals=tuple(residuals),
        max_abs=max((abs(r) for r in residuals), default=0.0),
        sign_runs=runs,
    )


def fit_report_obj(n: int, fit: FitResult) -> dict:
    """JSON-ready fit report for the checkpoint at N=n."""
    return {
        "n": n,
        "a_exp": fit.a_exp,
        "b_exp": fit.b_exp,
        "r_squared": fit.r_squared,
        "points_used": fit.points_used,
        "skip_head": fit.skip_head,
        "tail_kept_fraction": fit.tail_kept_fraction,
    }


@dataclass(frozen=True)
class ComparisonRow:
    """One row of the measured-vs-predicted ratio table."""

    n: int
    a_ratio_theor: float
    b_ratio_theor: float
    a_ratio_asympt: float
    b_ratio_asympt: float


def comparison_row(
    checkpoint: Checkpoint, fit: FitResult, pred: TheoryPrediction
) -> ComparisonRow:
    if checkpoint.n != pred.n:
        raise ConsistencyError(
            f"checkpoint N={checkpoint.n} but prediction N={pred.n}"
        )
    return ComparisonRow(
        n=checkpoint.n,
        a_ratio_theor=fit.a_exp / pred.a_theor,
        b_ratio_theor=fit.b_exp / pred.b_theor,
        a_ratio_asympt=fit.a_exp / pred.a_asympt,
        b_ratio_asympt=fit.b_exp / pred.b_asympt,
    )
