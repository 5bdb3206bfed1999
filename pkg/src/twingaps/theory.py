"""Analytic side of the experiment: the twin-prime constant, logarithmic
integrals, and the closed-form intercept/slope and maximal-separation
predictions that the scanned histograms are tested against.

All functions are pure; double precision with reported error bounds is the
working regime (desk-scale N stays far below where that breaks down).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DegenerateRegimeError
from .sieve import base_primes

# Reference value, printed to the precision usually quoted in the literature.
C2_LITERATURE = 1.32032

DEFAULT_C2_CUTOFF = 10**6

# The intercept's asymptotic guess circulates in two variants differing by a
# factor of N; ratios against measured intercepts single out c2^2*N/ln^3(N)
# (the one consistent with pi2^2/(pi - 2*pi2) under the standard asymptotics),
# so that is what comparison tables use.  The N^2 variant is kept alongside.
ASYMPT_INTERCEPT_NOTE = (
    "a_asympt uses c2^2*N/ln^3(N); the dimensionally inconsistent N^2 variant "
    "is reported separately as a_asympt_printed"
)


@dataclass(frozen=True)
class C2Estimate:
    """Truncated Euler product for the twin-prime constant plus a tail bound."""

    value: float
    bound: float
    cutoff: int


def twin_prime_constant(prime_cutoff: int) -> C2Estimate:
    """c2 = 2 * prod_{2<p<=cutoff} (1 - 1/(p-1)^2), with truncation bound.

    The omitted tail satisfies sum_{p>x} 1/(p-1)^2 < 1/(x-1), so the partial
    product overshoots the limit by at most value/(cutoff-1).
    """
    if prime_cutoff < 3:
        raise ValueError("twin_prime_constant requires prime_cutoff >= 3")
    odd = base_primes(prime_cutoff)[1:].astype(np.float64)
    value = 2.0 * math.exp(float(np.sum(np.log1p(-1.0 / (odd - 1.0) ** 2))))
    bound = value / (prime_cutoff - 1)
    return C2Estimate(value=value, bound=bound, cutoff=prime_cutoff)


@lru_cache(maxsize=None)
def default_c2() -> C2Estimate:
    """Cutoff-10^6 estimate, computed once and cached."""
    return twin_prime_constant(DEFAULT_C2_CUTOFF)


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    m: float,
    b: float,
    fa: float,
    fm: float,
    fb: float,
    whole: float,
    tol: float,
    depth: int,
) -> float:
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _adaptive_simpson(
        f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1
    ) + _adaptive_simpson(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    abs_floor: float = 1e-12,
) -> float:
    """Adaptive Simpson on [a, b] with a relative target and absolute floor."""
    if b <= a:
        return 0.0
    # Rough composite pass to set the absolute tolerance scale.
    xs = np.linspace(a, b, 129)
    ys = np.array([f(x) for x in xs])
    rough = float(np.trapezoid(ys, xs))
    tol = max(abs_floor, rel_tol * abs(rough))
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    return _adaptive_simpson(f, a, m, b, fa, fm, fb, _simpson(fa, fm, fb, b - a), tol, 48)


def li(n: float, rel_tol: float = 1e-10) -> float:
    """Integral of du/ln(u) from 2 to n; the smooth model for pi(n)."""
    if n <= 2:
        raise ValueError("li requires n > 2")
    return integrate(lambda u: 1.0 / math.log(u), 2.0, float(n), rel_tol)


def li2(n: float, rel_tol: float = 1e-10) -> float:
    """Integral of du/ln^2(u) from 2 to n; rescaled by c2 it models pi2(n)."""
    if n <= 2:
        raise ValueError("li2 requires n > 2")
    return integrate(lambda u: 1.0 / math.log(u) ** 2, 2.0, float(n), rel_tol)


def predict_ab_exact(pi: int, pi2: int) -> tuple[float, float]:
    """Intercept and decay rate implied by exact prime counts:

        a = pi2^2 / (pi - 2*pi2),   b = pi2 / (pi - 2*pi2).

    Requires pi > 2*pi2, which fails only at tiny N.
    """
    denom = pi - 2 * pi2
    if denom <= 0:
        raise DegenerateRegimeError(f"pi={pi} <= 2*pi2={2 * pi2}")
    return pi2 * pi2 / denom, pi2 / denom


def predict_ab_asympt(n: int, c2: float) -> tuple[float, float]:
    """Asymptotic forms a = c2^2*n/ln^3(n), b = c2/ln(n)."""
    if n < 3:
        raise ValueError("asymptotic prediction requires n >= 3")
    ln = math.log(n)
    return c2 * c2 * n / ln**3, c2 / ln


def asympt_intercept_printed(n: int, c2: float) -> float:
    """The N^2 variant of the intercept guess, kept verbatim for reference.

    Dimensionally inconsistent with the exact form (see ASYMPT_INTERCEPT_NOTE);
    not used in comparison ratios.
    """
    if n < 3:
        raise ValueError("asymptotic prediction requires n >= 3")
    ln = math.log(n)
    return c2 * c2 * n * n / ln**3


def predict_smax(pi: int, pi2: int, c2: float) -> tuple[float, float]:
    """Largest-separation predictions from mu(s_max) = 1.

    Returns (paper variant, derived variant):
      paper   = (pi/pi2) * (2*ln(pi2) - ln(pi - 2*c2*pi2))
      derived = ln(a)/b for the exact-input intercept/decay pair.
    The two differ analytically (prefactor and the c2 inside the log); both
    are reported rather than silently picking one.
    """
    a, b = predict_ab_exact(pi, pi2)
    paper_arg = pi - 2.0 * c2 * pi2
    if paper_arg <= 0 or pi2 < 1:
        raise DegenerateRegimeError(f"pi={pi}, pi2={pi2}: log argument <= 0")
    s_paper = (pi / pi2) * (2.0 * math.log(pi2) - math.log(paper_arg))
    s_derived = math.log(a) / b
    return s_paper, s_derived


def smax_asympt(n: int, c2: float) -> float:
    """Leading-order growth of the largest separation: ln^2(n)/c2."""
    return math.log(n) ** 2 / c2


@dataclass(frozen=True)
class TheoryPrediction:
    """Every analytic quantity evaluated at one checkpoint N."""

    n: int
    a_theor: float
    b_theor: float
    a_asympt: float
    b_asympt: float
    a_asympt_printed: float
    s_max_paper: float
    s_max_derived: float
    s_max_asympt: float
    c2_used: float


def predict(n: int, pi: int, pi2: int, c2: float) -> TheoryPrediction:
    """Assemble the full prediction set for a checkpoint.

    Raises DegenerateRegimeError when the closed forms are undefined.
    """
    a_theor, b_theor = predict_ab_exact(pi, pi2)
    a_asympt, b_asympt = predict_ab_asympt(n, c2)
    s_paper, s_derived = predict_smax(pi, pi2, c2)
    return TheoryPrediction(
        n=n,
        a_theor=a_theor,
        b_theor=b_theor,
        a_asympt=a_asympt,
        b_asympt=b_asympt,
        a_asympt_printed=asympt_intercept_printed(n, c2),
        s_max_paper=s_paper,
        s_max_derived=s_derived,
        s_max_asympt=smax_asympt(n, c2),
        c2_used=c2,
    )
