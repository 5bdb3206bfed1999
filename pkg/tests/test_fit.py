import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twingaps import theory
from twingaps.errors import ConsistencyError, InsufficientDataError
from twingaps.fit import (
    comparison_row,
    fit_exponential,
    fit_report_obj,
    residual_diagnostics,
    select_bins,
)
from twingaps.scanstats import Histogram


def exact_exponential(a, b, s_max):
    return Histogram({s: a * math.exp(-b * s) for s in range(s_max + 1)})


def test_exact_exponential_recovered_to_1e_minus_9():
    hist = exact_exponential(10_000, 0.05, 200)
    res = fit_exponential(hist)
    assert res.a_exp == pytest.approx(10_000, rel=1e-9)
    assert res.b_exp == pytest.approx(0.05, rel=1e-9)
    assert res.r_squared == pytest.approx(1.0, abs=1e-12)


def test_exact_exponential_any_trimming():
    hist = exact_exponential(500, 0.2, 80)
    for skip, keep in ((0, 1.0), (10, 0.5), (20, 0.7), (40, 0.3)):
        res = fit_exponential(hist, skip_head=skip, tail_kept_fraction=keep)
        assert res.a_exp == pytest.approx(500, rel=1e-9), (skip, keep)
        assert res.b_exp == pytest.approx(0.2, rel=1e-9), (skip, keep)


def test_rounded_counts_recovered_to_1_percent():
    hist = Histogram()
    for s in range(121):
        c = round(1000 * math.exp(-0.1 * s))
        if c > 0:
            hist.add(s, c)
    res = fit_exponential(hist)
    assert res.b_exp == pytest.approx(0.1, rel=0.01)
    assert res.a_exp == pytest.approx(1000, rel=0.05)


def test_two_points_determine_the_line():
    hist = Histogram({20: math.e**2, 21: math.e})
    res = fit_exponential(hist, skip_head=15, tail_kept_fraction=1.0)
    assert res.b_exp == pytest.approx(1.0, rel=1e-12)
    assert res.a_exp == pytest.approx(math.exp(22), rel=1e-9)
    assert res.points_used == 2


@given(
    scale=st.floats(min_value=0.01, max_value=1000.0),
    b=st.floats(min_value=0.01, max_value=1.0),
)
@settings(max_examples=40, deadline=None)
def test_scaling_counts_scales_intercept_only(scale, b):
    base = {s: 1000.0 * math.exp(-b * s) for s in range(60)}
    res0 = fit_exponential(Histogram(base), skip_head=5, tail_kept_fraction=0.8)
    res1 = fit_exponential(
        Histogram({s: scale * c for s, c in base.items()}), skip_head=5, tail_kept_fraction=0.8
    )
    assert res1.b_exp == pytest.approx(res0.b_exp, rel=1e-12, abs=1e-12)
    assert res1.a_exp == pytest.approx(scale * res0.a_exp, rel=1e-9)


def test_select_bins_protocol():
    hist = Histogram({s: 10 for s in range(0, 40, 2)})  # 20 nonzero bins: 0,2,..,38
    kept = select_bins(hist, skip_head=10, tail_kept_fraction=0.5)
    # keys >= 10 leaves 15 bins (10..38); keep first 7
    assert kept == [(10, 10), (12, 10), (14, 10), (16, 10), (18, 10), (20, 10), (22, 10)]


def test_insufficient_data():
    with pytest.raises(InsufficientDataError):
        fit_exponential(Histogram({1: 5, 2: 4}), skip_head=15)
    with pytest.raises(InsufficientDataError):
        fit_exponential(Histogram({16: 5}), skip_head=15, tail_kept_fraction=1.0)


def test_weighted_matches_unweighted_on_exact_data():
    hist = exact_exponential(2000, 0.1, 100)
    uw = fit_exponential(hist)
    w = fit_exponential(hist, weighted=True)
    assert w.b_exp == pytest.approx(uw.b_exp, rel=1e-9)
    assert w.weighted and not uw.weighted


def test_residuals_vanish_on_exact_data():
    hist = exact_exponential(1000, 0.07, 150)
    res = fit_exponential(hist)
    diag = residual_diagnostics(hist, res)
    assert diag.max_abs < 1e-9
    assert len(diag.residuals) == res.points_used


def test_residual_localizes_single_perturbation():
    bins = {s: 1000.0 * math.exp(-0.05 * s) for s in range(100)}
    bins[40] *= 1.5  # one corrupted bin
    diag_fit = fit_exponential(Histogram(bins), skip_head=0, tail_kept_fraction=1.0)
    diag = residual_diagnostics(Histogram(bins), diag_fit)
    worst = max(zip(diag.residuals, diag.s_values), key=lambda t: abs(t[0]))
    assert worst[1] == 40
    others = [r for r, s in zip(diag.residuals, diag.s_values) if s != 40]
    assert max(abs(r) for r in others) < abs(worst[0]) / 4


def test_real_histogram_residuals_alternate(scan26):
    cp = scan26[2**22]
    res = fit_exponential(cp.sep_hist)
    diag = residual_diagnostics(cp.sep_hist, res)
    assert diag.sign_runs > 3


def test_fit_report_schema():
    hist = exact_exponential(100, 0.1, 60)
    res = fit_exponential(hist)
    obj = fit_report_obj(4096, res)
    assert list(obj) == ["n", "a_exp", "b_exp", "r_squared", "points_used",
                         "skip_head", "tail_kept_fraction"]
    assert obj["n"] == 4096 and obj["points_used"] == res.points_used


def test_comparison_row_identity(scan26):
    cp = scan26[2**24]
    pred = theory.predict(cp.n, cp.pi, cp.pi2, theory.default_c2().value)
    fres = fit_exponential(cp.sep_hist)
    row = comparison_row(cp, fres, pred)
    assert row.a_ratio_theor == pytest.approx(fres.a_exp / pred.a_theor)
    assert row.n == cp.n
    assert all(v > 0 for v in (row.a_ratio_theor, row.b_ratio_theor,
                               row.a_ratio_asympt, row.b_ratio_asympt))


def test_comparison_row_rejects_mismatched_n(scan26):
    cp = scan26[2**24]
    pred = theory.predict(2**22, scan26[2**22].pi, scan26[2**22].pi2, 1.32032)
    fres = fit_exponential(cp.sep_hist)
    with pytest.raises(ConsistencyError):
        comparison_row(cp, fres, pred)
