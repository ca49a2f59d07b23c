import math
import time
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats as sst

from eventlens import tailfit as T


def powerlaw_sample(alpha=2.5, xmin=1, n=10000, seed=0):
    return T.sample_model(T.ModelKind("powerlaw", (alpha,)), xmin, n, seed)


def brute_ks(fit, values):
    """KS distance by walking every integer in [xmin, max]."""
    tail = np.sort(values[values >= fit.xmin])
    xs = np.arange(fit.xmin, tail[-1] + 1)
    emp = np.searchsorted(tail, xs, side="right") / tail.size
    model = 1.0 - T.ccdf(fit.model, xs + 1, fit.xmin)
    return float(np.max(np.abs(emp - model)))


# model definitions -----------------------------------------------------------------------

@pytest.mark.parametrize("kind,xmin", [
    (T.ModelKind("powerlaw", (2.5,)), 1), (T.ModelKind("powerlaw", (3.1,)), 4),
    (T.ModelKind("lognormal", (1.0, 1.0)), 1), (T.ModelKind("lognormal", (-2.0, 0.7)), 3),
    (T.ModelKind("exponential", (0.3,)), 2), (T.ModelKind("poisson", (3.0,)), 1),
    (T.ModelKind("poisson", (0.2,)), 5),
])
def test_pmf_normalises(kind, xmin):
    x = np.arange(xmin, xmin + 2_000_000, dtype=float)
    total = np.exp(T.logpmf(kind, x, xmin)).sum()
    tol = 2e-6 if kind.family == "powerlaw" else 1e-9
    assert total == pytest.approx(1.0, abs=tol)


def test_pmf_against_scipy_references():
    x = np.arange(3, 40, dtype=float)
    ln = T.ModelKind("lognormal", (1.2, 0.8))
    ref = sst.lognorm(0.8, scale=math.exp(1.2))
    mass = ref.cdf(x + 0.5) - ref.cdf(x - 0.5)
    np.testing.assert_allclose(np.exp(T.logpmf(ln, x, 3)), mass / ref.sf(2.5), rtol=1e-9)
    po = T.ModelKind("poisson", (4.0,))
    np.testing.assert_allclose(np.exp(T.logpmf(po, x, 3)), sst.poisson(4.0).pmf(x) / sst.poisson(4.0).sf(2),
                               rtol=1e-9)
    ex = T.ModelKind("exponential", (0.4,))
    np.testing.assert_allclose(np.exp(T.logpmf(ex, x, 3)), sst.geom(1 - math.exp(-0.4)).pmf(x - 2), rtol=1e-9)
    pl = T.ModelKind("powerlaw", (2.2,))
    np.testing.assert_allclose(np.exp(T.logpmf(pl, x, 3)), x ** -2.2 / special.zeta(2.2, 3), rtol=1e-12)


@pytest.mark.parametrize("family,params", [("powerlaw", (1.0,)), ("lognormal", (0.0, 0.0)),
                                           ("exponential", (-1.0,)), ("poisson", (0.0,)),
                                           ("pareto", (2.0,)), ("lognormal", (1.0,))])
def test_invalid_parameters(family, params):
    with pytest.raises(T.ParameterError):
        T.ModelKind(family, params)


def test_degree_sample_validation():
    with pytest.raises(T.ParameterError):
        T.DegreeSample(np.array([0, 1, 2]))
    with pytest.raises(T.ParameterError):
        T.DegreeSample(np.array([], dtype=int))
    assert T.DegreeSample.from_degrees([0, 0, 3, 1]).n == 2


# fitting ------------------------------------------------------------------------------------

def test_closed_form_alpha_example():
    assert round(T.powerlaw_alpha_approx([1, 1, 1, 2, 4], 1), 4) == 1.9017


def test_exact_powerlaw_mle_matches_grid_search():
    vals = np.array([1, 1, 1, 2, 4])
    grid = np.linspace(1.001, 6, 500_001)
    nll = vals.size * np.log(special.zeta(grid, 1)) + grid * np.log(vals).sum()
    oracle = grid[np.argmin(nll)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        fit = T.fit_model(T.DegreeSample(vals), "powerlaw", xmin_override=1)
    assert abs(fit.model.params[0] - oracle) < 1e-4
    assert round(fit.model.params[0], 4) == 2.2165


def test_powerlaw_recovery_one_seed():
    s = powerlaw_sample(seed=3)
    t0 = time.perf_counter()
    fit = T.fit_model(s, "powerlaw")
    assert time.perf_counter() - t0 < 10
    assert 2.45 <= fit.model.params[0] <= 2.55 and fit.xmin <= 3


def test_fit_invariants_and_ks_oracle():
    rng = np.random.default_rng(5)
    for family in T.FAMILIES:
        vals = rng.geometric(0.15, 800)
        fit = T.fit_model(T.DegreeSample(vals), family, warn_small_tail=False)
        assert fit.xmin in set(vals.tolist())
        assert fit.n_tail == int((vals >= fit.xmin).sum())
        assert 0 <= fit.ks <= 1
        assert fit.ks == pytest.approx(brute_ks(fit, vals), abs=1e-12)
        ll = T.logpmf(fit.model, vals[vals >= fit.xmin].astype(float), fit.xmin).sum()
        assert fit.loglik == pytest.approx(ll, rel=1e-9)


def test_xmin_minimises_ks_over_candidates():
    vals = powerlaw_sample(n=2000, seed=9).values
    best = T.fit_model(T.DegreeSample(vals), "powerlaw")
    for xm in np.unique(vals)[:15]:
        try:
            f = T.fit_model(T.DegreeSample(vals), "powerlaw", xmin_override=int(xm), warn_small_tail=False)
        except T.FitError:
            continue
        assert best.ks <= f.ks + 1e-12


def test_truncated_poisson_mle_matches_tail_mean():
    rng = np.random.default_rng(1)
    vals = rng.poisson(4.0, 3000)
    vals = vals[vals >= 2]
    fit = T.fit_model(T.DegreeSample(vals), "poisson", xmin_override=2)
    lam = fit.model.params[0]
    k = np.arange(2, 200)
    mean = (k * sst.poisson(lam).pmf(k)).sum() / sst.poisson(lam).sf(1)
    assert mean == pytest.approx(vals.mean(), rel=1e-6)


@pytest.mark.parametrize("family", T.FAMILIES)
def test_degenerate_tail_rejected(family):
    with pytest.raises(T.FitError, match=family):
        T.fit_model(T.DegreeSample(np.full(20, 3)), family)


def test_fit_preconditions():
    with pytest.raises(T.FitError):
        T.fit_model(T.DegreeSample(np.array([4])), "powerlaw")
    with pytest.raises(T.FitError):
        T.fit_model(T.DegreeSample(np.array([1, 2, 3])), "powerlaw", xmin_override=9)
    with pytest.raises(T.FitError):
        T.fit_model(T.DegreeSample(np.array([1, 2, 3])), "powerlaw", xmin_override=3)


def test_small_tail_warning():
    with pytest.warns(UserWarning, match="tail points"):
        T.fit_model(T.DegreeSample(np.array([1, 2, 3, 5, 8])), "exponential", xmin_override=1)


# sampling -----------------------------------------------------------------------------------

def test_truncated_poisson_sample_mean():
    s = T.sample_model(T.ModelKind("poisson", (3.0,)), 1, 100_000, seed=2)
    assert s.values.min() >= 1
    assert s.values.mean() == pytest.approx(3.0 / (1 - math.exp(-3.0)), rel=0.01)


def test_powerlaw_sample_matches_ccdf():
    kind = T.ModelKind("powerlaw", (2.5,))
    s = T.sample_model(kind, 1, 100_000, seed=4)
    u, c = np.unique(s.values, return_counts=True)
    emp_sf = np.concatenate([[1.0], 1.0 - np.cumsum(c)[:-1] / s.n])
    model_sf = T.ccdf(kind, u.astype(float), 1)
    assert np.max(np.abs(emp_sf - model_sf)) < 0.01


def test_sampler_single_draw_and_determinism():
    kind = T.ModelKind("lognormal", (2.0, 1.5))
    a = T.sample_model(kind, 7, 1, seed=0)
    assert a.n == 1 and a.values[0] >= 7
    assert np.array_equal(T.sample_model(kind, 7, 500, 11).values, T.sample_model(kind, 7, 500, 11).values)
    with pytest.raises(T.ParameterError):
        T.sample_model(kind, 1, 0, 0)


@settings(max_examples=40)
@given(st.sampled_from([("powerlaw", (1.8,)), ("lognormal", (0.5, 2.0)), ("exponential", (0.05,)),
                        ("poisson", (30.0,))]), st.integers(1, 50), st.integers(0, 2**31))
def test_samples_respect_xmin(model, xmin, seed):
    s = T.sample_model(T.ModelKind(*model), xmin, 200, seed)
    assert s.values.min() >= xmin


# goodness of fit ----------------------------------------------------------------------------

def test_gof_rejects_too_few_sims():
    s = powerlaw_sample(n=300, seed=1)
    fit = T.fit_model(s, "powerlaw", warn_small_tail=False)
    with pytest.raises(T.ParameterError):
        T.goodness_of_fit(s, fit, n_sims=99)


def test_gof_deterministic_and_counting():
    s = powerlaw_sample(n=400, seed=2)
    fit = T.fit_model(s, "powerlaw", warn_small_tail=False)
    a = T.goodness_of_fit(s, fit, n_sims=150, seed=5)
    b = T.goodness_of_fit(s, fit, n_sims=150, seed=5)
    assert a == b
    assert 0 <= a.p_value <= 1 and (a.p_value * 150) == pytest.approx(round(a.p_value * 150))


def test_gof_workers_do_not_change_result():
    s = powerlaw_sample(n=300, seed=6)
    fit = T.fit_model(s, "powerlaw", warn_small_tail=False)
    assert (T.goodness_of_fit(s, fit, 120, seed=1).p_value
            == T.goodness_of_fit(s, fit, 120, seed=1, workers=2).p_value)


def test_misspecified_families_rejected_on_whole_sample():
    s = T.sample_model(T.ModelKind("exponential", (0.3,)), 1, 3000, seed=3)
    for family in ("powerlaw", "lognormal", "poisson"):
        fit = T.fit_model(s, family, xmin_override=1)
        assert T.goodness_of_fit(s, fit, 100, seed=1, refit_xmin=False).p_value == 0.0


def test_generating_family_plausible_on_exponential_data():
    s = T.sample_model(T.ModelKind("exponential", (0.3,)), 1, 3000, seed=3)
    fit = T.fit_model(s, "exponential")
    assert T.goodness_of_fit(s, fit, 100, seed=1).p_value > 0.1


# Vuong ----------------------------------------------------------------------------------------

def test_vuong_self_comparison():
    s = powerlaw_sample(n=1000, seed=1)
    fit = T.fit_model(s, "lognormal", warn_small_tail=False)
    v = T.vuong_compare(s, fit, fit)
    assert v.log_lr == 0 and v.verdict == "Inconclusive" and v.diagnostic


def test_vuong_tiny_common_tail():
    s = T.DegreeSample(np.array([1, 1, 2, 3, 50]))
    fit = T.fit_model(s, "exponential", warn_small_tail=False)
    with pytest.raises(T.ComparisonError):
        T.vuong_compare(s, fit, fit, xmin_rule=50)


def test_vuong_statistic_by_hand():
    s = T.sample_model(T.ModelKind("lognormal", (1.0, 1.0)), 1, 2000, seed=8)
    a = T.fit_model(s, "lognormal", warn_small_tail=False)
    b = T.fit_model(s, "exponential", warn_small_tail=False)
    v = T.vuong_compare(s, a, b, xmin_rule="max")
    xm = max(a.xmin, b.xmin)
    ra = T.fit_model(s, "lognormal", xmin_override=xm, warn_small_tail=False)
    rb = T.fit_model(s, "exponential", xmin_override=xm, warn_small_tail=False)
    x = s.values[s.values >= xm].astype(float)
    li = T.logpmf(ra.model, x, xm) - T.logpmf(rb.model, x, xm)
    stat = li.sum() / (li.std(ddof=1) * math.sqrt(li.size))
    assert v.normalized_stat == pytest.approx(stat, rel=1e-12)
    assert v.p_value == pytest.approx(2 * sst.norm.sf(abs(stat)), rel=1e-9, abs=1e-300)


@settings(max_examples=15)
@given(st.integers(0, 10_000), st.sampled_from(["max", "min"]))
def test_vuong_antisymmetric(seed, rule):
    s = T.sample_model(T.ModelKind("lognormal", (1.5, 0.9)), 1, 600, seed)
    a = T.fit_model(s, "lognormal", warn_small_tail=False)
    b = T.fit_model(s, "powerlaw", warn_small_tail=False)
    ab = T.vuong_compare(s, a, b, xmin_rule=rule)
    ba = T.vuong_compare(s, b, a, xmin_rule=rule)
    assert ab.log_lr == pytest.approx(-ba.log_lr, abs=1e-9)
    assert ab.p_value == pytest.approx(ba.p_value, abs=1e-12)
    swap = {"FirstFavored": "SecondFavored", "SecondFavored": "FirstFavored", "Inconclusive": "Inconclusive"}
    assert ba.verdict == swap[ab.verdict]
    if ab.verdict != "Inconclusive":
        assert (ab.log_lr > 0) == (ab.verdict == "FirstFavored")
    else:
        assert ab.p_value > 0.1


# selection ---------------------------------------------------------------------------------

def test_select_best_on_powerlaw_data():
    s = powerlaw_sample(n=5000, seed=12)
    rep = T.select_best(s, config=T.SelectionConfig(n_sims=100, seed=3))
    fav = rep.favored_over("powerlaw")
    assert fav["exponential"] and fav["poisson"]
    ln = [c for c in rep.comparisons if {c.first, c.second} == {"powerlaw", "lognormal"}][0]
    assert not (ln.verdict == "SecondFavored" and ln.second == "lognormal")
    assert rep.gof["powerlaw"].p_value == max(g.p_value for g in rep.gof.values())
    assert "powerlaw" in rep.plausible


def test_select_best_needs_two_families_and_records_errors():
    with pytest.raises(T.ParameterError):
        T.select_best(powerlaw_sample(n=50), ("powerlaw",))
    rep = T.select_best(T.DegreeSample(np.full(30, 2)), ("powerlaw", "poisson"),
                        T.SelectionConfig(run_gof=False))
    assert set(rep.errors) == {"powerlaw", "poisson"} and rep.winner is None


def test_report_never_crowns_with_conflicts():
    rep = T.SelectionReport(
        fits={"a": None, "b": None, "c": None}, gof={}, errors={}, significance=0.1,
        comparisons=[T.VuongResult("a", "b", 1, 10, 5, 3, 0.01, "FirstFavored"),
                     T.VuongResult("b", "c", 1, 10, 5, 3, 0.01, "FirstFavored"),
                     T.VuongResult("a", "c", 1, 10, 0.1, 0.1, 0.9, "Inconclusive")])
    assert rep.winner is None
    rep.comparisons[2] = T.VuongResult("a", "c", 1, 10, 5, 3, 0.01, "FirstFavored")
    assert rep.winner == "a"


def test_rendering_of_lognormal_plausible_scenario():
    fits = {f: T.FitResult(T.ModelKind(f, (1.0, 1.0) if f == "lognormal" else (2.0,)), 1, 100, 0.01, -10.0, 100)
            for f in T.FAMILIES}
    gof = {f: T.GofResult(0.1362 if f == "lognormal" else 0.0, 5000, 0, 0.01) for f in T.FAMILIES}
    cmps = [T.VuongResult("lognormal", f, 1, 100, 9.0, 3.0, 0.031, "FirstFavored")
            for f in ("powerlaw", "exponential", "poisson")]
    d = T.SelectionReport(fits, gof, {}, cmps, 0.1).to_dict()
    assert d["plausible"] == ["lognormal"] and d["winner"] == "lognormal"
    assert d["families"]["lognormal"]["gof_p"] == 0.1362
    assert d["families"]["poisson"]["gof_p"] == 0.0


def test_ccdf_points():
    s = powerlaw_sample(n=500, seed=1)
    fit = T.fit_model(s, "powerlaw", warn_small_tail=False)
    rows = T.ccdf_points(s, {"powerlaw": fit})
    assert rows[0]["empirical"] == 1.0
    assert all(r["powerlaw"] is None for r in rows if r["x"] < fit.xmin)
