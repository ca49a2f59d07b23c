"""Discrete heavy-tail model fitting, bootstrap goodness-of-fit and Vuong tests.

Four families are supported, all defined on integers ``x >= xmin``:

* ``powerlaw``    p(x) = x^-alpha / zeta(alpha, xmin)
* ``lognormal``   continuous lognormal mass on [x - 1/2, x + 1/2), renormalised
* ``exponential`` continuous exponential mass on [x - 1/2, x + 1/2), renormalised
  (this is a geometric distribution on x - xmin)
* ``poisson``     Poisson pmf truncated to x >= xmin

The xmin scan fits every candidate lower bound at once: parameters are estimated
for all candidate tails in vectorised form, then the KS distance of each tail is
computed from a (candidates x unique values) matrix.  This keeps a bootstrap of
thousands of refits tractable on a single core.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import special

FAMILIES = ("powerlaw", "lognormal", "exponential", "poisson")
SMALL_TAIL = 50

_ALPHA_BOUNDS = (1.0 + 1e-6, 30.0)
_MU_BOUNDS = (-60.0, 60.0)
_LOGSIGMA_BOUNDS = (math.log(1e-3), math.log(100.0))


class FitError(ValueError):
    """A model could not be fitted to the requested tail."""


class ParameterError(ValueError):
    """Invalid arguments to a tailfit operation."""


class ComparisonError(ValueError):
    """Two fits cannot be compared (e.g. common tail too small)."""


@dataclass(frozen=True)
class DegreeSample:
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 1 or arr.size < 1:
            raise ParameterError("degree sample must be a non-empty 1-d sequence")
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise ParameterError("degree sample must contain integers")
        arr = arr.astype(np.int64)
        if arr.min() < 1:
            raise ParameterError("degree sample values must be >= 1 (strip zeros first)")
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> "DegreeSample":
        """Build a sample from raw degrees, dropping zeros."""
        arr = np.fromiter((int(d) for d in degrees), dtype=np.int64)
        return cls(arr[arr > 0])

    @property
    def n(self) -> int:
        return int(self.values.size)

    @cached_property
    def _unique(self) -> tuple[np.ndarray, np.ndarray]:
        u, c = np.unique(self.values, return_counts=True)
        return u.astype(np.float64), c.astype(np.float64)


@dataclass(frozen=True)
class ModelKind:
    family: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown model family {self.family!r}")
        p = tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", p)
        want = 2 if self.family == "lognormal" else 1
        if len(p) != want or not all(math.isfinite(v) for v in p):
            raise ParameterError(f"{self.family} needs {want} finite parameter(s), got {p}")
        if self.family == "powerlaw" and p[0] <= 1:
            raise ParameterError("power-law alpha must exceed 1")
        if self.family == "lognormal" and p[1] <= 0:
            raise ParameterError("lognormal sigma must be positive")
        if self.family in ("exponential", "poisson") and p[0] <= 0:
            raise ParameterError(f"{self.family} rate must be positive")

    @property
    def param_dict(self) -> dict[str, float]:
        names = {"powerlaw": ("alpha",), "lognormal": ("mu", "sigma"),
                 "exponential": ("lambda",), "poisson": ("lambda",)}[self.family]
        return dict(zip(names, self.params))


@dataclass(frozen=True)
class FitResult:
    model: ModelKind
    xmin: int
    n_tail: int
    ks: float
    loglik: float
    n: int

    @property
    def family(self) -> str:
        return self.model.family

    def to_dict(self) -> dict:
        return {"family": self.family, "params": self.model.param_dict, "xmin": self.xmin,
                "n_tail": self.n_tail, "ks": self.ks, "loglik": self.loglik}


@dataclass(frozen=True)
class GofResult:
    p_value: float
    n_sims: int
    seed: int
    observed_ks: float
    n_failed: int = 0


@dataclass(frozen=True)
class VuongResult:
    first: str
    second: str
    xmin: int
    n_common: int
    log_lr: float
    normalized_stat: float
    p_value: float
    verdict: str
    diagnostic: str = ""

    def to_dict(self) -> dict:
        return {"a": self.first, "b": self.second, "xmin": self.xmin, "n": self.n_common,
                "log_lr": self.log_lr, "stat": self.normalized_stat, "p": self.p_value,
                "verdict": self.verdict, "diagnostic": self.diagnostic}


# --------------------------------------------------------------------------- #
# per-family log pmf / log survival, broadcasting over x, xmin and parameters
# --------------------------------------------------------------------------- #

def _log_diff_exp(la, lb):
    """log(exp(la) - exp(lb)) for la >= lb."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return la + np.log1p(-np.exp(lb - la))


def _norm_log_interval(a, b):
    """log(Phi(b) - Phi(a)) for a < b, accurate in both tails."""
    # reflect intervals on the positive side so both ends sit in the lower tail
    flip = a > 0
    lo = np.where(flip, -b, a)
    hi = np.where(flip, -a, b)
    return _log_diff_exp(special.log_ndtr(hi), special.log_ndtr(lo))


def _pois_log_upper(k, lam):
    """log P(X >= k) for X ~ Poisson(lam), k >= 1."""
    k = np.asarray(k, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    k, lam = np.broadcast_arrays(k, lam)
    with np.errstate(divide="ignore"):
        direct = np.log(special.gammainc(k, lam))
    bad = ~np.isfinite(direct) | (direct < -600)
    if np.any(bad):
        kb, lb = k[bad], lam[bad]
        # P(X >= k) = pmf(k) * sum_i lam^i k! / (k+i)!, fine when lam < k
        term = np.ones_like(kb)
        total = np.ones_like(kb)
        for i in range(1, 200):
            term = term * lb / (kb + i)
            total += term
            if np.all(term < 1e-17 * total):
                break
        series = kb * np.log(lb) - lb - special.gammaln(kb + 1) + np.log(total)
        direct = direct.copy()
        direct[bad] = series
    return direct


def _logpmf(family, x, xmin, p):
    if family == "powerlaw":
        (alpha,) = p
        return -alpha * np.log(x) - np.log(special.zeta(alpha, xmin))
    if family == "lognormal":
        mu, sigma = p
        a = (np.log(x - 0.5) - mu) / sigma
        b = (np.log(x + 0.5) - mu) / sigma
        a0 = (np.log(xmin - 0.5) - mu) / sigma
        return _norm_log_interval(a, b) - special.log_ndtr(-a0)
    if family == "exponential":
        (lam,) = p
        return np.log(-np.expm1(-lam)) - lam * (x - xmin)
    if family == "poisson":
        (lam,) = p
        return x * np.log(lam) - lam - special.gammaln(x + 1) - _pois_log_upper(xmin, lam)
    raise ParameterError(f"unknown family {family!r}")


def _logsf(family, x, xmin, p):
    """log P(X >= x | X >= xmin) for x >= xmin."""
    if family == "powerlaw":
        (alpha,) = p
        return np.log(special.zeta(alpha, x)) - np.log(special.zeta(alpha, xmin))
    if family == "lognormal":
        mu, sigma = p
        a = (np.log(x - 0.5) - mu) / sigma
        a0 = (np.log(xmin - 0.5) - mu) / sigma
        return special.log_ndtr(-a) - special.log_ndtr(-a0)
    if family == "exponential":
        (lam,) = p
        return -lam * (x - xmin)
    if family == "poisson":
        (lam,) = p
        return _pois_log_upper(x, lam) - _pois_log_upper(xmin, lam)
    raise ParameterError(f"unknown family {family!r}")


def logpmf(model: ModelKind, x, xmin: int) -> np.ndarray:
    """Log probability of integer(s) ``x`` under ``model`` truncated at ``xmin``."""
    return _logpmf(model.family, np.asarray(x, dtype=np.float64), float(xmin), model.params)


def ccdf(model: ModelKind, x, xmin: int) -> np.ndarray:
    """P(X >= x | X >= xmin)."""
    return np.exp(_logsf(model.family, np.asarray(x, dtype=np.float64), float(xmin), model.params))


# --------------------------------------------------------------------------- #
# vectorised MLE over many candidate tails
# --------------------------------------------------------------------------- #

def _golden(f, lo, hi, iters=64):
    """Elementwise golden-section minimisation of a unimodal f on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = np.array(lo, dtype=np.float64), np.array(hi, dtype=np.float64)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - invphi * (b - a)
        new_d = a + invphi * (b - a)
        # the retained interior point is reused; only one new evaluation per step
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        probe = np.where(left, c_next, d_next)
        fp = f(probe)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_next, d_next
    return (a + b) / 2.0


@dataclass
class _Tails:
    """Sufficient statistics for tails starting at each candidate xmin."""

    u: np.ndarray          # unique values, ascending
    c: np.ndarray          # their counts
    xmins: np.ndarray      # candidate lower bounds
    mask: np.ndarray = field(init=False)
    n: np.ndarray = field(init=False)
    s1: np.ndarray = field(init=False)
    slog: np.ndarray = field(init=False)

    def __post_init__(self):
        self.mask = self.u[None, :] >= self.xmins[:, None]
        w = np.where(self.mask, self.c[None, :], 0.0)
        self.w = w
        self.n = w.sum(axis=1)
        self.s1 = (w * self.u[None, :]).sum(axis=1)
        self.slog = (w * np.log(self.u)[None, :]).sum(axis=1)


def _fit_powerlaw(t: _Tails):
    def nll(alpha):
        return t.n * np.log(special.zeta(alpha, t.xmins)) + alpha * t.slog

    lo = np.full(t.xmins.shape, _ALPHA_BOUNDS[0])
    hi = np.full(t.xmins.shape, _ALPHA_BOUNDS[1])
    return (_golden(nll, lo, hi),)


def _fit_exponential(t: _Tails):
    d = t.s1 / t.n - t.xmins
    with np.errstate(divide="ignore"):
        return (np.log1p(1.0 / d),)


def _fit_poisson(t: _Tails):
    mean = t.s1 / t.n

    def nll(eta):
        lam = np.exp(eta)
        return -(t.s1 * eta - t.n * lam) + t.n * _pois_log_upper(t.xmins, lam)

    lo = np.full(t.xmins.shape, math.log(1e-8))
    return (np.exp(_golden(nll, lo, np.log(mean))),)


_NEWTON_FTOL = 1e-10


def _lognormal_nll(t: _Tails, mu, logsig, rows=None):
    """Negative log-likelihood for parameter rows; ``rows`` maps each to a tail."""
    if rows is None:
        rows = np.arange(t.xmins.size)
    sigma = np.exp(logsig)[:, None]
    x = t.u[None, :]
    lp = _logpmf("lognormal", x, t.xmins[rows][:, None], (mu[:, None], sigma))
    w = t.w[rows]
    lp = np.where(w > 0, lp, 0.0)
    out = -(w * lp).sum(axis=1)
    return np.where(np.isfinite(out), out, np.inf)


def _lognormal_derivs(t: _Tails, mu, logsig, rows):
    """Negative log-likelihood with its analytic gradient and Hessian in (mu, log sigma).

    Ratios phi(z) / P are formed in log space so far tails stay finite.
    """
    sigma = np.exp(logsig)[:, None]
    m = mu[:, None]
    w = t.w[rows]
    x = np.where(w > 0, t.u[None, :], t.xmins[rows][:, None])
    a = (np.log(x - 0.5) - m) / sigma
    b = (np.log(x + 0.5) - m) / sigma
    log_p = _norm_log_interval(a, b)
    half_log_2pi = 0.5 * math.log(2.0 * math.pi)
    ra = np.exp(-0.5 * a * a - half_log_2pi - log_p)
    rb = np.exp(-0.5 * b * b - half_log_2pi - log_p)
    s = sigma[:, 0]
    gm = (ra - rb) / sigma
    gs = a * ra - b * rb
    hmm = gs / sigma**2 - gm**2
    hss = a * ra * (a * a - 1) - b * rb * (b * b - 1) - gs**2
    hms = (ra * (a * a - 1) - rb * (b * b - 1)) / sigma - gm * gs
    n = t.n[rows]
    # truncation term n * log Phi(c), c = (mu - log(xmin - 1/2)) / sigma
    c = (mu - np.log(t.xmins[rows] - 0.5)) / s
    log_phi_c = special.log_ndtr(c)
    q = np.exp(-0.5 * c * c - half_log_2pi - log_phi_c)
    dq = -q * (c + q)
    f = -(w * np.where(w > 0, log_p, 0.0)).sum(axis=1) + n * log_phi_c
    g = np.stack([-(w * gm).sum(axis=1) + n * q / s,
                  -(w * gs).sum(axis=1) - n * c * q], axis=1)
    h_mm = -(w * hmm).sum(axis=1) + n * dq / s**2
    h_ss = -(w * hss).sum(axis=1) + n * (c * q + c * c * dq)
    h_ms = -(w * hms).sum(axis=1) + n * (-q - c * dq) / s
    return np.where(np.isfinite(f), f, np.inf), g, h_mm, h_ss, h_ms


def _fit_lognormal(t: _Tails, max_iter=100):
    m = t.xmins.size
    logs = np.log(t.u)[None, :]
    mean = t.slog / t.n
    var = (t.w * (logs - mean[:, None]) ** 2).sum(axis=1) / t.n
    mu = np.clip(mean, *_MU_BOUNDS)
    ls = np.clip(0.5 * np.log(np.maximum(var, 1e-4)), *_LOGSIGMA_BOUNDS)
    f = _lognormal_nll(t, mu, ls)
    active = np.ones(m, dtype=bool)
    steps = np.array([1.0, 0.5, 0.25, 0.1, 0.03, 0.01, 1e-3])
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        k = idx.size
        with np.errstate(all="ignore"):
            _, g, hmm, hss, hms = _lognormal_derivs(t, mu[idx], ls[idx], idx)
            det = hmm * hss - hms**2
            pd = (hmm > 0) & (det > 0) & np.all(np.isfinite(g), axis=1) & np.isfinite(det)
            nd_mu = -(hss * g[:, 0] - hms * g[:, 1]) / det
            nd_ls = -(-hms * g[:, 0] + hmm * g[:, 1]) / det
        gscale = 1.0 / np.maximum(np.abs(np.nan_to_num(g)).max(axis=1), 1.0)
        d_mu = np.nan_to_num(np.where(pd, nd_mu, -g[:, 0] * gscale))
        d_ls = np.nan_to_num(np.where(pd, nd_ls, -g[:, 1] * gscale))
        # full step first; shorter steps only for rows where it does not help
        cmu = np.clip(mu[idx][:, None] + steps[None, :] * d_mu[:, None], *_MU_BOUNDS)
        cls_ = np.clip(ls[idx][:, None] + steps[None, :] * d_ls[:, None], *_LOGSIGMA_BOUNDS)
        fc = np.full((k, steps.size), np.inf)
        fc[:, 0] = _lognormal_nll(t, cmu[:, 0], cls_[:, 0], idx)
        tol = 1e-12 * np.maximum(1.0, np.abs(f[idx]))
        retry = np.flatnonzero(~(fc[:, 0] < f[idx] - tol))
        if retry.size:
            fc[retry, 1:] = _lognormal_nll(t, cmu[retry, 1:].ravel(), cls_[retry, 1:].ravel(),
                                           np.repeat(idx[retry], steps.size - 1)).reshape(retry.size, -1)
        best = np.argmin(fc, axis=1)
        fbest = fc[np.arange(k), best]
        improved = fbest < f[idx] - tol
        take = idx[improved]
        moved = np.hypot(cmu[improved, best[improved]] - mu[take],
                         cls_[improved, best[improved]] - ls[take])
        gain = f[idx] - np.minimum(fbest, f[idx])
        mu[take] = cmu[improved, best[improved]]
        ls[take] = cls_[improved, best[improved]]
        f[take] = fbest[improved]
        # stop rows that no longer move or gain; runaway tails only creep towards the bound
        stalled = ~improved | (gain < _NEWTON_FTOL * np.maximum(1.0, np.abs(f[idx])))
        active[idx[stalled]] = False
        active[take[moved < 1e-9]] = False
    return mu, np.exp(ls)


_FITTERS = {"powerlaw": _fit_powerlaw, "lognormal": _fit_lognormal,
            "exponential": _fit_exponential, "poisson": _fit_poisson}


def _valid_params(family, params):
    ok = np.ones(params[0].shape, dtype=bool)
    for p in params:
        ok &= np.isfinite(p)
    if family == "powerlaw":
        ok &= params[0] > 1
    elif family == "lognormal":
        ok &= params[1] > 0
    else:
        ok &= params[0] > 0
    return ok


def _scan(family, u, c, xmins):
    """Fit ``family`` to every candidate tail; return (params, ks, loglik)."""
    t = _Tails(u, c, xmins.astype(np.float64))
    params = _FITTERS[family](t)
    ok = _valid_params(family, params)
    bparams = tuple(np.where(ok, p, 1.5 if family == "powerlaw" else 1.0)[:, None]
                    for p in params)
    x = u[None, :]
    xm = t.xmins[:, None]
    with np.errstate(all="ignore"):
        lp = _logpmf(family, x, xm, bparams)
        ls = _logsf(family, x, xm, bparams)
    mask = t.mask
    pmf = np.where(mask, np.exp(lp), 0.0)
    sf = np.where(mask, np.exp(ls), 0.0)
    # model CDF at each unique value u_k and just below the next one (u_{k+1} - 1)
    cdf_at = 1.0 - (sf - pmf)
    cdf_before_next = np.ones_like(sf)
    cdf_before_next[:, :-1] = 1.0 - sf[:, 1:]
    emp = np.cumsum(t.w, axis=1) / t.n[:, None]
    d1 = np.where(mask, np.abs(emp - cdf_at), 0.0)
    d2 = np.where(mask, np.abs(emp - cdf_before_next), 0.0)
    d2[:, -1] = 0.0
    ks = np.maximum(d1.max(axis=1), d2.max(axis=1))
    ll = np.where(mask, t.w * np.where(mask, lp, 0.0), 0.0).sum(axis=1)
    ok &= np.isfinite(ks) & np.isfinite(ll)
    ks = np.where(ok, ks, np.inf)
    return params, ks, ll, t.n, ok


def _candidate_xmins(u, c):
    # tails must hold >= 2 points and >= 2 distinct values
    tail_n = np.cumsum(c[::-1])[::-1]
    keep = (tail_n >= 2) & (np.arange(u.size) <= u.size - 2)
    return u[keep]


def _fit_arrays(family, u, c, n, xmin_override=None) -> FitResult:
    if family not in FAMILIES:
        raise ParameterError(f"unknown model family {family!r}")
    if xmin_override is None:
        xmins = _candidate_xmins(u, c)
        if xmins.size == 0:
            raise FitError(f"{family}: no candidate tail with >= 2 distinct values")
    else:
        xmin_override = int(xmin_override)
        if not (u[0] <= xmin_override <= u[-1]):
            raise FitError(f"{family}: xmin {xmin_override} outside the sample range")
        tail = u >= xmin_override
        if c[tail].sum() < 2:
            raise FitError(f"{family}: tail at xmin={xmin_override} has < 2 points")
        if tail.sum() < 2:
            raise FitError(f"{family}: degenerate tail (all values equal) at xmin={xmin_override}")
        xmins = np.array([float(xmin_override)])
    params, ks, ll, ntail, ok = _scan(family, u, c, xmins)
    if not np.any(ok):
        raise FitError(f"{family}: maximum-likelihood fit failed for every candidate xmin")
    j = int(np.argmin(ks))
    model = ModelKind(family, tuple(float(p[j]) for p in params))
    return FitResult(model=model, xmin=int(xmins[j]), n_tail=int(ntail[j]),
                     ks=float(ks[j]), loglik=float(ll[j]), n=int(n))


def fit_model(sample: DegreeSample, family: str, xmin_override: int | None = None,
              warn_small_tail: bool = True) -> FitResult:
    """Maximum-likelihood fit of ``family`` with KS-optimal xmin (or a pinned one)."""
    if not isinstance(sample, DegreeSample):
        sample = DegreeSample(np.asarray(sample))
    if sample.n < 2:
        raise FitError(f"{family}: need at least 2 observations")
    u, c = sample._unique
    res = _fit_arrays(family, u, c, sample.n, xmin_override)
    if warn_small_tail and res.n_tail < SMALL_TAIL:
        warnings.warn(f"{family} fit uses only {res.n_tail} tail points (xmin={res.xmin})",
                      stacklevel=2)
    return res


def powerlaw_alpha_approx(values: Sequence[int], xmin: int) -> float:
    """Closed-form discrete power-law estimate 1 + n / sum(ln(x / (xmin - 1/2)))."""
    x = np.asarray(values, dtype=np.float64)
    x = x[x >= xmin]
    return 1.0 + x.size / np.log(x / (xmin - 0.5)).sum()


# --------------------------------------------------------------------------- #
# sampling
# --------------------------------------------------------------------------- #

class _TailSampler:
    """Inverse-CDF sampler for a truncated discrete model."""

    def __init__(self, model: ModelKind, xmin: int, table_size: int = 1 << 14):
        self.model = model
        self.xmin = int(xmin)
        self.grid = np.arange(self.xmin, self.xmin + table_size, dtype=np.float64)
        self.neg_logsf = -_logsf(model.family, self.grid, float(self.xmin), model.params)
        self.neg_logsf[0] = 0.0

    def _logsf(self, x):
        return _logsf(self.model.family, x, float(self.xmin), self.model.params)

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n == 0:
            return np.empty(0, dtype=np.int64)
        # v in (0, 1]; X = max{x : S(x) >= v}
        log_v = np.log1p(-rng.random(n))
        pos = np.searchsorted(self.neg_logsf, -log_v, side="right")
        out = self.grid[0] + pos - 1.0
        far = pos >= self.grid.size
        if np.any(far):
            out[far] = self._bisect(log_v[far])
        return out.astype(np.int64)

    def _bisect(self, log_v):
        cap = 2.0**52
        lo = np.full(log_v.shape, self.grid[-1])
        hi = np.minimum(lo * 2.0, cap)
        for _ in range(64):
            grow = (self._logsf(hi) >= log_v) & (hi < cap)
            if not np.any(grow):
                break
            lo = np.where(grow, hi, lo)
            hi = np.where(grow, np.minimum(hi * 2.0, cap), hi)
        at_cap = self._logsf(hi) >= log_v
        for _ in range(64):
            if np.all(hi - lo <= 1):
                break
            mid = np.floor((lo + hi) / 2.0)
            ge = self._logsf(mid) >= log_v
            lo = np.where(ge, mid, lo)
            hi = np.where(ge, hi, mid)
        return np.where(at_cap, hi, lo)


def sample_model(kind: ModelKind, xmin: int, n: int, seed: int) -> DegreeSample:
    """i.i.d. draws from ``kind`` truncated to x >= xmin."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if int(xmin) < 1:
        raise ParameterError("xmin must be >= 1")
    rng = np.random.default_rng(seed)
    return DegreeSample(_TailSampler(kind, int(xmin)).draw(int(n), rng))


# --------------------------------------------------------------------------- #
# bootstrap goodness of fit
# --------------------------------------------------------------------------- #

def _replicate_rng(seed: int, i: int) -> np.random.Generator:
    # stream depends only on (seed, replicate index), not on scheduling
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))


def _replicate_ks(args) -> tuple[list[float], int]:
    fit, below, indices, seed, refit_xmin, sampler = args
    if sampler is None:
        sampler = _TailSampler(fit.model, fit.xmin)
    out, failed = [], 0
    p_tail = fit.n_tail / fit.n
    for i in indices:
        rng = _replicate_rng(seed, i)
        n_tail = fit.n if below.size == 0 else int(rng.binomial(fit.n, p_tail))
        synth = np.concatenate([sampler.draw(n_tail, rng),
                                rng.choice(below, fit.n - n_tail) if n_tail < fit.n
                                else np.empty(0, dtype=np.int64)])
        u, c = np.unique(synth, return_counts=True)
        try:
            r = _fit_arrays(fit.family, u.astype(np.float64), c.astype(np.float64), fit.n,
                            None if refit_xmin else fit.xmin)
            out.append(r.ks)
        except FitError:
            # an unfittable replicate counts as at least as extreme as the data
            out.append(math.inf)
            failed += 1
    return out, failed


def goodness_of_fit(sample: DegreeSample, fit: FitResult, n_sims: int = 5000, seed: int = 0,
                    refit_xmin: bool = True, workers: int = 1) -> GofResult:
    """Semi-parametric bootstrap p-value for ``fit`` (fraction of synthetic KS >= observed)."""
    if n_sims < 100:
        raise ParameterError("n_sims must be >= 100")
    if not isinstance(sample, DegreeSample):
        sample = DegreeSample(np.asarray(sample))
    if fit.n != sample.n:
        raise ParameterError("fit was not produced from this sample")
    below = sample.values[sample.values < fit.xmin]
    if workers <= 1:
        ks, failed = _replicate_ks((fit, below, range(n_sims), seed, refit_xmin,
                                    _TailSampler(fit.model, fit.xmin)))
    else:
        chunks = np.array_split(np.arange(n_sims), workers * 4)
        ks, failed = [], 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            jobs = [(fit, below, list(ch), seed, refit_xmin, None) for ch in chunks if ch.size]
            for part, nf in pool.map(_replicate_ks, jobs):
                ks.extend(part)
                failed += nf
    ks = np.asarray(ks)
    p = float(np.count_nonzero(ks >= fit.ks)) / n_sims
    return GofResult(p_value=p, n_sims=n_sims, seed=seed, observed_ks=fit.ks, n_failed=failed)


# --------------------------------------------------------------------------- #
# Vuong likelihood-ratio comparison
# --------------------------------------------------------------------------- #

def common_xmin(fit_a: FitResult, fit_b: FitResult, rule: str | int = "max") -> int:
    """Lower bound of the tail on which two fits are compared.

    ``"max"`` uses the tail both fits claim to describe; ``"min"`` uses the
    larger tail, so a poorly fitting family cannot escape into a handful of
    extreme points; an integer pins the bound.
    """
    if isinstance(rule, (int, np.integer)) and not isinstance(rule, bool):
        return int(rule)
    if rule == "max":
        return max(fit_a.xmin, fit_b.xmin)
    if rule == "min":
        return min(fit_a.xmin, fit_b.xmin)
    raise ParameterError(f"unknown common-xmin rule {rule!r}")


def vuong_compare(sample: DegreeSample, fit_a: FitResult, fit_b: FitResult,
                  significance: float = 0.1, xmin_rule: str | int = "max") -> VuongResult:
    """Compare two fits on a common tail, re-estimating both there.

    Pointwise log-likelihood ratios l_i are summed; the statistic is
    sum(l_i) / (sd(l_i) * sqrt(n)) with a two-sided normal p-value.
    """
    if not isinstance(sample, DegreeSample):
        sample = DegreeSample(np.asarray(sample))
    xmin = common_xmin(fit_a, fit_b, xmin_rule)
    tail = sample.values[sample.values >= xmin]
    if tail.size < 2:
        raise ComparisonError(f"common tail at xmin={xmin} has < 2 points")
    try:
        ra = fit_model(sample, fit_a.family, xmin_override=xmin, warn_small_tail=False)
        rb = fit_model(sample, fit_b.family, xmin_override=xmin, warn_small_tail=False)
    except FitError as exc:
        raise ComparisonError(str(exc)) from exc
    x = tail.astype(np.float64)
    li = logpmf(ra.model, x, xmin) - logpmf(rb.model, x, xmin)
    log_lr = float(li.sum())
    n = li.size
    sd = float(np.std(li, ddof=1))
    if not np.isfinite(log_lr):
        raise ComparisonError("non-finite log-likelihood ratio")
    if sd == 0.0 or n < 2:
        return VuongResult(fit_a.family, fit_b.family, xmin, n, log_lr, 0.0, 1.0,
                           "Inconclusive", "zero variance of pointwise log-likelihood ratios")
    stat = log_lr / (sd * math.sqrt(n))
    p = float(special.erfc(abs(stat) / math.sqrt(2.0)))
    if p > significance:
        verdict = "Inconclusive"
    else:
        verdict = "FirstFavored" if log_lr > 0 else "SecondFavored"
    return VuongResult(fit_a.family, fit_b.family, xmin, n, log_lr, stat, p, verdict)


# --------------------------------------------------------------------------- #
# model selection report
# --------------------------------------------------------------------------- #

@dataclass
class SelectionConfig:
    n_sims: int = 5000
    seed: int = 0
    significance: float = 0.1
    run_gof: bool = True
    refit_xmin: bool = True
    workers: int = 1
    comparison_xmin: str = "min"


def family_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint32)[0])


@dataclass
class SelectionReport:
    fits: dict[str, FitResult]
    gof: dict[str, GofResult]
    errors: dict[str, str]
    comparisons: list[VuongResult]
    significance: float

    @property
    def winner(self) -> str | None:
        """Family favoured significantly over every other fitted family, if any."""
        names = list(self.fits)
        for name in names:
            wins = 0
            for cmp in self.comparisons:
                if cmp.first == name and cmp.verdict == "FirstFavored":
                    wins += 1
                elif cmp.second == name and cmp.verdict == "SecondFavored":
                    wins += 1
            if names and wins == len(names) - 1:
                return name
        return None

    @property
    def plausible(self) -> list[str]:
        return [f for f, g in self.gof.items() if g.p_value >= self.significance]

    def favored_over(self, family: str) -> dict[str, bool]:
        out = {}
        for cmp in self.comparisons:
            if cmp.first == family:
                out[cmp.second] = cmp.verdict == "FirstFavored"
            elif cmp.second == family:
                out[cmp.first] = cmp.verdict == "SecondFavored"
        return out

    def to_dict(self) -> dict:
        fams = {}
        for name, fit in self.fits.items():
            d = fit.to_dict()
            g = self.gof.get(name)
            d["gof_p"] = None if g is None else g.p_value
            d["gof_sims"] = None if g is None else g.n_sims
            fams[name] = d
        for name, err in self.errors.items():
            fams[name] = {"error": err}
        return {
            "families": fams,
            "comparisons": [c.to_dict() for c in self.comparisons],
            "winner": self.winner,
            "plausible": self.plausible if self.gof else None,
            "no_plausible_model": (not self.plausible) if self.gof else None,
            "significance": self.significance,
        }


def select_best(sample: DegreeSample, families: Sequence[str] = FAMILIES,
                config: SelectionConfig | None = None) -> SelectionReport:
    """Fit all families, bootstrap each, and run every pairwise Vuong test."""
    config = config or SelectionConfig()
    if len(families) < 2:
        raise ParameterError("select_best needs at least two families")
    if not isinstance(sample, DegreeSample):
        sample = DegreeSample(np.asarray(sample))
    fits, gof, errors = {}, {}, {}
    for k, fam in enumerate(families):
        try:
            fits[fam] = fit_model(sample, fam, warn_small_tail=False)
        except FitError as exc:
            errors[fam] = str(exc)
            continue
        if config.run_gof:
            gof[fam] = goodness_of_fit(sample, fits[fam], config.n_sims,
                                       family_seed(config.seed, k), config.refit_xmin,
                                       config.workers)
    comparisons = []
    names = list(fits)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            try:
                comparisons.append(vuong_compare(sample, fits[names[i]], fits[names[j]],
                                                 config.significance, config.comparison_xmin))
            except ComparisonError as exc:
                comparisons.append(VuongResult(names[i], names[j], 0, 0, math.nan, math.nan,
                                               math.nan, "Inconclusive", str(exc)))
    return SelectionReport(fits, gof, errors, comparisons, config.significance)


def ccdf_points(sample: DegreeSample, fits: dict[str, FitResult]) -> list[dict]:
    """Empirical CCDF with each model's CCDF scaled by its tail fraction (for log-log plots)."""
    u, c = sample._unique
    emp = np.cumsum(c[::-1])[::-1] / sample.n
    rows = []
    for x, e in zip(u, emp):
        row = {"x": int(x), "empirical": float(e)}
        for name, fit in fits.items():
            if x >= fit.xmin:
                row[name] = float(fit.n_tail / fit.n * ccdf(fit.model, x, fit.xmin))
            else:
                row[name] = None
        rows.append(row)
    return rows
