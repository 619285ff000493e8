"""Regime-switching triple-seasonal ARMA engine.

The model multiplies short-lag, intraday-seasonal, intraweek-seasonal and
annual lag polynomials on both the AR and MA sides.  The annual factor and
the innovation variance switch between a normal-day and a special-day
version depending on the day the period falls on, and the annual lags
themselves are calendar-dependent (see :mod:`loadcast.rules`).

Conventions: AR factors are ``1 - sum coef_i L^(i*s)``, MA and annual
factors ``1 + sum coef_i L^(i*s)``.  Pre-sample observations are taken at
the level constant and pre-sample innovations at zero; the likelihood
excludes a burn-in window (one year by default) so initialization cannot
bias estimation.
"""
from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .calendar import DayClassification
from .data import DataError, LoadSeries, series_hash
from .grid import SeasonalGrid
from .kernels import extend_forecast, filter_residuals, simulate_series
from .rules import AnnualLagPlan, resolve_lag_chain
from .simplex import nelder_mead_minimize

__all__ = [
    "FitError",
    "SarmaOrders",
    "SarmaParams",
    "ResidualSeries",
    "LikelihoodContext",
    "ForecastSet",
    "FitResult",
    "default_burn_in",
    "expand_composite_polynomials",
    "residuals",
    "loglik_from_residuals",
    "likelihood_context",
    "log_likelihood",
    "fit",
    "simulate",
    "forecast_point",
    "forecast_density",
    "acf",
    "pacf",
    "acf_pacf",
    "params_to_doc",
    "params_from_doc",
    "write_params",
    "read_params",
]

_PENALTY = 1e12
_ROOT_GUARD = 1.001
_VAR_FLOOR = 1e-12


class FitError(RuntimeError):
    """Estimation failed (optimizer trapped in the penalty region)."""


@dataclass(frozen=True)
class SarmaOrders:
    """Polynomial orders; all in 0..3.

    ``annual_depth`` is the number of annual lag terms carried by each of
    the four annual factors (0 disables intrayear modelling entirely).
    """

    p: int = 2
    q: int = 2
    P1: int = 1
    Q1: int = 1
    P2: int = 1
    Q2: int = 1
    annual_depth: int = 3

    def __post_init__(self) -> None:
        for name in ("p", "q", "P1", "Q1", "P2", "Q2", "annual_depth"):
            v = getattr(self, name)
            if not 0 <= v <= 3:
                raise ValueError(f"order {name}={v} outside 0..3")

    @classmethod
    def parse(cls, text: str) -> "SarmaOrders":
        """Parse 'p,q,P1,Q1,P2,Q2,annual_depth'."""
        parts = [int(x) for x in text.split(",")]
        if len(parts) != 7:
            raise ValueError("orders must be 'p,q,P1,Q1,P2,Q2,annualDepth'")
        return cls(*parts)


@dataclass
class SarmaParams:
    """Coefficients for one fitted model.

    The three AR lists belong to the short-lag, intraday and intraweek
    factors; likewise the MA lists.  The four ``eta_*`` lists hold the
    annual factor coefficients: psi/lambda apply on normal days, and
    theta/kappa on special days (AR and MA side respectively).
    """

    c: float = 0.0
    ar: tuple[float, ...] = ()
    ar_day: tuple[float, ...] = ()
    ar_week: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    ma_day: tuple[float, ...] = ()
    ma_week: tuple[float, ...] = ()
    eta_psi: tuple[float, ...] = ()
    eta_theta: tuple[float, ...] = ()
    eta_lambda: tuple[float, ...] = ()
    eta_kappa: tuple[float, ...] = ()
    sigma2_normal: float = 1.0
    sigma2_special: float = 1.0

    def validate(self, orders: SarmaOrders) -> None:
        expected = {
            "ar": orders.p, "ar_day": orders.P1, "ar_week": orders.P2,
            "ma": orders.q, "ma_day": orders.Q1, "ma_week": orders.Q2,
            "eta_psi": orders.annual_depth, "eta_theta": orders.annual_depth,
            "eta_lambda": orders.annual_depth, "eta_kappa": orders.annual_depth,
        }
        for name, length in expected.items():
            if len(getattr(self, name)) != length:
                raise ValueError(
                    f"{name} has {len(getattr(self, name))} coefficients, "
                    f"orders require {length}"
                )
        if self.sigma2_normal <= 0 or self.sigma2_special <= 0:
            raise ValueError("variances must be positive")


@dataclass
class ResidualSeries:
    eps: np.ndarray
    is_normal: np.ndarray  # bool per period


@dataclass(frozen=True)
class LikelihoodContext:
    n: int
    burn_in: int
    n_normal: int
    n_special: int


@dataclass
class ForecastSet:
    """Forecasts from one origin: point values for horizons 1..H, plus an
    optional simulation ensemble of shape (H, n_sims)."""

    origin: int
    point: np.ndarray
    ensemble: np.ndarray | None = None

    @property
    def horizon(self) -> int:
        return self.point.size


@dataclass
class FitResult:
    params: SarmaParams
    loglik: float
    n_eval: int
    converged: bool
    stderr: dict[str, tuple[float, ...]] = field(default_factory=dict)


def default_burn_in(grid: SeasonalGrid) -> int:
    """One year of periods, the window excluded from the likelihood."""
    return 365 * grid.periods_per_day


# ---------------------------------------------------------------------------
# polynomial expansion


def _poly_mul(a: dict[int, float], b: dict[int, float]) -> dict[int, float]:
    if len(b) == 1 and 0 in b and b[0] == 1.0:
        return a
    out: dict[int, float] = {}
    for la, ca in a.items():
        for lb, cb in b.items():
            lag = la + lb
            out[lag] = out.get(lag, 0.0) + ca * cb
    return out


def _ar_factor(coefs: tuple[float, ...], step: int) -> dict[int, float]:
    poly = {0: 1.0}
    for i, c in enumerate(coefs, start=1):
        poly[i * step] = -c
    return poly


def _ma_factor(coefs: tuple[float, ...], step: int) -> dict[int, float]:
    poly = {0: 1.0}
    for i, c in enumerate(coefs, start=1):
        poly[i * step] = c
    return poly


def _annual_factor(coefs: tuple[float, ...], chain: tuple[int, ...]) -> dict[int, float]:
    poly = {0: 1.0}
    for eta, lag in zip(coefs, chain):
        poly[lag] = poly.get(lag, 0.0) + eta
    return poly


def _expand_side(
    short: tuple[float, ...],
    day: tuple[float, ...],
    week: tuple[float, ...],
    annual: tuple[float, ...],
    chain: tuple[int, ...],
    m1: int,
    m2: int,
    ar_side: bool,
) -> dict[int, float]:
    factor = _ar_factor if ar_side else _ma_factor
    poly = factor(short, 1)
    poly = _poly_mul(poly, factor(day, m1))
    poly = _poly_mul(poly, factor(week, m2))
    poly = _poly_mul(poly, _annual_factor(annual, chain))
    return poly


def expand_composite_polynomials(
    orders: SarmaOrders,
    params: SarmaParams,
    t: int,
    plan: AnnualLagPlan,
    classifications: dict[dt.date, DayClassification],
) -> tuple[dict[int, float], dict[int, float]]:
    """Fully multiplied-out (ar_map, ma_map) of lag -> coefficient at ``t``.

    The annual factor uses the normal-day coefficient set when the day of
    ``t`` is normal and the special-day set otherwise; its lags follow the
    cumulative lag chain, truncated where history runs out.
    """
    grid = plan.grid
    date = grid.date_of(t)
    cls = classifications.get(date)
    if cls is None:
        raise IndexError(f"no classification for {date}")
    chain = tuple(resolve_lag_chain(t, plan, depth=max(orders.annual_depth, 1))[: orders.annual_depth]) if orders.annual_depth else ()
    is_normal = cls.is_normal
    depth = len(chain)
    m1, m2 = grid.periods_per_day, grid.periods_per_week
    ar_map = _expand_side(
        params.ar, params.ar_day, params.ar_week,
        (params.eta_psi if is_normal else params.eta_theta)[:depth],
        chain, m1, m2, ar_side=True,
    )
    ma_map = _expand_side(
        params.ma, params.ma_day, params.ma_week,
        (params.eta_lambda if is_normal else params.eta_kappa)[:depth],
        chain, m1, m2, ar_side=False,
    )
    return ar_map, ma_map


# ---------------------------------------------------------------------------
# per-day lag structure shared by all evaluations of one model setup


class _LagStructure:
    """Day-level grouping of (regime, lag-chain) profiles over n_days."""

    def __init__(
        self,
        orders: SarmaOrders,
        grid: SeasonalGrid,
        classifications: dict[dt.date, DayClassification],
        plan: AnnualLagPlan,
        n_days: int,
    ):
        self.orders = orders
        self.grid = grid
        m1 = grid.periods_per_day
        profile_key_to_id: dict[tuple[bool, tuple[int, ...]], int] = {}
        self.profiles: list[tuple[bool, tuple[int, ...]]] = []
        day_profile = np.empty(n_days, dtype=np.int64)
        is_normal = np.empty(n_days * m1, dtype=bool)
        for day in range(n_days):
            date = grid.series_start + dt.timedelta(days=day)
            cls = classifications.get(date)
            if cls is None:
                raise DataError(f"no classification for {date}")
            if orders.annual_depth > 0:
                chain = tuple(
                    resolve_lag_chain(day * m1, plan, depth=orders.annual_depth)
                )
            else:
                chain = ()
            key = (cls.is_normal, chain)
            pid = profile_key_to_id.get(key)
            if pid is None:
                pid = len(self.profiles)
                profile_key_to_id[key] = pid
                self.profiles.append(key)
            day_profile[day] = pid
            is_normal[day * m1 : (day + 1) * m1] = cls.is_normal
        self.day_profile = day_profile
        self.period_profile = np.repeat(day_profile, m1)
        self.is_normal = is_normal

    def coefficient_arrays(self, params: SarmaParams):
        """Flattened per-profile lag/coef arrays for the numba kernels."""
        m1, m2 = self.grid.periods_per_day, self.grid.periods_per_week
        ar_lags: list[np.ndarray] = []
        ar_coefs: list[np.ndarray] = []
        ma_lags: list[np.ndarray] = []
        ma_coefs: list[np.ndarray] = []
        ar_off = [0]
        ma_off = [0]
        for is_normal, chain in self.profiles:
            depth = len(chain)
            ar_map = _expand_side(
                params.ar, params.ar_day, params.ar_week,
                (params.eta_psi if is_normal else params.eta_theta)[:depth],
                chain, m1, m2, ar_side=True,
            )
            ma_map = _expand_side(
                params.ma, params.ma_day, params.ma_week,
                (params.eta_lambda if is_normal else params.eta_kappa)[:depth],
                chain, m1, m2, ar_side=False,
            )
            lags = np.fromiter(ar_map.keys(), dtype=np.int64, count=len(ar_map))
            order = np.argsort(lags, kind="stable")
            ar_lags.append(lags[order])
            ar_coefs.append(np.fromiter(ar_map.values(), dtype=float, count=len(ar_map))[order])
            lags = np.fromiter(ma_map.keys(), dtype=np.int64, count=len(ma_map))
            order = np.argsort(lags, kind="stable")
            ma_lags.append(lags[order])
            ma_coefs.append(np.fromiter(ma_map.values(), dtype=float, count=len(ma_map))[order])
            ar_off.append(ar_off[-1] + ar_lags[-1].size)
            ma_off.append(ma_off[-1] + ma_lags[-1].size)
        return (
            np.concatenate(ar_lags) if ar_lags else np.empty(0, np.int64),
            np.concatenate(ar_coefs) if ar_coefs else np.empty(0, float),
            np.asarray(ar_off, dtype=np.int64),
            np.concatenate(ma_lags) if ma_lags else np.empty(0, np.int64),
            np.concatenate(ma_coefs) if ma_coefs else np.empty(0, float),
            np.asarray(ma_off, dtype=np.int64),
        )


def _structure_for(
    orders: SarmaOrders,
    series_grid: SeasonalGrid,
    classifications: dict[dt.date, DayClassification],
    plan: AnnualLagPlan,
    n_days: int,
) -> _LagStructure:
    if plan.grid != series_grid:
        raise ValueError("lag plan grid differs from series grid")
    return _LagStructure(orders, series_grid, classifications, plan, n_days)


# ---------------------------------------------------------------------------
# residuals and likelihood


def residuals(
    params: SarmaParams,
    orders: SarmaOrders,
    series: LoadSeries,
    classifications: dict[dt.date, DayClassification],
    plan: AnnualLagPlan,
) -> ResidualSeries:
    """Innovations implied by ``params`` over the whole series."""
    params.validate(orders)
    structure = _structure_for(orders, series.grid, classifications, plan, series.n_days)
    eps = _residuals_with_structure(params, structure, series.values)
    return ResidualSeries(eps=eps, is_normal=structure.is_normal)


def _residuals_with_structure(
    params: SarmaParams, structure: _LagStructure, values: np.ndarray
) -> np.ndarray:
    arrays = structure.coefficient_arrays(params)
    ydev = values - params.c
    return filter_residuals(ydev, structure.period_profile, *arrays)


def loglik_from_residuals(
    eps: np.ndarray,
    is_normal: np.ndarray,
    sigma2_normal: float,
    sigma2_special: float,
    burn_in: int,
) -> float:
    """Dual-variance Gaussian log-likelihood over post-burn-in residuals."""
    if sigma2_normal <= 0 or sigma2_special <= 0:
        raise ValueError("variances must be positive")
    e = eps[burn_in:]
    mask = is_normal[burn_in:]
    n_n = int(mask.sum())
    n_s = e.size - n_n
    ll = 0.0
    if n_n:
        ll -= 0.5 * n_n * math.log(2.0 * math.pi * sigma2_normal)
        ll -= float(np.sum(e[mask] ** 2)) / (2.0 * sigma2_normal)
    if n_s:
        ll -= 0.5 * n_s * math.log(2.0 * math.pi * sigma2_special)
        ll -= float(np.sum(e[~mask] ** 2)) / (2.0 * sigma2_special)
    return ll


def likelihood_context(
    classifications: dict[dt.date, DayClassification],
    grid: SeasonalGrid,
    n: int,
    burn_in: int | None = None,
) -> LikelihoodContext:
    burn_in = default_burn_in(grid) if burn_in is None else burn_in
    m1 = grid.periods_per_day
    n_normal = 0
    for t in range(burn_in, n):
        date = grid.date_of(t)
        if classifications[date].is_normal:
            n_normal += 1
    return LikelihoodContext(
        n=n, burn_in=burn_in, n_normal=n_normal, n_special=n - burn_in - n_normal
    )


def _stationarity_violation(params: SarmaParams) -> float:
    """0 when every non-annual factor has roots beyond the guard circle and
    annual coefficients sit in [-1, 1]; otherwise the violation size."""
    violation = 0.0
    for coefs, ar_side in [
        (params.ar, True), (params.ar_day, True), (params.ar_week, True),
        (params.ma, False), (params.ma_day, False), (params.ma_week, False),
    ]:
        if not coefs:
            continue
        signs = -1.0 if ar_side else 1.0
        # polynomial 1 + sign*c1 z + ... in its own lag power
        poly = np.array([1.0] + [signs * c for c in coefs])[::-1]
        if abs(poly[0]) < 1e-300:
            poly = np.trim_zeros(poly, trim="f")
            if poly.size <= 1:
                continue
        roots = np.roots(poly)
        if roots.size:
            min_mod = float(np.min(np.abs(roots)))
            if min_mod <= _ROOT_GUARD:
                violation += _ROOT_GUARD - min_mod + 1e-6
    for etas in (params.eta_psi, params.eta_theta, params.eta_lambda, params.eta_kappa):
        for eta in etas:
            if abs(eta) > 1.0:
                violation += abs(eta) - 1.0
    return violation


def log_likelihood(
    params: SarmaParams,
    orders: SarmaOrders,
    series: LoadSeries,
    classifications: dict[dt.date, DayClassification],
    plan: AnnualLagPlan,
    burn_in: int | None = None,
) -> float:
    """Model log-likelihood; a large negative penalty outside the
    stationarity/invertibility guard."""
    burn_in = default_burn_in(series.grid) if burn_in is None else burn_in
    if len(series) <= burn_in:
        raise ValueError(f"series length {len(series)} does not exceed burn-in {burn_in}")
    violation = _stationarity_violation(params)
    if violation > 0.0:
        return -_PENALTY * (1.0 + violation)
    res = residuals(params, orders, series, classifications, plan)
    return loglik_from_residuals(
        res.eps, res.is_normal, params.sigma2_normal, params.sigma2_special, burn_in
    )


# ---------------------------------------------------------------------------
# estimation


def _param_layout(orders: SarmaOrders, with_special: bool) -> list[tuple[str, int]]:
    layout = [("c", 1), ("ar", orders.p), ("ar_day", orders.P1), ("ar_week", orders.P2),
              ("ma", orders.q), ("ma_day", orders.Q1), ("ma_week", orders.Q2),
              ("eta_psi", orders.annual_depth), ("eta_lambda", orders.annual_depth)]
    if with_special:
        layout.insert(8, ("eta_theta", orders.annual_depth))
        layout.append(("eta_kappa", orders.annual_depth))
    return [(name, size) for name, size in layout if size > 0]


def _unpack(vector: np.ndarray, layout: list[tuple[str, int]], base: SarmaParams) -> SarmaParams:
    params = base
    i = 0
    for name, size in layout:
        chunk = vector[i : i + size]
        i += size
        if name == "c":
            params = replace(params, c=float(chunk[0]))
        else:
            params = replace(params, **{name: tuple(float(x) for x in chunk)})
    return params


def fit(
    series: LoadSeries,
    classifications: dict[dt.date, DayClassification],
    plan: AnnualLagPlan,
    orders: SarmaOrders,
    init: SarmaParams | None = None,
    burn_in: int | None = None,
    xatol: float = 1e-5,
    fatol: float = 1e-8,
    max_iter: int | None = None,
    compute_stderr: bool = True,
) -> FitResult:
    """Maximum-likelihood estimation via the simplex search.

    Variances are profiled out: at every objective evaluation each regime's
    variance is set to its mean squared residual, which maximizes the
    likelihood exactly for the given coefficients.  Deterministic: repeated
    calls with identical inputs return identical parameters.
    """
    grid = series.grid
    burn_in = default_burn_in(grid) if burn_in is None else burn_in
    n = len(series)
    if n <= burn_in + grid.periods_per_week:
        raise FitError(
            f"series length {n} leaves no content after burn-in {burn_in}"
        )
    structure = _structure_for(orders, grid, classifications, plan, series.n_days)
    post_normal = structure.is_normal[burn_in:]
    has_special = bool((~post_normal).sum())
    layout = _param_layout(orders, with_special=has_special)

    depth = orders.annual_depth
    zeros = (0.0,) * depth
    base = SarmaParams(
        c=float(np.mean(series.values)),
        ar=(0.05,) * orders.p, ar_day=(0.05,) * orders.P1, ar_week=(0.05,) * orders.P2,
        ma=(0.05,) * orders.q, ma_day=(0.05,) * orders.Q1, ma_week=(0.05,) * orders.Q2,
        eta_psi=(0.05,) * depth, eta_lambda=(0.05,) * depth,
        eta_theta=(0.05,) * depth if has_special else zeros,
        eta_kappa=(0.05,) * depth if has_special else zeros,
    )
    if init is not None:
        base = replace(
            init,
            eta_theta=init.eta_theta if has_special else zeros,
            eta_kappa=init.eta_kappa if has_special else zeros,
        )

    start: list[float] = []
    steps: list[float] = []
    for name, size in layout:
        if name == "c":
            start.append(base.c)
            steps.append(max(0.05 * abs(base.c), 1.0))
        else:
            start.extend(getattr(base, name))
            steps.extend([0.1] * size)

    values = series.values
    mask_special = ~post_normal

    def objective(vector: np.ndarray) -> float:
        params = _unpack(vector, layout, base)
        violation = _stationarity_violation(params)
        if violation > 0.0:
            return _PENALTY * (1.0 + violation)
        eps = _residuals_with_structure(params, structure, values)
        post = eps[burn_in:]
        s2n = max(float(np.mean(post[post_normal] ** 2)), _VAR_FLOOR) if post_normal.any() else 1.0
        s2s = max(float(np.mean(post[mask_special] ** 2)), _VAR_FLOOR) if has_special else 1.0
        return -loglik_from_residuals(eps, structure.is_normal, s2n, s2s, burn_in)

    result = nelder_mead_minimize(
        objective, start, xatol=xatol, fatol=fatol, max_iter=max_iter,
        initial_step=np.asarray(steps),
    )
    if result.fun >= _PENALTY:
        raise FitError(
            "optimizer stuck in the stationarity penalty region "
            f"(best objective {result.fun:.3g} after {result.n_eval} evaluations)"
        )

    best = _unpack(result.x, layout, base)
    eps = _residuals_with_structure(best, structure, values)
    post = eps[burn_in:]
    s2n = max(float(np.mean(post[post_normal] ** 2)), _VAR_FLOOR) if post_normal.any() else 1.0
    s2s = max(float(np.mean(post[mask_special] ** 2)), _VAR_FLOOR) if has_special else s2n
    best = replace(best, sigma2_normal=s2n, sigma2_special=s2s)

    stderr: dict[str, tuple[float, ...]] = {}
    if compute_stderr:
        stderr = _stderr_from_hessian(objective, result.x, layout)
    return FitResult(
        params=best,
        loglik=-result.fun,
        n_eval=result.n_eval,
        converged=result.converged,
        stderr=stderr,
    )


def _stderr_from_hessian(
    objective, x: np.ndarray, layout: list[tuple[str, int]]
) -> dict[str, tuple[float, ...]]:
    """Standard errors from the numerical Hessian of the negative
    log-likelihood (observed information)."""
    d = x.size
    h = np.maximum(1e-4, 1e-4 * np.abs(x))
    hess = np.empty((d, d))
    f0 = objective(x)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h[i]
        fpp = objective(x + ei)
        fmm = objective(x - ei)
        hess[i, i] = (fpp - 2.0 * f0 + fmm) / (h[i] ** 2)
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = h[j]
            f1 = objective(x + ei + ej)
            f2 = objective(x + ei - ej)
            f3 = objective(x - ei + ej)
            f4 = objective(x - ei - ej)
            hess[i, j] = hess[j, i] = (f1 - f2 - f3 + f4) / (4.0 * h[i] * h[j])
    try:
        cov = np.linalg.inv(hess)
        diag = np.diag(cov)
        se = np.sqrt(np.where(diag > 0, diag, np.nan))
    except np.linalg.LinAlgError:
        se = np.full(d, np.nan)
    out: dict[str, tuple[float, ...]] = {}
    i = 0
    for name, size in layout:
        out[name] = tuple(float(v) for v in se[i : i + size])
        i += size
    return out


# ---------------------------------------------------------------------------
# simulation and forecasting


def simulate(
    params: SarmaParams,
    orders: SarmaOrders,
    grid: SeasonalGrid,
    classifications: dict[dt.date, DayClassification],
    plan: AnnualLagPlan,
    n_periods: int,
    seed: int | None = None,
    innovations: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw (or apply) innovations and run the recursion forward.

    Returns (values, innovations).  Innovation variance follows the regime
    of each period when drawn from ``seed``.
    """
    params.validate(orders)
    if n_periods % grid.periods_per_day:
        raise ValueError("n_periods must be a whole number of days")
    structure = _LagStructure(orders, grid, classifications, plan, n_periods // grid.periods_per_day)
    if innovations is None:
        if seed is None:
            raise ValueError("need a seed or explicit innovations")
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        scale = np.where(
            structure.is_normal,
            math.sqrt(params.sigma2_normal),
            math.sqrt(params.sigma2_special),
        )
        innovations = rng.standard_normal(n_periods) * scale
    else:
        innovations = np.asarray(innovations, dtype=float)
        if innovations.size != n_periods:
            raise ValueError("innovations length mismatch")
    arrays = structure.coefficient_arrays(params)
    ydev = simulate_series(innovations, structure.period_profile, *arrays)
    return params.c + ydev, innovations


def _forecast_setup(
    params: SarmaParams,
    orders: SarmaOrders,
    series: LoadSeries,
    classifications: dict[dt.date, DayClassification],
    plan: AnnualLagPlan,
    origin: int,
    horizon: int,
):
    params.validate(orders)
    grid = series.grid
    m1 = grid.periods_per_day
    if not 1 <= horizon <= m1:
        raise ValueError(f"horizon {horizon} outside 1..{m1}")
    if not 0 <= origin < len(series):
        raise IndexError(f"origin {origin} outside series")
    last_target_day = (origin + horizon) // m1
    for day in range(last_target_day + 1):
        date = grid.series_start + dt.timedelta(days=day)
        if not plan.covers(date) or date not in classifications:
            raise IndexError(f"lag plan/classifications do not cover target day {date}")
    structure = _LagStructure(
        orders, grid, classifications, plan, last_target_day + 1
    )
    arrays = structure.coefficient_arrays(params)
    n_ext = origin + 1 + horizon
    ydev = np.zeros(n_ext)
    ydev[: origin + 1] = series.values[: origin + 1] - params.c
    eps_hist = filter_residuals(
        ydev[: origin + 1], structure.period_profile[: origin + 1], *arrays
    )
    eps = np.zeros(n_ext)
    eps[: origin + 1] = eps_hist
    return structure, arrays, ydev, eps


def forecast_point(
    params: SarmaParams,
    orders: SarmaOrders,
    series: LoadSeries,
    classifications: dict[dt.date, DayClassification],
    plan: AnnualLagPlan,
    origin: int,
    horizon: int,
) -> ForecastSet:
    """Iterated conditional-expectation forecast for horizons 1..horizon.

    Future innovations are set to zero and future observations replaced by
    their own forecasts; each target period uses its own day's regime and
    annual lags.
    """
    structure, arrays, ydev, eps = _forecast_setup(
        params, orders, series, classifications, plan, origin, horizon
    )
    extend_forecast(ydev, eps, origin, horizon, structure.period_profile, *arrays)
    return ForecastSet(origin=origin, point=params.c + ydev[origin + 1 :])


def forecast_density(
    params: SarmaParams,
    orders: SarmaOrders,
    series: LoadSeries,
    classifications: dict[dt.date, DayClassification],
    plan: AnnualLagPlan,
    origin: int,
    horizon: int,
    n_sims: int,
    seed: int,
) -> ForecastSet:
    """Monte Carlo forecast: ``n_sims`` paths with Gaussian innovations whose
    variance follows each target period's regime.

    Every path draws from an independent substream keyed by (seed, origin,
    path index), so results do not depend on evaluation order.
    """
    if n_sims < 1:
        raise ValueError("n_sims must be >= 1")
    structure, arrays, ydev, eps = _forecast_setup(
        params, orders, series, classifications, plan, origin, horizon
    )
    extend_forecast(ydev, eps, origin, horizon, structure.period_profile, *arrays)
    point = params.c + ydev[origin + 1 :].copy()

    future_normal = structure.is_normal[origin + 1 : origin + 1 + horizon]
    scale = np.where(
        future_normal, math.sqrt(params.sigma2_normal), math.sqrt(params.sigma2_special)
    )
    root = np.random.SeedSequence(entropy=seed, spawn_key=(origin,))
    children = root.spawn(n_sims)
    ensemble = np.empty((horizon, n_sims))
    ydev_sim = np.empty_like(ydev)
    eps_sim = np.empty_like(eps)
    for k in range(n_sims):
        rng = np.random.Generator(np.random.PCG64(children[k]))
        ydev_sim[:] = ydev
        eps_sim[:] = eps
        eps_sim[origin + 1 :] = rng.standard_normal(horizon) * scale
        extend_forecast(ydev_sim, eps_sim, origin, horizon, structure.period_profile, *arrays)
        ensemble[:, k] = params.c + ydev_sim[origin + 1 :]
    return ForecastSet(origin=origin, point=point, ensemble=ensemble)


# ---------------------------------------------------------------------------
# identification diagnostics


def acf(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Sample autocorrelations for lags 0..max_lag."""
    x = np.asarray(x, dtype=float)
    if x.size <= max_lag:
        raise ValueError("series shorter than max_lag")
    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    if denom == 0.0:
        raise ValueError("autocorrelation undefined for a constant series")
    return np.array(
        [1.0] + [float(np.dot(xc[:-k], xc[k:])) / denom for k in range(1, max_lag + 1)]
    )


def pacf(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Partial autocorrelations for lags 0..max_lag via Durbin-Levinson."""
    r = acf(x, max_lag)
    out = np.zeros(max_lag + 1)
    out[0] = 1.0
    phi_prev = np.zeros(max_lag + 1)
    for k in range(1, max_lag + 1):
        if k == 1:
            phi_kk = r[1]
        else:
            num = r[k] - float(np.dot(phi_prev[1:k], r[k - 1 : 0 : -1]))
            den = 1.0 - float(np.dot(phi_prev[1:k], r[1:k]))
            phi_kk = num / den if den != 0.0 else 0.0
        phi = phi_prev.copy()
        phi[k] = phi_kk
        for j in range(1, k):
            phi[j] = phi_prev[j] - phi_kk * phi_prev[k - j]
        phi_prev = phi
        out[k] = phi_kk
    return out


def acf_pacf(x: np.ndarray, max_lag: int) -> tuple[np.ndarray, np.ndarray]:
    return acf(x, max_lag), pacf(x, max_lag)


# ---------------------------------------------------------------------------
# persistence


def params_to_doc(
    params: SarmaParams,
    orders: SarmaOrders,
    grid: SeasonalGrid,
    model: str,
    train_series: LoadSeries | None = None,
    train_end: int | None = None,
    extra: dict | None = None,
) -> dict:
    """Self-describing parameter document (JSON-serializable)."""
    doc = {
        "format": "loadcast-params-v1",
        "model": model,
        "grid": {
            "periods_per_day": grid.periods_per_day,
            "series_start": grid.series_start.isoformat(),
        },
        "orders": {
            "p": orders.p, "q": orders.q, "P1": orders.P1, "Q1": orders.Q1,
            "P2": orders.P2, "Q2": orders.Q2, "annual_depth": orders.annual_depth,
        },
        "params": {
            "c": params.c,
            "ar": list(params.ar), "ar_day": list(params.ar_day), "ar_week": list(params.ar_week),
            "ma": list(params.ma), "ma_day": list(params.ma_day), "ma_week": list(params.ma_week),
            "eta_psi": list(params.eta_psi), "eta_theta": list(params.eta_theta),
            "eta_lambda": list(params.eta_lambda), "eta_kappa": list(params.eta_kappa),
            "sigma2_normal": params.sigma2_normal,
            "sigma2_special": params.sigma2_special,
        },
    }
    if train_series is not None:
        end = len(train_series) if train_end is None else train_end
        doc["train_window"] = {"start": 0, "end": end, "hash": series_hash(train_series, 0, end)}
    if extra:
        doc.update(extra)
    return doc


def params_from_doc(doc: dict) -> tuple[SarmaParams, SarmaOrders, SeasonalGrid, str]:
    if doc.get("format") != "loadcast-params-v1":
        raise ValueError(f"unknown parameter document format {doc.get('format')!r}")
    o = doc["orders"]
    orders = SarmaOrders(
        p=o["p"], q=o["q"], P1=o["P1"], Q1=o["Q1"], P2=o["P2"], Q2=o["Q2"],
        annual_depth=o["annual_depth"],
    )
    p = doc["params"]
    params = SarmaParams(
        c=p["c"],
        ar=tuple(p["ar"]), ar_day=tuple(p["ar_day"]), ar_week=tuple(p["ar_week"]),
        ma=tuple(p["ma"]), ma_day=tuple(p["ma_day"]), ma_week=tuple(p["ma_week"]),
        eta_psi=tuple(p["eta_psi"]), eta_theta=tuple(p["eta_theta"]),
        eta_lambda=tuple(p["eta_lambda"]), eta_kappa=tuple(p["eta_kappa"]),
        sigma2_normal=p["sigma2_normal"], sigma2_special=p["sigma2_special"],
    )
    grid = SeasonalGrid(
        periods_per_day=doc["grid"]["periods_per_day"],
        series_start=dt.date.fromisoformat(doc["grid"]["series_start"]),
    )
    return params, orders, grid, doc["model"]


def write_params(doc: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_params(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
