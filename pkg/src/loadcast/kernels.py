"""Numba kernels for the sequential ARMA-style recursions.

Lag structures vary per period (regime switching, calendar-dependent annual
lags), so each period carries a profile id selecting rows in flattened
(lag, coefficient) arrays.  Pre-sample values are zero by convention: the
series is centered before filtering and innovations start at zero.
"""
from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["filter_residuals", "simulate_series", "extend_forecast"]


@njit(cache=True)
def filter_residuals(ydev, profile_ids, ar_lags, ar_coefs, ar_off, ma_lags, ma_coefs, ma_off):
    """eps[t] = sum_ar a_l * ydev[t-l] - sum_{ma l>0} b_l * eps[t-l]."""
    n = ydev.shape[0]
    eps = np.zeros(n)
    for t in range(n):
        p = profile_ids[t]
        acc = 0.0
        for j in range(ar_off[p], ar_off[p + 1]):
            lag = ar_lags[j]
            if t - lag >= 0:
                acc += ar_coefs[j] * ydev[t - lag]
        for j in range(ma_off[p], ma_off[p + 1]):
            lag = ma_lags[j]
            if lag > 0 and t - lag >= 0:
                acc -= ma_coefs[j] * eps[t - lag]
        eps[t] = acc
    return eps


@njit(cache=True)
def simulate_series(eps, profile_ids, ar_lags, ar_coefs, ar_off, ma_lags, ma_coefs, ma_off):
    """Inverse of filter_residuals: rebuild ydev from given innovations."""
    n = eps.shape[0]
    ydev = np.zeros(n)
    for t in range(n):
        p = profile_ids[t]
        acc = 0.0
        for j in range(ma_off[p], ma_off[p + 1]):
            lag = ma_lags[j]
            if t - lag >= 0:
                acc += ma_coefs[j] * eps[t - lag]
        for j in range(ar_off[p], ar_off[p + 1]):
            lag = ar_lags[j]
            if lag > 0 and t - lag >= 0:
                acc -= ar_coefs[j] * ydev[t - lag]
        ydev[t] = acc
    return ydev


@njit(cache=True)
def extend_forecast(ydev, eps, t0, horizon, profile_ids,
                    ar_lags, ar_coefs, ar_off, ma_lags, ma_coefs, ma_off):
    """Continue the recursion past t0 in place.

    ``ydev`` and ``eps`` must have length > t0 + horizon with history filled
    through t0; future entries of ``eps`` hold the innovations to apply
    (zero for a conditional-mean forecast, draws for a simulated path).
    """
    for t in range(t0 + 1, t0 + 1 + horizon):
        p = profile_ids[t]
        acc = 0.0
        for j in range(ma_off[p], ma_off[p + 1]):
            lag = ma_lags[j]
            if t - lag >= 0:
                acc += ma_coefs[j] * eps[t - lag]
        for j in range(ar_off[p], ar_off[p + 1]):
            lag = ar_lags[j]
            if lag > 0 and t - lag >= 0:
                acc -= ar_coefs[j] * ydev[t - lag]
        ydev[t] = acc
