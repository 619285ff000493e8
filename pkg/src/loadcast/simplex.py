"""Nelder-Mead simplex minimizer.

Standard coefficients (reflection 1, expansion 2, contraction 0.5,
shrink 0.5) with the usual right-angled initial simplex.  Deterministic:
identical inputs walk an identical simplex path.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = ["SimplexResult", "nelder_mead_minimize"]

_REFLECT = 1.0
_EXPAND = 2.0
_CONTRACT = 0.5
_SHRINK = 0.5


@dataclass
class SimplexResult:
    x: np.ndarray
    fun: float
    n_iter: int
    n_eval: int
    converged: bool


def nelder_mead_minimize(
    objective: Callable[[np.ndarray], float],
    start: Sequence[float],
    xatol: float = 1e-6,
    fatol: float = 1e-9,
    max_iter: int | None = None,
    initial_step: float | Sequence[float] = 0.05,
) -> SimplexResult:
    """Minimize ``objective`` from ``start``.

    Terminates when both the simplex spread (max coordinate distance from
    the best vertex) and the value spread fall below the tolerances, or
    after ``max_iter`` iterations (default ``400 * dim``).  The objective
    must be finite at the start point.  ``initial_step`` is relative to
    each coordinate when scalar, or an absolute per-dimension step when
    given as a sequence.
    """
    x0 = np.asarray(start, dtype=float)
    n = x0.size
    if max_iter is None:
        max_iter = 400 * max(n, 1)

    f0 = float(objective(x0))
    if not np.isfinite(f0):
        raise ValueError("objective not finite at the start point")

    if np.isscalar(initial_step):
        rel = float(initial_step)
        steps = np.array(
            [rel * abs(x) if x != 0.0 else rel * 0.5 for x in x0]
        )
    else:
        steps = np.asarray(initial_step, dtype=float)
        if steps.shape != x0.shape:
            raise ValueError("initial_step length must match start length")

    # right-angled initial simplex: perturb each coordinate in turn
    simplex = np.tile(x0, (n + 1, 1))
    values = np.empty(n + 1)
    values[0] = f0
    for i in range(n):
        simplex[i + 1, i] += steps[i]
        values[i + 1] = objective(simplex[i + 1])
    n_eval = n + 1

    def sort() -> None:
        order = np.argsort(values, kind="stable")
        simplex[:] = simplex[order]
        values[:] = values[order]

    sort()
    n_iter = 0
    converged = False
    while n_iter < max_iter:
        x_spread = np.max(np.abs(simplex[1:] - simplex[0])) if n else 0.0
        f_spread = float(values[-1] - values[0])
        if x_spread <= xatol and f_spread <= fatol:
            converged = True
            break
        n_iter += 1

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = centroid + _REFLECT * (centroid - worst)
        f_ref = float(objective(reflected))
        n_eval += 1

        if f_ref < values[0]:
            expanded = centroid + _EXPAND * (centroid - worst)
            f_exp = float(objective(expanded))
            n_eval += 1
            if f_exp < f_ref:
                simplex[-1], values[-1] = expanded, f_exp
            else:
                simplex[-1], values[-1] = reflected, f_ref
        elif f_ref < values[-2]:
            simplex[-1], values[-1] = reflected, f_ref
        else:
            if f_ref < values[-1]:  # outside contraction
                contracted = centroid + _CONTRACT * (reflected - centroid)
            else:  # inside contraction
                contracted = centroid - _CONTRACT * (centroid - worst)
            f_con = float(objective(contracted))
            n_eval += 1
            if f_con < min(f_ref, values[-1]):
                simplex[-1], values[-1] = contracted, f_con
            else:  # shrink toward the best vertex
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + _SHRINK * (simplex[i] - simplex[0])
                    values[i] = objective(simplex[i])
                n_eval += n
        sort()

    return SimplexResult(
        x=simplex[0].copy(),
        fun=float(values[0]),
        n_iter=n_iter,
        n_eval=n_eval,
        converged=converged,
    )
