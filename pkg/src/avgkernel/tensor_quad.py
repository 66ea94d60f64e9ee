"""1D and tensor-product 2D quadrature plus the order-by-order series.

Only square 2D rules (the same order on both axes) are supported.  The
summation order is fixed so repeated runs are bitwise identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rules import ConvergenceError, QuadratureRule, load_or_compute_rule


class IntegrandError(ArithmeticError):
    """The integrand returned a non-finite value at a quadrature node."""


@dataclass(frozen=True)
class ConvergenceSeries:
    """Q_{k,k} for k = 1..k_max, all finite, orders contiguous from 1."""

    orders: list[int]
    values: list[float]
    integrand_id: str


def _eval_on(f, x, y=None):
    """Evaluate f over node arrays, falling back to scalar calls."""
    shape = x.shape
    try:
        vals = f(x) if y is None else f(x, y)
        arr = np.asarray(vals, dtype=float)
        if arr.shape != shape:
            arr = np.broadcast_to(arr, shape)
        return arr
    except (TypeError, ValueError):
        pass
    arr = np.empty(shape)
    flat_x = x.ravel()
    out = arr.ravel()
    if y is None:
        for idx in range(flat_x.size):
            out[idx] = f(float(flat_x[idx]))
    else:
        flat_y = y.ravel()
        for idx in range(flat_x.size):
            out[idx] = f(float(flat_x[idx]), float(flat_y[idx]))
    return arr


def integrate_1d(rule: QuadratureRule, f) -> float:
    """Apply the rule to f: approximates integral of e^{-x} f(x) over [0, inf)."""
    vals = _eval_on(f, rule.nodes)
    bad = np.flatnonzero(~np.isfinite(vals))
    if bad.size:
        i = int(bad[0])
        raise IntegrandError(
            f"integrand is {vals[i]} at node {i + 1} (x = {float(rule.nodes[i])!r})"
        )
    return float(np.dot(rule.weights, vals))


def integrate_2d(rule: QuadratureRule, f) -> float:
    """Tensor-product double sum sum_i sum_j A_i A_j f(x_i, x_j)."""
    x = rule.nodes[:, None]
    y = rule.nodes[None, :]
    vals = _eval_on(f, np.broadcast_to(x, (rule.order, rule.order)),
                    np.broadcast_to(y, (rule.order, rule.order)))
    if not np.all(np.isfinite(vals)):
        i, j = np.argwhere(~np.isfinite(vals))[0]
        raise IntegrandError(
            f"integrand is {vals[i, j]} at node pair ({i + 1}, {j + 1})"
            f" (x = {float(rule.nodes[i])!r}, y = {float(rule.nodes[j])!r})"
        )
    weighted = np.outer(rule.weights, rule.weights) * vals
    return float(np.sum(weighted))


def convergence_series(f, k_max: int, cache_dir=None,
                       integrand_id: str = "integrand") -> ConvergenceSeries:
    """Q_{k,k} for every k in 1..k_max using cached rules."""
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    orders = []
    values = []
    for k in range(1, k_max + 1):
        try:
            rule = load_or_compute_rule(k, cache_dir)
            q = integrate_2d(rule, f)
        except IntegrandError as exc:
            raise IntegrandError(f"order {k}: {exc}") from exc
        except ConvergenceError as exc:
            raise ConvergenceError(f"order {k}: {exc}") from exc
        if not math.isfinite(q):
            raise IntegrandError(f"order {k}: quadrature value is {q}")
        orders.append(k)
        values.append(q)
    return ConvergenceSeries(orders, values, integrand_id)
