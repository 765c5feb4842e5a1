"""Sampling and derivative-free minimization over the positive orthant.

Points are drawn log-uniformly from [1e-3, 1e3] per coordinate, and local
minimization runs Nelder-Mead simplex descent in log coordinates, which
keeps every probe inside the open orthant without penalty hacks.
Convergence: simplex diameter below 1e-9 or 1e4 evaluations.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

LOG_LO = math.log(1e-3)
LOG_HI = math.log(1e3)
SIMPLEX_XATOL = 1e-9
MAX_EVALUATIONS = 10_000


def log_uniform_points(rng: np.random.Generator, k: int, count: int,
                       lo: float = 1e-3, hi: float = 1e3) -> np.ndarray:
    """count x k array of positive points, log-uniform per coordinate."""
    u = rng.uniform(math.log(lo), math.log(hi), size=(count, k))
    return np.exp(u)


def poly_float_arrays(poly):
    """(coefficients, exponent matrix) for vectorized evaluation."""
    terms = poly.sorted_terms()
    k = len(poly.context)
    if not terms:
        return np.zeros(0), np.zeros((0, k))
    coeffs = np.array([float(c) for _, c in terms])
    expo = np.array([m for m, _ in terms], dtype=float)
    return coeffs, expo


def eval_poly_batch(coeffs: np.ndarray, expo: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial at many strictly positive points at once."""
    if coeffs.size == 0:
        return np.zeros(len(points))
    logs = np.log(points)
    return np.exp(logs @ expo.T) @ coeffs


def nelder_mead_positive(func, start, xatol: float = SIMPLEX_XATOL,
                         maxfev: int = MAX_EVALUATIONS):
    """Minimize func over the open positive orthant from a positive start.

    Returns (point, value, evaluations).
    """
    u0 = np.log(np.asarray(start, dtype=float))

    def in_logs(u):
        try:
            return float(func(np.exp(u)))
        except (OverflowError, ZeroDivisionError):
            return math.inf

    res = _scipy_minimize(
        in_logs,
        u0,
        method="Nelder-Mead",
        options={"xatol": xatol, "fatol": 1e-15, "maxfev": maxfev},
    )
    point = np.exp(res.x)
    return point, float(res.fun), int(res.nfev)
