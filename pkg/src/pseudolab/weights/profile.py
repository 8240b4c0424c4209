"""The time profile r(t) of the Carleman weights."""

from __future__ import annotations

import numpy as np

from pseudolab.grid import TimeGrid


def _bridge(u: np.ndarray, k: float) -> np.ndarray:
    """Quintic Hermite bridge from 1/t at t = tau/2 to the constant 1 at t = tau.

    ``u`` runs over [0, 1] and ``k = 2 / tau``; value and first two derivatives
    match at both ends, and the derivative is (1-u)^2 (u^2 (30 - 20k) - k) < 0
    for k >= 3/2.
    """
    h0 = 1.0 - 10.0 * u**3 + 15.0 * u**4 - 6.0 * u**5
    q = -u + u**2 + 3.0 * u**3 - 5.0 * u**4 + 2.0 * u**5
    return 1.0 + (k - 1.0) * h0 + k * q


def _half_profile(t: np.ndarray, tau: float) -> np.ndarray:
    out = np.ones_like(t)
    head = t <= 0.5 * tau
    middle = (t > 0.5 * tau) & (t < tau)
    out[head] = 1.0 / t[head]
    out[middle] = _bridge((t[middle] - 0.5 * tau) / (0.5 * tau), 2.0 / tau)
    return out


def _check_margin(tau: float, horizon: float) -> None:
    if not 0.0 < tau < min(1.0, 0.5 * horizon):
        raise ValueError(f"tau_margin must lie in (0, min(1, T/2)), got {tau} with T={horizon}")


def r_profile(t: np.ndarray | float, tau: float, horizon: float) -> np.ndarray | float:
    """1/t near 0, 1 in the middle, mirrored about T/2.

    Raises:
        ValueError: If any ``t`` is outside (0, T) or ``tau`` is out of range.
    """
    _check_margin(tau, horizon)
    array = np.asarray(t, dtype=float)
    if np.any((array <= 0.0) | (array >= horizon)):
        raise ValueError(f"r is defined on the open interval (0, {horizon})")
    out = _half_profile(np.minimum(array, horizon - array).reshape(-1), tau).reshape(array.shape)
    return float(out) if out.ndim == 0 else out


def r_on_time_grid(time: TimeGrid, tau: float) -> np.ndarray:
    """r at every time node; the endpoint values are +inf."""
    _check_margin(tau, time.horizon)
    out = np.full(time.count, np.inf)
    out[1:-1] = r_profile(time.nodes[1:-1], tau, time.horizon)
    return out
