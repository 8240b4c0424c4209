"""Carleman weight family gamma, alpha, xi and their per-slice extremes."""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from pseudolab.weights.eta import EtaField

# Inflation of max |eta| where it enters the exponent
SUP_INFLATION = 1.05

KernelKind = Literal["alpha", "alpha_star", "mixed"]


class WeightSet(BaseModel):
    """Sampled weights for fixed (lambda, s).

    Exponential kernels are reported up to the common factor exp(-2 s alpha_min),
    with alpha_min the smallest finite alpha; ratios of Carleman terms are
    unaffected and nothing underflows. Slices where r is infinite (t = 0 and
    t = T) have vanishing kernels.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    eta: EtaField
    r: np.ndarray = Field(description="r at every time node (+inf at the endpoints)")
    lam: float = Field(ge=0, description="lambda")
    s: float = Field(gt=0)
    tau_margin: float
    eta_sup: float = Field(description="Inflated max |eta| used in the exponent")
    gamma: np.ndarray
    alpha: np.ndarray
    xi: np.ndarray
    alpha_star: np.ndarray = Field(description="Per-slice max of alpha")
    xi_star: np.ndarray = Field(description="Per-slice min of xi")

    @property
    def exponent_factor(self) -> float:
        """exp(2 lambda ||eta||) with the inflated sup norm."""
        return float(np.exp(2.0 * self.lam * self.eta_sup))

    @property
    def finite_slices(self) -> np.ndarray:
        return np.isfinite(self.r)

    @property
    def alpha_min(self) -> float:
        return float(np.min(self.alpha[self.finite_slices]))

    def with_s(self, s: float) -> WeightSet:
        return self.model_copy(update={"s": s})

    def _slice_shape(self, values: np.ndarray) -> np.ndarray:
        return values.reshape((-1,) + (1,) * self.eta.grid.dim)

    def kernel(self, kind: KernelKind = "alpha") -> np.ndarray:
        """Normalized exponential kernel on the space-time grid.

        ``alpha``: exp(-2 s alpha); ``alpha_star``: exp(-2 s alpha*);
        ``mixed``: exp(-4 s alpha + 2 s alpha*).
        """
        finite = self.finite_slices
        alpha = np.where(self._slice_shape(finite), self.alpha, 0.0)
        star = self._slice_shape(np.where(finite, self.alpha_star, 0.0))
        if kind == "alpha":
            exponent = alpha - self.alpha_min
        elif kind == "alpha_star":
            exponent = np.broadcast_to(star, alpha.shape) - self.alpha_min
        elif kind == "mixed":
            exponent = 2.0 * alpha - star - self.alpha_min
        else:
            raise ValueError(f"unknown kernel kind {kind!r}")
        out = np.exp(-2.0 * self.s * exponent)
        return np.where(self._slice_shape(finite), out, 0.0)

    def weighted(self, xi_power: int, kind: KernelKind = "alpha", star: bool = False) -> np.ndarray:
        """``xi**p * kernel`` (``xi*`` when ``star``), zero on the endpoint slices."""
        finite = self._slice_shape(self.finite_slices)
        xi = self._slice_shape(self.xi_star) if star else self.xi
        base = np.where(finite, np.broadcast_to(xi, self.alpha.shape), 0.0)
        return base**xi_power * self.kernel(kind)


def assemble_weights(eta: EtaField, r: np.ndarray, lam: float, s: float, tau_margin: float) -> WeightSet:
    """Evaluate gamma = exp(lambda eta), alpha = r (exp(2 lambda |eta|) - gamma), xi = r gamma pointwise."""
    r = np.asarray(r, dtype=float)
    if r.shape != (eta.time.count,):
        raise ValueError(f"r has shape {r.shape}, expected ({eta.time.count},)")
    if lam < 0 or s <= 0:
        raise ValueError(f"need lambda >= 0 and s > 0, got lambda={lam}, s={s}")
    eta_sup = SUP_INFLATION * eta.sup_norm()
    shape = (-1,) + (1,) * eta.grid.dim
    r_b = r.reshape(shape)
    gamma = np.exp(lam * eta.values)
    with np.errstate(invalid="ignore"):
        alpha = r_b * (np.exp(2.0 * lam * eta_sup) - gamma)
        xi = r_b * gamma
    axes = tuple(range(1, eta.grid.dim + 1))
    return WeightSet(
        eta=eta,
        r=r,
        lam=lam,
        s=s,
        tau_margin=tau_margin,
        eta_sup=eta_sup,
        gamma=gamma,
        alpha=alpha,
        xi=xi,
        alpha_star=alpha.max(axis=axes),
        xi_star=xi.min(axis=axes),
    )
