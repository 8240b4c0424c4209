"""Discrete observability-controllability duality check."""

from __future__ import annotations

import numpy as np

from pseudolab.grid import ScalarField, SpaceTimeField, inner_product
from pseudolab.pde.coefficients import BBMCoefficients
from pseudolab.pde.solvers import Equation, control_source, get_stepper


def duality_terms(
    z0: ScalarField,
    v: SpaceTimeField,
    chi: SpaceTimeField | None,
    psi_T: ScalarField,
    which: Equation,
    coefficients: BBMCoefficients | None = None,
) -> tuple[complex, complex, complex]:
    """``(<z(T), psi_T>, <z0, psi(0)>, int int v chi psi)`` from the discrete solvers."""
    stepper = get_stepper(which, v.grid, v.time, coefficients)
    source = control_source(v, chi)
    z, _ = stepper.forward(z0.flat, source)
    psi, mu = stepper.backward(psi_T.flat)
    observed = stepper.observed(mu)

    grid, time = v.grid, v.time
    final = inner_product(ScalarField(grid=grid, values=z[-1]), psi_T)
    initial = inner_product(z0, ScalarField(grid=grid, values=psi[0]))
    coupling = inner_product(SpaceTimeField(grid=grid, time=time, values=source), SpaceTimeField(grid=grid, time=time, values=observed))
    return complex(final), complex(initial), complex(coupling)


def duality_residual(
    z0: ScalarField,
    v: SpaceTimeField,
    chi: SpaceTimeField | None,
    psi_T: ScalarField,
    which: Equation,
    coefficients: BBMCoefficients | None = None,
) -> float:
    """``|<psi(0), z0> + int int v chi psi - <psi_T, z(T)>|`` relative to the largest term.

    Returns 0 when every term vanishes.
    """
    final, initial, coupling = duality_terms(z0, v, chi, psi_T, which, coefficients)
    scale = max(abs(final), abs(initial), abs(coupling))
    if scale == 0.0:
        return 0.0
    return float(np.abs(initial + coupling - final) / scale)
