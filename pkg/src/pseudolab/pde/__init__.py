"""Forward and adjoint solvers for the BZK and BBM equations."""

from pseudolab.pde.coefficients import BBMCoefficients
from pseudolab.pde.duality import duality_residual, duality_terms
from pseudolab.pde.solvers import (
    AdjointResult,
    Equation,
    EvolutionResult,
    control_source,
    get_stepper,
    initial_state_from_y0,
    solve_adjoint,
    solve_bbm_adjoint,
    solve_bbm_forward,
    solve_bzk_adjoint,
    solve_bzk_forward,
    solve_forward,
)
from pseudolab.pde.stepper import BBMStepper, BZKStepper, PseudoParabolicStepper, bbm_stepper, bzk_stepper

__all__ = [
    "AdjointResult",
    "BBMCoefficients",
    "BBMStepper",
    "BZKStepper",
    "Equation",
    "EvolutionResult",
    "PseudoParabolicStepper",
    "bbm_stepper",
    "bzk_stepper",
    "control_source",
    "duality_residual",
    "duality_terms",
    "get_stepper",
    "initial_state_from_y0",
    "solve_adjoint",
    "solve_bbm_adjoint",
    "solve_bbm_forward",
    "solve_bzk_adjoint",
    "solve_bzk_forward",
    "solve_forward",
]
