"""One runner per experiment family; each writes its CSV files and returns their paths."""

from __future__ import annotations

import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np

from pseudolab.beams import BZKBeamParams, WKBBeamParams, bbm_beam_sweep, bzk_beam_sweep
from pseudolab.carleman import (
    appendix_identity_check,
    claim_threshold_scan,
    energy_identity_check,
    eval_elliptic_carleman,
    eval_global_carleman,
    eval_h1_carleman,
    eval_ode_carleman,
    identity_refinement,
    run_carleman_suites,
    horizon_scaled_s,
)
from pseudolab.config import ExperimentConfig, Family
from pseudolab.control import GrowthBound, HUMProblem, dichotomy_diagnostic, solve_null_control
from pseudolab.exceptions import CertificationError
from pseudolab.experiments.tables import emit_csv
from pseudolab.flow import BoxRegion, FlowMap, MovingRegion, check_assumption, static_region
from pseudolab.grid import ScalarField, SpaceTimeField, SpatialGrid, TimeGrid
from pseudolab.pde import BBMCoefficients, Equation
from pseudolab.weights import WeightSet, assemble_weights, build_eta_sweep_1d, certify, check_weight_properties, r_on_time_grid

logger = logging.getLogger(__name__)

FamilyRunner = Callable[[ExperimentConfig, Path], list[Path]]


def _sine(points: np.ndarray, lower: float, upper: float) -> np.ndarray:
    return np.sin(np.pi * (points[:, 0] - lower) / (upper - lower))


def _first_mode(grid: SpatialGrid) -> ScalarField:
    lower, upper = grid.bounds[0]
    return ScalarField.from_function(grid, lambda x: _sine(x, lower, upper))


def _moving(config: ExperimentConfig, grid: SpatialGrid, time: TimeGrid, level: int = 0) -> MovingRegion:
    return config.region.sweep.region(grid, time, level=level, rho=config.region.rho, margins=config.region.margins)


def _coefficients(advection: float) -> BBMCoefficients:
    return BBMCoefficients.constant((advection,))


def run_beam_bzk(config: ExperimentConfig, out: Path) -> list[Path]:
    beams = config.beams
    grid = SpatialGrid.interval(*config.grid.bounds, beams.n)
    time = TimeGrid(horizon=config.time.horizon, steps=beams.steps)
    base = BZKBeamParams(epsilon=beams.epsilons[0], x0=(beams.bzk_x0,), xi_bar=(beams.xi_bar,), k=beams.k, delta=beams.bzk_delta)
    region = BoxRegion(lower=(beams.region[0],), upper=(beams.region[1],))
    report = bzk_beam_sweep(beams.epsilons, region, grid, time, base)
    logger.info(f"bzk beam: fitted slope of the localized norm {report.slopes['norm_localized']:.3f} (expected {base.expected_slope:.3f})")
    return [emit_csv(report, out / "beam_bzk.csv"), emit_csv(report.diagnostics_frame(), out / "beam_bzk_diagnostics.csv")]


def run_beam_bbm(config: ExperimentConfig, out: Path) -> list[Path]:
    beams = config.beams
    grid = SpatialGrid.interval(*config.grid.bounds, beams.bbm_n)
    time = TimeGrid(horizon=config.time.horizon, steps=beams.steps)
    base = WKBBeamParams(
        h=beams.hs[0],
        xi0=(beams.xi0,),
        x0=(beams.bbm_x0,),
        delta=beams.bbm_delta,
        plateau=beams.bbm_plateau,
        phase_norm=beams.bbm_phase_norm,
    )
    region = BoxRegion(lower=(beams.region[0],), upper=(beams.region[1],))
    report = bbm_beam_sweep(beams.hs, region, _coefficients(beams.advection), grid, time, base)
    logger.info(f"bbm beam: fitted slopes initial {report.slopes['norm_initial']:.3f}, localized {report.slopes['norm_localized']:.3f}")
    residuals = [entry.residual_norm or 0.0 for entry in sorted(report.entries, key=lambda entry: -entry.param)]
    if any(later >= earlier for earlier, later in zip(residuals, residuals[1:])):
        listed = ", ".join(f"{value:.3e}" for value in residuals)
        logger.warning(f"bbm beam: residual norm does not decrease as h shrinks ({listed}); refine beams.bbm_n")
    return [emit_csv(report, out / "beam_bbm.csv"), emit_csv(report.diagnostics_frame(), out / "beam_bbm_diagnostics.csv")]


def run_hum(config: ExperimentConfig, out: Path) -> list[Path]:
    hum = config.hum
    grid, time = config.grid.build(), config.time.build()
    z0 = _first_mode(grid)
    coefficients = _coefficients(hum.advection) if hum.equation == "bbm" else None
    problem = HUMProblem(
        equation=hum.equation,
        z0=z0,
        region=_moving(config, grid, time),
        beta=hum.beta,
        tol=hum.tol,
        max_iter=hum.max_iter,
        coefficients=coefficients,
        strict=hum.strict,
    )
    solution = solve_null_control(problem)
    initial = z0.norm()
    row = {
        "equation": hum.equation,
        "beta": solution.beta,
        "initial_norm": initial,
        "final_norm": solution.final_norm,
        "relative_final_norm": solution.final_norm / initial,
        "final_state_norm": solution.final_state_norm,
        "cost": solution.cost,
        "value": solution.value,
        "cg_iterations": solution.cg_iterations,
        "converged": solution.converged,
    }
    logger.info(f"hum {hum.equation}: |z(T)|/|z0| = {row['relative_final_norm']:.3e} after {solution.cg_iterations} CG iterations")
    history = [
        {"iteration": index + 1, "relative_residual": residual, "value": value}
        for index, (residual, value) in enumerate(zip(solution.cg_residuals, solution.cg_values))
    ]
    return [emit_csv([row], out / "hum.csv"), emit_csv(history, out / "hum_cg.csv")]


def run_dichotomy(config: ExperimentConfig, out: Path) -> list[Path]:
    hum = config.hum
    grid, time = config.grid.build(), config.time.build()
    z0 = _first_mode(grid)
    moving = _moving(config, grid, time)
    fixed = static_region(config.region.fixed(), grid, time, config.region.rho)
    lower, upper = config.grid.bounds
    full = static_region(BoxRegion(lower=(lower,), upper=(upper,)), grid, time, config.region.rho)

    paths, summary = [], []
    bounds = [
        GrowthBound(region_kind="moving", direction="at_most", value=hum.moving_growth_max),
        GrowthBound(region_kind="fixed", direction="at_least", value=hum.fixed_growth_min),
    ]
    equations: tuple[Equation, ...] = ("bzk", "bbm")
    for equation in equations:
        curve = dichotomy_diagnostic(
            z0,
            fixed,
            moving,
            hum.betas,
            equation,
            coefficients=_coefficients(hum.advection) if equation == "bbm" else None,
            extra={"full": full},
            tol=hum.tol,
            max_iter=hum.max_iter,
        )
        paths.append(emit_csv(curve.to_frame(), out / f"dichotomy_{equation}.csv"))
        summary.extend(curve.summary_rows(bounds))
        for kind, growth in curve.summary().items():
            logger.info(f"dichotomy {equation} {kind}: cost growth {growth:.3f} per decade of beta")
        for bound in bounds:
            growth = curve.growth_factor(bound.region_kind)
            if not bound.holds(growth):
                logger.warning(f"dichotomy {equation} {bound.region_kind}: cost growth {growth:.3f} per decade is outside the expected {bound.label}")
    paths.append(emit_csv(summary, out / "dichotomy_summary.csv"))
    return paths


def _carleman_weights(config: ExperimentConfig, grid: SpatialGrid, time: TimeGrid, s: float) -> WeightSet:
    eta = build_eta_sweep_1d(config.region.sweep, grid, time, config.weights.eta)
    r = r_on_time_grid(time, config.weights.tau_margin)
    return assemble_weights(eta, r, config.carleman.lam, s, config.weights.tau_margin)


def run_carleman(config: ExperimentConfig, out: Path) -> list[Path]:
    carleman = config.carleman
    grid = SpatialGrid.interval(*config.grid.bounds, carleman.n)
    time = TimeGrid(horizon=config.time.horizon, steps=carleman.steps)
    weights = _carleman_weights(config, grid, time, carleman.s0)
    global_weights = weights.with_s(horizon_scaled_s(carleman.s0, time.horizon))
    omega1, omega2, omega = (_moving(config, grid, time, level) for level in (1, 2, 4))
    coefficients = _coefficients(config.hum.advection)

    suites = run_carleman_suites(
        weights,
        omega2,
        omega,
        carleman.tau0,
        global_weights=global_weights,
        coefficients=coefficients,
        samples=carleman.samples,
        seed=config.seed,
    )

    mode = _first_mode(grid)
    middle = time.steps // 2
    examples = [
        eval_ode_carleman(SpaceTimeField.constant_in_time(mode, time), weights, omega2),
        eval_elliptic_carleman(mode, middle, weights, carleman.tau0, omega2),
        eval_h1_carleman(mode, np.zeros((*grid.shape, 1)), middle, weights, carleman.tau0, omega2),
        eval_global_carleman(mode, global_weights, omega, "bzk"),
        eval_global_carleman(mode, global_weights, omega, "bbm", coefficients),
    ]

    t_mid = float(time.nodes[middle])
    lower, upper = config.grid.bounds
    refinement = identity_refinement(lambda x: _sine(x, lower, upper) * (x[:, 0] - lower), grid, carleman.tau0, weights, t_mid)
    identity_rows = [
        {**report.row(), "order": order}
        for report, order in zip(refinement.reports, [float("nan"), *refinement.orders])
    ]
    identity_rows.append(appendix_identity_check(mode, carleman.tau0, weights, t_mid, region=omega1).row())

    energy_rows = []
    current = grid
    for _ in range(3):
        z = _first_mode(current)
        flux = np.cos(np.pi * (current.mesh()[..., :1] - lower) / (upper - lower))
        energy = energy_identity_check(z, flux, carleman.tau0, weights, t_mid)
        energy_rows.append({**energy.model_dump(), "lhs": energy.lhs, "rhs": energy.rhs})
        current = current.refined(2)

    scan = claim_threshold_scan(weights.eta, omega1, carleman.claim_tau, carleman.lambda_scan)
    claim_rows = [{**report.row(), "threshold": scan.threshold} for report in scan.reports]
    logger.info(f"carleman: splitting order {refinement.order:.2f}, claim threshold lambda={scan.threshold}")

    return [
        emit_csv([result.row() for result in suites], out / "carleman_suites.csv"),
        emit_csv([sides.row() for sides in examples], out / "carleman_examples.csv"),
        emit_csv(identity_rows, out / "carleman_identity.csv"),
        emit_csv(energy_rows, out / "carleman_energy.csv"),
        emit_csv(claim_rows, out / "carleman_claim.csv"),
    ]


def run_flow_check(config: ExperimentConfig, out: Path) -> list[Path]:
    grid, time = config.grid.build(), config.time.build()
    sweep = config.region.sweep
    velocity = sweep.velocity(time.horizon) if config.region.velocity is None else config.region.velocity.build(grid.dim)
    flow = FlowMap(velocity=velocity, dt_flow=sweep.dt_flow)
    report = check_assumption(flow, sweep.reference(), grid, time)
    row = report.model_dump(exclude={"component_counts", "grid_n"})
    row["passed"] = report.passed
    row["max_components"] = max(report.component_counts, default=0)
    if not report.passed:
        logger.warning(f"flow-check: region assumption fails for the {velocity.label} velocity")
    return [emit_csv([row], out / "flow_check.csv")]


def run_weights_check(config: ExperimentConfig, out: Path) -> list[Path]:
    grid, time = config.grid.build(), config.time.build()
    eta = build_eta_sweep_1d(config.region.sweep, grid, time, config.weights.eta)
    report = check_weight_properties(eta, _moving(config, grid, time, 1), config.weights.tau_margin)
    row = report.model_dump(exclude={"grid_n"})
    row["passed"] = report.passed
    try:
        certify(report)
    except CertificationError as exc:
        logger.warning(f"weights-check: {exc}")
    return [emit_csv([row], out / "weights_check.csv")]


FAMILY_RUNNERS: dict[Family, FamilyRunner] = {
    "beam-bzk": run_beam_bzk,
    "beam-bbm": run_beam_bbm,
    "hum": run_hum,
    "dichotomy": run_dichotomy,
    "carleman": run_carleman,
    "flow-check": run_flow_check,
    "weights-check": run_weights_check,
}
