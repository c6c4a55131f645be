"""Semi-discrete spatial operators on the staggered mass grid.

The governing rates are

    v_t = u_x
    u_t = (mu * u_x / v - p)_x,                      p = R * theta / v
    c_v * theta_t = -p * u_x + (kappa * theta_x / v)_x + mu * u_x**2 / v

with u_x the cell-centered divided difference of the node velocities and
theta_x the face-centered difference of the cell temperatures.  Artificial
far-field ends close with ghost cells pinned at the rest state (1, 0, 1);
walls hold u = 0 strongly and apply the configured temperature rule.

All operators are pure functions of their inputs and deterministic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (
    DomainError,
    FluidState,
    GasParams,
    MassGrid,
    ProblemSetup,
    SetupKind,
)

__all__ = [
    "BoundaryRule",
    "GhostClosure",
    "StateDerivative",
    "ghost_closure",
    "pressure",
    "strain_rate",
    "heat_flux_faces",
    "rhs",
    "boundary_power",
    "total_energy",
]


class BoundaryRule(enum.Enum):
    """How one end of the truncated domain is closed."""

    #: ghost cell (v, theta) = (1, 1) at full spacing; ghost node u = 0
    FAR_FIELD = "far_field"
    #: solid wall, u = 0, zero heat flux
    WALL_INSULATED = "wall_insulated"
    #: solid wall, u = 0, wall temperature 1 applied at half spacing
    WALL_ISOTHERMAL = "wall_isothermal"


@dataclass(frozen=True)
class GhostClosure:
    left: BoundaryRule
    right: BoundaryRule


_CLOSURES = {
    SetupKind.CAUCHY: GhostClosure(BoundaryRule.FAR_FIELD, BoundaryRule.FAR_FIELD),
    SetupKind.HALFLINE_INSULATED: GhostClosure(
        BoundaryRule.WALL_INSULATED, BoundaryRule.FAR_FIELD
    ),
    SetupKind.HALFLINE_ISOTHERMAL: GhostClosure(
        BoundaryRule.WALL_ISOTHERMAL, BoundaryRule.FAR_FIELD
    ),
}


def ghost_closure(setup: ProblemSetup) -> GhostClosure:
    """The boundary closure matching a problem setup."""
    return _CLOSURES[setup.kind]


@dataclass(frozen=True)
class StateDerivative:
    """Rates of change: dv, dtheta per cell; du per node."""

    dv: np.ndarray
    du: np.ndarray
    dtheta: np.ndarray


def pressure(v, theta, R):
    """Ideal-gas pressure R*theta/v; rejects nonpositive inputs."""
    v_arr = np.asarray(v, dtype=np.float64)
    th_arr = np.asarray(theta, dtype=np.float64)
    if not (np.isfinite(R) and R > 0.0):
        raise DomainError(f"gas constant must be positive, got {R!r}")
    if v_arr.size == 0 or th_arr.size == 0:
        raise DomainError("pressure needs at least one sample")
    if not np.all(np.isfinite(v_arr)) or not np.all(np.isfinite(th_arr)):
        raise DomainError("pressure inputs must be finite")
    if v_arr.min() <= 0.0 or th_arr.min() <= 0.0:
        raise DomainError(
            f"pressure needs v > 0 and theta > 0, got min v = {v_arr.min():g}, "
            f"min theta = {th_arr.min():g}"
        )
    out = R * th_arr / v_arr
    return out if out.ndim else float(out)


def strain_rate(state: FluidState, grid: MassGrid) -> np.ndarray:
    """Cell-centered velocity gradient (u[j+1] - u[j]) / dm."""
    return np.diff(state.u) / grid.dm


def _boundary_heat_fluxes(
    state: FluidState, grid: MassGrid, closure: GhostClosure, kappa: float
) -> tuple[float, float]:
    """Heat flux through the left and right closures (scheme's own formulas)."""
    v, th = state.v, state.theta
    dm = grid.dm
    if closure.left is BoundaryRule.FAR_FIELD:
        left = kappa * (th[0] - 1.0) / (dm * 0.5 * (v[0] + 1.0))
    elif closure.left is BoundaryRule.WALL_INSULATED:
        left = 0.0
    else:  # isothermal wall: one-sided difference against the wall value at dm/2
        left = kappa * (th[0] - 1.0) / (0.5 * dm * v[0])
    right = kappa * (1.0 - th[-1]) / (dm * 0.5 * (1.0 + v[-1]))
    return float(left), float(right)


def heat_flux_faces(
    state: FluidState, grid: MassGrid, ghost: GhostClosure, kappa: float
) -> np.ndarray:
    """Heat flux kappa*theta_x/v at every node (face), one per node.

    Interior faces use the face difference of theta over the arithmetic-mean
    specific volume; boundary faces follow the ghost closure.
    """
    v, th = state.v, state.theta
    dm = grid.dm
    flux = np.empty(state.n_cells + 1)
    v_face = 0.5 * (v[:-1] + v[1:])
    flux[1:-1] = kappa * np.diff(th) / (dm * v_face)
    flux[0], flux[-1] = _boundary_heat_fluxes(state, grid, ghost, kappa)
    return flux


def rhs(
    state: FluidState,
    grid: MassGrid,
    params: GasParams,
    setup: ProblemSetup,
    sources: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
) -> StateDerivative:
    """Semi-discrete rates for (v, u, theta).

    Interior node i feels the stress difference of its two neighbor cells,
    stress = mu*u_x/v - p.  Far-field boundary nodes see a ghost cell at the
    rest state whose strain uses a ghost node with u = 0; a wall node has
    du = 0, imposing u(0, t) = 0 strongly.  ``sources`` are optional extra
    rates (dv, du, dtheta), e.g. manufactured forcings.
    """
    closure = ghost_closure(setup)
    v, th, u = state.v, state.theta, state.u
    dm = grid.dm

    s = np.diff(u) / dm
    p = pressure(v, th, params.R)
    stress = params.mu * (s / v) - p

    du = np.empty_like(u)
    du[1:-1] = np.diff(stress) / dm
    # right end is always an artificial far-field truncation
    stress_right = -params.R - params.mu * (u[-1] / dm)
    du[-1] = (stress_right - stress[-1]) / dm
    if closure.left is BoundaryRule.FAR_FIELD:
        stress_left = -params.R + params.mu * (u[0] / dm)
        du[0] = (stress[0] - stress_left) / dm
    else:
        du[0] = 0.0

    flux = heat_flux_faces(state, grid, closure, params.kappa)
    dth = (-p * s + np.diff(flux) / dm + params.mu * s * s / v) / params.c_v
    dv = s.copy()

    if sources is not None:
        sv, su, sth = sources
        dv = dv + sv
        du = du + su
        dth = dth + sth
        if closure.left is not BoundaryRule.FAR_FIELD:
            du[0] = 0.0  # the wall rate stays pinned even under forcing

    return StateDerivative(dv=dv, du=du, dtheta=dth)


def boundary_power(
    state: FluidState, grid: MassGrid, params: GasParams, setup: ProblemSetup
) -> float:
    """Rate of total-energy inflow through the two closures.

    Uses the scheme's own boundary fluxes, so the semi-discrete budget
    d/dt total_energy == boundary_power holds exactly (walls do no work
    because u = 0 there).
    """
    closure = ghost_closure(setup)
    f_left, f_right = _boundary_heat_fluxes(state, grid, closure, params.kappa)
    u0 = float(state.u[0])
    un = float(state.u[-1])
    stress_right = -params.R - params.mu * (un / grid.dm)
    work = un * stress_right
    if closure.left is BoundaryRule.FAR_FIELD:
        stress_left = -params.R + params.mu * (u0 / grid.dm)
        work -= u0 * stress_left
    return f_right - f_left + work


def total_energy(state: FluidState, grid: MassGrid, params: GasParams) -> float:
    """Thermal plus kinetic energy of the truncated domain.

    Kinetic energy is summed over nodes with full weight; with that
    convention the spatial exchange terms telescope and only boundary
    fluxes remain in the budget.
    """
    thermal = params.c_v * float(state.theta.sum())
    kinetic = 0.5 * float((state.u * state.u).sum())
    return (thermal + kinetic) * grid.dm
