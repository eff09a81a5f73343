"""Time integration of the moment system with per-step monitors.

The reference scheme is fully implicit backward Euler solved by
frozen-coefficient Picard iteration: within each sweep the coupling
matrices are held at the current iterate, which reduces the implicit
equations to two dense linear solves,

    (P + (dt/eps) (D - A)) U_new = P U_old
    (I + (dt/eps) (F - B) Q^{-1}) E_new = E_old + (dt / 2 eps) (G - C) m,

(velocities first -- the kinetic couplings depend on them), after which
the coefficients are refreshed and the sweep repeats until the joint
relative change drops below ``picard_tol``.  Both solves conserve total
momentum and total energy exactly in exact arithmetic because the
coupling Laplacians annihilate the constant vector; the velocity solve is
also an M-matrix system, so the componentwise velocity envelopes survive
discretization.

An explicit classical RK4 stepper is provided as the high-order reference
oracle for convergence studies.  It is not suitable for stiff steps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .collisions import (
    FrequencyModel,
    HardSphere,
    _pair_velocities,
    assemble,
    collision_frequencies,
    coupling_from_frequencies,
    mixing_weights,
)
from .dynamics import energy_rhs, momentum_rhs
from .species import MomentState, is_realizable, temperatures_of

_MAX_HALVINGS = 10


class IntegrationError(RuntimeError):
    """Step failure; ``time`` carries the trajectory time when known."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class PicardDivergenceError(IntegrationError):
    """The frozen-coefficient iteration did not meet its tolerance."""


class RealizabilityError(IntegrationError):
    """An iterate or stage state left the realizable set."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration settings.

    method is "be" (backward Euler, default) or "rk4".  ``output_stride``
    records every k-th step; the initial and final states are always
    recorded.
    """

    dt: float
    t_final: float
    eps: float = 1.0
    method: str = "be"
    picard_tol: float = 1e-12
    picard_max_iter: int = 100
    output_stride: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (np.isfinite(self.t_final) and self.t_final >= 0.0):
            raise ValueError(f"t_final must be nonnegative, got {self.t_final}")
        if not (np.isfinite(self.eps) and self.eps > 0.0):
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.method not in ("be", "rk4"):
            raise ValueError(f"method must be 'be' or 'rk4', got {self.method!r}")
        if self.output_stride < 1:
            raise ValueError("output_stride must be a positive integer")


@dataclass
class MonitorReport:
    """Per-record verification data.

    Drifts are relative to fixed initial scales; ``min_temperature`` is in
    J; ``picard_iterations`` is the largest sweep count of any step since
    the previous record (0 for RK4 and for the initial record).
    """

    total_momentum_drift: float
    total_energy_drift: float
    min_temperature: float
    velocity_bounds_ok: bool
    realizable: bool
    picard_iterations: int


@dataclass
class Trajectory:
    """Recorded times (strictly increasing, starting at 0) with states and monitors."""

    times: np.ndarray
    states: list[MomentState]
    monitors: list[MonitorReport]

    @property
    def final_state(self) -> MomentState:
        return self.states[-1]


def _relative_change(new, old) -> float:
    """Max-norm change of one field relative to the field's max norm.

    Components far below the field scale carry only solver noise (their
    absolute error is eps * ||field||, whatever their size), so measuring
    them against their own magnitude would block convergence whenever a
    velocity component crosses zero.
    """
    scale = max(float(np.max(np.abs(new))), 1e-300)
    return float(np.max(np.abs(new - old)) / scale)


def _derived_temperatures(comp, velocities, energies, dimension):
    speed_sq = np.einsum("ik,ik->i", velocities, velocities)
    return (2.0 / dimension) * energies / comp.number_densities - comp.masses / dimension * speed_sq


def _picard_solve(state, dt, eps, model, tol, max_iter):
    """Solve one implicit step; returns (velocities, energies, sweeps).

    The two linear systems are solved in the symmetrically scaled
    variables W = P^{1/2} U and xi = Q^{-1/2} E,

        (I + (dt/eps) Z) W_new  = W_old
        (I + (dt/eps) Zh) xi_new = xi_old + (dt / 2 eps) Q^{-1/2} (G - C) m,

    which are exact diagonal rescalings of the conserved-variable systems
    but symmetric positive definite, so stiff steps do not rattle at the
    roundoff plateau of a badly scaled solve.
    """
    comp = state.composition
    rho = comp.mass_densities
    n = comp.number_densities
    m = comp.masses
    d = state.dimension
    sqrt_rho = np.sqrt(rho)
    sqrt_n = np.sqrt(n)
    identity = np.eye(comp.size)
    hard_sphere = isinstance(model, HardSphere)

    w_old = sqrt_rho[:, None] * state.velocities
    xi_old = state.energies / sqrt_n

    # Attainable iterate agreement is limited by the conditioning of the
    # implicit systems (~cond * machine eps); below that floor the
    # iteration can only rattle.  Stagnation there counts as converged.
    roundoff_floor = 0.0
    best_residual = np.inf
    stalled = 0

    u_k, e_k = state.velocities, state.energies
    for sweep in range(1, max_iter + 1):
        temps = _derived_temperatures(comp, u_k, e_k, d)
        if hard_sphere and not np.all(temps > 0.0):
            raise RealizabilityError(
                f"iterate temperature dropped to {temps.min():.6e} J during the "
                f"implicit solve (dt = {dt:.6e})"
            )
        lam = collision_frequencies(model, comp, temps, d)
        alpha, _ = mixing_weights(lam, rho, n)
        momentum_coupling = coupling_from_frequencies(lam, rho)
        energy_coupling = coupling_from_frequencies(lam, n)

        momentum_laplacian = (
            np.diag(momentum_coupling.sum(axis=1)) - momentum_coupling
        )
        momentum_relaxation = momentum_laplacian / np.outer(sqrt_rho, sqrt_rho)
        w_new = np.linalg.solve(identity + (dt / eps) * momentum_relaxation, w_old)
        u_new = w_new / sqrt_rho[:, None]

        u_mix = _pair_velocities(u_new, alpha)
        kinetic_coupling = energy_coupling * np.einsum("ijk,ijk->ij", u_mix, u_mix)
        kinetic_laplacian = np.diag(kinetic_coupling.sum(axis=1)) - kinetic_coupling
        energy_laplacian = np.diag(energy_coupling.sum(axis=1)) - energy_coupling
        energy_relaxation = energy_laplacian / np.outer(sqrt_n, sqrt_n)

        rhs = xi_old + (0.5 * dt / eps) * (kinetic_laplacian @ m) / sqrt_n
        xi_new = np.linalg.solve(identity + (dt / eps) * energy_relaxation, rhs)
        e_new = xi_new * sqrt_n

        if sweep == 1:
            cond_proxy = max(
                np.abs(identity + (dt / eps) * momentum_relaxation).sum(axis=1).max(),
                np.abs(identity + (dt / eps) * energy_relaxation).sum(axis=1).max(),
            )
            roundoff_floor = 64.0 * np.finfo(float).eps * cond_proxy

        residual = max(_relative_change(u_new, u_k), _relative_change(e_new, e_k))
        u_k, e_k = u_new, e_new
        if residual < tol:
            return u_k, e_k, sweep
        if residual < roundoff_floor:
            stalled = stalled + 1 if residual > 0.5 * best_residual else 0
            if stalled >= 3:
                return u_k, e_k, sweep
        best_residual = min(best_residual, residual)

    raise PicardDivergenceError(
        f"implicit solve did not converge in {max_iter} sweeps "
        f"(last relative change {residual:.3e}, dt = {dt:.6e})"
    )


def _be_advance(state, dt, cfg, model, depth=0):
    """Advance by dt with backward Euler, halving on realizability loss."""
    try:
        u, e, sweeps = _picard_solve(
            state, dt, cfg.eps, model, cfg.picard_tol, cfg.picard_max_iter
        )
        return replace(state, velocities=u, energies=e), sweeps
    except RealizabilityError:
        if depth >= _MAX_HALVINGS:
            raise
        half, sweeps_a = _be_advance(state, 0.5 * dt, cfg, model, depth + 1)
        full, sweeps_b = _be_advance(half, 0.5 * dt, cfg, model, depth + 1)
        return full, max(sweeps_a, sweeps_b)


def backward_euler_step(
    state: MomentState, cfg: IntegratorConfig, model: FrequencyModel
) -> MomentState:
    """One implicit step of size cfg.dt from a realizable state."""
    return _be_advance(state, cfg.dt, cfg, model)[0]


def _stage_rates(state, model, eps):
    mats = assemble(state, model)
    comp = state.composition
    du_dt = momentum_rhs(state, mats, eps) / comp.mass_densities[:, None]
    de_dt = energy_rhs(state, mats, eps)
    return du_dt, de_dt


def _rk4_advance(state, dt, eps, model):
    def stage(base, scale, du, de):
        trial = replace(
            base,
            velocities=base.velocities + scale * du,
            energies=base.energies + scale * de,
        )
        if isinstance(model, HardSphere) and not np.all(temperatures_of(trial) > 0.0):
            raise RealizabilityError(
                f"RK4 stage state left the realizable set (dt = {dt:.6e}); "
                "reduce the step size"
            )
        return trial

    k1 = _stage_rates(state, model, eps)
    k2 = _stage_rates(stage(state, 0.5 * dt, *k1), model, eps)
    k3 = _stage_rates(stage(state, 0.5 * dt, *k2), model, eps)
    k4 = _stage_rates(stage(state, dt, *k3), model, eps)

    du = (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
    de = (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
    return replace(
        state,
        velocities=state.velocities + dt * du,
        energies=state.energies + dt * de,
    )


def rk4_step(
    state: MomentState, cfg: IntegratorConfig, model: FrequencyModel
) -> MomentState:
    """One classical explicit Runge-Kutta step of size cfg.dt."""
    return _rk4_advance(state, cfg.dt, cfg.eps, model)


@dataclass(frozen=True)
class _MonitorReferences:
    """Initial-condition scales against which monitors are evaluated."""

    momentum_total: np.ndarray  # (d,)
    momentum_scale: float
    energy_total: float
    temperature_floor: float  # min_i T_i(0), J
    velocity_low: np.ndarray  # (d,) componentwise minima at t=0
    velocity_high: np.ndarray
    velocity_tol: float


def _monitor_references(state: MomentState) -> _MonitorReferences:
    comp = state.composition
    rho = comp.mass_densities
    momentum_total = rho @ state.velocities
    energy_total = float(state.energies.sum())
    # Momentum scale: the initial total momentum when nonzero, else the
    # momentum density carried by the total energy.
    momentum_scale = max(
        float(np.linalg.norm(momentum_total)),
        float(np.sqrt(2.0 * rho.sum() * abs(energy_total))),
    )
    u = state.velocities
    u_scale = float(np.linalg.norm(np.maximum(np.abs(u.min(0)), np.abs(u.max(0)))))
    return _MonitorReferences(
        momentum_total=momentum_total,
        momentum_scale=momentum_scale,
        energy_total=energy_total,
        temperature_floor=float(temperatures_of(state).min()),
        velocity_low=u.min(axis=0),
        velocity_high=u.max(axis=0),
        velocity_tol=1e-9 * u_scale,
    )


def _monitor(state, refs: _MonitorReferences, picard_iterations: int) -> MonitorReport:
    comp = state.composition
    momentum_total = comp.mass_densities @ state.velocities
    momentum_drift = float(
        np.linalg.norm(momentum_total - refs.momentum_total) / refs.momentum_scale
    )
    energy_drift = float(
        abs(state.energies.sum() - refs.energy_total) / abs(refs.energy_total)
    )
    temps = temperatures_of(state)
    u = state.velocities
    bounds_ok = bool(
        np.all(u >= refs.velocity_low[None, :] - refs.velocity_tol)
        and np.all(u <= refs.velocity_high[None, :] + refs.velocity_tol)
    )
    realizable = is_realizable(state, floor=refs.temperature_floor * (1.0 - 1e-9))
    return MonitorReport(
        total_momentum_drift=momentum_drift,
        total_energy_drift=energy_drift,
        min_temperature=float(temps.min()),
        velocity_bounds_ok=bounds_ok,
        realizable=realizable,
        picard_iterations=picard_iterations,
    )


def simulate(
    initial: MomentState, cfg: IntegratorConfig, model: FrequencyModel
) -> Trajectory:
    """Integrate from t = 0 to cfg.t_final, recording states and monitors.

    Every ``output_stride``-th step is recorded along with the initial
    state; a final partial step guarantees the last recorded time equals
    ``t_final`` exactly.  Step failures are re-raised with the failing
    time attached.
    """
    if not is_realizable(initial):
        raise RealizabilityError("initial state is not realizable", time=0.0)
    if isinstance(model, HardSphere) and not np.all(temperatures_of(initial) > 0.0):
        raise RealizabilityError(
            "hard-sphere integration needs strictly positive initial temperatures",
            time=0.0,
        )

    refs = _monitor_references(initial)
    times = [0.0]
    states = [initial]
    monitors = [_monitor(initial, refs, 0)]
    if cfg.t_final == 0.0:
        return Trajectory(np.asarray(times), states, monitors)

    n_full = int(np.floor(cfg.t_final / cfg.dt * (1.0 + 1e-12)))
    remainder = cfg.t_final - n_full * cfg.dt
    step_sizes = [cfg.dt] * n_full
    if remainder > 1e-12 * cfg.dt:
        step_sizes.append(remainder)

    state = initial
    t = 0.0
    sweeps_window = 0
    for index, dt in enumerate(step_sizes, start=1):
        is_last = index == len(step_sizes)
        t = cfg.t_final if is_last else index * cfg.dt
        try:
            if cfg.method == "be":
                state, sweeps = _be_advance(state, dt, cfg, model)
            else:
                state = _rk4_advance(state, dt, cfg.eps, model)
                sweeps = 0
        except IntegrationError as err:
            err.time = t
            raise type(err)(f"{err} (failed advancing to t = {t:.9e} s)", time=t) from err
        sweeps_window = max(sweeps_window, sweeps)
        if is_last or index % cfg.output_stride == 0:
            times.append(t)
            states.append(state)
            monitors.append(_monitor(state, refs, sweeps_window))
            sweeps_window = 0

    return Trajectory(np.asarray(times), states, monitors)
