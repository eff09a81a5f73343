#!/usr/bin/env python3
"""Relax the three reference noble-gas mixtures and watch the moments settle.

Each scenario starts away from equilibrium in a different way:

  1. Ar-Kr-Xe at rest with temperatures 1000/2000/3000 K (pure thermal
     relaxation: energy flows from hot xenon to cold argon).
  2. Ar-Kr-Xe at a uniform 1000 K with argon drifting at 100 m/s
     (velocity relaxation; friction heats the gas above 1000 K).
  3. A trace of hot, fast helium (864.8 m/s, 3000 K) against cold heavy
     Kr/Xe -- the disparate-mass case with non-monotonic temperatures.

All three relax to the same kind of steady state: a common velocity
(mass-weighted mean) and a common temperature fixed by total energy.
"""

import numpy as np

from mixbgk import (
    energy_to_kelvin,
    presets,
    resolve_integrator,
    simulate,
    steady_state,
    temperatures_of,
)


def describe(index, scenario):
    state = scenario.initial_state()
    model = scenario.frequency_model()
    cfg = resolve_integrator(scenario, state, model)
    eq = steady_state(state)

    print(f"\n=== Example {index}: {' / '.join(s.label for s in scenario.species)} ===")
    print(f"integrator: backward Euler, dt = {cfg.dt:.3e} s, "
          f"horizon = {cfg.t_final:.3e} s ({cfg.t_final / cfg.dt:.0f} steps)")
    print(f"predicted equilibrium: u = {eq.velocity[0]:+.4f} m/s, "
          f"T = {energy_to_kelvin(eq.temperature):.2f} K")

    trajectory = simulate(state, cfg, model)
    labels = state.composition.labels
    picks = np.linspace(0, len(trajectory.times) - 1, 6).astype(int)

    header = "t [s]".rjust(12) + "".join(f"  u_{lab} [m/s]".rjust(14) for lab in labels)
    header += "".join(f"  T_{lab} [K]".rjust(12) for lab in labels)
    print(header)
    for r in picks:
        s = trajectory.states[r]
        temps = energy_to_kelvin(temperatures_of(s))
        row = f"{trajectory.times[r]:12.3e}"
        row += "".join(f"{u:14.4f}" for u in s.velocities[:, 0])
        row += "".join(f"{t:12.2f}" for t in temps)
        print(row)

    final = trajectory.final_state
    u_err = np.abs(final.velocities[:, 0] - eq.velocity[0]).max()
    t_err = np.abs(energy_to_kelvin(temperatures_of(final)) -
                   energy_to_kelvin(eq.temperature)).max()
    drift = max(max(m.total_momentum_drift, m.total_energy_drift)
                for m in trajectory.monitors)
    floor_ok = all(m.min_temperature >= trajectory.monitors[0].min_temperature * (1 - 1e-9)
                   for m in trajectory.monitors)
    print(f"final distance to equilibrium: {u_err:.2e} m/s, {t_err:.2e} K")
    print(f"conservation drift {drift:.1e}; temperature floor held: {floor_ok}")


def main():
    print(__doc__)
    for index, scenario in presets().items():
        describe(index, scenario)


if __name__ == "__main__":
    main()
