"""Multi-species BGK moment relaxation: stiff integration, equilibria, bounds."""

from .collisions import (
    CollisionMatrices,
    ConstantMatrix,
    FrequencyModel,
    HardSphere,
    PairwiseMixture,
    assemble,
    closed_form_couplings,
    hard_sphere_frequencies,
    mixing_weights,
    pairwise_mixture,
)
from .dynamics import (
    ScaledOperators,
    energy_rhs,
    momentum_rhs,
    scaled_energies,
    scaled_operators,
    scaled_velocities,
    temperature_rhs,
)
from .equilibrium import (
    DecayConstants,
    EquilibriumData,
    SpectralBounds,
    conservative_decay_rate,
    decay_constants,
    decay_envelopes,
    spectral_bounds,
    steady_state,
    symmetric_eigenvalues,
    velocity_component_bound,
    velocity_energy_bound,
)
from .integrate import (
    IntegrationError,
    IntegratorConfig,
    MonitorReport,
    PicardDivergenceError,
    RealizabilityError,
    Trajectory,
    backward_euler_step,
    rk4_step,
    simulate,
)
from .scenarios import GASES, ScenarioConfig, ScenarioError, parse_config, presets, resolve_integrator
from .species import (
    BOLTZMANN_J_PER_K,
    MixtureComposition,
    MomentState,
    SpeciesParams,
    energy_from,
    energy_to_kelvin,
    is_realizable,
    kelvin_to_energy,
    state_from_temperatures,
    temperatures_of,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
