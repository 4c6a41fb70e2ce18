"""Hamiltonian Monte Carlo driven by a continuous-time Markov jump process.

The package provides the jump-process sampler, a discrete-time HMC control,
finite ring-ladder spectral-gap analysis, autocorrelation diagnostics with a
complex decay-rate fit, and a random-search hyperparameter tuner.
"""

from .diagnostics import AutocorrSeries, DecayFit, autocorrelation, fit_decay, tuning_objective
from .energy import (
    CountingEnergy,
    DiagonalGaussian,
    EnergyFunction,
    GaussianParams,
    RoughWell,
    RoughWellParams,
    gaussian_energy,
    gaussian_gradient,
    joint_energy,
    rough_well_energy,
    rough_well_gradient,
)
from .errors import (
    DecayFitError,
    DegenerateChainError,
    DegenerateLadderError,
    DimensionError,
    IntegrationError,
)
from .hmc import HmcChain, HmcConfig, hmc_chain, hmc_step
from .jump import (
    JumpChain,
    SamplerConfig,
    StateCache,
    Transition,
    TransitionRates,
    WeightedSample,
    compute_rates,
    draw_waiting_times,
    init_cache,
    resample,
    sample_chain,
    step,
    systematic_resample_indices,
    weighted_moments,
)
from .ladder import (
    DEFAULT_LADDER_SIZES,
    GapExperimentResult,
    Ladder,
    LadderStateIndex,
    Side,
    balance_check,
    build_hmc_ladder_chain,
    build_mjhmc_rate_matrix,
    embedded_chain,
    embedded_fixed_point_check,
    holding_time_diag,
    ladder_stationary,
    min_exponential_oracle,
    random_ladder_experiment,
    similarity_check,
    spectra_match,
    spectral_distance,
    spectral_gap,
)
from .phase import (
    LeapfrogParams,
    PhaseState,
    flip,
    leapfrog,
    leapfrog_inverse,
    randomize_momentum,
)
from .tuner import SearchSpace, TrialRecord, TuningEvalConfig, evaluate_trial, random_search

__version__ = "0.1.0"
