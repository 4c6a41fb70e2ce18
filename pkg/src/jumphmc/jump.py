"""Hamiltonian Monte Carlo as a continuous-time Markov jump process.

From any state the sampler can jump to three neighbors: the leapfrog image
L(zeta), the momentum flip F(zeta), and a momentum redraw R(zeta).  Each
neighbor is assigned a Poisson rate; the square-rooted probability ratios
let rates exceed 1, which is the whole point.  Expressed through energy
differences the outgoing rates are

    gamma_L = exp(-(H(L zeta) - H(zeta)) / 2)
    gamma_F = max(0, exp(-(H(L^-1 zeta) - H(zeta)) / 2) - gamma_L)
    beta    = constant momentum-randomization rate

and a step is an exponential race between the three arms.  The time spent
waiting in each state (the holding time) doubles as an importance weight,
so visited states plus holding times can be resampled into an unweighted
chain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .energy import CountingEnergy, EnergyFunction
from .errors import IntegrationError
from .phase import (
    LeapfrogParams,
    PhaseState,
    flip,
    leapfrog_inverse_with_grad,
    leapfrog_with_grad,
    randomize_momentum,
)


class Transition(enum.Enum):
    """Which arm of the exponential race fired."""

    L = "L"
    F = "F"
    R = "R"


@dataclass(frozen=True)
class TransitionRates:
    """Outgoing Poisson rates from the current state."""

    gamma_L: float
    gamma_F: float
    beta: float

    @property
    def total(self) -> float:
        return self.gamma_L + self.gamma_F + self.beta


@dataclass(frozen=True)
class SamplerConfig:
    """Hyperparameters of a jump-process chain."""

    epsilon: float
    steps: int
    beta: float
    n_samples: int
    seed: int = 0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        LeapfrogParams(self.epsilon, self.steps)  # validates epsilon/steps

    @property
    def leapfrog_params(self) -> LeapfrogParams:
        return LeapfrogParams(self.epsilon, self.steps)


@dataclass(frozen=True)
class WeightedSample:
    """A visited state, how long the chain sat in it, and its running cost."""

    state: PhaseState
    holding_time: float
    transition_out: Transition
    cumulative_gradient_evals: int


class _Node(NamedTuple):
    """A phase state with its cached potential, total energy and gradient."""

    state: PhaseState
    potential: float
    h: float
    grad: np.ndarray


@dataclass
class StateCache:
    """Precomputed neighbors of the current state.

    ``backward`` holds L^-1 of the current state.  After an L transition the
    previous current node becomes the new backward node without any
    recomputation (its total energy is reused bit for bit); after F or R
    transitions both neighbors are integrated afresh.
    """

    current: _Node
    forward: _Node
    backward: _Node
    last_transition: Optional[Transition] = None

    @property
    def state(self) -> PhaseState:
        return self.current.state


def _kinetic(v: np.ndarray) -> float:
    return 0.5 * float(np.dot(v, v))


def _make_node(state: PhaseState, grad: np.ndarray, ef: EnergyFunction) -> _Node:
    with np.errstate(over="ignore", invalid="ignore"):
        potential = ef.energy(state.x)
        h = potential + _kinetic(state.v)
    if not np.isfinite(h):
        raise IntegrationError("non-finite energy encountered", state=state)
    return _Node(state, potential, h, grad)


def init_cache(zeta: PhaseState, config: SamplerConfig, ef: EnergyFunction) -> StateCache:
    """Build the neighbor cache for a fresh chain start."""
    params = config.leapfrog_params
    g0 = ef.gradient(zeta.x)
    current = _make_node(zeta, g0, ef)
    fwd_state, fwd_grad = leapfrog_with_grad(zeta, params, ef, grad0=g0)
    bwd_state, bwd_grad = leapfrog_inverse_with_grad(zeta, params, ef, grad0=g0)
    return StateCache(
        current=current,
        forward=_make_node(fwd_state, fwd_grad, ef),
        backward=_make_node(bwd_state, bwd_grad, ef),
    )


def compute_rates(
    zeta: PhaseState, cache: StateCache, config: SamplerConfig, ef: EnergyFunction
) -> TransitionRates:
    """Outgoing rates from ``zeta`` given its cached neighbor energies."""
    cur = cache.current
    if cur.state is not zeta and not (
        np.array_equal(cur.state.x, zeta.x) and np.array_equal(cur.state.v, zeta.v)
    ):
        raise ValueError("cache is not consistent with the supplied state")
    if not (np.isfinite(cur.h) and np.isfinite(cache.forward.h) and np.isfinite(cache.backward.h)):
        raise IntegrationError("non-finite energy in neighbor cache", state=zeta)
    gamma_L = float(np.exp(-0.5 * (cache.forward.h - cur.h)))
    gamma_F = max(0.0, float(np.exp(-0.5 * (cache.backward.h - cur.h))) - gamma_L)
    return TransitionRates(gamma_L=gamma_L, gamma_F=gamma_F, beta=config.beta)


def draw_waiting_times(
    rates: TransitionRates, rng: np.random.Generator
) -> tuple[float, float, float]:
    """Draw the three competing exponential waiting times.

    A zero rate yields an infinite waiting time so that arm can never win
    the race.  Exactly three exponential variates are consumed regardless,
    keeping the random stream independent of which rates vanish.
    """
    draws = rng.standard_exponential(3)
    # Guard the (astronomically unlikely) exact-zero draw; holding times
    # must be strictly positive.
    draws = np.maximum(draws, np.finfo(float).tiny)
    # A subnormal rate can overflow the division; the resulting inf (an arm
    # that never fires) is exactly right.
    with np.errstate(over="ignore"):
        w_l = draws[0] / rates.gamma_L if rates.gamma_L > 0 else np.inf
        w_f = draws[1] / rates.gamma_F if rates.gamma_F > 0 else np.inf
        w_r = draws[2] / rates.beta if rates.beta > 0 else np.inf
    return float(w_l), float(w_f), float(w_r)


def step(
    zeta: PhaseState,
    cache: StateCache,
    config: SamplerConfig,
    ef: EnergyFunction,
    rng: np.random.Generator,
) -> tuple[PhaseState, WeightedSample, StateCache]:
    """Run one exponential race, record the holding time, move to the winner.

    Floating-point ties in the race (a measure-zero event) resolve with the
    fixed priority L > F > R.  When ``ef`` is a :class:`CountingEnergy` the
    emitted sample carries its cumulative gradient-evaluation count,
    including the cost of refreshing the neighbor cache.
    """
    params = config.leapfrog_params
    rates = compute_rates(zeta, cache, config, ef)
    w_l, w_f, w_r = draw_waiting_times(rates, rng)
    holding = min(w_l, w_f, w_r)
    if w_l == holding:
        kind = Transition.L
    elif w_f == holding:
        kind = Transition.F
    else:
        kind = Transition.R

    cur = cache.current
    if kind is Transition.L:
        new_current = cache.forward
        nxt = new_current.state
        fwd_state, fwd_grad = leapfrog_with_grad(nxt, params, ef, grad0=new_current.grad)
        next_cache = StateCache(
            current=new_current,
            forward=_make_node(fwd_state, fwd_grad, ef),
            backward=cur,
            last_transition=kind,
        )
    else:
        if kind is Transition.F:
            nxt = flip(zeta)
            # |v|^2 is exactly invariant under negation: reuse H and E(x).
            new_current = _Node(nxt, cur.potential, cur.h, cur.grad)
        else:
            nxt = randomize_momentum(zeta, rng)
            new_current = _Node(nxt, cur.potential, cur.potential + _kinetic(nxt.v), cur.grad)
        fwd_state, fwd_grad = leapfrog_with_grad(nxt, params, ef, grad0=new_current.grad)
        bwd_state, bwd_grad = leapfrog_inverse_with_grad(nxt, params, ef, grad0=new_current.grad)
        next_cache = StateCache(
            current=new_current,
            forward=_make_node(fwd_state, fwd_grad, ef),
            backward=_make_node(bwd_state, bwd_grad, ef),
            last_transition=kind,
        )

    sample = WeightedSample(
        state=zeta,
        holding_time=holding,
        transition_out=kind,
        cumulative_gradient_evals=getattr(ef, "gradient_calls", 0),
    )
    return nxt, sample, next_cache


@dataclass
class JumpChain:
    """A completed jump-process run, stored as packed arrays.

    Row i is the i-th visited state with its holding time, the transition
    that ended the visit, and the cumulative gradient-evaluation count after
    that visit's bookkeeping.
    """

    positions: np.ndarray
    momenta: np.ndarray
    holding_times: np.ndarray
    transitions: np.ndarray
    gradient_evals: np.ndarray
    energy_evals: int = 0

    def __len__(self) -> int:
        return self.positions.shape[0]

    def sample(self, i: int) -> WeightedSample:
        return WeightedSample(
            state=PhaseState(self.positions[i], self.momenta[i]),
            holding_time=float(self.holding_times[i]),
            transition_out=Transition(str(self.transitions[i])),
            cumulative_gradient_evals=int(self.gradient_evals[i]),
        )

    def __iter__(self):
        return (self.sample(i) for i in range(len(self)))

    def transition_counts(self) -> dict[str, int]:
        kinds, counts = np.unique(self.transitions, return_counts=True)
        return {str(k): int(c) for k, c in zip(kinds, counts)}


def _pack_chain(samples: list[WeightedSample], energy_evals: int) -> JumpChain:
    n = len(samples)
    dim = samples[0].state.dim if n else 0
    chain = JumpChain(
        positions=np.empty((n, dim)),
        momenta=np.empty((n, dim)),
        holding_times=np.empty(n),
        transitions=np.empty(n, dtype="<U1"),
        gradient_evals=np.empty(n, dtype=np.int64),
        energy_evals=energy_evals,
    )
    for i, s in enumerate(samples):
        chain.positions[i] = s.state.x
        chain.momenta[i] = s.state.v
        chain.holding_times[i] = s.holding_time
        chain.transitions[i] = s.transition_out.value
        chain.gradient_evals[i] = s.cumulative_gradient_evals
    return chain


def sample_chain(config: SamplerConfig, ef: EnergyFunction, init: PhaseState) -> JumpChain:
    """Generate ``config.n_samples`` weighted samples starting from ``init``.

    The first recorded state is ``init`` itself.  If the integrator fails,
    the raised :class:`IntegrationError` carries the samples collected so
    far as ``partial_chain``.
    """
    counter = CountingEnergy(ef)
    rng = np.random.default_rng(config.seed)
    samples: list[WeightedSample] = []
    zeta = init
    try:
        cache = init_cache(zeta, config, counter)
        for _ in range(config.n_samples):
            zeta, sample, cache = step(zeta, cache, config, counter, rng)
            samples.append(sample)
    except IntegrationError as err:
        err.partial_chain = _pack_chain(samples, counter.energy_calls)
        raise
    return _pack_chain(samples, counter.energy_calls)


ChainLike = Union[JumpChain, Sequence[WeightedSample]]


def _positions_and_weights(samples: ChainLike) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(samples, JumpChain):
        return samples.positions, samples.holding_times
    samples = list(samples)
    if not samples:
        raise ValueError("empty sample sequence")
    positions = np.stack([s.state.x for s in samples])
    weights = np.array([s.holding_time for s in samples])
    return positions, weights


def systematic_resample_indices(
    weights: np.ndarray, n_out: int, rng: np.random.Generator
) -> np.ndarray:
    """Systematic resampling: indices drawn with one uniform offset.

    Lower variance than multinomial resampling; expected multiplicity of
    index i is ``n_out * w_i / sum(w)``.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0:
        raise ValueError("empty weight vector")
    if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
        raise ValueError("weights must be positive and finite")
    if n_out < 1:
        raise ValueError("n_out must be at least 1")
    cum = np.cumsum(weights)
    cum /= cum[-1]
    cum[-1] = 1.0
    points = (rng.random() + np.arange(n_out)) / n_out
    return np.searchsorted(cum, points, side="right")


def resample(samples: ChainLike, n_out: int, rng: np.random.Generator) -> list[PhaseState]:
    """Resample visited states using holding times as importance weights."""
    positions, weights = _positions_and_weights(samples)
    if isinstance(samples, JumpChain):
        momenta = samples.momenta
    else:
        momenta = np.stack([s.state.v for s in samples])
    if positions.shape[0] == 0:
        raise ValueError("cannot resample an empty chain")
    idx = systematic_resample_indices(weights, n_out, rng)
    return [PhaseState(positions[i], momenta[i]) for i in idx]


def weighted_moments(samples: ChainLike) -> tuple[np.ndarray, np.ndarray]:
    """Holding-time-weighted mean and central covariance of the positions."""
    positions, weights = _positions_and_weights(samples)
    if positions.shape[0] == 0:
        raise ValueError("cannot take moments of an empty chain")
    total = weights.sum()
    mean = weights @ positions / total
    centered = positions - mean
    cov = (weights * centered.T) @ centered / total
    return mean, cov
