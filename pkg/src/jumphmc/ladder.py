"""Finite ring state-ladders and their spectral analysis.

A ladder is a ring of k rungs, one total-energy value per rung, visited by
the leapfrog and flip operators.  Each rung carries an ascending and a
descending state (2k states total): leapfrog moves ascending states up the
ring and descending states down, flip swaps the two sides of a rung.  On a
single ladder momentum randomization never fires (it moves the particle to
a different ladder), so the jump process has at most two outgoing arms per
state.

The continuous-time rate matrix, its embedded discrete-time chain, the
holding-time scaling between them, and the numerical balance checks all
live here, together with the randomized spectral-gap experiment comparing
the jump process against the discrete-time control chain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateLadderError


class Side(enum.Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"


@dataclass(frozen=True)
class Ladder:
    """A ring of k rungs with one total-energy value per rung."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.energies, dtype=float))
        if e.ndim != 1 or e.size < 3:
            raise ValueError("a ladder needs at least 3 rungs")
        if not np.all(np.isfinite(e)):
            raise ValueError("rung energies must be finite")
        object.__setattr__(self, "energies", e)

    @property
    def k(self) -> int:
        return self.energies.size

    @property
    def n_states(self) -> int:
        return 2 * self.k


@dataclass(frozen=True)
class LadderStateIndex:
    """One of the 2k discrete states: a rung plus a travel direction."""

    rung: int
    side: Side

    def flat(self, k: int) -> int:
        """Flat index: ascending states occupy 0..k-1, descending k..2k-1."""
        if not 0 <= self.rung < k:
            raise ValueError(f"rung {self.rung} out of range for k={k}")
        return self.rung + (k if self.side is Side.DESCENDING else 0)

    def leapfrog_target(self, k: int) -> "LadderStateIndex":
        """L moves ascending states up the ring and descending states down."""
        delta = 1 if self.side is Side.ASCENDING else -1
        return LadderStateIndex((self.rung + delta) % k, self.side)

    def flip_target(self) -> "LadderStateIndex":
        other = Side.DESCENDING if self.side is Side.ASCENDING else Side.ASCENDING
        return LadderStateIndex(self.rung, other)


def build_mjhmc_rate_matrix(ladder: Ladder) -> np.ndarray:
    """Continuous-time rate matrix of the jump process on a single ladder.

    Entry (i, j) is the rate of j -> i transitions; each diagonal entry
    closes its column to zero sum.  Rates follow the square-rooted density
    ratios: the leapfrog rate from a rung at energy E to its successor at
    E' is exp(-(E' - E)/2), and the flip rate is the positive part of the
    backward leapfrog rate minus the forward one, so at most one side of
    each rung pair carries a nonzero flip rate.
    """
    e = ladder.energies
    k = ladder.k
    e_up = np.roll(e, -1)  # energy of rung r+1
    e_dn = np.roll(e, 1)  # energy of rung r-1

    up_rate = np.exp(-0.5 * (e_up - e))  # ascending L, also descending L-inverse
    dn_rate = np.exp(-0.5 * (e_dn - e))  # descending L, also ascending L-inverse
    flip_asc = np.maximum(0.0, dn_rate - up_rate)
    flip_desc = np.maximum(0.0, up_rate - dn_rate)

    n = 2 * k
    rates = np.zeros((n, n))
    r = np.arange(k)
    asc = r
    desc = k + r
    rates[(r + 1) % k, asc] = up_rate
    rates[desc, asc] = flip_asc
    rates[k + (r - 1) % k, desc] = dn_rate
    rates[asc, desc] = flip_desc
    np.fill_diagonal(rates, 0.0)
    np.fill_diagonal(rates, -rates.sum(axis=0))
    return rates


def build_hmc_ladder_chain(ladder: Ladder) -> np.ndarray:
    """Discrete-time control chain on the ladder: accept L or flip.

    Column-stochastic: from each state the leapfrog target is taken with
    the Metropolis-Hastings probability min(1, exp(-dE)) and the flip
    partner with the complement.
    """
    e = ladder.energies
    k = ladder.k
    e_up = np.roll(e, -1)
    e_dn = np.roll(e, 1)

    p_asc = np.minimum(1.0, np.exp(-(e_up - e)))
    p_desc = np.minimum(1.0, np.exp(-(e_dn - e)))

    n = 2 * k
    chain = np.zeros((n, n))
    r = np.arange(k)
    asc = r
    desc = k + r
    chain[(r + 1) % k, asc] = p_asc
    chain[desc, asc] = 1.0 - p_asc
    chain[k + (r - 1) % k, desc] = p_desc
    chain[asc, desc] = 1.0 - p_desc
    return chain


def _offdiag_column_totals(rates: np.ndarray) -> np.ndarray:
    off = rates.copy()
    np.fill_diagonal(off, 0.0)
    totals = off.sum(axis=0)
    if np.any(totals <= 0):
        raise DegenerateLadderError("a state has no outgoing transitions")
    return totals


def embedded_chain(rates: np.ndarray) -> np.ndarray:
    """Discrete-time chain over visited states, ignoring holding times.

    For competing exponential clocks the probability that the j -> i clock
    rings first is its rate over the total outgoing rate, so
    T[i, j] = rate(i, j) / total(j) with a zero diagonal (no
    self-transitions).
    """
    off = rates.copy()
    np.fill_diagonal(off, 0.0)
    totals = _offdiag_column_totals(rates)
    return off / totals


def holding_time_diag(rates: np.ndarray) -> np.ndarray:
    """Expected holding time of each state: one over its total outgoing rate."""
    return 1.0 / _offdiag_column_totals(rates)


def spectral_gap(chain: np.ndarray) -> float:
    """Difference in magnitude of the two largest eigenvalues.

    Larger gap means faster mixing.  The input must be column-stochastic;
    eigenvalues are computed with a dense general solver since the matrices
    here are small and non-symmetric.
    """
    chain = np.asarray(chain, dtype=float)
    if chain.ndim != 2 or chain.shape[0] != chain.shape[1]:
        raise ValueError("chain must be a square matrix")
    if np.any(chain < -1e-12) or np.any(chain > 1 + 1e-12):
        raise ValueError("chain entries must lie in [0, 1]")
    if not np.allclose(chain.sum(axis=0), 1.0, atol=1e-9):
        raise ValueError("chain columns must sum to 1")
    mags = np.sort(np.abs(np.linalg.eigvals(chain)))[::-1]
    return float(mags[0] - mags[1])


def similarity_check(rates: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spectra of the embedded chain and of its holding-time-scaled sibling.

    The sample-evolution chain D T D^-1 is similar to the embedded chain T,
    so the two returned spectra must agree as multisets; callers assert the
    tolerance.
    """
    t_hat = embedded_chain(rates)
    d = holding_time_diag(rates)
    t_scaled = (d[:, None] * t_hat) / d[None, :]
    return np.linalg.eigvals(t_hat), np.linalg.eigvals(t_scaled)


def spectral_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Multiset distance between two spectra: worst greedy nearest-match gap.

    Sorting complex eigenvalues is unstable when real parts nearly tie (a
    conjugate pair can swap order between the two spectra), so entries are
    matched greedily by distance instead.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError("spectra must have equal length")
    unmatched = np.ones(b.size, dtype=bool)
    # Match the entries of largest magnitude first: they are the ones the
    # spectral gap depends on.
    worst = 0.0
    for x in sorted(a, key=abs, reverse=True):
        dist = np.abs(b - x)
        dist[~unmatched] = np.inf
        j = int(np.argmin(dist))
        worst = max(worst, float(dist[j]))
        unmatched[j] = False
    return worst


def spectra_match(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    """True when two spectra agree as multisets within ``tol``."""
    return spectral_distance(a, b) <= tol


def ladder_stationary(ladder: Ladder) -> np.ndarray:
    """Unnormalized target probabilities of the 2k states.

    Both sides of a rung share the rung's total energy, hence the same
    probability.  Energies are shifted by their minimum before
    exponentiating; every consumer is scale-invariant.
    """
    pi_rung = np.exp(-(ladder.energies - ladder.energies.min()))
    return np.concatenate([pi_rung, pi_rung])


def balance_check(rates: np.ndarray, ladder: Ladder) -> float:
    """Max residual of (rates @ pi) relative to max pi; zero when balanced.

    The jump-process rates are built so that probability inflow and outflow
    cancel exactly at the target distribution, so on an exact rate matrix
    this residual is pure floating-point noise.
    """
    pi = ladder_stationary(ladder)
    return float(np.max(np.abs(rates @ pi)) / pi.max())


def embedded_fixed_point_check(rates: np.ndarray, ladder: Ladder) -> float:
    """Residual of the embedded chain's fixed point.

    The embedded chain's stationary distribution is the target scaled by
    inverse holding times; returns max |T p - p| / max p for that p.
    """
    t_hat = embedded_chain(rates)
    d = holding_time_diag(rates)
    p_hat = ladder_stationary(ladder) / d
    return float(np.max(np.abs(t_hat @ p_hat - p_hat)) / p_hat.max())


@dataclass(frozen=True)
class GapExperimentResult:
    """Per-size mean spectral gaps of the two samplers, with standard errors."""

    sizes: np.ndarray
    draws_per_size: int
    mjhmc_mean: np.ndarray
    mjhmc_stderr: np.ndarray
    hmc_mean: np.ndarray
    hmc_stderr: np.ndarray

    def rows(self) -> Iterable[tuple]:
        """Long-format rows (k, sampler, mean_gap, std_error, draws) for CSV output."""
        for i, k in enumerate(self.sizes):
            yield (int(k), "mjhmc", self.mjhmc_mean[i], self.mjhmc_stderr[i], self.draws_per_size)
            yield (int(k), "hmc", self.hmc_mean[i], self.hmc_stderr[i], self.draws_per_size)


# Odd sizes only: on an even ring every L or F transition flips the parity
# of rung+side, so both chains are bipartite and |lambda_2| = 1 exactly,
# collapsing the spectral gap to zero regardless of the energies.
DEFAULT_LADDER_SIZES = (5, 9, 17, 33, 65, 129, 201)


def _draw_ladder(k: int, rng: np.random.Generator) -> tuple[Ladder, np.ndarray]:
    """Draw a ladder with standard-normal rung energies, redrawing degenerate ones.

    A draw is degenerate when every flip rate vanishes (the two travel
    directions decouple into separate cycles); this has probability zero
    under continuous energy draws but is guarded anyway.
    """
    while True:
        ladder = Ladder(rng.standard_normal(k))
        rates = build_mjhmc_rate_matrix(ladder)
        off = rates.copy()
        np.fill_diagonal(off, 0.0)
        flip_rates = np.concatenate([np.diag(off[k:, :k]), np.diag(off[:k, k:])])
        if np.any(flip_rates > 0):
            return ladder, rates


def random_ladder_experiment(
    sizes: Sequence[int] = DEFAULT_LADDER_SIZES,
    draws_per_size: int = 250,
    seed: int = 0,
) -> GapExperimentResult:
    """Average spectral gaps over random energy landscapes, per ladder size.

    Rung energies are i.i.d. standard normal.  Each (size, draw) task uses
    its own deterministically derived random stream, so results do not
    depend on execution order and the tasks could run in parallel.
    """
    sizes = np.asarray(list(sizes), dtype=int)
    if np.any(sizes < 3):
        raise ValueError("ladder sizes must be at least 3")
    if draws_per_size < 1:
        raise ValueError("draws_per_size must be at least 1")

    root = np.random.SeedSequence(seed)
    per_size = root.spawn(len(sizes))
    mj_mean = np.empty(len(sizes))
    mj_err = np.empty(len(sizes))
    hmc_mean = np.empty(len(sizes))
    hmc_err = np.empty(len(sizes))
    for i, k in enumerate(sizes):
        gaps_mj = np.empty(draws_per_size)
        gaps_hmc = np.empty(draws_per_size)
        for j, task_seq in enumerate(per_size[i].spawn(draws_per_size)):
            rng = np.random.default_rng(task_seq)
            ladder, rates = _draw_ladder(int(k), rng)
            gaps_mj[j] = spectral_gap(embedded_chain(rates))
            gaps_hmc[j] = spectral_gap(build_hmc_ladder_chain(ladder))
        mj_mean[i] = gaps_mj.mean()
        mj_err[i] = gaps_mj.std(ddof=1) / np.sqrt(draws_per_size) if draws_per_size > 1 else 0.0
        hmc_mean[i] = gaps_hmc.mean()
        hmc_err[i] = gaps_hmc.std(ddof=1) / np.sqrt(draws_per_size) if draws_per_size > 1 else 0.0
    return GapExperimentResult(
        sizes=sizes,
        draws_per_size=draws_per_size,
        mjhmc_mean=mj_mean,
        mjhmc_stderr=mj_err,
        hmc_mean=hmc_mean,
        hmc_stderr=hmc_err,
    )


def min_exponential_oracle(
    rates: Sequence[float], n_trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Empirical win frequencies of competing exponential clocks.

    Simulates ``n_trials`` races between independent exponentials with the
    given rates and returns how often each clock rang first.  Serves as the
    independent check for the embedded chain's analytic probabilities.
    """
    rates = np.asarray(rates, dtype=float)
    if rates.size < 2:
        raise ValueError("need at least two competing rates")
    if np.any(rates <= 0):
        raise ValueError("rates must be positive")
    draws = rng.standard_exponential((int(n_trials), rates.size)) / rates
    winners = np.argmin(draws, axis=1)
    return np.bincount(winners, minlength=rates.size) / float(n_trials)
