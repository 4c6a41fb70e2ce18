"""Target distributions expressed as energy functions.

An energy function assigns ``E(x) = -log pi(x) + const`` to a position
``x``; samplers only ever consume energy *differences* and gradients, so
the constant never matters.  Momentum is standard normal with unit mass
throughout, making the joint (total) energy ``E(x) + |v|^2 / 2``.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .phase import PhaseState


@dataclass(frozen=True)
class RoughWellParams:
    """Width of the quadratic well and period of the sinusoidal ripples."""

    sigma1: float = 100.0
    sigma2: float = 4.0

    def __post_init__(self):
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise ValueError("sigma1 and sigma2 must be positive")


@dataclass(frozen=True)
class GaussianParams:
    """Diagonal-precision Gaussian target (analytic moments for tests)."""

    precision_diag: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.precision_diag, dtype=float))
        if p.ndim != 1 or p.size == 0:
            raise ValueError("precision_diag must be a nonempty vector")
        if not np.all(p > 0):
            raise ValueError("all precisions must be strictly positive")
        object.__setattr__(self, "precision_diag", p)

    @property
    def dim(self) -> int:
        return self.precision_diag.size


def _check_dim(x: np.ndarray, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise DimensionError(f"expected vector of dimension {dim}, got shape {x.shape}")
    return x


def rough_well_energy(x, params: RoughWellParams = RoughWellParams()) -> float:
    """Energy of the 2D rough-well distribution.

    A wide quadratic well of width ``sigma1`` overlaid with sinusoidal
    ripples of period ``sigma2``:

        E(x) = (x1^2 + x2^2) / (2 sigma1^2)
               + cos(pi x1 / sigma2) + cos(pi x2 / sigma2)

    The ripples make the surface rough, so traversing the well needs many
    small integrator steps even though the distribution is well conditioned.
    """
    x = _check_dim(x, 2)
    quad = float(np.dot(x, x)) / (2.0 * params.sigma1**2)
    return quad + float(np.sum(np.cos(np.pi * x / params.sigma2)))


def rough_well_gradient(x, params: RoughWellParams = RoughWellParams()) -> np.ndarray:
    """Gradient of :func:`rough_well_energy`: x_i / sigma1^2 - (pi/sigma2) sin(pi x_i / sigma2)."""
    x = _check_dim(x, 2)
    return x / params.sigma1**2 - (np.pi / params.sigma2) * np.sin(np.pi * x / params.sigma2)


def gaussian_energy(x, params: GaussianParams) -> float:
    """Energy of a diagonal Gaussian: 0.5 * sum_i p_i x_i^2."""
    x = _check_dim(x, params.dim)
    return 0.5 * float(np.dot(params.precision_diag, x * x))


def gaussian_gradient(x, params: GaussianParams) -> np.ndarray:
    """Gradient of :func:`gaussian_energy`: p_i x_i."""
    x = _check_dim(x, params.dim)
    return params.precision_diag * x


class EnergyFunction(abc.ABC):
    """A target distribution given by its energy and gradient.

    Implementations must be pure and deterministic; any caching lives in
    the samplers.  ``gradient`` must agree with central finite differences
    of ``energy``.
    """

    dim: int

    @abc.abstractmethod
    def energy(self, x) -> float:
        """E(x), i.e. -log pi(x) up to an additive constant."""

    @abc.abstractmethod
    def gradient(self, x) -> np.ndarray:
        """dE/dx as a freshly allocated vector of the same dimension as x.

        Must not alias ``x``: the integrator mutates its position buffer in
        place between gradient calls.
        """


class RoughWell(EnergyFunction):
    """The 2D rough-well target."""

    dim = 2

    def __init__(self, params: RoughWellParams = RoughWellParams()):
        self.params = params
        # precomputed constants: these run in the integrator's inner loop
        self._half_inv_s1sq = 0.5 / params.sigma1**2
        self._freq = np.pi / params.sigma2

    def energy(self, x) -> float:
        x = _check_dim(x, 2)
        return self._half_inv_s1sq * float(np.dot(x, x)) + float(np.sum(np.cos(self._freq * x)))

    def gradient(self, x) -> np.ndarray:
        x = _check_dim(x, 2)
        return (2.0 * self._half_inv_s1sq) * x - self._freq * np.sin(self._freq * x)


class DiagonalGaussian(EnergyFunction):
    """Gaussian target with diagonal precision matrix."""

    def __init__(self, params: GaussianParams):
        self.params = params
        self.dim = params.dim

    @classmethod
    def isotropic(cls, dim: int, precision: float = 1.0) -> "DiagonalGaussian":
        return cls(GaussianParams(np.full(dim, float(precision))))

    def energy(self, x) -> float:
        return gaussian_energy(x, self.params)

    def gradient(self, x) -> np.ndarray:
        return gaussian_gradient(x, self.params)


class CountingEnergy(EnergyFunction):
    """Wrapper that counts energy and gradient evaluations.

    Samplers wrap their target in this to report true per-sample costs;
    nothing is cached here, so every avoided recomputation upstream shows
    up directly in the counts.
    """

    def __init__(self, inner: EnergyFunction):
        self.inner = inner
        self.dim = inner.dim
        self.energy_calls = 0
        self.gradient_calls = 0

    def energy(self, x) -> float:
        self.energy_calls += 1
        return self.inner.energy(x)

    def gradient(self, x) -> np.ndarray:
        self.gradient_calls += 1
        return self.inner.gradient(x)


def joint_energy(zeta: PhaseState, ef: EnergyFunction) -> float:
    """Total energy H(zeta) = E(x) + |v|^2 / 2 of a phase-space point."""
    if zeta.dim != ef.dim:
        raise DimensionError(f"state dimension {zeta.dim} != target dimension {ef.dim}")
    return ef.energy(zeta.x) + 0.5 * float(np.dot(zeta.v, zeta.v))
