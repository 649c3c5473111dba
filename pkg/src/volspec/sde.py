"""Nonlinear SDEs with power-law multiplicative noise.

    dx = sigma^2 (eta - lambda/2) x^(2 eta - 1) dt + sigma x^eta dW

The diffusion is restricted from below and above either by mirror-reflecting
walls at ``x_min``/``x_max`` or by two extra drift terms that put
exponential cut-offs on the steady-state density outside that interval.
Integration uses Euler-Maruyama with the state-dependent step
``kappa^2 / (sigma^2 x^(2 (eta - 1)))``, which keeps the relative noise
increment per step near ``kappa``.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from volspec._backend import kernels as _kernels
from volspec.errors import ConfigError, DomainError, NonFiniteError
from volspec.noise import NoiseSource
from volspec.trajectory import Trajectory

DEFAULT_KAPPA = 0.1
DEFAULT_N_OUT = 2**20
_EPS_FIRST = 1 << 10
_EPS_BLOCK = 1 << 18


@dataclass(frozen=True)
class Reflective:
    """Mirror-reflecting walls at ``x_min`` and ``x_max``."""

    name = "reflective"


@dataclass(frozen=True)
class ExponentialCutoffs:
    """Soft restriction: steady state ~ x^-lambda exp(-(x_min/x)^m - (x/x_max)^m)."""

    m: float = 1.0
    name = "cutoff"


@dataclass(frozen=True)
class SdeSpec:
    eta: float
    lam: float
    sigma: float = 1.0
    x_min: float = 1.0
    x_max: float = 1e3
    restriction: Reflective | ExponentialCutoffs = field(default_factory=Reflective)
    x0: float | None = None

    def __post_init__(self):
        if not (self.x_min > 0 and self.x_max > self.x_min):
            raise ConfigError(f"need 0 < x_min < x_max, got x_min={self.x_min}, x_max={self.x_max}")
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if isinstance(self.restriction, ExponentialCutoffs):
            if not self.restriction.m > 0:
                raise ConfigError(f"cutoff sharpness m must be positive, got {self.restriction.m}")
        elif not isinstance(self.restriction, Reflective):
            raise ConfigError(f"unknown restriction {self.restriction!r}")
        if self.x0 is None:
            object.__setattr__(self, "x0", math.sqrt(self.x_min * self.x_max))
        elif isinstance(self.restriction, Reflective) and not self.x_min <= self.x0 <= self.x_max:
            raise ConfigError(f"x0={self.x0} outside [{self.x_min}, {self.x_max}]")
        elif not self.x0 > 0:
            raise ConfigError(f"x0 must be positive, got {self.x0}")

    @property
    def reflective(self):
        return isinstance(self.restriction, Reflective)

    @property
    def zero_width_psd_range(self):
        """True for eta == 1, where no power-law PSD range exists."""
        return self.eta == 1


def _check_positive(x):
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")


def drift(x, spec):
    _check_positive(x)
    bracket = spec.eta - 0.5 * spec.lam
    if not spec.reflective:
        m = spec.restriction.m
        bracket = bracket + 0.5 * m * ((spec.x_min / x) ** m - (x / spec.x_max) ** m)
    return spec.sigma**2 * bracket * x ** (2 * spec.eta - 1)


def diffusion(x, spec):
    _check_positive(x)
    return spec.sigma * x**spec.eta


def adaptive_dt(x, spec, kappa=DEFAULT_KAPPA):
    """Internal step size at state ``x``: kappa^2 / (sigma^2 x^(2(eta-1)))."""
    _check_positive(x)
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    return kappa**2 / (spec.sigma**2 * x ** (2 * (spec.eta - 1)))


def simulate_sde(spec, seed, n_out=DEFAULT_N_OUT, dt_out=1e-3, kappa=DEFAULT_KAPPA,
                 burn_in=None, backend=None):
    """Integrate ``spec`` and sample the path every ``dt_out``.

    Internal steps never cross an output instant, so each output is the state
    exactly at ``j * dt_out``. The first ``burn_in`` outputs (default 10% of
    ``n_out``) are dropped; ``n_out`` samples are returned.
    """
    if not isinstance(spec, SdeSpec):
        raise ConfigError(f"expected SdeSpec, got {type(spec).__name__}")
    n_out = int(n_out)
    if n_out < 2:
        raise ConfigError(f"n_out must be >= 2, got {n_out}")
    if not dt_out > 0:
        raise ConfigError(f"dt_out must be positive, got {dt_out}")
    if not kappa > 0:
        raise ConfigError(f"kappa must be positive, got {kappa}")
    if burn_in is None:
        burn_in = n_out // 10
    burn_in = int(burn_in)
    if burn_in < 0:
        raise ConfigError(f"burn_in must be >= 0, got {burn_in}")
    if spec.zero_width_psd_range:
        warnings.warn("eta == 1: the power-law PSD range has zero width", stacklevel=2)

    k = _kernels if backend is None else backend
    src = NoiseSource(seed, _kernels=k)
    out = np.empty(burn_in + n_out)
    out[0] = spec.x0
    cutoff = 0 if spec.reflective else 1
    m = 0.0 if spec.reflective else float(spec.restriction.m)
    x, remaining, j, steps = float(spec.x0), float(dt_out), 1, 0
    block = _EPS_FIRST
    while j < out.shape[0]:
        # short runs draw little noise; blocks grow to amortize the kernel call
        eps = src.normals(block)
        block = min(2 * block, _EPS_BLOCK)
        pos = 0
        x, remaining, pos, j, n_steps, status = k.sde_advance(
            x, remaining, float(dt_out), float(spec.eta), float(spec.lam), float(spec.sigma),
            float(spec.x_min), float(spec.x_max), cutoff, m, float(kappa),
            eps, pos, out, j)
        if status:
            raise NonFiniteError("SDE state became non-finite", steps + n_steps)
        steps += n_steps
    return Trajectory(dt=float(dt_out), values=out[burn_in:].copy(), burn_in=burn_in,
                      seed=int(seed), spec=spec, stats={"steps": steps, "kappa": float(kappa)})
