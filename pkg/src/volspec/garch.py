"""Discrete volatility recursions: GARCH(1,1) and two power-law modifications.

Linear::

    s2[t] = a + b s2[t-1] w[t-1]^2 + c s2[t-1]

Odd power (mu an odd integer >= 3, the sign of w survives)::

    s2[t] = a + b sigma[t-1]^mu w[t-1]^mu + c s2[t-1]

Absolute power (mu real > 2)::

    s2[t] = a + b sigma[t-1]^mu |w[t-1]|^mu + s2[t-1] - c sigma[t-1]^mu

The nonlinear recursions can go negative; the state is then set to zero and
the event is counted.
"""

from dataclasses import dataclass

import numpy as np

from volspec._backend import kernels as _kernels
from volspec.errors import ConfigError, NonFiniteError
from volspec.noise import NoiseSource
from volspec.trajectory import Trajectory

LINEAR = "linear"
POWER_ODD = "power_odd"
POWER_ABS = "power_abs"
VARIANTS = (LINEAR, POWER_ODD, POWER_ABS)
_VARIANT_CODE = {LINEAR: 0, POWER_ODD: 1, POWER_ABS: 2}

DEFAULT_N = 2**20
DEFAULT_BURN_IN = 100_000
_BLOCK = 1 << 18


def _is_odd_integer(mu):
    return float(mu).is_integer() and int(mu) % 2 == 1


@dataclass(frozen=True)
class GarchSpec:
    """Parameters of one recursion; ``h`` is the sampling period of a step."""

    variant: str
    a: float
    b: float
    c: float
    mu: float | None = None
    h: float = 1.0
    sigma2_0: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown GARCH variant {self.variant!r}; expected one of {VARIANTS}")
        if not self.a > 0:
            raise ConfigError(f"a must be positive, got {self.a}")
        if not self.b >= 0:
            raise ConfigError(f"b must be non-negative, got {self.b}")
        if not self.h > 0:
            raise ConfigError(f"h must be positive, got {self.h}")
        if self.variant == LINEAR:
            if not self.c >= 0:
                raise ConfigError(f"linear GARCH needs c >= 0, got {self.c}")
            if self.mu is not None:
                raise ConfigError("mu is not a parameter of linear GARCH")
        elif self.mu is None:
            raise ConfigError(f"variant {self.variant} needs mu")
        elif self.variant == POWER_ODD and not (_is_odd_integer(self.mu) and self.mu >= 3):
            raise ConfigError(f"power_odd needs an odd integer mu >= 3, got {self.mu}")
        elif self.variant == POWER_ABS and not self.mu > 2:
            raise ConfigError(f"power_abs needs mu > 2, got {self.mu}")
        if self.sigma2_0 is None:
            if self.variant == LINEAR and self.b + self.c < 1:
                s0 = self.a / (1 - self.b - self.c)
            else:
                s0 = 1.0
            object.__setattr__(self, "sigma2_0", s0)
        elif not self.sigma2_0 >= 0:
            raise ConfigError(f"sigma2_0 must be non-negative, got {self.sigma2_0}")


def step_linear(sigma2_prev, omega_prev, spec):
    return spec.a + spec.b * sigma2_prev * omega_prev * omega_prev + spec.c * sigma2_prev


def step_power_odd(sigma2_prev, omega_prev, spec):
    sig = sigma2_prev**0.5
    return max(0.0, spec.a + spec.b * sig**spec.mu * omega_prev**spec.mu + spec.c * sigma2_prev)


def step_power_abs(sigma2_prev, omega_prev, spec):
    sm = (sigma2_prev**0.5) ** spec.mu
    return max(0.0, spec.a + spec.b * sm * abs(omega_prev) ** spec.mu + sigma2_prev - spec.c * sm)


STEPS = {LINEAR: step_linear, POWER_ODD: step_power_odd, POWER_ABS: step_power_abs}


def returns(sigma_t, omega_t):
    """Heteroskedastic return z = sigma * omega (scalars or arrays)."""
    return sigma_t * omega_t


def simulate_garch(spec, seed, n=DEFAULT_N, burn_in=DEFAULT_BURN_IN, backend=None):
    """Iterate ``spec`` for ``burn_in + n`` steps and return the last ``n`` values of sigma^2.

    ``stats["clamps"]`` counts how often the state was reset to zero (always 0
    for the linear variant).
    """
    if not isinstance(spec, GarchSpec):
        raise ConfigError(f"expected GarchSpec, got {type(spec).__name__}")
    n, burn_in = int(n), int(burn_in)
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    if burn_in < 0:
        raise ConfigError(f"burn_in must be >= 0, got {burn_in}")
    k = _kernels if backend is None else backend
    src = NoiseSource(seed, _kernels=k)
    total = n + burn_in
    out = np.empty(total)
    code = _VARIANT_CODE[spec.variant]
    mu = 0.0 if spec.mu is None else float(spec.mu)
    s2 = float(spec.sigma2_0)
    clamps = 0
    for start in range(0, total, _BLOCK):
        stop = min(start + _BLOCK, total)
        omega = src.normals(stop - start)
        s2, n_clamps, bad = k.garch_run(code, float(spec.a), float(spec.b), float(spec.c), mu,
                                        s2, omega, out[start:stop])
        if bad >= 0:
            raise NonFiniteError("GARCH variance overflowed", start + bad)
        clamps += n_clamps
    return Trajectory(dt=float(spec.h), values=out[burn_in:].copy(), burn_in=burn_in,
                      seed=int(seed), spec=spec, stats={"clamps": clamps, "steps": total})
