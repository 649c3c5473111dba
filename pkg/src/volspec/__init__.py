"""Power-law PDF and 1/f^beta PSD of GARCH-type volatility and nonlinear SDE signals."""

__version__ = "0.1.0"

from volspec._backend import BACKEND
from volspec.garch import GarchSpec, simulate_garch
from volspec.limits import (
    DIVERGENT,
    ZERO_WIDTH,
    diffusion_limit,
    map_linear,
    map_power_abs,
    map_power_odd,
    predicted_beta,
)
from volspec.noise import NoiseSource
from volspec.sde import ExponentialCutoffs, Reflective, SdeSpec, simulate_sde
from volspec.spectral import ensemble_average, fit_power_law, pdf_estimate, psd_estimate
from volspec.trajectory import Trajectory

__all__ = [
    "BACKEND",
    "DIVERGENT",
    "ZERO_WIDTH",
    "ExponentialCutoffs",
    "GarchSpec",
    "NoiseSource",
    "Reflective",
    "SdeSpec",
    "Trajectory",
    "diffusion_limit",
    "ensemble_average",
    "fit_power_law",
    "map_linear",
    "map_power_abs",
    "map_power_odd",
    "pdf_estimate",
    "predicted_beta",
    "psd_estimate",
    "simulate_garch",
    "simulate_sde",
]
