"""Diffusion limits of the GARCH recursions and the resulting power-law predictions.

Each recursion with sampling period ``h`` is mapped to continuum parameters
``A``, ``B^2``, ``C`` that do not depend on ``h``. The limiting SDE for
``y = sigma^2`` belongs to the class ``dx = sigma^2 (eta - lambda/2) x^(2eta-1) dt
+ sigma x^eta dW`` (up to cut-off terms), which fixes the tail exponent
``lambda``, the noise exponent ``eta`` and through them the PSD exponent.

Two outcomes are values rather than errors: ``DIVERGENT`` (no finite PSD
exponent, eta == 1) and ``ZERO_WIDTH`` (no power-law frequency band).
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from volspec.errors import DomainError
from volspec.garch import LINEAR, POWER_ABS, POWER_ODD, GarchSpec, _is_odd_integer
from volspec.sde import SdeSpec


class Outcome(enum.Enum):
    DIVERGENT = "Divergent"
    ZERO_WIDTH = "ZeroWidth"

    def __str__(self):
        return self.value


DIVERGENT = Outcome.DIVERGENT
ZERO_WIDTH = Outcome.ZERO_WIDTH

GBM_BETA = 2.0  # PSD exponent of geometric Brownian motion, the eta == 1 reference


@dataclass(frozen=True)
class DiffusionLimit:
    variant: str
    A: float
    B2: float
    C: float
    lam: float
    eta: float
    scales: dict
    beta_predicted: float | Outcome
    f_range: tuple | Outcome
    mu: float | None = None
    flags: tuple = field(default_factory=tuple)

    @property
    def B(self):
        """|B|, the noise amplitude of the limiting SDE."""
        return math.sqrt(self.B2)


def double_factorial(n):
    """n!! by integer recurrence; (-1)!! = 0!! = 1."""
    n = int(n)
    if n < -1:
        raise DomainError(f"double factorial undefined for {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def gaussian_even_moment(k):
    """<w^(2k)> = (2k-1)!! for a standard normal w."""
    return double_factorial(2 * int(k) - 1)


def gaussian_abs_moment(mu):
    """<|w|^mu> = 2^(mu/2) Gamma((mu+1)/2) / sqrt(pi) for a standard normal w.

    Returns ``inf`` once the moment exceeds the double range (mu above ~ 300).
    """
    if not mu > 0:
        raise DomainError(f"mu must be positive, got {mu}")
    if mu < 300:
        return 2.0 ** (mu / 2) * math.gamma((mu + 1) / 2) / math.sqrt(math.pi)
    log_m = mu / 2 * math.log(2.0) + math.lgamma((mu + 1) / 2) - 0.5 * math.log(math.pi)
    return math.exp(log_m) if log_m < 709.0 else math.inf


def predicted_beta(lam, eta):
    """PSD exponent 1 + (lambda - 3) / (2 (eta - 1)); ``DIVERGENT`` when eta == 1."""
    if eta == 1:
        return DIVERGENT
    return 1 + (lam - 3) / (2 * (eta - 1))


def frequency_range(eta, sigma, x_min, x_max):
    """Cyclic frequency band ``(f_low, f_high)`` where the PSD is a power law.

    Band edges come from ``sigma^2 x^(2(eta-1)) = 2 pi f`` at the two
    restriction scales; at eta == 1 the band has zero width.
    """
    if not (0 < x_min < x_max):
        raise DomainError(f"need 0 < x_min < x_max, got {x_min}, {x_max}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if eta == 1:
        return ZERO_WIDTH
    s2 = sigma * sigma
    if eta > 1:
        lo, hi = s2 * x_min ** (2 * (eta - 1)), s2 * x_max ** (2 * (eta - 1))
    else:
        lo, hi = s2 * x_max ** (-2 * (1 - eta)), s2 * x_min ** (-2 * (1 - eta))
    return (lo / (2 * math.pi), hi / (2 * math.pi))


def _check_common(a, b, h):
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")


def _lower_scale(A, B2, mu):
    return (2 * A / ((mu - 1) * B2)) ** (1 / (mu - 1))


def map_linear(a, b, c, h=1.0):
    """Diffusion limit of GARCH(1,1): dy = (A - C y) dt + |B| y dW."""
    _check_common(a, b, h)
    A = a / h
    C = (1 - b - c) / h
    B2 = 2 * b * b / h
    lam = 2 + 2 * C / B2
    return DiffusionLimit(
        variant=LINEAR, A=A, B2=B2, C=C, lam=lam, eta=1.0,
        scales={"y_min": 2 * A / B2},
        beta_predicted=predicted_beta(lam, 1.0),
        f_range=ZERO_WIDTH,
    )


def invert_linear(limit, h=1.0):
    """Discrete (a, b, c) at period ``h`` that map to ``limit``."""
    a = limit.A * h
    b = math.sqrt(limit.B2 * h / 2)
    c = 1 - b - limit.C * h
    return a, b, c


def map_power_odd(a, b, c, mu, h=1.0):
    """Diffusion limit of the odd-power recursion: dy = (A - C y) dt + |B| y^(mu/2) dW."""
    if not (_is_odd_integer(mu) and mu >= 3):
        raise DomainError(f"mu must be an odd integer >= 3, got {mu}")
    _check_common(a, b, h)
    mu = int(mu)
    A = a / h
    C = (1 - c) / h
    B2 = gaussian_even_moment(mu) * b * b / h
    scales = {"y1": _lower_scale(A, B2, mu)}
    flags = ()
    if C > 0:
        scales["y2"] = (2 * C / ((mu - 2) * B2)) ** (1 / (mu - 2))
    elif C < 0:
        flags = ("y2 undefined: C < 0 (c > 1)",)
    eta = mu / 2
    return DiffusionLimit(
        variant=POWER_ODD, A=A, B2=B2, C=C, lam=float(mu), eta=eta, scales=scales,
        beta_predicted=predicted_beta(mu, eta),
        f_range=frequency_range(eta, math.sqrt(B2), scales["y1"], math.inf),
        mu=float(mu), flags=flags,
    )


def map_power_abs(a, b, c, mu, h=1.0):
    """Diffusion limit of the absolute-power recursion: dy = (A + C y^(mu/2)) dt + |B| y^(mu/2) dW."""
    if not mu > 2:
        raise DomainError(f"mu must exceed 2, got {mu}")
    _check_common(a, b, h)
    w_mean = gaussian_abs_moment(mu)
    w_var = gaussian_abs_moment(2 * mu) - w_mean * w_mean
    if not math.isfinite(w_var):
        raise DomainError(f"noise moments of order {2 * mu} overflow; mu too large")
    A = a / h
    C = (b * w_mean - c) / h
    B2 = w_var * b * b / h
    sign_c = float(np.sign(C))
    scales = {
        "y1": _lower_scale(A, B2, mu),
        "y3": (4 * abs(C) / ((mu - 2) * B2)) ** (2 / (mu - 2)),
        "sign_c": sign_c,
    }
    eta = mu / 2
    return DiffusionLimit(
        variant=POWER_ABS, A=A, B2=B2, C=C, lam=float(mu), eta=eta, scales=scales,
        beta_predicted=predicted_beta(mu, eta),
        f_range=frequency_range(eta, math.sqrt(B2), scales["y1"], math.inf),
        mu=float(mu),
    )


def diffusion_limit(spec):
    """Dispatch on ``spec.variant``."""
    if spec.variant == LINEAR:
        return map_linear(spec.a, spec.b, spec.c, spec.h)
    if spec.variant == POWER_ODD:
        return map_power_odd(spec.a, spec.b, spec.c, spec.mu, spec.h)
    return map_power_abs(spec.a, spec.b, spec.c, spec.mu, spec.h)


def sde_predictions(spec):
    """``(lambda, eta, beta, f_range)`` for an :class:`SdeSpec`."""
    beta = predicted_beta(spec.lam, spec.eta)
    return spec.lam, spec.eta, beta, frequency_range(spec.eta, spec.sigma, spec.x_min, spec.x_max)


class SteadyStatePdf:
    """Closed-form stationary density on ``support`` with a quadrature normalization.

    The integral is taken over ``u = log x`` after shifting the log-density by
    its maximum on a coarse grid, so sharply peaked densities neither overflow
    nor slip between quadrature nodes.
    """

    def __init__(self, log_density, support, pivots=(1.0,)):
        self._log_density = log_density
        self.support = support
        self._pivots = tuple(sorted(pivots))
        self._log_integral = None

    def _log_g(self, u):
        # log of the integrand in u = log x
        with np.errstate(all="ignore"):
            v = self._log_density(np.exp(u)) + u
        return np.where(np.isnan(v), -np.inf, v)

    def unnormalized(self, x):
        x = np.asarray(x, dtype=np.float64)
        if np.any(x <= 0):
            raise DomainError("density is defined for x > 0 only")
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            out = np.where(inside, np.exp(self._log_density(np.where(inside, x, 1.0))), 0.0)
        return out if out.ndim else float(out)

    @property
    def log_integral(self):
        """log of the integral of the unnormalized density over the support."""
        if self._log_integral is None:
            lo, hi = self.support
            u_lo = math.log(lo) if lo > 0 else -math.inf
            u_hi = math.log(hi) if math.isfinite(hi) else math.inf
            piv = [math.log(p) for p in self._pivots if p > 0]
            grid = np.linspace(max(u_lo, min(piv) - 60.0), min(u_hi, max(piv) + 60.0), 4001)
            g = self._log_g(grid)
            shift = float(np.max(g))
            peak = float(grid[np.argmax(g)])

            def integrand(u):
                v = float(self._log_g(np.float64(u))) - shift
                return math.exp(v) if v > -745.0 else 0.0

            cuts = sorted({u_lo, u_hi, peak, *(p for p in piv if u_lo < p < u_hi)})
            total = 0.0
            for u0, u1 in zip(cuts[:-1], cuts[1:]):
                total += integrate.quad(integrand, u0, u1, epsabs=0.0, epsrel=1e-10,
                                        limit=500)[0]
            self._log_integral = shift + math.log(total)
        return self._log_integral

    @property
    def normalization(self):
        """1 / integral of the unnormalized density (may under/overflow for extreme shapes)."""
        return math.exp(-self.log_integral)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if np.any(x <= 0):
            raise DomainError("density is defined for x > 0 only")
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            logp = self._log_density(np.where(inside, x, 1.0)) - self.log_integral
            out = np.where(inside, np.exp(logp), 0.0)
        return out if out.ndim else float(out)


def steady_state_pdf(model):
    """Stationary density of an :class:`SdeSpec` or of a :class:`DiffusionLimit`."""
    if isinstance(model, GarchSpec):
        model = diffusion_limit(model)
    if isinstance(model, SdeSpec):
        lam = model.lam
        if model.reflective:
            return SteadyStatePdf(lambda x: -lam * np.log(x), (model.x_min, model.x_max),
                                  pivots=(model.x_min, model.x_max))
        m, lo, hi = model.restriction.m, model.x_min, model.x_max
        return SteadyStatePdf(
            lambda x: -lam * np.log(x) - (lo / x) ** m - (x / hi) ** m,
            (0.0, math.inf), pivots=(lo, hi))
    if isinstance(model, DiffusionLimit):
        lam, mu, sc = model.lam, model.mu, model.scales
        if model.variant == LINEAR:
            ymin = sc["y_min"]
            return SteadyStatePdf(lambda y: -lam * np.log(y) - ymin / y, (0.0, math.inf),
                                  pivots=(ymin,))
        y1 = sc["y1"]
        if model.variant == POWER_ODD:
            # signed form of the (y2/y)^(mu-2) term, valid for either sign of C
            k2 = 2 * model.C / ((mu - 2) * model.B2)
            return SteadyStatePdf(
                lambda y: -mu * np.log(y) - (y1 / y) ** (mu - 1) + k2 * y ** (2 - mu),
                (0.0, math.inf), pivots=(y1,))
        y3, s = sc["y3"], sc["sign_c"]
        return SteadyStatePdf(
            lambda y: -mu * np.log(y) - (y1 / y) ** (mu - 1) - s * (y3 / y) ** (mu / 2 - 1),
            (0.0, math.inf), pivots=(y1,) + ((y3,) if y3 > 0 else ()))
    raise TypeError(f"no steady state for {type(model).__name__}")


def theoretical_pdf(model, x):
    """``(unnormalized density at x, normalization constant)``."""
    pdf = steady_state_pdf(model)
    return pdf.unnormalized(x), pdf.normalization
