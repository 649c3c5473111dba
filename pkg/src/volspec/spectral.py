"""PDF and PSD estimation and power-law fitting.

Conventions: frequencies are cycles per unit time of the trajectory's ``dt``;
spectra are one-sided, so that ``sum(power) * df`` equals the population
variance of the (per-segment demeaned) input.
"""

from dataclasses import dataclass

import numpy as np
from volspec.errors import (
    AllZeroError,
    EmptyInputError,
    GridMismatchError,
    InsufficientPointsError,
    TooShortError,
)

DEFAULT_BINS_PER_DECADE = 10
DEFAULT_SEGMENTS = 16
MIN_PDF_SAMPLES = 1000


@dataclass
class Histogram:
    edges: np.ndarray
    densities: np.ndarray
    n_samples: int
    n_excluded: int = 0

    @property
    def centers(self):
        """Geometric bin centres."""
        return np.sqrt(self.edges[:-1] * self.edges[1:])

    @property
    def widths(self):
        return np.diff(self.edges)

    def occupied(self):
        """(centers, densities) of the bins holding at least one sample."""
        mask = self.densities > 0
        return self.centers[mask], self.densities[mask]


@dataclass
class Spectrum:
    freqs: np.ndarray
    power: np.ndarray
    dt: float
    n_segments: int

    @property
    def df(self):
        return self.freqs[0]

    @property
    def nyquist(self):
        return 0.5 / self.dt


@dataclass
class PowerLawFit:
    exponent: float
    stderr: float
    range: tuple
    r_squared: float
    n_bins: int = 0
    intercept: float = 0.0


def _values(traj):
    return np.asarray(getattr(traj, "values", traj), dtype=np.float64)


def pdf_estimate(traj, bins_per_decade=DEFAULT_BINS_PER_DECADE):
    """Log-binned density of the positive samples of one or several trajectories.

    Zeros (clamped GARCH states) are excluded from the estimate and counted in
    ``n_excluded``. A list of trajectories is pooled into a single histogram.
    """
    runs = traj if isinstance(traj, (list, tuple)) else [traj]
    arrays = [_values(t) for t in runs]
    total = sum(a.size for a in arrays)
    if total == 0:
        raise EmptyInputError("no samples")
    if total < MIN_PDF_SAMPLES:
        raise EmptyInputError(f"need at least {MIN_PDF_SAMPLES} samples, got {total}")
    lo, hi, n_pos = np.inf, -np.inf, 0
    for a in arrays:
        pos = a[a > 0]
        if pos.size:
            lo, hi = min(lo, pos.min()), max(hi, pos.max())
            n_pos += pos.size
    if n_pos == 0:
        raise AllZeroError("all samples are zero")
    if hi > lo:
        n_bins = max(1, int(np.ceil(np.log10(hi / lo) * bins_per_decade)))
        edges = np.geomspace(lo, hi, n_bins + 1)
        edges[0], edges[-1] = lo, hi
    else:
        half = 10.0 ** (0.5 / bins_per_decade)
        edges = np.array([lo / half, lo * half])
    counts = np.zeros(edges.size - 1)
    for a in arrays:
        counts += np.histogram(a[a > 0], bins=edges)[0]
    densities = counts / (n_pos * np.diff(edges))
    return Histogram(edges=edges, densities=densities, n_samples=n_pos, n_excluded=total - n_pos)


def psd_estimate(traj, n_segments=DEFAULT_SEGMENTS, dt=None):
    """Average of rectangular-window periodograms over non-overlapping segments.

    Each segment has its own mean removed. Trailing samples that do not fill a
    segment are ignored. The zero-frequency bin is dropped.
    """
    x = _values(traj)
    if dt is None:
        dt = traj.dt
    n_segments = int(n_segments)
    if n_segments < 1:
        raise ValueError(f"n_segments must be >= 1, got {n_segments}")
    if x.size < 2 * n_segments:
        raise TooShortError(f"{x.size} samples cannot fill {n_segments} segments of length >= 2")
    seg_len = x.size // n_segments
    segs = x[: seg_len * n_segments].reshape(n_segments, seg_len)
    segs = segs - segs.mean(axis=1, keepdims=True)
    spec = np.abs(np.fft.rfft(segs, axis=1)) ** 2
    power = spec.mean(axis=0)[1:] * (2.0 * dt / seg_len)
    if seg_len % 2 == 0:
        power[-1] *= 0.5  # Nyquist bin has no mirror image
    freqs = np.arange(1, power.size + 1) / (seg_len * dt)
    return Spectrum(freqs=freqs, power=power, dt=float(dt), n_segments=n_segments)


def ensemble_average(spectra):
    """Bin-wise mean of spectra sharing one frequency grid."""
    spectra = list(spectra)
    if not spectra:
        raise EmptyInputError("no spectra to average")
    first = spectra[0]
    for s in spectra[1:]:
        if s.dt != first.dt or not np.array_equal(s.freqs, first.freqs):
            raise GridMismatchError("spectra have different frequency grids")
    power = np.mean([s.power for s in spectra], axis=0)
    return Spectrum(freqs=first.freqs.copy(), power=power, dt=first.dt,
                    n_segments=sum(s.n_segments for s in spectra))


def fit_power_law(xs, ys, range, bins_per_decade=DEFAULT_BINS_PER_DECADE):
    """Least-squares slope of log10(y) against log10(x) inside ``range``.

    Points are first averaged (in log space) within log-spaced bins so every
    bin carries equal weight, whatever the density of points along x.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    lo, hi = range
    if not 0 < lo < hi:
        raise ValueError(f"fit range must satisfy 0 < lo < hi, got {range}")
    sel = (xs >= lo) & (xs <= hi)
    x, y = xs[sel], ys[sel]
    if x.size < 5:
        raise InsufficientPointsError(f"{x.size} points inside {range}, need >= 5")
    if np.any(y <= 0):
        raise ValueError("power-law fit needs positive ordinates")
    lx, ly = np.log10(x), np.log10(y)
    n_bins = max(1, int(np.ceil(np.log10(hi / lo) * bins_per_decade)))
    idx = np.minimum(((lx - np.log10(lo)) / np.log10(hi / lo) * n_bins).astype(int), n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    used = counts > 0
    bx = np.bincount(idx, weights=lx, minlength=n_bins)[used] / counts[used]
    by = np.bincount(idx, weights=ly, minlength=n_bins)[used] / counts[used]
    if bx.size < 3:
        raise InsufficientPointsError(f"only {bx.size} occupied log bins inside {range}, need >= 3")
    # OLS with the slope error taken from the residuals directly; going via
    # 1 - r^2 would leave ~1e-8 of rounding noise on an exact power law
    dx, dy = bx - bx.mean(), by - by.mean()
    sxx, syy = np.dot(dx, dx), np.dot(dy, dy)
    slope = np.dot(dx, dy) / sxx
    intercept = by.mean() - slope * bx.mean()
    resid = by - (intercept + slope * bx)
    ssr = np.dot(resid, resid)
    stderr = np.sqrt(ssr / (bx.size - 2) / sxx) if bx.size > 2 else 0.0
    r2 = 1.0 - ssr / syy if syy > 0 else 1.0
    return PowerLawFit(exponent=float(slope), stderr=float(stderr), range=(lo, hi),
                       r_squared=float(r2), n_bins=int(bx.size), intercept=float(intercept))


def fit_pdf(hist, range, bins_per_decade=DEFAULT_BINS_PER_DECADE):
    x, d = hist.occupied()
    return fit_power_law(x, d, range, bins_per_decade)


def fit_psd(spectrum, range, bins_per_decade=DEFAULT_BINS_PER_DECADE):
    return fit_power_law(spectrum.freqs, spectrum.power, range, bins_per_decade)
