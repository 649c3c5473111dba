"""Experiment pipeline: simulate an ensemble, estimate PDF and PSD, fit, compare.

:func:`execute` does all the numerics and touches no files; :func:`run` adds
the CSV and report output. :func:`analyze_trajectories` is the analysis half
on its own, used to re-fit trajectories loaded from disk.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from volspec import __version__, io
from volspec._backend import BACKEND
from volspec.errors import InsufficientPointsError
from volspec.garch import simulate_garch
from volspec.limits import GBM_BETA, Outcome, diffusion_limit, sde_predictions
from volspec.sde import simulate_sde
from volspec.spectral import ensemble_average, fit_pdf, fit_psd, pdf_estimate, psd_estimate


@dataclass
class Check:
    """A measured exponent against its expected value."""

    name: str
    measured: float
    expected: float
    tolerance: float
    stderr: float = math.nan
    range: tuple = (math.nan, math.nan)
    r_squared: float = math.nan
    note: str = ""

    @property
    def delta(self):
        return self.measured - self.expected

    @property
    def passed(self):
        return bool(abs(self.delta) <= self.tolerance)


@dataclass
class ExperimentReport:
    config: object
    trajectories: list
    histogram: object
    spectrum: object
    run_spectra: list
    predictions: list
    checks: dict
    elapsed: float = 0.0
    files: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())


def _tidy(x):
    """Round away last-bit noise from closed-form predictions for display."""
    return float(f"{x:.15g}")


def predictions(model):
    """Analytic predictions for a model as ``(key, value)`` pairs plus (lambda, beta)."""
    if hasattr(model, "variant"):
        lim = diffusion_limit(model)
        pairs = [("A", _tidy(lim.A)), ("B2", _tidy(lim.B2)), ("C", _tidy(lim.C)),
                 ("lambda", _tidy(lim.lam)), ("eta", _tidy(lim.eta))]
        pairs += [(k, _tidy(v)) for k, v in lim.scales.items()]
        lam, eta, beta, f_range = lim.lam, lim.eta, lim.beta_predicted, lim.f_range
        flags = lim.flags
    else:
        lam, eta, beta, f_range = sde_predictions(model)
        pairs = [("lambda", _tidy(lam)), ("eta", _tidy(eta))]
        flags = ()
    pairs.append(("beta", beta if isinstance(beta, Outcome) else _tidy(beta)))
    if isinstance(f_range, Outcome):
        pairs.append(("f_range", f_range))
    else:
        pairs.append(("f_range", tuple(_tidy(f) if math.isfinite(f) else f for f in f_range)))
    pairs += [("flag", f) for f in flags]
    return pairs, lam, beta


def expected_exponents(model):
    """Expected (pdf, psd) slopes and a note on where the PSD reference comes from."""
    _, lam, beta = predictions(model)
    if isinstance(beta, Outcome):
        return -lam, -GBM_BETA, "eta = 1: compared with geometric Brownian motion"
    return -lam, -beta, ""


def simulate_run(config, seed, backend=None):
    if config.is_sde:
        return simulate_sde(config.model, seed, n_out=config.n_out, dt_out=config.dt_out,
                            kappa=config.kappa, burn_in=config.burn_in, backend=backend)
    return simulate_garch(config.model, seed, n=config.n_out, burn_in=config.burn_in,
                          backend=backend)


def simulate_ensemble(config, backend=None):
    """Trajectories for seeds ``seed .. seed + n_runs - 1``, in seed order.

    Runs execute on up to ``config.jobs`` threads; the compiled kernels drop
    the GIL, so this scales with cores. Results do not depend on ``jobs``.
    """
    seeds = config.seeds
    if config.jobs == 1 or len(seeds) == 1:
        return [simulate_run(config, s, backend) for s in seeds]
    with ThreadPoolExecutor(max_workers=min(config.jobs, len(seeds))) as pool:
        return list(pool.map(lambda s: simulate_run(config, s, backend), seeds))


def _fit_check(name, fit_fn, data, rng, expected, tolerance, bpd):
    try:
        fit = fit_fn(data, rng, bpd)
    except InsufficientPointsError as exc:
        return Check(name, math.nan, expected, tolerance, range=rng, note=str(exc))
    return Check(name, fit.exponent, expected, tolerance, stderr=fit.stderr, range=fit.range,
                 r_squared=fit.r_squared)


def analyze_trajectories(trajectories, analysis, model=None):
    """Pooled histogram, ensemble spectrum and the two exponent checks."""
    hist = pdf_estimate(list(trajectories), analysis.bins_per_decade)
    run_spectra = [psd_estimate(t, analysis.n_segments) for t in trajectories]
    spectrum = ensemble_average(run_spectra)
    pairs, exp_pdf, exp_psd, note = [], math.nan, math.nan, ""
    if model is not None:
        pairs, _, _ = predictions(model)
        exp_pdf, exp_psd, note = expected_exponents(model)
    bpd = analysis.bins_per_decade
    checks = {
        "pdf": _fit_check("pdf", fit_pdf, hist, analysis.pdf_fit_range.resolve_pdf(hist),
                          exp_pdf, analysis.pdf_tolerance, bpd),
        "psd": _fit_check("psd", fit_psd, spectrum, analysis.psd_fit_range.resolve_psd(spectrum),
                          exp_psd, analysis.psd_tolerance, bpd),
    }
    if note:
        checks["psd"].note = note
    return hist, spectrum, run_spectra, pairs, checks


def execute(config, backend=None):
    """Simulate and analyze ``config`` in memory."""
    t0 = time.perf_counter()
    trajs = simulate_ensemble(config, backend)
    hist, spectrum, run_spectra, pairs, checks = analyze_trajectories(
        trajs, config.analysis, config.model)
    return ExperimentReport(config=config, trajectories=trajs, histogram=hist,
                            spectrum=spectrum, run_spectra=run_spectra, predictions=pairs,
                            checks=checks, elapsed=time.perf_counter() - t0)


def provenance(config):
    """Header lines shared by every output file."""
    lines = [f"volspec {__version__}"]
    lines += [f"{k} = {io.format_value(v)}" for k, v in config.echo()]
    return lines


def report_pairs(report):
    """Key-value lines of the fit report (fits.txt)."""
    cfg = report.config
    pairs = [("model", cfg.model_type), ("seeds", f"{cfg.seed}..{cfg.seed + cfg.n_runs - 1}"),
             ("n_out", cfg.n_out), ("n_runs", cfg.n_runs)]
    clamps = sum(t.stats.get("clamps", 0) for t in report.trajectories)
    if not cfg.is_sde:
        pairs.append(("clamps", clamps))
    pairs.append(("excluded_zero_samples", report.histogram.n_excluded))
    pairs += [(f"prediction.{k}", v) for k, v in report.predictions]
    for name, c in report.checks.items():
        pairs += [
            (f"{name}.exponent", c.measured), (f"{name}.stderr", c.stderr),
            (f"{name}.range", c.range), (f"{name}.r_squared", c.r_squared),
            (f"{name}.expected", c.expected), (f"{name}.delta", c.delta),
            (f"{name}.tolerance", c.tolerance), (f"{name}.pass", c.passed),
        ]
        if c.note:
            pairs.append((f"{name}.note", c.note))
    return pairs


def write_outputs(report, out_dir):
    """Write every file of ``report`` into ``out_dir``; returns the paths."""
    cfg = report.config
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    head = provenance(cfg)
    files = []
    if cfg.trajectories == "first":
        keep = report.trajectories[:1]
    elif cfg.trajectories == "all":
        keep = report.trajectories
    else:
        keep = []
    for i, traj in enumerate(keep):
        path = out / ("trajectory.csv" if i == 0 else f"trajectory_run{i}.csv")
        io.write_trajectory(path, traj, head)
        files.append(path)
    for i, spec in enumerate(report.run_spectra):
        path = out / f"psd_run{i}.csv"
        io.write_spectrum(path, spec, head + [f"run_seed = {cfg.seed + i}"])
        files.append(path)
    files.append(out / "pdf.csv")
    io.write_histogram(files[-1], report.histogram, head)
    files.append(out / "psd.csv")
    io.write_spectrum(files[-1], report.spectrum, head)
    files.append(out / "fits.txt")
    io.write_report(files[-1], report_pairs(report), head)
    report.files = files
    return files


def run(config, backend=None):
    """Execute ``config`` and write its outputs into ``config.output_dir``."""
    report = execute(config, backend)
    write_outputs(report, config.output_dir)
    return report


def summary_lines(report):
    """Short human-readable summary for the terminal."""
    cfg = report.config
    lines = [f"{cfg.name}: {cfg.model_type}, {cfg.n_runs} run(s) x {cfg.n_out} samples, "
             f"{report.elapsed:.1f} s ({BACKEND} kernels)"]
    for name, c in report.checks.items():
        verdict = "PASS" if c.passed else "FAIL"
        lines.append(f"  {name}: exponent {c.measured:+.3f} +/- {c.stderr:.3f} over "
                     f"[{c.range[0]:.4g}, {c.range[1]:.4g}], expected {c.expected:+.3f} "
                     f"+/- {c.tolerance}: {verdict}")
    return lines
