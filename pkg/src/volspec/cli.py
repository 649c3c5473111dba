"""Command-line entry point: ``volspec run | predict | analyze | presets``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure during a
run, 4 file-system error.
"""

import argparse
import os
import sys
from pathlib import Path

from volspec import __version__, io
from volspec.config import (
    MODEL_TYPES,
    PRESET_NOTES,
    PRESETS,
    KNOWN_KEYS,
    build_analysis,
    build_config,
    load_config,
    parse_config_text,
    resolve,
)
from volspec.errors import ConfigError, DomainError, NonFiniteError, VolspecError
from volspec import experiment

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

# argparse dest -> flat config key
_OVERRIDES = {
    "model": "model.type", "a": "model.a", "b": "model.b", "c": "model.c", "mu": "model.mu",
    "eta": "model.eta", "lam": "model.lambda", "sigma": "model.sigma", "xmin": "model.x_min",
    "xmax": "model.x_max", "restriction": "model.restriction", "m": "model.m",
    "period": "model.h", "seed": "run.seed", "n": "run.n_out", "burn_in": "run.burn_in",
    "runs": "run.n_runs", "dt": "run.dt_out", "kappa": "run.kappa", "jobs": "run.jobs",
    "segments": "analysis.n_segments", "bins_per_decade": "analysis.bins_per_decade",
    "pdf_range": "analysis.pdf_fit_range", "psd_range": "analysis.psd_fit_range",
    "out": "output.dir", "trajectories": "output.trajectories",
}


def _add_model_flags(p):
    g = p.add_argument_group("model parameters")
    g.add_argument("--model", choices=sorted(MODEL_TYPES), help="model type")
    g.add_argument("-a", type=float, help="GARCH constant term a")
    g.add_argument("-b", type=float, help="GARCH noise coefficient b")
    g.add_argument("-c", type=float, help="GARCH persistence coefficient c")
    g.add_argument("--mu", type=float, help="power of the nonlinear GARCH variants")
    g.add_argument("--period", type=float, help="sampling period h of one GARCH step")
    g.add_argument("--eta", type=float, help="SDE multiplicative-noise exponent")
    g.add_argument("--lambda", dest="lam", type=float, help="SDE steady-state PDF exponent")
    g.add_argument("--sigma", type=float, help="SDE noise amplitude")
    g.add_argument("--xmin", type=float, help="lower restriction of the SDE")
    g.add_argument("--xmax", type=float, help="upper restriction of the SDE")
    g.add_argument("--restriction", choices=("reflective", "cutoff"))
    g.add_argument("--m", type=float, help="sharpness of the exponential cut-offs")


def _add_source_flags(p):
    p.add_argument("--preset", choices=sorted(PRESETS), help="start from a figure preset")
    p.add_argument("--config", type=Path, help="INI-style config file")


def _add_analysis_flags(p):
    g = p.add_argument_group("analysis")
    g.add_argument("--segments", type=int, help="PSD segments per run")
    g.add_argument("--bins-per-decade", type=int)
    g.add_argument("--pdf-range", help="'lo, hi' or 'tail DECADES'")
    g.add_argument("--psd-range", help="'lo, hi' or 'nyquist LO HI'")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="volspec",
        description="Simulate GARCH-type and nonlinear SDE volatility models and test "
                    "their power-law PDF and PSD.")
    parser.add_argument("--version", action="version", version=f"volspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate an ensemble, write CSVs and a fit report")
    _add_source_flags(p)
    _add_model_flags(p)
    g = p.add_argument_group("run")
    g.add_argument("--seed", type=int, help="seed of the first run (decimal)")
    g.add_argument("--runs", type=int, help="number of runs in the ensemble")
    g.add_argument("--n", type=int, help="output samples per run")
    g.add_argument("--burn-in", type=int, help="discarded leading samples")
    g.add_argument("--dt", type=float, help="SDE output sampling interval")
    g.add_argument("--kappa", type=float, help="SDE step-size parameter")
    g.add_argument("--jobs", type=int, help="runs simulated concurrently")
    _add_analysis_flags(p)
    p.add_argument("--out", help="output directory")
    p.add_argument("--trajectories", choices=("first", "all", "none"),
                   help="which trajectories to write as CSV (default: first)")

    p = sub.add_parser("predict", help="print the analytic predictions for a model")
    _add_source_flags(p)
    _add_model_flags(p)
    p.add_argument("--out", help="also write the report to this file")

    p = sub.add_parser("analyze", help="re-analyze trajectory CSV files")
    p.add_argument("files", nargs="+", type=Path)
    _add_analysis_flags(p)
    p.add_argument("--out", help="output directory for pdf.csv, psd.csv, fits.txt")

    sub.add_parser("presets", help="list the built-in presets")
    return parser


def _overrides(args):
    flat = {}
    for dest, key in _OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            flat[key] = value
    return flat


def _config(args):
    overrides = _overrides(args)
    if args.command == "predict":
        overrides.pop("output.dir", None)
    if getattr(args, "config", None) is not None:
        if args.preset:
            overrides.setdefault("run.preset", args.preset)
        if args.command != "predict":
            return load_config(args.config, overrides)
        try:
            text = args.config.read_text()
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None
        flat = parse_config_text(text, source=str(args.config))
        flat.update(overrides)
    else:
        flat = overrides
    if args.command == "predict":
        # predictions need no fit ranges; placeholders keep validation happy
        flat.setdefault("analysis.pdf_fit_range", "1, 10")
        flat.setdefault("analysis.psd_fit_range", "1, 10")
    return build_config(resolve(flat, preset=args.preset))


def _check_writable(path):
    path = Path(path)
    probe = path
    while not probe.exists():
        probe = probe.parent
    if not probe.is_dir():
        raise NotADirectoryError(f"{probe} is not a directory")
    if not os.access(probe, os.W_OK | os.X_OK):
        raise PermissionError(f"{probe} is not writable")


def cmd_run(args):
    config = _config(args)
    _check_writable(config.output_dir)
    report = experiment.run(config)
    for line in experiment.summary_lines(report):
        print(line)
    print(f"wrote {len(report.files)} files to {config.output_dir}")
    return 0


def cmd_predict(args):
    config = _config(args)
    pairs, _, _ = experiment.predictions(config.model)
    text = io.format_report([("model", config.model_type)] + pairs)
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text)
    return 0


def cmd_analyze(args):
    meta, _, _ = io.read_csv(args.files[0])
    flat = {k: v for k, v in meta.items() if k in KNOWN_KEYS}
    flat.update(_overrides(args))
    model = None
    if "model.type" in flat:
        config = build_config(resolve(flat))
        model, analysis, head = config.model, config.analysis, experiment.provenance(config)
    else:
        analysis = build_analysis(flat)
        head = [f"volspec {__version__}"]
    trajs = [io.read_trajectory(f) for f in args.files]
    hist, spectrum, _, pairs, checks = experiment.analyze_trajectories(trajs, analysis, model)
    out = Path(args.out or ".")
    _check_writable(out)
    out.mkdir(parents=True, exist_ok=True)
    head = head + [f"source = {f}" for f in args.files]
    io.write_histogram(out / "pdf.csv", hist, head)
    io.write_spectrum(out / "psd.csv", spectrum, head)
    report_pairs = [(f"prediction.{k}", v) for k, v in pairs]
    for name, c in checks.items():
        report_pairs += [(f"{name}.exponent", c.measured), (f"{name}.stderr", c.stderr),
                         (f"{name}.range", c.range), (f"{name}.r_squared", c.r_squared)]
        if model is not None:
            report_pairs += [(f"{name}.expected", c.expected), (f"{name}.delta", c.delta),
                             (f"{name}.pass", c.passed)]
    io.write_report(out / "fits.txt", report_pairs, head)
    sys.stdout.write(io.format_report(report_pairs))
    return 0


def cmd_presets(args):
    for name in PRESETS:
        print(f"{name:6s}  {PRESET_NOTES[name]}")
    return 0


COMMANDS = {"run": cmd_run, "predict": cmd_predict, "analyze": cmd_analyze,
            "presets": cmd_presets}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"volspec: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteError as exc:
        print(f"volspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"volspec: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except VolspecError as exc:
        print(f"volspec: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
