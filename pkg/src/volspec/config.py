"""Experiment configuration: INI-style files, built-in figure presets, overrides.

A config resolves to a flat mapping ``section.key -> value``. Presets are such
mappings; a file may name one with ``preset = ...`` in ``[run]`` and override
any of its keys, and command-line flags override the file.

Fit ranges are written as ``lo, hi`` (absolute abscissa), ``nyquist lo hi``
(fractions of the Nyquist frequency) or ``tail d`` (the top ``d`` decades of
occupied histogram bins).
"""

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from volspec.errors import ConfigError, ParseError
from volspec.garch import LINEAR, POWER_ABS, POWER_ODD, GarchSpec
from volspec.sde import ExponentialCutoffs, Reflective, SdeSpec

MODEL_TYPES = {
    "sde": None,
    "garch-linear": LINEAR,
    "garch-power-odd": POWER_ODD,
    "garch-power-abs": POWER_ABS,
}

_FLOAT_KEYS = {
    "model.eta", "model.lambda", "model.sigma", "model.x_min", "model.x_max", "model.m",
    "model.x0", "model.a", "model.b", "model.c", "model.mu", "model.h", "model.sigma2_0",
    "run.dt_out", "run.kappa", "analysis.pdf_tolerance", "analysis.psd_tolerance",
}
_INT_KEYS = {
    "run.seed", "run.n_out", "run.burn_in", "run.n_runs", "run.jobs",
    "analysis.bins_per_decade", "analysis.n_segments",
}
_STR_KEYS = {
    "model.type", "model.restriction", "run.preset", "analysis.pdf_fit_range",
    "analysis.psd_fit_range", "output.dir", "output.trajectories",
}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS
_SDE_ONLY = {"model.eta", "model.lambda", "model.sigma", "model.x_min", "model.x_max",
             "model.m", "model.x0", "model.restriction", "run.dt_out", "run.kappa"}
_GARCH_ONLY = {"model.a", "model.b", "model.c", "model.mu", "model.h", "model.sigma2_0"}

FIG4_C = 2 * math.sqrt(2 / math.pi) * 1e-3

PRESETS = {
    "fig1": {
        "model.type": "sde", "model.eta": 2.0, "model.lambda": 3.0, "model.sigma": 1.0,
        "model.x_min": 1.0, "model.x_max": 1e3, "model.restriction": "reflective",
        "run.n_out": 2**20, "run.burn_in": 2**20 // 10, "run.n_runs": 10,
        "run.dt_out": 2.0**-12, "run.kappa": 0.1,
        "analysis.pdf_fit_range": "3, 100", "analysis.psd_fit_range": "2, 500",
        "analysis.pdf_tolerance": 0.15, "analysis.psd_tolerance": 0.15,
    },
    **{
        f"fig2{tag}": {
            "model.type": "garch-linear", "model.a": 0.015, "model.b": 0.1, "model.c": c,
            "run.n_out": 10**7, "run.burn_in": 10**5, "run.n_runs": 1,
            "analysis.pdf_fit_range": "tail 2", "analysis.psd_fit_range": "nyquist 0.02 0.2",
            "analysis.pdf_tolerance": 0.3, "analysis.psd_tolerance": 0.3,
        }
        for tag, c in (("a", 0.89), ("b", 0.88), ("c", 0.87))
    },
    "fig3": {
        "model.type": "garch-power-odd", "model.mu": 3.0, "model.a": 1e-6, "model.b": 1e-3,
        "model.c": 1.0,
        "run.n_out": 2**22, "run.burn_in": 10**5, "run.n_runs": 10,
        "analysis.pdf_fit_range": "1, 10", "analysis.psd_fit_range": "nyquist 1e-4 1e-1",
        "analysis.pdf_tolerance": 0.2, "analysis.psd_tolerance": 0.15,
    },
    "fig4": {
        "model.type": "garch-power-abs", "model.mu": 3.0, "model.a": 1e-6, "model.b": 1e-3,
        "model.c": FIG4_C,
        "run.n_out": 2**22, "run.burn_in": 10**5, "run.n_runs": 10,
        "analysis.pdf_fit_range": "1, 10",
        "analysis.psd_fit_range": f"nyquist 1e-4 {10**-1.5!r}",
        "analysis.pdf_tolerance": 0.2, "analysis.psd_tolerance": 0.2,
    },
}

PRESET_NOTES = {
    "fig1": "nonlinear SDE, eta=2, lambda=3, reflective walls at 1 and 1e3",
    "fig2a": "linear GARCH(1,1), a=0.015, b=0.1, c=0.89",
    "fig2b": "linear GARCH(1,1), a=0.015, b=0.1, c=0.88",
    "fig2c": "linear GARCH(1,1), a=0.015, b=0.1, c=0.87",
    "fig3": "odd-power GARCH, mu=3, a=1e-6, b=1e-3, c=1",
    "fig4": "absolute-power GARCH, mu=3, a=1e-6, b=1e-3, c=2*sqrt(2/pi)*1e-3",
}

DEFAULTS = {
    "run.seed": 1, "run.n_runs": 1, "run.jobs": 1, "run.kappa": 0.1, "run.dt_out": 1e-3,
    "analysis.bins_per_decade": 10, "analysis.n_segments": 16,
    "analysis.pdf_tolerance": 0.2, "analysis.psd_tolerance": 0.2,
    "output.dir": "volspec-out", "output.trajectories": "first",
}


@dataclass(frozen=True)
class FitRange:
    """A fit window, possibly relative to the data (see module docstring)."""

    kind: str
    lo: float
    hi: float = math.nan

    @classmethod
    def parse(cls, text, key="range"):
        parts = [p for p in re.split(r"[,\s]+", str(text).strip()) if p]
        try:
            if parts and parts[0] == "tail":
                if len(parts) != 2:
                    raise ValueError
                decades = float(parts[1])
                if not decades > 0:
                    raise ConfigError(f"{key}: tail decades must be positive, got {decades}")
                return cls("tail", decades)
            if parts and parts[0] == "nyquist":
                if len(parts) != 3:
                    raise ValueError
                lo, hi = float(parts[1]), float(parts[2])
                if not 0 < lo < hi <= 1:
                    raise ConfigError(f"{key}: need 0 < lo < hi <= 1 for a Nyquist-relative "
                                      f"range, got {lo}, {hi}")
                return cls("nyquist", lo, hi)
            if len(parts) != 2:
                raise ValueError
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise ConfigError(f"{key}: cannot parse fit range {text!r}") from None
        if not 0 < lo < hi:
            raise ConfigError(f"{key}: need 0 < lo < hi, got {lo}, {hi}")
        return cls("absolute", lo, hi)

    def resolve_psd(self, spectrum):
        if self.kind == "absolute":
            return (self.lo, self.hi)
        if self.kind == "nyquist":
            return (self.lo * spectrum.nyquist, self.hi * spectrum.nyquist)
        raise ConfigError("a tail range applies to histograms, not spectra")

    def resolve_pdf(self, hist):
        if self.kind == "absolute":
            return (self.lo, self.hi)
        if self.kind == "tail":
            centers, _ = hist.occupied()
            top = float(centers.max())
            return (top / 10**self.lo, top)
        raise ConfigError("a Nyquist-relative range applies to spectra, not histograms")

    def __str__(self):
        if self.kind == "tail":
            return f"tail {self.lo!r}"
        if self.kind == "nyquist":
            return f"nyquist {self.lo!r} {self.hi!r}"
        return f"{self.lo!r}, {self.hi!r}"


@dataclass(frozen=True)
class AnalysisConfig:
    bins_per_decade: int
    n_segments: int
    pdf_fit_range: FitRange
    psd_fit_range: FitRange
    pdf_tolerance: float
    psd_tolerance: float


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    model: SdeSpec | GarchSpec
    seed: int
    n_out: int
    burn_in: int
    n_runs: int
    analysis: AnalysisConfig
    output_dir: Path
    dt_out: float | None = None
    kappa: float | None = None
    jobs: int = 1
    trajectories: str = "first"
    flat: dict = field(default_factory=dict, compare=False)

    @property
    def is_sde(self):
        return isinstance(self.model, SdeSpec)

    @property
    def model_type(self):
        if self.is_sde:
            return "sde"
        return next(k for k, v in MODEL_TYPES.items() if v == self.model.variant)

    def echo(self):
        """Effective settings as flat ``(key, value)`` pairs.

        Everything that influences the numbers is included (jobs and output
        location are not), so the pairs written into file headers rebuild the
        same config through :func:`resolve` and :func:`build_config`.
        """
        m = self.model
        pairs = [("model.type", self.model_type)]
        if self.is_sde:
            pairs += [("model.eta", m.eta), ("model.lambda", m.lam), ("model.sigma", m.sigma),
                      ("model.x_min", m.x_min), ("model.x_max", m.x_max),
                      ("model.restriction", m.restriction.name)]
            if not m.reflective:
                pairs.append(("model.m", m.restriction.m))
            pairs.append(("model.x0", m.x0))
        else:
            pairs += [("model.a", m.a), ("model.b", m.b), ("model.c", m.c)]
            if m.mu is not None:
                pairs.append(("model.mu", m.mu))
            pairs += [("model.h", m.h), ("model.sigma2_0", m.sigma2_0)]
        pairs += [("run.seed", self.seed), ("run.n_out", self.n_out),
                  ("run.burn_in", self.burn_in), ("run.n_runs", self.n_runs)]
        if self.is_sde:
            pairs += [("run.dt_out", self.dt_out), ("run.kappa", self.kappa)]
        a = self.analysis
        pairs += [("analysis.bins_per_decade", a.bins_per_decade),
                  ("analysis.n_segments", a.n_segments),
                  ("analysis.pdf_fit_range", str(a.pdf_fit_range)),
                  ("analysis.psd_fit_range", str(a.psd_fit_range)),
                  ("analysis.pdf_tolerance", a.pdf_tolerance),
                  ("analysis.psd_tolerance", a.psd_tolerance)]
        return pairs

    @property
    def seeds(self):
        return list(range(self.seed, self.seed + self.n_runs))


def _convert(key, value):
    if key not in KNOWN_KEYS:
        raise ParseError(f"unknown key {key!r}", field=key)
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            f = float(value)
            if not f.is_integer():
                raise ValueError
            return int(f)
    except (TypeError, ValueError):
        raise ParseError(f"invalid value {value!r}", field=key) from None
    return str(value).strip()


TRAJECTORY_MODES = ("first", "all", "none")


def resolve(overrides=None, preset=None):
    """Merge defaults, a preset and overrides into a converted flat mapping."""
    overrides = dict(overrides or {})
    preset = overrides.pop("run.preset", None) or preset
    flat = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        flat.update(PRESETS[preset])
        flat["run.preset"] = preset
    for key, value in overrides.items():
        if value is not None:
            flat[key] = value
    return {k: _convert(k, v) for k, v in flat.items()}


def build_analysis(flat):
    """The ``analysis.*`` part of a flat mapping, validated."""

    def get(key):
        value = flat.get(key, DEFAULTS.get(key))
        if value is None:
            raise ConfigError(f"{key} is required")
        return _convert(key, value)

    analysis = AnalysisConfig(
        bins_per_decade=get("analysis.bins_per_decade"),
        n_segments=get("analysis.n_segments"),
        pdf_fit_range=FitRange.parse(get("analysis.pdf_fit_range"), "analysis.pdf_fit_range"),
        psd_fit_range=FitRange.parse(get("analysis.psd_fit_range"), "analysis.psd_fit_range"),
        pdf_tolerance=get("analysis.pdf_tolerance"),
        psd_tolerance=get("analysis.psd_tolerance"),
    )
    if analysis.pdf_fit_range.kind == "nyquist":
        raise ConfigError("analysis.pdf_fit_range cannot be Nyquist-relative")
    if analysis.psd_fit_range.kind == "tail":
        raise ConfigError("analysis.psd_fit_range cannot be a tail range")
    if analysis.bins_per_decade < 1 or analysis.n_segments < 1:
        raise ConfigError("analysis.bins_per_decade and analysis.n_segments must be >= 1")
    return analysis


def build_config(flat):
    """Validate a flat mapping (see :func:`resolve`) into an :class:`ExperimentConfig`."""
    flat = dict(flat)
    mtype = flat.get("model.type")
    if mtype is None:
        raise ConfigError("model.type is required (or choose a preset)")
    if mtype not in MODEL_TYPES:
        raise ConfigError(f"model.type must be one of {sorted(MODEL_TYPES)}, got {mtype!r}")
    is_sde = mtype == "sde"
    stray = sorted(k for k in flat if k in (_GARCH_ONLY if is_sde else _SDE_ONLY))
    if stray:
        raise ConfigError(f"keys not applicable to model {mtype}: {', '.join(stray)}")

    def get(key, default=None):
        value = flat.get(key, DEFAULTS.get(key, default))
        if value is None:
            raise ConfigError(f"{key} is required")
        return _convert(key, value)

    if is_sde:
        restriction = str(flat.get("model.restriction", "reflective"))
        if restriction == "reflective":
            if "model.m" in flat:
                raise ConfigError("model.m only applies to restriction = cutoff")
            restr = Reflective()
        elif restriction == "cutoff":
            restr = ExponentialCutoffs(get("model.m", 1.0))
        else:
            raise ConfigError(f"model.restriction must be reflective or cutoff, got {restriction!r}")
        model = SdeSpec(eta=get("model.eta"), lam=get("model.lambda"),
                        sigma=get("model.sigma", 1.0), x_min=get("model.x_min"),
                        x_max=get("model.x_max"), restriction=restr,
                        x0=flat.get("model.x0"))
    else:
        variant = MODEL_TYPES[mtype]
        model = GarchSpec(variant=variant, a=get("model.a"), b=get("model.b"), c=get("model.c"),
                          mu=None if variant == LINEAR else get("model.mu"),
                          h=get("model.h", 1.0), sigma2_0=flat.get("model.sigma2_0"))

    n_out = get("run.n_out", 2**20)
    burn_in = flat.get("run.burn_in")
    if burn_in is None:
        burn_in = n_out // 10 if is_sde else 10**5
    if n_out < 2:
        raise ConfigError(f"run.n_out must be >= 2, got {n_out}")
    if burn_in < 0:
        raise ConfigError(f"run.burn_in must be >= 0, got {burn_in}")
    n_runs = get("run.n_runs")
    if n_runs < 1:
        raise ConfigError(f"run.n_runs must be >= 1, got {n_runs}")
    jobs = get("run.jobs")
    if jobs < 1:
        raise ConfigError(f"run.jobs must be >= 1, got {jobs}")
    seed = get("run.seed")
    if not (0 <= seed and seed + n_runs <= 2**64):
        raise ConfigError(f"run.seed out of range: {seed}")

    analysis = build_analysis(flat)
    if n_out < 2 * analysis.n_segments:
        raise ConfigError(f"run.n_out={n_out} too short for {analysis.n_segments} segments")

    dt_out = kappa = None
    if is_sde:
        dt_out, kappa = get("run.dt_out"), get("run.kappa")
        if not dt_out > 0 or not kappa > 0:
            raise ConfigError("run.dt_out and run.kappa must be positive")

    trajectories = str(get("output.trajectories")).lower()
    if trajectories not in TRAJECTORY_MODES:
        raise ConfigError(f"output.trajectories must be one of {TRAJECTORY_MODES}, "
                          f"got {trajectories!r}")

    return ExperimentConfig(
        name=flat.get("run.preset", "custom"), model=model, seed=seed, n_out=n_out,
        burn_in=burn_in, n_runs=n_runs, analysis=analysis,
        output_dir=Path(get("output.dir")), dt_out=dt_out, kappa=kappa, jobs=jobs,
        trajectories=trajectories, flat=dict(flat),
    )


def preset_config(name, **overrides):
    """Config of a built-in preset; keyword overrides use ``section__key`` names."""
    flat = {k.replace("__", "."): v for k, v in overrides.items()}
    return build_config(resolve(flat, preset=name))


def _key_line(lines, section, key):
    current = None
    for i, raw in enumerate(lines, start=1):
        line = raw.strip()
        m = re.match(r"\[(.+)\]$", line)
        if m:
            current = m.group(1).strip().lower()
            continue
        if current == section and re.match(rf"{re.escape(key)}\s*[=:]", line, re.IGNORECASE):
            return i
    return None


def parse_config_text(text, source="<config>"):
    """Parse INI text into a flat ``section.key -> str`` mapping."""
    if not text.strip():
        raise ParseError(f"{source}: empty config")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError(f"{source}: key outside any [section]", line=exc.lineno) from None
    except configparser.DuplicateOptionError as exc:
        raise ParseError(f"{source}: duplicate key", line=exc.lineno,
                         field=f"{exc.section}.{exc.option}") from None
    except configparser.DuplicateSectionError as exc:
        raise ParseError(f"{source}: duplicate section [{exc.section}]", line=exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ParseError(f"{source}: malformed line", line=lineno) from None
    lines = text.splitlines()
    flat = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            name = f"{section.lower()}.{key}"
            if name not in KNOWN_KEYS:
                raise ParseError(f"{source}: unknown key", line=_key_line(lines, section.lower(), key),
                                 field=name)
            try:
                _convert(name, value)
            except ParseError:
                raise ParseError(f"{source}: invalid value {value!r}",
                                 line=_key_line(lines, section.lower(), key), field=name) from None
            flat[name] = value
    if not flat:
        raise ParseError(f"{source}: no settings found")
    return flat


def load_config(path, overrides=None):
    """Read a config file, apply ``overrides`` (flat keys) and validate."""
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    flat = parse_config_text(text, source=str(path))
    flat.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return build_config(resolve(flat))
