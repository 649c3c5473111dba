"""CSV and key-value report files.

Every file starts with ``#``-prefixed provenance lines, followed by one
column-name line and the data. Floats are written with 17 significant digits,
so reading a file back reproduces the arrays exactly.
"""

import numpy as np

from volspec.spectral import Histogram, Spectrum
from volspec.trajectory import Trajectory

FLOAT_FMT = "%.17g"


def _header(comments):
    return "\n".join(f"# {line}" for line in comments)


def _write(path, columns, names, comments):
    data = np.column_stack(columns)
    head = _header(comments)
    with open(path, "w", newline="\n") as fh:
        if head:
            fh.write(head + "\n")
        fh.write(",".join(names) + "\n")
        np.savetxt(fh, data, fmt=FLOAT_FMT, delimiter=",")


def read_csv(path):
    """Return ``(meta, names, data)``; ``meta`` holds the ``# key = value`` comment lines."""
    meta = {}
    names = None
    skip = 0
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                body = line[1:].strip()
                if " = " in body:
                    key, value = body.split(" = ", 1)
                    meta[key.strip()] = value.strip()
                skip += 1
                continue
            names = line.strip().split(",")
            skip += 1
            break
    if names is None:
        raise ValueError(f"{path}: no column header")
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    if data.size == 0:
        data = np.empty((0, len(names)))
    return meta, names, data


def write_trajectory(path, traj, comments=()):
    comments = list(comments) + [
        f"dt = {traj.dt!r}",
        f"burn_in = {traj.burn_in}",
        f"seed = {traj.seed}",
    ]
    _write(path, [traj.times, traj.values], ["time", "value"], comments)


def read_trajectory(path):
    meta, names, data = read_csv(path)
    if names[:2] != ["time", "value"]:
        raise ValueError(f"{path}: expected columns time,value, got {names}")
    t, v = data[:, 0], data[:, 1]
    if "dt" in meta:
        dt = float(meta["dt"])
    elif t.size >= 2:
        dt = float(t[1] - t[0])
    else:
        raise ValueError(f"{path}: cannot infer the sampling interval")
    burn_in = int(meta.get("burn_in", 0))
    seed = meta.get("seed")
    seed = int(seed) if seed not in (None, "None") else None
    return Trajectory(dt=dt, values=v, burn_in=burn_in, seed=seed,
                      stats={"source": str(path)})


def write_histogram(path, hist, comments=()):
    comments = list(comments) + [f"n_samples = {hist.n_samples}",
                                 f"n_excluded = {hist.n_excluded}"]
    _write(path, [hist.centers, hist.densities, hist.edges[:-1], hist.edges[1:]],
           ["bin_center", "density", "bin_lo", "bin_hi"], comments)


def read_histogram(path):
    meta, _, data = read_csv(path)
    edges = np.append(data[:, 2], data[-1, 3])
    return Histogram(edges=edges, densities=data[:, 1], n_samples=int(meta.get("n_samples", 0)),
                     n_excluded=int(meta.get("n_excluded", 0)))


def write_spectrum(path, spec, comments=()):
    comments = list(comments) + [f"dt = {spec.dt!r}", f"n_segments = {spec.n_segments}"]
    _write(path, [spec.freqs, spec.power], ["freq", "power"], comments)


def read_spectrum(path):
    meta, _, data = read_csv(path)
    return Spectrum(freqs=data[:, 0], power=data[:, 1], dt=float(meta["dt"]),
                    n_segments=int(meta["n_segments"]))


def format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ", ".join(format_value(v) for v in value)
    return str(value)


def format_report(pairs, comments=()):
    lines = [f"# {c}" for c in comments]
    lines += [f"{key} = {format_value(value)}" for key, value in pairs]
    return "\n".join(lines) + "\n"


def write_report(path, pairs, comments=()):
    with open(path, "w", newline="\n") as fh:
        fh.write(format_report(pairs, comments))


def read_report(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, value = line.split(" = ", 1)
            out[key] = value
    return out
