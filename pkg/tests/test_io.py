import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from volspec import io
from volspec.garch import GarchSpec, simulate_garch
from volspec.spectral import pdf_estimate, psd_estimate
from volspec.trajectory import Trajectory

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=30, deadline=None)
@given(hnp.arrays(np.float64, st.integers(1, 200), elements=finite),
       st.floats(1e-9, 1e3), st.integers(0, 10**6))
def test_trajectory_round_trip(tmp_path_factory, values, dt, burn_in):
    path = tmp_path_factory.mktemp("io") / "t.csv"
    traj = Trajectory(dt=dt, values=values, burn_in=burn_in, seed=3)
    io.write_trajectory(path, traj, ["volspec test"])
    back = io.read_trajectory(path)
    assert np.array_equal(back.values, traj.values)
    assert back.dt == dt and back.burn_in == burn_in and back.seed == 3


def test_histogram_and_spectrum_round_trip(tmp_path):
    traj = simulate_garch(GarchSpec("linear", 0.015, 0.1, 0.89), 1, n=50_000, burn_in=1000)
    hist = pdf_estimate(traj)
    io.write_histogram(tmp_path / "pdf.csv", hist)
    h2 = io.read_histogram(tmp_path / "pdf.csv")
    assert np.array_equal(h2.edges, hist.edges)
    assert np.array_equal(h2.densities, hist.densities)
    assert h2.n_samples == hist.n_samples
    spec = psd_estimate(traj, 8)
    io.write_spectrum(tmp_path / "psd.csv", spec)
    s2 = io.read_spectrum(tmp_path / "psd.csv")
    assert np.array_equal(s2.freqs, spec.freqs) and np.array_equal(s2.power, spec.power)
    assert s2.dt == spec.dt and s2.n_segments == 8


def test_header_layout(tmp_path):
    path = tmp_path / "t.csv"
    io.write_trajectory(path, Trajectory(dt=0.5, values=[1.0, 2.0]), ["volspec 0.1.0", "a = 1"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# volspec 0.1.0"
    assert all(line.startswith("#") for line in lines[:5])
    assert lines[5] == "time,value"
    meta, names, data = io.read_csv(path)
    assert meta["a"] == "1" and names == ["time", "value"]
    np.testing.assert_array_equal(data[:, 0], [0.0, 0.5])


def test_report_round_trip(tmp_path):
    pairs = [("x", 0.1 + 0.2), ("flag", True), ("range", (1.0, 10.0)), ("name", "fig3")]
    io.write_report(tmp_path / "r.txt", pairs, ["head"])
    back = io.read_report(tmp_path / "r.txt")
    assert float(back["x"]) == 0.1 + 0.2
    assert back["flag"] == "true" and back["range"] == "1.0, 10.0" and back["name"] == "fig3"


def test_read_rejects_wrong_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        io.read_trajectory(path)
