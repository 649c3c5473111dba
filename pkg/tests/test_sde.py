import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from volspec.errors import ConfigError, DomainError
from volspec.sde import (
    ExponentialCutoffs,
    SdeSpec,
    adaptive_dt,
    diffusion,
    drift,
    simulate_sde,
)

from conftest import CYTHON, PYTHON, needs_cython

FIG1 = SdeSpec(eta=2.0, lam=3.0, sigma=1.0, x_min=1.0, x_max=1e3)


def test_coefficients_fig1():
    # sigma^2 (eta - lambda/2) x^3 with eta - lambda/2 = 1/2
    assert drift(1.0, FIG1) == 0.5
    assert drift(10.0, FIG1) == pytest.approx(500.0, rel=1e-15)
    assert diffusion(10.0, FIG1) == pytest.approx(100.0, rel=1e-15)
    assert adaptive_dt(10.0, FIG1) == pytest.approx(1e-4, rel=1e-12)
    assert adaptive_dt(1.0, FIG1, kappa=0.2) == pytest.approx(0.04, rel=1e-12)


def test_cutoff_drift_terms():
    spec = SdeSpec(eta=1.5, lam=3.0, sigma=2.0, x_min=1.0, x_max=100.0,
                   restriction=ExponentialCutoffs(m=2.0))
    x = 3.0
    bracket = 0.0 + 0.5 * 2.0 * ((1.0 / x) ** 2 - (x / 100.0) ** 2)
    assert drift(x, spec) == pytest.approx(4.0 * bracket * x**2.0, rel=1e-14)


@pytest.mark.parametrize("fn", [drift, diffusion, adaptive_dt])
@pytest.mark.parametrize("x", [0.0, -1.0])
def test_nonpositive_state_rejected(fn, x):
    with pytest.raises(DomainError):
        fn(x, FIG1)


@settings(max_examples=60, deadline=None)
@given(eta=st.floats(-2, 4), lam=st.floats(-2, 8), x=st.floats(1e-3, 1e3))
def test_drift_sign_follows_bracket(eta, lam, x):
    spec = SdeSpec(eta=eta, lam=lam)
    d = drift(x, spec)
    assert np.sign(d) == np.sign(eta - lam / 2)


@settings(max_examples=40, deadline=None)
@given(eta=st.floats(-2, 4), x=st.floats(1e-2, 1e2), kappa=st.floats(0.01, 0.5))
def test_step_keeps_relative_noise_at_kappa(eta, x, kappa):
    spec = SdeSpec(eta=eta, lam=3.0, sigma=1.7)
    dt = adaptive_dt(x, spec, kappa)
    assert diffusion(x, spec) * math.sqrt(dt) / x == pytest.approx(kappa, rel=1e-12)


@pytest.mark.parametrize("kwargs", [
    dict(x_min=0.0), dict(x_min=5.0, x_max=5.0), dict(sigma=0.0), dict(x0=1e4),
    dict(restriction=ExponentialCutoffs(m=0.0)),
])
def test_invalid_specs(kwargs):
    base = dict(eta=2.0, lam=3.0)
    base.update(kwargs)
    with pytest.raises(ConfigError):
        SdeSpec(**base)


def test_default_start_is_geometric_mean():
    assert FIG1.x0 == pytest.approx(math.sqrt(1e3))


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_reflective_outputs_stay_inside(seed):
    traj = simulate_sde(FIG1, seed, n_out=50_000, dt_out=2.0**-12)
    assert traj.values.min() >= 1.0
    assert traj.values.max() <= 1e3
    assert traj.stats["steps"] > 0


def test_output_grid_and_burn_in():
    traj = simulate_sde(FIG1, 5, n_out=1000, dt_out=0.01, burn_in=30)
    assert len(traj) == 1000
    assert traj.burn_in == 30
    assert traj.times[0] == pytest.approx(0.3)
    np.testing.assert_allclose(np.diff(traj.times), 0.01)


def test_burn_in_zero_keeps_start():
    traj = simulate_sde(FIG1, 5, n_out=10, dt_out=0.01, burn_in=0)
    assert traj.values[0] == FIG1.x0


def test_output_instants_are_hit_exactly():
    # with a huge kappa every internal step is capped by the output instant
    traj = simulate_sde(FIG1, 8, n_out=200, dt_out=1e-6, kappa=10.0, burn_in=0)
    assert traj.stats["steps"] == 199


def test_cutoff_mode_stays_positive():
    spec = SdeSpec(eta=2.0, lam=3.0, x_min=1.0, x_max=1e3, restriction=ExponentialCutoffs(1.0))
    traj = simulate_sde(spec, 4, n_out=20_000, dt_out=2.0**-12)
    assert np.all(traj.values > 0)
    assert np.all(np.isfinite(traj.values))


def test_eta_one_warns():
    spec = SdeSpec(eta=1.0, lam=3.0, x_min=1.0, x_max=10.0)
    with pytest.warns(UserWarning, match="zero width"):
        simulate_sde(spec, 1, n_out=10, dt_out=0.01)


def test_eta_two_does_not_warn():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        simulate_sde(FIG1, 1, n_out=10, dt_out=0.01)


def test_bad_run_arguments():
    with pytest.raises(ConfigError):
        simulate_sde(FIG1, 1, n_out=1)
    with pytest.raises(ConfigError):
        simulate_sde(FIG1, 1, dt_out=0.0)
    with pytest.raises(ConfigError):
        simulate_sde(FIG1, 1, kappa=-1.0)


def test_seed_reproducible():
    a = simulate_sde(FIG1, 11, n_out=20_000, dt_out=2.0**-12)
    b = simulate_sde(FIG1, 11, n_out=20_000, dt_out=2.0**-12)
    c = simulate_sde(FIG1, 12, n_out=20_000, dt_out=2.0**-12)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


@needs_cython
@pytest.mark.parametrize("restriction", [None, ExponentialCutoffs(1.0)])
def test_backends_bitwise_equal(restriction):
    kw = {} if restriction is None else {"restriction": restriction}
    spec = SdeSpec(eta=2.0, lam=3.0, x_min=1.0, x_max=1e3, **kw)
    a = simulate_sde(spec, 3, n_out=3000, dt_out=2.0**-12, backend=CYTHON)
    b = simulate_sde(spec, 3, n_out=3000, dt_out=2.0**-12, backend=PYTHON)
    assert np.array_equal(a.values, b.values)
    assert a.stats["steps"] == b.stats["steps"]


def _endpoint_ratios(x0, t1, seeds):
    spec = SdeSpec(eta=2.0, lam=3.0, x_min=1e-6, x_max=1e6, x0=x0)
    ends = [simulate_sde(spec, s, n_out=2, dt_out=t1, burn_in=0).values[1] for s in seeds]
    return np.array(ends) / x0


def test_time_state_scaling_ks():
    # starting a times higher and running a^-2(eta-1) as long must give the
    # same distribution of x(t)/x0; walls are far enough not to matter
    a, n = 2.0, 10_000
    r1 = _endpoint_ratios(1.0, 0.5, range(1, n + 1))
    r2 = _endpoint_ratios(a, 0.5 * a**-2, range(n + 1, 2 * n + 1))
    stat = stats.ks_2samp(r1, r2).statistic
    crit = math.sqrt(-0.5 * math.log(0.01 / 2)) * math.sqrt(2 / n)
    assert stat < crit
    # and the test has teeth: an unscaled horizon is clearly rejected
    r3 = _endpoint_ratios(a, 0.5, range(2 * n + 1, 3 * n + 1))
    assert stats.ks_2samp(r1, r3).statistic > crit
