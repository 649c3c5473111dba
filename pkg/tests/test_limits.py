import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from volspec.config import FIG4_C
from volspec.errors import DomainError
from volspec.garch import LINEAR, POWER_ABS, POWER_ODD, GarchSpec
from volspec.limits import (
    DIVERGENT,
    ZERO_WIDTH,
    diffusion_limit,
    double_factorial,
    frequency_range,
    gaussian_abs_moment,
    gaussian_even_moment,
    invert_linear,
    map_linear,
    map_power_abs,
    map_power_odd,
    predicted_beta,
    sde_predictions,
    steady_state_pdf,
    theoretical_pdf,
)
from volspec.sde import ExponentialCutoffs, SdeSpec

# ---- linear ---------------------------------------------------------------


@pytest.mark.parametrize("c, lam", [(0.89, 3), (0.88, 4), (0.87, 5)])
def test_linear_fig2_exponents(c, lam):
    lim = map_linear(0.015, 0.1, c)
    assert lim.lam == pytest.approx(lam, rel=1e-14, abs=0)
    assert lim.scales["y_min"] == pytest.approx(1.5, rel=1e-14, abs=0)
    assert lim.eta == 1.0
    assert lim.beta_predicted is DIVERGENT
    assert lim.f_range is ZERO_WIDTH


def test_linear_parameters_by_hand():
    lim = map_linear(0.2, 0.3, 0.5, h=0.5)
    assert lim.A == pytest.approx(0.4)
    assert lim.C == pytest.approx(0.4)
    assert lim.B2 == pytest.approx(2 * 0.09 / 0.5)
    assert lim.B == pytest.approx(math.sqrt(0.36))


@settings(max_examples=50, deadline=None)
@given(a=st.floats(1e-4, 1.0), b=st.floats(1e-3, 0.3), c=st.floats(0.0, 0.99),
       h=st.floats(1e-3, 10.0))
def test_linear_round_trip(a, b, c, h):
    back = invert_linear(map_linear(a, b, c, h), h)
    np.testing.assert_allclose(back, (a, b, c), rtol=1e-9, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(h1=st.floats(1e-3, 1.0), h2=st.floats(1e-3, 1.0))
def test_linear_h_invariance(h1, h2):
    # discrete parameters rescaled per period map to the same continuum model
    ref = map_linear(0.015, 0.1, 0.89)
    l1 = map_linear(*invert_linear(ref, h1), h=h1)
    l2 = map_linear(*invert_linear(ref, h2), h=h2)
    assert l1.lam == pytest.approx(l2.lam, rel=1e-9)
    assert l1.scales["y_min"] == pytest.approx(l2.scales["y_min"], rel=1e-9)
    assert l1.eta == l2.eta == 1.0


# ---- odd power --------------------------------------------------------------


def test_odd_fig3():
    lim = map_power_odd(1e-6, 1e-3, 1.0, 3)
    assert lim.C == 0.0
    assert lim.B2 == pytest.approx(15e-6, rel=1e-14)
    assert lim.lam == 3 and lim.eta == 1.5
    assert lim.scales["y1"] == pytest.approx(0.2582, abs=5e-5)
    assert lim.scales["y1"] == pytest.approx(math.sqrt(1 / 15), rel=1e-14)
    assert "y2" not in lim.scales
    assert lim.beta_predicted == 1.0


def test_odd_y2_present_only_for_positive_c():
    pos = map_power_odd(1e-6, 1e-3, 0.99, 3)
    assert pos.scales["y2"] == pytest.approx(2 * 0.01 / 15e-6, rel=1e-12)
    neg = map_power_odd(1e-6, 1e-3, 1.01, 3)
    assert "y2" not in neg.scales
    assert any("C < 0" in f for f in neg.flags)


@pytest.mark.parametrize("mu", [2, 4, 3.5, 1])
def test_odd_rejects_bad_mu(mu):
    with pytest.raises(DomainError):
        map_power_odd(1e-6, 1e-3, 1.0, mu)


@pytest.mark.parametrize("mu", [3, 5, 7])
def test_beta_closed_form_consistency(mu):
    lim = map_power_odd(1e-6, 1e-3, 1.0, mu)
    assert lim.beta_predicted == 1 + (mu - 3) / (mu - 2)
    assert predicted_beta(mu, mu / 2) == 1 + (mu - 3) / (mu - 2)
    lim_abs = map_power_abs(1e-6, 1e-3, 1e-3, mu)
    assert lim_abs.beta_predicted == 1 + (mu - 3) / (mu - 2)


@settings(max_examples=30, deadline=None)
@given(h=st.floats(1e-3, 10.0), mu=st.sampled_from([3, 5, 7]))
def test_odd_h_invariance(h, mu):
    a, b, c = 1e-6, 1e-3, 0.999
    ref = map_power_odd(a, b, c, mu)
    scaled = map_power_odd(a * h, b * math.sqrt(h), 1 - (1 - c) * h, mu, h=h)
    assert (scaled.lam, scaled.eta) == (ref.lam, ref.eta)
    assert scaled.beta_predicted == ref.beta_predicted
    assert scaled.scales["y1"] == pytest.approx(ref.scales["y1"], rel=1e-9)


# ---- absolute power ---------------------------------------------------------


def test_abs_fig4_balanced():
    lim = map_power_abs(1e-6, 1e-3, FIG4_C, 3)
    assert abs(lim.C) <= 1e-12
    assert lim.lam == 3 and lim.eta == 1.5
    assert predicted_beta(lim.lam, lim.eta) == 1
    assert lim.B2 == pytest.approx((15 - 8 / math.pi) * 1e-6, rel=1e-12)


def test_abs_y3_and_sign():
    lim = map_power_abs(1e-6, 1e-3, 1e-3, 3)
    C = 1e-3 * 2 * math.sqrt(2 / math.pi) - 1e-3
    assert lim.C == pytest.approx(C, rel=1e-12)
    assert lim.scales["sign_c"] == 1.0
    assert lim.scales["y3"] == pytest.approx((4 * C / lim.B2) ** 2, rel=1e-12)
    assert map_power_abs(1e-6, 1e-3, 2e-3, 3).scales["sign_c"] == -1.0


@settings(max_examples=30, deadline=None)
@given(h=st.floats(1e-3, 10.0), mu=st.floats(2.1, 8.0))
def test_abs_h_invariance(h, mu):
    a, b, c = 1e-6, 1e-3, 1e-3
    ref = map_power_abs(a, b, c, mu)
    scaled = map_power_abs(a * h, b * math.sqrt(h), c * math.sqrt(h), mu, h=h)
    assert (scaled.lam, scaled.eta) == (ref.lam, ref.eta)
    # C scales as 1/sqrt(h) here, so y3 is not invariant; y1 is
    assert scaled.scales["y1"] == pytest.approx(ref.scales["y1"], rel=1e-9)


# ---- shared algebra ---------------------------------------------------------


def test_beta_special_cases():
    assert predicted_beta(3, 1.5) == 1
    assert predicted_beta(3, 2) == 1
    assert predicted_beta(5, 2) == 2
    assert predicted_beta(3, 1) is DIVERGENT
    assert str(DIVERGENT) == "Divergent" and str(ZERO_WIDTH) == "ZeroWidth"


def test_frequency_range_fig1():
    lo, hi = frequency_range(2, 1.0, 1.0, 1e3)
    assert 2 * math.pi * lo == pytest.approx(1.0)
    assert 2 * math.pi * hi == pytest.approx(1e6)


def test_frequency_range_eta_below_one():
    lo, hi = frequency_range(0.5, 2.0, 1.0, 100.0)
    assert 2 * math.pi * lo == pytest.approx(4.0 / 100.0)
    assert 2 * math.pi * hi == pytest.approx(4.0)
    assert frequency_range(1.0, 1.0, 1.0, 10.0) is ZERO_WIDTH


def test_frequency_range_bad_input():
    with pytest.raises(DomainError):
        frequency_range(2, 1.0, 10.0, 1.0)


def test_sde_predictions():
    lam, eta, beta, f = sde_predictions(SdeSpec(eta=2.0, lam=3.0))
    assert (lam, eta, beta) == (3.0, 2.0, 1.0)


def test_diffusion_limit_dispatch():
    assert diffusion_limit(GarchSpec(LINEAR, 0.015, 0.1, 0.89)).variant == LINEAR
    assert diffusion_limit(GarchSpec(POWER_ODD, 1e-6, 1e-3, 1.0, mu=3)).variant == POWER_ODD
    assert diffusion_limit(GarchSpec(POWER_ABS, 1e-6, 1e-3, 1e-3, mu=3)).variant == POWER_ABS


@pytest.mark.parametrize("k", range(0, 8))
def test_even_moments(k):
    assert gaussian_even_moment(k) == pytest.approx(stats.norm.moment(2 * k), rel=1e-12)


def test_double_factorial():
    assert [double_factorial(n) for n in (-1, 0, 1, 5, 6)] == [1, 1, 1, 15, 48]


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.5, 3.0, 6.0, 11.3])
def test_abs_moment_quadrature(mu):
    val = 2 * integrate.quad(lambda w: w**mu * stats.norm.pdf(w), 0, np.inf, epsrel=1e-12)[0]
    assert gaussian_abs_moment(mu) == pytest.approx(val, rel=1e-10)


def test_abs_moment_large_mu_branch():
    mu = 299.0
    direct = gaussian_abs_moment(mu)
    logged = math.exp(mu / 2 * math.log(2) + math.lgamma((mu + 1) / 2) - 0.5 * math.log(math.pi))
    assert direct == pytest.approx(logged, rel=1e-10)
    assert gaussian_abs_moment(1000.0) == math.inf
    with pytest.raises(DomainError):
        map_power_abs(1e-6, 1e-3, 1e-3, 200.0)


# ---- stationary densities against a Fokker-Planck oracle -------------------


def _fp_log_density(drift, diff2, y, y_ref):
    """log p(y) - log p(y_ref) from p = exp(int 2a/b^2) / b^2."""
    val = integrate.quad(lambda s: 2 * drift(s) / diff2(s), y_ref, y, epsrel=1e-12, limit=200)[0]
    return val - math.log(diff2(y)) + math.log(diff2(y_ref))


def _check_against_oracle(pdf, drift, diff2, ys, y_ref):
    log_ref = math.log(pdf.unnormalized(y_ref))
    for y in ys:
        got = math.log(pdf.unnormalized(y)) - log_ref
        want = _fp_log_density(drift, diff2, y, y_ref)
        assert got == pytest.approx(want, rel=1e-8, abs=1e-8), y


@pytest.mark.parametrize("c", [0.89, 0.87, 0.5])
def test_linear_density_oracle(c):
    lim = map_linear(0.015, 0.1, c)
    _check_against_oracle(steady_state_pdf(lim), lambda y: lim.A - lim.C * y,
                          lambda y: lim.B2 * y * y, [0.1, 0.7, 3.0, 40.0], 1.0)


@pytest.mark.parametrize("c", [1.0, 0.9999, 1.0001])
def test_odd_density_oracle(c):
    lim = map_power_odd(1e-6, 1e-3, c, 3)
    _check_against_oracle(steady_state_pdf(lim), lambda y: lim.A - lim.C * y,
                          lambda y: lim.B2 * y**3, [0.1, 0.4, 2.0, 30.0], 1.0)


@pytest.mark.parametrize("c", [FIG4_C, 1e-3, 2e-3])
def test_abs_density_oracle(c):
    lim = map_power_abs(1e-6, 1e-3, c, 3)
    _check_against_oracle(steady_state_pdf(lim), lambda y: lim.A + lim.C * y**1.5,
                          lambda y: lim.B2 * y**3, [0.1, 0.4, 2.0, 30.0], 1.0)


def test_sde_cutoff_density_oracle():
    spec = SdeSpec(eta=2.0, lam=3.0, x_min=1.0, x_max=1e3, restriction=ExponentialCutoffs(1.5))
    from volspec.sde import diffusion, drift

    _check_against_oracle(steady_state_pdf(spec), lambda x: drift(x, spec),
                          lambda x: diffusion(x, spec) ** 2, [0.5, 3.0, 100.0, 2000.0], 10.0)


def test_reflective_density_is_pure_power_law():
    pdf = steady_state_pdf(SdeSpec(eta=2.0, lam=3.0))
    assert pdf.normalization == pytest.approx(2 / (1 - 1e-6), rel=1e-9)
    assert pdf(10.0) == pytest.approx(pdf.normalization * 1e-3, rel=1e-12)
    assert pdf(1e4) == 0.0


@pytest.mark.parametrize("model, norm", [
    (map_linear(0.015, 0.1, 0.89), 1.5**2),
    (map_power_odd(1e-6, 1e-3, 1.0, 3), 2 / 15),
])
def test_closed_form_normalizations(model, norm):
    _, n = theoretical_pdf(model, 1.0)
    assert n == pytest.approx(norm, rel=1e-8)


@pytest.mark.parametrize("model", [
    map_power_abs(1e-6, 1e-3, FIG4_C, 3),
    map_power_abs(1e-6, 1e-3, 1e-3, 3),
    map_power_odd(1e-6, 1e-3, 1.01, 3),
    SdeSpec(eta=1.5, lam=2.5, x_min=1.0, x_max=100.0, restriction=ExponentialCutoffs(1.0)),
])
def test_density_integrates_to_one(model):
    pdf = steady_state_pdf(model)
    total = 0.0
    edges = np.geomspace(1e-3, 1e12, 151)
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(pdf, a, b, epsrel=1e-11, limit=200)[0]
    assert total == pytest.approx(1.0, rel=1e-6)


def test_density_rejects_nonpositive():
    with pytest.raises(DomainError):
        steady_state_pdf(SdeSpec(eta=2.0, lam=3.0))(0.0)
