import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsteady import (
    GridFunction,
    Interval,
    InvalidArgumentError,
    ModelParams,
    TheoremHypothesisError,
    build_grid,
    build_subsolution,
    build_supersolution,
    check_subsupersolution,
    harvesting_profile,
    monotone_solve,
    nonexistence_certificate,
    reaction,
    reaction_derivative,
    thresholds,
)


@pytest.fixture(scope="module")
def base(setup_factory):
    grid, A, eig, e, h = setup_factory(256, 0.5)
    return grid, A, eig, e, h


def params(base, ratio=2.0, K=1.0, c=1.0, eps=0.0):
    grid, A, eig, e, h = base
    return ModelParams(ratio * eig.lambda1, K, c, eps, 0.5, h)


def test_reaction_at_zero(base):
    p = params(base, eps=0.3)
    np.testing.assert_allclose(reaction(np.zeros(256), p).values, -0.3 * p.h.values)
    assert np.all(reaction_derivative(np.zeros(256), p).values == 1.0)


def test_logistic_zero_and_peak(base):
    p = params(base, K=2.5, c=0.0, eps=0.0)
    np.testing.assert_allclose(reaction(np.full(256, 2.5), p).values, 0.0, atol=1e-15)
    np.testing.assert_allclose(reaction(np.full(256, 1.25), p).values, 2.5 / 4, rtol=1e-15)
    np.testing.assert_allclose(reaction_derivative(np.full(256, 1.25), p).values, 0.0, atol=1e-15)


def test_derivative_central_differences(base, rng):
    p = params(base, K=0.7, c=1.3, eps=0.01)
    d = 1e-5
    for _ in range(50):
        u = rng.uniform(-1, 3, 256)
        fd = (reaction(u + d, p).values - reaction(u - d, p).values) / (2 * d)
        assert np.max(np.abs(fd - reaction_derivative(u, p).values)) <= 1e-6


def test_grid_mismatch(base):
    p = params(base)
    other = GridFunction(build_grid(Interval(0, 1), 256), np.ones(256))
    with pytest.raises(InvalidArgumentError):
        reaction(other, p)
    with pytest.raises(InvalidArgumentError):
        reaction(np.ones(10), p)


@pytest.mark.parametrize(
    "kw", [dict(lam=-1.0), dict(K=0.0), dict(c=-0.1), dict(eps=-1e-3), dict(s=1.0)]
)
def test_invalid_params(base, kw):
    with pytest.raises(ValueError):
        params(base).replace(**kw)


def test_profile_must_have_unit_max(base):
    grid = base[0]
    with pytest.raises(InvalidArgumentError):
        ModelParams(1.0, 1.0, 1.0, 0.0, 0.5, GridFunction(grid, 0.5 * np.ones(256)))


def test_thresholds_at_twice_lambda1(base):
    grid, A, eig, e, h = base
    t = thresholds(params(base), eig, e)
    # hand arithmetic: alpha = 1/sqrt 2, eta = 1 + ((1 - alpha)/2)^2 = 1.0214466094..., c = 1
    alpha = 1 / math.sqrt(2)
    eta = 1 + ((1 - alpha) / 2) ** 2
    assert t.alpha == pytest.approx(0.70711, abs=5e-6) and t.alpha == pytest.approx(alpha, rel=1e-9)
    assert t.eta == pytest.approx(1.021447, abs=5e-7) and t.eta == pytest.approx(eta, rel=1e-12)
    assert t.sigma_upper == pytest.approx(eta, rel=1e-12)
    assert t.sigma_lower == pytest.approx(eta / (2 * eta + 1), rel=1e-12)
    assert t.sigma_lower == pytest.approx(0.335683, abs=5e-7)
    assert t.sigma_lower < t.sigma_upper
    assert t.theta > 0 and t.m_lambda > 0 and t.eps_star > 0
    gap = eig.phi1.values - t.theta * e.values - t.alpha * eig.phi1.values
    assert gap.min() > 0


def test_thresholds_refuse_small_lambda(base):
    grid, A, eig, e, h = base
    for ratio in (0.5, 0.9, 1.0):
        with pytest.raises(TheoremHypothesisError):
            thresholds(params(base, ratio=ratio), eig, e)


def test_thresholds_without_grazing(base):
    grid, A, eig, e, h = base
    t = thresholds(params(base, c=0.0), eig, e)
    assert math.isinf(t.sigma_upper)
    assert t.sigma_lower == pytest.approx(0.5)
    assert not t.predicts(1e9, 0.0)


@settings(max_examples=30, deadline=None)
@given(ratio=st.floats(1.01, 20.0), c=st.floats(0.0, 10.0), K=st.floats(0.01, 50.0))
def test_threshold_invariants_property(base, ratio, c, K):
    grid, A, eig, e, h = base
    t = thresholds(params(base, ratio=ratio, K=K, c=c), eig, e)
    assert 0 < t.alpha < 1
    assert t.sigma_lower < t.sigma_upper
    assert t.eps_star > 0
    assert np.all(build_subsolution(t, eig, e).values <= build_supersolution(t, e).values)


def test_threshold_json(base, tmp_path):
    grid, A, eig, e, h = base
    t = thresholds(params(base), eig, e)
    t.to_json(tmp_path / "t.json")
    data = json.loads((tmp_path / "t.json").read_text())
    assert data["alpha"] == t.alpha and set(data) == set(t.to_dict())


def test_supersolution_construction(base):
    grid, A, eig, e, h = base
    t = thresholds(params(base, K=0.7), eig, e)
    up = build_supersolution(t, e)
    assert np.all(up.values > 0)
    doubled = build_supersolution(type(t)(**{**t.to_dict(), "A_super": 2 * t.A_super}), e)
    np.testing.assert_allclose(doubled.values, 2 * up.values, rtol=1e-15)


def test_amplitude_is_logistic_bound_when_ordering_inactive(base):
    grid, A, eig, e, h = base
    p = params(base, K=0.7)
    t = thresholds(p, eig, e)
    sub = build_subsolution(t, eig, e)
    assert np.max(sub.values / e.values) < p.lam * p.K / 4  # ordering constraint inactive
    assert t.A_super == p.lam * p.K / 4


def test_subsolution_construction(base):
    grid, A, eig, e, h = base
    t = thresholds(params(base, K=0.7), eig, e)
    sub = build_subsolution(t, eig, e)
    assert sub.sup_norm() == pytest.approx((1 - t.alpha) / 2, abs=1e-12)
    assert np.all(sub.values >= t.m_lambda * t.alpha * eig.phi1.values)
    assert np.all(sub.values <= build_supersolution(t, e).values)


def test_residual_checks_pass_inside_box(base):
    grid, A, eig, e, h = base
    t0 = thresholds(params(base), eig, e)
    K = 0.5 * (t0.sigma_lower + t0.sigma_upper)
    p = params(base, K=K, eps=0.5 * t0.eps_star)
    t = thresholds(p, eig, e)
    assert check_subsupersolution(build_subsolution(t, eig, e), p, A, "subsolution").passed
    assert check_subsupersolution(build_supersolution(t, e), p, A, "supersolution").passed


def test_residual_checks_at_exact_solution(base):
    grid, A, eig, e, h = base
    t0 = thresholds(params(base), eig, e)
    p = params(base, K=0.7, eps=0.5 * t0.eps_star)
    t = thresholds(p, eig, e)
    sol = monotone_solve(build_subsolution(t, eig, e), build_supersolution(t, e), p, A).solution
    assert check_subsupersolution(sol, p, A, "subsolution").passed
    assert check_subsupersolution(sol, p, A, "supersolution").passed
    with pytest.raises(InvalidArgumentError):
        check_subsupersolution(sol, p, A, "both")


def test_certificate_fires_below_lambda1(base):
    grid, A, eig, e, h = base
    rep = nonexistence_certificate(eig.phi1, params(base, ratio=0.9), eig)
    assert rep.violated and rep.lhs < 0 < rep.rhs


def test_certificate_rejects_bad_candidates(base):
    grid, A, eig, e, h = base
    p = params(base, ratio=0.9)
    with pytest.raises(InvalidArgumentError):
        nonexistence_certificate(np.zeros(256), p, eig)
    with pytest.raises(InvalidArgumentError):
        nonexistence_certificate(-eig.phi1.values, p, eig)


def test_certificate_silent_at_a_solution(base):
    grid, A, eig, e, h = base
    t0 = thresholds(params(base), eig, e)
    p = params(base, K=0.7, eps=0.5 * t0.eps_star)
    t = thresholds(p, eig, e)
    u = monotone_solve(build_subsolution(t, eig, e), build_supersolution(t, e), p, A).solution.values
    rep = nonexistence_certificate(u, p, eig)
    assert not rep.violated
    # energy identity at the discrete solution
    from fracsteady.model import reaction_values

    lhs = u @ A.entries @ u
    assert lhs == pytest.approx(p.lam * grid.h_step * reaction_values(u, p) @ u, rel=1e-8)


def test_custom_profile_in_model(base):
    grid = base[0]
    h = harvesting_profile(grid, np.linspace(0, 2, 256) ** 2)
    assert ModelParams(1.0, 1.0, 0.0, 0.1, 0.5, h).h.values.max() == 1.0
