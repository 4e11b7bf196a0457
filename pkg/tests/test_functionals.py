import math

import numpy as np
import pytest

from ousampler import SystemConfig, mse_instant
from ousampler.functionals import (
    dinkelbach_p,
    f_fn,
    g_ceiling,
    g_fn,
    g_inverse,
    h_fn,
    h_inverse,
    make_context,
    mean_epoch_service,
    mse_numerator_denominator,
)
from ousampler.oracles import mc_f, mc_h, mc_mean_service
from ousampler.special import reg_gamma_ladder
from helpers import fig2_config


def single_ctx(theta=0.5, sigma_sq=1.0, mu=1.0, eps=0.0):
    cfg = SystemConfig(K=1, theta=(theta,), sigma_sq=(sigma_sq,), mu=mu, eps=eps, f_max=1.0)
    return make_context(cfg)


class TestG:
    def test_single_process_at_zero(self):
        assert g_fn(single_ctx(), 0.0) == pytest.approx(0.5, abs=1e-15)

    def test_large_tau_reaches_ceiling(self):
        ctx = make_context(fig2_config())
        assert g_fn(ctx, 1e4) == pytest.approx(g_ceiling(ctx), abs=1e-12)
        assert g_ceiling(ctx) == pytest.approx(7.0)

    def test_algebraic_identity(self):
        # machine-precision restatement with independently computed factors
        ctx = make_context(fig2_config(eps=0.6))
        for tau in (0.0, 0.4, 2.2, 9.0):
            expect = sum(
                s2 / (2 * th) * (1 - (1.0 / (1 + 2 * th)) * math.exp(-2 * th * tau))
                for th, s2 in zip(ctx.config.theta, ctx.config.sigma_sq)
            )
            assert g_fn(ctx, tau) == pytest.approx(expect, abs=1e-15)

    def test_monte_carlo_shifted_exponential_age(self):
        # G(tau) = sum_k E[mse_instant(theta_k, s2_k, tau + Y)], Y ~ exp(mu)
        ctx = make_context(fig2_config())
        rng = np.random.default_rng(5)
        y = rng.exponential(1.0, 2_000_000)
        tau = 1.0
        draws = sum(mse_instant(th, s2, tau + y)
                    for th, s2 in zip(ctx.config.theta, ctx.config.sigma_sq))
        se = draws.std(ddof=1) / math.sqrt(y.size)
        assert abs(draws.mean() - g_fn(ctx, tau)) < 3 * se

    def test_strictly_increasing(self):
        ctx = make_context(fig2_config())
        taus = np.linspace(0, 10, 50)
        vals = [g_fn(ctx, t) for t in taus]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestGInverse:
    def test_boundary_clamps_to_zero(self):
        ctx = make_context(fig2_config())
        assert g_inverse(ctx, g_fn(ctx, 0.0)) == 0.0
        assert g_inverse(ctx, 0.5 * g_fn(ctx, 0.0)) == 0.0

    def test_round_trip(self):
        ctx = make_context(fig2_config(eps=0.4))
        for tau in (0.3, 2.0, 7.5):
            assert g_inverse(ctx, g_fn(ctx, tau)) == pytest.approx(tau, abs=1e-10)

    def test_analytic_single_process(self):
        # solve 1 - 0.5 e^-tau = 0.75
        assert g_inverse(single_ctx(), 0.75) == pytest.approx(math.log(2), abs=1e-10)

    def test_ceiling_is_domain_error(self):
        ctx = make_context(fig2_config())
        with pytest.raises(ValueError):
            g_inverse(ctx, g_ceiling(ctx))


class TestH:
    def test_zero(self):
        assert h_fn(make_context(fig2_config(eps=0.5)), 0.0) == 0.0

    def test_single_process_closed_form(self):
        # K=1, eps=0: H(tau) = E[(tau - Y)^+] = tau - 1 + e^-tau for Y ~ exp(1)
        ctx = single_ctx()
        for tau in (0.25, 1.0, 3.0, 12.0):
            assert h_fn(ctx, tau) == pytest.approx(tau - 1 + math.exp(-tau), abs=1e-12)
        assert h_fn(ctx, 1.0) == pytest.approx(0.36787944117144233, abs=1e-12)

    def test_monte_carlo_k2(self):
        cfg = SystemConfig(K=2, theta=(0.5, 0.5), sigma_sq=(1.0, 1.0), mu=1.0,
                           eps=0.5, f_max=1.0)
        ctx = make_context(cfg)
        rng = np.random.default_rng(11)
        est, se = mc_h(2, 0.5, 1.0, 3.0, 2_000_000, rng)
        assert abs(est - h_fn(ctx, 3.0)) < 3 * se

    def test_large_tau_asymptote(self):
        # H(tau) -> tau - E[Ytot]
        ctx = make_context(fig2_config(eps=0.3))
        tau = 200.0
        assert h_fn(ctx, tau) == pytest.approx(tau - mean_epoch_service(ctx), abs=1e-9)

    def test_derivative_is_service_cdf(self):
        # dH/dtau = P(Ytot <= tau) = sum_rho w_rho gamma(mu tau, rho), in [0, 1]
        ctx = make_context(fig2_config(eps=0.4))
        h = 1e-6
        for tau in (0.5, 1.5, 4.0, 9.0):
            fd = (h_fn(ctx, tau + h) - h_fn(ctx, tau - h)) / (2 * h)
            ladder = reg_gamma_ladder(ctx.config.mu * tau, ctx.plan.rho_max)
            cdf = float(np.sum(ctx.plan.weights * ladder[ctx.plan.rho - 1]))
            assert 0.0 <= fd <= 1.0 + 1e-9
            assert fd == pytest.approx(cdf, abs=1e-6)


class TestHInverse:
    def test_zero(self):
        assert h_inverse(make_context(fig2_config()), 0.0) == 0.0

    def test_round_trip(self):
        ctx = make_context(fig2_config(eps=0.6))
        for c in (0.2, 1.0, 5.0):
            assert h_fn(ctx, h_inverse(ctx, c)) == pytest.approx(c, abs=1e-10)
        assert h_inverse(ctx, h_fn(ctx, 5.0)) == pytest.approx(5.0, abs=1e-10)

    def test_binding_threshold_value(self):
        # K=2, eps=0, c=2: frozen from the independent scipy-based bisection
        # oracle; also cross-checked against the Monte Carlo root below.
        ctx = make_context(fig2_config(eps=0.0))
        tau = h_inverse(ctx, 2.0)
        assert tau == pytest.approx(3.8784131283919736, abs=1e-8)
        rng = np.random.default_rng(3)
        y = rng.gamma(2.0, 1.0, 2_000_000)
        emp = np.maximum(tau - y, 0.0)
        se = emp.std(ddof=1) / math.sqrt(y.size)
        assert abs(emp.mean() - 2.0) < 3 * se

    def test_negative_is_error(self):
        with pytest.raises(ValueError):
            h_inverse(make_context(fig2_config()), -0.5)


class TestF:
    def test_single_process_at_zero(self):
        # single exp(1) attempt: E[e^-Y] = mu/(2 theta + mu) = 1/2
        assert f_fn(single_ctx(), 0.0, 0) == pytest.approx(0.5, abs=1e-12)

    def test_large_tau_vanishes(self):
        ctx = make_context(fig2_config())
        assert f_fn(ctx, 100.0, 1) == pytest.approx(0.0, abs=1e-12)

    def test_decreasing_in_tau(self):
        ctx = make_context(fig2_config(eps=0.5))
        vals = [f_fn(ctx, t, 0) for t in np.linspace(0, 8, 40)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_monte_carlo_k2(self):
        ctx = make_context(fig2_config(eps=0.3))
        rng = np.random.default_rng(13)
        est, se = mc_f(2, 0.3, 1.0, 0.5, 2.0, 2_000_000, rng)
        assert abs(est - f_fn(ctx, 2.0, 1)) < 3 * se

    def test_index_error(self):
        with pytest.raises(IndexError):
            f_fn(make_context(fig2_config()), 1.0, 2)


class TestMeanEpochService:
    def test_closed_forms(self):
        a = SystemConfig(K=2, theta=(0.5, 0.5), sigma_sq=(1, 1), mu=1.0, eps=0.0, f_max=1.0)
        b = SystemConfig(K=2, theta=(0.5, 0.5), sigma_sq=(1, 1), mu=1.0, eps=0.5, f_max=1.0)
        c = SystemConfig(K=1, theta=(0.5,), sigma_sq=(1,), mu=2.0, eps=0.5, f_max=1.0)
        assert mean_epoch_service(make_context(a)) == 2.0
        assert mean_epoch_service(make_context(b)) == 4.0
        assert mean_epoch_service(make_context(c)) == 1.0

    def test_monte_carlo(self):
        rng = np.random.default_rng(17)
        est, se = mc_mean_service(2, 0.5, 1.0, 2_000_000, rng)
        assert abs(est - 4.0) < 3 * se


class TestDinkelbach:
    def test_positive_at_zero_beta(self):
        ctx = make_context(fig2_config())
        for tau in (0.0, 1.0, 5.0):
            assert dinkelbach_p(ctx, 0.0, tau) > 0

    def test_negative_at_ceiling(self):
        ctx = make_context(fig2_config())
        for tau in (0.0, 1.0, 5.0):
            assert dinkelbach_p(ctx, g_ceiling(ctx), tau) < 0

    def test_affine_decreasing_in_beta(self):
        ctx = make_context(fig2_config(eps=0.4))
        tau = 1.7
        p0, p1, p2 = (dinkelbach_p(ctx, b, tau) for b in (0.0, 1.0, 2.0))
        slope1, slope2 = p1 - p0, p2 - p1
        den = h_fn(ctx, tau) + mean_epoch_service(ctx)
        assert slope1 == pytest.approx(slope2, rel=1e-9)
        assert slope1 == pytest.approx(-den, rel=1e-9)
        assert slope1 < 0

    def test_consistent_with_ratio(self):
        ctx = make_context(fig2_config())
        num, den = mse_numerator_denominator(ctx, 2.0)
        assert dinkelbach_p(ctx, num / den, 2.0) == pytest.approx(0.0, abs=1e-12)


class TestOracleEquivalenceSmoke:
    """Light version of the acceptance battery: 6 random tuples, 1e6 draws."""

    def test_h_and_f_match_monte_carlo(self):
        rng = np.random.default_rng(2024)
        for _ in range(6):
            k = int(rng.integers(1, 5))
            eps = float(rng.uniform(0, 0.8))
            mu = float(rng.uniform(0.5, 2.0))
            tau = float(rng.uniform(0, 10))
            theta = float(rng.uniform(0.1, 1.0))
            cfg = SystemConfig(K=k, theta=(theta,) * k, sigma_sq=(1.0,) * k,
                               mu=mu, eps=eps, f_max=1.0)
            ctx = make_context(cfg)
            est, se = mc_h(k, eps, mu, tau, 1_000_000, rng)
            assert abs(est - h_fn(ctx, tau)) < 3.5 * max(se, 1e-12)
            est, se = mc_f(k, eps, mu, theta, tau, 1_000_000, rng)
            assert abs(est - f_fn(ctx, tau, 0)) < 3.5 * max(se, 1e-12)
