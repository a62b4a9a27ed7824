import math

import numpy as np
import pytest
from scipy.integrate import quad

import reference
from netexit.analytic import crossing_time_cdf, crossing_time_cdf_curve, lst_time, mixture_weights, phi_i
from netexit.analytic.cdf import MAX_SAFE_M
from netexit.errors import RatesTooClose, ThresholdTooLargeForCdf
from netexit.model import ModelParams

P = ModelParams(1.0, 2.0, 0.5, 1.0, 5, 5.0)
# lam > mu branch, and lam < mu with lam/b far from mu
CASES = [P, ModelParams(3.0, 1.2, 0.3, 0.8, 9, 6.0), ModelParams(0.6, 2.5, 0.7, 1.5, 12, 4.0)]


class TestPhiI:
    def test_hand_value(self):
        # Exp(1) + Exp(2) <= 1
        p = ModelParams(1.0, 2.0, 1.0, 1.0, 1, 1.0)
        assert phi_i(0, 1.0, p) == pytest.approx(1 - 2 * math.exp(-1) + math.exp(-2), rel=1e-14)

    @pytest.mark.parametrize("p", CASES)
    @pytest.mark.parametrize("i", [0, 1, 4, 11])
    def test_zero_and_limit(self, p, i):
        assert phi_i(i, 0.0, p) == 0.0
        t_end = 200.0 / min(p.lam, p.mu)
        assert phi_i(i, t_end, p) == pytest.approx(p.lam ** -(i + 1), rel=1e-9)

    @pytest.mark.parametrize("p", CASES)
    @pytest.mark.parametrize("i", [0, 2, 7])
    @pytest.mark.parametrize("t", [0.01, 0.5, 3.0, 12.0])
    def test_literal_form(self, p, i, t):
        expected = float(reference.phi_i(i, t, p))
        assert phi_i(i, t, p) == pytest.approx(expected, rel=1e-10, abs=1e-16)

    @pytest.mark.parametrize("p", CASES)
    def test_monotone_non_negative(self, p):
        t = np.linspace(0, 60, 2001)
        for i in range(p.M):
            values = phi_i(i, t, p)
            assert np.all(values >= 0)
            assert np.all(np.diff(values) >= 0)

    def test_equal_rates_refused(self):
        with pytest.raises(RatesTooClose) as exc:
            phi_i(0, 1.0, ModelParams(2.0, 2.0 * (1 + 1e-12), 0.5, 1, 3, 3))
        assert exc.value.param == "mu"


class TestCdf:
    @pytest.mark.parametrize("p", CASES)
    def test_weights_sum_to_one(self, p):
        w = mixture_weights(p)
        assert np.all(w >= 0) and math.fsum(w) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("p", CASES)
    def test_endpoints_and_monotone(self, p):
        t_end = 200.0 / min(p.lam, p.mu)
        grid = np.linspace(0, t_end, 1000)
        curve = crossing_time_cdf_curve(grid, p)
        assert curve.values[0] == 0.0
        assert np.all(np.diff(curve.values) >= 0)
        assert abs(curve.values[-1] - 1.0) < 1e-6
        assert np.all((curve.values >= 0) & (curve.values <= 1))

    @pytest.mark.parametrize("p", CASES)
    @pytest.mark.parametrize("t", [0.05, 0.7, 2.5, 6.0, 20.0])
    def test_literal_form(self, p, t):
        expected = float(reference.crossing_cdf(t, p))
        assert crossing_time_cdf(t, p) == pytest.approx(expected, rel=1e-10, abs=1e-15)

    @pytest.mark.parametrize("p", CASES)
    @pytest.mark.parametrize("theta", [0.2, 1.0, 3.0])
    def test_laplace_transform_matches_lst(self, p, theta):
        # E[e^{-theta tau}] = int theta e^{-theta t} F(t) dt
        value, _ = quad(lambda t: theta * math.exp(-theta * t) * crossing_time_cdf(t, p), 0, np.inf, limit=400)
        assert value == pytest.approx(lst_time(theta, p), abs=1e-8)

    def test_mu_equal_lam_over_b_accepted(self):
        # mu = lam / b: the three-rate condition is not needed by the mixture form
        t = 1.7
        assert crossing_time_cdf(t, P) == pytest.approx(float(reference.crossing_cdf(t, P)), rel=1e-10)

    def test_equal_rates_refused(self):
        with pytest.raises(RatesTooClose):
            crossing_time_cdf(1.0, ModelParams(1.0, 1.0, 0.5, 1, 3, 3))

    def test_threshold_cap(self):
        p = ModelParams(1.0, 2.0, 0.5, 1.0, MAX_SAFE_M + 1, 60.0)
        with pytest.raises(ThresholdTooLargeForCdf) as exc:
            crossing_time_cdf(1.0, p)
        assert exc.value.param == "M"
        values = crossing_time_cdf(np.linspace(0, 400, 200), p, unsafe=True)
        assert np.all(np.diff(values) >= 0) and abs(values[-1] - 1) < 1e-6

    def test_bad_theta(self):
        with pytest.raises(ValueError):
            crossing_time_cdf(-1.0, P)
        with pytest.raises(ValueError):
            crossing_time_cdf_curve([0.0, 2.0, 1.0], P)

    def test_scalar_and_array_agree(self):
        grid = np.array([0.0, 0.3, 4.0])
        assert [crossing_time_cdf(t, P) for t in grid] == list(crossing_time_cdf(grid, P))
