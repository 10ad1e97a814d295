import math
import os

import numpy as np
import pytest

from hardyrp.numerics import (
    CurveSample,
    QuadratureConfig,
    UnderSampledCurveError,
    eig_hermitian,
    integrate_line,
    winding_number,
)


class TestIntegrateLine:
    def test_gaussian(self):
        cfg = QuadratureConfig()
        val = integrate_line(lambda x: math.exp(-x * x), cfg)
        assert abs(val.real - math.sqrt(math.pi)) < 1e-10

    def test_cauchy_density(self):
        cfg = QuadratureConfig()
        val = integrate_line(lambda x: 1.0 / (1.0 + x * x), cfg)
        assert abs(val.real - math.pi) < 1e-10

    def test_log_singularity(self):
        # int |log|x|| / (1+x^2) dx = 4 * Catalan's constant
        cfg = QuadratureConfig()
        val = integrate_line(lambda x: abs(math.log(abs(x))) / (1 + x * x),
                             cfg, singularities=(0.0,))
        assert abs(val.real - 3.6638623767088760) < 1e-8

    def test_complex_integrand(self):
        cfg = QuadratureConfig()
        val = integrate_line(lambda x: 1.0 / (x - 1j) ** 2, cfg)
        assert abs(val) < 1e-9

    def test_shifted_peak_with_breakpoint(self):
        cfg = QuadratureConfig()
        a = 3.0
        val = integrate_line(lambda x: 1.0 / ((x - a) ** 2 + 1e-6), cfg,
                             singularities=(a,))
        assert abs(val.real - math.pi / 1e-3) / (math.pi / 1e-3) < 1e-8

    def test_max_panels_env(self, monkeypatch):
        monkeypatch.setenv("HARDYRP_MAX_PANELS", "7")
        cfg = QuadratureConfig()
        assert cfg.effective_subdivisions == 7


class TestWindingNumber:
    @pytest.mark.parametrize("k", [-3, -1, 0, 1, 2, 5])
    def test_circle_powers(self, k):
        t = np.linspace(0, 2 * np.pi, 4096)
        curve = CurveSample(np.exp(1j * k * t) * (2.0 + np.cos(t)),
                            exclusion_radius=1e-9)
        assert winding_number(curve) == k

    def test_undersampled_rejected(self):
        t = np.linspace(0, 2 * np.pi, 8)
        curve = CurveSample(np.exp(10j * t), exclusion_radius=1e-9,
                            closure_tol=1.0)
        with pytest.raises(UnderSampledCurveError):
            winding_number(curve)

    def test_origin_exclusion(self):
        t = np.linspace(0, 2 * np.pi, 512)
        with pytest.raises(ValueError):
            CurveSample(1e-15 * np.exp(1j * t), exclusion_radius=1e-9)


class TestEigHermitian:
    def test_orders_ascending(self):
        A = np.diag([3.0, -1.0, 2.0]).astype(complex)
        w, U = eig_hermitian(A)
        assert np.allclose(w, [-1.0, 2.0, 3.0])
        assert np.allclose(U.conj().T @ U, np.eye(3))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
