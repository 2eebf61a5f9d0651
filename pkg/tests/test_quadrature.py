"""Quadrature engine checks: exact values, invariants, truncation soundness."""

import math

import numpy as np
import pytest

from wit.quadrature import (
    Domain,
    DecayHint,
    QuadConfig,
    integrate_2d,
    integrate_adaptive,
    integrate_fourier_line,
    integrate_semiinfinite,
    vectorize_scalar,
)
from wit.specfun import gamma_complex, macdonald_k

CFG = QuadConfig()


class TestAdaptive:
    def test_constant(self):
        r = integrate_adaptive(lambda x: np.ones_like(x), 0.0, 1.0, CFG)
        assert r.converged
        assert abs(r.value - 1.0) < 1e-12

    def test_x_squared(self):
        r = integrate_adaptive(lambda x: x * x, 0.0, 1.0, CFG)
        assert abs(r.value - 1.0 / 3.0) < 1e-12

    def test_sin(self):
        r = integrate_adaptive(np.sin, 0.0, math.pi, CFG)
        assert abs(r.value - 2.0) < 1e-11

    def test_converged_error_contract(self):
        r = integrate_adaptive(lambda x: np.exp(-x * x), 0.0, 4.0, CFG)
        assert r.converged
        assert r.err_estimate <= max(CFG.abs_tol, CFG.rel_tol * abs(r.value))


class TestSemiInfinite:
    def test_exponential(self):
        r = integrate_semiinfinite(
            lambda t: np.exp(-t), DecayHint("exponential", 1.0), CFG)
        assert abs(r.value - 1.0) < 1e-10

    def test_gamma_cross_check(self):
        a = 1.7
        r = integrate_semiinfinite(
            lambda t: np.where(t > 0, t, 1.0) ** (a - 1.0) * np.exp(-t)
            * (t > 0),
            DecayHint("exponential", 1.0), CFG)
        assert abs(r.value - gamma_complex(a)) < 1e-9

    def test_cosh_kernel_matches_macdonald(self):
        r = integrate_semiinfinite(
            lambda u: np.exp(-np.cosh(u)), DecayHint("exponential", 1.0), CFG)
        k = macdonald_k(0.0, 1.0, CFG)
        assert abs(r.value - k.value) < 1e-10


class TestFourierLine:
    def test_gaussian_pair(self):
        omega = 2.0
        r = integrate_fourier_line(
            lambda y: np.exp(-y * y), omega, DecayHint("gaussian", 1.0), CFG)
        exact = math.sqrt(math.pi) * math.exp(-omega * omega / 4.0)
        assert abs(r.value - exact) < 1e-10

    def test_omega_zero_reduces_to_doubled_half_line(self):
        r0 = integrate_fourier_line(
            lambda y: np.exp(-y * y), 0.0, DecayHint("gaussian", 1.0), CFG)
        rh = integrate_semiinfinite(
            lambda y: np.exp(-y * y), DecayHint("gaussian", 1.0), CFG)
        assert abs(r0.value - 2.0 * rh.value) < 1e-10

    def test_against_brute_force_trapezoid(self):
        omega = 3.0
        g = lambda y: np.exp(-np.abs(y)) / (1.0 + y * y)
        r = integrate_fourier_line(g, omega, DecayHint("exponential", 1.0), CFG)
        ys = np.linspace(-40.0, 40.0, 400_001)
        brute = np.trapezoid(np.exp(-1j * omega * ys) * g(ys), ys)
        assert abs(r.value - brute) < 1e-8


class Test2D:
    def test_unit_square(self):
        r = integrate_2d(
            lambda u, ys: np.ones_like(ys),
            Domain("finite", 0.0, 1.0), Domain("finite", 0.0, 1.0), CFG)
        assert abs(r.value - 1.0) < 1e-10

    def test_separable_exponential(self):
        hint = DecayHint("exponential", 1.0)
        r = integrate_2d(
            lambda u, ys: math.exp(-u) * np.exp(-ys),
            Domain("semi_infinite", hint=hint),
            Domain("semi_infinite", hint=hint), CFG)
        assert abs(r.value - 1.0) < 1e-8


class TestInvariants:
    def test_linearity(self):
        f = lambda x: np.exp(-x * x)
        g = lambda x: 1.0 / (1.0 + x * x)
        a, b = 2.0, -3.0
        rf = integrate_adaptive(f, 0.0, 5.0, CFG)
        rg = integrate_adaptive(g, 0.0, 5.0, CFG)
        rc = integrate_adaptive(lambda x: a * f(x) + b * g(x), 0.0, 5.0, CFG)
        combined = a * rf.value + b * rg.value
        assert abs(rc.value - combined) <= 2.0 * (
            rc.err_estimate + abs(a) * rf.err_estimate
            + abs(b) * rg.err_estimate) + 1e-13

    def test_refinement_monotonicity(self):
        exact = 2.0  # integral of sin over [0, pi]
        loose = QuadConfig(abs_tol=1e-6, rel_tol=1e-5)
        resids = []
        for _ in range(3):
            r = integrate_adaptive(np.sin, 0.0, math.pi, loose)
            resids.append(abs(r.value - exact))
            loose = loose.with_tol(abs_tol=loose.abs_tol / 2.0,
                                   rel_tol=loose.rel_tol / 2.0)
        assert resids[1] <= resids[0] + 1e-15
        assert resids[2] <= resids[1] + 1e-15

    def test_truncation_soundness(self):
        hint = DecayHint("exponential", 1.0)
        tail = CFG.abs_tol * CFG.truncation_margin
        t = hint.truncation_point(tail)
        f = lambda x: np.exp(-x) * np.cos(x)
        r1 = integrate_adaptive(f, 0.0, t, CFG)
        r2 = integrate_adaptive(f, 0.0, t + 5.0, CFG)
        assert abs(r1.value - r2.value) < CFG.abs_tol


class TestConfigAndHints:
    def test_bad_tolerance_rejected(self):
        with pytest.raises(ValueError):
            QuadConfig(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadConfig(abs_tol=2.0)

    def test_bad_hint_rejected(self):
        with pytest.raises(ValueError):
            DecayHint("exponential", -1.0)
        with pytest.raises(ValueError):
            DecayHint("power", 0.5)
        with pytest.raises(ValueError):
            DecayHint("unknown", 1.0)

    def test_truncation_point_bounds_tail(self):
        hint = DecayHint("exponential", 2.0)
        t = hint.truncation_point(1e-8)
        assert math.exp(-2.0 * t) / 2.0 <= 1e-8 * 1.0001

    def test_vectorize_scalar(self):
        f = vectorize_scalar(lambda x: x * x)
        out = f(np.array([1.0, 2.0, 3.0]))
        assert np.allclose(out, [1.0, 4.0, 9.0])
