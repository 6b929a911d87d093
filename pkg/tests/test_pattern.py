import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irscover.errors import SearchSpaceTooLargeError
from irscover.pattern import (AngularSpan, IrsPattern, SynthConfig, beamwidth, brute_force_synth,
                              design_pattern, gain, linear_phases, synth_anchored, synth_flat,
                              synth_linear, worst_case_gain)

D = 0.5
# direct complex summation of the steered array at its half-beamwidth point, N=128
DIRICHLET_128 = 6640.518434557712
# exhaustive 8^4 enumeration over [0, 0.5] on the 256-point grid; equals 4 + 2*sqrt(2)
ORACLE_N4_W05 = 4.0 + 2.0 * math.sqrt(2.0)


def direct_gain(thetas, delta):
    return abs(sum(np.exp(1j * (t + 2 * math.pi * n * D * delta)) for n, t in enumerate(thetas))) ** 2


class TestGain:
    @pytest.mark.parametrize("N", [1, 2, 7, 64])
    def test_coherent(self, N):
        assert gain(np.zeros(N), 0.0, D) == pytest.approx(N * N)

    def test_cancellation(self):
        assert gain([0.0, math.pi], 0.0, D) == pytest.approx(0.0, abs=1e-25)

    def test_half_beamwidth_point(self):
        N = 128
        th = -2 * math.pi * np.arange(N) * D * (0.0 + 1 / (2 * N * D))
        assert gain(th, 0.0, D) == pytest.approx(DIRICHLET_128, rel=1e-12)
        assert DIRICHLET_128 == pytest.approx(1 / math.sin(math.pi / 256) ** 2, rel=1e-12)

    @given(st.lists(st.floats(0, 2 * math.pi), min_size=1, max_size=12), st.floats(-2, 2))
    def test_matches_direct_sum_and_bounded(self, th, delta):
        g = gain(th, delta, D)
        assert g == pytest.approx(direct_gain(th, delta), rel=1e-9, abs=1e-9)
        assert 0.0 <= g <= len(th) ** 2 * (1 + 1e-12)

    @given(st.integers(1, 32), st.floats(-1, 1), st.floats(-1, 1), st.integers(-3, 3))
    def test_linear_period(self, N, steer, delta, k):
        th = linear_phases(N, D, steer)
        assert gain(th, delta + k / D, D) == pytest.approx(gain(th, delta, D), rel=1e-7, abs=1e-7)

    def test_vectorised(self):
        th = np.random.default_rng(0).uniform(0, 2 * np.pi, 9)
        d = np.linspace(-1, 1, 5)
        np.testing.assert_allclose(gain(th, d, D), [gain(th, x, D) for x in d])


class TestWorstCase:
    def test_point_span(self):
        th = np.random.default_rng(1).uniform(0, 2 * np.pi, 8)
        assert worst_case_gain(th, AngularSpan(0.3, 0.3), D) == gain(th, 0.3, D)

    def test_one_beamwidth(self):
        N = 128
        span = AngularSpan(0.2, 0.2 + beamwidth(N, D))
        g = worst_case_gain(synth_linear(span, N, D), span, D)
        assert g == pytest.approx(1 / math.sin(math.pi / (2 * N)) ** 2, rel=1e-9)

    @given(st.floats(-0.5, 0.5), st.floats(0, 0.3), st.floats(0, 0.3))
    def test_widening_never_increases(self, lo, w, extra):
        th = linear_phases(16, D, lo)
        # 0.01 grid step on both spans so the narrower grid is a subset of the wider one
        n = round(w / 0.01)
        m = round(extra / 0.01)
        inner = AngularSpan(lo, lo + n * 0.01)
        outer = AngularSpan(lo, lo + (n + m) * 0.01)
        a = worst_case_gain(th, inner, D, n + 1)
        b = worst_case_gain(th, outer, D, n + m + 1)
        assert b <= a * (1 + 1e-9) + 1e-9


class TestSynthLinear:
    def test_one_beamwidth_value(self):
        N = 64
        span = AngularSpan(0.0, beamwidth(N, D))
        g = worst_case_gain(synth_linear(span, N, D), span, D)
        assert g == pytest.approx(1 / math.sin(math.pi / 128) ** 2, rel=1e-9)

    @given(st.floats(-1, 1), st.integers(1, 64))
    def test_point_alignment(self, x, N):
        p = synth_linear(AngularSpan(x, x), N, D)
        assert gain(p, x, D) == pytest.approx(N * N, rel=1e-9)

    def test_symmetric_dip(self):
        N = 32
        span = AngularSpan(0.1, 0.1 + beamwidth(N, D))
        p = synth_linear(span, N, D)
        assert gain(p, span.lo, D) == pytest.approx(gain(p, span.hi, D), rel=1e-9)

    def test_anchored_equals_linear_at_one_beamwidth(self):
        N = 16
        span = AngularSpan(-0.3, -0.3 + beamwidth(N, D))
        np.testing.assert_allclose(synth_anchored(span, N, D).thetas, synth_linear(span, N, D).thetas, atol=1e-12)

    @given(st.integers(2, 64), st.floats(0.0, 1.0))
    def test_anchored_bound_within_beamwidth(self, N, frac):
        span = AngularSpan(0.05, 0.05 + frac * beamwidth(N, D))
        g = worst_case_gain(synth_anchored(span, N, D), span, D)
        assert g >= (1 / math.sin(math.pi / (2 * N)) ** 2) * (1 - 1e-9)

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=20))
    def test_unit_modulus(self, th):
        p = IrsPattern(th)
        assert np.all((p.thetas >= 0) & (p.thetas < 2 * math.pi))
        np.testing.assert_allclose(np.abs(p.coefficients), 1.0)


class TestSynthFlat:
    @pytest.mark.parametrize("N,frac", [(16, 0.5), (32, 1.0), (64, 0.9)])
    def test_beats_linear_within_beamwidth(self, N, frac):
        span = AngularSpan(0.1, 0.1 + frac * beamwidth(N, D))
        lin = worst_case_gain(synth_linear(span, N, D), span, D)
        assert worst_case_gain(synth_flat(span, N, D), span, D) >= lin * (1 - 1e-12)

    @pytest.mark.parametrize("N,beams", [(16, 3), (32, 6), (64, 2.5)])
    def test_beats_linear_wide(self, N, beams):
        span = AngularSpan(-0.2, -0.2 + beams * beamwidth(N, D))
        lin = worst_case_gain(synth_linear(span, N, D), span, D)
        assert worst_case_gain(synth_flat(span, N, D), span, D) >= lin

    @pytest.mark.parametrize("N", [32, 64])
    def test_energy_floor_wide_span(self, N):
        span = AngularSpan(0.1, 0.1 + 8 * beamwidth(N, D))
        g = worst_case_gain(synth_flat(span, N, D), span, D)
        assert g >= 0.8 * N / (D * span.width)

    def test_quantized_matches_oracle(self):
        span = AngularSpan(0.0, 1.0)
        cfg = SynthConfig(method="flat", phase_bits=3)
        a = worst_case_gain(synth_flat(span, 4, D, cfg), span, D)
        b = worst_case_gain(brute_force_synth(span, 4, 3, D), span, D)
        assert a == pytest.approx(b, rel=1e-9)

    def test_quantized_on_alphabet(self):
        p = synth_flat(AngularSpan(0.0, 0.4), 6, D, SynthConfig(method="flat", phase_bits=2))
        k = p.thetas / (math.pi / 2)
        np.testing.assert_allclose(k, np.round(k), atol=1e-12)

    def test_deterministic(self):
        span = AngularSpan(0.0, 3 * beamwidth(16, D))
        np.testing.assert_array_equal(synth_flat(span, 16, D).thetas, synth_flat(span, 16, D).thetas)


class TestBruteForce:
    def test_single_element(self):
        span = AngularSpan(0.0, 0.5)
        assert worst_case_gain(brute_force_synth(span, 1, 3), span, D) == pytest.approx(1.0)

    def test_pair_point_span(self):
        span = AngularSpan(0.0, 0.0)
        assert worst_case_gain(brute_force_synth(span, 2, 1), span, D) == pytest.approx(4.0)

    def test_regression_constant(self):
        span = AngularSpan(0.0, 0.5)
        p = brute_force_synth(span, 4, 3)
        assert worst_case_gain(p, span, D) == pytest.approx(ORACLE_N4_W05, rel=1e-12)
        assert p.thetas[0] == 0.0

    def test_refuses_large_space(self):
        with pytest.raises(SearchSpaceTooLargeError):
            brute_force_synth(AngularSpan(0, 0.1), 12, 3)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(2, 5), st.floats(-1, 1), st.floats(0, 1))
    def test_nested_spans_non_increasing(self, N, lo, w):
        # grids share the 0.01 step so they nest
        n = max(1, round(w / 0.01))
        values = []
        for m in (n // 2, n):
            span = AngularSpan(lo, lo + m * 0.01)
            values.append(worst_case_gain(brute_force_synth(span, N, 2, D, m + 1), span, D, m + 1))
        assert values[1] <= values[0] * (1 + 1e-9)


class TestDesign:
    def test_two_step_switch(self):
        N = 32
        narrow = AngularSpan(0.0, 0.5 * beamwidth(N, D))
        np.testing.assert_array_equal(design_pattern(narrow, N, D).thetas,
                                      synth_anchored(narrow, N, D).thetas)
        wide = AngularSpan(0.0, 3 * beamwidth(N, D))
        np.testing.assert_array_equal(design_pattern(wide, N, D).thetas, synth_flat(wide, N, D).thetas)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            SynthConfig(method="magic")
