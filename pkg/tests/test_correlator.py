"""Correlator tests against all-pairs brute-force oracles.

Every counting operation is checked for exact equality with nested-loop
reference implementations on small streams, then for statistical behavior
on Poisson and correlated synthetic data.
"""
import numpy as np
import pytest

from spptag import AnalysisError, BiphotonAmplitude, RngSpec, Shape, TemporalWaveform, TimeTagStream
from spptag.correlator import (
    auto_g2_zero,
    cauchy_schwarz,
    coincidence_histogram,
    cosine_similarity,
    expected_waveform,
    heralded_g2_zero,
    merge_histograms,
    normalize,
    reconstruct_waveform,
    split_channel,
)
from spptag.model import evaluate_density, sample_delay
from spptag.source import poisson_times

SECOND = 10**12


def brute_histogram(t_a, t_b, bin_w, tmin, tmax):
    counts = np.zeros((tmax - tmin) // bin_w, dtype=np.int64)
    for a in t_a:
        for b in t_b:
            d = int(b) - int(a)
            if tmin <= d < tmax:
                counts[(d - tmin) // bin_w] += 1
    return counts


def brute_pairs_within(t_a, t_b, w):
    return sum(1 for a in t_a for b in t_b if -w <= int(b) - int(a) < w)


def brute_heralded_counts(h, t_a, t_b, w):
    n_a = n_b = n_ab = 0
    for x in h:
        a = any(x - w <= t < x + w for t in t_a)
        b = any(x - w <= t < x + w for t in t_b)
        n_a += a
        n_b += b
        n_ab += a and b
    return n_a, n_b, n_ab


def random_stream(rng_spec, n_per_channel=300, duration=10**9, channels=(0, 1, 2)):
    gen = rng_spec.generator()
    per = {}
    for ch in channels:
        t = np.sort((gen.random(n_per_channel) * duration).astype(np.int64))
        per[ch] = t
    return TimeTagStream.from_channel_times(per, duration)


class TestCoincidenceHistogram:
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_matches_brute_force(self, seed):
        s = random_stream(RngSpec(110, seed))
        hist = coincidence_histogram(s, 0, 1, 1000, -50_000, 50_000)
        expected = brute_histogram(s.channel_times(0), s.channel_times(1),
                                   1000, -50_000, 50_000)
        np.testing.assert_array_equal(hist.counts, expected)

    def test_merged_b_channels_match_brute_force(self):
        s = random_stream(RngSpec(111))
        hist = coincidence_histogram(s, 0, (1, 2), 2000, -40_000, 40_000)
        t_b = np.sort(np.concatenate([s.channel_times(1), s.channel_times(2)]))
        expected = brute_histogram(s.channel_times(0), t_b, 2000, -40_000, 40_000)
        np.testing.assert_array_equal(hist.counts, expected)

    def test_anchor_slice_merge_is_exact(self):
        s = random_stream(RngSpec(112))
        full = coincidence_histogram(s, 0, 1, 1000, -50_000, 50_000)
        h1 = coincidence_histogram(s, 0, 1, 1000, -50_000, 50_000, a_slice=slice(0, 137))
        h2 = coincidence_histogram(s, 0, 1, 1000, -50_000, 50_000, a_slice=slice(137, None))
        merged = merge_histograms(h1, h2)
        np.testing.assert_array_equal(merged.counts, full.counts)
        assert merged.n_a == full.n_a

    def test_window_validation(self):
        s = random_stream(RngSpec(113))
        with pytest.raises(ValueError):
            coincidence_histogram(s, 0, 1, 1000, -500, 700)   # not whole bins
        with pytest.raises(ValueError):
            coincidence_histogram(s, 0, 1, 0, -1000, 1000)
        with pytest.raises(AnalysisError):
            coincidence_histogram(s, 0, (0, 1), 1000, -1000, 1000)

    def test_empty_channel_flagged_not_fatal(self):
        s = TimeTagStream([100, 200], [0, 0], 10**6)
        hist = coincidence_histogram(s, 0, 1, 100, -1000, 1000)
        assert hist.counts.sum() == 0 and hist.n_b == 0


class TestNormalize:
    def test_independent_poisson_is_unity(self):
        gen = RngSpec(120).generator()
        per = {ch: poisson_times(50_000.0, 0, SECOND, gen) for ch in (0, 1)}
        s = TimeTagStream.from_channel_times(per, SECOND)
        g = normalize(coincidence_histogram(s, 0, 1, 10_000, -500_000, 500_000))
        # ~25 pairs per bin, 2500 total: mean-of-bins sigma is ~0.02
        assert abs(g.values.mean() - 1.0) < 0.08
        assert np.all(np.abs(g.values - 1.0) < 6 * g.errors)
        assert not g.low_stats.any()

    def test_peak_position_invariant_under_longer_observation(self):
        gen = RngSpec(121).generator()
        h = poisson_times(5000.0, 0, SECOND // 10, gen)
        amp = BiphotonAmplitude(Shape.DOUBLE_EXPONENTIAL, 50.0)
        sig = np.sort(h + np.rint(sample_delay(amp, gen, size=h.size) * 1000).astype(np.int64))
        sig = sig[(sig >= 0)]
        short = TimeTagStream.from_channel_times({0: h, 1: sig}, SECOND // 10)
        padded = TimeTagStream.from_channel_times({0: h, 1: sig}, SECOND)
        g_short = normalize(coincidence_histogram(short, 0, 1, 1000, -200_000, 200_000))
        g_pad = normalize(coincidence_histogram(padded, 0, 1, 1000, -200_000, 200_000))
        assert np.argmax(g_short.values) == np.argmax(g_pad.values)
        # appending empty observation time scales g up by the duration ratio
        ratio = g_pad.values[np.argmax(g_pad.values)] / g_short.values[np.argmax(g_short.values)]
        assert ratio == pytest.approx(10.0, rel=1e-9)

    def test_zero_rate_errors(self):
        s = TimeTagStream([100], [0], 10**6)
        hist = coincidence_histogram(s, 0, 1, 100, -1000, 1000)
        with pytest.raises(AnalysisError):
            normalize(hist)


class TestAutoG2:
    def test_pair_count_matches_brute_force(self):
        s = random_stream(RngSpec(130), n_per_channel=200)
        res = auto_g2_zero(s, 0, 1, 25_000)
        assert res.n_pairs == brute_pairs_within(s.channel_times(0),
                                                 s.channel_times(1), 25_000)

    def test_independent_poisson_near_unity(self):
        gen = RngSpec(131).generator()
        per = {ch: poisson_times(20_000.0, 0, SECOND, gen) for ch in (0, 1)}
        s = TimeTagStream.from_channel_times(per, SECOND)
        res = auto_g2_zero(s, 0, 1, 10_000_000)
        assert abs(res.value - 1.0) < 3.5 * res.error
        assert res.error < 0.05

    def test_empty_channel_raises(self):
        s = TimeTagStream([100], [0], 10**6)
        with pytest.raises(AnalysisError):
            auto_g2_zero(s, 0, 1, 1000)


class TestSplitChannel:
    def test_partition_preserves_tags(self):
        s = random_stream(RngSpec(140), n_per_channel=500, channels=(3,))
        halves = split_channel(s, 3, RngSpec(141))
        a = halves.channel_times(0)
        b = halves.channel_times(1)
        assert a.size + b.size == 500
        np.testing.assert_array_equal(np.sort(np.concatenate([a, b])),
                                      s.channel_times(3))
        assert abs(a.size - 250) < 4.5 * np.sqrt(125)

    def test_deterministic(self):
        s = random_stream(RngSpec(142), channels=(0,))
        h1 = split_channel(s, 0, RngSpec(143))
        h2 = split_channel(s, 0, RngSpec(143))
        assert h1 == h2


class TestHeraldedG2:
    def test_counts_match_brute_force(self):
        s = random_stream(RngSpec(150), n_per_channel=150)
        res = heralded_g2_zero(s, 0, 1, 2, window_ps=100_000)
        n_a, n_b, n_ab = brute_heralded_counts(
            s.channel_times(0), s.channel_times(1), s.channel_times(2), 100_000)
        assert (res.n_a, res.n_b, res.n_ab) == (n_a, n_b, n_ab)
        assert res.value == pytest.approx(n_ab * 150 / (n_a * n_b))

    def test_ideal_heralded_photon_gives_zero(self):
        # one signal per herald, alternately routed: no window sees both
        n = 2000
        h = (np.arange(n, dtype=np.int64) + 1) * 1_000_000
        sig = h + 25_000
        per = {0: h, 1: sig[::2], 2: sig[1::2]}
        s = TimeTagStream.from_channel_times(per, h[-1] + 1_000_000)
        res = heralded_g2_zero(s, 0, 1, 2, window_ps=150_000)
        assert res.value == 0.0
        assert res.n_ab == 0 and res.n_a == n // 2

    def test_every_window_full_gives_unity(self):
        n = 500
        h = (np.arange(n, dtype=np.int64) + 1) * 1_000_000
        per = {0: h, 1: h + 10_000, 2: h - 10_000}
        s = TimeTagStream.from_channel_times(per, h[-1] + 1_000_000)
        res = heralded_g2_zero(s, 0, 1, 2, window_ps=50_000)
        assert res.value == 1.0

    def test_poisson_control_near_unity(self):
        # rates sized so ~40 heralds see both channels fire
        gen = RngSpec(151).generator()
        per = {0: poisson_times(5000.0, 0, 2 * SECOND, gen),
               1: poisson_times(200_000.0, 0, 2 * SECOND, gen),
               2: poisson_times(200_000.0, 0, 2 * SECOND, gen)}
        s = TimeTagStream.from_channel_times(per, 2 * SECOND)
        res = heralded_g2_zero(s, 0, 1, 2, window_ps=150_000)
        assert abs(res.value - 1.0) < 3.5 * res.error
        assert res.error < 0.35

    def test_no_heralds_raises(self):
        s = TimeTagStream([100], [1], 10**6)
        with pytest.raises(AnalysisError):
            heralded_g2_zero(s, 0, 1, 2, window_ps=1000)


class TestCauchySchwarz:
    def _correlated_stream(self, seed, duration=SECOND):
        gen = RngSpec(seed).generator()
        h = poisson_times(2000.0, 0, duration, gen)
        amp = BiphotonAmplitude(Shape.DOUBLE_EXPONENTIAL, 50.0)
        delays = np.rint(sample_delay(amp, gen, size=h.size) * 1000).astype(np.int64)
        sig = h + delays
        ok = (sig >= 0) & (sig <= duration)
        sig = sig[ok]
        route = gen.random(sig.size) < 0.5
        per = {0: h,
               1: np.sort(sig[route]),
               2: np.sort(sig[~route])}
        return TimeTagStream.from_channel_times(per, duration)

    def test_violation_on_pair_source(self):
        # background-free stream: the 5 sigma margin needs a wide auto window
        s = self._correlated_stream(160, duration=5 * SECOND)
        res = cauchy_schwarz(s, 0, (1, 2), 1000, -400_000, 400_000, RngSpec(161),
                             auto_window_ps=50_000_000)
        peak = np.argmax(res.c_values)
        assert abs(res.tau_ns[peak]) < 10.0
        assert res.c_values[peak] > 1 + 5 * res.c_errors[peak]
        # far tails are classical-compatible on aggregate
        tail = np.abs(res.tau_ns) > 200.0
        assert np.isfinite(res.c_values[tail]).all()

    def test_autocorrelations_near_unity(self):
        s = self._correlated_stream(162)
        res = cauchy_schwarz(s, 0, (1, 2), 1000, -400_000, 400_000, RngSpec(163))
        assert abs(res.g_ii0.value - 1.0) < 4 * res.g_ii0.error
        assert abs(res.g_rr0.value - 1.0) < 4 * res.g_rr0.error

    def test_deterministic_given_rng(self):
        s = self._correlated_stream(164)
        r1 = cauchy_schwarz(s, 0, (1, 2), 2000, -200_000, 200_000, RngSpec(165))
        r2 = cauchy_schwarz(s, 0, (1, 2), 2000, -200_000, 200_000, RngSpec(165))
        np.testing.assert_array_equal(r1.c_values, r2.c_values)

    def test_classical_poisson_respects_bound(self):
        # independent coherent-state stand-in: C <= 1 within 5 sigma everywhere
        for seed in range(20):
            gen = RngSpec(166, seed).generator()
            per = {ch: poisson_times(100_000.0, 0, SECOND, gen) for ch in (0, 1, 2)}
            s = TimeTagStream.from_channel_times(per, SECOND)
            res = cauchy_schwarz(s, 0, (1, 2), 1000, -100_000, 100_000, RngSpec(167, seed))
            peak = np.argmax(res.c_values)
            assert res.c_values[peak] <= 1.0 + 5.0 * res.c_errors[peak]


class TestWaveform:
    def test_matches_brute_force(self):
        s = random_stream(RngSpec(170), n_per_channel=200)
        w = reconstruct_waveform(s, 0, 1, 1000, -50_000, 50_000)
        expected = brute_histogram(s.channel_times(0), s.channel_times(1),
                                   1000, -50_000, 50_000)
        np.testing.assert_array_equal(w.counts, expected.astype(float))
        assert w.bin_width_ns == 1.0 and w.start_ns == -50.0

    def test_empty_gives_zeros(self):
        s = TimeTagStream([100, 5000], [0, 0], 10**6)
        w = reconstruct_waveform(s, 0, 1, 1000, -10_000, 10_000)
        assert w.total() == 0.0

    def test_shape_recovery(self):
        gen = RngSpec(171).generator()
        h = poisson_times(2000.0, 0, 20 * SECOND, gen)
        amp = BiphotonAmplitude(Shape.DOUBLE_EXPONENTIAL, 50.0)
        sig = h + np.rint(sample_delay(amp, gen, size=h.size) * 1000).astype(np.int64)
        ok = (sig >= 0) & (sig <= 20 * SECOND)
        s = TimeTagStream.from_channel_times({0: h, 1: np.sort(sig[ok])}, 20 * SECOND)
        w = reconstruct_waveform(s, 0, 1, 1000, -150_000, 150_000)
        template = expected_waveform(lambda t: evaluate_density(amp, t),
                                     -150.0, 1.0, 300)
        # 40k coincidences: shape noise caps similarity around 0.998
        assert cosine_similarity(w.counts, template) > 0.995


class TestCosineSimilarity:
    def test_identical_and_scaled(self):
        a = TemporalWaveform(0.0, 1.0, [1.0, 2.0, 3.0])
        b = TemporalWaveform(0.0, 1.0, [2.0, 4.0, 6.0])
        assert cosine_similarity(a, b) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_grid_mismatch(self):
        a = TemporalWaveform(0.0, 1.0, [1.0, 2.0])
        b = TemporalWaveform(0.0, 2.0, [1.0, 2.0])
        with pytest.raises(ValueError):
            cosine_similarity(a, b)

    def test_zero_vector(self):
        with pytest.raises(AnalysisError):
            cosine_similarity([0.0, 0.0], [1.0, 1.0])


class TestExpectedWaveform:
    def test_bin_average_matches_quadrature(self):
        from scipy import integrate
        amp = BiphotonAmplitude(Shape.DOUBLE_EXPONENTIAL, 50.0)
        tpl = expected_waveform(lambda t: evaluate_density(amp, t), -10.0, 5.0, 4)
        for k in range(4):
            lo = -10.0 + 5.0 * k
            val, _ = integrate.quad(lambda t: evaluate_density(amp, t), lo, lo + 5.0,
                                    points=[0.0] if lo < 0 < lo + 5 else None)
            assert tpl[k] == pytest.approx(val / 5.0, rel=1e-4)
