"""
Tests for modular reduction, byte assembly, the reseed finalizer and the
QPP-RNG stream.
"""
import unittest

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase

from rpss.analytics import mod_residue_np, mod_residue_t
from rpss.exceptions import ConfigurationError
from rpss.jitter import get_preset, mean_shifted
from rpss.models import CycleSample, JitterModel, OutputSource, RpssConfig
from rpss.pipeline import (
    assemble_bytes,
    build_real,
    build_simulated,
    disassemble_bytes,
    reduce,
    reseed,
)

TWO_POINT = JitterModel.from_mapping({1: 0.6, 2: 0.4})


def finalizer_oracle(seeds, etas):
    """Same mixing steps on numpy uint64 arrays, which wrap mod 2^64."""
    with np.errstate(over='ignore'):
        z = seeds ^ (etas * np.uint64(0x9E3779B97F4A7C15))
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


class ReductionTests(SimpleTestCase):

    def test_divisible_count(self):
        self.assertEqual(reduce(CycleSample(96, 100, 4), 16)[0], 0)

    def test_both_observables(self):
        self.assertEqual(reduce(CycleSample(97, 23, 4), 16), (1, 7))

    def test_modulus_below_two(self):
        with self.assertRaises(ConfigurationError):
            reduce(CycleSample(5, 5, 1), 1)


class ByteAssemblyTests(SimpleTestCase):

    def test_nibbles(self):
        self.assertEqual(assemble_bytes([0xA, 0x5], 4), b'\xa5')

    def test_whole_bytes(self):
        self.assertEqual(assemble_bytes([0x3C], 8), b'\x3c')

    def test_bits(self):
        self.assertEqual(assemble_bytes([1, 0, 1, 0, 1, 0, 1, 0], 1), b'\xaa')

    def test_trailing_group_dropped(self):
        self.assertEqual(assemble_bytes([1, 2, 3], 4), b'\x12')
        self.assertEqual(assemble_bytes([], 2), b'')

    def test_invalid_width(self):
        with self.assertRaises(ConfigurationError):
            assemble_bytes([1], 3)

    def test_residue_out_of_range(self):
        with self.assertRaises(ConfigurationError):
            assemble_bytes([16, 0], 4)

    def test_disassemble_inverts_assemble(self):
        data = bytes([0x00, 0xA5, 0xFF, 0x3C, 0x81])
        for bits in (1, 2, 4, 8):
            residues = disassemble_bytes(data, bits)
            self.assertEqual(len(residues), len(data) * 8 // bits)
            self.assertEqual(assemble_bytes(residues, bits), data)


class ReseedTests(SimpleTestCase):

    def test_zero_fixed_point(self):
        self.assertEqual(reseed(0, 0), 0)

    def test_golden_values(self):
        self.assertEqual(reseed(0, 1), 0xE220A8397B1DCDAF)
        self.assertEqual(reseed(0, 2), 0x6E789E6AA1B965F4)

    def test_matches_uint64_oracle(self):
        rng = np.random.default_rng(17)
        seeds = rng.integers(0, 2 ** 64, size=200, dtype=np.uint64)
        etas = rng.integers(0, 2 ** 40, size=200, dtype=np.uint64)
        expected = finalizer_oracle(seeds, etas)
        for s, eta, want in zip(seeds.tolist(), etas.tolist(), expected.tolist()):
            self.assertEqual(reseed(s, eta), want)

    def test_avalanche(self):
        rng = np.random.default_rng(64)
        seeds = rng.integers(0, 2 ** 64, size=10_000, dtype=np.uint64).tolist()
        flipped = [bin(reseed(s, 1000) ^ reseed(s, 1001)).count('1') for s in seeds]
        self.assertGreaterEqual(sum(flipped) / len(flipped), 20)


class QppRngTests(SimpleTestCase):

    def build(self, reseed_enabled=True, jitter=TWO_POINT, bits=8, source=OutputSource.PERMUTATIONS):
        cfg = RpssConfig.for_bits(3, 1, bits)
        return build_simulated(cfg, jitter, 11, 12, 13, reseed_enabled, source)

    def test_reproducible_without_reseed(self):
        self.assertEqual(self.build(False).generate(64), self.build(False).generate(64))

    def test_reproducible_with_reseed(self):
        self.assertEqual(self.build(True).generate(64), self.build(True).generate(64))

    def test_reseed_changes_stream(self):
        self.assertNotEqual(self.build(True).generate(16), self.build(False).generate(16))

    def test_zero_bytes(self):
        stream = self.build()
        self.assertEqual(stream.generate(0), b'')
        self.assertEqual(stream.state.cycle_index, 0)

    def test_cycles_per_byte(self):
        stream = self.build(bits=4)
        stream.generate(5)
        self.assertEqual(stream.state.cycle_index, 10)

    def test_seed_feedback(self):
        stream = self.build(True)
        s0 = stream.state.seed
        sample, _, _ = stream.next_cycle()
        self.assertEqual(stream.state.seed, reseed(s0, sample.t_ticks))
        self.assertEqual(stream.engine.rng.seed, stream.state.seed)

    def test_seed_frozen_without_reseed(self):
        stream = self.build(False)
        stream.generate(8)
        self.assertEqual(stream.state.seed, 13)

    def test_unit_runtime_probe_matches_output(self):
        unit = JitterModel.degenerate(1)
        by_count = self.build(jitter=unit).generate(32)
        by_time = self.build(jitter=unit, source=OutputSource.ELAPSED).generate(32)
        self.assertEqual(by_count, by_time)

    def test_probe_reports_both_streams(self):
        result = self.build(jitter=JitterModel.degenerate(1)).probe(20)
        self.assertEqual(len(result.n_residues), 20)
        self.assertEqual(result.n_residues, result.t_residues)
        self.assertEqual(result.mean_trial_ticks, 1.0)

    def test_switch_jitter(self):
        stream = self.build(jitter=JitterModel.degenerate(1))
        stream.probe(5)
        stream.switch_jitter(mean_shifted(JitterModel.degenerate(1), 1))
        self.assertEqual(stream.probe(20).mean_trial_ticks, 2.0)

    def test_switch_needs_simulated_timer(self):
        stream = build_real(RpssConfig.for_bits(3, 1, 8), 1, 2)
        with self.assertRaises(ConfigurationError):
            stream.switch_jitter(TWO_POINT)

    def test_real_timer_runs(self):
        data = build_real(RpssConfig.for_bits(3, 1, 8), 1, 2).generate(8)
        self.assertEqual(len(data), 8)

    def test_output_needs_bits(self):
        stream = build_simulated(RpssConfig(3, 1, 10), TWO_POINT, 1, 2, 3)
        with self.assertRaises(ConfigurationError):
            stream.generate(4)


def expected_chi_square(distribution, samples):
    """Mean of Pearson's statistic for samples draws from a residue law."""
    probs = distribution.vector
    modulus = len(probs)
    return (modulus - 1) + samples * modulus * float(np.sum((probs - 1.0 / modulus) ** 2))


class PerturbationTests(SimpleTestCase):

    def test_loaded_law_biases_elapsed_residues(self):
        cfg = RpssConfig.for_bits(5, 5, 8)
        before = expected_chi_square(mod_residue_t(cfg, get_preset('fat-like')), 250_000)
        after = expected_chi_square(mod_residue_t(cfg, get_preset('loaded')), 250_000)
        self.assertGreaterEqual(after, 1.5 * before)
        self.assertGreater(after, 4000)

    def test_count_residues_ignore_the_law(self):
        cfg = RpssConfig.for_bits(5, 5, 8)
        self.assertLess(expected_chi_square(mod_residue_np(cfg), 250_000), 300)

    def test_mean_shift_alone_barely_moves_t(self):
        cfg = RpssConfig.for_bits(5, 5, 8)
        base = get_preset('fat-like')
        before = expected_chi_square(mod_residue_t(cfg, base), 250_000)
        after = expected_chi_square(mod_residue_t(cfg, mean_shifted(base, 1)), 250_000)
        self.assertLess(abs(after - before), 0.1 * before)


@unittest.skipUnless(settings.RPSS_RUN_SLOW_TESTS, "set RPSS_RUN_SLOW_TESTS=True for full-size runs")
class FullSizePipelineTests(SimpleTestCase):

    def test_byte_entropy(self):
        from rpss.stats import analyze

        stream = build_simulated(RpssConfig.for_bits(5, 5, 8), get_preset('fat-like'), 1, 2, 3)
        report = analyze(stream.generate(250_000), 256)
        self.assertGreaterEqual(report.shannon_entropy_bits, 7.996)
        self.assertGreater(report.p_value, 0.001)

    def test_byte_min_entropy(self):
        from rpss.stats import analyze

        stream = build_simulated(RpssConfig.for_bits(5, 5, 8), get_preset('fat-like'), 21, 22, 23)
        report = analyze(stream.generate(10 ** 6), 256)
        self.assertGreaterEqual(report.shannon_entropy_bits, 7.999)
        self.assertGreaterEqual(report.min_entropy_bits, 7.9)
        self.assertGreater(report.p_value, 0.001)

    def test_nibble_uniformity(self):
        from rpss.stats import analyze

        stream = build_simulated(RpssConfig.for_bits(4, 4, 4), get_preset('fat-like'), 4, 5, 6)
        report = analyze(stream.residues(10 ** 6), 16)
        self.assertLess(report.deviation_percent, 1.0)
        self.assertGreaterEqual(report.shannon_entropy_bits, 3.9999)
        self.assertGreater(report.p_value, 0.01)

    def test_perturbation_decoupling(self):
        from rpss.stats import analyze

        stream = build_simulated(RpssConfig.for_bits(5, 5, 8), get_preset('fat-like'), 7, 8, 9)
        before = stream.probe(250_000)
        stream.switch_jitter(get_preset('loaded'))
        after = stream.probe(250_000)

        t_before = analyze(before.t_residues, 256)
        t_after = analyze(after.t_residues, 256)
        n_after = analyze(after.n_residues, 256)
        self.assertGreater(after.mean_trial_ticks, before.mean_trial_ticks)
        self.assertGreaterEqual(t_after.chi_square, 1.5 * t_before.chi_square)
        self.assertGreaterEqual(n_after.shannon_entropy_bits, 7.999)
        self.assertGreater(n_after.p_value, 0.01)
