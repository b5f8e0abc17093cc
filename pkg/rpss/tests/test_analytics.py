"""
Tests for the NB law, the composition law, residue inversion and the
convergence constants.
"""
import cmath
import math
from fractions import Fraction

from django.test import SimpleTestCase

from rpss.analytics import (
    compose_cf,
    convergence_report,
    deviation_by_success_count,
    exact_np_mod,
    exact_t_distribution,
    exact_t_mod,
    mod_residue_np,
    mod_residue_t,
    nb_moments,
    nb_pgf,
    nb_pmf,
    nb_pmf_table,
    t_moments,
)
from rpss.exceptions import DomainError, TruncationError
from rpss.jitter import get_preset
from rpss.models import JitterModel, RpssConfig
from rpss.planner import PUBLISHED_ROWS

TWO_POINT = JitterModel.from_mapping({1: 0.6, 2: 0.4})


class NegativeBinomialTests(SimpleTestCase):

    def test_first_trial_success_is_p(self):
        self.assertAlmostEqual(nb_pmf(RpssConfig(3, 1), 1), 1 / 6, delta=1e-15)

    def test_two_straight_successes(self):
        self.assertAlmostEqual(nb_pmf(RpssConfig(3, 2), 2), 1 / 36, delta=1e-15)

    def test_pmf_matches_exact_rational(self):
        exact = (
            Fraction(math.comb(95, 3))
            * Fraction(1, 24) ** 4
            * Fraction(23, 24) ** 92
        )
        value = nb_pmf(RpssConfig(4, 4), 96)
        self.assertAlmostEqual(value / float(exact), 1.0, delta=1e-11)

    def test_pmf_below_m_is_zero(self):
        self.assertEqual(nb_pmf(RpssConfig(4, 4), 3), 0.0)

    def test_pmf_rejects_negative_k(self):
        with self.assertRaises(DomainError):
            nb_pmf(RpssConfig(4, 4), -1)

    def test_pgf_normalized_at_one(self):
        for cfg in (RpssConfig(2, 1), RpssConfig(4, 4), RpssConfig(7, 3)):
            self.assertEqual(nb_pgf(cfg, 1), complex(1.0, 0.0))

    def test_pgf_geometric_at_minus_one(self):
        self.assertAlmostEqual(nb_pgf(RpssConfig(2, 1), -1), -1 / 3, delta=1e-15)

    def test_pgf_matches_truncated_series(self):
        cfg = RpssConfig(4, 4)
        series = math.fsum(nb_pmf(cfg, k) * 0.5 ** k for k in range(4, 400))
        self.assertAlmostEqual(nb_pgf(cfg, 0.5).real, series, delta=1e-12)

    def test_pgf_domain(self):
        with self.assertRaises(DomainError):
            nb_pgf(RpssConfig(2, 1), 2.0)

    def test_moments_for_four_of_four(self):
        moments = nb_moments(RpssConfig(4, 4))
        self.assertAlmostEqual(moments.mean, 96.0, places=9)
        self.assertAlmostEqual(moments.variance, 2208.0, places=6)
        self.assertAlmostEqual(moments.skewness, 1.0002, delta=1e-4)
        self.assertAlmostEqual(moments.excess_kurtosis, 1.5005, delta=1e-4)

    def test_geometric_moments(self):
        moments = nb_moments(RpssConfig(2, 1))
        self.assertAlmostEqual(moments.mean, 2.0, places=12)
        self.assertAlmostEqual(moments.variance, 2.0, places=12)

    def test_shape_factors_follow_cumulants(self):
        moments = nb_moments(RpssConfig(5, 3))
        self.assertAlmostEqual(
            moments.skewness, moments.kappa3 / moments.kappa2 ** 1.5, delta=1e-12
        )
        p = 1 / 120
        self.assertAlmostEqual(moments.skewness, (2 - p) / math.sqrt(3 * (1 - p)), delta=1e-12)
        self.assertAlmostEqual(
            moments.excess_kurtosis, 6 / 3 + p * p / (3 * (1 - p)), delta=1e-12
        )

    def test_closed_form_matches_pmf_summation(self):
        for cfg in (RpssConfig(3, 2), RpssConfig(4, 4), RpssConfig(2, 5)):
            k_start, pmf, _ = nb_pmf_table(cfg, 1e-13)
            ks = [k_start + i for i in range(len(pmf))]
            mean = math.fsum(k * w for k, w in zip(ks, pmf))
            central = [math.fsum(w * (k - mean) ** j for k, w in zip(ks, pmf)) for j in (2, 3, 4)]
            kappa4 = central[2] - 3 * central[0] ** 2
            closed = nb_moments(cfg)
            self.assertAlmostEqual(mean / closed.mean, 1.0, delta=1e-8)
            self.assertAlmostEqual(central[0] / closed.kappa2, 1.0, delta=1e-8)
            self.assertAlmostEqual(central[1] / closed.kappa3, 1.0, delta=1e-7)
            self.assertAlmostEqual(kappa4 / closed.kappa4, 1.0, delta=1e-6)

    def test_pmf_table_reports_tail(self):
        k_start, pmf, tail = nb_pmf_table(RpssConfig(4, 4), 1e-12)
        self.assertEqual(k_start, 4)
        self.assertLess(tail, 2e-12)
        self.assertAlmostEqual(math.fsum(pmf) + tail, 1.0, delta=1e-12)
        self.assertAlmostEqual(pmf[96 - 4] / nb_pmf(RpssConfig(4, 4), 96), 1.0, delta=1e-10)

    def test_pmf_table_cap(self):
        with self.assertRaises(TruncationError):
            nb_pmf_table(RpssConfig(5, 5), 1e-12, cap=100)


class CompositionLawTests(SimpleTestCase):

    def test_normalized_at_zero(self):
        for name in ('fat-like', 'heavy-tail', 'measured-n6-e'):
            self.assertEqual(compose_cf(RpssConfig(4, 4), get_preset(name), 0.0), 1 + 0j)

    def test_deterministic_runtime_reduces_to_pgf(self):
        cfg = RpssConfig(3, 2)
        jitter = JitterModel.degenerate(3)
        for omega in (0.1, 0.7, 2.0):
            expected = nb_pgf(cfg, cmath.exp(1j * 3 * omega))
            self.assertAlmostEqual(compose_cf(cfg, jitter, omega), expected, delta=1e-12)

    def test_matches_convolution_oracle(self):
        cfg = RpssConfig(3, 2)
        omega = 2 * math.pi / 8
        oracle = exact_t_distribution(cfg, TWO_POINT, 1e-13).characteristic(omega)
        self.assertAlmostEqual(compose_cf(cfg, TWO_POINT, omega), oracle, delta=1e-9)

    def test_t_mean_for_fat_phenotype(self):
        moments = t_moments(RpssConfig(4, 4), get_preset('fat-like'))
        self.assertAlmostEqual(moments.mean, 105.6, places=9)
        self.assertLess(abs(moments.mean - 105.53), 0.1)

    def test_deterministic_runtime_scales_cumulants(self):
        cfg = RpssConfig(4, 3)
        n = nb_moments(cfg)
        t = t_moments(cfg, JitterModel.degenerate(2))
        self.assertAlmostEqual(t.kappa1 / (2 * n.kappa1), 1.0, delta=1e-12)
        self.assertAlmostEqual(t.kappa2 / (4 * n.kappa2), 1.0, delta=1e-12)
        self.assertAlmostEqual(t.kappa3 / (8 * n.kappa3), 1.0, delta=1e-12)
        self.assertAlmostEqual(t.kappa4 / (16 * n.kappa4), 1.0, delta=1e-12)

    def test_t_moments_match_full_distribution(self):
        cfg = RpssConfig(3, 2)
        oracle = exact_t_distribution(cfg, TWO_POINT, 1e-13)
        self.assertLess(oracle.tail_mass, 1e-12)
        theory = t_moments(cfg, TWO_POINT)
        empirical = oracle.moments()
        self.assertAlmostEqual(empirical.mean / theory.mean, 1.0, delta=1e-8)
        self.assertAlmostEqual(empirical.variance / theory.variance, 1.0, delta=1e-8)
        self.assertAlmostEqual(empirical.kappa3 / theory.kappa3, 1.0, delta=1e-6)
        self.assertAlmostEqual(empirical.kappa4 / theory.kappa4, 1.0, delta=1e-5)


class ResidueInversionTests(SimpleTestCase):

    def test_geometric_parity(self):
        dist = mod_residue_np(RpssConfig(2, 1, 2))
        self.assertAlmostEqual(dist.probabilities[0], 1 / 3, delta=1e-12)
        self.assertAlmostEqual(dist.probabilities[1], 2 / 3, delta=1e-12)

    def test_modulus_one(self):
        self.assertEqual(mod_residue_np(RpssConfig(4, 4, 1)).probabilities, (1.0,))
        self.assertEqual(mod_residue_t(RpssConfig(4, 4, 1), TWO_POINT).probabilities, (1.0,))

    def test_np_residues_match_pmf_summation(self):
        cfg = RpssConfig(4, 4, 16)
        law = mod_residue_np(cfg)
        oracle = exact_np_mod(cfg, 1e-12)
        for a, b in zip(law.probabilities, oracle.probabilities):
            self.assertAlmostEqual(a, b, delta=1e-11)
        self.assertLessEqual(law.max_deviation, convergence_report(cfg).bound_n)

    def test_unit_runtime_gives_np_law(self):
        cfg = RpssConfig(4, 2, 16)
        np_law = mod_residue_np(cfg)
        t_law = mod_residue_t(cfg, JitterModel.degenerate(1))
        for a, b in zip(np_law.probabilities, t_law.probabilities):
            self.assertAlmostEqual(a, b, delta=1e-12)

    def test_t_residues_match_cyclic_convolution(self):
        cfg = RpssConfig(3, 2, 8)
        law = mod_residue_t(cfg, TWO_POINT)
        oracle = exact_t_mod(cfg, TWO_POINT, 1e-12)
        for a, b in zip(law.probabilities, oracle.probabilities):
            self.assertAlmostEqual(a, b, delta=1e-9)
        self.assertAlmostEqual(math.fsum(law.probabilities), 1.0, delta=1e-9)

    def test_even_runtime_lands_on_even_residues(self):
        dist = exact_t_mod(RpssConfig(2, 1, 4), JitterModel.degenerate(2), 1e-12)
        expected = (1 / 3, 0.0, 2 / 3, 0.0)
        for a, b in zip(dist.probabilities, expected):
            self.assertAlmostEqual(a, b, delta=1e-9)

    def test_law_and_oracle_agree_across_grid(self):
        jitters = {
            'unit': JitterModel.degenerate(1),
            'two-point': TWO_POINT,
            'heavy-tail': get_preset('heavy-tail'),
        }
        for array_size in (2, 3, 4):
            for success_count in (1, 2, 4):
                for modulus in (2, 8, 16):
                    cfg = RpssConfig(array_size, success_count, modulus)
                    for name, jitter in jitters.items():
                        with self.subTest(N=array_size, m=success_count, R=modulus, jitter=name):
                            law = mod_residue_t(cfg, jitter).vector
                            oracle = exact_t_mod(cfg, jitter, 1e-12).vector
                            self.assertLess(float(abs(law - oracle).max()), 1e-9)

    def test_deviation_reported_in_percent(self):
        dist = mod_residue_np(RpssConfig(2, 1, 2))
        self.assertAlmostEqual(dist.deviation_percent, (2 / 3 - 1 / 2) * 2 * 100, delta=1e-9)


class ConvergenceTests(SimpleTestCase):

    def test_rho_for_two_elements(self):
        report = convergence_report(RpssConfig(2, 1, 2))
        self.assertAlmostEqual(report.rho_n, 1 / 3, delta=1e-15)

    def test_bound_for_twelve_successes(self):
        report = convergence_report(RpssConfig(2, 12, 2))
        self.assertAlmostEqual(report.bound_n / (0.5 * (1 / 3) ** 12), 1.0, delta=1e-12)
        self.assertAlmostEqual(report.bound_n, 9.41e-7, delta=1e-9)

    def test_unit_runtime_rho_t_equals_rho_n(self):
        report = convergence_report(RpssConfig(4, 4, 16), JitterModel.degenerate(1))
        for a, b in zip(report.rho_n_modes, report.rho_t_modes):
            self.assertAlmostEqual(a, b, delta=1e-12)
        self.assertEqual(report.t_degenerate_modes, ())

    def test_zero_runtime_never_decays(self):
        with self.assertLogs('rpss.analytics', level='WARNING'):
            report = convergence_report(RpssConfig(3, 2, 4), JitterModel.degenerate(0))
        self.assertEqual(report.t_degenerate_modes, (1, 2, 3))
        for rho in report.rho_t_modes:
            self.assertAlmostEqual(rho, 1.0, delta=1e-12)

    def test_bound_holds_for_published_parameters(self):
        for _, modulus, array_size, success_count, _ in PUBLISHED_ROWS:
            cfg = RpssConfig(array_size, success_count, modulus)
            with self.subTest(N=array_size, m=success_count, R=modulus):
                report = convergence_report(cfg)
                self.assertLess(report.rho_n_pow_m, 0.011)
                exact = exact_np_mod(cfg, 1e-12)
                self.assertLessEqual(exact.max_deviation, report.bound_n + 1e-11)
                self.assertLessEqual(mod_residue_np(cfg).max_deviation, report.bound_n + 1e-15)

    def test_single_mode_decays_geometrically(self):
        for array_size in (2, 3):
            cfg = RpssConfig(array_size, 1, 2)
            rho = convergence_report(cfg).rho_n
            rows = deviation_by_success_count(cfg, range(1, 7))
            for previous, current in zip(rows, rows[1:]):
                ratio = current.max_deviation / previous.max_deviation
                self.assertLessEqual(ratio, rho + 1e-9)

    def test_envelope_bounds_and_decays(self):
        for array_size, modulus in ((3, 4), (4, 16), (5, 16)):
            cfg = RpssConfig(array_size, 1, modulus)
            rho = convergence_report(cfg).rho_n
            rows = deviation_by_success_count(cfg, range(1, 6))
            for row in rows:
                self.assertLessEqual(row.max_deviation, row.envelope + 1e-15)
                self.assertLessEqual(row.envelope, row.bound + 1e-15)
            for previous, current in zip(rows, rows[1:]):
                self.assertLessEqual(current.envelope / previous.envelope, rho + 1e-9)
