from itertools import combinations, product

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings, tag

from iqp.conf import iqp_setting
from iqp.exceptions import InvalidParameters, ResourceLimitExceeded
from iqp.experiments import PipelineConfig, lemma9_count, lemma9_sum, moment4, pipeline, pz_fraction
from iqp.rng import Seed


def brute_force_count(r, s, n):
    words = list(product((0, 1), repeat=n))
    count = 0
    for w, x, y, z in product(words, repeat=4):
        pairs_ok = all(
            (w[i] * w[j] + x[i] * x[j] - y[i] * y[j] - z[i] * z[j]) % r == 0
            for i, j in combinations(range(n), 2)
        )
        if pairs_ok and all((w[k] + x[k] - y[k] - z[k]) % s == 0 for k in range(n)):
            count += 1
    return count


class ExactMomentTests(SimpleTestCase):
    def test_poly3_single_variable(self):
        report = moment4("poly3", 1)
        self.assertEqual(report.summary["M"], 2.0)
        self.assertEqual(report.summary["M_exact"], "2")
        self.assertEqual(report.summary["samples"], 2)
        self.assertTrue(report.passed)

    def test_poly3_two_variables(self):
        report = moment4("poly3", 2)
        self.assertEqual(report.summary["M_exact"], "5/2")
        self.assertEqual(report.summary["samples"], 8)

    def test_poly3_three_variables_stays_below_three(self):
        report = moment4("poly3", 3)
        self.assertEqual(report.summary["samples"], 128)
        self.assertLessEqual(report.summary["M"], 3)

    def test_ising_single_spin(self):
        report = moment4("ising", 1)
        self.assertAlmostEqual(report.summary["M"], 1.5)
        self.assertNotIn("M_exact", report.summary)

    def test_pz_fraction(self):
        self.assertEqual(pz_fraction("poly3", 1).summary["fraction_exact"], "1/2")
        report = pz_fraction("poly3", 2)
        self.assertEqual(report.summary["fraction_exact"], "5/8")
        self.assertEqual(report.checks[0].bound, 0.25 / 3)
        self.assertTrue(report.passed)

    def test_exact_mode_has_a_size_guard(self):
        with override_settings(IQP={**settings.IQP, "EXACT_MOMENT_MAX_N_POLY3": 2}):
            with self.assertRaises(ResourceLimitExceeded):
                moment4("poly3", 3)

    def test_invalid_arguments(self):
        with self.assertRaises(InvalidParameters):
            moment4("tensor", 2)
        with self.assertRaises(InvalidParameters):
            moment4("poly3", 2, mode="sampled")
        with self.assertRaises(InvalidParameters):
            pz_fraction("poly3", 2, alpha=1.0)


class MonteCarloTests(SimpleTestCase):
    def test_poly3_fourth_moment(self):
        report = moment4("poly3", 8, mode="monte_carlo", trials=500, seed=Seed(1))
        self.assertEqual(len(report.trials), 500)
        self.assertTrue(2 < report.summary["M"] < 4)
        self.assertTrue(report.passed)
        self.assertTrue(report.decisions)

    def test_pz_fraction(self):
        report = pz_fraction("poly3", 8, mode="monte_carlo", trials=500, seed=Seed(2))
        self.assertTrue(report.passed)
        self.assertGreater(report.summary["fraction"], 0.25 / 3)

    def test_ising(self):
        report = moment4("ising", 6, mode="monte_carlo", trials=200, seed=Seed(3))
        self.assertTrue(np.isfinite(report.summary["M"]))
        self.assertEqual(report.config["edge_range"], 8)
        self.assertGreater(pz_fraction("ising", 6, mode="monte_carlo", trials=200, seed=Seed(3)).summary["fraction"], 0)

    def test_trial_rows_name_their_substreams(self):
        report = moment4("poly3", 5, mode="monte_carlo", trials=10, seed=Seed(4))
        self.assertEqual([row["trial"] for row in report.trials], list(range(10)))
        self.assertEqual(len({row["substream"] for row in report.trials}), 10)

    def test_results_do_not_depend_on_workers(self):
        serial = moment4("poly3", 6, mode="monte_carlo", trials=40, seed=Seed(5))
        parallel = moment4("poly3", 6, mode="monte_carlo", trials=40, seed=Seed(5), workers=2)
        self.assertEqual(serial.to_dict(include_timing=False), parallel.to_dict(include_timing=False))

    def test_same_seed_same_report(self):
        a = pz_fraction("ising", 4, mode="monte_carlo", trials=30, seed=Seed(6))
        b = pz_fraction("ising", 4, mode="monte_carlo", trials=30, seed=Seed(6))
        self.assertEqual(a.to_json(include_timing=False), b.to_json(include_timing=False))


class QuadrupleCountTests(SimpleTestCase):
    def test_single_variable(self):
        self.assertEqual(lemma9_count(2, 2, 1), 8)
        report = lemma9_sum(2, 2, 1)
        self.assertEqual(report.headline, "count=8 bound=12 PASS")
        self.assertEqual(report.summary, {"count": 8, "bound": 12})

    def test_matches_brute_force(self):
        for r, s in ((2, 2), (3, 3), (4, 8), (3, 4)):
            self.assertEqual(lemma9_count(r, s, 2), brute_force_count(r, s, 2))
        self.assertEqual(lemma9_count(2, 2, 3), brute_force_count(2, 2, 3))

    def test_bound_holds(self):
        for r, s in ((2, 2), (4, 8), (3, 3)):
            for n in (1, 2, 3, 4):
                self.assertTrue(lemma9_sum(r, s, n).passed, (r, s, n))

    def test_invalid_moduli(self):
        with self.assertRaises(InvalidParameters):
            lemma9_count(4, 2, 2)
        with self.assertRaises(InvalidParameters):
            lemma9_count(1, 3, 2)
        with self.assertRaises(InvalidParameters):
            lemma9_count(2, 2, 0)

    def test_size_guard(self):
        with self.assertRaises(ResourceLimitExceeded):
            lemma9_count(2, 2, iqp_setting("LEMMA9_MAX_N") + 1)


class PipelineTests(SimpleTestCase):
    def test_config_defaults(self):
        cfg = PipelineConfig().resolved(8)
        self.assertAlmostEqual(cfg.epsilon, 0.5 / 12 / 8)
        self.assertAlmostEqual(cfg.delta, 1 / 24)
        self.assertAlmostEqual(cfg.rho, 1 / 8)
        self.assertAlmostEqual(cfg.multiplicative_target, 0.25 + 1.25 / 8)
        with self.assertRaises(InvalidParameters):
            PipelineConfig(alpha=1.5).resolved(4)
        with self.assertRaises(InvalidParameters):
            PipelineConfig(trials=0).resolved(4)

    def test_exact_sampler_gives_exact_estimates(self):
        report = pipeline("poly3", 5, model_kind="exact", budget=0.0, cfg=PipelineConfig(rho=0.0, trials=20))
        self.assertEqual(report.summary["exact_fraction"], 1.0)
        self.assertEqual(report.summary["additive_failure"], 0.0)
        self.assertEqual(report.summary["obfuscation_mismatches"], 0)

    def test_uniform_mix_passes(self):
        report = pipeline("poly3", 6, cfg=PipelineConfig(trials=60, seed=Seed(7)))
        self.assertTrue(report.passed, report.to_text())
        self.assertEqual(len(report.trials), 60)
        self.assertEqual(len(report.decisions), 3)
        self.assertEqual(len(report.trials[0]["y"]), 6)

    def test_ising_adversarial(self):
        report = pipeline("ising", 5, model_kind="adversarial_shift", cfg=PipelineConfig(trials=30, seed=Seed(8)))
        self.assertEqual(report.summary["obfuscation_mismatches"], 0)
        self.assertEqual(report.config["model"], "adversarial_shift")

    def test_results_do_not_depend_on_workers(self):
        cfg = PipelineConfig(trials=12, seed=Seed(9))
        serial = pipeline("poly3", 5, cfg=cfg)
        parallel = pipeline("poly3", 5, cfg=cfg, workers=2)
        self.assertEqual(serial.trials, parallel.trials)
        self.assertEqual(serial.summary, parallel.summary)

    def test_unknown_family(self):
        with self.assertRaises(InvalidParameters):
            pipeline("tensor", 4)


@tag("slow")
class LargeExperimentTests(SimpleTestCase):
    def test_fourth_moments(self):
        for kind in ("poly3", "ising"):
            for n in (16, 20):
                report = moment4(kind, n, mode="monte_carlo", trials=10_000, seed=Seed(10, n), workers=8)
                self.assertTrue(report.passed, report.to_text())

    def test_paley_zygmund_at_sixteen(self):
        for kind in ("poly3", "ising"):
            report = pz_fraction(kind, 16, alpha=0.5, mode="monte_carlo", trials=10_000, seed=Seed(11), workers=8)
            self.assertTrue(report.passed, report.to_text())

    def test_pipeline_at_twelve(self):
        cfg = PipelineConfig(trials=2000, seed=Seed(12))
        for family in ("poly3", "ising"):
            for model in ("uniform_mix", "adversarial_shift"):
                report = pipeline(family, 12, model_kind=model, cfg=cfg, workers=8)
                self.assertAlmostEqual(report.config["epsilon"], 1 / 192)
                self.assertTrue(report.passed, report.to_text())
