import numpy as np
from django.test import SimpleTestCase

from iqp.amplitude import Distribution, output_distribution
from iqp.compiler import compile_poly
from iqp.core import IqpCircuit, PhaseGate, int_to_bits
from iqp.exceptions import InvalidInstance, InvalidParameters
from iqp.rng import Seed, gen_poly3
from iqp.sampling import (
    SamplerModel, comparison_rows, estimate_prob, l1_distance, markov_fraction, model_for_budget, realize, sample,
    uniform_mix_for_budget,
)


class SampleTests(SimpleTestCase):
    def test_point_mass(self):
        self.assertEqual(sample(Distribution(2, [0, 0, 1, 0]), 1000, Seed(1)), {"01": 1000})

    def test_deterministic(self):
        d = output_distribution(compile_poly(gen_poly3(5, Seed(2))))
        self.assertEqual(sample(d, 500, Seed(3)), sample(d, 500, Seed(3)))
        self.assertEqual(sum(sample(d, 500, Seed(3)).values()), 500)

    def test_uniform_frequencies(self):
        shots = 10 ** 6
        counts = sample(Distribution(3, np.full(8, 1 / 8)), shots, Seed(4))
        sigma = np.sqrt(shots * (1 / 8) * (7 / 8))
        for y in (int_to_bits(i, 3) for i in range(8)):
            self.assertLess(abs(counts[y] - shots / 8), 5 * sigma)

    def test_zero_shots(self):
        self.assertEqual(sample(Distribution(1, [0.5, 0.5]), 0, Seed()), {})
        with self.assertRaises(InvalidParameters):
            sample(Distribution(1, [0.5, 0.5]), -1, Seed())


class DistanceTests(SimpleTestCase):
    def test_l1(self):
        self.assertEqual(l1_distance(Distribution(1, [1, 0]), Distribution(1, [0, 1])), 2)
        self.assertAlmostEqual(l1_distance(Distribution(1, [0.5, 0.5]), Distribution(1, [0.75, 0.25])), 0.5)
        d = Distribution(2, [0.1, 0.2, 0.3, 0.4])
        self.assertEqual(l1_distance(d, d), 0)

    def test_shape_mismatch(self):
        with self.assertRaises(InvalidInstance):
            l1_distance(Distribution(1, [1, 0]), Distribution(2, [1, 0, 0, 0]))

    def test_markov_fraction_stays_below_delta(self):
        base = compile_poly(gen_poly3(8, Seed(5)))
        p = output_distribution(base)
        for kind in ("uniform_mix", "adversarial_shift"):
            for eps in (0.05, 0.2):
                q = realize(model_for_budget(kind, base, eps, p), p)
                for delta in (0.05, 0.25):
                    self.assertLessEqual(markov_fraction(p, q, eps, delta), delta)


class SamplerModelTests(SimpleTestCase):
    def setUp(self):
        self.base = compile_poly(gen_poly3(6, Seed(3)))
        self.p = output_distribution(self.base)

    def test_exact(self):
        q = realize(SamplerModel("exact", self.base))
        np.testing.assert_array_equal(q.probs, self.p.probs)

    def test_budgets_are_met(self):
        for kind in ("uniform_mix", "adversarial_shift"):
            for budget in (0.0, 0.01, 0.1, 0.2):
                q = realize(model_for_budget(kind, self.base, budget, self.p), self.p)
                self.assertAlmostEqual(l1_distance(self.p, q), budget, delta=1e-12)
                self.assertEqual(q.violations(), [])

    def test_adversarial_shift_up_to_the_reachable_budget(self):
        circuit = IqpCircuit(2)
        point = Distribution(2, [1.0, 0.0, 0.0, 0.0])
        q = realize(SamplerModel("adversarial_shift", circuit, 2.0), point)
        self.assertAlmostEqual(l1_distance(point, q), 2.0, delta=1e-12)
        np.testing.assert_allclose(q.probs, [0.0, 0.5, 0.5, 0.0])

        # full support: l1 = 2 is out of reach, 2 (1 - min p) is the largest budget
        uniform = Distribution(2, [0.25] * 4)
        q = realize(SamplerModel("adversarial_shift", circuit, 1.5), uniform)
        self.assertAlmostEqual(l1_distance(uniform, q), 1.5, delta=1e-12)
        self.assertEqual(q.violations(), [])
        for budget in (1.6, 2.0):
            with self.assertRaises(InvalidParameters):
                realize(SamplerModel("adversarial_shift", circuit, budget), uniform)

    def test_adversarial_shift_moves_heavy_mass_to_light_entries(self):
        p = Distribution(2, [0.4, 0.3, 0.2, 0.1])
        q = realize(SamplerModel("adversarial_shift", IqpCircuit(2), 0.5), p)
        np.testing.assert_allclose(q.probs, [0.15, 0.3, 0.325, 0.225])

    def test_uniform_mix_weight(self):
        weight = uniform_mix_for_budget(self.p, 0.1)
        q = realize(SamplerModel("uniform_mix", self.base, weight), self.p)
        np.testing.assert_allclose(q.probs, (1 - weight) * self.p.probs + weight / 64)
        with self.assertRaises(InvalidParameters):
            uniform_mix_for_budget(Distribution(1, [0.5, 0.5]), 0.1)

    def test_invalid_models(self):
        with self.assertRaises(InvalidParameters):
            SamplerModel("adversarial_shift", self.base, 2.5)
        with self.assertRaises(InvalidParameters):
            SamplerModel("uniform_mix", self.base, 1.5)
        with self.assertRaises(InvalidParameters):
            SamplerModel("noisy", self.base)


class EstimateTests(SimpleTestCase):
    def setUp(self):
        self.base = compile_poly(gen_poly3(6, Seed(8)))
        self.model = SamplerModel("uniform_mix", self.base, 0.05)
        self.q = realize(self.model)

    def test_exact_oracle(self):
        for y in ("000000", "101010"):
            estimate = estimate_prob(self.model, y, rel=0.0)
            self.assertEqual(estimate.value, self.q[y])
            self.assertEqual(estimate.relative_bound, 0.0)

    def test_relative_bound_holds(self):
        for k in range(200):
            y = int_to_bits(k % 64, 6)
            estimate = estimate_prob(self.model, y, rel=0.3, seed=Seed(9, k), q=self.q)
            self.assertLessEqual(abs(estimate.value - self.q[y]), 0.3 * self.q[y] + 1e-15)

    def test_empirical_uniform(self):
        # four disjoint CZs give a uniform output distribution on eight qubits
        circuit = IqpCircuit(8, tuple(PhaseGate.cz(2 * k, 2 * k + 1) for k in range(4)))
        model = SamplerModel("exact", circuit)
        np.testing.assert_allclose(realize(model).probs, np.full(256, 1 / 256), atol=1e-12)
        shots = 10 ** 6
        estimate = estimate_prob(model, "01100101", mode="empirical", seed=Seed(10), shots=shots)
        self.assertEqual(estimate.shots, shots)
        self.assertIsNone(estimate.relative_bound)
        sigma = np.sqrt((1 / 256) * (255 / 256) / shots)
        self.assertLess(abs(estimate.value - 1 / 256), 5 * sigma)

    def test_invalid_arguments(self):
        with self.assertRaises(InvalidParameters):
            estimate_prob(self.model, "000000", rel=1.0)
        with self.assertRaises(InvalidParameters):
            estimate_prob(self.model, "000000", mode="empirical", shots=0)
        with self.assertRaises(InvalidParameters):
            estimate_prob(self.model, "000000", mode="guess")
        with self.assertRaises(InvalidInstance):
            estimate_prob(self.model, "000", q=self.q)

    def test_comparison_rows(self):
        p = output_distribution(self.base)
        estimates = {y: estimate_prob(self.model, y, q=self.q) for y in ("110000", "000000")}
        rows = list(comparison_rows(p, self.q, estimates))
        self.assertEqual([row["y"] for row in rows], ["000000", "110000"])
        for row in rows:
            self.assertEqual(row["q"], row["estimate"])
            self.assertAlmostEqual(row["abs_err"], abs(row["estimate"] - row["p"]))
