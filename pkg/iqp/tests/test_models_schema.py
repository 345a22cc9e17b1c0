import json

from django.test import TestCase

from iqp.experiments import lemma9_sum, moment4
from iqp.models import ExperimentRun
from iqp.rng import Seed
from iqp.schema import schema

CZ_CIRCUIT = {"kind": "circuit", "n": 2, "gates": [{"q": [0, 1]}]}

AMPLITUDE_QUERY = """
    query Amplitude($instance: JSON!, $y: String, $backend: String, $mode: String) {
        amplitude(instance: $instance, y: $y, backend: $backend, mode: $mode) { n real imag exact }
    }
"""

RUNS_QUERY = """
    query Runs($name: String, $passed: Boolean) {
        experimentRuns(name: $name, passed: $passed) { id name seed passed summary checks }
    }
"""


class ExperimentRunModelTests(TestCase):
    def test_report_round_trip(self):
        report = moment4("poly3", 4, mode="monte_carlo", trials=20, seed=Seed(12345))
        run = ExperimentRun.from_report(report)
        run.save()
        stored = ExperimentRun.objects.get(pk=run.pk).to_report()
        self.assertEqual(stored.name, "moment4")
        self.assertEqual(stored.summary, json.loads(json.dumps(report.summary)))
        self.assertEqual(stored.checks, report.checks)
        self.assertEqual(stored.passed, report.passed)
        self.assertEqual(stored.trials, [])
        self.assertEqual(run.seed, "12345")

    def test_seed_beyond_signed_range(self):
        report = moment4("poly3", 2, mode="monte_carlo", trials=2, seed=Seed(2 ** 64 - 1))
        run = ExperimentRun.from_report(report)
        run.save()
        self.assertEqual(ExperimentRun.objects.get(pk=run.pk).seed, str(2 ** 64 - 1))

    def test_newest_first(self):
        first = ExperimentRun.from_report(lemma9_sum(2, 2, 1))
        first.save()
        second = ExperimentRun.from_report(lemma9_sum(2, 2, 2))
        second.save()
        self.assertEqual(list(ExperimentRun.objects.all()), [second, first])
        self.assertEqual(str(second), f"lemma9 #{second.id} (passed)")


class SchemaTests(TestCase):
    @classmethod
    def setUpTestData(cls):
        ExperimentRun.from_report(lemma9_sum(2, 2, 1)).save()
        ExperimentRun.from_report(moment4("poly3", 2)).save()

    async def test_amplitude(self):
        result = await schema.execute(AMPLITUDE_QUERY, variable_values={"instance": CZ_CIRCUIT})
        self.assertIsNone(result.errors)
        amplitude = result.data["amplitude"]
        self.assertEqual((amplitude["n"], amplitude["real"], amplitude["exact"]), (2, 0.5, "2/4"))
        self.assertAlmostEqual(amplitude["imag"], 0.0)

    async def test_amplitude_with_backend(self):
        variables = {"instance": CZ_CIRCUIT, "y": "11", "backend": "statevector"}
        result = await schema.execute(AMPLITUDE_QUERY, variable_values=variables)
        self.assertIsNone(result.errors)
        self.assertAlmostEqual(result.data["amplitude"]["real"], -0.5)
        self.assertIsNone(result.data["amplitude"]["exact"])

    async def test_ising_float_mode(self):
        instance = {"kind": "ising", "n": 2, "t": 8, "edges": [[0, 1, 1]], "vertices": [0, 0]}
        exact = await schema.execute(AMPLITUDE_QUERY, variable_values={"instance": instance})
        floating = await schema.execute(AMPLITUDE_QUERY, variable_values={"instance": instance, "mode": "float"})
        self.assertIsNone(exact.errors)
        self.assertIsNone(floating.errors)
        self.assertIsNotNone(exact.data["amplitude"]["exact"])
        self.assertIsNone(floating.data["amplitude"]["exact"])
        self.assertAlmostEqual(floating.data["amplitude"]["real"], exact.data["amplitude"]["real"])
        self.assertAlmostEqual(floating.data["amplitude"]["imag"], exact.data["amplitude"]["imag"])

    async def test_invalid_instance(self):
        instance = {"kind": "circuit", "n": 2, "gates": [{"q": [0, 5]}]}
        result = await schema.execute(AMPLITUDE_QUERY, variable_values={"instance": instance})
        self.assertTrue(result.errors)
        self.assertIn("out of range", result.errors[0].message)

    async def test_runs_filtered_by_name(self):
        result = await schema.execute(RUNS_QUERY, variable_values={"name": "lemma9"})
        self.assertIsNone(result.errors)
        runs = result.data["experimentRuns"]
        self.assertEqual(len(runs), 1)
        self.assertEqual(runs[0]["summary"], {"count": 8, "bound": 12})
        self.assertTrue(runs[0]["passed"])

    async def test_all_runs(self):
        result = await schema.execute(RUNS_QUERY)
        self.assertEqual([run["name"] for run in result.data["experimentRuns"]], ["moment4", "lemma9"])

    async def test_single_run(self):
        run = await ExperimentRun.objects.aget(name="moment4")
        query = "query Run($id: Int!) { experimentRun(id: $id) { name summary } }"
        result = await schema.execute(query, variable_values={"id": run.id})
        self.assertEqual(result.data["experimentRun"]["summary"]["M_exact"], "5/2")
        missing = await schema.execute(query, variable_values={"id": run.id + 100})
        self.assertIsNone(missing.data["experimentRun"])

    async def test_http_endpoint(self):
        response = await self.async_client.post(
            "/graphql",
            data={"query": AMPLITUDE_QUERY, "variables": {"instance": CZ_CIRCUIT}},
            content_type="application/json",
        )
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json()["data"]["amplitude"]["exact"], "2/4")
