import time

from django.test import SimpleTestCase, tag

from iqp.amplitude import gap_gray, gap_naive
from iqp.rng import Seed, gen_poly3


def timed(fn, *args):
    started = time.perf_counter()
    value = fn(*args)
    return value, time.perf_counter() - started


@tag("slow")
class GapPerformanceTests(SimpleTestCase):
    def test_twenty_six_variables_within_a_minute(self):
        _, elapsed = timed(gap_gray, gen_poly3(26, Seed(70)))
        self.assertLess(elapsed, 60)

    def test_gray_walk_beats_enumeration(self):
        f = gen_poly3(22, Seed(71))
        fast, gray_s = timed(gap_gray, f)
        slow, naive_s = timed(gap_naive, f)
        self.assertEqual(fast, slow)
        self.assertGreaterEqual(naive_s / gray_s, 20)
