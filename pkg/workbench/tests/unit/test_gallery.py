import unittest

from automaton import Acceptance
from errors import InputError
from gallery import (
    GALLERY,
    fig2,
    fig2_monitor,
    fig3,
    fig3_counterexample,
    get_entry,
    included_in_fig3,
    monitor_agrees,
    mscc_strategy_wins,
    random_automaton,
    random_timed,
    random_timed_word,
    random_uniform,
    random_vpa,
    verify_entry,
)


class TestFixedInstances(unittest.TestCase):
    def test_fig3_shape(self):
        for n in (1, 2, 3):
            a = fig3(n)
            with self.subTest(n=n):
                self.assertEqual(a.num_states, 2 * n)
                self.assertFalse(a.is_deterministic)

    def test_monitor_agrees_with_fig2(self):
        self.assertTrue(monitor_agrees(fig2(), fig2_monitor(), samples=80, seed=3))
        self.assertTrue(fig2_monitor().is_deterministic)

    def test_counterexample_is_included_but_not_simulated(self):
        b = fig3_counterexample()
        self.assertTrue(included_in_fig3(b))
        self.assertFalse(mscc_strategy_wins(1, b))

    def test_fig3_simulates_itself_with_the_mscc_strategy(self):
        self.assertTrue(mscc_strategy_wins(1, fig3(1)))


class TestEntries(unittest.TestCase):
    def test_every_entry_builds(self):
        for name, entry in GALLERY.items():
            with self.subTest(name=name):
                self.assertEqual(entry.name, name)
                self.assertIsNotNone(entry.build())
                self.assertTrue(entry.facts)

    def test_unknown_entry(self):
        with self.assertRaises(InputError):
            get_entry("fig4")

    def test_cheap_entries_verify(self):
        for name in ("fin-a", "inf-a", "fig3-1", "fig3-counterexample", "L1"):
            with self.subTest(name=name):
                report = verify_entry(name, samples=60, seed=1)
                self.assertTrue(report.passed, [c for c in report.checks if not c.ok])


class TestGenerators(unittest.TestCase):
    def test_reproducible(self):
        self.assertEqual(random_automaton(4, 2, Acceptance.BUCHI, 5), random_automaton(4, 2, Acceptance.BUCHI, 5))
        self.assertEqual(random_vpa(2, 1, Acceptance.BUCHI, 5), random_vpa(2, 1, Acceptance.BUCHI, 5))
        self.assertEqual(random_timed(2, 1, 5), random_timed(2, 1, 5))
        self.assertEqual(random_timed_word(5, 2), random_timed_word(5, 2))

    def test_parameter_ranges(self):
        with self.assertRaises(InputError):
            random_automaton(9, 2, Acceptance.BUCHI, 0)
        with self.assertRaises(InputError):
            random_vpa(4, 1, Acceptance.BUCHI, 0)
        with self.assertRaises(InputError):
            random_uniform("tape", 2, 0)

    def test_timed_words_are_sorted(self):
        stamps = [t for _, t in random_timed_word(8, 11)]
        self.assertEqual(stamps, sorted(stamps))
        self.assertTrue(all(0 <= t <= 3 for t in stamps))


if __name__ == "__main__":
    unittest.main()
