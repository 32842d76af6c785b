import unittest

from automaton import Acceptance, build_automaton
from errors import InputError
from gallery import fig2, fig3, inf_a_monitor
from lasso import Lasso, lasso_membership, run_accepts, run_dag, sample_accepted_lassos, sample_lassos


class TestLasso(unittest.TestCase):
    def test_strings_split_into_letters(self):
        lasso = Lasso("ab", "c")
        self.assertEqual(lasso.prefix, ("a", "b"))
        self.assertEqual(lasso.take(5), ("a", "b", "c", "c", "c"))
        self.assertEqual(str(lasso), "ab(c)^w")

    def test_empty_cycle_is_rejected(self):
        with self.assertRaises(InputError):
            Lasso("a", "")

    def test_unrolling_keeps_the_word(self):
        for lasso in (Lasso("", "ab"), Lasso("bd", "a"), Lasso("a", "b")):
            with self.subTest(lasso=str(lasso)):
                self.assertEqual(lasso_membership(fig2(), lasso), lasso_membership(fig2(), lasso.unrolled()))
                self.assertEqual(lasso.take(9), lasso.unrolled().take(9))


class TestRuns(unittest.TestCase):
    def test_run_dag_levels(self):
        dag = run_dag(fig2(), "ab")
        self.assertEqual(dag.levels[0], frozenset({0}))
        self.assertEqual(dag.levels[1], frozenset({0, 1}))
        self.assertEqual(dag.levels[2], frozenset({0, 2}))

    def test_run_accepts_by_condition(self):
        a = build_automaton("a", 1, [(0, "a", 0)], Acceptance.BUCHI, accepting_states=[0])
        self.assertTrue(run_accepts(a, [], [0]))
        s = build_automaton("a", 1, [(0, "a", 0)], Acceptance.SAFETY, marked_edges=[(0, "a", 0)])
        self.assertFalse(run_accepts(s, [], [0]))


class TestSampling(unittest.TestCase):
    def test_sampling_is_reproducible(self):
        first = sample_lassos("ab", 20, 4, 4, seed=7)
        self.assertEqual(first, sample_lassos("ab", 20, 4, 4, seed=7))
        self.assertNotEqual(first, sample_lassos("ab", 20, 4, 4, seed=8))

    def test_sampled_lengths_respect_bounds(self):
        for lasso in sample_lassos("ab", 50, 2, 3, seed=1):
            self.assertLessEqual(len(lasso.prefix), 2)
            self.assertTrue(1 <= len(lasso.cycle) <= 3)

    def test_sampling_rejects_bad_arguments(self):
        for args in ((("a",), 0, 1, 1), ((), 3, 1, 1), (("a",), 3, -1, 1), (("a",), 3, 1, 0)):
            with self.subTest(args=args):
                with self.assertRaises(InputError):
                    sample_lassos(*args, seed=0)

    def test_accepted_lassos_are_accepted(self):
        for a in (fig2(), fig3(2), inf_a_monitor()):
            lassos = sample_accepted_lassos(a, 10, seed=3)
            with self.subTest(automaton=a.name):
                self.assertTrue(lassos)
                self.assertTrue(all(lasso_membership(a, lasso) for lasso in lassos))


if __name__ == "__main__":
    unittest.main()
