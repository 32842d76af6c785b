import unittest

from automaton import Acceptance
from errors import InputError
from gallery import random_vpa, vpa_calls
from lasso import Lasso
from vpa import (
    GHOST_BOTTOM,
    build_vpa,
    count_runs,
    expand_vpa,
    ghost_state_count,
    sample_well_nested,
    semantic_stack_check,
    vpa_bounded_g1,
    vpa_ghost,
    vpa_membership,
)

CLASSES = {"push": ["c"], "pop": ["r"], "noop": ["i"]}


class TestVpaValidation(unittest.TestCase):
    def test_pop_must_read_a_stack_symbol(self):
        with self.assertRaises(InputError):
            build_vpa(CLASSES, 1, ["X"], [(0, "⊥", "r", 0)], Acceptance.BUCHI)

    def test_push_needs_a_symbol(self):
        with self.assertRaises(InputError):
            build_vpa(CLASSES, 1, ["X"], [(0, "⊥", "c", 0)], Acceptance.BUCHI)

    def test_star_top_expands_per_class(self):
        v = build_vpa(CLASSES, 1, ["X", "Y"], [(0, "*", "c", 0, "X"), (0, "*", "r", 0)], Acceptance.BUCHI)
        self.assertEqual(sorted(t.top for t in v.transitions if t.letter == "c"), ["X", "Y", "⊥"])
        self.assertEqual(sorted(t.top for t in v.transitions if t.letter == "r"), ["X", "Y"])

    def test_heights_reject_unmatched_pop(self):
        v = vpa_calls()
        self.assertEqual(v.height_after("ccri"), [0, 1, 2, 1, 1])
        with self.assertRaises(InputError):
            v.height_after("crir")


class TestVpaSemantics(unittest.TestCase):
    def test_membership(self):
        v = vpa_calls()
        self.assertTrue(vpa_membership(v, Lasso("", "i")))
        self.assertTrue(vpa_membership(v, Lasso("cr", "i")))
        self.assertFalse(vpa_membership(v, Lasso("", "cr")))
        self.assertFalse(vpa_membership(v, Lasso("", "r")))

    def test_growing_stack_is_rejected(self):
        with self.assertRaises(InputError):
            vpa_membership(vpa_calls(), Lasso("", "ci"))

    def test_count_runs(self):
        v = vpa_calls()
        self.assertEqual(count_runs(v, "cr"), 2)
        self.assertEqual(count_runs(v, "r"), 0)

    def test_expansion_sink_beyond_depth(self):
        x = expand_vpa(vpa_calls(), 1)
        self.assertIsNotNone(x.sink)
        flat = build_vpa(CLASSES, 1, ["X"], [(0, "⊥", "i", 0)], Acceptance.BUCHI)
        self.assertIsNone(expand_vpa(flat, 0).sink)
        with self.assertRaises(InputError):
            expand_vpa(vpa_calls(), -1)


class TestVpaGhost(unittest.TestCase):
    def test_state_count_formula(self):
        g = vpa_ghost(vpa_calls())
        self.assertEqual(ghost_state_count(vpa_calls()), 11)
        self.assertEqual(g.vpa.num_states, 11)
        self.assertEqual(g.states[0][2], (GHOST_BOTTOM,))

    def test_state_count_on_random_vpas(self):
        for seed in range(10):
            v = random_vpa(2, 2, Acceptance.BUCHI, seed)
            with self.subTest(seed=seed):
                self.assertEqual(vpa_ghost(v).vpa.num_states, ghost_state_count(v))

    def test_semantic_stack_tracks_the_source(self):
        g = vpa_ghost(vpa_calls())
        for word in ("", "c", "ccrri", "icrci", "ccr"):
            with self.subTest(word=word):
                self.assertTrue(semantic_stack_check(g, word))

    def test_ghost_lags_one_letter(self):
        v = vpa_calls()
        g = vpa_ghost(v)
        for word in ("cr", "ccrr", "icrc"):
            with self.subTest(word=word):
                self.assertEqual(count_runs(g.vpa, word), count_runs(v, word[:-1]))

    def test_well_nested_samples(self):
        v = vpa_calls()
        lassos = sample_well_nested(v, 30, 3, 4, 4, seed=5)
        self.assertTrue(lassos)
        for lasso in lassos:
            heights = v.height_after(lasso.letters)
            with self.subTest(lasso=str(lasso)):
                self.assertEqual(heights[len(lasso.prefix)], heights[-1])
                self.assertLessEqual(max(heights), 3)
                vpa_membership(v, lasso)

    def test_bounded_g1(self):
        report = vpa_bounded_g1(vpa_ghost(vpa_calls()), 2)
        self.assertTrue(report.eve_wins)
        self.assertTrue(report.copy_certified)
        self.assertTrue(report.bound_limited)
        self.assertTrue(report.passed)

    def test_bounded_g1_needs_positive_depth(self):
        with self.assertRaises(InputError):
            vpa_bounded_g1(vpa_ghost(vpa_calls()), 0)


if __name__ == "__main__":
    unittest.main()
