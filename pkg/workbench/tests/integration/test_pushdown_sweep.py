"""
Visibly pushdown and uniform-automaton ghosts on random instances.

Set ENABLE_FULL_SWEEPS=true to run the full-size sweeps.
"""

import os
import random
import unittest

from dotenv import load_dotenv

from automaton import Acceptance
from gallery import random_uniform, random_vpa
from ghost import verify_ghost
from uniform import accepts_prefix, delay_uniform, expand, flag_product
from vpa import (
    ghost_state_count,
    sample_well_nested,
    semantic_stack_check,
    vpa_bounded_g1,
    vpa_ghost,
    vpa_membership,
)

load_dotenv()

FULL = os.getenv("ENABLE_FULL_SWEEPS", "").lower() == "true"
ACCEPTANCES = (Acceptance.BUCHI, Acceptance.COBUCHI, Acceptance.SAFETY, Acceptance.REACHABILITY)


def random_words(count: int, seed: int, max_length: int = 8) -> list[str]:
    rng = random.Random(seed)
    return ["".join(rng.choice("ab") for _ in range(rng.randint(1, max_length))) for _ in range(count)]


def reaches_mark(a, word: str) -> bool:
    """Some run on a prefix of `word` has taken a marked transition."""
    frontier = {(a.initial, False)}
    for letter in word:
        frontier = {
            (a.transitions[i].dst, seen or a.transitions[i].mark) for q, seen in frontier for i in a.out(q, letter)
        }
        if any(seen for _, seen in frontier):
            return True
    return False


class TestVpaGhostSweep(unittest.TestCase):
    def test_state_count_and_language(self):
        for seed in range(50 if FULL else 10):
            v = random_vpa(1 + seed % 3, 1 + seed % 2, ACCEPTANCES[seed % 4], seed)
            g = vpa_ghost(v)
            with self.subTest(vpa=v.name):
                self.assertEqual(g.vpa.num_states, ghost_state_count(v))
                for lasso in sample_well_nested(v, 40 if FULL else 15, 4, 4, 4, seed):
                    self.assertEqual(vpa_membership(g.vpa, lasso), vpa_membership(v, lasso), str(lasso))

    def test_semantic_stack_invariant(self):
        for seed in range(50 if FULL else 10):
            v = random_vpa(1 + seed % 3, 1 + seed % 2, ACCEPTANCES[seed % 4], seed)
            g = vpa_ghost(v)
            for lasso in sample_well_nested(v, 20 if FULL else 8, 4, 6, 4, seed + 1):
                with self.subTest(vpa=v.name, word="".join(lasso.letters)):
                    self.assertTrue(semantic_stack_check(g, lasso.letters))

    def test_bounded_ghost_game(self):
        depths = (1, 2, 3) if FULL else (1, 2)
        for seed in range(12 if FULL else 8):
            v = random_vpa(1 + seed % 2, 1, ACCEPTANCES[seed % 4], seed)
            g = vpa_ghost(v)
            for depth in depths:
                with self.subTest(vpa=v.name, depth=depth):
                    report = vpa_bounded_g1(g, depth)
                    self.assertTrue(report.eve_wins)
                    self.assertTrue(report.copy_certified)


class TestUniformSweep(unittest.TestCase):
    def test_delay_is_a_ghost_at_small_bounds(self):
        for kind in ("ocn", "vass", "parikh"):
            for seed in range(12 if FULL else 4):
                u = random_uniform(kind, 1 + seed % 3, seed)
                bound = 3 if kind == "ocn" else 2
                ghost, source = expand(delay_uniform(u), bound).automaton, expand(u, bound).automaton
                with self.subTest(automaton=u.name, bound=bound):
                    self.assertTrue(verify_ghost(ghost, source, samples=60 if FULL else 30, seed=seed).passed)

    def test_flag_product_matches_run_level_check(self):
        for seed in range(20 if FULL else 6):
            u = random_uniform("parikh", 1 + seed % 3, seed)
            lts = flag_product(u, 5).automaton
            for word in random_words(200 if FULL else 40, seed):
                with self.subTest(automaton=u.name, word=word):
                    self.assertEqual(reaches_mark(lts, word), accepts_prefix(u, word, 5))

    def test_bounds_are_monotone(self):
        for kind in ("ocn", "vass", "parikh"):
            for seed in range(10 if FULL else 4):
                u = random_uniform(kind, 1 + seed % 3, seed)
                for word in random_words(30, seed, max_length=6):
                    for bound in range(3):
                        if accepts_prefix(u, word, bound):
                            with self.subTest(automaton=u.name, word=word, bound=bound):
                                self.assertTrue(accepts_prefix(u, word, bound + 1))


if __name__ == "__main__":
    unittest.main()
