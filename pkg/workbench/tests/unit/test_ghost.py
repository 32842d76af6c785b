import unittest

from arena import Player
from errors import AlphabetMismatchError, InputError, InvalidWitnessError, ProvenanceError
from composition import compose_from_solver, compose_sim_and_ghost
from gallery import fig2, fig3, fin_a_monitor, inf_a_monitor
from game_builders import build_g1_two, build_sim_game
from ghost import GHOST_INITIAL, certify_delay, copy_strategy, delay_finite, verify_ghost
from lasso import Lasso, lasso_membership
from parity import certify_strategy, solve_parity3


class TestDelayFinite(unittest.TestCase):
    def test_state_count(self):
        self.assertEqual(delay_finite(fig2()).automaton.num_states, 17)
        self.assertEqual(delay_finite(fig3(2)).automaton.num_states, 9)

    def test_state_layout_and_provenance(self):
        d = delay_finite(fig2())
        self.assertEqual(d.automaton.label(0), GHOST_INITIAL)
        self.assertIsNone(d.state_origin[0])
        self.assertEqual(d.state_origin[d.state_of(3, "c")], (3, "c"))
        sigma = len(fig2().alphabet)
        self.assertTrue(all(origin is None for origin in d.transition_origin[:sigma]))
        for i, source in enumerate(d.transition_origin[sigma:], start=sigma):
            self.assertEqual(d.automaton.transitions[i].mark, fig2().transitions[source].mark)

    def test_language_is_preserved(self):
        d = delay_finite(fig2()).automaton
        for lasso in (Lasso("bd", "a"), Lasso("", "ab"), Lasso("abac", "b"), Lasso("ad", "a")):
            with self.subTest(lasso=str(lasso)):
                self.assertEqual(lasso_membership(d, lasso), lasso_membership(fig2(), lasso))


class TestGhostCertification(unittest.TestCase):
    def test_delay_of_fig2_is_a_ghost(self):
        report = certify_delay(fig2(), samples=60, seed=1)
        self.assertTrue(report.eve_wins_g1)
        self.assertTrue(report.copy_certified)
        self.assertEqual(report.disagreements, [])
        self.assertTrue(report.passed)

    def test_copy_strategy_wins_for_every_condition(self):
        for a in (fig3(1), fin_a_monitor(), inf_a_monitor()):
            d = delay_finite(a)
            game = build_g1_two(d.automaton, a)
            with self.subTest(automaton=a.name):
                self.assertTrue(certify_strategy(game.arena, copy_strategy(d, a, game)))

    def test_copy_strategy_checks_provenance(self):
        with self.assertRaises(ProvenanceError):
            copy_strategy(delay_finite(fig3(1)), fig3(2))

    def test_different_language_fails(self):
        report = verify_ghost(fin_a_monitor(), inf_a_monitor(), samples=40, seed=0)
        self.assertFalse(report.eve_wins_g1)
        self.assertTrue(report.disagreements)
        self.assertFalse(report.passed)

    def test_alphabet_mismatch(self):
        with self.assertRaises(AlphabetMismatchError):
            verify_ghost(fig2(), fig3(1))


class TestComposition(unittest.TestCase):
    def test_hd_automaton_composes_with_its_delay(self):
        for a in (fin_a_monitor(), inf_a_monitor()):
            with self.subTest(automaton=a.name):
                composed = compose_from_solver(a, delay_finite(a).automaton)
                self.assertTrue(composed.certified)
                self.assertTrue(certify_strategy(composed.arena, composed.strategy))

    def test_copy_strategy_as_ghost_witness(self):
        a = inf_a_monitor()
        d = delay_finite(a)
        game = build_g1_two(d.automaton, a)
        composed = compose_from_solver(a, d.automaton, copy_strategy(d, a, game))
        self.assertTrue(composed.certified)

    def test_lost_simulation_is_an_invalid_witness(self):
        with self.assertRaises(InvalidWitnessError):
            compose_from_solver(fig2(), delay_finite(fig2()).automaton)

    def test_games_must_match(self):
        a = inf_a_monitor()
        sim = build_sim_game(a, a)
        ghost = build_g1_two(fin_a_monitor(), a)
        with self.assertRaises(InputError):
            compose_sim_and_ghost(
                sim, solve_parity3(sim.arena).strategies[Player.EVE], ghost, solve_parity3(ghost.arena).strategies[Player.EVE]
            )


if __name__ == "__main__":
    unittest.main()
