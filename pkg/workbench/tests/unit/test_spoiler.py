import unittest

from automaton import Acceptance, build_automaton, is_linear, totalize
from errors import HistoryDeterministicError, InputError, StrategyError
from gallery import fig2, fig3, fin_a_monitor, inf_a_monitor
from game_builders import MonitorPair, build_letter_game, simulates
from lasso import lasso_membership, sample_accepted_lassos
from spoiler import (
    build_spoiler,
    default_monitor,
    extract_adam_strategy,
    linearize,
    project_to_sigma,
    strategy_monitor_product,
    transition_letter,
)


class TestSpoiler(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.spoiler = build_spoiler(fig3(1), fin_a_monitor(), samples=60, seed=4)

    def test_certificate_passes(self):
        certificate = self.spoiler.certificate
        self.assertTrue(certificate.adam_wins_sim)
        self.assertGreater(certificate.lassos_tested, 0)
        self.assertEqual(certificate.counterexamples, [])
        self.assertIsNone(certificate.linear)
        self.assertTrue(certificate.passed)

    def test_subject_cannot_simulate_the_spoiler(self):
        self.assertFalse(simulates(fig3(1), self.spoiler.automaton))

    def test_plays_automaton_is_deterministic_and_bounded(self):
        plays = self.spoiler.plays.automaton
        transducer = self.spoiler.transducer
        self.assertTrue(plays.is_deterministic)
        self.assertLessEqual(plays.num_states, transducer.num_states * transducer.subject.num_states)
        self.assertEqual(plays.alphabet[3], transition_letter(3))

    def test_projection_copies_every_play_edge(self):
        self.assertEqual(len(self.spoiler.projection.transitions), len(self.spoiler.plays.automaton.transitions))
        self.assertEqual(self.spoiler.projection.alphabet, fig3(1).alphabet)

    def test_projected_plays_stay_in_the_language(self):
        for lasso in sample_accepted_lassos(self.spoiler.projection, 30, seed=9):
            with self.subTest(lasso=str(lasso)):
                self.assertTrue(lasso_membership(fig3(1), lasso))

    def test_every_memory_state_plays_one_letter(self):
        projection = self.spoiler.projection
        for s in range(projection.num_states):
            letters = {projection.transitions[i].letter for i in projection.out_all(s)}
            self.assertLessEqual(len(letters), 1)


class TestSpoilerStages(unittest.TestCase):
    def setUp(self):
        self.subject = totalize(fig3(1))
        self.game = build_letter_game(MonitorPair(self.subject, fin_a_monitor()))

    def test_stages_rebuild_the_projection(self):
        transducer = extract_adam_strategy(self.game)
        plays = strategy_monitor_product(transducer, self.subject)
        projection = project_to_sigma(plays)
        spoiler = build_spoiler(fig3(1), fin_a_monitor(), samples=10)
        self.assertEqual(transducer.num_states, spoiler.transducer.num_states)
        self.assertEqual(projection.transitions, spoiler.projection.transitions)

    def test_plays_follow_subject_transitions(self):
        plays = strategy_monitor_product(extract_adam_strategy(self.game), self.subject).automaton
        for t in plays.transitions:
            used = self.subject.transitions[int(t.letter[1:])]
            with self.subTest(transition=t):
                self.assertEqual(plays.label(t.src)[1], used.src)
                self.assertEqual(plays.label(t.dst)[1], used.dst)

    def test_eve_win_has_no_adam_strategy(self):
        game = build_letter_game(MonitorPair(inf_a_monitor(), inf_a_monitor()))
        with self.assertRaises(StrategyError):
            extract_adam_strategy(game)

    def test_product_rejects_another_subject(self):
        with self.assertRaises(InputError):
            strategy_monitor_product(extract_adam_strategy(self.game), fig2())


class TestSpoilerErrors(unittest.TestCase):
    def test_hd_subject_has_no_spoiler(self):
        with self.assertRaises(HistoryDeterministicError):
            build_spoiler(inf_a_monitor(), inf_a_monitor())

    def test_buchi_subject_needs_a_monitor(self):
        with self.assertRaises(InputError):
            default_monitor(fig3(1))

    def test_linearize_needs_a_linear_subject(self):
        spoiler = build_spoiler(fig3(1), fin_a_monitor(), samples=10)
        self.assertTrue(is_linear(linearize(spoiler.projection, fig3(1))))
        two_cycle = build_automaton("ab", 2, [(0, "a", 1), (1, "b", 0)], Acceptance.BUCHI, accepting_states=[0])
        with self.assertRaises(InputError):
            linearize(spoiler.projection, two_cycle)


if __name__ == "__main__":
    unittest.main()
