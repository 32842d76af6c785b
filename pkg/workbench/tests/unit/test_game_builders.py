import unittest

from arena import Player, play_lasso
from automaton import Acceptance, Automaton, build_automaton, subset_determinize
from errors import (
    AlphabetMismatchError,
    ArenaLimitError,
    InconsistencyError,
    NonDeterministicMonitorError,
    UnsupportedAcceptanceError,
)
from gallery import fig2, fig3, fig3_counterexample, fin_a_monitor, inf_a_monitor
from game_builders import (
    Condition,
    MonitorPair,
    RoundNode,
    TerminalNode,
    build_g1_two,
    build_g2,
    build_letter_game,
    build_sim_game,
    classify_play,
    close_round,
    close_round_two_tokens,
    eve_wins,
    is_history_deterministic,
    simulates,
)
from parity import solve_parity3


def choose_early():
    """Safety automaton for a·a^ω + a·b^ω that must commit on the first letter."""
    return build_automaton("ab", 3, [(0, "a", 1), (0, "a", 2), (1, "a", 1), (2, "b", 2)], Acceptance.SAFETY)


def eventually_b():
    return build_automaton(
        "ab", 2, [(0, "ab", 0), (0, "b", 1), (1, "ab", 1)], Acceptance.REACHABILITY, marked_edges=[(0, "b", 1)]
    )


class TestCloseRound(unittest.TestCase):
    def test_buchi_against_buchi(self):
        self.assertEqual(close_round(Condition.BUCHI, Condition.BUCHI, True, True, 0), (2, 0))
        self.assertEqual(close_round(Condition.BUCHI, Condition.BUCHI, False, True, 0), (1, 0))
        self.assertEqual(close_round(Condition.BUCHI, Condition.BUCHI, False, False, 0), (0, 0))

    def test_cobuchi_against_cobuchi(self):
        # Adam's mark is his bad event; Eve's mark is hers.
        self.assertEqual(close_round(Condition.COBUCHI, Condition.COBUCHI, True, True, 0), (2, 0))
        self.assertEqual(close_round(Condition.COBUCHI, Condition.COBUCHI, True, False, 0), (1, 0))

    def test_cobuchi_against_buchi_waits_for_both_events(self):
        self.assertEqual(close_round(Condition.COBUCHI, Condition.BUCHI, True, False, 0), (0, 1))
        self.assertEqual(close_round(Condition.COBUCHI, Condition.BUCHI, False, True, 1), (1, 0))
        self.assertEqual(close_round(Condition.COBUCHI, Condition.BUCHI, True, True, 0), (1, 0))

    def test_two_tokens_need_both_adam_tokens(self):
        self.assertEqual(close_round_two_tokens(False, True, True, 0), (2, 0))
        self.assertEqual(close_round_two_tokens(True, True, False, 0), (1, 1))
        self.assertEqual(close_round_two_tokens(False, False, True, 1), (2, 0))


class TestBuilders(unittest.TestCase):
    def test_sim_game_alphabet_mismatch(self):
        with self.assertRaises(AlphabetMismatchError):
            build_sim_game(fig2(), fig3(1))

    def test_g2_needs_buchi_or_cobuchi(self):
        with self.assertRaises(UnsupportedAcceptanceError):
            build_g2(choose_early())

    def test_monitor_must_be_deterministic(self):
        with self.assertRaises(NonDeterministicMonitorError):
            MonitorPair(fig3(1), fig3(1))

    def test_monitor_is_totalized(self):
        mp = MonitorPair(choose_early(), subset_determinize(choose_early()))
        self.assertTrue(mp.monitor.is_complete)

    def test_initial_node_is_a_round(self):
        game = build_g1_two(choose_early(), choose_early())
        self.assertIsInstance(game.arena.payloads[game.arena.initial], RoundNode)
        self.assertIs(game.arena.owners[game.arena.initial], Player.ADAM)

    def test_node_limit(self):
        with self.assertRaises(ArenaLimitError) as raised:
            build_sim_game(fig2(), fig2(), node_limit=3)
        self.assertEqual(raised.exception.context, {"limit": 3})
        self.assertTrue(eve_wins(build_sim_game(fig2(), fig2(), node_limit=None)))

    def test_unsafe_adam_move_ends_the_play(self):
        a = build_automaton("a", 1, [(0, "a", 0)], Acceptance.SAFETY, marked_edges=[(0, "a", 0)])
        game = build_sim_game(a, a)
        reasons = {p.reason for p in game.arena.payloads if isinstance(p, TerminalNode)}
        self.assertIn("adam_unsafe", reasons)
        self.assertTrue(eve_wins(game))


class TestSimulation(unittest.TestCase):
    def test_every_automaton_simulates_itself(self):
        for a in (fig2(), fig3(1), choose_early(), eventually_b()):
            with self.subTest(automaton=a.name or a.acceptance.value):
                self.assertTrue(simulates(a, a))

    def test_fig3_simulates_each_single_deletion(self):
        a = fig3(1)
        for i in range(len(a.transitions)):
            kept = a.transitions[:i] + a.transitions[i + 1 :]
            sub = Automaton(a.alphabet, a.num_states, a.initial, kept, a.acceptance)
            with self.subTest(deleted=a.transitions[i]):
                self.assertTrue(simulates(a, sub))

    def test_fig3_does_not_simulate_the_counterexample(self):
        self.assertFalse(simulates(fig3(1), fig3_counterexample()))

    def test_deterministic_monitor_simulates_fig3(self):
        self.assertTrue(simulates(fin_a_monitor(), fig3(1)))

    def test_language_mismatch_breaks_simulation(self):
        self.assertFalse(simulates(fin_a_monitor(), inf_a_monitor()))


class TestHistoryDeterminism(unittest.TestCase):
    def test_deterministic_automata_are_hd(self):
        for a in (fin_a_monitor(), inf_a_monitor()):
            with self.subTest(automaton=a.name):
                self.assertTrue(is_history_deterministic(a))

    def test_fig3_is_not_hd_on_both_paths(self):
        verdict = is_history_deterministic(fig3(1), fin_a_monitor())
        self.assertFalse(verdict)
        self.assertEqual(verdict.paths, {"g2": False, "letter_game": False})

    def test_fig2_is_not_hd(self):
        self.assertFalse(is_history_deterministic(fig2()))

    def test_early_commitment_is_not_hd(self):
        verdict = is_history_deterministic(choose_early(), subset_determinize(choose_early()))
        self.assertFalse(verdict)
        self.assertEqual(set(verdict.paths), {"g1", "letter_game"})

    def test_guessing_the_b_is_hd(self):
        self.assertTrue(is_history_deterministic(eventually_b(), subset_determinize(eventually_b())))

    def test_wrong_monitor_makes_paths_disagree(self):
        # fin-a is deterministic, so G2 says HD; against the inf-a monitor Adam wins the letter game on a^ω.
        with self.assertRaises(InconsistencyError):
            is_history_deterministic(fin_a_monitor(), inf_a_monitor())

    def test_letter_game_against_own_determinization(self):
        a = choose_early()
        self.assertFalse(eve_wins(build_letter_game(MonitorPair(a, subset_determinize(a)))))


class TestClassifyPlay(unittest.TestCase):
    def test_oracle_agrees_with_solver_on_optimal_plays(self):
        games = [
            build_sim_game(fig2(), fig2()),
            build_g1_two(choose_early(), choose_early()),
            build_g2(fig3(1)),
            build_sim_game(fig3(1), fig3_counterexample()),
        ]
        for i, game in enumerate(games):
            result = solve_parity3(game.arena)
            play = play_lasso(game.arena, result.strategies[Player.EVE], result.strategies[Player.ADAM])
            with self.subTest(game=i):
                self.assertIs(classify_play(game, play), result.winner_at(game.arena.initial))


if __name__ == "__main__":
    unittest.main()
