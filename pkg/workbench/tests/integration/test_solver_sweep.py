"""
Sweeps that check the parity solver and the game encodings against brute-force oracles.

Set ENABLE_FULL_SWEEPS=true to run the full-size sweeps; the default sizes keep the suite quick.
"""

import itertools
import os
import random
import unittest

from dotenv import load_dotenv

from arena import Arena, Player, play_lasso
from automaton import Acceptance, subset_determinize
from gallery import random_automaton
from game_builders import MonitorPair, build_g1_two, build_g2, build_letter_game, build_sim_game, classify_play
from parity import brute_force_winner, certify_strategy, solve_parity3

load_dotenv()

FULL = os.getenv("ENABLE_FULL_SWEEPS", "").lower() == "true"


def random_arena(num_nodes: int, seed: int) -> Arena:
    rng = random.Random(seed)
    arena = Arena()
    for _ in range(num_nodes):
        arena.add_node(rng.choice(list(Player)), rng.randint(0, 2))
    for v in range(num_nodes):
        for dst in rng.sample(range(num_nodes), rng.randint(1, 2)):
            arena.add_edge(v, dst)
    return arena


def all_arenas(num_nodes: int, sorted_nodes: bool = False):
    """Every arena on `num_nodes` nodes with one or two out-edges per node.

    With `sorted_nodes` only arenas whose (owner, priority) labels are non-decreasing are produced;
    every other arena is one of these with its nodes renamed.
    """
    targets = [c for k in (1, 2) for c in itertools.combinations(range(num_nodes), k)]
    classes = list(itertools.product(list(Player), range(3)))
    if sorted_nodes:
        labelings = itertools.combinations_with_replacement(classes, num_nodes)
    else:
        labelings = itertools.product(classes, repeat=num_nodes)
    for labels in labelings:
        for successors in itertools.product(targets, repeat=num_nodes):
            arena = Arena()
            for owner, priority in labels:
                arena.add_node(owner, priority)
            for v, dsts in enumerate(successors):
                for dst in dsts:
                    arena.add_edge(v, dst)
            yield arena


class TestSolverAgainstBruteForce(unittest.TestCase):
    def test_random_arenas(self):
        for seed in range(500 if FULL else 60):
            arena = random_arena(8, seed)
            with self.subTest(seed=seed):
                self.assertEqual(solve_parity3(arena).winners, brute_force_winner(arena))

    def test_every_small_arena(self):
        count = 0
        for arena in all_arenas(3 if FULL else 2):
            count += 1
            if solve_parity3(arena).winners != brute_force_winner(arena):
                self.fail(f"Solver disagrees with brute force on arena #{count}")
        self.assertGreater(count, 0)

    @unittest.skipUnless(FULL, "four-node sweep runs only with ENABLE_FULL_SWEEPS=true")
    def test_every_four_node_arena_up_to_renaming(self):
        count = 0
        for arena in all_arenas(4, sorted_nodes=True):
            count += 1
            if solve_parity3(arena).winners != brute_force_winner(arena):
                self.fail(f"Solver disagrees with brute force on arena #{count}")
        self.assertEqual(count, 126 * 10**4)

    def test_winning_strategies_certify(self):
        for seed in range(100 if FULL else 20):
            arena = random_arena(8, seed)
            result = solve_parity3(arena)
            winner = result.winner_at(arena.initial)
            with self.subTest(seed=seed):
                self.assertTrue(certify_strategy(arena, result.strategies[winner], winner))


class TestEncodingsAgainstPlayOracle(unittest.TestCase):
    """The solver's winner equals the winner of the play both solver strategies produce."""

    def check(self, game):
        result = solve_parity3(game.arena)
        play = play_lasso(game.arena, result.strategies[Player.EVE], result.strategies[Player.ADAM])
        self.assertIs(classify_play(game, play), result.winner_at(game.arena.initial))

    def test_simulation_games(self):
        for seed in range(40 if FULL else 10):
            acceptance = list(Acceptance)[seed % 4]
            a = random_automaton(1 + seed % 4, 2, acceptance, seed)
            b = random_automaton(1 + (seed + 1) % 4, 2, acceptance, seed + 1000)
            with self.subTest(seed=seed, acceptance=acceptance.value):
                self.check(build_sim_game(b, a))

    def test_token_games(self):
        for seed in range(40 if FULL else 10):
            acceptance = list(Acceptance)[seed % 4]
            a = random_automaton(1 + seed % 4, 2, acceptance, seed)
            with self.subTest(seed=seed, acceptance=acceptance.value):
                self.check(build_g1_two(a, a))
                if acceptance in (Acceptance.BUCHI, Acceptance.COBUCHI):
                    self.check(build_g2(a))

    def test_letter_games(self):
        for seed in range(30 if FULL else 8):
            acceptance = (Acceptance.SAFETY, Acceptance.REACHABILITY)[seed % 2]
            a = random_automaton(1 + seed % 4, 2, acceptance, seed)
            with self.subTest(seed=seed, acceptance=acceptance.value):
                self.check(build_letter_game(MonitorPair(a, subset_determinize(a))))


if __name__ == "__main__":
    unittest.main()
