import random
import unittest

from arena import Arena, Player, Strategy, play_lasso, play_winner, restrict_to_strategy
from errors import InputError, StrategyError
from parity import brute_force_winner, certify_strategy, solve_parity3, solve_reachability


def random_arena(num_nodes: int, seed: int, max_out: int = 2, terminal_probability: float = 0.1) -> Arena:
    rng = random.Random(seed)
    arena = Arena()
    terminals = set()
    for v in range(num_nodes):
        owner = rng.choice(list(Player))
        if v > 0 and rng.random() < terminal_probability:
            arena.add_node(owner, winner=rng.choice(list(Player)))
            terminals.add(v)
        else:
            arena.add_node(owner, rng.randint(0, 2))
    for v in range(num_nodes):
        if v in terminals:
            continue
        for _ in range(rng.randint(1, max_out)):
            arena.add_edge(v, rng.randrange(num_nodes))
    return arena


def choice_arena(chooser: Player) -> Arena:
    """Node 0 picks between an Adam-won loop (node 1) and an Eve-won loop (node 2)."""
    arena = Arena()
    arena.add_node(chooser, 0)
    arena.add_node(Player.ADAM, 1)
    arena.add_node(Player.EVE, 2)
    arena.add_edge(0, 1)
    arena.add_edge(0, 2)
    arena.add_edge(1, 1)
    arena.add_edge(2, 2)
    return arena


class TestArena(unittest.TestCase):
    def test_rejects_priority_outside_range(self):
        with self.assertRaises(InputError):
            Arena().add_node(Player.EVE, 3)

    def test_dead_end_without_winner_is_invalid(self):
        arena = Arena()
        arena.add_node(Player.EVE, 0)
        with self.assertRaises(InputError):
            arena.validate()

    def test_terminal_cannot_have_edges(self):
        arena = Arena()
        arena.add_node(Player.EVE, winner=Player.EVE)
        with self.assertRaises(InputError):
            arena.add_edge(0, 0)


class TestSolveParity3(unittest.TestCase):
    def test_eve_chooses_even_loop(self):
        arena = choice_arena(Player.EVE)
        result = solve_parity3(arena)
        self.assertEqual(result.winners, [Player.EVE, Player.ADAM, Player.EVE])
        self.assertEqual(arena.edges[result.strategies[Player.EVE].choices[0]].dst, 2)

    def test_adam_chooses_odd_loop(self):
        arena = choice_arena(Player.ADAM)
        result = solve_parity3(arena)
        self.assertIs(result.winner_at(0), Player.ADAM)
        self.assertEqual(arena.edges[result.strategies[Player.ADAM].choices[0]].dst, 1)

    def test_highest_priority_on_cycle_decides(self):
        arena = Arena()
        arena.add_node(Player.ADAM, 1)
        arena.add_node(Player.ADAM, 2)
        arena.add_edge(0, 1)
        arena.add_edge(1, 0)
        self.assertEqual(solve_parity3(arena).winners, [Player.EVE, Player.EVE])

    def test_terminals_keep_their_winner(self):
        arena = Arena()
        arena.add_node(Player.EVE, 0)
        arena.add_node(Player.ADAM, winner=Player.ADAM)
        arena.add_node(Player.EVE, winner=Player.EVE)
        arena.add_edge(0, 1)
        arena.add_edge(0, 2)
        result = solve_parity3(arena)
        self.assertEqual(result.winners, [Player.EVE, Player.ADAM, Player.EVE])

    def test_matches_brute_force_on_random_arenas(self):
        for seed in range(60):
            arena = random_arena(6, seed)
            with self.subTest(seed=seed):
                self.assertEqual(solve_parity3(arena).winners, brute_force_winner(arena))

    def test_winning_strategies_certify(self):
        for seed in range(40):
            arena = random_arena(7, seed)
            result = solve_parity3(arena)
            winner = result.winner_at(arena.initial)
            with self.subTest(seed=seed):
                self.assertTrue(certify_strategy(arena, result.strategies[winner], winner))


class TestSolveReachability(unittest.TestCase):
    def test_eve_attracts_to_target(self):
        arena = choice_arena(Player.EVE)
        result = solve_reachability(arena, [2])
        self.assertEqual(result.region(Player.EVE), frozenset({0, 2}))

    def test_adam_avoids_target(self):
        arena = choice_arena(Player.ADAM)
        result = solve_reachability(arena, [2])
        self.assertIs(result.winner_at(0), Player.ADAM)
        self.assertEqual(arena.edges[result.strategies[Player.ADAM].choices[0]].dst, 1)


class TestStrategies(unittest.TestCase):
    def test_restrict_requires_choices_on_reachable_nodes(self):
        with self.assertRaises(StrategyError):
            restrict_to_strategy(choice_arena(Player.EVE), Strategy(Player.EVE), Player.EVE)

    def test_restrict_keeps_only_chosen_edge(self):
        arena = choice_arena(Player.EVE)
        restricted = restrict_to_strategy(arena, Strategy(Player.EVE, {0: 1, 2: 3}), Player.EVE)
        self.assertEqual(restricted.successors(0), [2])

    def test_losing_strategy_does_not_certify(self):
        arena = choice_arena(Player.EVE)
        self.assertFalse(certify_strategy(arena, Strategy(Player.EVE, {0: 0, 2: 3})))

    def test_play_lasso_and_winner(self):
        arena = choice_arena(Player.EVE)
        play = play_lasso(arena, Strategy(Player.EVE, {0: 1, 2: 3}), Strategy(Player.ADAM))
        self.assertEqual(play.nodes, (0, 2))
        self.assertEqual(play.cycle, (2,))
        self.assertIs(play_winner(arena, play), Player.EVE)


if __name__ == "__main__":
    unittest.main()
