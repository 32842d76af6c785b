import unittest

from automaton import Acceptance
from errors import EpsilonBudgetError, InputError, UnsupportedAcceptanceError
from gallery import ocn_counter, pda_balanced
from ghost import delay_finite, verify_ghost
from lasso import Lasso, lasso_membership
from uniform import (
    IDENTITY,
    LinearSet,
    Semantics,
    UniformAutomaton,
    UniformTransition,
    accepts_prefix,
    counter_space,
    delay_uniform,
    expand,
    expand_bounded,
    flag_product,
    isomorphic,
    parikh_space,
    pda_space,
)


def one_token() -> UniformAutomaton:
    """Counter that never exceeds 1: a takes the token, b gives it back."""
    return UniformAutomaton(
        ("a", "b"),
        2,
        0,
        (
            UniformTransition(0, "a", "1", 1),
            UniformTransition(1, "a", IDENTITY, 1),
            UniformTransition(1, "b", "-1", 0),
        ),
        frozenset({0, 1}),
        counter_space(1),
        Semantics.SAFETY,
        "one-token",
    )


def split_target(semantics: Semantics) -> UniformAutomaton:
    """The accepting state and the accepting content are met on different steps."""
    return UniformAutomaton(
        ("a",),
        2,
        0,
        (UniformTransition(0, "a", "1,0", 1), UniformTransition(1, "a", "0,1", 0)),
        frozenset({1}),
        parikh_space(2, [LinearSet((1, 1))]),
        semantics,
        semantics.value,
    )


class TestContentSpaces(unittest.TestCase):
    def test_stack_updates(self):
        space = pda_space(["X"])
        self.assertEqual(space.apply("push:⊥:X", ()), ("X",))
        self.assertIsNone(space.apply("push:X:X", ()))
        self.assertEqual(space.apply("pop:X", ("X",)), ())
        self.assertIsNone(space.apply("pop:X", ()))
        self.assertEqual(space.serialize(("X", "X")), "⊥XX")

    def test_stack_rejects_bad_updates(self):
        with self.assertRaises(InputError):
            pda_space(["X"]).check_update("push:Y:X")
        with self.assertRaises(InputError):
            pda_space(["⊥"])

    def test_counter_stays_natural(self):
        space = counter_space(2)
        self.assertEqual(space.apply("1,0", (0, 0)), (1, 0))
        self.assertIsNone(space.apply("0,-1", (1, 0)))
        with self.assertRaises(InputError):
            space.check_update("1")

    def test_parikh_membership(self):
        space = parikh_space(2, [LinearSet((1, 0), ((1, 1),)), LinearSet((0, 2))])
        self.assertTrue(space.accepting((3, 2)))
        self.assertTrue(space.accepting((0, 2)))
        self.assertFalse(space.accepting((2, 0)))
        with self.assertRaises(InputError):
            space.check_update("-1,0")

    def test_linear_set_rejects_negative_vectors(self):
        with self.assertRaises(InputError):
            LinearSet((1, -1))


class TestExpansion(unittest.TestCase):
    def test_counter_bound_cuts_runs(self):
        u = ocn_counter()
        self.assertTrue(accepts_prefix(u, "aab", 2))
        self.assertFalse(accepts_prefix(u, "b", 2))
        self.assertFalse(accepts_prefix(u, "aaa", 2))
        self.assertTrue(accepts_prefix(u, "aaa", 3))

    def test_overflow_goes_to_unsafe_sink(self):
        lts = expand(ocn_counter(), 2)
        self.assertEqual(lts.automaton.acceptance, Acceptance.SAFETY)
        self.assertIsNotNone(lts.sink)
        self.assertFalse(lasso_membership(lts.automaton, Lasso("", "a")))
        self.assertTrue(lasso_membership(lts.automaton, Lasso("", "ab")))

    def test_balanced_stack(self):
        u = pda_balanced()
        self.assertTrue(accepts_prefix(u, "aabb", 4))
        self.assertFalse(accepts_prefix(u, "aab", 4))
        lts = expand(u, 4)
        self.assertTrue(lasso_membership(lts.automaton, Lasso("ab", "a")))
        self.assertFalse(lasso_membership(lts.automaton, Lasso("", "a")))

    def test_sync_and_async_reachability_differ(self):
        self.assertFalse(accepts_prefix(split_target(Semantics.SYNC_REACH), "aaaa", 4))
        self.assertTrue(accepts_prefix(split_target(Semantics.ASYNC_REACH), "aa", 4))
        lts = flag_product(split_target(Semantics.ASYNC_REACH), 4)
        self.assertTrue(lasso_membership(lts.automaton, Lasso("aa", "a")))

    def test_expansion_entry_points_check_semantics(self):
        with self.assertRaises(UnsupportedAcceptanceError):
            expand_bounded(split_target(Semantics.ASYNC_REACH), 2)
        with self.assertRaises(UnsupportedAcceptanceError):
            flag_product(ocn_counter(), 2)

    def test_negative_bound(self):
        with self.assertRaises(InputError):
            expand(ocn_counter(), -1)


def epsilon_counter(update: str) -> UniformAutomaton:
    """One state, an ε self-loop applying `update`, and a that increments."""
    return UniformAutomaton(
        ("a",),
        1,
        0,
        (UniformTransition(0, None, update, 0), UniformTransition(0, "a", "1", 0)),
        frozenset({0}),
        counter_space(1),
        Semantics.SAFETY,
        f"epsilon-{update}",
    )


class TestEpsilonClosure(unittest.TestCase):
    def test_growing_cycle_aborts_at_every_bound(self):
        for bound in (0, 1, 4, 20):
            with self.subTest(bound=bound):
                with self.assertRaises(EpsilonBudgetError) as raised:
                    expand(epsilon_counter("1"), bound)
                self.assertEqual(raised.exception.context["cycle_state"], 0)

    def test_growing_stack_cycle_aborts(self):
        u = UniformAutomaton(
            ("a",),
            1,
            0,
            (
                UniformTransition(0, None, "push:⊥:X", 0),
                UniformTransition(0, None, "push:X:X", 0),
                UniformTransition(0, "a", IDENTITY, 0),
            ),
            frozenset({0}),
            pda_space(["X"]),
            Semantics.SAFETY,
        )
        with self.assertRaises(EpsilonBudgetError):
            expand(u, 3)

    def test_stack_cycle_through_empty_stack_is_closed(self):
        # back at state 0 with XX after emptying the stack; replaying needs ⊥ on top again
        u = UniformAutomaton(
            ("a",),
            4,
            3,
            (
                UniformTransition(3, None, "push:⊥:X", 0),
                UniformTransition(0, None, "pop:X", 1),
                UniformTransition(1, None, "push:⊥:X", 2),
                UniformTransition(2, None, "push:X:X", 0),
                UniformTransition(0, "a", IDENTITY, 0),
            ),
            frozenset({0, 1, 2, 3}),
            pda_space(["X"]),
            Semantics.SAFETY,
        )
        lts = expand(u, 3)
        self.assertIsNone(lts.sink)

    def test_draining_cycle_is_closed(self):
        lts = expand(epsilon_counter("-1"), 3)
        self.assertEqual(lts.automaton.num_states, 5)
        self.assertIsNotNone(lts.sink)

    def test_identity_cycle_is_closed(self):
        lts = expand(epsilon_counter(IDENTITY), 2)
        self.assertEqual(lts.automaton.num_states, 4)


class TestDelayUniform(unittest.TestCase):
    def test_state_count(self):
        self.assertEqual(delay_uniform(ocn_counter()).num_states, 7)

    def test_delay_commutes_with_expansion(self):
        u = one_token()
        delayed_then_expanded = expand(delay_uniform(u), 2).automaton
        expanded_then_delayed = delay_finite(expand(u, 2).automaton).automaton
        self.assertTrue(isomorphic(delayed_then_expanded, expanded_then_delayed))

    def test_delay_is_a_ghost_at_bound(self):
        for u in (ocn_counter(), pda_balanced()):
            with self.subTest(automaton=u.name):
                ghost, source = expand(delay_uniform(u), 4).automaton, expand(u, 4).automaton
                self.assertTrue(verify_ghost(ghost, source, samples=40, seed=2).passed)


if __name__ == "__main__":
    unittest.main()
