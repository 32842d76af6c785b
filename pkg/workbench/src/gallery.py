"""Named instances with their expected facts, hand-built monitors and random instance generators."""

from __future__ import annotations

import logging
import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from arena import Player, Strategy
from automaton import Acceptance, Automaton, build_automaton, is_linear, msccs, product
from errors import InputError
from game_builders import EveNode, TokenGame, build_sim_game, is_history_deterministic
from ghost import delay_finite, verify_ghost
from lasso import lasso_membership, sample_accepted_lassos, sample_lassos
from parity import certify_strategy
from timed import TRUE, And, Atom, TimedAutomaton, TimedTransition, adam_tree_Lk, build_Lk
from uniform import (
    IDENTITY,
    LinearSet,
    Semantics,
    UniformAutomaton,
    UniformTransition,
    counter_space,
    delay_uniform,
    expand,
    parikh_space,
    pda_space,
)
from vpa import Vpa, build_vpa, ghost_state_count, vpa_bounded_g1, vpa_ghost

logger = logging.getLogger(__name__)


# ---- fixed instances ----


def fig2() -> Automaton:
    """(a+b)*(ac+bd)(a+b)^ω; linear, not HD."""
    return build_automaton(
        "abcd",
        4,
        [(0, "ab", 0), (0, "a", 1), (0, "b", 2), (1, "c", 3), (2, "d", 3), (3, "ab", 3)],
        Acceptance.BUCHI,
        accepting_states=[3],
        name="fig2",
    )


def fig2_monitor() -> Automaton:
    """Deterministic Büchi monitor for fig2: start, last letter a, last letter b, accepted tail, dead."""
    return build_automaton(
        "abcd",
        5,
        [
            (0, "a", 1), (0, "b", 2), (0, "cd", 4),
            (1, "a", 1), (1, "b", 2), (1, "c", 3), (1, "d", 4),
            (2, "a", 1), (2, "b", 2), (2, "d", 3), (2, "c", 4),
            (3, "ab", 3), (3, "cd", 4),
            (4, "abcd", 4),
        ],
        Acceptance.BUCHI,
        marked_edges=[(3, "a", 3), (3, "b", 3)],
        name="fig2-monitor",
    )


def fig3(n: int) -> Automaton:
    """Chain of 2n states accepting words with finitely many a's; even states loop on a,b, odd (accepting) ones on b."""
    if n < 1:
        raise InputError("n must be at least 1")
    edges = []
    for q in range(2 * n):
        edges.append((q, "ab" if q % 2 == 0 else "b", q))
        if q + 1 < 2 * n:
            edges.append((q, "ab", q + 1))
    return build_automaton("ab", 2 * n, edges, Acceptance.BUCHI, accepting_states=range(1, 2 * n, 2), name=f"fig3({n})")


def fin_a_monitor() -> Automaton:
    """Deterministic coBüchi automaton for finitely many a's."""
    return build_automaton("ab", 1, [(0, "ab", 0)], Acceptance.COBUCHI, marked_edges=[(0, "a", 0)], name="fin-a")


def inf_a_monitor() -> Automaton:
    """Deterministic Büchi automaton for infinitely many a's."""
    return build_automaton("ab", 1, [(0, "ab", 0)], Acceptance.BUCHI, marked_edges=[(0, "a", 0)], name="inf-a")


def fig3_counterexample() -> Automaton:
    """Two states, included in fig3(1), not simulated by it: each accepting b-loop costs Eve a chain step."""
    return build_automaton(
        "ab", 2, [(0, "b", 0), (0, "a", 1), (1, "b", 1)], Acceptance.BUCHI,
        marked_edges=[(0, "b", 0), (1, "b", 1)], name="fig3-counterexample",
    )


def included_in_fig3(b: Automaton) -> bool:
    """Exact: L(b) ⊆ fig3(n) iff no accepting cycle of b reads an a infinitely often."""
    return not product(b, inf_a_monitor()).has_doubly_marked_cycle()


def mscc_strategy(game: TokenGame) -> Strategy:
    """Eve's positional strategy in Sim(fig3(n), b): step to the next even state once Adam sits in an
    accepting MSCC, otherwise stay put when a loop allows it."""
    arena = game.arena
    chain, b = game.eve, game.adam
    accepting = {q for c in msccs(b) if c.accepting for q in c.states}
    choices: dict[int, int] = {}
    for v in arena.nodes_of(Player.EVE):
        if arena.is_terminal(v):
            continue
        p: EveNode = arena.payloads[v]
        want = p.eve + 1 if p.eve % 2 == 0 and p.adam[0] in accepting else p.eve
        edges = arena.out_edges(v)
        matching = [e for e in edges if chain.transitions[arena.edges[e].label[1]].dst == want]
        choices[v] = (matching or edges)[0]
    return Strategy(Player.EVE, choices)


def mscc_strategy_wins(n: int, b: Automaton) -> bool:
    game = build_sim_game(fig3(n), b)
    return certify_strategy(game.arena, mscc_strategy(game))


def ocn_counter() -> UniformAutomaton:
    """One-counter net: a increments, b decrements, c resets nothing; safe while b never hits zero."""
    return UniformAutomaton(
        ("a", "b", "c"),
        2,
        0,
        (
            UniformTransition(0, "a", "1", 0),
            UniformTransition(0, "b", "-1", 0),
            UniformTransition(0, "c", IDENTITY, 1),
            UniformTransition(0, "c", IDENTITY, 0),
            UniformTransition(1, "a", "1", 1),
            UniformTransition(1, "b", "-1", 0),
            UniformTransition(1, "c", IDENTITY, 1),
        ),
        frozenset({0, 1}),
        counter_space(1),
        Semantics.SAFETY,
        "ocn-counter",
    )


def pda_balanced() -> UniformAutomaton:
    """a^n b^n reaching the empty stack: pushes on a, pops on b, accepting state 1 with an empty stack."""
    return UniformAutomaton(
        ("a", "b"),
        2,
        0,
        (
            UniformTransition(0, "a", "push:⊥:X", 0),
            UniformTransition(0, "a", "push:X:X", 0),
            UniformTransition(0, "b", "pop:X", 1),
            UniformTransition(1, "b", "pop:X", 1),
        ),
        frozenset({1}),
        pda_space(["X"], empty_accepting=True),
        Semantics.SYNC_REACH,
        "pda-balanced",
    )


def vpa_calls() -> Vpa:
    """Calls push, returns pop, internal letters loop; Büchi on internal letters at the top level."""
    return build_vpa(
        {"push": ["c"], "pop": ["r"], "noop": ["i"]},
        2,
        ["X"],
        [
            (0, "*", "c", 1, "X"),
            (1, "*", "c", 1, "X"),
            (1, "X", "r", 1),
            (1, "X", "r", 0),
            (0, "⊥", "i", 0, True),
            (1, "*", "i", 1),
        ],
        Acceptance.BUCHI,
        name="vpa-calls",
    )


# ---- random generators ----


def _check_range(name: str, value: int, low: int, high: int) -> None:
    if not low <= value <= high:
        raise InputError(f"{name} must be between {low} and {high}, got {value}")


def random_automaton(
    num_states: int,
    alphabet_size: int,
    acceptance: Acceptance,
    seed: int,
    max_out: int = 2,
    mark_probability: float = 0.3,
) -> Automaton:
    _check_range("num_states", num_states, 1, 8)
    _check_range("alphabet_size", alphabet_size, 1, 4)
    rng = random.Random(seed)
    alphabet = "abcd"[:alphabet_size]
    marked, edges = [], []
    for q in range(num_states):
        for letter in alphabet:
            for dst in rng.sample(range(num_states), min(rng.randint(0, max_out), num_states)):
                edges.append((q, letter, dst))
                if rng.random() < mark_probability:
                    marked.append((q, letter, dst))
    return build_automaton(
        alphabet, num_states, edges, acceptance, marked_edges=marked, name=f"random-{acceptance.value}-{seed}"
    )


def random_vpa(num_states: int, gamma_size: int, acceptance: Acceptance, seed: int, max_out: int = 2) -> Vpa:
    _check_range("num_states", num_states, 1, 3)
    _check_range("gamma_size", gamma_size, 1, 2)
    rng = random.Random(seed)
    gamma = ["X", "Y"][:gamma_size]
    tops = {"c": gamma + ["⊥"], "r": gamma, "i": gamma + ["⊥"]}
    transitions = []
    for q in range(num_states):
        for letter, allowed in tops.items():
            for top in allowed:
                for dst in rng.sample(range(num_states), min(rng.randint(0, max_out), num_states)):
                    push = (rng.choice(gamma),) if letter == "c" else ()
                    transitions.append((q, top, letter, dst, *push, rng.random() < 0.3))
    return build_vpa(
        {"push": ["c"], "pop": ["r"], "noop": ["i"]}, num_states, gamma, transitions, acceptance,
        name=f"random-vpa-{seed}",
    )


_UNIFORM_KINDS = {
    "ocn": (lambda: counter_space(1), ["1", "-1", IDENTITY], Semantics.SAFETY),
    "vass": (lambda: counter_space(2), ["1,0", "0,1", "-1,0", "0,-1", IDENTITY], Semantics.SYNC_REACH),
    "parikh": (
        lambda: parikh_space(2, [LinearSet((1, 0), ((1, 1),)), LinearSet((0, 2))]),
        ["1,0", "0,1", IDENTITY],
        Semantics.ASYNC_REACH,
    ),
}


def random_uniform(kind: str, num_states: int, seed: int, max_out: int = 2) -> UniformAutomaton:
    if kind not in _UNIFORM_KINDS:
        raise InputError(f"Unknown uniform kind {kind!r}, expected one of {sorted(_UNIFORM_KINDS)}")
    _check_range("num_states", num_states, 1, 3)
    space_factory, updates, semantics = _UNIFORM_KINDS[kind]
    rng = random.Random(seed)
    transitions = []
    for q in range(num_states):
        for letter in ("a", "b"):
            for dst in rng.sample(range(num_states), min(rng.randint(1, max_out), num_states)):
                transitions.append(UniformTransition(q, letter, rng.choice(updates), dst))
    accepting = frozenset(q for q in range(num_states) if rng.random() < 0.6) or frozenset({num_states - 1})
    return UniformAutomaton(
        ("a", "b"), num_states, 0, tuple(transitions), accepting, space_factory(), semantics, f"random-{kind}-{seed}"
    )


_OPS = ("<", "<=", "=", ">=", ">")


def random_timed(
    num_states: int,
    num_clocks: int,
    seed: int,
    max_constant: int = 3,
    acceptance: Acceptance = Acceptance.REACHABILITY,
    max_out: int = 2,
) -> TimedAutomaton:
    _check_range("num_states", num_states, 1, 4)
    _check_range("num_clocks", num_clocks, 1, 2)
    _check_range("max_constant", max_constant, 0, 3)
    rng = random.Random(seed)
    clocks = ("x", "y")[:num_clocks]
    transitions = []
    for q in range(num_states):
        for letter in ("a", "b"):
            for _ in range(rng.randint(1, max_out)):
                atoms = tuple(
                    Atom(rng.choice(clocks), rng.choice(_OPS), rng.randint(0, max_constant))
                    for _ in range(rng.randint(0, 2))
                )
                resets = frozenset(x for x in clocks if rng.random() < 0.4)
                guard = And(atoms) if atoms else TRUE
                transitions.append(TimedTransition(q, letter, guard, resets, rng.randrange(num_states)))
    accepting = frozenset(q for q in range(num_states) if rng.random() < 0.5) or frozenset({num_states - 1})
    return TimedAutomaton(
        ("a", "b"), num_states, 0, clocks, tuple(transitions), accepting, acceptance, f"random-timed-{seed}"
    )


def random_timed_word(
    length: int, seed: int, horizon: int = 3, denominator: int = 4, alphabet: Sequence[str] = ("a", "b")
) -> list[tuple[str, Fraction]]:
    """Timestamped letters with rational stamps in [0, horizon] on a 1/denominator grid, sorted."""
    rng = random.Random(seed)
    stamps = sorted(Fraction(rng.randint(0, horizon * denominator), denominator) for _ in range(length))
    return [(rng.choice(alphabet), t) for t in stamps]


# ---- entries ----


def monitor_agrees(a: Automaton, monitor: Automaton, samples: int = 1000, seed: int = 0) -> bool:
    """Two-sided lasso sampling: random lassos plus lassos accepted by either side."""
    lassos = sample_lassos(a.alphabet, samples, 4, 4, seed)
    lassos += sample_accepted_lassos(a, samples // 4, seed) + sample_accepted_lassos(monitor, samples // 4, seed + 1)
    return all(lasso_membership(a, lasso) == lasso_membership(monitor, lasso) for lasso in lassos)


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    description: str
    build: Callable[[], object]
    facts: dict[str, object]
    monitor: Callable[[], Automaton] | None = None


@dataclass
class FactCheck:
    fact: str
    expected: object
    actual: object

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass
class EntryReport:
    name: str
    checks: list[FactCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)


def _fact(entry: GalleryEntry, subject, fact: str, samples: int, seed: int):
    monitor = entry.monitor() if entry.monitor else None
    match fact:
        case "history_deterministic":
            return bool(is_history_deterministic(subject, monitor))
        case "linear":
            return is_linear(subject)
        case "num_states":
            return subject.num_states
        case "delay_states":
            return delay_finite(subject).automaton.num_states
        case "monitor_agrees":
            return monitor_agrees(subject, monitor, samples, seed)
        case "ghost_passes":
            return verify_ghost(delay_finite(subject).automaton, subject, samples=samples, seed=seed).passed
        case "included_in_fig3_1":
            return included_in_fig3(subject)
        case "simulated_by_fig3_1":
            return mscc_strategy_wins(1, subject)
        case "adam_tree":
            return adam_tree_Lk(len(subject.clocks)).adam_wins
        case "uniform_ghost_at_6":
            ghost, source = expand(delay_uniform(subject), 6).automaton, expand(subject, 6).automaton
            return verify_ghost(ghost, source, samples=samples, seed=seed).passed
        case "ghost_states":
            return vpa_ghost(subject).vpa.num_states == ghost_state_count(subject)
        case "bounded_g1_at_4":
            return vpa_bounded_g1(vpa_ghost(subject), 4).passed
    raise InputError(f"Unknown gallery fact {fact!r}")


GALLERY: dict[str, GalleryEntry] = {
    e.name: e
    for e in [
        GalleryEntry(
            "fig2", "linear Büchi automaton with no linear ghost", fig2,
            {"linear": True, "history_deterministic": False, "num_states": 4, "delay_states": 17,
             "monitor_agrees": True, "ghost_passes": True},
            fig2_monitor,
        ),
        GalleryEntry(
            "fig3-1", "finitely many a's, two states", lambda: fig3(1),
            {"linear": True, "history_deterministic": False, "monitor_agrees": True}, fin_a_monitor,
        ),
        GalleryEntry(
            "fig3-2", "finitely many a's, four states", lambda: fig3(2),
            {"linear": True, "history_deterministic": False, "monitor_agrees": True}, fin_a_monitor,
        ),
        GalleryEntry("fin-a", "deterministic coBüchi, finitely many a's", fin_a_monitor, {"history_deterministic": True}),
        GalleryEntry("inf-a", "deterministic Büchi, infinitely many a's", inf_a_monitor, {"history_deterministic": True}),
        GalleryEntry(
            "fig3-counterexample", "included in fig3(1) but not simulated by it", fig3_counterexample,
            {"included_in_fig3_1": True, "simulated_by_fig3_1": False},
        ),
        GalleryEntry("L1", "timed family with one clock", lambda: build_Lk(1), {"adam_tree": True}),
        GalleryEntry("L2", "timed family with two clocks", lambda: build_Lk(2), {"adam_tree": True}),
        GalleryEntry("ocn-counter", "one-counter net under safety", ocn_counter, {"uniform_ghost_at_6": True}),
        GalleryEntry("pda-balanced", "a^n b^n to the empty stack", pda_balanced, {"uniform_ghost_at_6": True}),
        GalleryEntry(
            "vpa-calls", "calls and returns with top-level internal letters", vpa_calls,
            {"ghost_states": True, "bounded_g1_at_4": True},
        ),
    ]
}


def get_entry(name: str) -> GalleryEntry:
    if name not in GALLERY:
        raise InputError(f"Unknown gallery entry {name!r}", {"known": sorted(GALLERY)})
    return GALLERY[name]


def verify_entry(name: str, samples: int = 1000, seed: int = 0) -> EntryReport:
    entry = get_entry(name)
    subject = entry.build()
    report = EntryReport(name)
    for fact, expected in entry.facts.items():
        report.checks.append(FactCheck(fact, expected, _fact(entry, subject, fact, samples, seed)))
    failed = [c.fact for c in report.checks if not c.ok]
    if failed:
        logger.warning(f"Gallery entry {name} failed facts {failed}")
    return report
