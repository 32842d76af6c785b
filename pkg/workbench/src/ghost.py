"""The one-step delay construction and its ghost certification."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

from arena import Player, Strategy
from automaton import Acceptance, Automaton, Transition
from errors import AlphabetMismatchError, ProvenanceError
from game_builders import EveNode, TokenGame, build_g1_two, eve_wins
from lasso import Lasso, lasso_membership, sample_accepted_lassos, sample_lassos
from parity import certify_strategy

logger = logging.getLogger(__name__)

GHOST_INITIAL = "init'"


@dataclass(frozen=True)
class DelayAutomaton:
    """delay(a) with trace-back to `source`.

    State 0 is the fresh initial state; (q, σ) is state 1 + q·|Σ| + index(σ).
    `transition_origin[i]` is the source transition copied by delayed transition i (None on initial edges).
    """

    automaton: Automaton
    source: Automaton
    state_origin: tuple
    transition_origin: tuple[int | None, ...]

    def state_of(self, q: int, letter: str) -> int:
        return 1 + q * len(self.source.alphabet) + self.source.alphabet.index(letter)


def delay_finite(a: Automaton) -> DelayAutomaton:
    sigma = a.alphabet
    n = a.num_states * len(sigma) + 1
    origin: list = [None] + [(q, letter) for q in range(a.num_states) for letter in sigma]

    def state(q: int, letter: str) -> int:
        return 1 + q * len(sigma) + sigma.index(letter)

    transitions = [Transition(0, letter, state(a.initial, letter)) for letter in sigma]
    provenance: list[int | None] = [None] * len(sigma)
    for i, t in enumerate(a.transitions):
        for nxt in sigma:
            transitions.append(Transition(state(t.src, t.letter), nxt, state(t.dst, nxt), t.mark))
            provenance.append(i)
    labels = (GHOST_INITIAL,) + tuple((a.label(q), letter) for q, letter in origin[1:])
    delayed = Automaton(sigma, n, 0, tuple(transitions), a.acceptance, f"delay({a.name})", labels)
    logger.debug(f"Delayed {a.name or 'automaton'}: {a.num_states} -> {n} states")
    return DelayAutomaton(delayed, a, tuple(origin), tuple(provenance))


def _prefers_marks(acceptance: Acceptance) -> bool:
    return acceptance in (Acceptance.BUCHI, Acceptance.REACHABILITY)


def copy_strategy(d: DelayAutomaton, a: Automaton, game: TokenGame | None = None) -> Strategy:
    """Eve copies Adam's previous transition, one round late.

    At (q, σ) with Adam now in q', Eve takes a delayed copy of some q -σ-> q'; among parallel
    copies she prefers marked ones under Büchi/reachability and unmarked ones otherwise.
    """
    if d.source != a:
        raise ProvenanceError(f"{d.automaton.name} was not built from {a.name or 'this automaton'}")
    game = game or build_g1_two(d.automaton, a)
    arena = game.arena
    prefer = _prefers_marks(a.acceptance)
    choices: dict[int, int] = {}
    seen = {arena.initial}
    queue = deque([arena.initial])
    while queue:
        v = queue.popleft()
        if arena.is_terminal(v):
            continue
        edges = arena.out_edges(v)
        if arena.owners[v] is Player.EVE:
            choices[v] = _copy_move(d, a, arena, arena.payloads[v], edges, prefer)
            edges = [choices[v]]
        for e in edges:
            dst = arena.edges[e].dst
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return Strategy(Player.EVE, choices)


def _copy_move(d: DelayAutomaton, a: Automaton, arena, node: EveNode, edges: list[int], prefer: bool) -> int:
    if d.state_origin[node.eve] is None:
        return edges[0]
    best = None
    for e in edges:
        source = d.transition_origin[arena.edges[e].label[1]]
        t = a.transitions[source]
        if t.dst != node.adam[0]:
            continue
        if t.mark == prefer:
            return e
        best = e if best is None else best
    if best is None:
        raise ProvenanceError(f"No delayed copy reaches Adam's state {node.adam[0]} from {d.state_origin[node.eve]}")
    return best


@dataclass
class GhostReport:
    eve_wins_g1: bool
    lassos_checked: int
    disagreements: list[Lasso] = field(default_factory=list)
    copy_certified: bool | None = None

    @property
    def passed(self) -> bool:
        return self.eve_wins_g1 and not self.disagreements and self.copy_certified is not False


def verify_ghost(
    a_prime: Automaton,
    a: Automaton,
    samples: int = 200,
    seed: int = 0,
    max_prefix: int = 4,
    max_cycle: int = 4,
) -> GhostReport:
    """Exact G1(a', a) verdict plus two-sided membership agreement on sampled lassos."""
    if a_prime.alphabet != a.alphabet:
        raise AlphabetMismatchError(a_prime.alphabet, a.alphabet)
    lassos = sample_lassos(a.alphabet, samples, max_prefix, max_cycle, seed)
    lassos += sample_accepted_lassos(a, max(samples // 4, 1), seed)
    lassos += sample_accepted_lassos(a_prime, max(samples // 4, 1), seed + 1)
    disagreements = [lasso for lasso in lassos if lasso_membership(a, lasso) != lasso_membership(a_prime, lasso)]
    report = GhostReport(eve_wins(build_g1_two(a_prime, a)), len(lassos), disagreements)
    if disagreements:
        logger.info(f"Ghost check: {len(disagreements)} of {len(lassos)} lassos disagree, first {disagreements[0]}")
    return report


def certify_delay(a: Automaton, **sampling) -> GhostReport:
    """verify_ghost(delay(a), a) plus residual certification of the copy strategy."""
    d = delay_finite(a)
    report = verify_ghost(d.automaton, a, **sampling)
    game = build_g1_two(d.automaton, a)
    report.copy_certified = certify_strategy(game.arena, copy_strategy(d, a, game))
    return report
