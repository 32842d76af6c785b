"""Spoilers: automata built from Adam's letter-game strategy that the subject cannot simulate.

Adam's positional strategy on the letter-game arena becomes a transducer over the subject's
transitions; composed with the subject it yields a deterministic safety automaton of the plays
he wins, whose projection onto letters is delayed once more to obtain the spoiler.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from arena import GameResult, Player
from automaton import Acceptance, Automaton, Transition, is_linear, subset_determinize, totalize
from errors import HistoryDeterministicError, InputError, StrategyError
from game_builders import AdamNode, MonitorPair, RoundNode, TokenGame, build_letter_game, simulates
from ghost import delay_finite
from lasso import Lasso, lasso_membership, sample_accepted_lassos
from parity import solve_parity3

logger = logging.getLogger(__name__)


def transition_letter(i: int) -> str:
    return f"t{i}"


@dataclass(frozen=True)
class StrategyTransducer:
    """Adam's letter-game strategy: state m outputs `gamma[m]` and reads Eve's transition."""

    subject: Automaton
    nodes: tuple[int, ...]
    gamma: tuple[str, ...]
    delta: dict[tuple[int, int], int] = field(hash=False)
    initial: int = 0

    @property
    def num_states(self) -> int:
        return len(self.nodes)

    def step(self, m: int, transition: int) -> int | None:
        return self.delta.get((m, transition))


def _next_round(arena, node: int) -> int | None:
    """Round node that follows Eve's move, passing over the forced monitor step."""
    payload = arena.payloads[node]
    if isinstance(payload, RoundNode):
        return node
    if isinstance(payload, AdamNode):
        successors = arena.successors(node)
        if len(successors) != 1:
            raise StrategyError("Monitor step is not deterministic", {"node": node})
        return _next_round(arena, successors[0])
    return None


def extract_adam_strategy(game: TokenGame, result: GameResult | None = None) -> StrategyTransducer:
    """Re-express Adam's positional strategy with the round nodes he reaches as memory."""
    arena = game.arena
    result = result or solve_parity3(arena)
    if result.winner_at(arena.initial) is not Player.ADAM:
        raise StrategyError("Adam does not win the letter game", {"automaton": game.eve.name})
    choices = result.strategies[Player.ADAM].choices
    index = {arena.initial: 0}
    nodes, gamma = [arena.initial], []
    delta: dict[tuple[int, int], int] = {}
    queue = deque([arena.initial])
    while queue:
        v = queue.popleft()
        m = index[v]
        if v not in choices:
            raise StrategyError("Adam's strategy has no move at a reachable round", {"node": v})
        edge = arena.edges[choices[v]]
        gamma.append(edge.label[1])
        eve = edge.dst
        if arena.is_terminal(eve):
            continue
        for e in arena.out_edges(eve):
            _, t = arena.edges[e].label
            nxt = _next_round(arena, arena.edges[e].dst)
            if nxt is None:
                continue
            if nxt not in index:
                index[nxt] = len(nodes)
                nodes.append(nxt)
                queue.append(nxt)
            delta[(m, t)] = index[nxt]
    logger.debug(f"Adam's strategy on {game.eve.name or 'automaton'}: {len(nodes)} memory states")
    return StrategyTransducer(game.eve, tuple(nodes), tuple(gamma), delta)


@dataclass(frozen=True)
class PlaysAutomaton:
    """Deterministic safety automaton over the subject's transitions; states are (memory, subject state)."""

    automaton: Automaton
    subject: Automaton


def strategy_monitor_product(m: StrategyTransducer, a: Automaton) -> PlaysAutomaton:
    if m.subject.alphabet != a.alphabet or len(m.subject.transitions) != len(a.transitions):
        raise InputError("Transducer reads the transitions of a different automaton")
    start = (m.initial, a.initial)
    index = {start: 0}
    order = [start]
    transitions = []
    queue = deque([start])
    while queue:
        mem, q = queue.popleft()
        src = index[(mem, q)]
        for t in a.out(q, m.gamma[mem]):
            nxt = m.step(mem, t)
            if nxt is None:
                continue
            dst_key = (nxt, a.transitions[t].dst)
            if dst_key not in index:
                index[dst_key] = len(order)
                order.append(dst_key)
                queue.append(dst_key)
            transitions.append(Transition(src, transition_letter(t), index[dst_key]))
    alphabet = tuple(transition_letter(i) for i in range(len(a.transitions)))
    plays = Automaton(
        alphabet, len(order), 0, tuple(transitions), Acceptance.SAFETY, f"plays({a.name})", tuple(order)
    )
    return PlaysAutomaton(plays, a)


def project_to_sigma(p: PlaysAutomaton) -> Automaton:
    """Same states and transitions, each labelled by the letter of the subject transition it carried."""
    a = p.subject
    transitions = tuple(
        Transition(t.src, a.transitions[int(t.letter[1:])].letter, t.dst, t.mark) for t in p.automaton.transitions
    )
    plays = p.automaton
    return Automaton(
        a.alphabet, plays.num_states, plays.initial, transitions, Acceptance.SAFETY, f"proj({a.name})",
        plays.state_labels,
    )


def _classes(n: Automaton) -> dict[int, list[int]]:
    if n.state_labels is None:
        raise InputError("Linearization needs (memory, subject state) labels")
    classes: dict[int, list[int]] = {}
    for s in range(n.num_states):
        classes.setdefault(n.label(s)[1], []).append(s)
    return classes


def _cyclic(n: Automaton, members: list[int]) -> bool:
    inside = set(members)
    graph = nx.DiGraph()
    graph.add_nodes_from(members)
    graph.add_edges_from((t.src, t.dst) for t in n.transitions if t.src in inside and t.dst in inside)
    return any(len(c) > 1 for c in nx.strongly_connected_components(graph)) or any(
        graph.has_edge(s, s) for s in members
    )


def unrolling_bounds(n: Automaton, subject: Automaton) -> dict[int, int]:
    """Unrolling depth per subject state whose class of projection states carries a cycle."""
    return {
        q: len(members) * 2**subject.num_states for q, members in _classes(n).items() if _cyclic(n, members)
    }


def linearize(n: Automaton, subject: Automaton) -> Automaton:
    """Unroll every cyclic class N_q into K + 1 copies so that only self-loops remain.

    Edges inside the class advance one copy; the last copy keeps each such edge as a self-loop
    on its source; edges entering the class land in copy 0 and edges leaving it leave every copy.
    """
    if not is_linear(subject):
        raise InputError(f"{subject.name or 'Subject'} is not linear")
    bounds = unrolling_bounds(n, subject)
    cls = {s: n.label(s)[1] for s in range(n.num_states)}

    def entry(s: int):
        return (s, 0) if cls[s] in bounds else (s, None)

    start = entry(n.initial)
    index = {start: 0}
    order = [start]
    transitions = []
    queue = deque([start])

    def node(key) -> int:
        if key not in index:
            index[key] = len(order)
            order.append(key)
            queue.append(key)
        return index[key]

    while queue:
        key = queue.popleft()
        s, copy = key
        src = index[key]
        for i in n.out_all(s):
            t = n.transitions[i]
            if copy is not None and cls[t.dst] == cls[s]:
                k = bounds[cls[s]]
                dst = (t.dst, copy + 1) if copy < k else (s, k)
            else:
                dst = entry(t.dst)
            transitions.append(Transition(src, t.letter, node(dst), t.mark))
    labels = tuple(n.label(s) if copy is None else (n.label(s), copy) for s, copy in order)
    logger.debug(f"Linearized {n.name}: {n.num_states} -> {len(order)} states, bounds {bounds}")
    return Automaton(n.alphabet, len(order), 0, tuple(transitions), n.acceptance, f"lin({n.name})", labels)


@dataclass
class SpoilerCertificate:
    adam_wins_sim: bool
    lassos_tested: int
    counterexamples: list[Lasso] = field(default_factory=list)
    linear: bool | None = None

    @property
    def passed(self) -> bool:
        return self.adam_wins_sim and self.lassos_tested > 0 and not self.counterexamples and self.linear is not False


@dataclass
class Spoiler:
    automaton: Automaton
    transducer: StrategyTransducer
    plays: PlaysAutomaton
    projection: Automaton
    certificate: SpoilerCertificate


def default_monitor(a: Automaton) -> Automaton:
    if a.acceptance not in (Acceptance.SAFETY, Acceptance.REACHABILITY):
        raise InputError(f"A monitor is required for {a.acceptance.value} subjects")
    return subset_determinize(a)


def build_spoiler(
    a: Automaton,
    monitor: Automaton | None = None,
    linearize_strategy: bool = False,
    samples: int = 500,
    seed: int = 0,
    node_limit: int | None = None,
) -> Spoiler:
    """Spoiler B' for a non-HD subject together with its certificate."""
    monitor = monitor if monitor is not None else default_monitor(a)
    subject = totalize(a)
    game = build_letter_game(MonitorPair(subject, monitor), node_limit)
    result = solve_parity3(game.arena)
    if result.winner_at(game.arena.initial) is Player.EVE:
        raise HistoryDeterministicError()
    transducer = extract_adam_strategy(game, result)
    plays = strategy_monitor_product(transducer, subject)
    projection = project_to_sigma(plays)
    source = linearize(projection, a) if linearize_strategy else projection
    spoiler = delay_finite(source).automaton.with_name(f"spoiler({a.name})")

    lassos = sample_accepted_lassos(spoiler, samples, seed)
    counterexamples = [lasso for lasso in lassos if not lasso_membership(a, lasso)]
    if counterexamples:
        logger.warning(f"Spoiler for {a.name or 'automaton'} accepts {counterexamples[0]} outside the language")
    certificate = SpoilerCertificate(
        not simulates(a, spoiler, node_limit),
        len(lassos),
        counterexamples,
        is_linear(spoiler) if linearize_strategy else None,
    )
    logger.info(
        f"Spoiler for {a.name or 'automaton'}: {spoiler.num_states} states, "
        f"adam wins sim: {certificate.adam_wins_sim}, lassos: {len(lassos)}"
    )
    return Spoiler(spoiler, transducer, plays, projection, certificate)
