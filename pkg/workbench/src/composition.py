"""Eve's G1(a, a) strategy obtained by playing Sim(a, a') against an imagined opponent.

The opponent plays a winning strategy of G1(a', a) and feeds her moves in a' into the
simulation game; Eve answers there and copies the answer into G1(a, a). The result is a
positional strategy on G1(a, a) extended by that memory.
"""

from __future__ import annotations

import logging
from collections.abc import Hashable
from dataclasses import dataclass

from arena import Arena, ArenaBuilder, Player, Strategy
from automaton import Automaton
from errors import InconsistencyError, InputError, InvalidWitnessError
from game_builders import AdamNode, EveNode, TokenGame, build_g1_two, build_sim_game
from parity import certify_strategy, solve_parity3

logger = logging.getLogger(__name__)

FREE = "free"
DONE = "done"


@dataclass(frozen=True)
class ComposedNode:
    node: int
    memory: Hashable


@dataclass
class ComposedStrategy:
    game: TokenGame
    arena: Arena
    strategy: Strategy
    certified: bool


def _edge_by_label(arena: Arena, node: int, label) -> int | None:
    for e in arena.out_edges(node):
        if arena.edges[e].label == label:
            return e
    return None


class _Composer:
    def __init__(
        self,
        sim: TokenGame,
        sim_strategy: Strategy,
        ghost: TokenGame,
        ghost_strategy: Strategy,
        target: TokenGame,
        node_limit: int | None,
    ):
        self.sim = sim
        self.sim_choices = sim_strategy.choices
        self.ghost = ghost
        self.ghost_choices = ghost_strategy.choices
        self.target = target
        self.builder = ArenaBuilder(node_limit)
        self.choices: dict[int, int] = {}

    def _node(self, node: int, memory) -> int:
        g = self.target.arena
        if g.is_terminal(node):
            memory = None
        return self.builder.node(ComposedNode(node, memory), g.owners[node], g.priorities[node], g.winners[node])

    def build(self) -> tuple[Arena, Strategy]:
        arena = self.builder.arena
        arena.initial = self._node(self.target.arena.initial, (self.ghost.arena.initial, self.sim.arena.initial))
        for v in self.builder.pending():
            self._expand(v, arena.payloads[v])
        self.builder.finish()
        return arena, Strategy(Player.EVE, self.choices)

    def _expand(self, v: int, p: ComposedNode) -> None:
        g = self.target.arena
        arena = self.builder.arena
        edges = g.out_edges(p.node)
        if p.memory == FREE:
            for e in edges:
                arena.add_edge(v, self._node(g.edges[e].dst, FREE), g.edges[e].label)
            if g.owners[p.node] is Player.EVE:
                self.choices[v] = arena.out_edges(v)[0]
            return
        payload = g.payloads[p.node]
        if isinstance(payload, EveNode):
            chosen, memory = self._eve_answer(payload.letter, *p.memory)
            for e in edges:
                label = g.edges[e].label
                keep = chosen is not None and label == ("eve", chosen)
                new = arena.add_edge(v, self._node(g.edges[e].dst, memory if keep else FREE), label)
                if keep:
                    self.choices[v] = new
            if v not in self.choices:
                self.choices[v] = arena.out_edges(v)[0]
        elif isinstance(payload, AdamNode):
            ghost_node, sim_node = p.memory
            for e in edges:
                label = g.edges[e].label
                arena.add_edge(v, self._node(g.edges[e].dst, (self._ghost_step(ghost_node, label), sim_node)), label)
        else:
            for e in edges:
                arena.add_edge(v, self._node(g.edges[e].dst, p.memory), g.edges[e].label)

    def _ghost_step(self, ghost_node, label):
        if ghost_node == DONE:
            return DONE
        edge = _edge_by_label(self.ghost.arena, ghost_node, label)
        if edge is None:
            raise InconsistencyError("Adam move missing in the ghost game", {"label": repr(label)})
        dst = self.ghost.arena.edges[edge].dst
        return FREE if self.ghost.arena.is_terminal(dst) else dst

    def _eve_answer(self, letter: str, ghost_node, sim_node) -> tuple[int | None, Hashable]:
        """Eve's transition in `a` plus the memory for the node her move reaches."""
        if ghost_node == FREE:
            return None, FREE
        ghost_arena, sim_arena = self.ghost.arena, self.sim.arena
        if ghost_node == DONE:
            next_ghost, sim_label = DONE, ("sim", letter, None)
        else:
            ghost_eve = ghost_arena.edges[_edge_by_label(ghost_arena, ghost_node, ("letter", letter))].dst
            if ghost_arena.is_terminal(ghost_eve):
                return None, FREE
            if ghost_eve not in self.ghost_choices:
                raise InvalidWitnessError("Ghost strategy has no move at a reachable node")
            move = ghost_arena.edges[self.ghost_choices[ghost_eve]]
            berta = move.label[1]
            if ghost_arena.is_terminal(move.dst):
                next_ghost = DONE if ghost_arena.payloads[move.dst].reason == "eve_reached" else FREE
            else:
                next_ghost = move.dst
            sim_label = ("sim", letter, berta)
        sim_edge = _edge_by_label(sim_arena, sim_node, sim_label)
        if sim_edge is None:
            raise InconsistencyError("Simulation game lacks the imagined move", {"label": repr(sim_label)})
        sim_eve = sim_arena.edges[sim_edge].dst
        if sim_arena.is_terminal(sim_eve) or next_ghost == FREE:
            return None, FREE
        if sim_eve not in self.sim_choices:
            raise InvalidWitnessError("Simulation strategy has no move at a reachable node")
        answer = sim_arena.edges[self.sim_choices[sim_eve]]
        memory = FREE if sim_arena.is_terminal(answer.dst) else (next_ghost, answer.dst)
        return answer.label[1], memory


def compose_sim_and_ghost(
    sim: TokenGame,
    sim_strategy: Strategy,
    ghost: TokenGame,
    ghost_strategy: Strategy,
    node_limit: int | None = None,
) -> ComposedStrategy:
    """Compose a Sim(a, a') strategy with a G1(a', a) strategy into a G1(a, a) strategy.

    Both inputs are certified first; a failing input raises InvalidWitnessError.
    """
    a, a_prime = sim.eve, sim.adam
    if ghost.eve != a_prime or ghost.adam != a:
        raise InputError("Ghost game must be G1(a', a) for the simulation game Sim(a, a')")
    if not certify_strategy(sim.arena, sim_strategy):
        raise InvalidWitnessError("Simulation strategy does not win Sim(a, a')", {"automaton": a.name})
    if not certify_strategy(ghost.arena, ghost_strategy):
        raise InvalidWitnessError("Ghost strategy does not win G1(a', a)", {"automaton": a_prime.name})
    target = build_g1_two(a, a, node_limit)
    arena, strategy = _Composer(sim, sim_strategy, ghost, ghost_strategy, target, node_limit).build()
    certified = certify_strategy(arena, strategy)
    if not certified:
        logger.error(f"Composed strategy for {a.name or 'automaton'} is not winning")
        raise InconsistencyError("Composition of winning strategies lost G1(a, a)", {"automaton": a.name})
    logger.info(f"Composed strategy certified on {arena.num_nodes} nodes")
    return ComposedStrategy(target, arena, strategy, certified)


def compose_from_solver(
    a: Automaton, a_prime: Automaton, ghost_strategy: Strategy | None = None, node_limit: int | None = None
) -> ComposedStrategy:
    """Solve Sim(a, a') (and G1(a', a) when no ghost strategy is given), then compose."""
    sim = build_sim_game(a, a_prime, node_limit)
    ghost = build_g1_two(a_prime, a, node_limit)
    sim_strategy = solve_parity3(sim.arena).strategies[Player.EVE]
    if ghost_strategy is None:
        ghost_strategy = solve_parity3(ghost.arena).strategies[Player.EVE]
    return compose_sim_and_ghost(sim, sim_strategy, ghost, ghost_strategy, node_limit)
