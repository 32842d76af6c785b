"""Exact solvers for reachability and 3-priority parity games (max-even)."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable

import networkx as nx

from arena import Arena, GameResult, Player, Strategy, attractor, restrict_to_strategy
from errors import StrategyError

logger = logging.getLogger(__name__)


def solve_reachability(arena: Arena, targets: Iterable[int]) -> GameResult:
    """Eve wins exactly the attractor of `targets`; Adam keeps the play outside it elsewhere."""
    nodes = set(range(arena.num_nodes))
    preds = arena.predecessors()
    eve_region, eve_choices = attractor(arena, nodes, targets, Player.EVE, preds)
    adam_choices = {}
    for v in nodes - eve_region:
        if arena.owners[v] is not Player.ADAM or arena.is_terminal(v):
            continue
        for e in arena.out_edges(v):
            if arena.edges[e].dst not in eve_region:
                adam_choices[v] = e
                break
    winners = [Player.EVE if v in eve_region else Player.ADAM for v in range(arena.num_nodes)]
    strategies = {Player.EVE: Strategy(Player.EVE, eve_choices), Player.ADAM: Strategy(Player.ADAM, adam_choices)}
    return GameResult(winners, strategies)


def _priority(arena: Arena, v: int) -> int:
    winner = arena.winners[v]
    if winner is None:
        return arena.priorities[v]
    return 2 if winner is Player.EVE else 1


def _first_edge_inside(arena: Arena, v: int, nodes: set[int]) -> int | None:
    for e in arena.out_edges(v):
        if arena.edges[e].dst in nodes:
            return e
    return None


def _zielonka(
    arena: Arena, nodes: set[int], preds: list[list[int]]
) -> tuple[dict[Player, set[int]], dict[Player, dict[int, int]]]:
    regions = {Player.EVE: set(), Player.ADAM: set()}
    choices: dict[Player, dict[int, int]] = {Player.EVE: {}, Player.ADAM: {}}
    nodes = set(nodes)
    while nodes:
        top = max(_priority(arena, v) for v in nodes)
        player = Player.EVE if top % 2 == 0 else Player.ADAM
        opponent = player.opponent
        tops = {v for v in nodes if _priority(arena, v) == top}
        attracted, attract_choices = attractor(arena, nodes, tops, player, preds)
        sub_regions, sub_choices = _zielonka(arena, nodes - attracted, preds)
        if not sub_regions[opponent]:
            regions[player] |= nodes
            choices[player].update(sub_choices[player])
            choices[player].update(attract_choices)
            for v in tops:
                if arena.owners[v] is player and not arena.is_terminal(v):
                    edge = _first_edge_inside(arena, v, nodes)
                    if edge is not None:
                        choices[player][v] = edge
            return regions, choices
        escaped, escape_choices = attractor(arena, nodes, sub_regions[opponent], opponent, preds)
        regions[opponent] |= escaped
        choices[opponent].update({v: e for v, e in sub_choices[opponent].items() if v in sub_regions[opponent]})
        choices[opponent].update(escape_choices)
        nodes -= escaped
    return regions, choices


def solve_parity3(arena: Arena) -> GameResult:
    """Zielonka's recursion for priorities {0, 1, 2}; terminals act as self-loops won by their winner."""
    preds = arena.predecessors()
    regions, choices = _zielonka(arena, set(range(arena.num_nodes)), preds)
    winners = [Player.EVE if v in regions[Player.EVE] else Player.ADAM for v in range(arena.num_nodes)]
    strategies = {
        player: Strategy(player, {v: e for v, e in choices[player].items() if v in regions[player]})
        for player in Player
    }
    logger.debug(
        f"Solved arena with {arena.num_nodes} nodes: Eve wins {len(regions[Player.EVE])}, "
        f"initial won by {winners[arena.initial].value if winners else 'nobody'}"
    )
    return GameResult(winners, strategies)


# ---- oracles ----


def _adam_wins_one_player(arena: Arena, eve_choice: dict[int, int]) -> set[int]:
    """Nodes from which Adam wins once Eve's positional choices are fixed."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(arena.num_nodes))
    for v in range(arena.num_nodes):
        if arena.is_terminal(v):
            continue
        if arena.owners[v] is Player.EVE:
            graph.add_edge(v, arena.edges[eve_choice[v]].dst)
        else:
            graph.add_edges_from((v, dst) for dst in arena.successors(v))
    low = graph.subgraph([v for v in graph if _priority(arena, v) <= 1 and not arena.is_terminal(v)])
    seeds = {v for v in range(arena.num_nodes) if arena.winners[v] is Player.ADAM}
    for component in nx.strongly_connected_components(low):
        has_cycle = len(component) > 1 or any(low.has_edge(v, v) for v in component)
        if has_cycle and any(_priority(arena, v) == 1 for v in component):
            seeds |= component
    result = set(seeds)
    for v in seeds:
        result |= nx.ancestors(graph, v)
    return result


def brute_force_winner(arena: Arena) -> list[Player]:
    """Winner per node by enumerating Eve's positional strategies (valid by positional determinacy)."""
    eve_nodes = [v for v in arena.nodes_of(Player.EVE) if not arena.is_terminal(v)]
    options = [arena.out_edges(v) for v in eve_nodes]
    eve_wins: set[int] = set()
    for combo in itertools.product(*options):
        adam_wins = _adam_wins_one_player(arena, dict(zip(eve_nodes, combo)))
        eve_wins |= set(range(arena.num_nodes)) - adam_wins
    return [Player.EVE if v in eve_wins else Player.ADAM for v in range(arena.num_nodes)]


def certify_strategy(arena: Arena, strategy: Strategy, owner: Player = Player.EVE) -> bool:
    """True iff fixing `strategy` leaves the opponent no win from the initial node."""
    try:
        residual = restrict_to_strategy(arena, strategy, owner)
    except StrategyError as e:
        logger.debug(f"Strategy incomplete: {e}")
        return False
    return solve_parity3(residual).winner_at(arena.initial) is owner
