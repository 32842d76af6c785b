from __future__ import annotations

import logging
from collections import deque
from collections.abc import Hashable, Iterable
from dataclasses import dataclass, field
from enum import Enum

from errors import ArenaLimitError, InputError, StrategyError

logger = logging.getLogger(__name__)

PRIORITIES = (0, 1, 2)


class Player(str, Enum):
    EVE = "eve"
    ADAM = "adam"

    @property
    def opponent(self) -> Player:
        return Player.ADAM if self is Player.EVE else Player.EVE


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    label: Hashable = None


@dataclass
class Arena:
    """Turn-based game graph with priorities in {0, 1, 2} (max-even).

    Nodes without out-edges must be terminals with a declared winner.
    """

    owners: list[Player] = field(default_factory=list)
    priorities: list[int] = field(default_factory=list)
    payloads: list = field(default_factory=list)
    winners: list[Player | None] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)
    initial: int = 0
    _out: list[list[int]] = field(default_factory=list, repr=False)
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def num_nodes(self) -> int:
        return len(self.owners)

    def add_node(self, owner: Player, priority: int = 0, payload=None, winner: Player | None = None) -> int:
        if priority not in PRIORITIES:
            raise InputError(f"Priority {priority} outside {PRIORITIES}")
        node = len(self.owners)
        self.owners.append(owner)
        self.priorities.append(priority)
        self.payloads.append(payload)
        self.winners.append(winner)
        self._out.append([])
        if payload is not None:
            self._index[payload] = node
        return node

    def find(self, payload) -> int | None:
        return self._index.get(payload)

    def add_edge(self, src: int, dst: int, label: Hashable = None) -> int:
        if self.winners[src] is not None:
            raise InputError(f"Terminal node {src} cannot have out-edges")
        self.edges.append(Edge(src, dst, label))
        self._out[src].append(len(self.edges) - 1)
        return len(self.edges) - 1

    def out_edges(self, node: int) -> list[int]:
        return self._out[node]

    def successors(self, node: int) -> list[int]:
        return [self.edges[e].dst for e in self._out[node]]

    def is_terminal(self, node: int) -> bool:
        return self.winners[node] is not None

    def nodes_of(self, player: Player) -> list[int]:
        return [v for v, owner in enumerate(self.owners) if owner is player]

    def predecessors(self) -> list[list[int]]:
        """Edge indices entering each node."""
        preds: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for i, e in enumerate(self.edges):
            preds[e.dst].append(i)
        return preds

    def validate(self) -> None:
        for v in range(self.num_nodes):
            if self.winners[v] is None and not self._out[v]:
                raise InputError(f"Node {v} has no out-edge and no declared winner")
        if not 0 <= self.initial < max(self.num_nodes, 1):
            raise InputError(f"Initial node {self.initial} out of range")


class ArenaBuilder:
    """Explores an arena from an initial payload; payloads identify nodes."""

    def __init__(self, node_limit: int | None = None):
        self.arena = Arena()
        self.node_limit = node_limit
        self._queue: deque[int] = deque()

    def node(self, payload, owner: Player, priority: int = 0, winner: Player | None = None) -> int:
        existing = self.arena.find(payload)
        if existing is not None:
            return existing
        if self.node_limit is not None and self.arena.num_nodes >= self.node_limit:
            raise ArenaLimitError(self.node_limit)
        node = self.arena.add_node(owner, priority, payload, winner)
        if winner is None:
            self._queue.append(node)
        return node

    def pending(self):
        while self._queue:
            yield self._queue.popleft()

    def finish(self) -> Arena:
        self.arena.validate()
        logger.debug(f"Arena built: {self.arena.num_nodes} nodes, {len(self.arena.edges)} edges")
        return self.arena


@dataclass
class Strategy:
    """Positional strategy: owned node -> chosen edge index."""

    owner: Player
    choices: dict[int, int] = field(default_factory=dict)

    def move(self, arena: Arena, node: int) -> int | None:
        edge = self.choices.get(node)
        return None if edge is None else arena.edges[edge].dst


@dataclass
class GameResult:
    winners: list[Player]
    strategies: dict[Player, Strategy]

    def region(self, player: Player) -> frozenset[int]:
        return frozenset(v for v, w in enumerate(self.winners) if w is player)

    def winner_at(self, node: int) -> Player:
        return self.winners[node]


def attractor(
    arena: Arena,
    nodes: set[int],
    target: Iterable[int],
    player: Player,
    preds: list[list[int]],
) -> tuple[set[int], dict[int, int]]:
    """Attractor of `target` for `player` inside the subgame `nodes`.

    Terminals behave as self-loops. The returned strategy picks, for each of `player`'s
    attracted nodes, the lowest-index edge to a node attracted strictly earlier.
    """
    rank: dict[int, int] = {}
    queue = deque()
    for v in target:
        if v in nodes and v not in rank:
            rank[v] = 0
            queue.append(v)
    counters: dict[int, int] = {}
    while queue:
        v = queue.popleft()
        for e in preds[v]:
            u = arena.edges[e].src
            if u not in nodes or u in rank:
                continue
            if arena.owners[u] is player:
                rank[u] = rank[v] + 1
                queue.append(u)
            else:
                if u not in counters:
                    counters[u] = sum(1 for f in arena.out_edges(u) if arena.edges[f].dst in nodes)
                counters[u] -= 1
                if counters[u] == 0:
                    rank[u] = rank[v] + 1
                    queue.append(u)
    strategy = {}
    for v, r in rank.items():
        if r == 0 or arena.owners[v] is not player:
            continue
        for e in arena.out_edges(v):
            dst = arena.edges[e].dst
            if dst in rank and rank[dst] < r:
                strategy[v] = e
                break
    return set(rank), strategy


def restrict_to_strategy(arena: Arena, strategy: Strategy, owner: Player) -> Arena:
    """Copy of the arena in which `owner`'s nodes keep only their chosen edge.

    Raises StrategyError when an owner's node reachable under the strategy has no choice.
    """
    restricted = Arena(initial=arena.initial)
    for v in range(arena.num_nodes):
        restricted.owners.append(arena.owners[v])
        restricted.priorities.append(arena.priorities[v])
        restricted.payloads.append(arena.payloads[v])
        restricted.winners.append(arena.winners[v])
        restricted._out.append([])
    reached = {arena.initial}
    queue = deque([arena.initial])
    while queue:
        v = queue.popleft()
        if arena.owners[v] is owner and not arena.is_terminal(v):
            if v not in strategy.choices:
                raise StrategyError(
                    f"Strategy has no choice at reachable node {v}", {"payload": repr(arena.payloads[v])}
                )
            targets = [arena.edges[strategy.choices[v]].dst]
        else:
            targets = arena.successors(v)
        for dst in targets:
            if dst not in reached:
                reached.add(dst)
                queue.append(dst)
    for v in range(arena.num_nodes):
        if arena.is_terminal(v):
            continue
        if arena.owners[v] is owner and v in strategy.choices:
            edge = arena.edges[strategy.choices[v]]
            restricted.add_edge(v, edge.dst, edge.label)
        else:
            for e in arena.out_edges(v):
                edge = arena.edges[e]
                restricted.add_edge(v, edge.dst, edge.label)
    return restricted


@dataclass(frozen=True)
class Play:
    """Nodes and the edges leaving them; `edges[i]` leaves `nodes[i]`. The cycle starts at `loop_start`."""

    nodes: tuple[int, ...]
    edges: tuple[int, ...]
    loop_start: int | None = None
    terminal: int | None = None

    @property
    def cycle(self) -> tuple[int, ...]:
        return () if self.loop_start is None else self.nodes[self.loop_start :]

    @property
    def cycle_edges(self) -> tuple[int, ...]:
        return () if self.loop_start is None else self.edges[self.loop_start :]


def play_lasso(arena: Arena, eve: Strategy, adam: Strategy, start: int | None = None) -> Play:
    """The unique play once both players are fixed: a lasso, or a path ending in a terminal.

    Nodes without a choice follow their lowest-index edge.
    """
    node = arena.initial if start is None else start
    path: list[int] = []
    edges: list[int] = []
    position: dict[int, int] = {}
    while True:
        if arena.is_terminal(node):
            return Play(tuple(path), tuple(edges), None, node)
        if node in position:
            return Play(tuple(path), tuple(edges), position[node])
        position[node] = len(path)
        path.append(node)
        strategy = eve if arena.owners[node] is Player.EVE else adam
        edge = strategy.choices.get(node, arena.out_edges(node)[0])
        edges.append(edge)
        node = arena.edges[edge].dst


def play_winner(arena: Arena, play: Play) -> Player:
    if play.terminal is not None:
        return arena.winners[play.terminal]
    top = max(arena.priorities[v] for v in play.cycle)
    # max-even
    return Player.EVE if top % 2 == 0 else Player.ADAM
