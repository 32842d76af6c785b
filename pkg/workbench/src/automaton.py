from __future__ import annotations

import logging
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import networkx as nx

from errors import AlphabetMismatchError, InputError, UnsupportedAcceptanceError

logger = logging.getLogger(__name__)


class Acceptance(str, Enum):
    """Acceptance modes. Marks sit on transitions.

    SAFETY: infinite run that never takes a mark (marks are unsafe transitions).
    REACHABILITY: some mark is taken; the run may die afterwards.
    BUCHI: infinitely many marks.
    COBUCHI: finitely many marks.
    """

    SAFETY = "safety"
    REACHABILITY = "reachability"
    BUCHI = "buchi"
    COBUCHI = "cobuchi"


@dataclass(frozen=True)
class Transition:
    src: int
    letter: str
    dst: int
    mark: bool = False


@dataclass(frozen=True)
class Automaton:
    """Finite automaton over infinite words with marked transitions.

    `state_labels` is an optional trace-back payload per state (pairs, subsets, delayed states...).
    """

    alphabet: tuple[str, ...]
    num_states: int
    initial: int
    transitions: tuple[Transition, ...]
    acceptance: Acceptance
    name: str = ""
    state_labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.alphabet:
            raise InputError("Alphabet must be non-empty")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InputError(f"Alphabet has duplicate symbols: {list(self.alphabet)}")
        if self.num_states < 1:
            raise InputError("Automaton needs at least one state")
        if not 0 <= self.initial < self.num_states:
            raise InputError(f"Initial state {self.initial} out of range")
        letters = set(self.alphabet)
        for t in self.transitions:
            if not (0 <= t.src < self.num_states and 0 <= t.dst < self.num_states):
                raise InputError(f"Transition {t} references an unknown state")
            if t.letter not in letters:
                raise InputError(f"Transition {t} uses letter outside the alphabet")
        if self.state_labels is not None and len(self.state_labels) != self.num_states:
            raise InputError("state_labels must have one entry per state")

    # ---- indexes ----

    @cached_property
    def _out(self) -> dict[tuple[int, str], tuple[int, ...]]:
        index: dict[tuple[int, str], list[int]] = {}
        for i, t in enumerate(self.transitions):
            index.setdefault((t.src, t.letter), []).append(i)
        return {key: tuple(value) for key, value in index.items()}

    def out(self, state: int, letter: str) -> tuple[int, ...]:
        """Indices of the transitions leaving `state` on `letter`, in declaration order."""
        return self._out.get((state, letter), ())

    def out_all(self, state: int) -> list[int]:
        return [i for letter in self.alphabet for i in self.out(state, letter)]

    def label(self, state: int):
        return self.state_labels[state] if self.state_labels is not None else state

    @cached_property
    def is_deterministic(self) -> bool:
        return all(len(idx) <= 1 for idx in self._out.values())

    @cached_property
    def is_complete(self) -> bool:
        return all(self.out(q, s) for q in range(self.num_states) for s in self.alphabet)

    def to_graph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(range(self.num_states))
        for i, t in enumerate(self.transitions):
            graph.add_edge(t.src, t.dst, key=i, letter=t.letter, mark=t.mark)
        return graph

    @cached_property
    def live_states(self) -> frozenset[int]:
        """States with a non-empty residual language under this automaton's acceptance mode."""
        return frozenset(_live_states(self.num_states, self.transitions, self.acceptance))

    def check_word(self, letters: Iterable[str]) -> None:
        known = set(self.alphabet)
        for letter in letters:
            if letter not in known:
                raise InputError(f"Letter {letter!r} is outside the alphabet {list(self.alphabet)}")

    def with_name(self, name: str) -> Automaton:
        return Automaton(
            self.alphabet, self.num_states, self.initial, self.transitions, self.acceptance, name, self.state_labels
        )


def _edge_letters(letters: str | Sequence[str], alphabet: Sequence[str]) -> Sequence[str]:
    if isinstance(letters, str):
        return [letters] if letters in alphabet else list(letters)
    return letters


def build_automaton(
    alphabet: Sequence[str],
    num_states: int,
    edges: Iterable[tuple[int, str | Sequence[str], int]],
    acceptance: Acceptance,
    *,
    initial: int = 0,
    accepting_states: Iterable[int] = (),
    marked_edges: Iterable[tuple[int, str, int]] = (),
    name: str = "",
) -> Automaton:
    """Build an automaton from (src, letters, dst) triples.

    `letters` is one letter of the alphabet, or a string or sequence of letters ("ab" for a and b).
    State-based acceptance is encoded by marking every transition leaving an accepting state.
    """
    alphabet = tuple(alphabet)
    accepting = set(accepting_states)
    marked = set(marked_edges)
    transitions = []
    for src, letters, dst in edges:
        for letter in _edge_letters(letters, alphabet):
            mark = src in accepting or (src, letter, dst) in marked
            transitions.append(Transition(src, letter, dst, mark))
    return Automaton(alphabet, num_states, initial, tuple(transitions), acceptance, name)


def _nontrivial_sccs(graph: nx.DiGraph) -> list[set]:
    result = []
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            result.append(component)
        else:
            (node,) = component
            if graph.has_edge(node, node):
                result.append(component)
    return result


def _live_states(num_states: int, transitions: Sequence[Transition], acceptance: Acceptance) -> set[int]:
    full = nx.DiGraph()
    full.add_nodes_from(range(num_states))
    unmarked = nx.DiGraph()
    unmarked.add_nodes_from(range(num_states))
    for t in transitions:
        full.add_edge(t.src, t.dst)
        if not t.mark:
            unmarked.add_edge(t.src, t.dst)

    if acceptance is Acceptance.REACHABILITY:
        seeds = {t.src for t in transitions if t.mark}
        return _backward_closure(full, seeds)

    if acceptance is Acceptance.BUCHI:
        component_of = {}
        for n, component in enumerate(nx.strongly_connected_components(full)):
            for node in component:
                component_of[node] = n
        seeds = {t.src for t in transitions if t.mark and component_of[t.src] == component_of[t.dst]}
        return _backward_closure(full, seeds)

    seeds = set()
    for component in _nontrivial_sccs(unmarked):
        seeds |= component
    if acceptance is Acceptance.COBUCHI:
        return _backward_closure(full, seeds)
    return _backward_closure(unmarked, seeds)


def _backward_closure(graph: nx.DiGraph, seeds: set) -> set:
    result = set(seeds)
    queue = deque(seeds)
    while queue:
        node = queue.popleft()
        for pred in graph.predecessors(node):
            if pred not in result:
                result.add(pred)
                queue.append(pred)
    return result


# ---- transformations ----


def reachable(a: Automaton) -> Automaton:
    """Restrict to states reachable from the initial state, renumbered in BFS order."""
    order = [a.initial]
    seen = {a.initial: 0}
    queue = deque([a.initial])
    while queue:
        q = queue.popleft()
        for i in a.out_all(q):
            dst = a.transitions[i].dst
            if dst not in seen:
                seen[dst] = len(order)
                order.append(dst)
                queue.append(dst)
    transitions = tuple(
        Transition(seen[t.src], t.letter, seen[t.dst], t.mark) for t in a.transitions if t.src in seen
    )
    labels = tuple(a.label(q) for q in order)
    return Automaton(a.alphabet, len(order), 0, transitions, a.acceptance, a.name, labels)


def totalize(a: Automaton) -> Automaton:
    """Add a rejecting sink so every state has a transition on every letter.

    Under SAFETY the edges into the sink are marked; under COBUCHI the sink loops are marked.
    The sink is the last state and is labelled "sink".
    """
    if a.is_complete:
        return a
    sink = a.num_states
    into_sink_marked = a.acceptance is Acceptance.SAFETY
    loop_marked = a.acceptance in (Acceptance.SAFETY, Acceptance.COBUCHI)
    extra = [
        Transition(q, letter, sink, into_sink_marked)
        for q in range(a.num_states)
        for letter in a.alphabet
        if not a.out(q, letter)
    ]
    extra += [Transition(sink, letter, sink, loop_marked) for letter in a.alphabet]
    labels = tuple(a.label(q) for q in range(a.num_states)) + ("sink",)
    return Automaton(
        a.alphabet, a.num_states + 1, a.initial, a.transitions + tuple(extra), a.acceptance, a.name, labels
    )


@dataclass(frozen=True)
class PairTransition:
    src: int
    letter: str
    dst: int
    mark_a: bool
    mark_b: bool


@dataclass(frozen=True)
class ProductAutomaton:
    """Synchronous product; marks of each factor are kept apart."""

    alphabet: tuple[str, ...]
    pairs: tuple[tuple[int, int], ...]
    transitions: tuple[PairTransition, ...]
    initial: int = 0

    @property
    def num_states(self) -> int:
        return len(self.pairs)

    def has_doubly_marked_cycle(self) -> bool:
        """True iff some reachable cycle carries a mark of each factor (Büchi/Büchi intersection non-empty)."""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.num_states))
        for t in self.transitions:
            graph.add_edge(t.src, t.dst)
        component_of = {}
        for n, component in enumerate(nx.strongly_connected_components(graph)):
            for node in component:
                component_of[node] = n
        kinds: dict[int, set[str]] = {}
        for t in self.transitions:
            if component_of[t.src] == component_of[t.dst]:
                seen = kinds.setdefault(component_of[t.src], set())
                if t.mark_a:
                    seen.add("a")
                if t.mark_b:
                    seen.add("b")
        return any(seen == {"a", "b"} for seen in kinds.values())


def product(a: Automaton, b: Automaton) -> ProductAutomaton:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatchError(a.alphabet, b.alphabet)
    start = (a.initial, b.initial)
    index = {start: 0}
    pairs = [start]
    transitions = []
    queue = deque([start])
    while queue:
        p, q = queue.popleft()
        src = index[(p, q)]
        for letter in a.alphabet:
            for i in a.out(p, letter):
                ta = a.transitions[i]
                for j in b.out(q, letter):
                    tb = b.transitions[j]
                    target = (ta.dst, tb.dst)
                    if target not in index:
                        index[target] = len(pairs)
                        pairs.append(target)
                        queue.append(target)
                    transitions.append(PairTransition(src, letter, index[target], ta.mark, tb.mark))
    return ProductAutomaton(a.alphabet, tuple(pairs), tuple(transitions))


def subset_determinize(a: Automaton) -> Automaton:
    """Subset construction for SAFETY and REACHABILITY automata.

    REACHABILITY: a subset transition is marked iff some member transition is marked.
    SAFETY: the target keeps only the safe successors when there are any; otherwise the
    transition is marked and leads to the set of all successors.
    """
    if a.acceptance not in (Acceptance.SAFETY, Acceptance.REACHABILITY):
        raise UnsupportedAcceptanceError(
            f"Subset construction needs safety or reachability, got {a.acceptance.value}"
        )
    start = frozenset({a.initial})
    index = {start: 0}
    subsets = [start]
    transitions = []
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for letter in a.alphabet:
            members = [a.transitions[i] for q in sorted(current) for i in a.out(q, letter)]
            if not members:
                continue
            if a.acceptance is Acceptance.REACHABILITY:
                target = frozenset(t.dst for t in members)
                mark = any(t.mark for t in members)
            else:
                safe = frozenset(t.dst for t in members if not t.mark)
                mark = not safe
                target = safe or frozenset(t.dst for t in members)
            if target not in index:
                index[target] = len(subsets)
                subsets.append(target)
                queue.append(target)
            transitions.append(Transition(index[current], letter, index[target], mark))
    labels = tuple(tuple(sorted(s)) for s in subsets)
    logger.debug(f"Subset construction: {a.num_states} states -> {len(subsets)} subsets")
    return Automaton(a.alphabet, len(subsets), 0, tuple(transitions), a.acceptance, f"det({a.name})", labels)


# ---- structure ----


@dataclass(frozen=True)
class Mscc:
    states: frozenset[int]
    accepting: bool
    trivial: bool


def msccs(a: Automaton) -> list[Mscc]:
    """Maximal SCCs in topological order; accepting iff a marked transition lies inside."""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(a.num_states))
    graph.add_edges_from((t.src, t.dst) for t in a.transitions)
    condensed = nx.condensation(graph)
    mapping = condensed.graph["mapping"]
    internal: dict[int, bool] = {}
    for t in a.transitions:
        c = mapping[t.src]
        if c == mapping[t.dst]:
            internal[c] = internal.get(c, False) or t.mark
    result = []
    for node in nx.lexicographical_topological_sort(condensed, key=lambda n: min(condensed.nodes[n]["members"])):
        members = frozenset(condensed.nodes[node]["members"])
        result.append(Mscc(members, internal.get(node, False), node not in internal))
    return result


def is_linear(a: Automaton) -> bool:
    """True iff every cycle is a self-loop."""
    return all(len(component.states) == 1 for component in msccs(a))
