"""Ultimately periodic words, membership and sampling."""

from __future__ import annotations

import logging
import random
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import networkx as nx

from automaton import Acceptance, Automaton, ProductAutomaton
from errors import InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Lasso:
    """The word prefix · cycle^ω. Strings are split into one-character letters."""

    prefix: tuple[str, ...]
    cycle: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", _letters(self.prefix))
        object.__setattr__(self, "cycle", _letters(self.cycle))
        if not self.cycle:
            raise InputError("Lasso cycle must be non-empty")

    @property
    def letters(self) -> tuple[str, ...]:
        return self.prefix + self.cycle

    def unrolled(self) -> Lasso:
        """The same word written as (prefix·cycle)·(cycle·cycle)^ω."""
        return Lasso(self.prefix + self.cycle, self.cycle + self.cycle)

    def take(self, n: int) -> tuple[str, ...]:
        word = list(self.prefix)
        while len(word) < n:
            word.extend(self.cycle)
        return tuple(word[:n])

    def __str__(self) -> str:
        return f"{''.join(self.prefix)}({''.join(self.cycle)})^w"


def _letters(value: str | Iterable[str]) -> tuple[str, ...]:
    if isinstance(value, str):
        return tuple(value)
    return tuple(value)


# ---- membership ----

Edge = tuple[tuple[int, int], tuple[int, int], frozenset]


def _lasso_edges(
    lasso: Lasso, initial: int, step: Callable[[int, str], Iterable[tuple[int, frozenset]]]
) -> tuple[tuple[int, int], list[Edge]]:
    """Explore the product of the lasso (a deterministic loop) with a transition function.

    `step(state, letter)` yields (target, marks) pairs. Nodes are (position, state).
    """
    letters = lasso.letters
    loop_start = len(lasso.prefix)
    start = (0, initial)
    seen = {start}
    stack = [start]
    edges: list[Edge] = []
    while stack:
        pos, state = stack.pop()
        nxt = pos + 1 if pos + 1 < len(letters) else loop_start
        for target, marks in step(state, letters[pos]):
            node = (nxt, target)
            edges.append(((pos, state), node, marks))
            if node not in seen:
                seen.add(node)
                stack.append(node)
    return start, edges


def _has_cycle_with(edges: Sequence[Edge], required: Iterable[str], allowed: Callable[[frozenset], bool]) -> bool:
    """Is there a cycle using only `allowed` edges that carries every mark kind in `required`?"""
    graph = nx.DiGraph()
    for src, dst, marks in edges:
        if allowed(marks):
            graph.add_edge(src, dst)
    component_of = {}
    for n, component in enumerate(nx.strongly_connected_components(graph)):
        for node in component:
            component_of[node] = n
    seen: dict[int, set] = {}
    for src, dst, marks in edges:
        if allowed(marks) and component_of[src] == component_of[dst]:
            seen.setdefault(component_of[src], set()).update(marks)
    required = set(required)
    return any(required <= kinds for kinds in seen.values())


def _accepts(start, edges: Sequence[Edge], acceptance: Acceptance) -> bool:
    if acceptance is Acceptance.REACHABILITY:
        return any("m" in marks for _, _, marks in edges)
    if acceptance is Acceptance.BUCHI:
        return _has_cycle_with(edges, ["m"], lambda marks: True)
    if acceptance is Acceptance.COBUCHI:
        return _has_cycle_with(edges, [], lambda marks: "m" not in marks)
    # SAFETY: the unmarked part reachable from the start must contain a cycle.
    clean = [e for e in edges if "m" not in e[2]]
    graph = nx.DiGraph()
    graph.add_node(start)
    graph.add_edges_from((src, dst) for src, dst, _ in clean)
    reach = nx.descendants(graph, start) | {start}
    return _has_cycle_with([e for e in clean if e[0] in reach], [], lambda marks: True)


_MARKED = frozenset({"m"})
_CLEAN = frozenset()


def lasso_membership(a: Automaton, lasso: Lasso) -> bool:
    """Decide whether prefix·cycle^ω is accepted by `a`."""
    a.check_word(lasso.letters)

    def step(state: int, letter: str):
        for i in a.out(state, letter):
            t = a.transitions[i]
            yield t.dst, _MARKED if t.mark else _CLEAN

    start, edges = _lasso_edges(lasso, a.initial, step)
    return _accepts(start, edges, a.acceptance)


def product_accepts_both(p: ProductAutomaton, lasso: Lasso) -> bool:
    """Büchi/Büchi reading of a product: some run visits marks of both factors infinitely often."""
    out: dict[tuple[int, str], list] = {}
    for t in p.transitions:
        marks = frozenset(k for k, on in (("a", t.mark_a), ("b", t.mark_b)) if on)
        out.setdefault((t.src, t.letter), []).append((t.dst, marks))

    _, edges = _lasso_edges(lasso, p.initial, lambda state, letter: out.get((state, letter), ()))
    return _has_cycle_with(edges, ["a", "b"], lambda marks: True)


def run_accepts(a: Automaton, prefix: Sequence[int], cycle: Sequence[int]) -> bool:
    """Acceptance of one explicit lasso-shaped run given as transition indices."""
    prefix_marks = [a.transitions[i].mark for i in prefix]
    cycle_marks = [a.transitions[i].mark for i in cycle]
    match a.acceptance:
        case Acceptance.BUCHI:
            return any(cycle_marks)
        case Acceptance.COBUCHI:
            return not any(cycle_marks)
        case Acceptance.SAFETY:
            return not any(prefix_marks) and not any(cycle_marks)
        case Acceptance.REACHABILITY:
            return any(prefix_marks) or any(cycle_marks)


# ---- finite prefixes ----


@dataclass(frozen=True)
class RunDag:
    """Per-position sets of states reachable on a finite word; level 0 is the initial state."""

    levels: tuple[frozenset[int], ...]


def run_dag(a: Automaton, word: Sequence[str]) -> RunDag:
    a.check_word(word)
    levels = [frozenset({a.initial})]
    for letter in word:
        levels.append(frozenset(a.transitions[i].dst for q in levels[-1] for i in a.out(q, letter)))
    return RunDag(tuple(levels))


# ---- sampling ----


def sample_lassos(
    alphabet: Sequence[str], count: int, max_prefix: int, max_cycle: int, seed: int
) -> list[Lasso]:
    if count < 1:
        raise InputError("count must be at least 1")
    if not alphabet:
        raise InputError("Cannot sample over an empty alphabet")
    if max_prefix < 0 or max_cycle < 1:
        raise InputError("max_prefix must be >= 0 and max_cycle >= 1")
    rng = random.Random(seed)
    letters = list(alphabet)
    result = []
    for _ in range(count):
        prefix = [rng.choice(letters) for _ in range(rng.randint(0, max_prefix))]
        cycle = [rng.choice(letters) for _ in range(rng.randint(1, max_cycle))]
        result.append(Lasso(tuple(prefix), tuple(cycle)))
    return result


def sample_accepted_lassos(a: Automaton, count: int, seed: int, max_steps: int = 64) -> list[Lasso]:
    """Random lassos read off accepting lasso-shaped runs of `a`.

    Walks stay inside live states and close the lasso at the first repeated state.
    Walks whose run does not accept are discarded; the result may hold fewer than `count` lassos.
    """
    rng = random.Random(seed)
    live = a.live_states
    result = []
    if a.initial not in live:
        return result
    attempts = 0
    while len(result) < count and attempts < count * 20:
        attempts += 1
        state = a.initial
        visited = {state: 0}
        path: list[int] = []
        for _ in range(max_steps):
            options = [i for i in a.out_all(state) if a.transitions[i].dst in live]
            if not options:
                break
            choice = rng.choice(options)
            path.append(choice)
            state = a.transitions[choice].dst
            if state in visited:
                start = visited[state]
                prefix, cycle = path[:start], path[start:]
                if run_accepts(a, prefix, cycle):
                    result.append(
                        Lasso(
                            tuple(a.transitions[i].letter for i in prefix),
                            tuple(a.transitions[i].letter for i in cycle),
                        )
                    )
                break
            visited[state] = len(path)
    logger.debug(f"Sampled {len(result)} accepted lassos in {attempts} walks")
    return result
