"""Finite control over an abstract content space: stacks, counters and Parikh vectors.

Automata here are infinite-state. They are analysed through `expand_bounded`, which cuts
the content space at a bound and sends everything beyond it to a rejecting sink.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from collections import deque
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from enum import Enum

import networkx as nx
from cachetools import LRUCache, cached
from networkx.algorithms.isomorphism import MultiDiGraphMatcher

from automaton import Acceptance, Automaton, Transition, reachable
from errors import EpsilonBudgetError, InputError, UnsupportedAcceptanceError

logger = logging.getLogger(__name__)

IDENTITY = "id"
BOTTOM = "⊥"


class Semantics(str, Enum):
    SAFETY = "safety"
    SYNC_REACH = "sync-reach"
    ASYNC_REACH = "async-reach"


# === Content spaces ===


class ContentSpace(ABC):
    """Contents plus a library of named, deterministic, partial updates.

    `apply` returns None where an update is undefined. The identity update is always "id".
    """

    kind: str

    @property
    @abstractmethod
    def initial(self) -> Hashable: ...

    @abstractmethod
    def check_update(self, name: str) -> None:
        """Raise InputError if `name` is not in the update library."""

    @abstractmethod
    def apply(self, name: str, content: Hashable) -> Hashable | None: ...

    @abstractmethod
    def accepting(self, content: Hashable) -> bool: ...

    @abstractmethod
    def within(self, content: Hashable, bound: int) -> bool: ...

    def pumps(self, old: Hashable, new: Hashable, between: Sequence[Hashable]) -> bool:
        """Does a cycle leading from `old` through `between` to `new` grow the content each time it is repeated?

        Vector contents: `new` dominates `old` componentwise and differs from it.
        """
        return new != old and all(n >= o for n, o in zip(new, old))

    def serialize(self, content: Hashable) -> str:
        return repr(content)


class StackSpace(ContentSpace):
    """Stacks ⊥Γ*, written as tuples of symbols above ⊥.

    Updates: "push:X:Y" maps γX to γXY (X may be ⊥), "pop:X" maps γX to γ, "id" is the noop.
    With `empty_accepting` the only accepting content is the empty stack; otherwise every content is.
    """

    kind = "pda"

    def __init__(self, gamma: Iterable[str], empty_accepting: bool = False):
        self.gamma = tuple(gamma)
        if not self.gamma:
            raise InputError("Stack alphabet must be non-empty")
        if BOTTOM in self.gamma:
            raise InputError(f"{BOTTOM} is reserved for the stack bottom")
        self.empty_accepting = empty_accepting

    @property
    def initial(self) -> tuple:
        return ()

    def _parse(self, name: str) -> tuple:
        parts = name.split(":")
        if name == IDENTITY:
            return (IDENTITY,)
        if parts[0] == "push" and len(parts) == 3 and parts[1] in self.gamma + (BOTTOM,) and parts[2] in self.gamma:
            return tuple(parts)
        if parts[0] == "pop" and len(parts) == 2 and parts[1] in self.gamma:
            return tuple(parts)
        raise InputError(f"Unknown stack update {name!r}")

    def check_update(self, name: str) -> None:
        self._parse(name)

    def apply(self, name: str, content: tuple) -> tuple | None:
        op = self._parse(name)
        top = content[-1] if content else BOTTOM
        match op:
            case (IDENTITY,):
                return content
            case ("push", x, y):
                return content + (y,) if top == x else None
            case ("pop", x):
                return content[:-1] if top == x else None

    def accepting(self, content: tuple) -> bool:
        return not content if self.empty_accepting else True

    def within(self, content: tuple, bound: int) -> bool:
        return len(content) <= bound

    def pumps(self, old: tuple, new: tuple, between: Sequence[tuple]) -> bool:
        """The ε-path never went below `old`, ended higher, and left the same top symbol it started from."""
        return (
            bool(old)
            and len(new) > len(old)
            and new[-1] == old[-1]
            and all(len(c) >= len(old) for c in (*between, new))
        )

    def serialize(self, content: tuple) -> str:
        return BOTTOM + "".join(content)


class CounterSpace(ContentSpace):
    """Vectors in N^d with updates v -> v + α, undefined when leaving N^d (VASS; d = 1 is a one-counter net).

    Update names are comma-separated integers, one per dimension.
    """

    kind = "counter"

    def __init__(self, dimension: int):
        if dimension < 1:
            raise InputError("Counter dimension must be at least 1")
        self.dimension = dimension

    @property
    def initial(self) -> tuple:
        return (0,) * self.dimension

    def _vector(self, name: str) -> tuple[int, ...]:
        if name == IDENTITY:
            return (0,) * self.dimension
        try:
            vector = tuple(int(x) for x in name.split(","))
        except ValueError:
            raise InputError(f"Unknown counter update {name!r}") from None
        if len(vector) != self.dimension:
            raise InputError(f"Update {name!r} has {len(vector)} entries, expected {self.dimension}")
        return vector

    def check_update(self, name: str) -> None:
        self._vector(name)

    def apply(self, name: str, content: tuple) -> tuple | None:
        result = tuple(v + a for v, a in zip(content, self._vector(name)))
        return result if min(result) >= 0 else None

    def accepting(self, content: tuple) -> bool:
        return True

    def within(self, content: tuple, bound: int) -> bool:
        return max(content) <= bound


@dataclass(frozen=True)
class LinearSet:
    """base + N·periods[0] + ... + N·periods[k-1]."""

    base: tuple[int, ...]
    periods: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        vectors = (self.base,) + self.periods
        if any(len(v) != len(self.base) for v in vectors):
            raise InputError("Linear set vectors must share one dimension")
        if any(x < 0 for v in vectors for x in v):
            raise InputError("Linear set vectors must be non-negative")

    def contains(self, vector: Sequence[int]) -> bool:
        if len(vector) != len(self.base):
            return False
        rest = tuple(v - b for v, b in zip(vector, self.base))
        return min(rest, default=0) >= 0 and _combination_exists(rest, self.periods)


@cached(cache=LRUCache(maxsize=8192))
def _combination_exists(target: tuple[int, ...], periods: tuple[tuple[int, ...], ...]) -> bool:
    """Is `target` a non-negative integer combination of `periods`? Coefficients are bounded by `target`."""
    if not any(target):
        return True
    if not periods:
        return False
    first, rest = periods[0], periods[1:]
    if not any(first):
        return _combination_exists(target, rest)
    k = 0
    remaining = target
    while min(remaining) >= 0:
        if _combination_exists(remaining, rest):
            return True
        k += 1
        remaining = tuple(t - k * p for t, p in zip(target, first))
    return False


class ParikhSpace(ContentSpace):
    """Vectors in N^d with total non-negative increments; accepting contents form a semilinear set."""

    kind = "parikh"

    def __init__(self, dimension: int, semilinear: Iterable[LinearSet]):
        if dimension < 1:
            raise InputError("Parikh dimension must be at least 1")
        self.dimension = dimension
        self.semilinear = tuple(semilinear)
        if any(len(s.base) != dimension for s in self.semilinear):
            raise InputError(f"Semilinear set must live in N^{dimension}")

    @property
    def initial(self) -> tuple:
        return (0,) * self.dimension

    def _vector(self, name: str) -> tuple[int, ...]:
        if name == IDENTITY:
            return (0,) * self.dimension
        try:
            vector = tuple(int(x) for x in name.split(","))
        except ValueError:
            raise InputError(f"Unknown Parikh update {name!r}") from None
        if len(vector) != self.dimension or min(vector) < 0:
            raise InputError(f"Parikh update {name!r} must be a non-negative {self.dimension}-vector")
        return vector

    def check_update(self, name: str) -> None:
        self._vector(name)

    def apply(self, name: str, content: tuple) -> tuple:
        return tuple(v + a for v, a in zip(content, self._vector(name)))

    def accepting(self, content: tuple) -> bool:
        return any(s.contains(content) for s in self.semilinear)

    def within(self, content: tuple, bound: int) -> bool:
        return max(content) <= bound


def pda_space(gamma: Iterable[str], empty_accepting: bool = False) -> StackSpace:
    return StackSpace(gamma, empty_accepting)


def counter_space(dimension: int) -> CounterSpace:
    return CounterSpace(dimension)


def parikh_space(dimension: int, semilinear: Iterable[LinearSet]) -> ParikhSpace:
    return ParikhSpace(dimension, semilinear)


# === Automata ===


@dataclass(frozen=True)
class UniformTransition:
    src: int
    letter: str | None  # None is ε
    update: str
    dst: int


@dataclass(frozen=True)
class UniformAutomaton:
    alphabet: tuple[str, ...]
    num_states: int
    initial: int
    transitions: tuple[UniformTransition, ...]
    accepting_states: frozenset[int]
    space: ContentSpace
    semantics: Semantics
    name: str = ""

    def __post_init__(self):
        if not self.alphabet:
            raise InputError("Alphabet must be non-empty")
        if not 0 <= self.initial < self.num_states:
            raise InputError(f"Initial state {self.initial} out of range")
        for t in self.transitions:
            if not (0 <= t.src < self.num_states and 0 <= t.dst < self.num_states):
                raise InputError(f"Transition {t} references an unknown state")
            if t.letter is not None and t.letter not in self.alphabet:
                raise InputError(f"Transition {t} uses letter outside the alphabet")
            self.space.check_update(t.update)
        if any(not 0 <= q < self.num_states for q in self.accepting_states):
            raise InputError("Accepting state out of range")

    def out(self, state: int, letter: str | None) -> list[UniformTransition]:
        return [t for t in self.transitions if t.src == state and t.letter == letter]

    @property
    def has_epsilon(self) -> bool:
        return any(t.letter is None for t in self.transitions)

    def good(self, state: int, content) -> bool:
        return state in self.accepting_states and self.space.accepting(content)


@dataclass(frozen=True)
class BoundedLts:
    """Finite automaton over configurations within `bound`; `sink` collects everything beyond it."""

    automaton: Automaton
    bound: int
    sink: int | None


SINK = "sink"


class _Expansion:
    """Breadth-first exploration of macro steps ε*·σ over configurations.

    A macro step carries a summary of the configurations it visits (including its source):
    SAFETY tracks a violation, SYNC_REACH an accepting configuration, ASYNC_REACH the two
    monotone flags (state in F_A seen, content in F_C seen).
    """

    def __init__(self, u: UniformAutomaton, bound: int):
        if bound < 0:
            raise InputError("Bound must be non-negative")
        self.u = u
        self.bound = bound
        self.budget = u.num_states * (bound + 2)
        self.index: dict = {}
        self.labels: list = []
        self.transitions: list[Transition] = []
        self.queue: deque = deque()

    def _summary(self, summary, q: int, c) -> Hashable:
        u = self.u
        match u.semantics:
            case Semantics.SAFETY:
                return summary or not u.good(q, c)
            case Semantics.SYNC_REACH:
                return summary or u.good(q, c)
            case Semantics.ASYNC_REACH:
                seen_state, seen_content = summary
                return (seen_state or q in u.accepting_states, seen_content or u.space.accepting(c))

    def _marked(self, summary) -> bool:
        return summary == (True, True) if self.u.semantics is Semantics.ASYNC_REACH else summary

    def _state(self, label) -> int:
        if label not in self.index:
            self.index[label] = len(self.labels)
            self.labels.append(label)
            if label != SINK:
                self.queue.append(label)
        return self.index[label]

    def _closure(self, q: int, c, summary) -> list[tuple]:
        """Configurations reachable by ε-moves, each with its path summary; None stands for the sink."""
        start = (q, c, summary)
        parent = {start: None}
        layer = [start]
        result = [start]
        depth = 0
        while layer:
            nxt = []
            for source in layer:
                state, content, s = source
                for t in self.u.out(state, None):
                    grown = self.u.space.apply(t.update, content)
                    if grown is not None:
                        self._check_pumping(q, t.dst, grown, source, parent)
                    target = self._step(t, content, s)
                    if target is None or target in parent:
                        continue
                    parent[target] = source
                    result.append(target)
                    if target[0] is not None:
                        nxt.append(target)
            if nxt:
                depth += 1
                if depth > self.budget:
                    raise EpsilonBudgetError(
                        f"ε-closure from state {q} still growing after {self.budget} steps",
                        {"state": q, "content": self.u.space.serialize(c)},
                    )
            layer = nxt
        return result

    def _check_pumping(self, q: int, state: int, content, ancestor: tuple, parent: dict) -> None:
        """Raise when the ε-path ending in `ancestor` passed `state` earlier with content that `content` grows."""
        between = []
        while ancestor is not None:
            if ancestor[0] == state and self.u.space.pumps(ancestor[1], content, between):
                space = self.u.space
                raise EpsilonBudgetError(
                    f"ε-cycle through state {state} changes content {space.serialize(ancestor[1])} "
                    f"to {space.serialize(content)}",
                    {"state": q, "cycle_state": state, "content": space.serialize(ancestor[1])},
                )
            between.append(ancestor[1])
            ancestor = parent[ancestor]

    def _step(self, t: UniformTransition, content, summary):
        """Apply one transition; undefined updates give None, out-of-bound contents give the sink triple."""
        new = self.u.space.apply(t.update, content)
        if new is None:
            return None
        if not self.u.space.within(new, self.bound):
            return (None, None, summary)
        return (t.dst, new, self._summary(summary, t.dst, new))

    def run(self) -> BoundedLts:
        u = self.u
        c0 = u.space.initial
        if u.semantics is Semantics.ASYNC_REACH:
            flags = self._summary((False, False), u.initial, c0)
            self._state((u.initial, c0) + flags)
        else:
            self._state((u.initial, c0))
        while self.queue:
            label = self.queue.popleft()
            src = self.index[label]
            q, c = label[0], label[1]
            carried = label[2:] if u.semantics is Semantics.ASYNC_REACH else False
            start_summary = self._summary(carried, q, c)
            emitted = set()
            for state, content, s in self._closure(q, c, start_summary):
                if state is None:
                    continue
                for letter in u.alphabet:
                    for t in u.out(state, letter):
                        target = self._step(t, content, s)
                        if target is None:
                            continue
                        self._emit(src, letter, target, emitted)
        return self._finish()

    def _emit(self, src: int, letter: str, target: tuple, emitted: set) -> None:
        q, c, s = target
        safety = self.u.semantics is Semantics.SAFETY
        if q is None:
            dst, mark = self._state(SINK), safety or self._marked(s)
        else:
            label = (q, c) + s if self.u.semantics is Semantics.ASYNC_REACH else (q, c)
            dst, mark = self._state(label), self._marked(s)
        key = (letter, dst, mark)
        if key not in emitted:
            emitted.add(key)
            self.transitions.append(Transition(src, letter, dst, mark))

    def _finish(self) -> BoundedLts:
        sink = self.index.get(SINK)
        if sink is not None:
            loop_mark = self.u.semantics is Semantics.SAFETY
            self.transitions.extend(Transition(sink, letter, sink, loop_mark) for letter in self.u.alphabet)
        acceptance = Acceptance.SAFETY if self.u.semantics is Semantics.SAFETY else Acceptance.REACHABILITY
        space = self.u.space
        labels = tuple(
            SINK if label == SINK else (label[0], space.serialize(label[1])) + tuple(label[2:]) for label in self.labels
        )
        a = Automaton(
            self.u.alphabet, len(self.labels), 0, tuple(self.transitions), acceptance,
            f"{self.u.name}@{self.bound}", labels,
        )
        logger.debug(f"Expanded {self.u.name or 'uniform automaton'} at bound {self.bound}: {a.num_states} states")
        return BoundedLts(a, self.bound, sink)


def expand_bounded(u: UniformAutomaton, bound: int) -> BoundedLts:
    """Finite automaton over (state, content) pairs within `bound`.

    SAFETY marks every macro step that visits a bad configuration; SYNC_REACH marks every
    macro step that visits a configuration with accepting state and content at once.
    """
    if u.semantics is Semantics.ASYNC_REACH:
        raise UnsupportedAcceptanceError("Asynchronous reachability is expanded through flag_product")
    return _Expansion(u, bound).run()


def flag_product(u: UniformAutomaton, bound: int) -> BoundedLts:
    """Expansion over (state, content, seen_state, seen_content); marks exactly the steps into flags (1, 1)."""
    if u.semantics is not Semantics.ASYNC_REACH:
        raise UnsupportedAcceptanceError("flag_product expects asynchronous reachability")
    return _Expansion(u, bound).run()


def expand(u: UniformAutomaton, bound: int) -> BoundedLts:
    if u.semantics is Semantics.ASYNC_REACH:
        return flag_product(u, bound)
    return expand_bounded(u, bound)


# === Delay ===


def delay_uniform(u: UniformAutomaton) -> UniformAutomaton:
    """States are a fresh initial state 0 and (q, σ) = 1 + q·|Σ| + index(σ); ε-moves keep the stored letter."""
    sigma = u.alphabet

    def state(q: int, letter: str) -> int:
        return 1 + q * len(sigma) + sigma.index(letter)

    transitions = [UniformTransition(0, letter, IDENTITY, state(u.initial, letter)) for letter in sigma]
    for t in u.transitions:
        if t.letter is None:
            transitions += [
                UniformTransition(state(t.src, stored), None, t.update, state(t.dst, stored)) for stored in sigma
            ]
        else:
            transitions += [
                UniformTransition(state(t.src, t.letter), nxt, t.update, state(t.dst, nxt)) for nxt in sigma
            ]
    accepting = {state(q, letter) for q in u.accepting_states for letter in sigma}
    if u.initial in u.accepting_states:
        accepting.add(0)
    return UniformAutomaton(
        sigma,
        u.num_states * len(sigma) + 1,
        0,
        tuple(transitions),
        frozenset(accepting),
        u.space,
        u.semantics,
        f"delay({u.name})",
    )


def isomorphic(a: Automaton, b: Automaton) -> bool:
    """Isomorphism of the reachable parts, respecting initial states, letters and marks."""
    ga, gb = reachable(a).to_graph(), reachable(b).to_graph()
    nx.set_node_attributes(ga, {0: True}, "initial")
    nx.set_node_attributes(gb, {0: True}, "initial")
    matcher = MultiDiGraphMatcher(
        ga,
        gb,
        node_match=lambda x, y: x.get("initial", False) == y.get("initial", False),
        edge_match=lambda x, y: sorted((e["letter"], e["mark"]) for e in x.values())
        == sorted((e["letter"], e["mark"]) for e in y.values()),
    )
    return matcher.is_isomorphic()


# === Direct semantics ===


def configurations(u: UniformAutomaton, word: Sequence[str], bound: int) -> list[set[tuple]]:
    """Configurations reachable before each letter and after the last one, ε-closed.

    Contents beyond `bound` are dropped. Each configuration carries its run summary as in the
    expansion (violation seen, sync hit, or the async flags).
    """
    expansion = _Expansion(u, bound)
    c0 = u.space.initial
    start = expansion._summary((False, False) if u.semantics is Semantics.ASYNC_REACH else False, u.initial, c0)

    def close(configs: set) -> set:
        return {
            (q, c, s)
            for config in configs
            for q, c, s in expansion._closure(*config)
            if q is not None
        }

    levels = [close({(u.initial, c0, start)})]
    for letter in word:
        step = set()
        for q, c, s in levels[-1]:
            for t in u.out(q, letter):
                target = expansion._step(t, c, s)
                if target is not None and target[0] is not None:
                    step.add(target)
        levels.append(close(step))
    return levels


def accepts_prefix(u: UniformAutomaton, word: Sequence[str], bound: int) -> bool:
    """Reachability: some run on a prefix of `word` has met the condition.

    Safety: some run reads all of `word` cleanly.
    """
    levels = configurations(u, word, bound)
    if u.semantics is Semantics.SAFETY:
        return any(not s for _, _, s in levels[-1])
    done = (True, True) if u.semantics is Semantics.ASYNC_REACH else True
    return any(s == done for level in levels for _, _, s in level)
