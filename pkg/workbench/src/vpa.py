"""Visibly pushdown automata, their delayed ghost and bounded-depth analysis.

The ghost lags one letter behind the source. Its semantic stack is the actual stack followed by
a short slot kept in the state: empty after a push letter, one symbol after a noop letter and two
symbols after a pop letter. A fresh symbol ⊥' sits under the simulated stack.
"""

from __future__ import annotations

import logging
import random
from collections import Counter, deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from cachetools import LRUCache, cached

from arena import Player, Strategy
from automaton import Acceptance, Automaton, Transition
from errors import InputError, ProvenanceError
from game_builders import EveNode, TokenGame, build_g1_two
from lasso import Lasso, lasso_membership
from parity import certify_strategy, solve_parity3

logger = logging.getLogger(__name__)

BOTTOM = "⊥"
GHOST_BOTTOM = "⊥'"
SINK = "sink"


class LetterClass(str, Enum):
    PUSH = "push"
    POP = "pop"
    NOOP = "noop"


@dataclass(frozen=True)
class VpaTransition:
    """`top` is the symbol read (⊥ for the empty stack); `push` is the symbol pushed on push letters."""

    src: int
    top: str
    letter: str
    dst: int
    push: str | None = None
    mark: bool = False


@dataclass(frozen=True)
class Vpa:
    alphabet: tuple[str, ...]
    letter_classes: tuple[tuple[str, LetterClass], ...]
    num_states: int
    initial: int
    gamma: tuple[str, ...]
    transitions: tuple[VpaTransition, ...]
    acceptance: Acceptance
    name: str = ""
    state_labels: tuple | None = None

    def __post_init__(self):
        classes = dict(self.letter_classes)
        if set(classes) != set(self.alphabet):
            raise InputError("Letter classes must partition the alphabet")
        if not 0 <= self.initial < self.num_states:
            raise InputError(f"Initial state {self.initial} out of range")
        if BOTTOM in self.gamma:
            raise InputError(f"{BOTTOM} is reserved for the empty stack")
        for t in self.transitions:
            if not (0 <= t.src < self.num_states and 0 <= t.dst < self.num_states):
                raise InputError(f"Transition {t} references an unknown state")
            if t.letter not in classes:
                raise InputError(f"Transition {t} uses letter outside the alphabet")
            kind = classes[t.letter]
            if kind is LetterClass.POP and t.top not in self.gamma:
                raise InputError(f"Pop transition {t} must read a stack symbol")
            if kind is not LetterClass.POP and t.top not in self.gamma + (BOTTOM,):
                raise InputError(f"Transition {t} reads unknown top {t.top!r}")
            if (kind is LetterClass.PUSH) != (t.push is not None) or (t.push is not None and t.push not in self.gamma):
                raise InputError(f"Transition {t} does not match the class of {t.letter!r}")

    @cached_property
    def _classes(self) -> dict[str, LetterClass]:
        return dict(self.letter_classes)

    @cached_property
    def _out(self) -> dict[tuple[int, str, str], list[int]]:
        index: dict[tuple[int, str, str], list[int]] = {}
        for i, t in enumerate(self.transitions):
            index.setdefault((t.src, t.top, t.letter), []).append(i)
        return index

    def letter_class(self, letter: str) -> LetterClass:
        if letter not in self._classes:
            raise InputError(f"Letter {letter!r} is outside the alphabet {list(self.alphabet)}")
        return self._classes[letter]

    def check_word(self, word: Iterable[str]) -> None:
        for letter in word:
            self.letter_class(letter)

    def letters_of(self, kind: LetterClass) -> tuple[str, ...]:
        return tuple(s for s, c in self.letter_classes if c is kind)

    def out(self, state: int, top: str, letter: str) -> list[int]:
        return self._out.get((state, top, letter), [])

    def apply(self, t: VpaTransition, stack: tuple) -> tuple:
        match self.letter_class(t.letter):
            case LetterClass.PUSH:
                return stack + (t.push,)
            case LetterClass.POP:
                return stack[:-1]
            case _:
                return stack

    def height_after(self, word: Sequence[str]) -> list[int]:
        """Stack heights along a visibly word; raises InputError on a pop at height 0."""
        heights = [0]
        for i, letter in enumerate(word):
            kind = self.letter_class(letter)
            h = heights[-1] + (1 if kind is LetterClass.PUSH else -1 if kind is LetterClass.POP else 0)
            if h < 0:
                raise InputError(f"Pop letter {letter!r} at position {i} on an empty stack")
            heights.append(h)
        return heights


def _top(stack: tuple) -> str:
    return stack[-1] if stack else BOTTOM


# === Ghost ===


@dataclass(frozen=True)
class GhostVpa:
    """`states[i]` is (q, σ, slot); σ is None in the initial state.

    `provenance[j]` is the simulated source transition.
    """

    vpa: Vpa
    source: Vpa
    states: tuple[tuple, ...]
    provenance: tuple[int | None, ...]

    def semantic_stack(self, state: int, stack: tuple) -> tuple:
        return stack + self.states[state][2]


def _ghost_states(v: Vpa) -> list[tuple]:
    gamma_b = v.gamma + (GHOST_BOTTOM,)
    states: list[tuple] = [(v.initial, None, (GHOST_BOTTOM,))]
    for q in range(v.num_states):
        for letter in v.alphabet:
            match v.letter_class(letter):
                case LetterClass.PUSH:
                    states.append((q, letter, ()))
                case LetterClass.NOOP:
                    states.extend((q, letter, (z,)) for z in gamma_b)
                case LetterClass.POP:
                    states.extend((q, letter, (z1, z2)) for z1 in gamma_b for z2 in v.gamma)
    return states


def _actual_tops(slot: tuple, gamma_b: tuple[str, ...]) -> tuple[str, ...]:
    # ⊥' in the slot means the actual stack is still empty.
    return (BOTTOM,) if GHOST_BOTTOM in slot else gamma_b


def vpa_ghost(v: Vpa) -> GhostVpa:
    gamma_b = v.gamma + (GHOST_BOTTOM,)
    states = _ghost_states(v)
    index = {s: i for i, s in enumerate(states)}
    transitions: list[VpaTransition] = []
    provenance: list[int | None] = []

    def emit(src_state: int, top: str, nxt: str, push: str | None, dst: tuple, mark: bool, origin: int | None):
        transitions.append(VpaTransition(src_state, top, nxt, index[dst], push, mark))
        provenance.append(origin)

    for nxt in v.alphabet:
        match v.letter_class(nxt):
            case LetterClass.PUSH:
                emit(0, BOTTOM, nxt, GHOST_BOTTOM, (v.initial, nxt, ()), False, None)
            case LetterClass.NOOP:
                emit(0, BOTTOM, nxt, None, (v.initial, nxt, (GHOST_BOTTOM,)), False, None)

    for src_state, (q, letter, slot) in enumerate(states):
        if letter is None:
            continue
        for top in _actual_tops(slot, gamma_b):
            semantic_top = slot[-1] if slot else top
            source_top = BOTTOM if semantic_top == GHOST_BOTTOM else semantic_top
            for i in v.out(q, source_top, letter):
                t = v.transitions[i]
                # symbol that becomes the new semantic top once t has been applied
                carried = t.push if t.push is not None else slot[0]
                for nxt in v.alphabet:
                    match v.letter_class(nxt):
                        case LetterClass.PUSH:
                            emit(src_state, top, nxt, carried, (t.dst, nxt, ()), t.mark, i)
                        case LetterClass.NOOP:
                            emit(src_state, top, nxt, None, (t.dst, nxt, (carried,)), t.mark, i)
                        case LetterClass.POP:
                            if top != BOTTOM:
                                emit(src_state, top, nxt, None, (t.dst, nxt, (top, carried)), t.mark, i)

    ghost = Vpa(
        v.alphabet, v.letter_classes, len(states), 0, gamma_b, tuple(transitions), v.acceptance,
        f"ghost({v.name})", tuple(states),
    )
    logger.debug(f"VPA ghost of {v.name or 'vpa'}: {len(states)} states, {len(transitions)} transitions")
    return GhostVpa(ghost, v, tuple(states), tuple(provenance))


def ghost_state_count(v: Vpa) -> int:
    q, g = v.num_states, len(v.gamma)
    push, noop, pop = (len(v.letters_of(k)) for k in (LetterClass.PUSH, LetterClass.NOOP, LetterClass.POP))
    return q * (push + noop * (g + 1) + pop * (g + 1) * g) + 1


# === Runs ===


def count_runs(v: Vpa, word: Sequence[str]) -> int:
    """Number of runs of `v` reading all of `word` from the initial configuration."""
    frontier: Counter = Counter({(v.initial, ()): 1})
    for letter in word:
        nxt: Counter = Counter()
        for (q, stack), n in frontier.items():
            for i in v.out(q, _top(stack), letter):
                t = v.transitions[i]
                nxt[(t.dst, v.apply(t, stack))] += n
        frontier = nxt
    return sum(frontier.values())


def semantic_stack_check(g: GhostVpa, word: Sequence[str]) -> bool:
    """Pair every source run on word[:i] with its ghost run on word[:i+1] and compare stacks.

    The ghost must track the source state, and its actual stack followed by its slot must equal
    ⊥' followed by the source stack.
    """
    v, ghost = g.source, g.vpa
    v.height_after(word)
    if not word:
        return True
    first = ghost.out(0, BOTTOM, word[0])
    if len(first) != 1:
        return False
    start = ghost.transitions[first[0]]
    pairs = [((v.initial, ()), (start.dst, ghost.apply(start, ())))]
    for pos in range(len(word) - 1):
        letter, nxt = word[pos], word[pos + 1]
        advanced = []
        for (q, stack), (gq, gstack) in pairs:
            for i in v.out(q, _top(stack), letter):
                t = v.transitions[i]
                matches = [j for j in ghost.out(gq, _top(gstack), nxt) if g.provenance[j] == i]
                if len(matches) != 1:
                    logger.info(f"Ghost has {len(matches)} copies of source transition {i} at position {pos}")
                    return False
                gt = ghost.transitions[matches[0]]
                source = (t.dst, v.apply(t, stack))
                shadow = (gt.dst, ghost.apply(gt, gstack))
                if g.states[shadow[0]][0] != source[0]:
                    return False
                if g.semantic_stack(*shadow) != (GHOST_BOTTOM,) + source[1]:
                    logger.info(f"Semantic stack mismatch after {pos + 2} letters: {shadow} vs {source}")
                    return False
                advanced.append((source, shadow))
        pairs = advanced
    return True


# === Bounded expansion ===


@dataclass(frozen=True)
class ExpandedVpa:
    """Configurations with stack height at most `depth`; pushes beyond it go to `sink`."""

    automaton: Automaton
    depth: int
    sink: int | None
    origin: tuple[int | None, ...]


# Membership checks on sampled lassos reuse the same few depths.
@cached(LRUCache(maxsize=64))
def expand_vpa(v: Vpa, depth: int) -> ExpandedVpa:
    if depth < 0:
        raise InputError("depth must be non-negative")
    start = (v.initial, ())
    index = {start: 0}
    labels: list = [start]
    transitions: list[Transition] = []
    origin: list[int | None] = []
    queue = deque([start])
    into_sink_marked = v.acceptance is Acceptance.SAFETY

    def state(label) -> int:
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
            if label != SINK:
                queue.append(label)
        return index[label]

    while queue:
        q, stack = queue.popleft()
        src = index[(q, stack)]
        for letter in v.alphabet:
            for i in v.out(q, _top(stack), letter):
                t = v.transitions[i]
                new = v.apply(t, stack)
                if len(new) > depth:
                    transitions.append(Transition(src, letter, state(SINK), into_sink_marked or t.mark))
                else:
                    transitions.append(Transition(src, letter, state((t.dst, new)), t.mark))
                origin.append(i)
    sink = index.get(SINK)
    if sink is not None:
        loop_marked = v.acceptance in (Acceptance.SAFETY, Acceptance.COBUCHI)
        for letter in v.alphabet:
            transitions.append(Transition(sink, letter, sink, loop_marked))
            origin.append(None)
    a = Automaton(v.alphabet, len(labels), 0, tuple(transitions), v.acceptance, f"{v.name}@{depth}", tuple(labels))
    return ExpandedVpa(a, depth, sink, tuple(origin))


def vpa_membership(v: Vpa, lasso: Lasso) -> bool:
    """Membership of a well-nested lasso: the expansion at the lasso's own depth is exact."""
    try:
        heights = v.height_after(lasso.letters + lasso.cycle)
    except InputError:
        v.check_word(lasso.letters)
        return False
    drift = heights[len(lasso.letters)] - heights[len(lasso.prefix)]
    if drift < 0:
        # some later iteration pops the empty stack
        return False
    if drift > 0:
        raise InputError(f"Lasso {lasso} grows the stack without bound")
    return lasso_membership(expand_vpa(v, max(heights)).automaton, lasso)


def sample_well_nested(v: Vpa, count: int, depth: int, max_prefix: int, max_cycle: int, seed: int) -> list[Lasso]:
    """Random lassos whose cycle returns to its starting height and never dips below it."""
    rng = random.Random(seed)
    push, pop, noop = (v.letters_of(k) for k in (LetterClass.PUSH, LetterClass.POP, LetterClass.NOOP))
    result = []
    for _ in range(count):
        prefix, h = _walk(rng, rng.randint(0, max_prefix), 0, 0, depth, push, pop, noop)
        body, end = _walk(rng, rng.randint(1, max_cycle), h, h, depth, push, pop, noop)
        closing = [rng.choice(pop) for _ in range(end - h)] if pop else []
        cycle = body + closing
        if not cycle or (end != h and not pop):
            continue
        result.append(Lasso(tuple(prefix), tuple(cycle)))
    return result


def _walk(rng, length, height, floor, depth, push, pop, noop) -> tuple[list[str], int]:
    letters = []
    for _ in range(length):
        options = list(noop)
        if height < depth:
            options += push
        if height > floor:
            options += pop
        if not options:
            break
        letter = rng.choice(options)
        height += 1 if letter in push else -1 if letter in pop else 0
        letters.append(letter)
    return letters, height


# === Bounded G1 ===


@dataclass
class BoundedGhostReport:
    depth: int
    eve_wins: bool
    copy_certified: bool
    bound_limited: bool
    arena_nodes: int

    @property
    def passed(self) -> bool:
        return self.eve_wins and self.copy_certified


def vpa_copy_strategy(g: GhostVpa, ghost_x: ExpandedVpa, source_x: ExpandedVpa, game: TokenGame) -> Strategy:
    """Eve replays Adam's previous transition so that her semantic stack matches his stack."""
    arena = game.arena
    prefer = g.source.acceptance in (Acceptance.BUCHI, Acceptance.REACHABILITY)
    labels_g, labels_s = ghost_x.automaton.state_labels, source_x.automaton.state_labels
    choices: dict[int, int] = {}
    seen = {arena.initial}
    queue = deque([arena.initial])
    while queue:
        node = queue.popleft()
        if arena.is_terminal(node):
            continue
        edges = arena.out_edges(node)
        if arena.owners[node] is Player.EVE:
            p: EveNode = arena.payloads[node]
            choices[node] = _vpa_copy_move(g, ghost_x, labels_g, labels_s[p.adam[0]], arena, edges, prefer)
            edges = [choices[node]]
        for e in edges:
            dst = arena.edges[e].dst
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    return Strategy(Player.EVE, choices)


def _vpa_copy_move(g: GhostVpa, ghost_x: ExpandedVpa, labels_g, adam, arena, edges, prefer) -> int:
    fallback = None
    for e in edges:
        x = arena.edges[e].label[1]
        j = ghost_x.origin[x]
        target = labels_g[ghost_x.automaton.transitions[x].dst]
        if j is None or adam == SINK or target == SINK:
            # Adam overflowed: take the copy of his last move if it carries the mark he needed
            if fallback is None or (adam == SINK and ghost_x.automaton.transitions[x].mark == prefer):
                fallback = e
            continue
        i = g.provenance[j]
        if i is None:
            return e
        q, stack = adam
        gq, gstack = target
        if g.source.transitions[i].dst != q or g.semantic_stack(gq, gstack) != (GHOST_BOTTOM,) + stack:
            continue
        if ghost_x.automaton.transitions[x].mark == prefer:
            return e
        fallback = e
    if fallback is None:
        raise ProvenanceError(f"No ghost move matches Adam's configuration {adam}")
    return fallback


def vpa_bounded_g1(g: GhostVpa, depth: int) -> BoundedGhostReport:
    if depth < 1:
        raise InputError("depth must be at least 1")
    # One extra level lets the ghost replay the move that pushed the source past `depth`.
    ghost_x, source_x = expand_vpa(g.vpa, depth + 1), expand_vpa(g.source, depth)
    game = build_g1_two(ghost_x.automaton, source_x.automaton)
    eve_wins = solve_parity3(game.arena).winner_at(game.arena.initial) is Player.EVE
    certified = certify_strategy(game.arena, vpa_copy_strategy(g, ghost_x, source_x, game))
    report = BoundedGhostReport(depth, eve_wins, certified, source_x.sink is not None, game.arena.num_nodes)
    logger.info(
        f"Bounded ghost game for {g.source.name or 'vpa'} at depth {depth}: eve_wins={eve_wins}, "
        f"certified={certified}, bound_limited={report.bound_limited}"
    )
    return report


def build_vpa(
    letter_classes: dict[str, Iterable[str]],
    num_states: int,
    gamma: Iterable[str],
    transitions: Iterable[tuple],
    acceptance: Acceptance,
    *,
    initial: int = 0,
    name: str = "",
) -> Vpa:
    """Transitions are (src, top, letter, dst) or (src, top, letter, dst, push) with an optional trailing mark flag.

    A top of "*" expands to every symbol the letter class allows.
    """
    classes = tuple((s, LetterClass(kind)) for kind, letters in letter_classes.items() for s in letters)
    alphabet = tuple(s for s, _ in classes)
    gamma = tuple(gamma)
    kinds = dict(classes)
    built = []
    for entry in transitions:
        src, top, letter, dst, *rest = entry
        mark = bool(rest and isinstance(rest[-1], bool) and rest.pop())
        push = rest[0] if rest else None
        tops = (gamma if kinds[letter] is LetterClass.POP else gamma + (BOTTOM,)) if top == "*" else (top,)
        built += [VpaTransition(src, x, letter, dst, push, mark) for x in tops]
    return Vpa(alphabet, classes, num_states, initial, gamma, tuple(built), acceptance, name)
