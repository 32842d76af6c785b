"""Timed automata over finite timed words, regions, the clock-doubling delay and the L_k family.

All time values are `fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import logging
import operator
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import floor

from automaton import Acceptance
from errors import FrontierLimitError, InputError, UnsupportedAcceptanceError

logger = logging.getLogger(__name__)

DEFAULT_FRONTIER_LIMIT = 200_000


# === Guards ===

_OPS = {"<": operator.lt, "<=": operator.le, "=": operator.eq, ">=": operator.ge, ">": operator.gt}


@dataclass(frozen=True)
class Atom:
    clock: str
    op: str
    constant: int

    def __post_init__(self):
        if self.op not in _OPS:
            raise InputError(f"Unknown comparison {self.op!r}")
        if self.constant < 0:
            raise InputError("Guard constants must be natural numbers")

    def holds(self, valuation: Mapping[str, Fraction]) -> bool:
        return _OPS[self.op](valuation[self.clock], self.constant)

    def atoms(self) -> Iterable[Atom]:
        yield self

    def rename(self, mapping: Mapping[str, str]) -> Atom:
        return Atom(mapping[self.clock], self.op, self.constant)

    def __str__(self) -> str:
        return f"{self.clock}{self.op}{self.constant}"


@dataclass(frozen=True)
class And:
    parts: tuple = ()

    def holds(self, valuation) -> bool:
        return all(p.holds(valuation) for p in self.parts)

    def atoms(self):
        for p in self.parts:
            yield from p.atoms()

    def rename(self, mapping) -> And:
        return And(tuple(p.rename(mapping) for p in self.parts))

    def __str__(self) -> str:
        return " & ".join(f"({p})" for p in self.parts) if self.parts else "true"


@dataclass(frozen=True)
class Or:
    parts: tuple = ()

    def holds(self, valuation) -> bool:
        return any(p.holds(valuation) for p in self.parts)

    def atoms(self):
        for p in self.parts:
            yield from p.atoms()

    def rename(self, mapping) -> Or:
        return Or(tuple(p.rename(mapping) for p in self.parts))

    def __str__(self) -> str:
        return " | ".join(f"({p})" for p in self.parts) if self.parts else "false"


@dataclass(frozen=True)
class Not:
    part: object

    def holds(self, valuation) -> bool:
        return not self.part.holds(valuation)

    def atoms(self):
        yield from self.part.atoms()

    def rename(self, mapping) -> Not:
        return Not(self.part.rename(mapping))

    def __str__(self) -> str:
        return f"!({self.part})"


Guard = Atom | And | Or | Not
TRUE = And(())
FALSE = Or(())


def equals(clock: str, n: int) -> Atom:
    return Atom(clock, "=", n)


def differs(clock: str, n: int) -> Not:
    return Not(Atom(clock, "=", n))


# === Automata and words ===


@dataclass(frozen=True)
class TimedTransition:
    src: int
    letter: str
    guard: Guard
    resets: frozenset[str]
    dst: int


@dataclass(frozen=True)
class TimedAutomaton:
    """Safety or reachability timed automaton with state-based acceptance over finite words."""

    alphabet: tuple[str, ...]
    num_states: int
    initial: int
    clocks: tuple[str, ...]
    transitions: tuple[TimedTransition, ...]
    accepting: frozenset[int]
    acceptance: Acceptance = Acceptance.REACHABILITY
    name: str = ""
    state_labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.acceptance not in (Acceptance.SAFETY, Acceptance.REACHABILITY):
            raise UnsupportedAcceptanceError(f"Timed automata take safety or reachability, not {self.acceptance.value}")
        if not 0 <= self.initial < self.num_states:
            raise InputError(f"Initial state {self.initial} out of range")
        known = set(self.clocks)
        for t in self.transitions:
            if not (0 <= t.src < self.num_states and 0 <= t.dst < self.num_states):
                raise InputError(f"Transition {t.src}->{t.dst} references an unknown state")
            if t.letter not in self.alphabet:
                raise InputError(f"Transition uses letter {t.letter!r} outside the alphabet")
            if not t.resets <= known or any(a.clock not in known for a in t.guard.atoms()):
                raise InputError(f"Transition {t.src}->{t.dst} uses an unknown clock")

    @cached_property
    def _out(self) -> dict[tuple[int, str], tuple[int, ...]]:
        index: dict[tuple[int, str], list[int]] = {}
        for i, t in enumerate(self.transitions):
            index.setdefault((t.src, t.letter), []).append(i)
        return {k: tuple(v) for k, v in index.items()}

    def out(self, state: int, letter: str) -> tuple[int, ...]:
        return self._out.get((state, letter), ())

    @cached_property
    def max_constants(self) -> dict[str, int]:
        result = {x: 0 for x in self.clocks}
        for t in self.transitions:
            for a in t.guard.atoms():
                result[a.clock] = max(result[a.clock], a.constant)
        return result

    def label(self, state: int):
        return self.state_labels[state] if self.state_labels is not None else state


@dataclass(frozen=True)
class TimedWord:
    """Letters with delays since the previous letter (the first delay is measured from time 0)."""

    letters: tuple[tuple[str, Fraction], ...]

    def __post_init__(self):
        normalized = tuple((s, Fraction(d)) for s, d in self.letters)
        if any(d < 0 for _, d in normalized):
            raise InputError("Delays must be non-negative")
        object.__setattr__(self, "letters", normalized)

    @classmethod
    def from_timestamps(cls, stamped: Iterable[tuple[str, Fraction | str | int]]) -> TimedWord:
        letters, last = [], Fraction(0)
        for letter, stamp in stamped:
            stamp = Fraction(stamp)
            if stamp < last:
                raise InputError(f"Timestamps must be non-decreasing, got {stamp} after {last}")
            letters.append((letter, stamp - last))
            last = stamp
        return cls(tuple(letters))

    @property
    def timestamps(self) -> tuple[Fraction, ...]:
        return tuple(itertools.accumulate(d for _, d in self.letters))

    def stamped(self) -> list[tuple[str, Fraction]]:
        return [(s, t) for (s, _), t in zip(self.letters, self.timestamps)]

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return "".join(f"({s},{t})" for s, t in self.stamped())


Valuation = tuple[Fraction, ...]


@dataclass(frozen=True)
class Configuration:
    """`good` is the run summary: some accepting state seen (reachability) or only accepting states seen (safety)."""

    state: int
    valuation: Valuation
    good: bool


@dataclass
class TimedRun:
    final: set[Configuration]
    accepted: bool


def _as_map(t: TimedAutomaton, valuation: Valuation) -> dict[str, Fraction]:
    return dict(zip(t.clocks, valuation))


def _fold(t: TimedAutomaton, good: bool, state: int) -> bool:
    inside = state in t.accepting
    return good or inside if t.acceptance is Acceptance.REACHABILITY else good and inside


def initial_configuration(t: TimedAutomaton) -> Configuration:
    return Configuration(t.initial, (Fraction(0),) * len(t.clocks), t.initial in t.accepting)


def step_timed(
    t: TimedAutomaton, config: Configuration, letter: str, delay: Fraction
) -> list[tuple[int, Configuration]]:
    """Delay, then every enabled transition on `letter`; yields (transition index, successor)."""
    moved = tuple(v + delay for v in config.valuation)
    values = _as_map(t, moved)
    result = []
    for i in t.out(config.state, letter):
        tr = t.transitions[i]
        if tr.guard.holds(values):
            reset = tuple(Fraction(0) if x in tr.resets else v for x, v in zip(t.clocks, moved))
            result.append((i, Configuration(tr.dst, reset, _fold(t, config.good, tr.dst))))
    return result


def run_timed(
    t: TimedAutomaton,
    w: TimedWord,
    start: Iterable[Configuration] | None = None,
    frontier_limit: int = DEFAULT_FRONTIER_LIMIT,
) -> TimedRun:
    """Enumerate every run reading all of `w`; accepted iff some final configuration is good."""
    frontier = set(start) if start is not None else {initial_configuration(t)}
    for letter, delay in w.letters:
        frontier = {c for config in frontier for _, c in step_timed(t, config, letter, delay)}
        if len(frontier) > frontier_limit:
            raise FrontierLimitError(frontier_limit)
    return TimedRun(frontier, any(c.good for c in frontier))


def accepts(t: TimedAutomaton, w: TimedWord) -> bool:
    return run_timed(t, w).accepted


# === Regions ===


def interval_index(value: Fraction, constant: int) -> int:
    """Index into 0, (0,1), 1, ..., constant, (constant, ∞)."""
    if value > constant:
        return 2 * constant + 1
    if value.denominator == 1:
        return 2 * int(value)
    return 2 * floor(value) + 1


def interval_name(index: int, constant: int) -> str:
    if index == 2 * constant + 1:
        return f"({constant},inf)"
    if index % 2 == 0:
        return str(index // 2)
    return f"({index // 2},{index // 2 + 1})"


@dataclass(frozen=True)
class Region:
    """Per-clock intervals. `frac_order` ranks the fractional parts of the bounded clocks (0 for integers);
    it is extra data for tests and does not take part in equality."""

    intervals: tuple[int, ...]
    frac_order: tuple[int | None, ...] = field(default=(), compare=False)

    @classmethod
    def of(cls, valuation: Valuation, constants: Sequence[int]) -> Region:
        intervals = tuple(interval_index(v, c) for v, c in zip(valuation, constants))
        fracs = sorted({v - floor(v) for v, c in zip(valuation, constants) if v <= c and v.denominator != 1})
        rank = {f: i + 1 for i, f in enumerate(fracs)}
        order = tuple(
            None if v > c else 0 if v.denominator == 1 else rank[v - floor(v)] for v, c in zip(valuation, constants)
        )
        return cls(intervals, order)

    @property
    def full_key(self) -> tuple:
        return self.intervals, self.frac_order

    def representative(self) -> Valuation:
        return tuple(Fraction(i // 2) if i % 2 == 0 else Fraction(2 * (i // 2) + 1, 2) for i in self.intervals)

    def satisfies(self, guard: Guard, clocks: Sequence[str]) -> bool:
        """r ⊨ g. Atoms compare one clock with a constant no larger than its maximum,
        so one representative decides.
        """
        return guard.holds(dict(zip(clocks, self.representative())))

    def guard(self, clocks: Sequence[str], constants: Sequence[int]) -> Guard:
        parts = []
        for x, i, c in zip(clocks, self.intervals, constants):
            low = i // 2
            if i % 2 == 0:
                parts.append(Atom(x, "=", low))
            elif low == c:
                parts.append(Atom(x, ">", c))
            else:
                parts += [Atom(x, ">", low), Atom(x, "<", low + 1)]
        return And(tuple(parts))

    def describe(self, clocks: Sequence[str], constants: Sequence[int]) -> str:
        return ",".join(f"{x}∈{interval_name(i, c)}" for x, i, c in zip(clocks, self.intervals, constants))


def regions_for(t: TimedAutomaton) -> dict[str, list[str]]:
    return {x: [interval_name(i, c) for i in range(2 * c + 2)] for x, c in t.max_constants.items()}


def all_regions(t: TimedAutomaton) -> list[Region]:
    constants = [t.max_constants[x] for x in t.clocks]
    return [Region(r) for r in itertools.product(*(range(2 * c + 2) for c in constants))]


# === Delay ===


GHOST_INITIAL = "s"


def ghost_clock(x: str, copy: int) -> str:
    return f"{x}#{copy}"


@dataclass(frozen=True)
class GhostState:
    state: int
    letter: str
    region: Region
    active: tuple[int, ...]  # copy in use per source clock


@dataclass(frozen=True)
class GhostTimed:
    automaton: TimedAutomaton
    source: TimedAutomaton
    states: tuple  # GHOST_INITIAL or GhostState per ghost state
    provenance: tuple[int | None, ...]

    def active_valuation(self, state: int, valuation: Valuation) -> Valuation:
        info = self.states[state]
        active = info.active if isinstance(info, GhostState) else (0,) * len(self.source.clocks)
        return tuple(valuation[2 * i + a] for i, a in enumerate(active))

    def passive_valuation(self, state: int, valuation: Valuation) -> Valuation:
        info = self.states[state]
        active = info.active if isinstance(info, GhostState) else (0,) * len(self.source.clocks)
        return tuple(valuation[2 * i + 1 - a] for i, a in enumerate(active))


def delay_timed(t: TimedAutomaton) -> GhostTimed:
    """Clock-doubling delay restricted to the part reachable from the fresh initial state."""
    clocks = t.clocks
    constants = [t.max_constants[x] for x in clocks]
    ghost_clocks = tuple(ghost_clock(x, b) for x in clocks for b in (0, 1))
    regions = all_regions(t)

    def renaming(active: tuple[int, ...]) -> dict[str, str]:
        return {x: ghost_clock(x, a) for x, a in zip(clocks, active)}

    def passive(active: tuple[int, ...]) -> frozenset[str]:
        return frozenset(ghost_clock(x, 1 - a) for x, a in zip(clocks, active))

    region_guards = {
        (r, active): r.guard(clocks, constants).rename(renaming(active))
        for r in regions
        for active in itertools.product((0, 1), repeat=len(clocks))
    }
    states: list = [GHOST_INITIAL]
    index: dict = {GHOST_INITIAL: 0}
    transitions: list[TimedTransition] = []
    provenance: list[int | None] = []
    queue: deque = deque()

    def state(info: GhostState) -> int:
        if info not in index:
            index[info] = len(states)
            states.append(info)
            queue.append(info)
        return index[info]

    f0 = (0,) * len(clocks)
    for letter in t.alphabet:
        for r in regions:
            dst = state(GhostState(t.initial, letter, r, f0))
            transitions.append(TimedTransition(0, letter, region_guards[(r, f0)], passive(f0), dst))
            provenance.append(None)
    while queue:
        info = queue.popleft()
        src = index[info]
        for i in t.out(info.state, info.letter):
            tr = t.transitions[i]
            if not info.region.satisfies(tr.guard, clocks):
                continue
            swapped = tuple(1 - a if x in tr.resets else a for x, a in zip(clocks, info.active))
            for nxt in t.alphabet:
                for r in regions:
                    dst = state(GhostState(tr.dst, nxt, r, swapped))
                    transitions.append(TimedTransition(src, nxt, region_guards[(r, swapped)], passive(swapped), dst))
                    provenance.append(i)
    accepting = {i for i, info in enumerate(states) if isinstance(info, GhostState) and info.state in t.accepting}
    if t.initial in t.accepting:
        accepting.add(0)
    ghost = TimedAutomaton(
        t.alphabet, len(states), 0, ghost_clocks, tuple(transitions), frozenset(accepting), t.acceptance,
        f"delay({t.name})", tuple(states),
    )
    logger.debug(f"Timed delay of {t.name or 'automaton'}: {len(states)} states, {len(transitions)} transitions")
    return GhostTimed(ghost, t, tuple(states), tuple(provenance))


def ghost_state_bound(t: TimedAutomaton) -> int:
    return t.num_states * len(t.alphabet) * len(all_regions(t)) * 2 ** len(t.clocks) + 1


def accepts_ghost(g: GhostTimed, w: TimedWord, frontier_limit: int = DEFAULT_FRONTIER_LIMIT) -> bool:
    """Ghost acceptance on a finite word.

    The ghost ends one source transition short, so a full run accepts iff some source transition
    enabled by its stored region completes the source condition.
    """
    src = g.source
    if len(w) == 0:
        return src.initial in src.accepting
    run = run_timed(g.automaton, w, frontier_limit=frontier_limit)
    for config in run.final:
        info = g.states[config.state]
        for i in src.out(info.state, info.letter):
            tr = src.transitions[i]
            if info.region.satisfies(tr.guard, src.clocks) and _fold(src, config.good, tr.dst):
                return True
    return False


# === Copy invariants ===


@dataclass
class InvariantReport:
    holds: bool
    runs_checked: int = 0
    failed_round: int | None = None
    failed_check: str | None = None


def ghost_copy_invariants(g: GhostTimed, w: TimedWord, frontier_limit: int = DEFAULT_FRONTIER_LIMIT) -> InvariantReport:
    """Pair each source run with the ghost run that copies it one letter late and check, after every round,
    that the ghost tracks the source state, that its active clocks equal the source clocks plus the
    pending delay while the passive clocks are 0, and that its stored region is the region of the active clocks.
    """
    src, ghost = g.source, g.automaton
    if len(w) == 0:
        return InvariantReport(True)
    constants = [src.max_constants[x] for x in src.clocks]
    first_letter, first_delay = w.letters[0]
    ghost_start = initial_configuration(ghost)
    pairs = []
    for _, gc in step_timed(ghost, ghost_start, first_letter, first_delay):
        pairs.append((initial_configuration(src), gc))
    if len(pairs) != 1:
        return InvariantReport(False, 0, 0, "initial")

    def check(round_no: int, source: Configuration, shadow: Configuration, delay: Fraction) -> str | None:
        info = g.states[shadow.state]
        if info.state != source.state:
            return "state"
        expected = tuple(v + delay for v in source.valuation)
        if g.active_valuation(shadow.state, shadow.valuation) != expected:
            return "active clocks"
        if any(g.passive_valuation(shadow.state, shadow.valuation)):
            return "passive clocks"
        if info.region != Region.of(expected, constants):
            return "region"
        return None

    failure = check(0, *pairs[0], first_delay)
    if failure:
        return InvariantReport(False, 1, 0, failure)
    for pos in range(len(w) - 1):
        letter, delay = w.letters[pos]
        nxt, nxt_delay = w.letters[pos + 1]
        advanced = []
        for source, shadow in pairs:
            ghost_moves = step_timed(ghost, shadow, nxt, nxt_delay)
            for i, moved in step_timed(src, source, letter, delay):
                copies = [c for j, c in ghost_moves if g.provenance[j] == i]
                if len(copies) != 1:
                    return InvariantReport(False, len(pairs), pos + 1, "copy")
                failure = check(pos + 1, moved, copies[0], nxt_delay)
                if failure:
                    return InvariantReport(False, len(pairs), pos + 1, failure)
                advanced.append((moved, copies[0]))
        pairs = advanced
        if len(pairs) > frontier_limit:
            raise FrontierLimitError(frontier_limit)
    return InvariantReport(True, len(pairs))


def skip_reset(g: GhostTimed, transition: int) -> GhostTimed:
    """Fault injection: drop one clock from the resets of a ghost transition."""
    tr = g.automaton.transitions[transition]
    if not tr.resets:
        raise InputError(f"Ghost transition {transition} resets nothing")
    dropped = sorted(tr.resets)[0]
    mutated = TimedTransition(tr.src, tr.letter, tr.guard, tr.resets - {dropped}, tr.dst)
    transitions = g.automaton.transitions[:transition] + (mutated,) + g.automaton.transitions[transition + 1 :]
    a = g.automaton
    broken = TimedAutomaton(
        a.alphabet, a.num_states, a.initial, a.clocks, transitions, a.accepting, a.acceptance, a.name, a.state_labels
    )
    return GhostTimed(broken, g.source, g.states, g.provenance)


# === L_k ===


def _subsets(clocks: Sequence[str]) -> list[frozenset[str]]:
    masks = itertools.product((0, 1), repeat=len(clocks))
    return [frozenset(c for c, bit in zip(clocks, bits) if bit) for bits in masks]


def build_Lk(k: int) -> TimedAutomaton:
    """Timed automaton with k clocks for the words containing k distinct a's repeated one time unit later
    around a single b. A nondeterministic phase resets clocks before the b; a deterministic phase checks
    the repetitions after it.
    """
    if k < 1:
        raise InputError("k must be at least 1")
    clocks = tuple(f"c{i}" for i in range(1, k + 1))
    full = frozenset(clocks)
    subsets = sorted(_subsets(clocks), key=lambda s: (len(s), sorted(s)))
    labels = [(s, 1) for s in subsets] + [(s, 2) for s in subsets] + ["reject"]
    index = {label: i for i, label in enumerate(labels)}
    reject = index["reject"]

    two_at_one = Or(tuple(And((equals(x, 1), equals(y, 1))) for x, y in itertools.combinations(clocks, 2)))
    in_unit = And(tuple(p for c in clocks for p in (Atom(c, ">", 0), Atom(c, "<", 1))))
    transitions = []
    for s in subsets:
        for x in subsets:
            transitions.append(TimedTransition(index[(s, 1)], "a", TRUE, x, index[(s | x, 1)]))
        if s == full:
            transitions.append(TimedTransition(index[(s, 1)], "b", in_unit, frozenset(), index[(full, 2)]))
            transitions.append(TimedTransition(index[(s, 1)], "b", Not(in_unit), frozenset(), reject))
        else:
            transitions.append(TimedTransition(index[(s, 1)], "b", TRUE, frozenset(), reject))
        for y in sorted(s):
            only_y = And((equals(y, 1),) + tuple(differs(z, 1) for z in clocks if z != y))
            transitions.append(TimedTransition(index[(s, 2)], "a", only_y, frozenset(), index[(s - {y}, 2)]))
        if k >= 2:
            transitions.append(TimedTransition(index[(s, 2)], "a", two_at_one, frozenset(), reject))
        stay = And(tuple(differs(c, 1) for c in sorted(s)) + (Not(two_at_one),))
        transitions.append(TimedTransition(index[(s, 2)], "a", stay, frozenset(), index[(s, 2)]))
    transitions.append(TimedTransition(reject, "a", TRUE, frozenset(), reject))
    return TimedAutomaton(
        ("a", "b"), len(labels), index[(frozenset(), 1)], clocks, tuple(transitions),
        frozenset({index[(frozenset(), 2)]}), Acceptance.REACHABILITY, f"L{k}", tuple(labels),
    )


def in_Lk(k: int, w: TimedWord) -> bool:
    """Direct membership: k distinct a-timestamps before the b, each repeated exactly one unit later after it,
    all inside the unit window before the b."""
    letters = [s for s, _ in w.letters]
    if letters.count("b") != 1:
        return False
    pos = letters.index("b")
    if pos == 0 or pos == len(letters) - 1 or set(letters) - {"a", "b"}:
        return False
    return count_good_pairs(w) >= k


def count_good_pairs(w: TimedWord) -> int:
    """Distinct a-timestamps t before the b, with t_b - 1 < t < t_b, whose t + 1 appears as an a after the b."""
    stamped = w.stamped()
    letters = [s for s, _ in stamped]
    if letters.count("b") != 1:
        return 0
    pos = letters.index("b")
    t_b = stamped[pos][1]
    before = {t for s, t in stamped[:pos] if s == "a"}
    after = {t for s, t in stamped[pos + 1 :] if s == "a"}
    return len({t for t in before if t_b - 1 < t < t_b and t + 1 in after})


def perturbation_epsilon(k: int) -> Fraction:
    return Fraction(1, 2 * (k + 2) ** 2)


def perturb_good_pair(w: TimedWord, k: int, stamp: Fraction | None = None) -> TimedWord:
    """Shift every a at t + 1 (t the given, or first, good stamp) to t + 1 + ε.

    The result keeps timestamps non-decreasing, the shifted stamp collides with no other
    repetition, and the word has one good pair fewer; otherwise InputError.
    """
    stamped = w.stamped()
    letters = [s for s, _ in stamped]
    if letters.count("b") != 1:
        raise InputError("Word must contain exactly one b")
    pos = letters.index("b")
    t_b = stamped[pos][1]
    after = {t for s, t in stamped[pos + 1 :] if s == "a"}
    good = sorted({t for s, t in stamped[:pos] if s == "a" and t_b - 1 < t < t_b and t + 1 in after})
    if not good:
        raise InputError("Word has no good pair to perturb")
    target = good[0] if stamp is None else Fraction(stamp)
    if target not in good:
        raise InputError(f"{target} is not a good stamp")
    eps = perturbation_epsilon(k)
    moved = [(s, t + eps if i > pos and s == "a" and t == target + 1 else t) for i, (s, t) in enumerate(stamped)]
    stamps = [t for _, t in moved]
    if any(a > b for a, b in zip(stamps, stamps[1:])):
        raise InputError(f"Shift by {eps} breaks the timestamp order")
    if any(target + eps == other for other in good if other != target):
        raise InputError("Shifted stamp collides with another good stamp")
    result = TimedWord.from_timestamps(moved)
    if count_good_pairs(result) != len(good) - 1:
        raise InputError("Perturbation did not remove exactly one good pair")
    return result


@dataclass
class AdamTreeVerdict:
    adam_wins: bool
    prefix: TimedWord
    behaviours: int
    undefeated: list[Configuration] = field(default_factory=list)


def adam_prefix_Lk(k: int) -> TimedWord:
    n = k + 2
    return TimedWord.from_timestamps([("a", Fraction(i, n)) for i in range(1, k + 2)] + [("b", Fraction(1))])


def adam_continuations_Lk(k: int) -> list[TimedWord]:
    """Adam's replies after the prefix: repeat every a one unit later, or all but one of them."""
    n = k + 2
    full = [("a", 1 + Fraction(i, n)) for i in range(1, k + 2)]
    replies = [full, full[:k]] + [[p for j, p in enumerate(full, start=1) if j != i] for i in range(1, k + 2)]
    unique = []
    for r in replies:
        if r not in unique:
            unique.append(r)
    return [TimedWord.from_timestamps([("b", Fraction(1))] + r) for r in unique]


def adam_tree_Lk(
    k: int, response_depth: int | None = None, frontier_limit: int = DEFAULT_FRONTIER_LIMIT
) -> AdamTreeVerdict:
    """Does Adam's letter-game strategy beat every run of build_Lk(k) on his fixed prefix?

    Each configuration reached after the prefix is one Eve behaviour; it is defeated when some reply
    keeps the whole word in L_k while every run continuing from that configuration rejects.
    """
    t = build_Lk(k)
    prefix = adam_prefix_Lk(k)
    run = run_timed(t, prefix, frontier_limit=frontier_limit)
    depth = k + 1 if response_depth is None else response_depth
    replies = [r for r in adam_continuations_Lk(k) if len(r) - 1 <= depth]
    winning_replies = []
    for reply in replies:
        suffix = TimedWord(reply.letters[1:])
        word = TimedWord(prefix.letters + suffix.letters)
        if accepts(t, word) and in_Lk(k, word):
            winning_replies.append(suffix)
    undefeated = [
        config
        for config in run.final
        if all(run_timed(t, suffix, start=[config]).accepted for suffix in winning_replies)
    ]
    logger.info(f"L{k}: {len(run.final)} Eve behaviours after the prefix, {len(undefeated)} undefeated")
    return AdamTreeVerdict(not undefeated and bool(run.final), prefix, len(run.final), undefeated)
