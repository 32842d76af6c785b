"""Arenas for the simulation game, the letter game and the 1-/2-token games.

All builders share one round structure and one stuck convention: a player who cannot move
on the declared letter loses only if the other side's token(s) could still complete an
accepting run. Winning conditions are folded into priorities {0, 1, 2} (max-even) carried
by the round-start node that follows each round.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum

from arena import Arena, ArenaBuilder, Play, Player
from automaton import Acceptance, Automaton, totalize
from errors import AlphabetMismatchError, InconsistencyError, NonDeterministicMonitorError, UnsupportedAcceptanceError
from parity import solve_parity3

logger = logging.getLogger(__name__)


class GameKind(str, Enum):
    SIM = "sim"
    G1 = "g1"
    G2 = "g2"


class Condition(str, Enum):
    """How a token's per-round event is read: seen infinitely often (BUCHI) or finitely often (COBUCHI)."""

    BUCHI = "buchi"
    COBUCHI = "cobuchi"


# ---- node payloads ----


@dataclass(frozen=True)
class RoundNode:
    """Adam to declare the next letter (and, in Sim, his transition)."""

    eve: int
    adam: tuple
    lost: bool
    done: bool
    bit: int
    prio: int


@dataclass(frozen=True)
class EveNode:
    letter: str
    eve: int
    adam: tuple
    lost: bool
    done: bool
    bit: int
    adam_transition: int | None = None


@dataclass(frozen=True)
class AdamNode:
    letter: str
    eve: int
    adam: tuple
    lost: bool
    done: bool
    bit: int
    eve_transition: int


@dataclass(frozen=True)
class TerminalNode:
    winner: Player
    reason: str


@dataclass(frozen=True)
class MonitorPair:
    """Subject automaton with a deterministic monitor for its language; the monitor is totalized."""

    subject: Automaton
    monitor: Automaton

    def __post_init__(self):
        if self.subject.alphabet != self.monitor.alphabet:
            raise AlphabetMismatchError(self.subject.alphabet, self.monitor.alphabet)
        if not self.monitor.is_deterministic:
            raise NonDeterministicMonitorError()
        object.__setattr__(self, "monitor", totalize(self.monitor))


@dataclass
class TokenGame:
    kind: GameKind
    arena: Arena
    eve: Automaton
    adam: Automaton

    @property
    def eve_condition(self) -> Condition:
        return Condition.COBUCHI if self.eve.acceptance in (Acceptance.COBUCHI, Acceptance.SAFETY) else Condition.BUCHI

    @property
    def adam_condition(self) -> Condition:
        return Condition.COBUCHI if self.adam.acceptance is Acceptance.COBUCHI else Condition.BUCHI


def close_round(eve: Condition, adam: Condition, e: bool, a: bool, bit: int) -> tuple[int, int]:
    """Priority and next degeneralization bit for one round.

    Eve wins iff her run accepts or Adam's run rejects. `e` and `a` are the round's events
    for Eve's and Adam's token, read per their Condition.
    """
    if eve is Condition.BUCHI and adam is Condition.BUCHI:
        return (2 if e else 1 if a else 0), 0
    if eve is Condition.BUCHI:
        return (2 if e or a else 1), 0
    if adam is Condition.COBUCHI:
        return (2 if a else 1 if e else 0), 0
    # Adam wins iff both events recur: bit 0 waits for e, bit 1 waits for a.
    if bit == 0:
        if e and a:
            return 1, 0
        return 0, (1 if e else 0)
    return (1, 0) if a else (0, 1)


def close_round_two_tokens(e: bool, a1: bool, a2: bool, bit: int) -> tuple[int, int]:
    """coBüchi two-token round: Eve wins iff her marks stop or both Adam tokens keep marking."""
    if bit == 0:
        if a1 and a2:
            complete, nxt = True, 0
        else:
            complete, nxt = False, (1 if a1 else 0)
    else:
        complete, nxt = (True, 0) if a2 else (False, 1)
    return (2 if complete else 1 if e else 0), nxt


class _TokenGameBuilder:
    def __init__(self, kind: GameKind, eve: Automaton, adam: Automaton, node_limit: int | None):
        if eve.alphabet != adam.alphabet:
            raise AlphabetMismatchError(eve.alphabet, adam.alphabet)
        self.kind = kind
        self.eve = eve
        self.adam = adam
        self.builder = ArenaBuilder(node_limit)
        self.game = TokenGame(kind, self.builder.arena, eve, adam)
        self.eve_cond = self.game.eve_condition
        self.adam_cond = self.game.adam_condition

    # ---- conventions ----

    def _adam_continues(self, t: int) -> bool:
        tr = self.adam.transitions[t]
        live = tr.dst in self.adam.live_states
        match self.adam.acceptance:
            case Acceptance.REACHABILITY:
                return tr.mark or live
            case Acceptance.SAFETY:
                return not tr.mark and live
            case _:
                return live

    def _eve_event(self, t: int, lost: bool) -> bool:
        match self.eve.acceptance:
            case Acceptance.SAFETY:
                return lost
            case Acceptance.REACHABILITY:
                return False
            case _:
                return self.eve.transitions[t].mark

    def _adam_event(self, t: int | None, done: bool) -> bool:
        match self.adam.acceptance:
            case Acceptance.SAFETY:
                return True
            case Acceptance.REACHABILITY:
                return done
            case _:
                return t is not None and self.adam.transitions[t].mark

    def _terminal(self, winner: Player, reason: str) -> int:
        return self.builder.node(TerminalNode(winner, reason), winner, 0, winner)

    # ---- node creation ----

    def _round(self, eve: int, adam: tuple, lost: bool, done: bool, bit: int, prio: int) -> int:
        payload = RoundNode(eve, adam, lost, done, bit, prio)
        if self.kind is GameKind.SIM and not done:
            if not any(self.adam.out(adam[0], letter) for letter in self.adam.alphabet):
                return self._terminal(Player.EVE, "adam_stuck")
        if self.kind is GameKind.G2 and all(s is None for s in adam):
            return self._terminal(Player.EVE, "adam_stuck")
        return self.builder.node(payload, Player.ADAM, prio)

    def _eve(self, payload: EveNode) -> int:
        if self.eve.out(payload.eve, payload.letter):
            return self.builder.node(payload, Player.EVE)
        return self._terminal(Player.ADAM if self._adam_wins_when_eve_stuck(payload) else Player.EVE, "eve_stuck")

    def _adam_wins_when_eve_stuck(self, node: EveNode) -> bool:
        if node.done:
            return True
        if self.kind is GameKind.SIM:
            return node.adam[0] in self.adam.live_states
        return any(
            self._adam_continues(t) for s in node.adam if s is not None for t in self.adam.out(s, node.letter)
        )

    def _adam(self, payload: AdamNode) -> int:
        if any(self.adam.out(s, payload.letter) for s in payload.adam if s is not None):
            return self.builder.node(payload, Player.ADAM)
        return self._terminal(Player.EVE, "adam_stuck")

    # ---- expansion ----

    def build(self) -> TokenGame:
        adam_start = (self.adam.initial,) * (2 if self.kind is GameKind.G2 else 1)
        self.builder.arena.initial = self._round(self.eve.initial, adam_start, False, False, 0, 0)
        arena = self.builder.arena
        for node in self.builder.pending():
            payload = arena.payloads[node]
            if isinstance(payload, RoundNode):
                self._expand_round(node, payload)
            elif isinstance(payload, EveNode):
                self._expand_eve(node, payload)
            else:
                self._expand_adam(node, payload)
        self.builder.finish()
        return self.game

    def _expand_round(self, node: int, p: RoundNode) -> None:
        arena = self.builder.arena
        for letter in self.adam.alphabet:
            if self.kind is not GameKind.SIM:
                target = self._eve(EveNode(letter, p.eve, p.adam, p.lost, p.done, p.bit))
                arena.add_edge(node, target, ("letter", letter))
                continue
            if p.done:
                target = self._eve(EveNode(letter, p.eve, p.adam, p.lost, True, p.bit))
                arena.add_edge(node, target, ("sim", letter, None))
                continue
            for t in self.adam.out(p.adam[0], letter):
                tr = self.adam.transitions[t]
                if tr.mark and self.adam.acceptance is Acceptance.SAFETY:
                    target = self._terminal(Player.EVE, "adam_unsafe")
                else:
                    done = tr.mark and self.adam.acceptance is Acceptance.REACHABILITY
                    target = self._eve(EveNode(letter, p.eve, (tr.dst,), p.lost, done, p.bit, t))
                arena.add_edge(node, target, ("sim", letter, t))

    def _expand_eve(self, node: int, p: EveNode) -> None:
        arena = self.builder.arena
        for t in self.eve.out(p.eve, p.letter):
            tr = self.eve.transitions[t]
            if tr.mark and self.eve.acceptance is Acceptance.REACHABILITY:
                arena.add_edge(node, self._terminal(Player.EVE, "eve_reached"), ("eve", t))
                continue
            lost = p.lost or (tr.mark and self.eve.acceptance is Acceptance.SAFETY)
            if self.kind is GameKind.SIM or p.done:
                e = self._eve_event(t, lost)
                a = self._adam_event(p.adam_transition, p.done)
                prio, bit = close_round(self.eve_cond, self.adam_cond, e, a, p.bit)
                target = self._round(tr.dst, p.adam, lost, p.done, bit, prio)
            else:
                target = self._adam(AdamNode(p.letter, tr.dst, p.adam, lost, p.done, p.bit, t))
            arena.add_edge(node, target, ("eve", t))

    def _expand_adam(self, node: int, p: AdamNode) -> None:
        arena = self.builder.arena
        e = self._eve_event(p.eve_transition, p.lost)
        if self.kind is GameKind.G2:
            self._expand_adam_two_tokens(node, p, e)
            return
        for t in self.adam.out(p.adam[0], p.letter):
            tr = self.adam.transitions[t]
            if tr.mark and self.adam.acceptance is Acceptance.SAFETY:
                target = self._terminal(Player.EVE, "adam_unsafe")
            else:
                done = tr.mark and self.adam.acceptance is Acceptance.REACHABILITY
                prio, bit = close_round(self.eve_cond, self.adam_cond, e, self._adam_event(t, done), p.bit)
                target = self._round(p.eve, (tr.dst,), p.lost, done, bit, prio)
            arena.add_edge(node, target, ("adam", t))

    def _expand_adam_two_tokens(self, node: int, p: AdamNode, e: bool) -> None:
        arena = self.builder.arena
        options = [self.adam.out(s, p.letter) if s is not None else () for s in p.adam]
        options = [opts or (None,) for opts in options]
        for t1, t2 in itertools.product(*options):
            marks = [None if t is None else self.adam.transitions[t].mark for t in (t1, t2)]
            states = tuple(None if t is None else self.adam.transitions[t].dst for t in (t1, t2))
            if self.adam.acceptance is Acceptance.BUCHI:
                prio, bit = close_round(self.eve_cond, Condition.BUCHI, e, any(m is True for m in marks), p.bit)
            else:
                a1, a2 = (m is None or m for m in marks)
                prio, bit = close_round_two_tokens(e, a1, a2, p.bit)
            arena.add_edge(node, self._round(p.eve, states, p.lost, False, bit, prio), ("adam2", (t1, t2)))


# ---- public builders ----


def build_sim_game(b: Automaton, a: Automaton, node_limit: int | None = None) -> TokenGame:
    """Sim(b, a): Adam picks a letter and a transition of `a`, Eve answers in `b`."""
    return _TokenGameBuilder(GameKind.SIM, b, a, node_limit).build()


def build_g1_two(a_prime: Automaton, a: Automaton, node_limit: int | None = None) -> TokenGame:
    """G1(a_prime, a): Adam declares a letter, Eve moves in `a_prime`, then Adam moves in `a`."""
    return _TokenGameBuilder(GameKind.G1, a_prime, a, node_limit).build()


def build_letter_game(mp: MonitorPair, node_limit: int | None = None) -> TokenGame:
    """Letter game: Eve builds a run of the subject while the monitor tracks Adam's word."""
    return _TokenGameBuilder(GameKind.G1, mp.subject, mp.monitor, node_limit).build()


def build_g2(a: Automaton, node_limit: int | None = None) -> TokenGame:
    if a.acceptance not in (Acceptance.BUCHI, Acceptance.COBUCHI):
        raise UnsupportedAcceptanceError(
            f"G2 is built for Büchi/coBüchi automata; use build_g1_two(a, a) for {a.acceptance.value}"
        )
    return _TokenGameBuilder(GameKind.G2, a, a, node_limit).build()


def eve_wins(game: TokenGame) -> bool:
    return solve_parity3(game.arena).winner_at(game.arena.initial) is Player.EVE


def simulates(b: Automaton, a: Automaton, node_limit: int | None = None) -> bool:
    """True iff Eve wins Sim(b, a), i.e. `b` simulates `a`."""
    return eve_wins(build_sim_game(b, a, node_limit))


@dataclass(frozen=True)
class HdVerdict:
    """History-determinism verdict plus the verdict of every decision path that ran."""

    history_deterministic: bool
    paths: dict[str, bool]

    def __bool__(self) -> bool:
        return self.history_deterministic


def is_history_deterministic(
    a: Automaton, monitor: Automaton | None = None, node_limit: int | None = None
) -> HdVerdict:
    """Decide HD by token games and/or the letter game against a monitor.

    Safety/reachability use G1(a, a); Büchi/coBüchi use G2(a). With a monitor the letter game
    runs too and both verdicts must agree.
    """
    paths: dict[str, bool] = {}
    if a.acceptance in (Acceptance.SAFETY, Acceptance.REACHABILITY):
        paths["g1"] = eve_wins(build_g1_two(a, a, node_limit))
    elif a.acceptance in (Acceptance.BUCHI, Acceptance.COBUCHI):
        paths["g2"] = eve_wins(build_g2(a, node_limit))
    if monitor is not None:
        paths["letter_game"] = eve_wins(build_letter_game(MonitorPair(a, monitor), node_limit))
    if not paths:
        raise UnsupportedAcceptanceError(f"No decision path for {a.acceptance.value} without a monitor")
    verdicts = set(paths.values())
    if len(verdicts) > 1:
        logger.error(f"Decision paths disagree on {a.name or 'automaton'}: {paths}")
        raise InconsistencyError("Decision paths disagree", {"paths": paths, "automaton": a.name})
    return HdVerdict(verdicts.pop(), paths)


# ---- play-level oracle ----


def classify_play(game: TokenGame, play: Play) -> Player:
    """Winner of a fixed play read directly off the prose condition.

    Eve wins iff her run accepts or Adam's run rejects; ended plays keep their terminal verdict.
    """
    arena = game.arena
    if play.terminal is not None:
        return arena.winners[play.terminal]
    eve_marks: list[bool] = []
    adam_marks: list[list[bool]] = [[], []]
    for edge in play.cycle_edges:
        label = arena.edges[edge].label
        if label[0] == "eve":
            eve_marks.append(game.eve.transitions[label[1]].mark)
        elif label[0] == "sim" and label[2] is not None:
            adam_marks[0].append(game.adam.transitions[label[2]].mark)
        elif label[0] == "adam":
            adam_marks[0].append(game.adam.transitions[label[1]].mark)
        elif label[0] == "adam2":
            for i, t in enumerate(label[1]):
                adam_marks[i].append(True if t is None else game.adam.transitions[t].mark)
    rounds = [arena.payloads[v] for v in play.cycle if isinstance(arena.payloads[v], RoundNode)]
    lost = any(r.lost for r in rounds)
    done = any(r.done for r in rounds)

    match game.eve.acceptance:
        case Acceptance.BUCHI:
            eve_accepts = any(eve_marks)
        case Acceptance.COBUCHI:
            eve_accepts = not any(eve_marks)
        case Acceptance.SAFETY:
            eve_accepts = not lost
        case _:
            eve_accepts = False

    tokens = adam_marks if game.kind is GameKind.G2 else adam_marks[:1]
    match game.adam.acceptance:
        case Acceptance.BUCHI:
            adam_accepts = any(any(marks) for marks in tokens)
        case Acceptance.COBUCHI:
            adam_accepts = any(not any(marks) for marks in tokens)
        case Acceptance.SAFETY:
            adam_accepts = True
        case _:
            adam_accepts = done

    return Player.EVE if eve_accepts or not adam_accepts else Player.ADAM
