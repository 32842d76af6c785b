"""Conversions between the in-memory models and their JSON documents, plus DOT rendering."""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

import graphviz

from arena import Arena, GameResult, Player
from automaton import Acceptance, Automaton, Transition
from errors import InputError
from schemas import (
    ArenaDocument,
    ArenaEdgeDocument,
    ArenaNodeDocument,
    AutomatonDocument,
    ContentDocument,
    GameResultDocument,
    GuardDocument,
    LetterClassesDocument,
    LinearSetDocument,
    TimedDocument,
    TimedTransitionDocument,
    TimedWordDocument,
    TransitionDocument,
    UniformDocument,
    UniformTransitionDocument,
    VpaDocument,
    VpaTransitionDocument,
)
from timed import And, Atom, Not, Or, TimedAutomaton, TimedTransition, TimedWord
from uniform import (
    CounterSpace,
    LinearSet,
    ParikhSpace,
    Semantics,
    StackSpace,
    UniformAutomaton,
    UniformTransition,
    counter_space,
    parikh_space,
    pda_space,
)
from vpa import LetterClass, Vpa, VpaTransition

logger = logging.getLogger(__name__)

Model = Automaton | Arena | Vpa | UniformAutomaton | TimedAutomaton


# ---- finite automata ----


def automaton_to_document(a: Automaton) -> AutomatonDocument:
    return AutomatonDocument(
        name=a.name,
        alphabet=list(a.alphabet),
        states=a.num_states,
        initial=a.initial,
        acceptance=a.acceptance.value,
        transitions=[TransitionDocument(src=t.src, letter=t.letter, dst=t.dst, mark=t.mark) for t in a.transitions],
    )


def automaton_from_document(doc: AutomatonDocument) -> Automaton:
    transitions = tuple(Transition(t.src, t.letter, t.dst, t.mark) for t in doc.transitions)
    return Automaton(
        tuple(doc.alphabet), doc.states, doc.initial, transitions, Acceptance(doc.acceptance), doc.name
    )


# ---- arenas ----


def arena_to_document(arena: Arena) -> ArenaDocument:
    return ArenaDocument(
        initial=arena.initial,
        nodes=[
            ArenaNodeDocument(
                owner=arena.owners[v].value,
                priority=arena.priorities[v],
                winner=arena.winners[v].value if arena.winners[v] is not None else None,
            )
            for v in range(arena.num_nodes)
        ],
        edges=[
            ArenaEdgeDocument(src=e.src, dst=e.dst, label=None if e.label is None else str(e.label))
            for e in arena.edges
        ],
    )


def arena_from_document(doc: ArenaDocument) -> Arena:
    arena = Arena()
    for node in doc.nodes:
        arena.add_node(Player(node.owner), node.priority, winner=Player(node.winner) if node.winner else None)
    for edge in doc.edges:
        if edge.src >= arena.num_nodes or edge.dst >= arena.num_nodes:
            raise InputError(f"Edge {edge.src}->{edge.dst} references an unknown node")
        arena.add_edge(edge.src, edge.dst, edge.label)
    arena.initial = doc.initial
    arena.validate()
    return arena


def result_to_document(result: GameResult) -> GameResultDocument:
    return GameResultDocument(
        winners=[w.value for w in result.winners],
        strategies={player.value: dict(s.choices) for player, s in result.strategies.items()},
    )


# ---- visibly pushdown automata ----


def vpa_to_document(v: Vpa) -> VpaDocument:
    return VpaDocument(
        name=v.name,
        letter_classes=LetterClassesDocument(**{kind.value: list(v.letters_of(kind)) for kind in LetterClass}),
        stack_alphabet=list(v.gamma),
        states=v.num_states,
        initial=v.initial,
        acceptance=v.acceptance.value,
        transitions=[
            VpaTransitionDocument(src=t.src, top=t.top, letter=t.letter, dst=t.dst, push=t.push, mark=t.mark)
            for t in v.transitions
        ],
    )


def vpa_from_document(doc: VpaDocument) -> Vpa:
    classes = tuple(
        (s, kind) for kind in LetterClass for s in getattr(doc.letter_classes, kind.value)
    )
    gamma = tuple(doc.stack_alphabet)
    kinds = dict(classes)
    transitions = []
    for t in doc.transitions:
        if t.letter not in kinds:
            raise InputError(f"Transition uses letter {t.letter!r} outside the alphabet")
        if t.top == "*":
            tops = gamma if kinds[t.letter] is LetterClass.POP else gamma + ("⊥",)
        else:
            tops = (t.top,)
        transitions += [VpaTransition(t.src, top, t.letter, t.dst, t.push, t.mark) for top in tops]
    return Vpa(
        tuple(s for s, _ in classes), classes, doc.states, doc.initial, gamma, tuple(transitions),
        Acceptance(doc.acceptance), doc.name,
    )


# ---- uniform automata ----


def _content_to_document(u: UniformAutomaton) -> ContentDocument:
    space = u.space
    if isinstance(space, StackSpace):
        return ContentDocument(kind="pda", stack_alphabet=list(space.gamma), empty_accepting=space.empty_accepting)
    if isinstance(space, ParikhSpace):
        return ContentDocument(
            kind="parikh",
            dimension=space.dimension,
            semilinear=[
                LinearSetDocument(base=list(s.base), periods=[list(p) for p in s.periods]) for s in space.semilinear
            ],
        )
    if isinstance(space, CounterSpace):
        return ContentDocument(kind="counter", dimension=space.dimension)
    raise InputError(f"No document format for content space {type(space).__name__}")


def uniform_to_document(u: UniformAutomaton) -> UniformDocument:
    return UniformDocument(
        name=u.name,
        alphabet=list(u.alphabet),
        states=u.num_states,
        initial=u.initial,
        accepting=sorted(u.accepting_states),
        content=_content_to_document(u),
        semantics=u.semantics.value,
        transitions=[
            UniformTransitionDocument(src=t.src, letter=t.letter, update=t.update, dst=t.dst) for t in u.transitions
        ],
    )


def uniform_from_document(doc: UniformDocument) -> UniformAutomaton:
    content = doc.content
    match content.kind:
        case "pda":
            space = pda_space(content.stack_alphabet, content.empty_accepting)
        case "counter":
            space = counter_space(content.dimension)
        case "parikh":
            space = parikh_space(
                content.dimension,
                [LinearSet(tuple(s.base), tuple(tuple(p) for p in s.periods)) for s in content.semilinear],
            )
    transitions = tuple(UniformTransition(t.src, t.letter, t.update, t.dst) for t in doc.transitions)
    return UniformAutomaton(
        tuple(doc.alphabet), doc.states, doc.initial, transitions, frozenset(doc.accepting), space,
        Semantics(doc.semantics), doc.name,
    )


# ---- timed automata ----


def _guard_from_document(doc: GuardDocument):
    if doc.all_ is not None:
        return And(tuple(_guard_from_document(g) for g in doc.all_))
    if doc.any_ is not None:
        return Or(tuple(_guard_from_document(g) for g in doc.any_))
    if doc.not_ is not None:
        return Not(_guard_from_document(doc.not_))
    return Atom(doc.clock, doc.op, doc.constant)


def _guard_to_document(guard) -> GuardDocument:
    match guard:
        case Atom(clock=clock, op=op, constant=constant):
            return GuardDocument(clock=clock, op=op, constant=constant)
        case And(parts=parts):
            return GuardDocument(all_=[_guard_to_document(p) for p in parts])
        case Or(parts=parts):
            return GuardDocument(any_=[_guard_to_document(p) for p in parts])
        case Not(part=part):
            return GuardDocument(not_=_guard_to_document(part))
    raise InputError(f"Unknown guard {guard!r}")


def timed_to_document(t: TimedAutomaton) -> TimedDocument:
    def conjunction(guard) -> list[GuardDocument]:
        parts = guard.parts if isinstance(guard, And) else (guard,)
        return [_guard_to_document(p) for p in parts]

    return TimedDocument(
        name=t.name,
        alphabet=list(t.alphabet),
        states=t.num_states,
        initial=t.initial,
        clocks=list(t.clocks),
        accepting=sorted(t.accepting),
        acceptance=t.acceptance.value,
        transitions=[
            TimedTransitionDocument(
                src=tr.src, letter=tr.letter, guard=conjunction(tr.guard), resets=sorted(tr.resets), dst=tr.dst
            )
            for tr in t.transitions
        ],
    )


def timed_from_document(doc: TimedDocument) -> TimedAutomaton:
    transitions = []
    for tr in doc.transitions:
        parts = tuple(_guard_from_document(g) for g in tr.guard)
        guard = parts[0] if len(parts) == 1 else And(parts)
        transitions.append(TimedTransition(tr.src, tr.letter, guard, frozenset(tr.resets), tr.dst))
    return TimedAutomaton(
        tuple(doc.alphabet), doc.states, doc.initial, tuple(doc.clocks), tuple(transitions),
        frozenset(doc.accepting), Acceptance(doc.acceptance), doc.name,
    )


def timed_word_from_document(doc: TimedWordDocument) -> TimedWord:
    return TimedWord.from_timestamps(doc.letters)


def timed_word_to_document(w: TimedWord) -> TimedWordDocument:
    return TimedWordDocument(letters=[(s, str(t)) for s, t in w.stamped()])


# ---- dispatch ----


def to_document(model: Model):
    match model:
        case Automaton():
            return automaton_to_document(model)
        case Arena():
            return arena_to_document(model)
        case Vpa():
            return vpa_to_document(model)
        case UniformAutomaton():
            return uniform_to_document(model)
        case TimedAutomaton():
            return timed_to_document(model)
    raise InputError(f"No document format for {type(model).__name__}")


def from_data(data: dict) -> Model:
    """Pick the document type from the keys present and build the model."""
    if not isinstance(data, dict):
        raise InputError("Document must be a JSON object")
    if "nodes" in data:
        return arena_from_document(ArenaDocument.model_validate(data))
    if "letterClasses" in data or "letter_classes" in data:
        return vpa_from_document(VpaDocument.model_validate(data))
    if "content" in data:
        return uniform_from_document(UniformDocument.model_validate(data))
    if "clocks" in data:
        return timed_from_document(TimedDocument.model_validate(data))
    return automaton_from_document(AutomatonDocument.model_validate(data))


def dumps(model: Model) -> str:
    return to_document(model).model_dump_json(by_alias=True, indent=2, exclude_none=True)


def loads(text: str) -> Model:
    return from_data(json.loads(text))


def load(path: str | Path) -> Model:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror}") from e
    model = loads(text)
    logger.debug(f"Loaded {type(model).__name__} from {path}")
    return model


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---- DOT ----


def _start(dot: graphviz.Digraph, initial) -> None:
    dot.node("__start", "", shape="point")
    dot.edge("__start", str(initial))


def _edge(dot: graphviz.Digraph, src, dst, label: str, mark: bool) -> None:
    # Marked transitions are drawn with a double line.
    if mark:
        dot.edge(str(src), str(dst), label=label, color="black:black")
    else:
        dot.edge(str(src), str(dst), label=label)


def automaton_to_dot(a: Automaton) -> str:
    dot = graphviz.Digraph(a.name or "automaton", graph_attr={"rankdir": "LR"}, node_attr={"shape": "circle"})
    for q in range(a.num_states):
        dot.node(str(q), str(a.label(q)))
    _start(dot, a.initial)
    for t in a.transitions:
        _edge(dot, t.src, t.dst, t.letter, t.mark)
    return dot.source


def arena_to_dot(arena: Arena) -> str:
    dot = graphviz.Digraph("arena")
    for v in range(arena.num_nodes):
        if arena.is_terminal(v):
            dot.node(str(v), f"{v}\n{arena.winners[v].value} wins", shape="doubleoctagon")
        else:
            shape = "diamond" if arena.owners[v] is Player.EVE else "box"
            dot.node(str(v), f"{v}\np{arena.priorities[v]}", shape=shape)
    _start(dot, arena.initial)
    for e in arena.edges:
        dot.edge(str(e.src), str(e.dst))
    return dot.source


def vpa_to_dot(v: Vpa) -> str:
    dot = graphviz.Digraph(v.name or "vpa", graph_attr={"rankdir": "LR"}, node_attr={"shape": "circle"})
    for q in range(v.num_states):
        dot.node(str(q), str(v.state_labels[q]) if v.state_labels else str(q))
    _start(dot, v.initial)
    for t in v.transitions:
        match v.letter_class(t.letter):
            case LetterClass.PUSH:
                op = f"push {t.push}"
            case LetterClass.POP:
                op = f"pop {t.top}"
            case _:
                op = "noop"
        _edge(dot, t.src, t.dst, f"{t.letter} [{t.top}] / {op}", t.mark)
    return dot.source


def uniform_to_dot(u: UniformAutomaton) -> str:
    dot = graphviz.Digraph(u.name or "uniform", graph_attr={"rankdir": "LR"}, node_attr={"shape": "circle"})
    for q in range(u.num_states):
        dot.node(str(q), str(q), shape="doublecircle" if q in u.accepting_states else "circle")
    _start(dot, u.initial)
    for t in u.transitions:
        _edge(dot, t.src, t.dst, f"{t.letter if t.letter is not None else 'ε'} / {t.update}", False)
    return dot.source


def timed_to_dot(t: TimedAutomaton) -> str:
    dot = graphviz.Digraph(t.name or "timed", graph_attr={"rankdir": "LR"}, node_attr={"shape": "circle"})
    for q in range(t.num_states):
        dot.node(str(q), str(t.label(q)), shape="doublecircle" if q in t.accepting else "circle")
    _start(dot, t.initial)
    for tr in t.transitions:
        resets = f" / {{{', '.join(sorted(tr.resets))}}}" if tr.resets else ""
        _edge(dot, tr.src, tr.dst, f"{tr.letter}, {tr.guard}{resets}", False)
    return dot.source


def to_dot(model: Model) -> str:
    match model:
        case Automaton():
            return automaton_to_dot(model)
        case Arena():
            return arena_to_dot(model)
        case Vpa():
            return vpa_to_dot(model)
        case UniformAutomaton():
            return uniform_to_dot(model)
        case TimedAutomaton():
            return timed_to_dot(model)
    raise InputError(f"No DOT rendering for {type(model).__name__}")
