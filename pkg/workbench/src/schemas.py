"""
Pydantic documents for the JSON file formats read and written by the CLI.

Field names follow the on-disk format; camelCase keys are declared as aliases and the models
accept either spelling.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

AcceptanceName = Literal["safety", "reachability", "buchi", "cobuchi"]
PlayerName = Literal["eve", "adam"]


class Document(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")


# ---- finite automata ----


class TransitionDocument(Document):
    src: int = Field(ge=0)
    letter: str
    dst: int = Field(ge=0)
    mark: bool = Field(default=False, description="Marked transitions carry the acceptance condition")


class AutomatonDocument(Document):
    """Finite automaton over infinite words with transition-based acceptance."""

    name: str = ""
    alphabet: list[str] = Field(min_length=1)
    states: int = Field(ge=1, description="Number of states; states are 0..states-1")
    initial: int = Field(default=0, ge=0)
    acceptance: AcceptanceName
    transitions: list[TransitionDocument] = Field(default_factory=list)


# ---- arenas and results ----


class ArenaNodeDocument(Document):
    owner: PlayerName
    priority: Literal[0, 1, 2] = Field(default=0, description="Max-even parity priority")
    winner: PlayerName | None = Field(default=None, description="Declared winner of a terminal node")


class ArenaEdgeDocument(Document):
    src: int = Field(ge=0)
    dst: int = Field(ge=0)
    label: str | None = None


class ArenaDocument(Document):
    """Turn-based game graph; nodes without out-edges must declare a winner."""

    initial: int = Field(default=0, ge=0)
    nodes: list[ArenaNodeDocument] = Field(min_length=1)
    edges: list[ArenaEdgeDocument] = Field(default_factory=list)


class GameResultDocument(Document):
    winners: list[PlayerName] = Field(description="Winner per node")
    strategies: dict[PlayerName, dict[int, int]] = Field(
        description="Per player, the chosen out-edge index of every node in that player's winning region"
    )


# ---- visibly pushdown automata ----


class LetterClassesDocument(Document):
    push: list[str] = Field(default_factory=list)
    pop: list[str] = Field(default_factory=list)
    noop: list[str] = Field(default_factory=list)


class VpaTransitionDocument(Document):
    src: int = Field(ge=0)
    top: str = Field(description="Stack symbol read, ⊥ for the empty stack, * for every admissible symbol")
    letter: str
    dst: int = Field(ge=0)
    push: str | None = Field(default=None, description="Symbol pushed; required exactly on push letters")
    mark: bool = False


class VpaDocument(Document):
    name: str = ""
    letter_classes: LetterClassesDocument = Field(alias="letterClasses")
    stack_alphabet: list[str] = Field(alias="stackAlphabet", min_length=1)
    states: int = Field(ge=1)
    initial: int = Field(default=0, ge=0)
    acceptance: AcceptanceName
    transitions: list[VpaTransitionDocument] = Field(default_factory=list)


# ---- uniform automata ----


class LinearSetDocument(Document):
    base: list[int]
    periods: list[list[int]] = Field(default_factory=list)


class ContentDocument(Document):
    kind: Literal["pda", "counter", "parikh"]
    stack_alphabet: list[str] | None = Field(default=None, alias="stackAlphabet")
    empty_accepting: bool = Field(default=False, alias="emptyAccepting")
    dimension: int | None = Field(default=None, ge=1)
    semilinear: list[LinearSetDocument] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_kind(self) -> ContentDocument:
        if self.kind == "pda" and not self.stack_alphabet:
            raise ValueError("pda content needs a stackAlphabet")
        if self.kind != "pda" and self.dimension is None:
            raise ValueError(f"{self.kind} content needs a dimension")
        return self


class UniformTransitionDocument(Document):
    src: int = Field(ge=0)
    letter: str | None = Field(default=None, description="null is an ε-transition")
    update: str = Field(default="id", description="push:X:Y, pop:X, comma-separated increments, or id")
    dst: int = Field(ge=0)


class UniformDocument(Document):
    name: str = ""
    alphabet: list[str] = Field(min_length=1)
    states: int = Field(ge=1)
    initial: int = Field(default=0, ge=0)
    accepting: list[int] = Field(default_factory=list)
    content: ContentDocument
    semantics: Literal["safety", "sync-reach", "async-reach"]
    transitions: list[UniformTransitionDocument] = Field(default_factory=list)


# ---- timed automata ----


class GuardDocument(Document):
    """One guard node: an atom (clock, op, constant), or exactly one of all / any / not."""

    clock: str | None = None
    op: Literal["<", "<=", "=", ">=", ">"] | None = None
    constant: int | None = Field(default=None, ge=0)
    all_: list[GuardDocument] | None = Field(default=None, alias="all")
    any_: list[GuardDocument] | None = Field(default=None, alias="any")
    not_: GuardDocument | None = Field(default=None, alias="not")

    @model_validator(mode="after")
    def check_form(self) -> GuardDocument:
        atom = (self.clock, self.op, self.constant)
        forms = [all(x is not None for x in atom), self.all_ is not None, self.any_ is not None, self.not_ is not None]
        if sum(forms) != 1 or (not forms[0] and any(x is not None for x in atom)):
            raise ValueError("A guard is an atom or exactly one of all/any/not")
        return self


class TimedTransitionDocument(Document):
    src: int = Field(ge=0)
    letter: str
    guard: list[GuardDocument] = Field(default_factory=list, description="Conjunction; empty means true")
    resets: list[str] = Field(default_factory=list)
    dst: int = Field(ge=0)


class TimedDocument(Document):
    name: str = ""
    alphabet: list[str] = Field(min_length=1)
    states: int = Field(ge=1)
    initial: int = Field(default=0, ge=0)
    clocks: list[str]
    accepting: list[int] = Field(default_factory=list)
    acceptance: Literal["safety", "reachability"] = "reachability"
    transitions: list[TimedTransitionDocument] = Field(default_factory=list)


class TimedWordDocument(Document):
    letters: list[tuple[str, str]] = Field(description='Pairs [letter, "p/q"] of absolute timestamps')


# ---- reports ----


class SpoilerCertificateDocument(Document):
    sim_verdict: Literal["adam", "eve"] = Field(alias="simVerdict", description="Winner of Sim(A, B')")
    lassos_tested: int = Field(alias="lassosTested")
    linear: bool | None = None


class ReportDocument(Document):
    """Result of one CLI command. With the recorded seed every counterexample is reproducible."""

    command: str
    ok: bool
    inputs: dict[str, str] = Field(default_factory=dict, description="Input path to SHA-256 of its contents")
    verdicts: dict[str, Any] = Field(default_factory=dict)
    counterexamples: list[str] = Field(default_factory=list, description="Lassos, words or plays, printed")
    timings: dict[str, float] = Field(default_factory=dict, description="Seconds per stage")
    seed: int | None = None
    details: dict[str, Any] = Field(default_factory=dict)


GuardDocument.model_rebuild()
