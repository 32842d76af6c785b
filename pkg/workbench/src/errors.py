"""Exception hierarchy shared by the constructions, the games and the CLI."""


class WorkbenchError(Exception):
    """Base exception for workbench errors."""

    def __init__(self, code: str, message: str | None = None, context: dict | None = None):
        self.code = code
        self.context = context
        super().__init__(message or f"Workbench error: {code}")


class InputError(WorkbenchError):
    """Malformed input, unknown letter or out-of-range parameter."""

    def __init__(self, message: str, context: dict | None = None):
        super().__init__("input_error", message, context)


class AlphabetMismatchError(WorkbenchError):
    """Two automata combined in one construction disagree on the alphabet."""

    def __init__(self, left, right):
        super().__init__("alphabet_mismatch", f"Alphabets differ: {list(left)} vs {list(right)}")


class UnsupportedAcceptanceError(WorkbenchError):
    """The construction is not defined for this acceptance mode."""

    def __init__(self, message: str, context: dict | None = None):
        super().__init__("unsupported_acceptance", message, context)


class NonDeterministicMonitorError(WorkbenchError):
    def __init__(self, message: str = "Monitor must be deterministic"):
        super().__init__("nondeterministic_monitor", message)


class EpsilonBudgetError(WorkbenchError):
    """An epsilon closure kept changing content past its per-round budget."""

    def __init__(self, message: str, context: dict | None = None):
        super().__init__("epsilon_budget", message, context)


class StrategyError(WorkbenchError):
    """A strategy is partial where it must be total, or no strategy exists."""

    def __init__(self, message: str, context: dict | None = None):
        super().__init__("strategy_error", message, context)


class InvalidWitnessError(WorkbenchError):
    """Input strategies do not win the games they were claimed to win."""

    def __init__(self, message: str, context: dict | None = None):
        super().__init__("invalid_witness", message, context)


class InconsistencyError(WorkbenchError):
    """Two decision paths disagree. Either the monitor or the implementation is wrong."""

    def __init__(self, message: str, context: dict | None = None):
        super().__init__("internal_inconsistency", message, context)


class HistoryDeterministicError(WorkbenchError):
    """The subject is history-deterministic, so Adam has nothing to spoil."""

    def __init__(self, message: str = "Subject is history-deterministic; nothing to build"):
        super().__init__("history_deterministic", message)


class ProvenanceError(WorkbenchError):
    """A derived automaton was not produced from the automaton it is paired with."""

    def __init__(self, message: str):
        super().__init__("provenance_mismatch", message)


class FrontierLimitError(WorkbenchError):
    def __init__(self, limit: int):
        super().__init__("frontier_limit", f"Run frontier exceeded {limit} configurations", {"limit": limit})


class ArenaLimitError(WorkbenchError):
    def __init__(self, limit: int):
        super().__init__("arena_limit", f"Arena exceeded {limit} nodes", {"limit": limit})
