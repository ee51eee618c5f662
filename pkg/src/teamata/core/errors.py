"""
Exception hierarchy
"""
from typing import Optional


class TeamataError(Exception):
    """Base class for all toolkit errors"""


class ModelError(TeamataError):
    """Invalid LTS, component automaton, system or global model"""


class SpecIncompleteError(TeamataError):
    """A communicating action has no synchronisation type"""

    def __init__(self, action: str, where: str = ""):
        self.action = action
        suffix = f" ({where})" if where else ""
        super().__init__(f"no synchronisation type for communicating action '{action}'{suffix}")


class NonCommunicatingActionError(TeamataError):
    """An operation required a communicating action"""

    def __init__(self, action: str):
        self.action = action
        super().__init__(f"action '{action}' is not communicating")


class ForeignRequirementError(TeamataError):
    """Requirement does not belong to the team it is checked against"""


class ModelIllFormedError(ModelError):
    """Global model label outside the interaction set"""


class InvalidProductError(TeamataError):
    """Product does not satisfy the feature model"""


class FeatureCapExceededError(TeamataError):
    """Too many features to enumerate products exhaustively"""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(f"{count} features exceed the enumeration cap of {cap}")


class UnknownAtomError(TeamataError):
    """PDL atom not in the model's alphabet"""


class CompositionError(TeamataError):
    """Parts of a composition plan are not composable"""


class DslError(TeamataError):
    """Lexical, syntactic or semantic error in a model document"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            super().__init__(f"{line}:{column or 0}: {message}")
        else:
            super().__init__(message)
