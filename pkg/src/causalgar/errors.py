"""Exception types shared across the package.

The CLI maps every CausalgarError to exit code 2 (bad data); anything else
that escapes is a genuine bug.
"""

from __future__ import annotations


class CausalgarError(Exception):
    """Base class for all domain errors raised by this package."""


class UnknownSource(CausalgarError):
    """A raw record names a source id that is not registered."""


class UnknownValue(CausalgarError):
    """An actuator record carries a state value outside the declared vocabulary."""


class NonFiniteValue(CausalgarError):
    """A pervasive sensor reading is NaN or infinite."""


class UnknownContext(CausalgarError):
    """A context name is not present in the context registry."""


class UnknownEvent(CausalgarError):
    """An event label has no is_about mapping."""


class UnknownGA(CausalgarError):
    """A group activity name is not known to the knowledge base."""


class EmptyGA(CausalgarError):
    """A group activity has no events, so frequency ratios are undefined."""


class MissingLabel(CausalgarError):
    """A training-only operation received an episode without a GA label."""


class InvalidThreshold(CausalgarError):
    """A support threshold fell outside (0, 1]."""


class InsufficientData(CausalgarError):
    """Training requires at least two episodes per group activity."""


class EmptyStore(CausalgarError):
    """Recognition was attempted against a store with no activities."""


class ParseError(CausalgarError):
    """A data file is malformed; carries the path and 1-based line number."""

    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class ConfigError(CausalgarError):
    """A configuration file or value is invalid."""
