"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class SocketKitError(Exception):
    """Base class for every error raised by socketkit."""


class ParseError(SocketKitError, ValueError):
    """Malformed text input. Carries a 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class UnknownGenerator(SocketKitError, KeyError):
    def __init__(self, name: str, context: str = ""):
        self.name = name
        msg = f"unknown generator {name!r}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return self.args[0]


class InvalidSpec(SocketKitError, ValueError):
    pass


# surfaces
class NotHyperbolicSurface(SocketKitError, ValueError):
    pass


class AlreadyOrientable(SocketKitError, ValueError):
    pass


class InconsistentLift(SocketKitError, ValueError):
    pass


class NonIntegralGenus(SocketKitError, ValueError):
    pass


# presentations
class NotClosed(SocketKitError, ValueError):
    pass


class UnsupportedSurface(SocketKitError, ValueError):
    pass


class RelatorNotKilled(SocketKitError, ValueError):
    pass


class NotTransitive(SocketKitError, ValueError):
    pass


# sockets
class NoWitness(SocketKitError):
    pass


class TooLarge(SocketKitError, ValueError):
    pass


# graphs
class DegreeOverflow(SocketKitError):
    pass


class InvalidGraph(SocketKitError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid graph: {lines}")


class NotConnected(SocketKitError, ValueError):
    pass
