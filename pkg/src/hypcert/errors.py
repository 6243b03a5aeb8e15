"""Exception types shared across the package."""


class HypcertError(Exception):
    """Base class for all hypcert errors."""


class DomainViolation(HypcertError):
    """A function was applied outside its real domain.

    Carries the function name, the offending interval endpoint(s) and, when
    raised during expression evaluation, the path of the failing node.
    """

    def __init__(self, function, detail, node_path=None):
        self.function = function
        self.detail = detail
        self.node_path = node_path
        where = "" if node_path is None else f" at node {'/'.join(map(str, node_path)) or '<root>'}"
        super().__init__(f"domain violation in {function}{where}: {detail}")


class DivisionByIntervalContainingZero(HypcertError):
    pass


class OverflowRange(HypcertError):
    """A result endpoint left the backend's exponent range (refuse, never clamp)."""


class DegenerateInterval(HypcertError):
    """bisect() needs positive width."""


class ParseError(HypcertError):
    """Statement text does not conform to the grammar; offset is in bytes."""

    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} (at offset {offset})")


class UnknownFunction(ParseError):
    def __init__(self, name, offset):
        self.name = name
        super().__init__(f"unknown function {name!r}", offset)


class NonIntegerExponent(ParseError):
    def __init__(self, offset):
        super().__init__("exponent must be an integer literal", offset)


class UnboundVariable(HypcertError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"variable {name!r} is not bound")


class MalformedCertificate(HypcertError):
    pass


class BudgetExhausted(HypcertError):
    """Internal signal; surfaces as an Undetermined/budget_exhausted status, never escapes."""
