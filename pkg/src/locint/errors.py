"""Exception hierarchy shared by every locint module."""


class LocintError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(LocintError):
    """A system file or pattern literal could not be parsed."""


class CapExceeded(LocintError):
    """An enumeration would exceed a configured size cap."""

    def __init__(self, what, size, cap):
        super().__init__(f"{what} size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class ImpossiblePattern(LocintError):
    """An operation needed positive probability but the pattern has none."""


class UndefinedCli(LocintError):
    """Complete local integration requested for a pattern without
    a nontrivial partition (singleton or empty domain)."""


class PerceptionNotUnique(LocintError):
    """Co-perception entities interpenetrate, so a mutually exclusive
    proxy subset must be chosen explicitly by the caller."""
