"""Exception hierarchy shared by every module of the package."""


class ICQError(Exception):
    """Base class for all errors raised by :mod:`icq`."""


class ParameterError(ICQError, ValueError):
    """An argument is outside the documented domain (bad K, delta, B, ...)."""


class EncodingError(ICQError, ValueError):
    """A value cannot be quantized, typically because it is not finite."""


class ProtocolError(ICQError, ValueError):
    """A bit string or wire frame is malformed."""


class DomainError(ICQError, ValueError):
    """A closed-form expression was evaluated outside its domain."""


class ScheduleError(ICQError, OverflowError):
    """The pull schedule no longer fits in a 64-bit unsigned counter."""


class SearchExhaustedError(ICQError, RuntimeError):
    """A brute-force search ran out of candidates."""


class TrialError(ICQError, RuntimeError):
    """A trial inside a sweep failed; the message names the sweep point."""
