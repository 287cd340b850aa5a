"""Exception types shared across the package."""


class MenuAdaptError(Exception):
    """Base class for all package errors."""


class InvalidSelector(MenuAdaptError):
    """A selector string does not conform to the supported grammar."""


class NoMenuMatched(MenuAdaptError):
    """The menu selector matched no node in the document."""


class InvalidInterval(MenuAdaptError):
    """A visit interval ends before it starts."""


class CorruptStore(MenuAdaptError):
    """Persisted store text cannot be decoded into an event database."""


class StaleTarget(MenuAdaptError):
    """A mutation references an element id that no longer resolves."""


class AlreadyApplied(MenuAdaptError):
    """A plan was applied to a document that already has an active adaptation."""
