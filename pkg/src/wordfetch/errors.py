"""Exception types shared across the package."""


class WordfetchError(Exception):
    """Base class for all package errors."""


class InvalidInputError(WordfetchError, ValueError):
    """A caller-supplied value violates an operation's preconditions."""


class LexiconParseError(WordfetchError, ValueError):
    """A lexicon document failed to parse or validate.

    ``line`` and ``column`` are 1-based when known, else None.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class SchemaVersionError(WordfetchError, ValueError):
    """A document carries an unsupported schema_version."""


class InvalidStateError(WordfetchError, RuntimeError):
    """An operation was applied against mismatched or stale state."""


class CorruptLedgerError(WordfetchError, ValueError):
    """An episode ledger violates its ordering invariants."""


class ArenaConstructionError(WordfetchError, ValueError):
    """An arena could not be built so that every object is perceivable."""


class InvalidObjectError(WordfetchError, ValueError):
    """A simulated object has degenerate geometry."""


class NoDistinguishingExpressionError(WordfetchError, ValueError):
    """No attribute set separates the target from every distractor."""


class UnknownLexemeError(WordfetchError, KeyError):
    """An expression contains a token the grammar does not know."""


class ConfigurationError(WordfetchError, ValueError):
    """A config file is malformed or internally inconsistent."""
