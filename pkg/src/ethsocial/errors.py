import typing


class EthSocialError(Exception):
    """Base class for all errors raised by ethsocial"""


class MalformedInputError(EthSocialError, ValueError):
    pass


class MalformedSignatureError(MalformedInputError):
    pass


class InvalidKeyError(MalformedInputError):
    pass


class InvalidSubstitutionError(MalformedInputError):
    pass


class ConfusablesParseError(MalformedInputError):
    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class SourceEncodingError(MalformedInputError):
    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"byte offset {byte_offset}: {message}")
        self.byte_offset = byte_offset


class BundleParseError(MalformedInputError):
    pass


class NotFoundError(EthSocialError):
    """A search exhausted its budget without a result

    The `stats` mapping carries whatever counters the search kept (attempts,
    candidates, trials, elapsed_ms) so callers can report them.
    """

    def __init__(self, message: str, stats: typing.Optional[typing.Dict] = None):
        super().__init__(message)
        self.stats = dict(stats or {})


class MiningWorkerError(EthSocialError):
    """A parallel search worker failed before any worker found a result"""


class TransportError(EthSocialError):
    pass


class NotAvailableError(EthSocialError):
    """The explorer answered but has no verified source for the address"""


class UnsupportedSourceError(EthSocialError):
    """The input holds no Solidity source and is skipped"""
