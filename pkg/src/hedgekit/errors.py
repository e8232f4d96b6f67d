"""Exception hierarchy.

Every error raised by hedgekit derives from :class:`HedgekitError`.  The three
direct subclasses map onto the CLI exit codes (config 2, data 3, provider 4).
"""


class HedgekitError(Exception):
    exit_code = 1


class ConfigError(HedgekitError):
    exit_code = 2


class DataError(HedgekitError):
    exit_code = 3


class ProviderError(HedgekitError):
    exit_code = 4


# -- configuration ---------------------------------------------------------

class InvalidConfig(ConfigError):
    pass


# -- data ------------------------------------------------------------------

class EmptyInput(DataError):
    pass


class ZeroWeightSum(DataError):
    pass


class UnsortedInput(DataError):
    pass


class TooShort(DataError):
    pass


class ZeroVolatility(DataError):
    pass


class NonPositiveEquity(DataError):
    pass


class InsufficientData(DataError):
    pass


class MisalignedSeries(DataError):
    pass


class EmptyLexicon(DataError):
    pass


class ParseError(DataError):
    """A malformed row in an input file; ``line`` is 1-based and counts the header."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonPositivePrice(ParseError):
    pass


class NonMonotoneDays(ParseError):
    pass


# -- providers ---------------------------------------------------------------

class ProviderUnavailable(ProviderError):
    pass


class Timeout(ProviderError):
    pass


class MalformedResponse(ProviderError):
    pass


class HTTPError(ProviderError):
    def __init__(self, status, message=""):
        self.status = status
        super().__init__(f"HTTP {status}" + (f": {message}" if message else ""))
