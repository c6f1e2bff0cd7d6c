"""Exception hierarchy. The CLI maps any ``SlowAdsError`` to exit code 1."""


class SlowAdsError(Exception):
    pass


class CorpusError(SlowAdsError):
    pass


class AlignmentError(CorpusError):
    pass


class FreqTableError(SlowAdsError):
    pass


class DictionaryFormatError(SlowAdsError):
    """Model response has no ``dictionary:`` line."""


class DictionaryParseError(SlowAdsError):
    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at offset {offset})")
        self.offset = offset


class EmptyDictionaryError(DictionaryParseError):
    pass


class StoreError(SlowAdsError):
    pass


class EmptyResponseError(SlowAdsError):
    pass


class LlmError(SlowAdsError):
    def __init__(self, message: str, status: int | None = None, attempts: int = 0):
        super().__init__(message)
        self.status = status
        self.attempts = attempts


class AuthError(LlmError):
    pass


class RetriesExhausted(LlmError):
    pass


class MetricError(SlowAdsError):
    pass


class ConfigError(SlowAdsError):
    pass


class StatsError(SlowAdsError):
    pass
