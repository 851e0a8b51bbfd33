"""Exception types shared across the engine."""


class LibrankError(Exception):
    """Base class for all engine faults."""


class DuplicateRecordError(LibrankError):
    def __init__(self, record_id: str):
        super().__init__(f"duplicate record_id: {record_id}")
        self.record_id = record_id


class UnknownRecordError(LibrankError):
    def __init__(self, record_id: str):
        super().__init__(f"unknown record_id: {record_id}")
        self.record_id = record_id


class EmptyQueryError(LibrankError):
    def __init__(self) -> None:
        super().__init__("empty query")


class ConfigError(LibrankError):
    pass


class EngineStateError(LibrankError):
    """Raised when an operation needs a catalog generation and none exists."""
