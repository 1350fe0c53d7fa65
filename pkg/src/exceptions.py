"""
Custom exceptions for the superkmer counter.
"""

from typing import Optional


class SkcException(Exception):
    """Base exception for the superkmer counter."""

    pass


class ConfigurationError(SkcException):
    """Exception raised for configuration errors."""

    pass


class ContractError(SkcException):
    """Exception raised when a caller violates an operation's pre-conditions."""

    pass


class SequenceParseError(SkcException):
    """Exception raised for malformed FASTA/FASTQ input."""

    def __init__(
        self,
        message: str,
        offset: Optional[int] = None,
        record_index: Optional[int] = None,
    ):
        self.offset = offset
        self.record_index = record_index
        location = []
        if offset is not None:
            location.append(f"byte offset {offset}")
        if record_index is not None:
            location.append(f"record {record_index}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class EncodingError(SkcException):
    """Exception raised when a symbol outside ACGT is packed."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class SamplingError(SkcException):
    """Exception raised when a size-estimation sample is empty."""

    pass


class CountingMemoryError(SkcException):
    """Exception raised when a partition's count table outgrows its budget."""

    pass


class OutputError(SkcException):
    """Exception raised when writing partition output fails."""

    def __init__(self, message: str, partition_id: Optional[int] = None):
        self.partition_id = partition_id
        if partition_id is not None:
            message = f"partition {partition_id}: {message}"
        super().__init__(message)


class PipelineError(SkcException):
    """Exception raised when a pipeline stage fails."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
