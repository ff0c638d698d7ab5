from __future__ import annotations

from typing import Iterable, Optional

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_STAGE = 4


class TransmapError(ValueError):
    """Base class for every error the toolkit raises on purpose."""

    exit_code = EXIT_STAGE


class ConfigParseError(TransmapError):
    exit_code = EXIT_CONFIG


class InputError(TransmapError):
    exit_code = EXIT_INPUT


class MissingInputFile(InputError):
    def __init__(self, path: str):
        super().__init__(f"{path}: no such file")
        self.path = path


class ParseError(InputError):
    """Input error positioned at a 1-based line of a named source."""

    def __init__(self, message: str, line: Optional[int] = None, source: str = "<stream>"):
        self.message = message
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


class MalformedHeader(ParseError):
    pass


class MalformedRecord(ParseError):
    pass


class MissingFileTerminator(ParseError):
    pass


class DuplicateRecordId(ParseError):
    def __init__(self, record_id: str, line: Optional[int] = None, source: str = "<stream>"):
        super().__init__(f"duplicate record id {record_id!r}", line=line, source=source)
        self.record_id = record_id


class SchemaViolation(ParseError):
    def __init__(self, field: str, message: str, index: Optional[int] = None, source: str = "<stream>"):
        where = f"record {index}: " if index is not None else ""
        super().__init__(f"{where}{field}: {message}", line=None, source=source)
        self.field = field
        self.index = index


class MalformedRow(ParseError):
    pass


class InvalidQuery(InputError):
    pass


class EmptyCorpus(TransmapError):
    pass


class ZeroTotalCitations(TransmapError):
    pass


class EmptyNetwork(TransmapError):
    pass


class EdgelessNetwork(TransmapError):
    pass


class TooLarge(TransmapError):
    pass


class MissingYear(TransmapError):
    def __init__(self, node_ids: Iterable[str]):
        self.node_ids = sorted(node_ids)
        super().__init__(f"nodes without a publication year: {', '.join(self.node_ids)}")


class OutOfRange(TransmapError):
    pass


class IdMismatch(TransmapError):
    pass


class UnknownFormat(TransmapError):
    pass


class MissingArtifact(TransmapError):
    def __init__(self, stage: str, detail: str = ""):
        self.stage = stage
        msg = f"missing artifact from stage '{stage}'"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class StageError(TransmapError):
    """A pipeline stage failed; carries the stage name and the original error."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")

    @property
    def exit_code(self) -> int:  # type: ignore[override]
        return int(getattr(self.cause, "exit_code", EXIT_STAGE))
