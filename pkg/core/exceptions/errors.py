from typing import List, Optional

from pydantic import BaseModel

from core.constants import EXIT_CONFIG, EXIT_IO, EXIT_PARSE


class GridRepairError(Exception):
    """Base class of every failure the toolkit reports to the user."""
    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InputFileError(GridRepairError):
    exit_code = EXIT_IO


class RowError(BaseModel):
    """One rejected input row; `line` counts the header as line 1."""
    line: Optional[int] = None
    message: str

    def __str__(self):
        if self.line is None:
            return self.message
        return f"line {self.line}: {self.message}"


class LogParseError(GridRepairError):
    exit_code = EXIT_PARSE

    def __init__(self, message: str, errors: Optional[List[RowError]] = None):
        self.errors = list(errors or [])
        details = "\n".join(f"  {e}" for e in self.errors)
        super().__init__(f"{message}\n{details}" if details else message)


class ConfigError(GridRepairError):
    exit_code = EXIT_CONFIG


class ScenarioError(ConfigError):
    pass


class CrewCoverageError(ConfigError):
    pass


class UndefinedMetricError(GridRepairError):
    pass


class CurveError(GridRepairError):
    pass


class EmptyEventError(GridRepairError):
    pass


class UnfinishedTicketsError(GridRepairError):

    def __init__(self, ticket_ids: List[str]):
        self.ticket_ids = list(ticket_ids)
        super().__init__(
            f"Crew capacity ran out with {len(self.ticket_ids)} ticket(s) open: " + ", ".join(self.ticket_ids)
        )
