from typing import Optional, Sequence


class QMemError(Exception):
    """Base class of every error raised by the package"""


class ValidationError(QMemError, ValueError):
    pass


class ChannelError(QMemError):
    pass


class ReconstructionError(QMemError):
    pass


class RankDeficiencyError(ReconstructionError):
    pass


class ScheduleError(QMemError):
    """
    Raised when a conversion schedule cannot be compiled into a valid pulse timeline.

    `lines` holds the 1-based line numbers of the schedule file involved in the failure, when the
    schedule came from a file
    """

    def __init__(self, message: str, lines: Optional[Sequence[int]] = None):
        self.lines = tuple(lines) if lines is not None else ()

        if self.lines:
            line_str = ", ".join(str(line) for line in self.lines)
            message = f"line {line_str}: {message}" if len(self.lines) == 1 else f"lines {line_str}: {message}"

        super().__init__(message)


class CollisionError(ScheduleError):
    pass


class TimingError(ScheduleError):
    pass


class ScheduleParseError(ScheduleError):
    pass


class ExecutionError(QMemError):
    pass


class ReportingError(QMemError):
    pass


class ScenarioConfigError(QMemError):

    def __init__(self, message: str, section: Optional[str] = None, key: Optional[str] = None,
                 line: Optional[int] = None):
        self.section = section
        self.key = key
        self.line = line

        if section is not None and key is not None:
            message = f"[{section}].{key}: {message}"
        elif section is not None:
            message = f"[{section}]: {message}"

        if line is not None:
            message = f"line {line}: {message}"

        super().__init__(message)


class ConvergenceWarning(UserWarning):
    pass


class ScheduleWarning(UserWarning):
    pass
