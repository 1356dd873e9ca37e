"""
Exception hierarchy shared by every hjgraph app.

Each class carries the process exit code the ``hj`` management command uses
when the error escapes a workflow.
"""


class HJGraphError(Exception):
    """Base class for all errors raised by the solver and its tooling."""

    exit_code = 3

    def __init__(self, message="", **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self):
        if not self.context:
            return self.message
        details = ", ".join(f"{key}={value!r}" for key, value in self.context.items())
        return f"{self.message} ({details})"


class InputError(HJGraphError, ValueError):
    """An argument is outside the domain of the operation."""

    exit_code = 2


class ConfigurationError(HJGraphError):
    """The solver configuration cannot produce a finite update."""

    exit_code = 2


class AssumptionViolationError(HJGraphError):
    """A Hamiltonian violates a standing assumption where it is required."""

    exit_code = 2


class InstanceTooLargeError(HJGraphError):
    """The brute-force oracle refuses instances beyond its caps."""

    exit_code = 2


class ScenarioError(HJGraphError):
    """
    A scenario file could not be parsed or validated.

    ``key`` names the offending setting (dotted path) for validation errors;
    ``line`` and ``column`` locate syntax errors.
    """

    exit_code = 2

    def __init__(self, message="", key=None, line=None, column=None):
        context = {}
        if key is not None:
            context["key"] = key
        if line is not None:
            context["line"] = line
            context["column"] = column
        super().__init__(message, **context)
        self.key = key
        self.line = line
        self.column = column


class InternalError(HJGraphError):
    """An internal invariant of the solver does not hold."""

    exit_code = 3
