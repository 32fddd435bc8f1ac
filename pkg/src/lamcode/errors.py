"""Shared exception types."""


class WorkbenchError(Exception):
    """Base class for workbench-specific failures."""


class RangeError(WorkbenchError, ValueError):
    """An argument lies outside its documented domain."""
