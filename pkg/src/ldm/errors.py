"""Exception types shared across the package.

The CLI maps these onto stable exit codes: usage errors exit 1,
DataError exits 2, SolverError exits 3.
"""


class LdmError(Exception):
    """Base class for errors raised by this package."""


class DataError(LdmError):
    """Malformed input files, degenerate datasets, unusable splits."""


class SolverError(LdmError):
    """Numerical failures inside a solver (e.g. factorization breakdown)."""
