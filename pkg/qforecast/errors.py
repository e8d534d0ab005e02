"""
Error classes for the qforecast package.

Every error raised on purpose by this package is a subclass of :class:`QForecastError`.
Each class carries the process exit code that the command line tool reports when the
error escapes a subcommand.  The usage and configuration errors are also subclasses of
``ValueError`` so that generic callers can still catch them.

:author:  qforecast developers
:version: October 17, 2026
"""


class QForecastError(Exception):
    """
    The root error class for the qforecast package.
    """
    exit_code = 1


class UsageError(QForecastError, ValueError):
    """
    An error for arguments with the wrong shape, length or index.
    """
    exit_code = 2


class ConfigurationError(QForecastError, ValueError):
    """
    An error for invalid settings: qubit counts, grid bounds, infeasible fold plans.
    """
    exit_code = 3


class FileToolError(QForecastError):
    """
    A simple error class to unify error responses when reading or writing files.
    """
    exit_code = 4


class IngestionError(FileToolError):
    """
    An error for a malformed time series file.

    The message always names the offending row (counting the header as row 0).
    """
    exit_code = 4

    def __init__(self, message, row=None):
        """
        Creates a new ingestion error

        :param message: The error description
        :type message:  ``str``

        :param row: The offending row, or None if the error concerns the whole file
        :type row:  ``int`` or ``None``
        """
        if row is not None:
            message = 'row %d: %s' % (row, message)
        super().__init__(message)
        self.row = row


class InternalError(QForecastError, RuntimeError):
    """
    An error for broken internal state, such as a backward pass with no forward cache.
    """
    exit_code = 5
