from enum import IntEnum


class ExitCode(IntEnum):
    """Process exit codes of the command-line interface.

    Attributes:
        OK: Success
        USAGE: Invalid flags or configuration
        MALFORMED_INPUT: Unparsable, non-finite or empty input data
        IO: Missing or unreadable/unwritable file
        UNKNOWN_PRESET: ``reproduce`` was given a name that is not a preset
        NUMERIC: A numerical procedure failed
    """

    OK = 0
    USAGE = 1
    MALFORMED_INPUT = 2
    IO = 3
    UNKNOWN_PRESET = 4
    NUMERIC = 5
