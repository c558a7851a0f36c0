"""
Exception hierarchy shared by the library and the CLI.
Each class carries the process exit code the CLI maps it to.
"""

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3


class SuperhedgeError(Exception):
    """Root of every library error"""
    exit_code = EXIT_INPUT


class InputError(SuperhedgeError, ValueError):
    """Invalid data: shapes, signs, malformed CSV rows, out-of-range parameters"""
    exit_code = EXIT_INPUT


class ConfigError(SuperhedgeError):
    """Unusable configuration value"""
    exit_code = EXIT_INPUT


class DegenerateError(SuperhedgeError, ZeroDivisionError):
    """A ratio is undefined, e.g. the benchmark pays 0 on the requested path"""
    exit_code = EXIT_INPUT


class BudgetError(SuperhedgeError):
    """An enumeration or recurrence would exceed its configured budget"""
    exit_code = EXIT_BUDGET


class HedgeabilityError(SuperhedgeError):
    """The payoff is not flagged multiconvex and homogeneous"""
    exit_code = EXIT_BUDGET
