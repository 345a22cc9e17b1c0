class IqpError(Exception):
    """Base class for every error raised by the iqp app."""


class InvalidInstance(IqpError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class ResourceLimitExceeded(IqpError):
    def __init__(self, what, n, limit):
        self.what = what
        self.n = n
        self.limit = limit
        super().__init__(f"{what}: n={n} exceeds the configured limit {limit}")


class UnsupportedOrder(IqpError, ValueError):
    pass


class InvalidParameters(IqpError, ValueError):
    pass


class RecoveryDidNotConverge(IqpError):
    def __init__(self, message, trace):
        self.trace = trace
        super().__init__(message)


class BoundViolation(IqpError):
    def __init__(self, failed_checks):
        self.failed_checks = list(failed_checks)
        names = ", ".join(check.name for check in self.failed_checks)
        super().__init__(f"bound assertion failed: {names}")
