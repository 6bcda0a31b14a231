"""Exception hierarchy; each class carries the CLI exit code it maps to."""


class QEMError(Exception):
    exit_code = 1


class MachineValidationError(QEMError):
    """Raised when a machine violates one or more structural invariants."""

    exit_code = 2

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid machine: {lines}")


class NumericalError(QEMError):
    exit_code = 3


class ConvergenceError(NumericalError):
    pass


class EnumerationBudgetExceeded(QEMError):
    """Exact word enumeration would exceed the configured row budget."""

    exit_code = 4
