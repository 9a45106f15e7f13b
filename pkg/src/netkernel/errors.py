"""Exception hierarchy. ``exit_code`` is what the CLI returns for each class."""


class NetkernelError(Exception):
    exit_code = 1


class InstanceError(NetkernelError, ValueError):
    """Malformed or invalid instance, support, cyclic-pin or solution file."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SupportError(InstanceError):
    pass


class InconsistentBalanceError(NetkernelError):
    exit_code = 3


class RankDeficiencyError(NetkernelError):
    """The side and coupling rows do not add full rank on top of the network part."""

    exit_code = 4


class StructuralSingularityError(NetkernelError):
    """The chosen cyclic arcs give a singular decomposition matrix."""

    exit_code = 5


class OracleRefusal(NetkernelError):
    pass
