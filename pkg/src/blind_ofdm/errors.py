"""Exception hierarchy shared by every module of the package."""


class BlindOfdmError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(BlindOfdmError, ValueError):
    pass


class NotHermitianError(BlindOfdmError, ValueError):
    pass


class ConvergenceError(BlindOfdmError, ArithmeticError):
    """Power iteration did not settle within its iteration budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class UndefinedMeanError(BlindOfdmError, ArithmeticError):
    pass


class InvalidOrderError(BlindOfdmError, ValueError):
    pass


class InvalidFrameError(BlindOfdmError, ValueError):
    pass


class LengthError(BlindOfdmError, ValueError):
    pass


class InvalidWeightError(BlindOfdmError, ValueError):
    pass


class CPInsufficiencyError(BlindOfdmError, ValueError):
    pass


class SingularSubcarrierError(BlindOfdmError, ZeroDivisionError):
    def __init__(self, index: int):
        super().__init__(f"channel estimate vanishes on subcarrier {index}")
        self.index = index


class GramSingularityError(BlindOfdmError, ArithmeticError):
    pass


class DegenerateCovarianceError(BlindOfdmError, ArithmeticError):
    pass


class AmbiguityUnresolvableError(BlindOfdmError, ArithmeticError):
    pass


class InvalidPilotError(BlindOfdmError, ValueError):
    pass


class UndefinedMetricError(BlindOfdmError, ArithmeticError):
    pass


class ConfigError(BlindOfdmError, ValueError):
    pass


class RunError(BlindOfdmError, RuntimeError):
    """A Monte-Carlo run failed; carries the run coordinates."""

    def __init__(self, run_index: int, snr_db: float, n_blocks: int, cause: BaseException):
        super().__init__(
            f"run {run_index} (snr={snr_db} dB, blocks={n_blocks}) failed: "
            f"{type(cause).__name__}: {cause}"
        )
        self.run_index = run_index
        self.snr_db = snr_db
        self.n_blocks = n_blocks
        self.cause = cause


class SweepError(BlindOfdmError, RuntimeError):
    """One or more runs of a sweep failed; ``failures`` lists them all."""

    def __init__(self, failures: list[RunError]):
        head = failures[0]
        super().__init__(f"{len(failures)} run(s) failed; first: {head}")
        self.failures = failures
