from enum import IntEnum


class PpmErrorCode(IntEnum):
    """
    Error codes of the predator-prey market toolkit.

    Ranges:
         0-1000: general errors
      1000-2000: parameters
      2000-3000: simulation (kinetics, meanfield, fluctuations)
      3000-4000: analysis (correlations, pricing, analytics)
      4000-5000: harness
    """

    # 0-1000: general errors
    GENERIC_ERROR = 0
    INVALID_INPUT = 15

    # 1000-2000: parameters
    INVALID_PARAMETERS = 1000
    UNSTABLE_REGIME = 1001

    # 2000-3000: simulation
    ABSORBING_STATE = 2000
    TIME_OUT_OF_RANGE = 2001
    STEP_CONTROL_FAILURE = 2002
    RESOLUTION_GUARD = 2003
    THINNED_TRAJECTORY = 2004

    # 3000-4000: analysis
    QUADRATURE_NOT_CONVERGED = 3000
    LIQUIDITY_REGIME_LEFT = 3001
    INSUFFICIENT_DATA = 3002
    ZERO_VARIANCE = 3003

    # 4000-5000: harness
    CONFIG_ERROR = 4000
    UNKNOWN_PRESET = 4001
    STAGE_FAILED = 4002


# codes the CLI reports as usage errors
VALIDATION_CODES = frozenset(
    {
        PpmErrorCode.INVALID_INPUT,
        PpmErrorCode.INVALID_PARAMETERS,
        PpmErrorCode.UNSTABLE_REGIME,
        PpmErrorCode.CONFIG_ERROR,
        PpmErrorCode.UNKNOWN_PRESET,
    }
)


class PpmError(Exception):
    """Base class for predator-prey market exceptions."""

    message: str
    error_code: int
    exit_code: int

    def __init__(
        self,
        message: str,
        error_code: PpmErrorCode,
        exit_code: int | None = None,
    ):
        if exit_code is None:
            exit_code = 2 if error_code in VALIDATION_CODES else 1
        super().__init__(message, error_code, exit_code)  # make exception picklable (fill args member)
        self.message = message
        self.error_code = error_code
        self.exit_code = exit_code

    def __repr__(self) -> str:
        class_name = self.__class__.__name__
        return f'{class_name}(message="{self.message}", error_code={self.error_code}, exit_code={self.exit_code})'

    def __str__(self) -> str:
        return f"{PpmErrorCode(self.error_code).name}: {self.message}"
