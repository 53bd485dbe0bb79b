import pickle

import pytest
from ppm_shared.exceptions.ppm_error import VALIDATION_CODES, PpmError, PpmErrorCode


@pytest.mark.parametrize("code", sorted(VALIDATION_CODES))
def test_validation_codes_exit_with_usage_error(code):
    assert PpmError("bad input", error_code=code).exit_code == 2


@pytest.mark.parametrize(
    "code",
    [PpmErrorCode.ABSORBING_STATE, PpmErrorCode.QUADRATURE_NOT_CONVERGED, PpmErrorCode.STAGE_FAILED],
)
def test_runtime_codes_exit_with_failure(code):
    assert PpmError("failed", error_code=code).exit_code == 1


def test_explicit_exit_code_wins():
    assert PpmError("failed", error_code=PpmErrorCode.INVALID_INPUT, exit_code=1).exit_code == 1


def test_str_names_the_code():
    error = PpmError("N must be at least 2", error_code=PpmErrorCode.INVALID_INPUT)

    assert str(error) == "INVALID_INPUT: N must be at least 2"
    assert "error_code=15" in repr(error)


def test_survives_pickling():
    """
    Errors raised in ensemble worker processes come back through pickle
    """
    error = PpmError("no channel can fire", error_code=PpmErrorCode.ABSORBING_STATE)

    restored = pickle.loads(pickle.dumps(error))

    assert restored.message == error.message
    assert restored.error_code == PpmErrorCode.ABSORBING_STATE
    assert restored.exit_code == 1
