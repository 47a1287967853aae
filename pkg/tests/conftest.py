import numpy as np
import pytest

from nooncav import ParamsN2, UNIT_COUPLING, condition_delta2

COND_MINUS = condition_delta2(1.0, UNIT_COUPLING, -1)
COND_PLUS = condition_delta2(1.0, UNIT_COUPLING, +1)
FIG5_COND = condition_delta2(5.0, UNIT_COUPLING, -1)


@pytest.fixture
def p_cw():
    """Weak cw benchmark: branch-minus condition at delta1 = 1."""
    return ParamsN2(
        j=2.0,
        delta1=1.0,
        delta2=COND_MINUS,
        kappa=0.1,
        rabi=0.05,
        pump_port=2,
        pump_detuning=COND_MINUS,
    )


@pytest.fixture
def p_pulse():
    """Strong-blockade point used for pulsed preparation (exact condition)."""
    return ParamsN2(
        j=5.0,
        delta1=5.0,
        delta2=FIG5_COND,
        kappa=0.1,
        pump_port=2,
        pump_detuning=FIG5_COND,
    )


def eig_sorted(mat):
    vals, vecs = np.linalg.eigh(mat)
    return vals, vecs
