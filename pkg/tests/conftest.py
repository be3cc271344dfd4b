import numpy as np
import pytest

from qosf import SystemConfig


@pytest.fixture
def small_config():
    """Nc=8 variant of the default system: two groups, fast to simulate.

    Sample period is 16 us here, so the second tap sits exactly two samples
    in and the cyclic prefix just covers it.
    """
    return SystemConfig(
        num_subcarriers=8,
        cp_len=2,
        delays_s=(0.0, 3.2e-5),
    )


@pytest.fixture
def tiny_config():
    """Single-path, PL=2 system: the smallest grid with two full groups."""
    return SystemConfig(
        num_states=2,
        num_paths=1,
        num_subcarriers=4,
        cp_len=1,
        delays_s=((0.0,), (0.0,)),
        path_powers=((1.0,), (1.0,)),
        rotation_angles=(np.pi / 2,),
    )
