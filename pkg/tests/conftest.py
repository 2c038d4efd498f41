import numpy as np
import pytest

from pyqsense.common import TWOPI


@pytest.fixture
def hahn_seq_file(tmp_path):
    """Return a Hahn echo sequence file, 2 us long."""
    seq_file = tmp_path.joinpath("hahn.seq")
    with open(seq_file, "w", encoding="UTF-8") as output:
        output.write(
            r"""# Hahn echo, 2 us total
p2 y
wait 1us
pi y
wait 1us
p2 -y
"""
        )
    return seq_file


@pytest.fixture
def ramsey_seq_file(tmp_path):
    """Return a 1 us Ramsey sequence file."""
    seq_file = tmp_path.joinpath("ramsey.seq")
    with open(seq_file, "w", encoding="UTF-8") as output:
        output.write("p2 y; wait 1us; p2 y\n")
    return seq_file


@pytest.fixture
def ou_noise_file(tmp_path):
    """Return an Ornstein-Uhlenbeck noise configuration (sigma = 2 pi 50 kHz, tau_c = 5 us)."""
    noise_file = tmp_path.joinpath("ou.noise")
    with open(noise_file, "w", encoding="UTF-8") as output:
        output.write(
            r"""| Slow magnetic bath.
(ou
    (sigma_hz 50k)
    (tau_c_s 5u)
)
"""
        )
    return noise_file


@pytest.fixture
def static_noise_file(tmp_path):
    """Return a static Gaussian noise configuration, T2* = 1 us."""
    noise_file = tmp_path.joinpath("static.noise")
    with open(noise_file, "w", encoding="UTF-8") as output:
        output.write("(static_gaussian (mean_hz 0) (sigma_rad_s 1e6))\n")
    return noise_file


@pytest.fixture
def decay_run_file(tmp_path):
    """Return a run configuration for an analytic CPMG decay."""
    run_file = tmp_path.joinpath("decay.run")
    with open(run_file, "w", encoding="UTF-8") as output:
        output.write(
            r"""(run
    (command decay)
    (builder cpmg)
    (param n 8)
    (sweep "tau=1us:20us:5")
    (decay analytic)
    (format csv)
)
"""
        )
    return run_file


@pytest.fixture
def sigma_static():
    """Static detuning spread (rad/s) giving T2* = 1 us."""
    return 1e6


@pytest.fixture
def ou_params():
    """(sigma, tau_c) of the reference Ornstein-Uhlenbeck process."""
    return TWOPI * 50e3, 5e-6


@pytest.fixture
def rng():
    """Fixed seed generator."""
    return np.random.default_rng(12345)
