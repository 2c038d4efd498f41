import numpy as np
import pytest

from pyqsense.qubit.propagator import to_bloch
from pyqsense.qubit.state import (
    BlochVector,
    DensityMatrix,
    PureState,
    QubitStateError,
    as_density,
    mix,
)


class TestPureState(object):
    def test_unnormalized_rejected(self):
        with pytest.raises(QubitStateError):
            PureState(1.0, 1.0)

    def test_normalized(self):
        psi = PureState.normalized(3.0, 4.0j)
        assert psi.amp0 == pytest.approx(0.6)
        assert psi.amp1 == pytest.approx(0.8j)
        assert psi.phase == pytest.approx(np.pi / 2)

    def test_zero_vector(self):
        with pytest.raises(QubitStateError):
            PureState.normalized(0.0, 0.0)

    def test_poles(self):
        """|0> sits at the south pole of the Bloch sphere, |1> at the north."""
        assert to_bloch(PureState.ground()).z == pytest.approx(-1.0)
        assert to_bloch(PureState.excited()).z == pytest.approx(1.0)

    def test_equator(self):
        bloch = to_bloch(PureState.equator(0.3))
        assert bloch.z == pytest.approx(0.0, abs=1e-12)
        assert bloch.longitude == pytest.approx(0.3)
        assert bloch.norm == pytest.approx(1.0)


class TestDensityMatrix(object):
    def test_trace_checked(self):
        with pytest.raises(QubitStateError):
            DensityMatrix(0.7, 0.7, 0.0)

    def test_positivity_checked(self):
        with pytest.raises(QubitStateError):
            DensityMatrix(0.5, 0.5, 0.8)

    def test_non_hermitian_rejected(self):
        with pytest.raises(QubitStateError):
            DensityMatrix.from_matrix([[0.5, 0.5], [0.0, 0.5]])

    def test_pure_state_projector(self):
        rho = as_density(PureState.equator())
        assert rho.purity == pytest.approx(1.0)
        assert rho.coherence == pytest.approx(0.5)
        assert rho.rho10 == np.conj(rho.rho01)

    def test_maximally_mixed(self):
        rho = mix([PureState.ground(), PureState.excited()], [0.5, 0.5])
        assert rho.is_close(DensityMatrix.maximally_mixed())
        assert to_bloch(rho).norm == pytest.approx(0.0)

    def test_mix_weights(self):
        with pytest.raises(QubitStateError):
            mix([PureState.ground(), PureState.excited()], [0.7, 0.7])
        with pytest.raises(QubitStateError):
            mix([PureState.ground(), PureState.excited()], [1.5, -0.5])
        with pytest.raises(QubitStateError):
            mix([PureState.ground()], [0.5, 0.5])

    def test_mixture_shrinks_bloch_vector(self):
        rho = mix([PureState.equator(0.0), PureState.equator(np.pi / 2)], [0.5, 0.5])
        bloch = to_bloch(rho)
        assert bloch.norm == pytest.approx(np.sqrt(0.5))
        assert rho.purity < 1.0


class TestBlochVector(object):
    def test_outside_sphere(self):
        with pytest.raises(QubitStateError):
            BlochVector(1.0, 1.0, 0.0)

    def test_as_array(self):
        assert np.all(BlochVector(0.0, 0.6, 0.8).as_array() == [0.0, 0.6, 0.8])
