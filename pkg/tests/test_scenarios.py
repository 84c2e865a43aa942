"""
Tests for the measurement scenarios module.
"""
import math
import os
import sys
import unittest

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.errors import UsageError, ValidationError
from src.quantum_entropy import von_neumann_entropy
from src.quantum_state import PureState, SubsystemLayout, partial_trace, schmidt_decompose
from src.scenarios import (
    HADAMARD, MeasurementSpec, attach_ancilla, epr_experiment, epr_state, four_party_marginals
)


class TestEPRState(unittest.TestCase):
    """Test cases for the EPR state."""

    def test_amplitudes(self):
        """Test the exact amplitudes."""
        r = 1 / math.sqrt(2)
        np.testing.assert_allclose(epr_state().amplitudes, (r, 0, 0, -r), atol=1e-15)
        self.assertEqual(epr_state().layout.labels, ("Q1", "Q2"))

    def test_reduced_states(self):
        """Test that both halves are maximally mixed."""
        rho = epr_state().density()
        for label in ("Q1", "Q2"):
            np.testing.assert_allclose(partial_trace(rho, [label]).entries, np.eye(2) / 2, atol=1e-12)

    def test_schmidt(self):
        """Test the Schmidt coefficients."""
        coefficients = [t.coefficient for t in schmidt_decompose(epr_state(), ["Q1"])]
        np.testing.assert_allclose(coefficients, (1 / math.sqrt(2),) * 2, atol=1e-12)


class TestAttachAncilla(unittest.TestCase):
    """Test cases for unitary premeasurement."""

    def test_basis_state_target(self):
        """Test that a target already in a basis state stays unentangled."""
        psi = PureState(SubsystemLayout.of(("S", 2)), [1.0, 0.0])
        out = attach_ancilla(psi, MeasurementSpec("S", "z", "M"))
        np.testing.assert_allclose(out.amplitudes, (1, 0, 0, 0), atol=1e-15)

    def test_copies_in_x_basis(self):
        """Test that |-> is copied to ancilla value 1 in the x basis."""
        minus = PureState(SubsystemLayout.of(("S", 2)), np.array([1.0, -1.0]) / math.sqrt(2))
        out = attach_ancilla(minus, MeasurementSpec("S", "x", "M"))
        np.testing.assert_allclose(out.amplitudes, np.kron(minus.amplitudes, [0.0, 1.0]), atol=1e-12)

    def test_epr_z_measurement(self):
        """Test that a z measurement of Q1 yields a GHZ-type state."""
        out = attach_ancilla(epr_state(), MeasurementSpec("Q1", "z", "A1"))
        expected = np.zeros(8)
        expected[0] = 1 / math.sqrt(2)
        expected[7] = -1 / math.sqrt(2)
        self.assertEqual(out.layout.labels, ("Q1", "Q2", "A1"))
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)

    def test_attachments_commute(self):
        """Test that devices on different targets can be attached in either order."""
        first = attach_ancilla(attach_ancilla(epr_state(), MeasurementSpec("Q1", "z", "A1")),
                               MeasurementSpec("Q2", "x", "A2"))
        second = attach_ancilla(attach_ancilla(epr_state(), MeasurementSpec("Q2", "x", "A2")),
                                MeasurementSpec("Q1", "z", "A1"))
        # second has layout (Q1, Q2, A2, A1); swap the last two axes before comparing
        reordered = second.tensor().transpose(0, 1, 3, 2).reshape(-1)
        np.testing.assert_allclose(first.amplitudes, reordered, atol=1e-12)

    def test_stays_pure(self):
        """Test that the enlarged state is still pure with zero entropy."""
        out = attach_ancilla(epr_state(), MeasurementSpec("Q2", HADAMARD, "A2"))
        self.assertAlmostEqual(np.linalg.norm(out.amplitudes), 1.0, places=12)
        self.assertAlmostEqual(von_neumann_entropy(out.density()), 0.0, places=9)

    def test_label_collision(self):
        """Test that the ancilla label must be fresh."""
        with self.assertRaises(UsageError):
            attach_ancilla(epr_state(), MeasurementSpec("Q1", "z", "Q2"))

    def test_invalid_basis(self):
        """Test that a non-unitary basis or an unknown name is rejected."""
        with self.assertRaises(ValidationError):
            attach_ancilla(epr_state(), MeasurementSpec("Q1", np.diag([1.0, 2.0]), "A1"))
        with self.assertRaises(UsageError):
            attach_ancilla(epr_state(), MeasurementSpec("Q1", "y", "A1"))


class TestEPRExperiment(unittest.TestCase):
    """Test cases for the two-device EPR experiment."""

    def test_same_basis(self):
        """Test that devices measuring the same projection are perfectly correlated."""
        result = epr_experiment("z", "z")
        np.testing.assert_allclose(result.device_diagram.as_tuple(), (0.0, 1.0, 0.0), atol=1e-9)
        self.assertAlmostEqual(result.full_diagram.joint(), 0.0, places=9)

    def test_crossed_basis(self):
        """Test that devices measuring z and x are uncorrelated while entanglement persists."""
        result = epr_experiment("z", "x")
        np.testing.assert_allclose(result.device_diagram.as_tuple(), (1.0, 0.0, 1.0), atol=1e-9)
        self.assertGreater(result.system_device_mutual, 0.0)

    def test_basis_symmetry(self):
        """Test that (z, z) and (x, x) give the same device diagram."""
        np.testing.assert_allclose(
            epr_experiment("z", "z").device_diagram.as_tuple(),
            epr_experiment("x", "x").device_diagram.as_tuple(),
            atol=1e-9,
        )

    def test_full_diagram_labels(self):
        """Test the grouping of the two spins as one party."""
        result = epr_experiment("z", "x")
        self.assertEqual(result.full_diagram.labels, ("Q1Q2", "A1", "A2"))
        self.assertEqual(result.device_diagram.labels, ("A1", "A2"))

    def test_four_party_marginals(self):
        """Test the closed-system marginals."""
        for bases in (("z", "z"), ("z", "x")):
            marginals = four_party_marginals(epr_experiment(*bases).state)
            self.assertEqual(len(marginals), 15)
            self.assertAlmostEqual(marginals["Q1Q2A1A2"], 0.0, places=9)
            for value in marginals.values():
                self.assertLessEqual(value, 2.0 + 1e-9)
            # a pure state has equal entropies on complementary groups
            self.assertAlmostEqual(marginals["Q1Q2"], marginals["A1A2"], places=9)


if __name__ == '__main__':
    unittest.main()
