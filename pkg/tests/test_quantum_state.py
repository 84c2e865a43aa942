"""
Tests for the quantum state module.
"""
import math
import os
import sys
import unittest

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.errors import LabelError, UsageError, ValidationError
from src.quantum_state import (
    DensityMatrix, PureState, SubsystemLayout, evolve_unitary, gibbs_state, hermitian_eig,
    matrix_exp_on_support, matrix_log_on_support, partial_trace, purify, random_density_matrix,
    random_pure_state, random_unitary, schmidt_decompose, tensor_product
)

QUBIT = SubsystemLayout.of(("A", 2))
PAIR = SubsystemLayout.of(("A", 2), ("B", 2))


def ket(*amplitudes):
    return np.array(amplitudes, dtype=complex)


class TestHermitianEig(unittest.TestCase):
    """Test cases for the Jacobi eigensolver."""

    def test_diagonal(self):
        """Test an already diagonal matrix."""
        decomp = hermitian_eig(np.diag([1.0, 3.0]))
        np.testing.assert_allclose(decomp.eigenvalues, (3.0, 1.0), atol=1e-12)

    def test_pauli_x(self):
        """Test [[0, 1], [1, 0]]."""
        decomp = hermitian_eig([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(decomp.eigenvalues, (1.0, -1.0), atol=1e-12)
        first = decomp.eigenvectors[:, 0]
        np.testing.assert_allclose(first, ket(1, 1) / math.sqrt(2), atol=1e-12)

    def test_identity(self):
        """Test a fully degenerate spectrum."""
        decomp = hermitian_eig(np.eye(5))
        np.testing.assert_allclose(decomp.eigenvalues, np.ones(5), atol=1e-12)

    def test_complex_reconstruction(self):
        """Test V diag(lambda) V^dagger = M on a random complex Hermitian matrix."""
        rng = np.random.default_rng(7)
        g = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        m = g + g.conj().T
        decomp = hermitian_eig(m)
        np.testing.assert_allclose(decomp.reconstruct(), m, atol=1e-10)
        v = decomp.eigenvectors
        np.testing.assert_allclose(v.conj().T @ v, np.eye(8), atol=1e-10)
        self.assertTrue(np.all(np.diff(decomp.eigenvalues) <= 1e-12))

    def test_reconstruction_up_to_32(self):
        """Test ||M - V diag(lambda) V^dagger|| <= 1e-9 on random complex Hermitian matrices."""
        rng = np.random.default_rng(21)
        for n in (2, 3, 5, 9, 16, 24, 32):
            for _ in range(2):
                g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                m = g + g.conj().T
                decomp = hermitian_eig(m)
                self.assertLessEqual(np.linalg.norm(m - decomp.reconstruct()), 1e-9)
                v = decomp.eigenvectors
                self.assertLessEqual(np.linalg.norm(v.conj().T @ v - np.eye(n)), 1e-9)

    def test_matches_numpy_spectrum(self):
        """Test agreement with an independent eigenvalue routine."""
        rng = np.random.default_rng(8)
        g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        m = g @ g.conj().T
        np.testing.assert_allclose(
            hermitian_eig(m).eigenvalues, np.sort(np.linalg.eigvalsh(m))[::-1], atol=1e-9
        )

    def test_phase_convention(self):
        """Test that the leading non-negligible component is real and positive."""
        rng = np.random.default_rng(9)
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        v = hermitian_eig(g + g.conj().T).eigenvectors
        for k in range(4):
            lead = v[np.nonzero(np.abs(v[:, k]) > 1e-10)[0][0], k]
            self.assertAlmostEqual(lead.imag, 0.0, places=12)
            self.assertGreater(lead.real, 0.0)

    def test_non_hermitian(self):
        """Test that a non-Hermitian matrix is rejected."""
        with self.assertRaises(ValidationError):
            hermitian_eig([[0.0, 1.0], [0.0, 0.0]])


class TestSupportFunctions(unittest.TestCase):
    """Test cases for the matrix logarithm and exponential on a support."""

    def test_log_identity(self):
        """Test that log(1) = 0."""
        np.testing.assert_allclose(matrix_log_on_support(np.eye(2)), np.zeros((2, 2)), atol=1e-12)

    def test_log_half_identity(self):
        """Test log2 of diag(1/2, 1/2)."""
        np.testing.assert_allclose(matrix_log_on_support(np.eye(2) / 2), -np.eye(2), atol=1e-12)

    def test_log_projector(self):
        """Test that a projector has zero logarithm on and off its support."""
        np.testing.assert_allclose(matrix_log_on_support(np.diag([1.0, 0.0])), np.zeros((2, 2)), atol=1e-12)

    def test_log_rejects_negative(self):
        """Test that negative eigenvalues are rejected."""
        with self.assertRaises(ValidationError):
            matrix_log_on_support(np.diag([1.0, -0.5]))

    def test_exp_on_support(self):
        """Test that the complement of the support maps to zero."""
        support = np.array([[1.0], [0.0]], dtype=complex)
        result = matrix_exp_on_support(np.diag([math.log(2.0), 5.0]), support)
        np.testing.assert_allclose(result, np.diag([2.0, 0.0]), atol=1e-12)


class TestDensityMatrix(unittest.TestCase):
    """Test cases for density matrix validation and construction."""

    def test_rejects_bad_trace(self):
        """Test that a trace away from one is rejected."""
        with self.assertRaises(ValidationError):
            DensityMatrix(QUBIT, np.eye(2))

    def test_rejects_non_hermitian(self):
        """Test that a non-Hermitian matrix is rejected."""
        with self.assertRaises(ValidationError):
            DensityMatrix(QUBIT, [[0.5, 0.5], [0.0, 0.5]])

    def test_rejects_negative(self):
        """Test that from_array rejects a negative eigenvalue."""
        with self.assertRaises(ValidationError):
            DensityMatrix.from_array(QUBIT, np.diag([1.5, -0.5]))

    def test_constructor_rejects_negative(self):
        """Test that the constructor itself checks positive semidefiniteness."""
        with self.assertRaises(ValidationError):
            DensityMatrix(QUBIT, np.diag([1.5, -0.5]))
        with self.assertRaises(ValidationError):
            DensityMatrix(PAIR, np.diag([0.6, 0.6, -0.1, -0.1]))

    def test_rejects_layout_mismatch(self):
        """Test that the matrix dimension must match the layout."""
        with self.assertRaises(ValidationError):
            DensityMatrix(PAIR, np.eye(2) / 2)

    def test_duplicate_labels(self):
        """Test that subsystem labels must be unique."""
        with self.assertRaises(ValidationError):
            SubsystemLayout.of(("A", 2), ("A", 2))

    def test_pure_state_norm(self):
        """Test that a pure state must be normalized."""
        with self.assertRaises(ValidationError):
            PureState(QUBIT, ket(1, 1))

    def test_entries_read_only(self):
        """Test that entries cannot be mutated."""
        rho = DensityMatrix.maximally_mixed(QUBIT)
        with self.assertRaises(ValueError):
            rho.entries[0, 0] = 1.0


class TestTensorAndPartialTrace(unittest.TestCase):
    """Test cases for tensor products and partial traces."""

    def setUp(self):
        """Set up test fixtures."""
        self.epr = PureState(PAIR, ket(1, 0, 0, -1) / math.sqrt(2)).density()

    def test_trivial_factor(self):
        """Test that a one-dimensional factor changes nothing."""
        rho = random_density_matrix(QUBIT, np.random.default_rng(1))
        trivial = DensityMatrix(SubsystemLayout.of(("T", 1)), [[1.0]])
        np.testing.assert_allclose(tensor_product(rho, trivial).entries, rho.entries)

    def test_product_of_projectors(self):
        """Test |0><0| (x) |0><0| = |00><00|."""
        zero = DensityMatrix(QUBIT, np.diag([1.0, 0.0]))
        other = DensityMatrix(SubsystemLayout.of(("B", 2)), np.diag([1.0, 0.0]))
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        np.testing.assert_allclose(tensor_product(zero, other).entries, expected)

    def test_product_spectrum(self):
        """Test that product eigenvalues are pairwise products."""
        a = DensityMatrix(QUBIT, np.diag([0.7, 0.3]))
        b = DensityMatrix(SubsystemLayout.of(("B", 2)), np.diag([0.6, 0.4]))
        spectrum = tensor_product(a, b).spectrum.eigenvalues
        np.testing.assert_allclose(spectrum, sorted([0.42, 0.28, 0.18, 0.12], reverse=True), atol=1e-12)

    def test_label_collision(self):
        """Test that tensoring two factors with the same label is rejected."""
        rho = DensityMatrix.maximally_mixed(QUBIT)
        with self.assertRaises(UsageError):
            tensor_product(rho, rho)

    def test_epr_reduced(self):
        """Test that either half of the EPR pair is maximally mixed."""
        for label in ("A", "B"):
            reduced = partial_trace(self.epr, [label])
            np.testing.assert_allclose(reduced.entries, np.eye(2) / 2, atol=1e-12)

    def test_ghz_reduced(self):
        """Test that tracing one qubit of a GHZ state leaves two equal eigenvalues."""
        amplitudes = np.zeros(8, dtype=complex)
        amplitudes[0] = amplitudes[7] = 1 / math.sqrt(2)
        ghz = PureState(SubsystemLayout.of(("A", 2), ("B", 2), ("C", 2)), amplitudes).density()
        reduced = partial_trace(ghz, ["A", "B"])
        np.testing.assert_allclose(reduced.spectrum.eigenvalues, (0.5, 0.5, 0.0, 0.0), atol=1e-12)

    def test_keeps_layout_order(self):
        """Test that kept factors stay in layout order."""
        rho = random_density_matrix(SubsystemLayout.of(("A", 2), ("B", 3), ("C", 2)), np.random.default_rng(2))
        self.assertEqual(partial_trace(rho, ["C", "A"]).layout.labels, ("A", "C"))

    def test_partial_trace_of_product(self):
        """Test that tracing out B of rho_A (x) rho_B returns rho_A."""
        rng = np.random.default_rng(4)
        a = random_density_matrix(QUBIT, rng)
        b = random_density_matrix(SubsystemLayout.of(("B", 3)), rng)
        np.testing.assert_allclose(partial_trace(tensor_product(a, b), ["A"]).entries, a.entries, atol=1e-12)

    def test_nested_partial_traces(self):
        """Test that tracing out C and then B equals tracing out B and C together."""
        rng = np.random.default_rng(31)
        layout = SubsystemLayout.of(("A", 2), ("B", 3), ("C", 2))
        for _ in range(5):
            rho = random_density_matrix(layout, rng)
            stepwise = partial_trace(partial_trace(rho, ["A", "B"]), ["A"])
            np.testing.assert_allclose(stepwise.entries, partial_trace(rho, ["A"]).entries, atol=1e-12)
            self.assertEqual(stepwise.layout, SubsystemLayout.of(("A", 2)))

    def test_preserves_trace_and_positivity(self):
        """Test that reduced states of random states have unit trace and no negative eigenvalues."""
        rng = np.random.default_rng(32)
        layout = SubsystemLayout.of(("A", 2), ("B", 3), ("C", 2))
        states = [random_density_matrix(layout, rng) for _ in range(5)]
        states += [random_density_matrix(layout, rng, rank=1) for _ in range(3)]
        for rho in states:
            for keep in (["A"], ["B"], ["C"], ["A", "C"], ["B", "C"]):
                reduced = partial_trace(rho, keep)
                self.assertAlmostEqual(np.trace(reduced.entries).real, 1.0, places=12)
                self.assertGreaterEqual(np.linalg.eigvalsh(reduced.entries)[0], -1e-12)

    def test_unknown_label(self):
        """Test that an unknown label is rejected."""
        with self.assertRaises(LabelError):
            partial_trace(self.epr, ["Z"])


class TestPurificationAndSchmidt(unittest.TestCase):
    """Test cases for purification and the Schmidt decomposition."""

    def test_pure_state_reference(self):
        """Test that a pure state gets a one-dimensional reference."""
        psi = purify(DensityMatrix(QUBIT, np.diag([1.0, 0.0])))
        self.assertEqual(psi.layout.factors, (("A", 2), ("R", 1)))

    def test_maximally_mixed(self):
        """Test the purification of a maximally mixed qubit."""
        psi = purify(DensityMatrix.maximally_mixed(QUBIT))
        coefficients = [t.coefficient for t in schmidt_decompose(psi, ["A"])]
        np.testing.assert_allclose(coefficients, (1 / math.sqrt(2), 1 / math.sqrt(2)), atol=1e-12)

    def test_diagonal_state(self):
        """Test Schmidt coefficients of the purification of diag(3/4, 1/4)."""
        psi = purify(DensityMatrix(QUBIT, np.diag([0.75, 0.25])))
        coefficients = [t.coefficient for t in schmidt_decompose(psi, ["A"])]
        np.testing.assert_allclose(coefficients, (math.sqrt(3) / 2, 0.5), atol=1e-12)

    def test_purification_reduces_back(self):
        """Test that tracing out the reference recovers the state."""
        rho = random_density_matrix(SubsystemLayout.of(("A", 3)), np.random.default_rng(5))
        psi = purify(rho)
        np.testing.assert_allclose(partial_trace(psi.density(), ["A"]).entries, rho.entries, atol=1e-10)

    def test_reference_collision(self):
        """Test that the reference label must be fresh."""
        with self.assertRaises(UsageError):
            purify(DensityMatrix.maximally_mixed(QUBIT), reference_label="A")

    def test_schmidt_examples(self):
        """Test Schmidt coefficients of product, EPR, and weighted states."""
        product = PureState(PAIR, ket(1, 0, 0, 0))
        self.assertEqual(len(schmidt_decompose(product, ["A"])), 1)
        epr = PureState(PAIR, ket(1, 0, 0, -1) / math.sqrt(2))
        np.testing.assert_allclose([t.coefficient for t in schmidt_decompose(epr, ["A"])],
                                   (1 / math.sqrt(2),) * 2, atol=1e-12)
        weighted = PureState(PAIR, ket(math.sqrt(0.9), 0, 0, math.sqrt(0.1)))
        np.testing.assert_allclose([t.coefficient for t in schmidt_decompose(weighted, ["A"])],
                                   (0.948683, 0.316228), atol=1e-6)

    def test_schmidt_reconstruction(self):
        """Test that the Schmidt terms rebuild a random state."""
        psi = random_pure_state(SubsystemLayout.of(("A", 2), ("B", 3)), np.random.default_rng(6))
        terms = schmidt_decompose(psi, ["A"])
        rebuilt = sum(t.coefficient * np.kron(t.left, t.right) for t in terms)
        np.testing.assert_allclose(rebuilt, psi.amplitudes, atol=1e-10)

    def test_schmidt_random_products(self):
        """Test that random product states have exactly one Schmidt term."""
        rng = np.random.default_rng(41)
        layout = SubsystemLayout.of(("A", 3), ("B", 4))
        for _ in range(50):
            left = random_pure_state(SubsystemLayout.of(("A", 3)), rng).amplitudes
            right = random_pure_state(SubsystemLayout.of(("B", 4)), rng).amplitudes
            terms = schmidt_decompose(PureState(layout, np.kron(left, right)), ["A"])
            self.assertEqual(len(terms), 1)
            self.assertAlmostEqual(terms[0].coefficient, 1.0, places=12)
            self.assertAlmostEqual(np.linalg.norm(terms[0].right), 1.0, places=12)
            np.testing.assert_allclose(np.kron(terms[0].left, terms[0].right), np.kron(left, right), atol=1e-12)

    def test_schmidt_needs_bipartition(self):
        """Test that both sides must be non-empty."""
        with self.assertRaises(UsageError):
            schmidt_decompose(PureState(PAIR, ket(1, 0, 0, 0)), ["A", "B"])


class TestEvolutionAndGibbs(unittest.TestCase):
    """Test cases for unitary evolution and Gibbs states."""

    def test_identity_evolution(self):
        """Test that U = 1 leaves the state unchanged."""
        rho = random_density_matrix(QUBIT, np.random.default_rng(10))
        np.testing.assert_allclose(evolve_unitary(rho, np.eye(2)).entries, rho.entries, atol=1e-14)

    def test_maximally_mixed_invariant(self):
        """Test that any unitary fixes the maximally mixed state."""
        rho = DensityMatrix.maximally_mixed(SubsystemLayout.of(("S", 4)))
        u = random_unitary(4, np.random.default_rng(11))
        np.testing.assert_allclose(evolve_unitary(rho, u).entries, rho.entries, atol=1e-12)

    def test_spectrum_preserved(self):
        """Test that unitary evolution keeps the eigenvalue multiset."""
        rng = np.random.default_rng(12)
        rho = random_density_matrix(SubsystemLayout.of(("S", 5)), rng)
        evolved = evolve_unitary(rho, random_unitary(5, rng))
        np.testing.assert_allclose(evolved.spectrum.eigenvalues, rho.spectrum.eigenvalues, atol=1e-10)

    def test_non_unitary(self):
        """Test that a non-unitary operator is rejected."""
        with self.assertRaises(ValidationError):
            evolve_unitary(DensityMatrix.maximally_mixed(QUBIT), np.diag([1.0, 2.0]))

    def test_gibbs_examples(self):
        """Test Gibbs states at zero, moderate, and large beta."""
        np.testing.assert_allclose(gibbs_state(np.diag([0.0, 1.0]), 0.0).entries, np.eye(2) / 2, atol=1e-12)
        np.testing.assert_allclose(np.diag(gibbs_state(np.diag([0.0, 1.0]), 1.0).entries).real,
                                   (0.731059, 0.268941), atol=1e-6)
        np.testing.assert_allclose(gibbs_state(np.diag([0.0, 1e3]), 1.0).entries, np.diag([1.0, 0.0]), atol=1e-9)


if __name__ == '__main__':
    unittest.main()
