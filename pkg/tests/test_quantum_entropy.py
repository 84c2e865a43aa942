"""
Tests for the quantum entropy module.
"""
import math
import os
import sys
import unittest

import numpy as np

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.classical_info import ProbTable, conditional_entropy, mutual_entropy, shannon_entropy
from src.errors import UsageError, ValidationError
from src.quantum_entropy import (
    conditional_amplitude_matrix, conditional_entropy_diagnostics, conditional_entropy_q,
    diagonal_shannon_bound, diagonal_state, gibbs_thermodynamics, inseparability_witness,
    mutual_entropy_q, resolve_cut, venn_quantum, von_neumann_entropy
)
from src.quantum_state import (
    DensityMatrix, PureState, SubsystemLayout, evolve_unitary, partial_trace, purify, random_density_matrix,
    random_pure_state, random_unitary, tensor_product
)

PAIR = SubsystemLayout.of(("A", 2), ("B", 2))


def epr():
    return PureState(PAIR, np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2)).density()


def classically_correlated():
    return DensityMatrix(PAIR, np.diag([0.5, 0.0, 0.0, 0.5]))


def random_product(rng, da=2, db=2):
    a = random_density_matrix(SubsystemLayout.of(("A", da)), rng)
    b = random_density_matrix(SubsystemLayout.of(("B", db)), rng)
    return a, b, tensor_product(a, b)


class TestVonNeumannEntropy(unittest.TestCase):
    """Test cases for the von Neumann entropy."""

    def test_pure_state(self):
        """Test that pure states have zero entropy."""
        psi = random_pure_state(SubsystemLayout.of(("S", 6)), np.random.default_rng(0))
        self.assertAlmostEqual(von_neumann_entropy(psi.density()), 0.0, places=10)

    def test_maximally_mixed(self):
        """Test that a maximally mixed qubit carries one bit."""
        rho = DensityMatrix.maximally_mixed(SubsystemLayout.of(("S", 2)))
        self.assertAlmostEqual(von_neumann_entropy(rho), 1.0, places=12)

    def test_diagonal(self):
        """Test diag(3/4, 1/4)."""
        rho = DensityMatrix(SubsystemLayout.of(("S", 2)), np.diag([0.75, 0.25]))
        self.assertAlmostEqual(von_neumann_entropy(rho), 0.811278, places=6)

    def test_bounds(self):
        """Test 0 <= S <= log d on random states."""
        rng = np.random.default_rng(1)
        for dim in range(2, 7):
            rho = random_density_matrix(SubsystemLayout.of(("S", dim)), rng)
            s = von_neumann_entropy(rho)
            self.assertGreaterEqual(s, 0.0)
            self.assertLessEqual(s, math.log2(dim) + 1e-12)


class TestCuts(unittest.TestCase):
    """Test cases for bipartition handling."""

    def test_complement(self):
        """Test that a label list alone is completed by the rest of the layout."""
        layout = SubsystemLayout.of(("A", 2), ("B", 2), ("C", 2))
        self.assertEqual(resolve_cut(layout, ["C", "A"]), (("A", "C"), ("B",)))

    def test_explicit_pair(self):
        """Test an explicit (A, B) pair."""
        self.assertEqual(resolve_cut(PAIR, (["B"], ["A"])), (("B",), ("A",)))

    def test_flat_labels_are_one_side(self):
        """Test that ("A", "B") names the A side, while a pair of sequences is an explicit split."""
        layout = SubsystemLayout.of(("A", 2), ("B", 2), ("C", 2))
        self.assertEqual(resolve_cut(layout, ("A", "B")), (("A", "B"), ("C",)))
        self.assertEqual(resolve_cut(layout, (("A",), ("B", "C"))), (("A",), ("B", "C")))
        self.assertEqual(resolve_cut(PAIR, (("A",), ("B",))), (("A",), ("B",)))
        with self.assertRaises(UsageError) as ctx:
            resolve_cut(PAIR, ("A", "B"))
        self.assertIn("pair of label sequences", str(ctx.exception))

    def test_bare_string_side(self):
        """Test that a bare string inside an explicit pair is a single label."""
        layout = SubsystemLayout.of(("Q1", 2), ("A1", 2))
        self.assertEqual(resolve_cut(layout, ("Q1", ["A1"])), (("Q1",), ("A1",)))

    def test_not_a_bipartition(self):
        """Test that cuts which leave a side empty or miss factors are rejected."""
        layout = SubsystemLayout.of(("A", 2), ("B", 2), ("C", 2))
        with self.assertRaises(UsageError):
            resolve_cut(layout, ["A", "B", "C"])
        with self.assertRaises(UsageError):
            resolve_cut(layout, (["A"], ["B"]))
        with self.assertRaises(UsageError):
            resolve_cut(layout, ["Z"])


class TestConditionalAmplitude(unittest.TestCase):
    """Test cases for the conditional amplitude matrix."""

    def test_product_state(self):
        """Test that a product state gives rho_A (x) 1."""
        rng = np.random.default_rng(2)
        for da, db in ((2, 2), (2, 3), (3, 2)):
            a, _, rho = random_product(rng, da, db)
            amplitude = conditional_amplitude_matrix(rho, ["A"])
            np.testing.assert_allclose(amplitude.entries, np.kron(a.entries, np.eye(db)), atol=1e-8)

    def test_product_state_b_first(self):
        """Test a cut whose A side comes second in the layout."""
        rng = np.random.default_rng(3)
        a, b, rho = random_product(rng, 2, 3)
        amplitude = conditional_amplitude_matrix(rho, ["B"])
        np.testing.assert_allclose(amplitude.entries, np.kron(np.eye(2), b.entries), atol=1e-8)

    def test_epr(self):
        """Test that the EPR pair gives twice its projector."""
        rho = epr()
        amplitude = conditional_amplitude_matrix(rho, ["A"])
        np.testing.assert_allclose(amplitude.entries, 2 * rho.entries, atol=1e-9)
        np.testing.assert_allclose(amplitude.spectrum, (2.0, 0.0, 0.0, 0.0), atol=1e-9)

    def test_classically_correlated(self):
        """Test that a classically correlated state gives conditional probabilities."""
        amplitude = conditional_amplitude_matrix(classically_correlated(), ["A"])
        np.testing.assert_allclose(amplitude.entries, np.diag([1.0, 0.0, 0.0, 1.0]), atol=1e-9)
        self.assertLessEqual(amplitude.max_eigenvalue, 1.0 + 1e-9)


class TestConditionalAndMutual(unittest.TestCase):
    """Test cases for conditional and mutual quantum entropies."""

    def test_epr_values(self):
        """Test S(A|B) = -1 and S(A:B) = 2 for the EPR pair."""
        self.assertAlmostEqual(conditional_entropy_q(epr(), ["A"]), -1.0, places=10)
        self.assertAlmostEqual(mutual_entropy_q(epr(), ["A"]), 2.0, places=10)

    def test_classically_correlated_values(self):
        """Test S(A|B) = 0 and S(A:B) = 1 for the classically correlated state."""
        self.assertAlmostEqual(conditional_entropy_q(classically_correlated(), ["A"]), 0.0, places=10)
        self.assertAlmostEqual(mutual_entropy_q(classically_correlated(), ["A"]), 1.0, places=10)

    def test_product_values(self):
        """Test additivity on a product state."""
        a, _, rho = random_product(np.random.default_rng(4))
        self.assertAlmostEqual(conditional_entropy_q(rho, ["A"]), von_neumann_entropy(a), places=9)
        self.assertAlmostEqual(mutual_entropy_q(rho, ["A"]), 0.0, places=9)

    def test_trace_form_agrees(self):
        """Test that -Tr rho log rho_A|B matches S(AB) - S(B) for commuting cases."""
        for rho in (epr(), classically_correlated()):
            report = conditional_entropy_diagnostics(rho, ["A"])
            self.assertTrue(report.commuting)
            self.assertLess(report.discrepancy, 1e-9)

    def test_check_flag(self):
        """Test that check=True returns the same value."""
        rho = random_density_matrix(PAIR, np.random.default_rng(5))
        self.assertAlmostEqual(
            conditional_entropy_q(rho, ["A"], check=True), conditional_entropy_q(rho, ["A"]), places=12
        )

    def test_subadditivity(self):
        """Test that the mutual entropy is non-negative on random states."""
        rng = np.random.default_rng(6)
        for _ in range(10):
            rho = random_density_matrix(SubsystemLayout.of(("A", 2), ("B", 3)), rng)
            self.assertGreaterEqual(mutual_entropy_q(rho, ["A"]), -1e-10)

    def test_conditional_bounds(self):
        """Test -S(B) <= S(A|B) <= S(A) on random mixed and pure states."""
        rng = np.random.default_rng(11)
        layout = SubsystemLayout.of(("A", 2), ("B", 3))
        states = [random_density_matrix(layout, rng) for _ in range(10)]
        states += [random_pure_state(layout, rng).density() for _ in range(5)]
        for rho in states:
            s_a = von_neumann_entropy(partial_trace(rho, ["A"]))
            s_b = von_neumann_entropy(partial_trace(rho, ["B"]))
            s_a_given_b = conditional_entropy_q(rho, ["A"])
            self.assertGreaterEqual(s_a_given_b, -s_b - 1e-9)
            self.assertLessEqual(s_a_given_b, s_a + 1e-9)

    def test_local_unitary_invariance(self):
        """Test that entropies and diagram cells are unchanged by U_A (x) U_B."""
        rng = np.random.default_rng(12)
        layout = SubsystemLayout.of(("A", 2), ("B", 3))
        for _ in range(5):
            rho = random_density_matrix(layout, rng)
            local = np.kron(random_unitary(2, rng), random_unitary(3, rng))
            turned = evolve_unitary(rho, local)
            self.assertAlmostEqual(von_neumann_entropy(turned), von_neumann_entropy(rho), places=9)
            self.assertAlmostEqual(conditional_entropy_q(turned, ["A"]), conditional_entropy_q(rho, ["A"]), places=9)
            self.assertAlmostEqual(mutual_entropy_q(turned, ["A"]), mutual_entropy_q(rho, ["A"]), places=9)
            np.testing.assert_allclose(venn_quantum(turned, [["A"], ["B"]]).as_tuple(),
                                       venn_quantum(rho, [["A"], ["B"]]).as_tuple(), atol=1e-9)


class TestVennQuantum(unittest.TestCase):
    """Test cases for quantum entropy diagrams."""

    def test_epr(self):
        """Test the {-1, 2, -1} EPR diagram."""
        diagram = venn_quantum(epr(), [["A"], ["B"]])
        np.testing.assert_allclose(diagram.as_tuple(), (-1.0, 2.0, -1.0), atol=1e-9)

    def test_purification(self):
        """Test that system and reference form a {-S, 2S, -S} diagram."""
        rng = np.random.default_rng(7)
        for dim in (2, 3):
            rho = random_density_matrix(SubsystemLayout.of(("A", dim)), rng)
            s = von_neumann_entropy(rho)
            diagram = venn_quantum(purify(rho).density(), [["A"], ["R"]])
            np.testing.assert_allclose(diagram.as_tuple(), (-s, 2 * s, -s), atol=1e-8)

    def test_product_of_mixed(self):
        """Test two maximally mixed qubits."""
        rho = DensityMatrix.maximally_mixed(PAIR)
        np.testing.assert_allclose(venn_quantum(rho, [["A"], ["B"]]).as_tuple(), (1.0, 0.0, 1.0), atol=1e-12)

    def test_traces_out_spectators(self):
        """Test that factors outside the parties are traced out."""
        layout = SubsystemLayout.of(("A", 2), ("B", 2), ("C", 2))
        rho = tensor_product(epr(), DensityMatrix.maximally_mixed(SubsystemLayout.of(("C", 2))))
        self.assertEqual(rho.layout, layout)
        np.testing.assert_allclose(venn_quantum(rho, [["A"], ["B"]]).as_tuple(), (-1.0, 2.0, -1.0), atol=1e-9)

    def test_overlap(self):
        """Test that overlapping parties are rejected."""
        with self.assertRaises(UsageError):
            venn_quantum(epr(), [["A"], ["A", "B"]])


class TestWitnessAndBound(unittest.TestCase):
    """Test cases for the inseparability witness and the diagonal Shannon bound."""

    def test_witness(self):
        """Test the witness on EPR, classical, and product states."""
        result = inseparability_witness(epr(), ["A"])
        self.assertAlmostEqual(result.max_eigenvalue, 2.0, places=9)
        self.assertTrue(result.exceeds_unity)
        self.assertFalse(inseparability_witness(classically_correlated(), ["A"]).exceeds_unity)
        _, _, rho = random_product(np.random.default_rng(8))
        self.assertFalse(inseparability_witness(rho, ["A"]).exceeds_unity)

    def test_bound_equality_for_diagonal(self):
        """Test equality for a state diagonal in the basis."""
        rho = DensityMatrix(SubsystemLayout.of(("S", 3)), np.diag([0.5, 0.3, 0.2]))
        bound = diagonal_shannon_bound(rho, np.eye(3))
        self.assertTrue(bound.equality)
        self.assertAlmostEqual(bound.von_neumann, bound.diagonal_shannon, places=12)

    def test_bound_plus_state(self):
        """Test |+> in the computational basis."""
        plus = PureState(SubsystemLayout.of(("S", 2)), np.array([1, 1]) / math.sqrt(2)).density()
        bound = diagonal_shannon_bound(plus, np.eye(2))
        self.assertAlmostEqual(bound.von_neumann, 0.0, places=10)
        self.assertAlmostEqual(bound.diagonal_shannon, 1.0, places=12)
        self.assertFalse(bound.equality)

    def test_bound_random(self):
        """Test S_vn <= H_diag for random states and bases."""
        rng = np.random.default_rng(9)
        for _ in range(10):
            rho = random_density_matrix(SubsystemLayout.of(("S", 4)), rng)
            bound = diagonal_shannon_bound(rho, random_unitary(4, rng))
            self.assertLessEqual(bound.von_neumann, bound.diagonal_shannon + 1e-10)

    def test_bound_non_unitary(self):
        """Test that a non-unitary basis is rejected."""
        with self.assertRaises(ValidationError):
            diagonal_shannon_bound(DensityMatrix.maximally_mixed(PAIR), np.eye(4) * 2)


class TestClassicalEmbedding(unittest.TestCase):
    """Test cases for diagonal states and the quantum Gibbs state."""

    def test_agreement(self):
        """Test that quantum entropies of diagonal states equal their classical counterparts."""
        rng = np.random.default_rng(10)
        for _ in range(10):
            table = ProbTable((("A", 3), ("B", 2)), rng.dirichlet(np.ones(6)))
            rho = diagonal_state(table)
            self.assertAlmostEqual(von_neumann_entropy(rho), shannon_entropy(table, ["A", "B"]), places=10)
            self.assertAlmostEqual(conditional_entropy_q(rho, ["A"]),
                                   conditional_entropy(table, ["A"], ["B"]), places=10)
            self.assertAlmostEqual(mutual_entropy_q(rho, ["A"]), mutual_entropy(table, ["A"], ["B"]), places=10)

    def test_gibbs_thermodynamics(self):
        """Test S = beta (U - F) for a random Hamiltonian."""
        rng = np.random.default_rng(11)
        u = random_unitary(4, rng)
        hamiltonian = (u * np.array([0.0, 0.4, 1.1, 2.5])) @ u.conj().T
        thermo = gibbs_thermodynamics(hamiltonian, 1.7, log_base=math.e)
        self.assertAlmostEqual(thermo.entropy, 1.7 * (thermo.internal_energy - thermo.free_energy), places=9)

    def test_gibbs_matches_classical(self):
        """Test diag(0, 1) at beta = 1 against the classical Gibbs weights."""
        thermo = gibbs_thermodynamics(np.diag([0.0, 1.0]), 1.0)
        np.testing.assert_allclose(np.diag(thermo.state.entries).real, (0.731059, 0.268941), atol=1e-6)
        self.assertAlmostEqual(thermo.log_partition_function, math.log(1 + math.exp(-1)), places=12)

    def test_gibbs_beta_zero(self):
        """Test the infinite-temperature state."""
        thermo = gibbs_thermodynamics(np.diag([0.0, 1.0, 2.0]), 0.0)
        self.assertIsNone(thermo.free_energy)
        self.assertAlmostEqual(thermo.entropy, math.log2(3), places=12)


if __name__ == '__main__':
    unittest.main()
