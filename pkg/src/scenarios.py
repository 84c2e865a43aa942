"""
Measurement scenarios module for the entropy calculus toolkit.
Attaches measurement devices to the EPR pair through unitary premeasurements and
computes the tripartite system/device diagram and the reduced device diagram.
"""
import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, NamedTuple, Optional, Sequence, Union

import numpy as np

from src.diagram import EntropyDiagram
from src.errors import InvariantViolation, UsageError
from src.quantum_entropy import mutual_entropy_q, venn_quantum, von_neumann_entropy
from src.quantum_state import (
    DensityMatrix, PureState, SubsystemLayout, check_unitary, partial_trace
)

# Set up logging
logger = logging.getLogger(__name__)

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)

Basis = Union[str, np.ndarray]


@dataclass(frozen=True)
class MeasurementSpec:
    """
    Which subsystem a device measures, in which basis, and the device's label.

    The basis is "z" (computational), "x" (Hadamard, qubits only), or a unitary
    whose columns are the basis vectors.
    """
    target: str
    basis: Basis = "z"
    ancilla_label: str = "A"

    def basis_matrix(self, dim: int) -> np.ndarray:
        """
        Basis vectors as the columns of a dim x dim unitary.

        Args:
            dim: Dimension of the target subsystem

        Returns:
            np.ndarray: Unitary matrix
        """
        if isinstance(self.basis, str):
            name = self.basis.lower()
            if name == "z":
                return np.eye(dim, dtype=complex)
            if name == "x":
                if dim != 2:
                    raise UsageError(f"The x basis is defined for qubits, target '{self.target}' has dimension {dim}")
                return HADAMARD
            raise UsageError(f"Unknown basis '{self.basis}' (expected 'z', 'x', or a unitary matrix)")
        u = np.asarray(self.basis, dtype=complex)
        check_unitary(u, dim, "Measurement basis")
        return u


class EPRExperiment(NamedTuple):
    full_diagram: EntropyDiagram
    device_diagram: EntropyDiagram
    system_device_mutual: float
    state: PureState


def epr_state(labels: Sequence[str] = ("Q1", "Q2")) -> PureState:
    """
    EPR pair (|00> - |11>) / sqrt(2).

    Args:
        labels: Labels of the two qubits

    Returns:
        PureState: Amplitudes (1/sqrt2, 0, 0, -1/sqrt2)
    """
    first, second = labels
    amplitude = 1.0 / math.sqrt(2.0)
    return PureState(SubsystemLayout.of((first, 2), (second, 2)), np.array([amplitude, 0.0, 0.0, -amplitude]))


def attach_ancilla(psi: PureState, spec: MeasurementSpec) -> PureState:
    """
    Premeasure one subsystem with a fresh ancilla through a controlled copy.

    The ancilla starts in |0> and |b_k>|0> is mapped to |b_k>|k>; no collapse
    happens, so the enlarged state stays pure. The ancilla is appended last.

    Args:
        psi: State to measure
        spec: Target, basis, and ancilla label

    Returns:
        PureState: Enlarged state
    """
    layout = psi.layout
    target_idx = layout.index(spec.target)
    dim = layout.dims[target_idx]
    new_layout = layout.concat(SubsystemLayout.of((spec.ancilla_label, dim)))
    basis = spec.basis_matrix(dim)

    tensor = np.moveaxis(psi.tensor(), target_idx, 0).reshape(dim, -1)
    coefficients = basis.conj().T @ tensor
    # out[t, k, rest] = basis[t, k] * coefficients[k, rest]
    out = basis[:, :, None] * coefficients[None, :, :]
    rest_dims = [d for i, d in enumerate(layout.dims) if i != target_idx]
    out = out.reshape([dim, dim] + rest_dims)
    out = np.moveaxis(out, 1, -1)
    out = np.moveaxis(out, 0, target_idx)

    logger.debug(f"Attached ancilla '{spec.ancilla_label}' to '{spec.target}'")
    return PureState(new_layout, out.reshape(-1))


def epr_experiment(
    basis1: Basis = "z",
    basis2: Basis = "z",
    log_base: Optional[float] = None
) -> EPRExperiment:
    """
    Measure both halves of the EPR pair with devices A1 and A2.

    Args:
        basis1: Basis of the device on Q1
        basis2: Basis of the device on Q2
        log_base: Log base (default 2)

    Returns:
        EPRExperiment: Diagram over (Q1Q2, A1, A2), device diagram over (A1, A2),
            S(Q1Q2:A1A2), and the closed four-party state
    """
    psi = epr_state()
    psi = attach_ancilla(psi, MeasurementSpec("Q1", basis1, "A1"))
    psi = attach_ancilla(psi, MeasurementSpec("Q2", basis2, "A2"))
    rho = psi.density()

    joint = von_neumann_entropy(rho, log_base)
    if abs(joint) > 1e-9:
        raise InvariantViolation(f"Closed system entropy is {joint}, expected 0")

    full = venn_quantum(rho, [("Q1", "Q2"), ("A1",), ("A2",)], log_base)
    devices = venn_quantum(partial_trace(rho, ["A1", "A2"]), [("A1",), ("A2",)], log_base)
    mutual = mutual_entropy_q(rho, (("Q1", "Q2"), ("A1", "A2")), log_base)
    logger.info(f"EPR experiment ({_basis_name(basis1)}, {_basis_name(basis2)}): devices {devices.as_tuple()}")
    return EPRExperiment(full, devices, mutual, psi)


def _basis_name(basis: Basis) -> str:
    return basis if isinstance(basis, str) else "custom"


def four_party_marginals(
    state: Union[PureState, DensityMatrix],
    log_base: Optional[float] = None
) -> Dict[str, float]:
    """
    Entropy of every non-empty group of subsystems, keyed by the joined labels.

    Args:
        state: Closed multi-party state
        log_base: Log base (default 2)

    Returns:
        Dict[str, float]: e.g. {"Q1": 1.0, ..., "Q1Q2A1A2": 0.0}
    """
    rho = state.density() if isinstance(state, PureState) else state
    labels = rho.layout.labels
    marginals = {}
    for size in range(1, len(labels) + 1):
        for group in combinations(labels, size):
            marginals["".join(group)] = von_neumann_entropy(partial_trace(rho, group), log_base)
    return marginals
