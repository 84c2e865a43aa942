"""
Quantum entropy module for the entropy calculus toolkit.
Handles von Neumann entropies, the conditional amplitude matrix, conditional and
mutual quantum entropies, quantum Venn diagrams, and the inseparability witness.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from src.classical_info import ProbTable, entropy_of_distribution, party_label
from src.config import (
    DEFAULT_LOG_BASE, SUPPORT_CUTOFF, WITNESS_TOLERANCE, CONDITIONAL_AGREEMENT_TOLERANCE
)
from src.diagram import EntropyDiagram, diagram_from_entropies
from src.errors import InvariantViolation, UsageError
from src.quantum_state import (
    DensityMatrix, SubsystemLayout, check_unitary, gibbs_state, hermitian_eig,
    matrix_exp_on_support, matrix_log_on_support, partial_trace
)

# Set up logging
logger = logging.getLogger(__name__)

# A flat sequence of labels names the A side; an explicit split is a pair of label sequences,
# e.g. (("A",), ("B",)). ("A", "B") is therefore the A side {A, B}, not a split.
Cut = Union[Sequence[str], Tuple[Sequence[str], Sequence[str]]]


@dataclass(frozen=True)
class ConditionalAmplitudeMatrix:
    """
    rho_A|B = exp[log rho_AB - log(1_A (x) rho_B)], taken on the support of rho_AB.

    Eigenvalues may exceed one; that signals inseparability rather than an error.
    """
    a_labels: Tuple[str, ...]
    b_labels: Tuple[str, ...]
    entries: np.ndarray = field(compare=False, repr=False)
    log_entries: np.ndarray = field(compare=False, repr=False)
    spectrum: Tuple[float, ...] = ()

    @property
    def max_eigenvalue(self) -> float:
        return self.spectrum[0]


class ConditionalEntropyDiagnostics(NamedTuple):
    canonical: float
    trace_form: float
    discrepancy: float
    commuting: bool


class WitnessResult(NamedTuple):
    max_eigenvalue: float
    exceeds_unity: bool


class DiagonalBound(NamedTuple):
    von_neumann: float
    diagonal_shannon: float
    equality: bool


class QuantumThermo(NamedTuple):
    state: DensityMatrix
    log_partition_function: float
    free_energy: Optional[float]
    internal_energy: float
    entropy: float


def _base(log_base: Optional[float]) -> float:
    return DEFAULT_LOG_BASE if log_base is None else float(log_base)


def _side(part) -> Tuple[str, ...]:
    return (part,) if isinstance(part, str) else tuple(part)


def resolve_cut(layout: SubsystemLayout, cut: Cut) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """
    Turn a cut into (A-labels, B-labels) covering the layout.

    Args:
        layout: Subsystem layout of the state
        cut: Either the A-labels alone (B is the rest), or an explicit pair of label
            sequences such as (("A",), ("B", "C")). A bare string inside a pair is one label.

    Returns:
        Tuple: A-labels and B-labels, each in layout order
    """
    cut = tuple(cut)
    if cut and all(isinstance(item, str) for item in cut):
        a = set(cut)
        b = set(layout.labels) - a
    elif len(cut) == 2:
        a, b = set(_side(cut[0])), set(_side(cut[1]))
        if a & b:
            raise UsageError(f"Cut parts overlap on {sorted(a & b)}")
        if a | b != set(layout.labels):
            raise UsageError(f"Cut {sorted(a)} | {sorted(b)} does not cover the layout {list(layout.labels)}")
    else:
        raise UsageError(f"Invalid cut {cut!r}")
    for label in a | b:
        layout.index(label)
    if not a or not b:
        raise UsageError(
            f"Cut {cut!r} must split the layout {list(layout.labels)} into two non-empty parts; "
            f"write an explicit split as a pair of label sequences, e.g. (('A',), ('B',))"
        )
    ordered_a = tuple(label for label in layout.labels if label in a)
    ordered_b = tuple(label for label in layout.labels if label in b)
    return ordered_a, ordered_b


def von_neumann_entropy(rho: DensityMatrix, log_base: Optional[float] = None) -> float:
    """
    Von Neumann entropy -Tr rho log rho from the spectrum of rho.

    Args:
        rho: Density matrix
        log_base: Log base (default 2)

    Returns:
        float: Entropy in [0, log d]
    """
    values = rho.spectrum.eigenvalues
    return entropy_of_distribution(values[values > SUPPORT_CUTOFF], log_base)


def _identity_tensor_state(rho_b: DensityMatrix, a_layout: SubsystemLayout, layout: SubsystemLayout) -> np.ndarray:
    # 1_A (x) rho_B, with axes permuted back into the order of the full layout
    d_a = a_layout.dim
    matrix = np.kron(np.eye(d_a), rho_b.entries)
    order = list(a_layout.labels) + list(rho_b.layout.labels)
    dims = list(a_layout.dims) + list(rho_b.layout.dims)
    n = len(order)
    perm = [order.index(label) for label in layout.labels]
    tensor = matrix.reshape(dims + dims).transpose(perm + [p + n for p in perm])
    return tensor.reshape(layout.dim, layout.dim)


def conditional_amplitude_matrix(rho: DensityMatrix, cut: Cut) -> ConditionalAmplitudeMatrix:
    """
    Conditional amplitude matrix rho_A|B of a bipartite state.

    Both logarithms are taken on their supports; the exponential is taken on the
    support of rho_AB with its kernel mapped to 0.

    Args:
        rho: Joint state
        cut: Bipartition (A-labels, or an (A, B) pair)

    Returns:
        ConditionalAmplitudeMatrix: Hermitian non-negative operator on the joint space
    """
    a_labels, b_labels = resolve_cut(rho.layout, cut)
    rho_b = partial_trace(rho, b_labels)
    one_rho_b = _identity_tensor_state(rho_b, rho.layout.subset(a_labels), rho.layout)

    log_ab = matrix_log_on_support(rho, math.e)
    log_b = matrix_log_on_support(one_rho_b, math.e)
    generator = log_ab - log_b

    decomp = rho.spectrum
    support = decomp.eigenvectors[:, decomp.eigenvalues > SUPPORT_CUTOFF]
    entries = matrix_exp_on_support(generator, support)
    projector = support @ support.conj().T
    log_entries = projector @ generator @ projector

    spectrum = hermitian_eig(entries).eigenvalues
    if spectrum.size and spectrum[-1] < -1e-9:
        raise InvariantViolation(f"Conditional amplitude matrix has negative eigenvalue {spectrum[-1]:.3g}")
    logger.debug(f"Conditional amplitude matrix for {a_labels}|{b_labels}: max eigenvalue {spectrum[0]:.6f}")
    return ConditionalAmplitudeMatrix(
        a_labels, b_labels, entries, log_entries, tuple(float(x) for x in spectrum)
    )


def conditional_entropy_diagnostics(
    rho: DensityMatrix,
    cut: Cut,
    log_base: Optional[float] = None
) -> ConditionalEntropyDiagnostics:
    """
    Compare S(AB) - S(B) with -Tr rho_AB log rho_A|B.

    Args:
        rho: Joint state
        cut: Bipartition
        log_base: Log base (default 2)

    Returns:
        ConditionalEntropyDiagnostics: Both values, their gap, and whether the logs commute
    """
    a_labels, b_labels = resolve_cut(rho.layout, cut)
    canonical = von_neumann_entropy(rho, log_base) - von_neumann_entropy(partial_trace(rho, b_labels), log_base)

    amplitude = conditional_amplitude_matrix(rho, (a_labels, b_labels))
    trace_form = -float(np.real(np.trace(rho.entries @ amplitude.log_entries))) / math.log(_base(log_base))

    log_ab = matrix_log_on_support(rho, math.e)
    rho_b = partial_trace(rho, b_labels)
    log_b = matrix_log_on_support(
        _identity_tensor_state(rho_b, rho.layout.subset(a_labels), rho.layout), math.e
    )
    commutator = log_ab @ log_b - log_b @ log_ab
    commuting = float(np.max(np.abs(commutator))) < 1e-9
    return ConditionalEntropyDiagnostics(canonical, trace_form, abs(canonical - trace_form), commuting)


def conditional_entropy_q(
    rho: DensityMatrix,
    cut: Cut,
    log_base: Optional[float] = None,
    check: bool = False
) -> float:
    """
    Conditional quantum entropy S(A|B) = S(AB) - S(B); may be negative.

    Args:
        rho: Joint state
        cut: Bipartition
        log_base: Log base (default 2)
        check: Also evaluate -Tr rho log rho_A|B and warn on disagreement

    Returns:
        float: S(A|B)
    """
    a_labels, b_labels = resolve_cut(rho.layout, cut)
    if check:
        report = conditional_entropy_diagnostics(rho, (a_labels, b_labels), log_base)
        if report.discrepancy > CONDITIONAL_AGREEMENT_TOLERANCE:
            logger.warning(
                f"S(A|B) forms disagree by {report.discrepancy:.3g} "
                f"(difference form {report.canonical}, trace form {report.trace_form})"
            )
        return report.canonical
    return von_neumann_entropy(rho, log_base) - von_neumann_entropy(partial_trace(rho, b_labels), log_base)


def mutual_entropy_q(rho: DensityMatrix, cut: Cut, log_base: Optional[float] = None) -> float:
    """
    Mutual quantum entropy S(A:B) = S(A) + S(B) - S(AB); may exceed the classical bound.

    Args:
        rho: Joint state
        cut: Bipartition
        log_base: Log base (default 2)

    Returns:
        float: S(A:B)
    """
    a_labels, b_labels = resolve_cut(rho.layout, cut)
    return (
        von_neumann_entropy(partial_trace(rho, a_labels), log_base)
        + von_neumann_entropy(partial_trace(rho, b_labels), log_base)
        - von_neumann_entropy(rho, log_base)
    )


def venn_quantum(
    rho: DensityMatrix,
    parties: Sequence[Sequence[str]],
    log_base: Optional[float] = None
) -> EntropyDiagram:
    """
    Quantum entropy Venn diagram of two or three disjoint groups of subsystems.

    Factors outside every group are traced out first. Cells may be negative.

    Args:
        rho: State
        parties: Two or three label groups
        log_base: Log base (default 2)

    Returns:
        EntropyDiagram: Inclusion-exclusion decomposition
    """
    parties = [tuple(group) for group in parties]
    if len(parties) not in (2, 3):
        raise UsageError(f"Venn diagrams need 2 or 3 parties, got {len(parties)}")
    seen = set()
    for group in parties:
        if not group:
            raise UsageError("Every party needs at least one subsystem label")
        for label in group:
            rho.layout.index(label)
        if seen & set(group):
            raise UsageError(f"Parties overlap on {sorted(seen & set(group))}")
        seen.update(group)

    def entropy_of(indices) -> float:
        labels: List[str] = []
        for i in sorted(indices):
            labels.extend(parties[i])
        return von_neumann_entropy(partial_trace(rho, labels), log_base)

    return diagram_from_entropies([party_label(g) for g in parties], entropy_of, _base(log_base))


def inseparability_witness(rho: DensityMatrix, cut: Cut) -> WitnessResult:
    """
    Largest eigenvalue of rho_A|B and whether it exceeds one.

    A value above one certifies inseparability; a value at or below one proves nothing.

    Args:
        rho: Joint state
        cut: Bipartition

    Returns:
        WitnessResult: Maximum eigenvalue and flag
    """
    amplitude = conditional_amplitude_matrix(rho, cut)
    top = amplitude.max_eigenvalue
    return WitnessResult(top, top > 1.0 + WITNESS_TOLERANCE)


def diagonal_shannon_bound(rho: DensityMatrix, basis, log_base: Optional[float] = None) -> DiagonalBound:
    """
    Von Neumann entropy against the Shannon entropy of the diagonal of U^dagger rho U.

    Args:
        rho: State
        basis: Unitary whose columns form the measurement basis
        log_base: Log base (default 2)

    Returns:
        DiagonalBound: S_vn, H_diag, and whether rho is diagonal in that basis
    """
    u = np.asarray(basis, dtype=complex)
    check_unitary(u, rho.dim, "Basis")
    rotated = u.conj().T @ rho.entries @ u
    diagonal = np.clip(np.real(np.diag(rotated)), 0.0, None)
    h_diag = entropy_of_distribution(diagonal / diagonal.sum(), log_base)
    s_vn = von_neumann_entropy(rho, log_base)
    if s_vn > h_diag + 1e-10:
        raise InvariantViolation(f"Von Neumann entropy {s_vn} exceeds diagonal Shannon entropy {h_diag}")
    off_diagonal = rotated - np.diag(np.diag(rotated))
    equality = float(np.max(np.abs(off_diagonal))) < 1e-10 if rotated.size > 1 else True
    return DiagonalBound(s_vn, h_diag, equality)


def diagonal_state(table: ProbTable) -> DensityMatrix:
    """
    Embed a probability table as a diagonal density matrix with one factor per variable.

    Args:
        table: Classical joint distribution

    Returns:
        DensityMatrix: diag(p) over layout (label, size) per variable
    """
    layout = SubsystemLayout(table.variables)
    return DensityMatrix(layout, np.diag(table.weights.astype(complex)))


def gibbs_thermodynamics(hamiltonian, beta: float, log_base: Optional[float] = None,
                         layout: Optional[SubsystemLayout] = None) -> QuantumThermo:
    """
    Gibbs state with log Z, free energy, internal energy, and entropy.

    F and U are in natural energy units; the entropy is in the requested log base.
    At beta = 0 the free energy is undefined and returned as None.

    Args:
        hamiltonian: Hermitian matrix
        beta: Inverse temperature
        log_base: Log base for the entropy (default 2)
        layout: Optional subsystem layout

    Returns:
        QuantumThermo: State and thermodynamic quantities
    """
    state = gibbs_state(hamiltonian, beta, layout)
    energies = hermitian_eig(hamiltonian).eigenvalues
    ground = energies.min()
    log_z = -beta * ground + math.log(math.fsum(np.exp(-beta * (energies - ground))))
    h = np.asarray(hamiltonian, dtype=complex)
    internal_energy = float(np.real(np.trace(state.entries @ h)))
    free_energy = -log_z / beta if beta > 0 else None
    return QuantumThermo(state, log_z, free_energy, internal_energy, von_neumann_entropy(state, log_base))
