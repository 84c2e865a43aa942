"""
Quantum state module for the entropy calculus toolkit.
Density-matrix kernel: subsystem layouts, partial trace, Hermitian spectral
decomposition by cyclic Jacobi rotations, matrix functions on the support,
purification, Schmidt decomposition, unitary evolution, and Gibbs states.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.config import (
    HERMITIAN_TOLERANCE, PSD_TOLERANCE, TRACE_TOLERANCE, NORM_TOLERANCE, UNITARY_TOLERANCE,
    SUPPORT_CUTOFF, JACOBI_TOLERANCE, JACOBI_MAX_SWEEPS, MAX_DIMENSION, DEFAULT_LOG_BASE
)
from src.errors import LabelError, UsageError, ValidationError

# Set up logging
logger = logging.getLogger(__name__)

SCHMIDT_CUTOFF = 1e-12


@dataclass(frozen=True)
class SubsystemLayout:
    """
    Ordered, labeled tensor factors of a Hilbert space.
    """
    factors: Tuple[Tuple[str, int], ...]

    def __post_init__(self):
        factors = tuple((str(label), int(dim)) for label, dim in self.factors)
        labels = [label for label, _ in factors]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"Duplicate subsystem labels in {labels}")
        for label, dim in factors:
            if not label:
                raise ValidationError("Subsystem labels must be non-empty")
            if dim < 1:
                raise ValidationError(f"Subsystem '{label}' has dimension {dim} (must be >= 1)")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, *factors: Tuple[str, int]) -> "SubsystemLayout":
        return cls(tuple(factors))

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"Unknown subsystem '{label}' (layout has {list(self.labels)})") from None

    def subset(self, labels: Sequence[str]) -> "SubsystemLayout":
        """Layout of the named factors, kept in layout order."""
        wanted = set(labels)
        for label in labels:
            self.index(label)
        return SubsystemLayout(tuple(f for f in self.factors if f[0] in wanted))

    def concat(self, other: "SubsystemLayout") -> "SubsystemLayout":
        collision = set(self.labels) & set(other.labels)
        if collision:
            raise UsageError(f"Subsystem labels collide: {sorted(collision)}")
        return SubsystemLayout(self.factors + other.factors)


class SpectralDecomp(NamedTuple):
    """Eigenvalues in descending order and orthonormal eigenvector columns."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _as_square(matrix, what: str = "matrix") -> np.ndarray:
    m = np.array(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{what} has non-finite entries")
    return m


def _check_hermitian(m: np.ndarray, what: str = "matrix") -> None:
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    deviation = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if deviation > HERMITIAN_TOLERANCE * scale:
        raise ValidationError(f"{what} is not Hermitian (max |M - M^dagger| = {deviation:.3g})")


def hermitian_eig(matrix) -> SpectralDecomp:
    """
    Spectral decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Eigenvalues are returned in descending order; each eigenvector is phase-fixed
    so that its first component with modulus above 1e-10 is real and positive.

    Args:
        matrix: Hermitian matrix (within 1e-10 entrywise)

    Returns:
        SpectralDecomp: Eigenvalues and orthonormal eigenvectors
    """
    a = _as_square(matrix)
    _check_hermitian(a)
    n = a.shape[0]
    if n > MAX_DIMENSION:
        raise ValidationError(f"Dimension {n} exceeds the supported maximum {MAX_DIMENSION}")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)

    scale = max(1.0, float(np.linalg.norm(a)))
    threshold = JACOBI_TOLERANCE * scale
    sweeps = 0
    while True:
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < threshold:
            break
        if sweeps >= JACOBI_MAX_SWEEPS:
            logger.warning(f"Jacobi stopped after {sweeps} sweeps with off-diagonal mass {off:.3g}")
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                magnitude = abs(apq)
                if magnitude < 1e-300:
                    continue
                phase = apq / magnitude
                theta = 0.5 * math.atan2(2.0 * magnitude, (a[q, q] - a[p, p]).real)
                c, s = math.cos(theta), math.sin(theta)
                # Columns p, q of the pair rotation: (c, -s e^{-i phi}) and (s, c e^{-i phi})
                back = phase.conjugate()
                col_p, col_q = a[:, p].copy(), a[:, q]
                a[:, p] = c * col_p - s * back * col_q
                a[:, q] = s * col_p + c * back * col_q
                row_p, row_q = a[p, :].copy(), a[q, :]
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * row_p + c * phase * row_q
                vec_p, vec_q = v[:, p].copy(), v[:, q]
                v[:, p] = c * vec_p - s * back * vec_q
                v[:, q] = s * vec_p + c * back * vec_q
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
        sweeps += 1

    eigenvalues = np.real(np.diag(a)).copy()
    # Stable sort keeps the Jacobi order among degenerate eigenvalues
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    v = v[:, order]
    for k in range(n):
        column = v[:, k]
        nonzero = np.nonzero(np.abs(column) > 1e-10)[0]
        if nonzero.size:
            lead = column[nonzero[0]]
            v[:, k] = column * (abs(lead) / lead)
    logger.debug(f"Jacobi diagonalized a {n}x{n} matrix in {sweeps} sweeps")
    return SpectralDecomp(_readonly(eigenvalues), _readonly(v))


def _function_on_support(decomp: SpectralDecomp, fn, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    values = decomp.eigenvalues
    support = values > cutoff
    v = decomp.eigenvectors[:, support]
    return (v * fn(values[support])) @ v.conj().T


def matrix_log_on_support(rho, log_base: Optional[float] = None) -> np.ndarray:
    """
    Matrix logarithm restricted to the support of a positive semidefinite matrix.

    Eigenvalues above 1e-12 are mapped to log(lambda); the kernel is mapped to 0.

    Args:
        rho: Positive semidefinite Hermitian matrix (or DensityMatrix)
        log_base: Log base (default 2)

    Returns:
        np.ndarray: Hermitian matrix V diag(log lambda) V^dagger on the support
    """
    decomp = rho.spectrum if isinstance(rho, DensityMatrix) else hermitian_eig(rho)
    if decomp.eigenvalues.size and decomp.eigenvalues[-1] < -PSD_TOLERANCE:
        raise ValidationError(f"Matrix is not positive semidefinite (min eigenvalue {decomp.eigenvalues[-1]:.3g})")
    base = DEFAULT_LOG_BASE if log_base is None else log_base
    return _function_on_support(decomp, lambda x: np.log(x) / math.log(base))


def matrix_exp_on_support(generator, support: np.ndarray) -> np.ndarray:
    """
    Natural matrix exponential of a Hermitian generator compressed to a subspace.

    The generator is projected onto the orthonormal columns of `support`, exponentiated
    there, and embedded back; the orthogonal complement is mapped to 0.

    Args:
        generator: Hermitian matrix on the full space
        support: Orthonormal columns spanning the subspace

    Returns:
        np.ndarray: Hermitian positive semidefinite matrix
    """
    if support.shape[1] == 0:
        return np.zeros_like(np.asarray(generator, dtype=complex))
    compressed = support.conj().T @ np.asarray(generator, dtype=complex) @ support
    decomp = hermitian_eig(0.5 * (compressed + compressed.conj().T))
    w = support @ decomp.eigenvectors
    return (w * np.exp(decomp.eigenvalues)) @ w.conj().T


@dataclass(frozen=True)
class DensityMatrix:
    """
    Hermitian, positive semidefinite, unit-trace matrix over a subsystem layout.
    """
    layout: SubsystemLayout
    entries: np.ndarray = field(compare=False, repr=False)

    def __post_init__(self):
        m = _as_square(self.entries, "Density matrix")
        if m.shape[0] != self.layout.dim:
            raise ValidationError(
                f"Density matrix dimension {m.shape[0]} does not match layout dimension {self.layout.dim}"
            )
        if m.shape[0] > MAX_DIMENSION:
            raise ValidationError(f"Dimension {m.shape[0]} exceeds the supported maximum {MAX_DIMENSION}")
        _check_hermitian(m, "Density matrix")
        trace = np.trace(m)
        if abs(trace - 1.0) > TRACE_TOLERANCE:
            raise ValidationError(f"Density matrix trace is {trace.real:.12g}, not 1")
        m = 0.5 * (m + m.conj().T)
        object.__setattr__(self, "entries", _readonly(m))
        self.validate()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.layout == other.layout and np.array_equal(self.entries, other.entries)

    @classmethod
    def from_array(cls, layout: SubsystemLayout, entries) -> "DensityMatrix":
        """
        Build a density matrix from any array-like; the constructor runs every check.
        """
        return cls(layout, entries)

    @classmethod
    def maximally_mixed(cls, layout: SubsystemLayout) -> "DensityMatrix":
        return cls(layout, np.eye(layout.dim, dtype=complex) / layout.dim)

    def validate(self) -> "DensityMatrix":
        smallest = self.spectrum.eigenvalues[-1]
        if smallest < -PSD_TOLERANCE:
            raise ValidationError(f"Density matrix is not positive semidefinite (min eigenvalue {smallest:.3g})")
        return self

    @cached_property
    def spectrum(self) -> SpectralDecomp:
        return hermitian_eig(self.entries)

    @property
    def dim(self) -> int:
        return self.layout.dim

    def is_pure(self, tolerance: float = 1e-9) -> bool:
        return abs(float(np.real(np.trace(self.entries @ self.entries))) - 1.0) < tolerance


@dataclass(frozen=True)
class PureState:
    """
    Unit-norm state vector over a subsystem layout.
    """
    layout: SubsystemLayout
    amplitudes: np.ndarray = field(compare=False, repr=False)

    def __post_init__(self):
        psi = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if psi.size != self.layout.dim:
            raise ValidationError(f"State has {psi.size} amplitudes but layout dimension is {self.layout.dim}")
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValidationError(f"State norm is {norm:.12g}, not 1")
        object.__setattr__(self, "amplitudes", _readonly(psi))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PureState):
            return NotImplemented
        return self.layout == other.layout and np.array_equal(self.amplitudes, other.amplitudes)

    def density(self) -> DensityMatrix:
        """Projector |psi><psi| as a density matrix."""
        psi = self.amplitudes
        return DensityMatrix(self.layout, np.outer(psi, psi.conj()))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """
    Kronecker product of two density matrices with concatenated layouts.

    Args:
        a: First factor
        b: Second factor

    Returns:
        DensityMatrix: a (x) b
    """
    layout = a.layout.concat(b.layout)
    return DensityMatrix(layout, np.kron(a.entries, b.entries))


def partial_trace(rho: DensityMatrix, keep: Sequence[str]) -> DensityMatrix:
    """
    Reduced density matrix of the kept factors, tracing out every other factor.

    Args:
        rho: Density matrix
        keep: Labels of the factors to keep (result keeps layout order)

    Returns:
        DensityMatrix: Reduced state
    """
    keep = list(keep)
    if not keep:
        raise UsageError("partial_trace needs at least one factor to keep")
    layout = rho.layout
    keep_idx = sorted({layout.index(label) for label in keep})
    if len(keep_idx) == len(layout.factors):
        return rho

    dims = list(layout.dims)
    n = len(dims)
    tensor = rho.entries.reshape(dims + dims)
    # Trace from the last factor backwards so remaining axis indices stay valid
    for idx in sorted(set(range(n)) - set(keep_idx), reverse=True):
        tensor = np.trace(tensor, axis1=idx, axis2=idx + len(dims))
        dims.pop(idx)
    reduced_dim = math.prod(dims)
    reduced = tensor.reshape(reduced_dim, reduced_dim)
    return DensityMatrix(SubsystemLayout(tuple(layout.factors[i] for i in keep_idx)), reduced)


def purify(rho: DensityMatrix, reference_label: str = "R") -> PureState:
    """
    Purification |psi> = sum_i sqrt(p_i) |i>|i>_ref built from the spectral decomposition.

    The reference factor has dimension equal to the rank of rho.

    Args:
        rho: Density matrix to purify
        reference_label: Label of the reference factor

    Returns:
        PureState: State on layout (rho.layout, reference)
    """
    if reference_label in rho.layout.labels:
        raise UsageError(f"Reference label '{reference_label}' collides with the state layout")
    decomp = rho.spectrum
    support = decomp.eigenvalues > SUPPORT_CUTOFF
    weights = decomp.eigenvalues[support]
    vectors = decomp.eigenvectors[:, support]
    rank = int(support.sum())
    coefficients = np.sqrt(weights / weights.sum())
    amplitudes = (vectors * coefficients).reshape(rho.dim, rank)
    layout = rho.layout.concat(SubsystemLayout(((reference_label, rank),)))
    logger.debug(f"Purified a rank-{rank} state into a {layout.dim}-dimensional pure state")
    return PureState(layout, amplitudes.reshape(-1))


class SchmidtTerm(NamedTuple):
    coefficient: float
    left: np.ndarray
    right: np.ndarray


def schmidt_decompose(psi: PureState, left: Sequence[str]) -> List[SchmidtTerm]:
    """
    Schmidt decomposition of a pure state across a bipartition.

    Args:
        psi: Pure state
        left: Labels of the left part; the remaining factors form the right part

    Returns:
        List[SchmidtTerm]: Coefficients (descending) with left and right vectors
    """
    layout = psi.layout
    left = list(left)
    if not left or len(set(left)) != len(left):
        raise UsageError("Schmidt decomposition needs a non-empty left part without repeats")
    left_idx = [layout.index(label) for label in left]
    right_idx = [i for i in range(len(layout.factors)) if i not in left_idx]
    if not right_idx:
        raise UsageError("Schmidt decomposition needs a non-empty right part")

    tensor = np.transpose(psi.tensor(), left_idx + right_idx)
    d_left = math.prod(layout.dims[i] for i in left_idx)
    m = tensor.reshape(d_left, -1)
    left_vectors, singular_values, right_rows = np.linalg.svd(m, full_matrices=False)

    terms = []
    for k, coefficient in enumerate(singular_values):
        if coefficient <= SCHMIDT_CUTOFF:
            continue
        u = left_vectors[:, k]
        w = right_rows[k, :]
        # Same phase convention as hermitian_eig: first sizeable component of u is real positive
        lead = u[np.nonzero(np.abs(u) > 1e-10)[0][0]]
        turn = abs(lead) / lead
        terms.append(SchmidtTerm(float(coefficient), u * turn, w / turn))
    return terms


def check_unitary(u: np.ndarray, dim: Optional[int] = None, what: str = "Matrix") -> None:
    if dim is not None and u.shape != (dim, dim):
        raise ValidationError(f"{what} has shape {u.shape}, expected ({dim}, {dim})")
    deviation = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    if deviation > UNITARY_TOLERANCE:
        raise ValidationError(f"{what} is not unitary (max |U^dagger U - 1| = {deviation:.3g})")


def evolve_unitary(rho: DensityMatrix, unitary) -> DensityMatrix:
    """
    Unitary evolution rho -> U rho U^dagger.

    Args:
        rho: Density matrix
        unitary: Unitary matrix of matching dimension

    Returns:
        DensityMatrix: Evolved state with the same layout
    """
    u = _as_square(unitary, "Unitary")
    check_unitary(u, rho.dim, "Evolution operator")
    return DensityMatrix(rho.layout, u @ rho.entries @ u.conj().T)


def gibbs_state(hamiltonian, beta: float, layout: Optional[SubsystemLayout] = None) -> DensityMatrix:
    """
    Thermal state exp(-beta H) / Z computed through the spectral decomposition of H.

    Args:
        hamiltonian: Hermitian matrix
        beta: Inverse temperature (>= 0)
        layout: Subsystem layout; defaults to a single factor "S"

    Returns:
        DensityMatrix: The Gibbs state
    """
    if not math.isfinite(beta) or beta < 0:
        raise ValidationError(f"beta must be finite and >= 0, got {beta}")
    decomp = hermitian_eig(hamiltonian)
    energies = decomp.eigenvalues
    weights = np.exp(-beta * (energies - energies.min()))
    weights = weights / math.fsum(weights)
    v = decomp.eigenvectors
    layout = layout or SubsystemLayout((("S", len(energies)),))
    return DensityMatrix(layout, (v * weights) @ v.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure_state(layout: SubsystemLayout, rng: np.random.Generator) -> PureState:
    """Uniformly random pure state on a layout."""
    psi = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    return PureState(layout, psi / np.linalg.norm(psi))


def random_density_matrix(
    layout: SubsystemLayout,
    rng: np.random.Generator,
    rank: Optional[int] = None
) -> DensityMatrix:
    """
    Random density matrix G G^dagger / Tr with G a dim x rank complex Gaussian matrix.

    Args:
        layout: Subsystem layout
        rng: Random generator
        rank: Rank of the state (default full rank)

    Returns:
        DensityMatrix: The state
    """
    rank = layout.dim if rank is None else rank
    g = rng.standard_normal((layout.dim, rank)) + 1j * rng.standard_normal((layout.dim, rank))
    m = g @ g.conj().T
    return DensityMatrix(layout, m / np.trace(m).real)
