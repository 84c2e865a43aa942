"""
Classical information module for the entropy calculus toolkit.
Handles probability tables, Shannon-type entropies, Gibbs distributions, and
the measurement and equilibration demonstrations.
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import (
    DEFAULT_LOG_BASE, NORMALIZATION_TOLERANCE, RENORMALIZE_TOLERANCE, MAX_TABLE_CELLS,
    EQUILIBRATION_MAX_PARTICLES, EQUILIBRATION_MAX_CELLS, JOINT_ENTROPY_TOLERANCE
)
from src.diagram import EntropyDiagram, diagram_from_entropies
from src.errors import InvariantViolation, LabelError, UsageError, ValidationError

# Set up logging
logger = logging.getLogger(__name__)

Configuration = Tuple[int, ...]


@dataclass(frozen=True)
class ProbTable:
    """
    Dense joint probability distribution over named finite-alphabet variables.

    Weights are stored row-major over the variable order. Tables whose weights
    sum to within 1e-9 of one are renormalized; anything further off is rejected.
    """
    variables: Tuple[Tuple[str, int], ...]
    weights: np.ndarray = field(compare=False, repr=False)

    def __post_init__(self):
        variables = tuple((str(label), int(size)) for label, size in self.variables)
        if not variables:
            raise ValidationError("A probability table needs at least one variable")
        labels = [label for label, _ in variables]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"Duplicate variable labels in {labels}")
        for label, size in variables:
            if size < 1:
                raise ValidationError(f"Variable '{label}' has alphabet size {size} (must be >= 1)")

        cells = math.prod(size for _, size in variables)
        if cells > MAX_TABLE_CELLS:
            raise ValidationError(f"Table has {cells} cells, above the dense cap of {MAX_TABLE_CELLS}")

        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if weights.size != cells:
            raise ValidationError(
                f"Weight count {weights.size} does not match the alphabet product {cells}"
            )
        if not np.all(np.isfinite(weights)):
            raise ValidationError("Probability weights must be finite")
        if np.any(weights < 0):
            raise ValidationError(f"Probability weights must be >= 0 (min {weights.min():.3g})")

        total = math.fsum(weights)
        drift = abs(total - 1.0)
        if drift > RENORMALIZE_TOLERANCE:
            raise ValidationError(f"Probability weights sum to {total:.12g}, not 1")
        if drift > NORMALIZATION_TOLERANCE:
            logger.debug(f"Renormalizing table weights (sum drift {drift:.3g})")
        weights = weights / total
        weights.setflags(write=False)

        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "weights", weights)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProbTable):
            return NotImplemented
        return self.variables == other.variables and np.array_equal(self.weights, other.weights)

    @classmethod
    def from_array(cls, labels: Sequence[str], array) -> "ProbTable":
        """
        Build a table from an n-dimensional array, one axis per label.

        Args:
            labels: Variable labels in axis order
            array: Array of joint probabilities

        Returns:
            ProbTable: The table
        """
        array = np.asarray(array, dtype=float)
        if array.ndim != len(labels):
            raise ValidationError(f"Array has {array.ndim} axes but {len(labels)} labels were given")
        return cls(tuple(zip(labels, array.shape)), array.reshape(-1))

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.variables)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(size for _, size in self.variables)

    def tensor(self) -> np.ndarray:
        """Weights reshaped to one axis per variable."""
        return self.weights.reshape(self.sizes)

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelError(f"Unknown variable '{label}' (table has {list(self.labels)})") from None


@dataclass(frozen=True)
class GibbsSpec:
    """Energy levels, inverse temperature, and optional observable values."""
    levels: Tuple[float, ...]
    beta: float
    observable: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        levels = tuple(float(e) for e in self.levels)
        if not levels:
            raise ValidationError("Gibbs spec needs at least one energy level")
        if not all(math.isfinite(e) for e in levels):
            raise ValidationError("Energy levels must be finite")
        if not math.isfinite(self.beta) or self.beta < 0:
            raise ValidationError(f"beta must be finite and >= 0, got {self.beta}")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "beta", float(self.beta))
        if self.observable is not None:
            observable = tuple(float(a) for a in self.observable)
            if len(observable) != len(levels):
                raise ValidationError(
                    f"Observable has {len(observable)} values but there are {len(levels)} levels"
                )
            object.__setattr__(self, "observable", observable)


class GibbsResult(NamedTuple):
    table: ProbTable
    partition_function: float
    log_partition_function: float
    free_energy: Optional[float]
    mean_energy: float
    entropy: float
    log_base: float


class MeasurementDemo(NamedTuple):
    before: EntropyDiagram
    after: EntropyDiagram
    system_entropy: float


class EquilibrationPoint(NamedTuple):
    step: int
    marginal_sum: float
    joint: float
    correlation: float


def _base(log_base: Optional[float]) -> float:
    return DEFAULT_LOG_BASE if log_base is None else float(log_base)


def entropy_of_distribution(probabilities: Iterable[float], log_base: Optional[float] = None) -> float:
    """
    Shannon entropy of a list of probabilities, with 0 log 0 = 0.

    Args:
        probabilities: Non-negative values summing to one
        log_base: Log base (default 2)

    Returns:
        float: Entropy in units of the log base
    """
    if not isinstance(probabilities, np.ndarray):
        probabilities = list(probabilities)
    p = np.asarray(probabilities, dtype=float).reshape(-1)
    p = p[p > 0]
    if p.size == 0:
        return 0.0
    # fsum makes the result independent of the order of the terms
    value = -math.fsum(p * np.log(p)) / math.log(_base(log_base))
    return value if value > 0.0 else 0.0


def _check_labels(table: ProbTable, labels: Sequence[str], what: str = "subset") -> Tuple[str, ...]:
    labels = tuple(labels)
    if not labels:
        raise UsageError(f"Empty {what}: at least one variable label is required")
    if len(set(labels)) != len(labels):
        raise UsageError(f"Repeated labels in {what}: {list(labels)}")
    for label in labels:
        table.axis(label)
    return labels


def _check_disjoint(*groups: Sequence[str]) -> None:
    seen = set()
    for group in groups:
        overlap = seen.intersection(group)
        if overlap:
            raise UsageError(f"Label sets overlap on {sorted(overlap)}")
        seen.update(group)


def marginal(table: ProbTable, labels: Sequence[str]) -> ProbTable:
    """
    Marginal distribution over a subset of variables, in the requested order.

    Args:
        table: Joint probability table
        labels: Variables to keep

    Returns:
        ProbTable: The marginal table
    """
    labels = _check_labels(table, labels)
    axes = [table.axis(label) for label in labels]
    drop = tuple(i for i in range(len(table.variables)) if i not in axes)
    reduced = table.tensor().sum(axis=drop) if drop else table.tensor()
    kept_order = sorted(axes)
    reduced = np.transpose(reduced, [kept_order.index(a) for a in axes])
    return ProbTable(tuple(table.variables[a] for a in axes), reduced.reshape(-1))


def shannon_entropy(table: ProbTable, subset: Sequence[str], log_base: Optional[float] = None) -> float:
    """
    Shannon entropy of the marginal distribution of a subset of variables.

    Args:
        table: Joint probability table
        subset: Variable labels
        log_base: Log base (default 2)

    Returns:
        float: Entropy in units of the log base
    """
    subset = _check_labels(table, subset)
    return entropy_of_distribution(marginal(table, subset).weights, log_base)


def conditional_entropy(
    table: ProbTable,
    target: Sequence[str],
    given: Sequence[str],
    log_base: Optional[float] = None
) -> float:
    """
    Average conditional entropy H(target|given) = -sum p_ij log p_i|j.

    Args:
        table: Joint probability table
        target: Labels whose remaining uncertainty is measured
        given: Labels that are known
        log_base: Log base (default 2)

    Returns:
        float: Non-negative conditional entropy
    """
    target = _check_labels(table, target, "target")
    given = tuple(given)
    if not given:
        return shannon_entropy(table, target, log_base)
    given = _check_labels(table, given, "given")
    _check_disjoint(target, given)

    joint = marginal(table, given + target)
    n_given = math.prod(joint.sizes[:len(given)])
    p = joint.weights.reshape(n_given, -1)
    p_given = p.sum(axis=1, keepdims=True)
    mask = p > 0
    ratio = np.divide(p, p_given, out=np.ones_like(p), where=mask)
    value = -math.fsum((p[mask] * np.log(ratio[mask])).tolist()) / math.log(_base(log_base))
    return value if value > 0.0 else 0.0


def specific_conditional_entropy(
    table: ProbTable,
    target: Sequence[str],
    given: Sequence[str],
    value: Sequence[int],
    log_base: Optional[float] = None
) -> float:
    """
    Remaining entropy H(target|given=value) when the given variables sit in one configuration.

    Args:
        table: Joint probability table
        target: Labels whose uncertainty is measured
        given: Labels that are held fixed
        value: Configuration of the given labels
        log_base: Log base (default 2)

    Returns:
        float: Entropy of the conditional distribution p(target | given=value)
    """
    target = _check_labels(table, target, "target")
    given = _check_labels(table, given, "given")
    _check_disjoint(target, given)
    value = tuple(int(v) for v in value)
    joint = marginal(table, given + target).tensor()
    if len(value) != len(given) or any(not 0 <= v < s for v, s in zip(value, joint.shape)):
        raise UsageError(f"Configuration {value} is not valid for {list(given)}")
    slice_ = joint[value].reshape(-1)
    total = slice_.sum()
    if total <= 0:
        raise UsageError(f"Configuration {value} of {list(given)} has zero probability")
    return entropy_of_distribution(slice_ / total, log_base)


def mutual_entropy(
    table: ProbTable,
    x: Sequence[str],
    y: Sequence[str],
    log_base: Optional[float] = None
) -> float:
    """
    Shared (mutual) entropy H(X:Y) = H(X) - H(X|Y).

    Args:
        table: Joint probability table
        x: First label group
        y: Second label group
        log_base: Log base (default 2)

    Returns:
        float: Mutual entropy, symmetric in X and Y
    """
    x = _check_labels(table, x, "X")
    y = _check_labels(table, y, "Y")
    _check_disjoint(x, y)
    value = shannon_entropy(table, x, log_base) - conditional_entropy(table, x, y, log_base)
    return value if value > 0.0 else 0.0


def party_label(group: Sequence[str]) -> str:
    """Name of a party made of one or more variables."""
    return "".join(group)


def venn_classical(
    table: ProbTable,
    parties: Sequence[Sequence[str]],
    log_base: Optional[float] = None
) -> EntropyDiagram:
    """
    Entropy Venn diagram for two or three disjoint groups of variables.

    Args:
        table: Joint probability table
        parties: Two or three label groups
        log_base: Log base (default 2)

    Returns:
        EntropyDiagram: Inclusion-exclusion decomposition
    """
    parties = [tuple(group) for group in parties]
    if len(parties) not in (2, 3):
        raise UsageError(f"Venn diagrams need 2 or 3 parties, got {len(parties)}")
    for group in parties:
        _check_labels(table, group, "party")
    _check_disjoint(*parties)

    def entropy_of(indices) -> float:
        labels: List[str] = []
        for i in sorted(indices):
            labels.extend(parties[i])
        return shannon_entropy(table, labels, log_base)

    return diagram_from_entropies([party_label(g) for g in parties], entropy_of, _base(log_base))


def correlation_entropy(table: ProbTable, log_base: Optional[float] = None) -> float:
    """
    n-body correlation entropy: sum of single-variable entropies minus the joint entropy.

    Args:
        table: Joint probability table with at least two variables
        log_base: Log base (default 2)

    Returns:
        float: Non-negative correlation entropy
    """
    if len(table.variables) < 2:
        raise UsageError("Correlation entropy needs at least two variables")
    singles = math.fsum(shannon_entropy(table, [label], log_base) for label in table.labels)
    value = singles - entropy_of_distribution(table.weights, log_base)
    return value if value > 0.0 else 0.0


def gibbs_table(spec: GibbsSpec, log_base: Optional[float] = None, label: str = "E") -> GibbsResult:
    """
    Gibbs distribution p_i = exp(-beta E_i) / Z with partition function, free energy, and entropy.

    The free energy is in natural units (k = 1); the entropy is reported in the
    requested log base. At beta = 0 the free energy is undefined and returned as None.

    Args:
        spec: Energy levels and inverse temperature
        log_base: Log base for the entropy (default 2)
        label: Variable label of the resulting table

    Returns:
        GibbsResult: Distribution, Z, log Z, F, <E>, and S
    """
    energies = np.asarray(spec.levels, dtype=float)
    ground = energies.min()
    boltzmann = np.exp(-spec.beta * (energies - ground))
    shifted_z = math.fsum(boltzmann)
    probabilities = boltzmann / shifted_z

    log_z = -spec.beta * ground + math.log(shifted_z)
    try:
        z = math.exp(log_z)
    except OverflowError:
        z = math.inf
    mean_energy = math.fsum(probabilities * energies)
    free_energy = -log_z / spec.beta if spec.beta > 0 else None

    table = ProbTable(((label, len(energies)),), probabilities)
    entropy = entropy_of_distribution(table.weights, log_base)
    if free_energy is not None:
        thermodynamic = spec.beta * (mean_energy - free_energy) / math.log(_base(log_base))
        if abs(thermodynamic - entropy) > 1e-9 * max(1.0, abs(entropy)):
            logger.warning(f"Gibbs entropy {entropy} differs from beta(<E>-F) = {thermodynamic}")
    else:
        logger.debug("beta = 0: free energy undefined, reporting distribution and Z only")

    return GibbsResult(table, z, log_z, free_energy, mean_energy, entropy, _base(log_base))


def thermo_average(spec: GibbsSpec) -> float:
    """
    Thermodynamic average <A> = Z^-1 sum A_i exp(-beta E_i).

    Args:
        spec: Gibbs spec with observable values

    Returns:
        float: The average
    """
    if spec.observable is None:
        raise UsageError("Thermodynamic average needs observable values aligned with the levels")
    probabilities = gibbs_table(spec).table.weights
    return math.fsum(probabilities * np.asarray(spec.observable))


Readout = Union[Mapping[Configuration, int], Callable[[Configuration], int]]


def _identity_readout(sizes: Sequence[int]) -> Callable[[Configuration], int]:
    def readout(config: Configuration) -> int:
        return int(np.ravel_multi_index(config, sizes))
    return readout


def parity_readout(config: Configuration) -> int:
    """Parity of the sum of a configuration."""
    return sum(config) % 2


def constant_readout(config: Configuration) -> int:
    """A device that always shows its reference value."""
    return 0


READOUTS = {
    "identity": None,
    "parity": parity_readout,
    "constant": constant_readout,
}


def named_readout(name: str, table: ProbTable) -> Callable[[Configuration], int]:
    """
    Look up a readout by name.

    Args:
        name: One of identity, parity, constant
        table: System table (identity needs its alphabet sizes)

    Returns:
        Callable: Map from system configurations to device values
    """
    if name not in READOUTS:
        raise UsageError(f"Unknown readout '{name}' (choose from {sorted(READOUTS)})")
    if name == "identity":
        return _identity_readout(table.sizes)
    return READOUTS[name]


def measurement_demo(
    system: ProbTable,
    readout: Readout,
    device_label: str = "M",
    log_base: Optional[float] = None
) -> MeasurementDemo:
    """
    Entropy diagrams of a system before and after a deterministic measurement.

    Before the measurement the device sits in its reference state 0 and shares
    no entropy with the system. Afterwards the device shows readout(s).

    Args:
        system: Distribution over the system variables
        readout: Total map from system configurations to device values
        device_label: Label of the device variable
        log_base: Log base (default 2)

    Returns:
        MeasurementDemo: Before and after diagrams plus H(S)
    """
    if device_label in system.labels:
        raise UsageError(f"Device label '{device_label}' collides with a system variable")

    configurations = list(np.ndindex(*system.sizes))
    values: List[int] = []
    for config in configurations:
        try:
            value = readout[config] if isinstance(readout, Mapping) else readout(config)
        except (KeyError, IndexError):
            raise UsageError(f"Readout map is not defined on configuration {config}") from None
        if int(value) != value or value < 0:
            raise UsageError(f"Readout value {value} for {config} is not a non-negative integer")
        values.append(int(value))

    device_size = max(values) + 1
    weights = system.weights
    cells = weights.size * device_size
    if cells > MAX_TABLE_CELLS:
        raise ValidationError(
            f"Readout value {device_size - 1} gives a system x device table of {cells} cells, "
            f"above the dense cap of {MAX_TABLE_CELLS}"
        )

    before = np.zeros((weights.size, device_size))
    before[:, 0] = weights
    after = np.zeros((weights.size, device_size))
    after[np.arange(weights.size), values] = weights

    variables = system.variables + ((device_label, device_size),)
    party = [list(system.labels), [device_label]]
    before_table = ProbTable(variables, before.reshape(-1))
    after_table = ProbTable(variables, after.reshape(-1))
    before_diagram = venn_classical(before_table, party, log_base)
    after_diagram = venn_classical(after_table, party, log_base)

    h_before = shannon_entropy(before_table, system.labels, log_base)
    h_after = shannon_entropy(after_table, system.labels, log_base)
    if abs(h_before - h_after) > 1e-12:
        raise InvariantViolation(f"Measurement changed H(S) from {h_before} to {h_after}")
    if abs(after_diagram.left + after_diagram.center - h_after) > 1e-12:
        raise InvariantViolation("H(S) != H(S|M) + H(S:M) after measurement")

    logger.info(
        f"Measurement: H(S)={h_after:.6f}, H(S|M) {before_diagram.left:.6f} -> {after_diagram.left:.6f}, "
        f"H(S:M)={after_diagram.center:.6f}"
    )
    return MeasurementDemo(before_diagram, after_diagram, h_after)


Dynamics = Callable[[Configuration], Configuration]


def partner_parity_shift(n: int, cells: int) -> Dynamics:
    """
    Reversible lattice rule: each particle in turn moves 1 cell forward, 2 if its partner sits on an odd cell.

    Particle i's partner is particle (i+1) mod n; a lone particle always moves one cell.
    Each sub-update shears one coordinate by a function of another, so the rule is a bijection.
    """
    def step(config: Configuration) -> Configuration:
        c = list(config)
        for i in range(n):
            j = (i + 1) % n
            shift = 1 if j == i else 1 + (c[j] % 2)
            c[i] = (c[i] + shift) % cells
        return tuple(c)
    return step


def pair_swap(n: int, cells: int) -> Dynamics:
    """
    Reversible lattice rule: swap the cells of particle pairs (0,1), (2,3), then move particle 0 one cell.
    """
    def step(config: Configuration) -> Configuration:
        c = list(config)
        for i in range(0, n - 1, 2):
            c[i], c[i + 1] = c[i + 1], c[i]
        c[0] = (c[0] + 1) % cells
        return tuple(c)
    return step


DYNAMICS = {
    "partner_parity_shift": partner_parity_shift,
    "pair_swap": pair_swap,
}


def _check_bijection(dynamics: Dynamics, n: int, cells: int) -> None:
    images = set()
    for config in product(range(cells), repeat=n):
        image = tuple(int(x) for x in dynamics(config))
        if len(image) != n or any(not 0 <= x < cells for x in image):
            raise UsageError(f"Dynamics maps {config} outside the lattice: {image}")
        images.add(image)
    if len(images) != cells ** n:
        raise UsageError(
            f"Dynamics is not invertible: {cells ** n} configurations map onto {len(images)}"
        )


def equilibration_demo(
    n: int,
    v: int,
    V: int,
    dynamics: Union[str, Dynamics] = "partner_parity_shift",
    steps: int = 50,
    log_base: Optional[float] = None
) -> Tuple[EquilibrationPoint, ...]:
    """
    Track per-particle, joint, and correlation entropies of a gas expanding from v into V cells.

    The particles start independent and uniform over the first v cells. The
    distribution is kept as a sparse map from configurations to probabilities.

    Args:
        n: Number of particles (1..4)
        v: Initially occupied cells
        V: Total cells (v <= V <= 16)
        dynamics: Name of a shipped rule or a bijection on configurations
        steps: Number of updates
        log_base: Log base (default 2)

    Returns:
        Tuple[EquilibrationPoint, ...]: One point per step, step 0 included
    """
    if not 1 <= n <= EQUILIBRATION_MAX_PARTICLES:
        raise UsageError(f"Particle count must be in 1..{EQUILIBRATION_MAX_PARTICLES}, got {n}")
    if not 1 <= v <= V <= EQUILIBRATION_MAX_CELLS:
        raise UsageError(f"Need 1 <= v <= V <= {EQUILIBRATION_MAX_CELLS}, got v={v}, V={V}")
    if steps < 0:
        raise UsageError(f"Step count must be >= 0, got {steps}")

    if isinstance(dynamics, str):
        if dynamics not in DYNAMICS:
            raise UsageError(f"Unknown dynamics '{dynamics}' (choose from {sorted(DYNAMICS)})")
        rule = DYNAMICS[dynamics](n, V)
    else:
        rule = dynamics
    _check_bijection(rule, n, V)

    weight = 1.0 / v ** n
    state: Dict[Configuration, float] = {config: weight for config in product(range(v), repeat=n)}

    def point(step: int) -> EquilibrationPoint:
        joint = entropy_of_distribution(np.fromiter(state.values(), dtype=float), log_base)
        singles = []
        for i in range(n):
            counts: Dict[int, float] = defaultdict(float)
            for config, p in state.items():
                counts[config[i]] += p
            singles.append(entropy_of_distribution(np.fromiter(counts.values(), dtype=float), log_base))
        marginal_sum = math.fsum(singles)
        return EquilibrationPoint(step, marginal_sum, joint, max(marginal_sum - joint, 0.0))

    trajectory = [point(0)]
    initial_joint = trajectory[0].joint
    for step in range(1, steps + 1):
        state = {rule(config): p for config, p in state.items()}
        current = point(step)
        if abs(current.joint - initial_joint) > JOINT_ENTROPY_TOLERANCE:
            raise InvariantViolation(
                f"Joint entropy drifted from {initial_joint} to {current.joint} at step {step}"
            )
        trajectory.append(current)
        logger.debug(f"Equilibration step {step}: {current}")

    logger.info(
        f"Equilibration of {n} particles from {v} to {V} cells over {steps} steps: "
        f"H_joint={initial_joint:.6f}, final sum of marginals={trajectory[-1].marginal_sum:.6f}"
    )
    return tuple(trajectory)
