"""
Entropy Venn diagram module.
Holds the bipartite and tripartite inclusion-exclusion decomposition shared by
the classical and quantum entropy calculators.
"""
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType
from typing import Callable, Dict, FrozenSet, Mapping, Sequence, Tuple

from src.errors import InvariantViolation, UsageError

# Set up logging
logger = logging.getLogger(__name__)

DIAGRAM_TOLERANCE = 1e-9


def _normalize_cells(cells: Mapping[str, float]) -> Mapping[str, float]:
    return MappingProxyType({name: float(value) for name, value in cells.items()})


@dataclass(frozen=True)
class EntropyDiagram:
    """
    Venn-diagram decomposition of a joint entropy into conditional and mutual cells.

    For two parties A, B the cells are "A|B", "A:B", "B|A". For three parties the
    seven cells are "A|BC", "B|AC", "C|AB", "A:B|C", "A:C|B", "B:C|A", "A:B:C".
    """
    arity: int
    labels: Tuple[str, ...]
    cells: Mapping[str, float] = field(compare=False)
    log_base: float = 2.0

    def __post_init__(self):
        if self.arity not in (2, 3):
            raise UsageError(f"Entropy diagrams have arity 2 or 3, got {self.arity}")
        if len(self.labels) != self.arity:
            raise UsageError(f"Diagram of arity {self.arity} needs {self.arity} labels, got {len(self.labels)}")
        object.__setattr__(self, "labels", tuple(self.labels))
        for label in self.labels:
            if not label or ":" in label or "|" in label:
                raise UsageError(f"Invalid party label '{label}' (must be non-empty, without ':' or '|')")
        if len(set(self.labels)) != len(self.labels):
            raise UsageError(f"Duplicate party labels {self.labels}")
        object.__setattr__(self, "cells", _normalize_cells(self.cells))
        expected = set(cell_names(self.labels))
        if set(self.cells) != expected:
            raise UsageError(f"Diagram cells {sorted(self.cells)} do not match {sorted(expected)}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, EntropyDiagram):
            return NotImplemented
        return (self.arity, self.labels, self.log_base, dict(self.cells)) == \
            (other.arity, other.labels, other.log_base, dict(other.cells))

    @property
    def left(self) -> float:
        """Conditional entropy of the first party (bipartite diagrams)."""
        return self.cells[cell_names(self.labels)[0]]

    @property
    def center(self) -> float:
        """Mutual entropy of all parties."""
        names = cell_names(self.labels)
        return self.cells[names[1] if self.arity == 2 else names[-1]]

    @property
    def right(self) -> float:
        """Conditional entropy of the second party (bipartite diagrams)."""
        if self.arity != 2:
            raise UsageError("'right' is only defined for bipartite diagrams")
        return self.cells[cell_names(self.labels)[2]]

    def as_tuple(self) -> Tuple[float, ...]:
        """Cell values in canonical order."""
        return tuple(self.cells[name] for name in cell_names(self.labels))

    def joint(self) -> float:
        """Joint entropy of all parties (sum of every cell)."""
        return math.fsum(self.cells.values())

    def marginal(self, label: str) -> float:
        """
        Reconstruct the marginal entropy of one party from its cells.

        Args:
            label: Party label

        Returns:
            float: Sum of every cell inside the party's circle
        """
        if label not in self.labels:
            raise UsageError(f"Unknown party '{label}' in diagram {self.labels}")
        return math.fsum(value for name, value in self.cells.items() if _cell_contains(name, label, self.labels))


def cell_names(labels: Sequence[str]) -> Tuple[str, ...]:
    """
    Canonical cell names for a party labelling.

    Args:
        labels: Two or three party labels

    Returns:
        Tuple[str, ...]: Cell names in canonical order
    """
    if len(labels) == 2:
        a, b = labels
        return (f"{a}|{b}", f"{a}:{b}", f"{b}|{a}")
    if len(labels) == 3:
        a, b, c = labels
        return (
            f"{a}|{b}{c}", f"{b}|{a}{c}", f"{c}|{a}{b}",
            f"{a}:{b}|{c}", f"{a}:{c}|{b}", f"{b}:{c}|{a}",
            f"{a}:{b}:{c}",
        )
    raise UsageError(f"Entropy diagrams have 2 or 3 parties, got {len(labels)}")


def _cell_members(name: str, labels: Sequence[str]) -> FrozenSet[str]:
    # Parties named before the conditioning bar belong to the cell.
    head = name.split("|", 1)[0]
    return frozenset(head.split(":")) & frozenset(labels)


def _cell_contains(name: str, label: str, labels: Sequence[str]) -> bool:
    return label in _cell_members(name, labels)


def diagram_from_entropies(
    labels: Sequence[str],
    entropy_of: Callable[[FrozenSet[int]], float],
    log_base: float,
    check: bool = True
) -> EntropyDiagram:
    """
    Build a diagram by inclusion-exclusion from the entropies of party unions.

    Args:
        labels: Party labels (2 or 3)
        entropy_of: Returns the joint entropy of a set of party indices
        log_base: Log base the entropies are expressed in
        check: Verify the diagram invariants before returning

    Returns:
        EntropyDiagram: The decomposition
    """
    n = len(labels)
    if n not in (2, 3):
        raise UsageError(f"Entropy diagrams have 2 or 3 parties, got {n}")

    entropies: Dict[FrozenSet[int], float] = {}
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            key = frozenset(subset)
            entropies[key] = float(entropy_of(key))

    def s(*indices: int) -> float:
        return entropies[frozenset(indices)]

    names = cell_names(labels)
    if n == 2:
        values = (
            s(0, 1) - s(1),
            s(0) + s(1) - s(0, 1),
            s(0, 1) - s(0),
        )
    else:
        center = s(0) + s(1) + s(2) - s(0, 1) - s(0, 2) - s(1, 2) + s(0, 1, 2)
        values = (
            s(0, 1, 2) - s(1, 2),
            s(0, 1, 2) - s(0, 2),
            s(0, 1, 2) - s(0, 1),
            (s(0) + s(1) - s(0, 1)) - center,
            (s(0) + s(2) - s(0, 2)) - center,
            (s(1) + s(2) - s(1, 2)) - center,
            center,
        )

    diagram = EntropyDiagram(
        arity=n,
        labels=tuple(labels),
        cells=dict(zip(names, values)),
        log_base=log_base,
    )
    if check:
        marginals = {labels[i]: s(i) for i in range(n)}
        verify_diagram(diagram, marginals, entropies[frozenset(range(n))])
    logger.debug(f"Built {n}-party diagram over {labels}: {diagram.as_tuple()}")
    return diagram


def verify_diagram(
    diagram: EntropyDiagram,
    marginals: Mapping[str, float],
    joint: float,
    tolerance: float = DIAGRAM_TOLERANCE
) -> None:
    """
    Check that cells sum to the joint entropy and reproduce every marginal.

    Args:
        diagram: Diagram to check
        marginals: Marginal entropy per party label
        joint: Joint entropy of all parties
        tolerance: Absolute tolerance

    Raises:
        InvariantViolation: If a sum does not match
    """
    if abs(diagram.joint() - joint) > tolerance:
        logger.error(f"Diagram cells sum to {diagram.joint()} but joint entropy is {joint}")
        raise InvariantViolation(f"Diagram cells sum to {diagram.joint():.12g}, expected joint {joint:.12g}")
    for label, expected in marginals.items():
        actual = diagram.marginal(label)
        if abs(actual - expected) > tolerance:
            logger.error(f"Diagram cells for '{label}' sum to {actual} but marginal is {expected}")
            raise InvariantViolation(
                f"Diagram cells for '{label}' sum to {actual:.12g}, expected marginal {expected:.12g}"
            )
