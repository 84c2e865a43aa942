"""
Serialization module for the entropy calculus toolkit.
Defines the JSON schemas for probability tables, states, entropy diagrams, and
black hole summaries, plus loaders and dumpers that keep full float precision.
"""
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

from src.black_hole import Evaporation, FormationResult, trajectory_frame
from src.classical_info import ProbTable
from src.diagram import EntropyDiagram
from src.errors import EntropyCalculusError, ValidationError
from src.quantum_state import DensityMatrix, PureState, SubsystemLayout

# Set up logging
logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


class VariableModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str = Field(min_length=1)
    size: int = Field(ge=1)


class ProbTableModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variables: List[VariableModel] = Field(min_length=1)
    weights: List[float]


class FactorModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str = Field(min_length=1)
    dim: int = Field(ge=1)


class DensityMatrixModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    layout: List[FactorModel] = Field(min_length=1)
    re: List[List[float]]
    im: Optional[List[List[float]]] = None


class PureStateModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    layout: List[FactorModel] = Field(min_length=1)
    amp_re: List[float]
    amp_im: Optional[List[float]] = None

    @model_validator(mode="after")
    def check_lengths(self) -> "PureStateModel":
        if self.amp_im is not None and len(self.amp_im) != len(self.amp_re):
            raise ValueError("amp_re and amp_im must have the same length")
        return self


class EntropyDiagramModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    arity: Literal[2, 3]
    labels: List[str]
    cells: Dict[str, float]
    log_base: Union[Literal[2, "e"], float] = 2

    @model_validator(mode="after")
    def check_labels(self) -> "EntropyDiagramModel":
        if len(self.labels) != self.arity:
            raise ValueError(f"arity {self.arity} needs {self.arity} labels")
        return self


class BlackHoleSummaryModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    units: Literal["nats"] = "nats"
    steps: int
    initial_mass: float
    final_mass: float
    total_s_rad: float
    final_s_bh: float
    s_corr: float
    sigma_account: float
    defect: float
    tolerance: float
    evaporated: bool
    collapse_diagram: Optional[EntropyDiagramModel] = None


def _layout(factors) -> SubsystemLayout:
    return SubsystemLayout(tuple((f.label, f.dim) for f in factors))


def _base_to_json(log_base: float) -> Union[int, str, float]:
    if log_base == 2.0:
        return 2
    if log_base == math.e:
        return "e"
    return log_base


def _base_from_json(value) -> float:
    if value == "e":
        return math.e
    return float(value)


def _read(path: Union[str, Path]) -> Any:
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError:
        raise ValidationError(f"{path}: file not found") from None
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON ({e})") from None


def _describe(error: PydanticValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item["loc"]) or "<root>"
        parts.append(f"{where}: {item['msg']}")
    return "; ".join(parts)


def _parse(model, data: Any, source: str):
    try:
        return model.model_validate(data)
    except PydanticValidationError as e:
        logger.error(f"Schema validation failed for {source}")
        raise ValidationError(f"{source}: {_describe(e)}") from None


def _build(source: str, factory):
    # Domain checks (normalization, Hermiticity, trace) run in the constructors
    try:
        return factory()
    except EntropyCalculusError as e:
        raise type(e)(f"{source}: {e}") from None
    except ValueError as e:
        raise ValidationError(f"{source}: {e}") from None


def prob_table_from_dict(data: Any, source: str = "<table>") -> ProbTable:
    model = _parse(ProbTableModel, data, source)
    return _build(source, lambda: ProbTable(
        tuple((v.label, v.size) for v in model.variables), np.asarray(model.weights, dtype=float)
    ))


def density_matrix_from_dict(data: Any, source: str = "<state>") -> DensityMatrix:
    model = _parse(DensityMatrixModel, data, source)

    def factory():
        entries = np.asarray(model.re, dtype=float).astype(complex)
        if model.im is not None:
            imag = np.asarray(model.im, dtype=float)
            if imag.shape != entries.shape:
                raise ValidationError(f"'im' has shape {imag.shape}, 're' has shape {entries.shape}")
            entries = entries + 1j * imag
        return DensityMatrix.from_array(_layout(model.layout), entries)

    return _build(source, factory)


def pure_state_from_dict(data: Any, source: str = "<state>") -> PureState:
    model = _parse(PureStateModel, data, source)

    def factory():
        amplitudes = np.asarray(model.amp_re, dtype=float).astype(complex)
        if model.amp_im is not None:
            amplitudes = amplitudes + 1j * np.asarray(model.amp_im, dtype=float)
        return PureState(_layout(model.layout), amplitudes)

    return _build(source, factory)


def diagram_from_dict(data: Any, source: str = "<diagram>") -> EntropyDiagram:
    model = _parse(EntropyDiagramModel, data, source)
    return _build(source, lambda: EntropyDiagram(
        arity=model.arity, labels=tuple(model.labels), cells=model.cells, log_base=_base_from_json(model.log_base)
    ))


def load_prob_table(path: Union[str, Path]) -> ProbTable:
    """
    Load a probability table JSON file.

    Args:
        path: File path

    Returns:
        ProbTable: Validated table
    """
    return prob_table_from_dict(_read(path), str(path))


def load_state(path: Union[str, Path]) -> DensityMatrix:
    """
    Load a density matrix or pure state JSON file as a density matrix.

    Pure states (files with "amp_re") are converted to their projector.

    Args:
        path: File path

    Returns:
        DensityMatrix: Validated state
    """
    data = _read(path)
    if isinstance(data, dict) and "amp_re" in data:
        return pure_state_from_dict(data, str(path)).density()
    return density_matrix_from_dict(data, str(path))


def load_pure_state(path: Union[str, Path]) -> PureState:
    return pure_state_from_dict(_read(path), str(path))


def load_diagram(path: Union[str, Path]) -> EntropyDiagram:
    return diagram_from_dict(_read(path), str(path))


def _layout_dict(layout: SubsystemLayout) -> List[Dict[str, Any]]:
    return [{"label": label, "dim": dim} for label, dim in layout.factors]


def prob_table_to_dict(table: ProbTable) -> Dict[str, Any]:
    return {
        "variables": [{"label": label, "size": size} for label, size in table.variables],
        "weights": [float(w) for w in table.weights],
    }


def density_matrix_to_dict(rho: DensityMatrix) -> Dict[str, Any]:
    return {
        "layout": _layout_dict(rho.layout),
        "re": np.real(rho.entries).tolist(),
        "im": np.imag(rho.entries).tolist(),
    }


def pure_state_to_dict(psi: PureState) -> Dict[str, Any]:
    return {
        "layout": _layout_dict(psi.layout),
        "amp_re": np.real(psi.amplitudes).tolist(),
        "amp_im": np.imag(psi.amplitudes).tolist(),
    }


def diagram_to_dict(diagram: EntropyDiagram) -> Dict[str, Any]:
    return {
        "arity": diagram.arity,
        "labels": list(diagram.labels),
        "cells": dict(diagram.cells),
        "log_base": _base_to_json(diagram.log_base),
    }


def evaporation_summary_to_dict(
    evaporation: Evaporation,
    formation: Optional[FormationResult] = None
) -> Dict[str, Any]:
    """
    JSON-ready black hole summary with the collapse diagram embedded when present.

    Args:
        evaporation: Result of evaporate
        formation: Result of form_black_hole, if the ledger came from a collapse

    Returns:
        Dict[str, Any]: Summary validated against BlackHoleSummaryModel
    """
    payload = evaporation.summary.as_dict()
    if formation is not None:
        payload["collapse_diagram"] = diagram_to_dict(formation.collapse_diagram)
    return BlackHoleSummaryModel.model_validate(payload).model_dump(exclude_none=True)


def dumps(payload: Any) -> str:
    """
    Serialize to JSON text; Python floats already round-trip with repr precision.

    Args:
        payload: JSON-ready data

    Returns:
        str: Indented JSON
    """
    return json.dumps(payload, indent=2, allow_nan=False)


def trajectory_csv(evaporation: Evaporation) -> str:
    """
    Evaporation trajectory as CSV text with 17 significant digits.

    Args:
        evaporation: Result of evaporate

    Returns:
        str: CSV with header step,M,S_BH,dE,dE_eff,dS_BH,dS_rad,dS_corr,zurek_ratio,defect
    """
    buffer = io.StringIO()
    trajectory_frame(evaporation.trajectory).to_csv(buffer, index=False, float_format=FLOAT_FORMAT)
    return buffer.getvalue()


def read_trajectory_csv(path_or_buffer) -> pd.DataFrame:
    return pd.read_csv(path_or_buffer, float_precision="round_trip")


def equilibration_csv(points) -> str:
    """
    Equilibration trajectory as CSV text (step, marginal_sum, joint, correlation).

    Args:
        points: EquilibrationPoint sequence

    Returns:
        str: CSV text
    """
    frame = pd.DataFrame([p._asdict() for p in points], columns=["step", "marginal_sum", "joint", "correlation"])
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT)
