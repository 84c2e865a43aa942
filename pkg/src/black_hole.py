"""
Black hole entropy ledger module for the entropy calculus toolkit.
Tracks Bekenstein-Hawking entropy, radiation entropy, and the correlation account
through formation and step-by-step evaporation, in natural units and nats.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import pandas as pd

from src.config import BH_MAX_STEP_FRACTION
from src.diagram import EntropyDiagram, cell_names
from src.errors import (
    DomainError, FormationError, InvariantViolation, StepSizeError, UsageError, ValidationError
)

# Set up logging
logger = logging.getLogger(__name__)

ZUREK_RATIO = 4.0 / 3.0
BOUNDARY_TOLERANCE = 1e-12
TRAJECTORY_COLUMNS = [
    "step", "M", "S_BH", "dE", "dE_eff", "dS_BH", "dS_rad", "dS_corr", "zurek_ratio", "defect"
]
COLLAPSE_LABELS = ("BH", "R'")


def _check_mass(mass: float) -> float:
    mass = float(mass)
    if not math.isfinite(mass) or mass <= 0:
        raise DomainError(f"Black hole mass must be positive and finite, got {mass}")
    return mass


def bh_entropy(mass: float) -> float:
    """
    Bekenstein-Hawking entropy 4 pi M^2 in nats.

    Args:
        mass: Black hole mass M > 0

    Returns:
        float: S_BH
    """
    mass = _check_mass(mass)
    return 4.0 * math.pi * mass * mass


def hawking_temperature(mass: float) -> float:
    """
    Hawking temperature 1 / (8 pi M).

    Args:
        mass: Black hole mass M > 0

    Returns:
        float: T_H
    """
    mass = _check_mass(mass)
    return 1.0 / (8.0 * math.pi * mass)


def schwarzschild_radius(mass: float) -> float:
    return 2.0 * _check_mass(mass)


def horizon_area(mass: float) -> float:
    """Horizon area 4 pi r^2 = 16 pi M^2; the entropy is a quarter of it."""
    radius = schwarzschild_radius(mass)
    return 4.0 * math.pi * radius * radius


def formation_boundary_temperature() -> float:
    """Temperature at which a proto black hole's entropy equals S_BH of its mass."""
    return (3.0 * math.pi) ** -0.2


@dataclass(frozen=True)
class BlackHole:
    mass: float

    def __post_init__(self):
        object.__setattr__(self, "mass", _check_mass(self.mass))

    @property
    def entropy(self) -> float:
        return bh_entropy(self.mass)

    @property
    def temperature(self) -> float:
        return hawking_temperature(self.mass)


@dataclass(frozen=True)
class ProtoBH:
    """
    Thermal proto black hole with energy T^4 and entropy (4/3) T^3.
    """
    temperature: float

    def __post_init__(self):
        t = float(self.temperature)
        if not math.isfinite(t) or t <= 0:
            raise DomainError(f"Proto black hole temperature must be positive and finite, got {t}")
        object.__setattr__(self, "temperature", t)

    @property
    def energy(self) -> float:
        return self.temperature ** 4

    @property
    def entropy(self) -> float:
        return 4.0 / 3.0 * self.temperature ** 3

    @property
    def mass(self) -> float:
        return self.energy


class StepRecord(NamedTuple):
    """One evaporation step; masses and entropies are the values after the step."""
    step: int
    mass_before: float
    mass: float
    s_bh: float
    dE: float
    dE_eff: float
    dS: float
    dS_bh: float
    dS_rad: float
    dS_corr: float
    zurek_ratio: float
    s_rad: float
    s_corr: float
    defect: float

    def as_row(self) -> dict:
        return {
            "step": self.step, "M": self.mass, "S_BH": self.s_bh, "dE": self.dE, "dE_eff": self.dE_eff,
            "dS_BH": self.dS_bh, "dS_rad": self.dS_rad, "dS_corr": self.dS_corr,
            "zurek_ratio": self.zurek_ratio, "defect": self.defect,
        }


@dataclass(frozen=True)
class Ledger:
    """
    Conserved-entropy account S_BH(M) + S_rad - S_corr = S_joint_target.

    sigma_account is the entropy the system started with: the proto black hole's
    entropy for formed holes, or (4/3) S_BH for holes opened from a mass.
    """
    bh: BlackHole
    s_rad: float
    s_corr: float
    s_joint_target: float = 0.0
    steps: Tuple[StepRecord, ...] = ()
    sigma_account: float = 0.0
    evaporated: bool = False

    @property
    def s_bh(self) -> float:
        return self.bh.entropy

    @property
    def mass(self) -> float:
        return self.bh.mass

    def defect(self) -> float:
        """Residual of the conservation law."""
        return self.s_bh + self.s_rad - self.s_corr - self.s_joint_target

    def conservation_tolerance(self) -> float:
        """
        Accumulated first-order bound: the sum of (dE/M)^2 S_BH over the steps
        plus rounding slack proportional to the largest account.
        """
        truncation = math.fsum((r.dE / r.mass_before) ** 2 * bh_entropy(r.mass_before) for r in self.steps)
        scale = max(1.0, abs(self.s_rad), abs(self.s_corr), abs(self.sigma_account))
        return truncation + 1e-12 * scale * (1 + len(self.steps))


class FormationResult(NamedTuple):
    ledger: Ledger
    collapse_diagram: EntropyDiagram


class EvaporationSummary(NamedTuple):
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

    def as_dict(self) -> dict:
        return dict(self._asdict())


class Evaporation(NamedTuple):
    trajectory: List[StepRecord]
    ledger: Ledger
    summary: EvaporationSummary


def ledger_from_mass(mass: float, s_joint_target: float = 0.0) -> Ledger:
    """
    Open a ledger for an existing black hole formed from a pure state.

    Args:
        mass: Black hole mass
        s_joint_target: Conserved joint entropy (0 for pure-state formation)

    Returns:
        Ledger: Empty radiation account, correlation account closing the balance
    """
    bh = BlackHole(mass)
    s_bh = bh.entropy
    return Ledger(
        bh=bh,
        s_rad=0.0,
        s_corr=s_bh - s_joint_target,
        s_joint_target=s_joint_target,
        sigma_account=ZUREK_RATIO * s_bh,
    )


def form_black_hole(proto: ProtoBH) -> FormationResult:
    """
    Collapse a proto black hole of mass M = E into a black hole plus radiation R'.

    The latent entropy dS = Sigma - S_BH goes to R'; R' and the hole are
    uncorrelated, so the collapse diagram over (BH, R') is {S_BH, 0, dS} in nats.

    Args:
        proto: Proto black hole

    Returns:
        FormationResult: Ledger and collapse diagram

    Raises:
        FormationError: If Sigma < S_BH
    """
    mass = proto.mass
    sigma = proto.entropy
    s_bh = bh_entropy(mass)
    latent = sigma - s_bh
    if latent < 0:
        if abs(latent) <= BOUNDARY_TOLERANCE * sigma:
            latent = 0.0
        else:
            logger.error(f"Formation rejected at T={proto.temperature}, M={mass}: Sigma={sigma} < S_BH={s_bh}")
            raise FormationError(proto.temperature, mass, sigma, s_bh)

    ledger = Ledger(
        bh=BlackHole(mass),
        s_rad=latent,
        s_corr=s_bh + latent,
        s_joint_target=0.0,
        sigma_account=sigma,
    )
    names = cell_names(COLLAPSE_LABELS)
    diagram = EntropyDiagram(
        arity=2,
        labels=COLLAPSE_LABELS,
        cells=dict(zip(names, (s_bh, 0.0, latent))),
        log_base=math.e,
    )
    logger.info(f"Formed black hole at T={proto.temperature}: M={mass}, S_BH={s_bh}, latent entropy {latent}")
    return FormationResult(ledger, diagram)


def _advance(index: int, mass: float, s_rad: float, s_corr: float, target: float,
             d_e: float) -> Optional[StepRecord]:
    t_h = hawking_temperature(mass)
    d_s = d_e / (4.0 * t_h)
    d_e_eff = d_e - t_h * d_s
    new_mass = mass - d_e_eff
    if new_mass <= 0:
        return None
    d_s_bh = bh_entropy(mass) - bh_entropy(new_mass)
    d_s_rad = d_s_bh + d_s
    s_rad += d_s_rad
    s_corr += d_s
    s_bh = bh_entropy(new_mass)
    return StepRecord(
        step=index,
        mass_before=mass,
        mass=new_mass,
        s_bh=s_bh,
        dE=d_e,
        dE_eff=d_e_eff,
        dS=d_s,
        dS_bh=d_s_bh,
        dS_rad=d_s_rad,
        dS_corr=d_s,
        zurek_ratio=d_s_rad / d_s_bh,
        s_rad=s_rad,
        s_corr=s_corr,
        defect=s_bh + s_rad - s_corr - target,
    )


def _check_step(mass: float, d_e: float) -> None:
    if not math.isfinite(d_e) or d_e < 0:
        raise StepSizeError(f"Energy step must be non-negative and finite, got {d_e}")
    if d_e > BH_MAX_STEP_FRACTION * mass * (1 + 1e-12):
        raise StepSizeError(
            f"Energy step {d_e} exceeds {BH_MAX_STEP_FRACTION} of the mass {mass}; "
            f"the first-order balance does not hold"
        )


def evaporation_step(ledger: Ledger, d_e: float) -> Ledger:
    """
    Radiate energy dE from the hole.

    With T_H = T_H(M): dS = dE / (4 T_H), the mass drops by dE - T_H dS = (3/4) dE,
    dS_BH is the exact drop of 4 pi M^2, dS_rad = dS_BH + dS, and the correlation
    account grows by dS so the ledger stays balanced.

    Args:
        ledger: Current ledger
        d_e: Energy radiated, 0 <= dE <= 0.01 M

    Returns:
        Ledger: New ledger (unchanged for dE = 0; flagged evaporated if M would reach 0)
    """
    if ledger.evaporated:
        raise UsageError("Ledger is already evaporated")
    d_e = float(d_e)
    _check_step(ledger.mass, d_e)
    if d_e == 0:
        return ledger
    record = _advance(len(ledger.steps) + 1, ledger.mass, ledger.s_rad, ledger.s_corr,
                      ledger.s_joint_target, d_e)
    if record is None:
        logger.info(f"Black hole of mass {ledger.mass} evaporated completely")
        return Ledger(ledger.bh, ledger.s_rad, ledger.s_corr, ledger.s_joint_target,
                      ledger.steps, ledger.sigma_account, evaporated=True)
    return Ledger(BlackHole(record.mass), record.s_rad, record.s_corr, ledger.s_joint_target,
                  ledger.steps + (record,), ledger.sigma_account)


def evaporate(ledger: Ledger, fraction: float, m_min: float) -> Evaporation:
    """
    Step with dE = fraction * M until M <= m_min.

    Args:
        ledger: Starting ledger
        fraction: Energy fraction per step, 0 < f <= 0.01
        m_min: Mass cutoff > 0

    Returns:
        Evaporation: Step rows, final ledger, and summary

    Raises:
        InvariantViolation: If the conservation defect exceeds its accumulated bound
    """
    fraction = float(fraction)
    if not (0 < fraction <= BH_MAX_STEP_FRACTION):
        raise ValidationError(f"Step fraction must lie in (0, {BH_MAX_STEP_FRACTION}], got {fraction}")
    m_min = float(m_min)
    if not math.isfinite(m_min) or m_min <= 0:
        raise DomainError(f"Mass cutoff must be positive, got {m_min}")
    if ledger.evaporated:
        raise UsageError("Ledger is already evaporated")

    mass, s_rad, s_corr = ledger.mass, ledger.s_rad, ledger.s_corr
    offset = len(ledger.steps)
    records: List[StepRecord] = []
    evaporated = False
    logger.info(f"Evaporating from M={mass} to M_min={m_min} at fraction {fraction}")
    while mass > m_min:
        record = _advance(offset + len(records) + 1, mass, s_rad, s_corr, ledger.s_joint_target, fraction * mass)
        if record is None:
            evaporated = True
            break
        records.append(record)
        mass, s_rad, s_corr = record.mass, record.s_rad, record.s_corr
        if len(records) % 1000 == 0:
            logger.debug(f"Step {record.step}: M={mass:.6g}, S_rad={s_rad:.6g}")

    final = Ledger(BlackHole(mass), s_rad, s_corr, ledger.s_joint_target,
                   ledger.steps + tuple(records), ledger.sigma_account, evaporated)
    defect = final.defect()
    tolerance = final.conservation_tolerance()
    if abs(defect) > tolerance:
        logger.error(f"Conservation defect {defect} exceeds bound {tolerance}")
        raise InvariantViolation(f"Ledger conservation defect {defect:.3g} exceeds accumulated bound {tolerance:.3g}")

    summary = EvaporationSummary(
        steps=len(records),
        initial_mass=ledger.mass,
        final_mass=mass,
        total_s_rad=s_rad,
        final_s_bh=final.s_bh,
        s_corr=s_corr,
        sigma_account=ledger.sigma_account,
        defect=defect,
        tolerance=tolerance,
        evaporated=evaporated,
    )
    logger.info(f"Evaporation finished after {len(records)} steps: S_rad={s_rad}, S_BH={final.s_bh}")
    return Evaporation(records, final, summary)


def trajectory_frame(records: List[StepRecord]) -> pd.DataFrame:
    """
    Evaporation rows as a DataFrame with the trajectory CSV columns.

    Args:
        records: Step records

    Returns:
        pd.DataFrame: One row per step
    """
    return pd.DataFrame([r.as_row() for r in records], columns=TRAJECTORY_COLUMNS)
