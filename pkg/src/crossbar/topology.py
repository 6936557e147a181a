"""Crossbar circuit assembly.

Cell (i, j) joins row node r{i}_{j} to column node c{i}_{j} through a
memristor. Every line carries n resistive segments: the row line starts at its
terminal rt{i} (column-index 0 side) and the column line ends at its terminal
ct{j} (row-index n-1 side), so driven current has to traverse the whole line
before reaching the sense terminal.
"""
import logging
import math
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config.sim_config import DEFAULT_R_GROUND, DEFAULT_R_LOAD, MAX_SIZE, MIN_SIZE, V_DD_RANGE
from src.crossbar.netlist import GROUND, Branch, BranchKind, Netlist
from src.device.memristor import DeviceParams
from src.utils.errors import ConstructionError

logger = logging.getLogger(__name__)


class Metal(str, Enum):
    M3 = "M3"
    M5 = "M5"
    M6 = "M6"


class InterconnectSpec(BaseModel):
    """Per-unit-cell line parasitics; c_line is carried for reference only"""

    model_config = ConfigDict(frozen=True)

    metal: Metal
    r_line: float = Field(ge=0)
    c_line: float = Field(ge=0)
    width_nm: float
    pitch_nm: float
    thickness_nm: float


INTERCONNECT_TABLE = {
    Metal.M3: InterconnectSpec(metal=Metal.M3, width_nm=16, pitch_nm=28, thickness_nm=49, r_line=3.122, c_line=3.871e-18),
    Metal.M5: InterconnectSpec(metal=Metal.M5, width_nm=16, pitch_nm=28, thickness_nm=28, r_line=5.869, c_line=2.871e-18),
    Metal.M6: InterconnectSpec(metal=Metal.M6, width_nm=40, pitch_nm=80, thickness_nm=80, r_line=0.7396, c_line=1.020e-17),
}


def interconnect(metal) -> InterconnectSpec:
    return INTERCONNECT_TABLE[Metal(metal)]


class CellState(str, Enum):
    LRS = "LRS"
    HRS = "HRS"


class PatternKind(str, Enum):
    ALL_ONES = "AllOnes"
    ALL_ZEROS = "AllZeros"
    CUSTOM = "Custom"


class Strategy(str, Enum):
    FRC = "FRC"
    GRFC = "GRFC"
    FRGC = "FRGC"
    GRC = "GRC"

    @property
    def grounds_rows(self) -> bool:
        return self in (Strategy.GRFC, Strategy.GRC)

    @property
    def grounds_columns(self) -> bool:
        return self in (Strategy.FRGC, Strategy.GRC)


class MeasurementMode(str, Enum):
    SUPPLY_MINUS_TARGET = "SupplyMinusTarget"
    SENSE_MINUS_TARGET = "SenseMinusTarget"
    HALF_SELECTED_MEAN = "HalfSelectedMean"


class TargetState(str, Enum):
    LRS = "LRS"
    HRS = "HRS"
    FROM_PATTERN = "FromPattern"


class CellStateMatrix(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=MIN_SIZE, le=MAX_SIZE)
    states: Tuple[Tuple[CellState, ...], ...]
    kind: PatternKind = PatternKind.CUSTOM

    @model_validator(mode="after")
    def _check_square(self):
        if len(self.states) != self.n or any(len(row) != self.n for row in self.states):
            raise ValueError(f"pattern must be {self.n}x{self.n}")
        return self

    def lrs_mask(self) -> np.ndarray:
        return np.array([[s is CellState.LRS for s in row] for row in self.states], dtype=bool)

    def state(self, i: int, j: int) -> CellState:
        return self.states[i][j]


def make_pattern(kind, n: int, custom: Optional[Sequence[Sequence]] = None) -> CellStateMatrix:
    kind = PatternKind(kind)
    if n < MIN_SIZE:
        raise ConstructionError(f"array size must be at least {MIN_SIZE}, got {n}")
    if kind is PatternKind.CUSTOM:
        if custom is None:
            raise ConstructionError("custom pattern requires a grid")
        if len(custom) != n or any(len(row) != n for row in custom):
            raise ConstructionError(f"custom grid is not {n}x{n}")
        states = tuple(tuple(CellState(s) for s in row) for row in custom)
    else:
        fill = CellState.LRS if kind is PatternKind.ALL_ONES else CellState.HRS
        states = tuple((fill,) * n for _ in range(n))
    return CellStateMatrix(n=n, states=states, kind=kind)


class CrossbarSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=MIN_SIZE, le=MAX_SIZE)
    pattern: CellStateMatrix
    device: DeviceParams = DeviceParams()
    interconnect: InterconnectSpec = INTERCONNECT_TABLE[Metal.M3]
    strategy: Strategy = Strategy.FRC
    v_dd: float = 1.5
    r_ground: float = Field(default=DEFAULT_R_GROUND, gt=0)
    r_load: float = Field(default=DEFAULT_R_LOAD, ge=0)
    # 1-based (row, col); None selects the centre cell
    target: Optional[Tuple[int, int]] = None
    measurement_mode: MeasurementMode = MeasurementMode.SUPPLY_MINUS_TARGET

    @field_validator("v_dd")
    @classmethod
    def _check_v_dd(cls, value: float) -> float:
        if not math.isfinite(value) or value <= 0:
            raise ValueError(f"v_dd must be positive, got {value}")
        if not V_DD_RANGE[0] <= value <= V_DD_RANGE[1]:
            logger.warning(f"v_dd={value:g} V is outside the studied read range {V_DD_RANGE}")
        return value

    @model_validator(mode="after")
    def _check_pattern(self):
        if self.pattern.n != self.n:
            raise ValueError(f"pattern is {self.pattern.n}x{self.pattern.n} but the array is {self.n}x{self.n}")
        return self

    @property
    def target_cell(self) -> Tuple[int, int]:
        if self.target is not None:
            return self.target
        centre = math.ceil(self.n / 2)
        return centre, centre

    @property
    def target_index(self) -> Tuple[int, int]:
        row, col = self.target_cell
        return row - 1, col - 1

    @property
    def metal(self) -> Metal:
        return self.interconnect.metal

    def with_changes(self, **changes) -> "CrossbarSpec":
        """Copy with validation re-run; a new size regenerates uniform patterns"""
        data = dict(self)
        data.update(changes)
        if "n" in changes and "pattern" not in changes and self.pattern.kind is not PatternKind.CUSTOM:
            data["pattern"] = make_pattern(self.pattern.kind, changes["n"])
        if "n" in changes and "target" not in changes:
            data["target"] = None
        return CrossbarSpec(**data)


def crossbar_spec(
    n: int,
    pattern=PatternKind.ALL_ONES,
    metal=Metal.M3,
    strategy=Strategy.FRC,
    k_on: Optional[float] = None,
    v_dd: float = 1.5,
    **kwargs,
) -> CrossbarSpec:
    """Shorthand for the uniform-pattern specs that sweeps and tests use"""
    device = kwargs.pop("device", None) or (DeviceParams(k_on=k_on) if k_on is not None else DeviceParams())
    return CrossbarSpec(
        n=n,
        pattern=make_pattern(pattern, n),
        device=device,
        interconnect=kwargs.pop("interconnect", None) or interconnect(metal),
        strategy=Strategy(strategy),
        v_dd=v_dd,
        **kwargs,
    )


def row_node(i: int, j: int) -> str:
    return f"r{i}_{j}"


def column_node(i: int, j: int) -> str:
    return f"c{i}_{j}"


def cell_branch(i: int, j: int) -> str:
    return f"M{i}_{j}"


def build_crossbar(spec: CrossbarSpec, target_state=TargetState.FROM_PATTERN) -> Netlist:
    n = spec.n
    tr, tc = spec.target_index
    if not (0 <= tr < n and 0 <= tc < n):
        raise ConstructionError(f"target {spec.target_cell} lies outside the {n}x{n} grid")
    target_state = TargetState(target_state)
    lrs = spec.pattern.lrs_mask()
    if target_state is not TargetState.FROM_PATTERN:
        lrs = lrs.copy()
        lrs[tr, tc] = target_state is TargetState.LRS

    device = spec.device
    r_line = spec.interconnect.r_line
    nodes: List[str] = []
    branches: List[Branch] = []

    for i in range(n):
        nodes.extend(row_node(i, j) for j in range(n))
    for i in range(n):
        nodes.extend(column_node(i, j) for j in range(n))
    nodes.extend(f"rt{i}" for i in range(n))
    nodes.extend(f"ct{j}" for j in range(n))
    nodes.append(GROUND)

    for i in range(n):
        for j in range(n):
            k = device.k_on if lrs[i, j] else device.k_off
            branches.append(Branch(cell_branch(i, j), BranchKind.MEMRISTOR, row_node(i, j), column_node(i, j), k, device.alpha))

    for i in range(n):
        branches.append(Branch(f"RLr{i}_0", BranchKind.LINE, f"rt{i}", row_node(i, 0), r_line))
        for j in range(1, n):
            branches.append(Branch(f"RLr{i}_{j}", BranchKind.LINE, row_node(i, j - 1), row_node(i, j), r_line))
    for j in range(n):
        for i in range(n - 1):
            branches.append(Branch(f"RLc{j}_{i}", BranchKind.LINE, column_node(i, j), column_node(i + 1, j), r_line))
        branches.append(Branch(f"RLc{j}_{n - 1}", BranchKind.LINE, column_node(n - 1, j), f"ct{j}", r_line))

    branches.append(Branch("VDD", BranchKind.SOURCE, f"rt{tr}", GROUND, spec.v_dd))
    branches.append(Branch("RLOAD", BranchKind.LOAD, f"ct{tc}", GROUND, spec.r_load))

    if spec.strategy.grounds_rows:
        branches.extend(
            Branch(f"RGr{i}", BranchKind.STRATEGY, f"rt{i}", GROUND, spec.r_ground) for i in range(n) if i != tr
        )
    if spec.strategy.grounds_columns:
        branches.extend(
            Branch(f"RGc{j}", BranchKind.STRATEGY, f"ct{j}", GROUND, spec.r_ground) for j in range(n) if j != tc
        )

    netlist = Netlist(
        nodes=tuple(nodes),
        branches=tuple(branches),
        driver_node=f"rt{tr}",
        sense_node=f"ct{tc}",
        target_branch=cell_branch(tr, tc),
        source_branch="VDD",
        load_branch="RLOAD",
        half_selected=tuple(cell_branch(tr, j) for j in range(n) if j != tc),
        metadata={
            "size": n,
            "metal": spec.metal.value,
            "pattern": spec.pattern.kind.value,
            "strategy": spec.strategy.value,
            "v_dd": spec.v_dd,
            "target": spec.target_cell,
            "target_state": target_state.value,
        },
    )
    netlist.check_connectivity()
    logger.debug(f"built {n}x{n} {spec.strategy.value} netlist: {len(nodes)} nodes, {len(branches)} branches")
    return netlist
