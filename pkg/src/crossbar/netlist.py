import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from jinja2 import Environment, FileSystemLoader, StrictUndefined
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from src.config.sim_config import TEMPLATE_DIR
from src.utils.errors import BranchLookupError, StructuralError

logger = logging.getLogger(__name__)

GROUND = "0"


class BranchKind(str, Enum):
    MEMRISTOR = "memristor"
    LINE = "line"
    STRATEGY = "strategy"
    LOAD = "load"
    SOURCE = "source"


@dataclass(frozen=True)
class Branch:
    """One two-terminal element.

    value is K for a memristor, ohms for the resistor kinds and volts for the
    source. The source's node_a is its positive terminal; node_b is ground.
    """

    name: str
    kind: BranchKind
    node_a: str
    node_b: str
    value: float
    alpha: float = 0.0

    @property
    def is_resistor(self) -> bool:
        return self.kind in (BranchKind.LINE, BranchKind.STRATEGY, BranchKind.LOAD)


@dataclass(frozen=True)
class Netlist:
    nodes: Tuple[str, ...]
    branches: Tuple[Branch, ...]
    driver_node: str
    sense_node: Optional[str] = None
    target_branch: Optional[str] = None
    source_branch: str = "VDD"
    load_branch: Optional[str] = None
    half_selected: Tuple[str, ...] = ()
    metadata: Dict[str, object] = field(default_factory=dict, compare=False)

    @cached_property
    def node_index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.nodes)}

    @cached_property
    def branch_index(self) -> Dict[str, int]:
        return {b.name: i for i, b in enumerate(self.branches)}

    def branch(self, name: str) -> Branch:
        try:
            return self.branches[self.branch_index[name]]
        except KeyError:
            raise BranchLookupError(f"unknown branch id {name!r}") from None

    def count(self, kind: BranchKind) -> int:
        return sum(1 for b in self.branches if b.kind is kind)

    @property
    def source(self) -> Branch:
        return self.branch(self.source_branch)

    def components(self) -> Tuple[int, np.ndarray]:
        idx = self.node_index
        rows = np.fromiter((idx[b.node_a] for b in self.branches), dtype=np.int64, count=len(self.branches))
        cols = np.fromiter((idx[b.node_b] for b in self.branches), dtype=np.int64, count=len(self.branches))
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(self.nodes), len(self.nodes)))
        return connected_components(graph, directed=False)

    def check_connectivity(self) -> None:
        """Every node must share one component with the driver and ground"""
        _, labels = self.components()
        idx = self.node_index
        reference = labels[idx[GROUND]]
        required = [self.driver_node] + ([self.sense_node] if self.sense_node else [])
        if self.target_branch:
            required.append(self.branch(self.target_branch).node_a)
        if any(labels[idx[name]] != reference for name in required):
            raise StructuralError("driver, target and ground are not connected")
        floating = [name for name in self.nodes if labels[idx[name]] != reference]
        if floating:
            raise StructuralError("network is not connected", floating)


_environment: Optional[Environment] = None


def _templates(template_dir: Path = TEMPLATE_DIR) -> Environment:
    global _environment
    if _environment is None:
        _environment = Environment(
            loader=FileSystemLoader(str(template_dir)),
            undefined=StrictUndefined,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )
    return _environment


def export_branch_list(netlist: Netlist) -> str:
    """One branch per line: kind, node names, value"""
    return _templates().get_template("branch_list.j2").render(netlist=netlist, kinds=BranchKind)


def export_spice(netlist: Netlist, title: str = "crossbar") -> str:
    """SPICE deck with the memristors as behavioural current sources"""
    return _templates().get_template("spice_deck.j2").render(netlist=netlist, kinds=BranchKind, title=title)
