import pytest

from src.config.run_config import RunConfig
from src.crossbar.netlist import GROUND, Branch, BranchKind, Netlist
from src.solver.dc_solver import SolveOptions


@pytest.fixture
def tight_options() -> SolveOptions:
    """Tight tolerances and no shunts, for comparison against the dense oracle"""
    return SolveOptions(abs_tol=1e-13, rel_tol=1e-12, g_min=0.0)


@pytest.fixture
def run_config() -> RunConfig:
    return RunConfig(workers=1)


@pytest.fixture
def divider_netlist() -> Netlist:
    """1 V across 100 ohm and 300 ohm in series; b sits at 0.75 V"""
    return Netlist(
        nodes=("a", "b", GROUND),
        branches=(
            Branch("R1", BranchKind.LINE, "a", "b", 100.0),
            Branch("R2", BranchKind.LOAD, "b", GROUND, 300.0),
            Branch("VDD", BranchKind.SOURCE, "a", GROUND, 1.0),
        ),
        driver_node="a",
        load_branch="R2",
    )


@pytest.fixture
def sqlite_url(tmp_path) -> str:
    return f"sqlite:///{tmp_path / 'results' / 'sneakpath.db'}"
