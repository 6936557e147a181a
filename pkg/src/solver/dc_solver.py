"""DC operating point of a Netlist by Newton iteration on the nodal equations.

The ideal source is eliminated as a known-voltage node, zero-ohm resistors
merge their endpoints into one supernode, and every remaining node gets a
g_min shunt to ground. Each Newton step linearises the sinh devices and solves
one sparse symmetric system.
"""
import json
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import spsolve

from src.config.sim_config import G_MIN, KCL_REL_TOL, MAX_HALVINGS, SOURCE_STEPS, settings
from src.crossbar.netlist import GROUND, Branch, BranchKind, Netlist
from src.device.memristor import device_conductance_array, device_current_array
from src.utils.errors import BranchLookupError, SolverError, StructuralError

logger = logging.getLogger(__name__)


class Damping(str, Enum):
    NONE = "None"
    LINE_HALVING = "LineHalving"


class SolveOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    abs_tol: float = Field(default=settings.abs_tol, gt=0)
    rel_tol: float = Field(default=settings.rel_tol, gt=0)
    max_iter: int = Field(default=settings.max_iter, ge=1)
    damping: Damping = Damping.LINE_HALVING
    # 0 disables the source-stepping fallback
    source_steps: int = Field(default=SOURCE_STEPS, ge=0)
    g_min: float = Field(default=G_MIN, ge=0)


@dataclass(frozen=True)
class SolveResult:
    netlist: Netlist
    node_voltages: np.ndarray
    branch_currents: np.ndarray
    shunt_currents: np.ndarray
    iterations: int
    max_kcl_residual: float
    converged: bool

    def voltage(self, node: str) -> float:
        try:
            return float(self.node_voltages[self.netlist.node_index[node]])
        except KeyError:
            raise BranchLookupError(f"unknown node {node!r}") from None

    def current(self, branch: str) -> float:
        return branch_current(self, branch)

    @property
    def source_current(self) -> float:
        return self.current(self.netlist.source_branch)

    def voltage_map(self) -> Dict[str, float]:
        return {name: float(v) for name, v in zip(self.netlist.nodes, self.node_voltages)}


def branch_current(result: SolveResult, branch: str) -> float:
    """Current of a branch from node_a to node_b; the source reports the current it delivers"""
    if not result.converged:
        raise SolverError("branch currents requested from an unconverged solve", result.max_kcl_residual, result.iterations)
    try:
        index = result.netlist.branch_index[branch]
    except KeyError:
        raise BranchLookupError(f"unknown branch id {branch!r}") from None
    return float(result.branch_currents[index])


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # smaller index wins so grouping does not depend on branch order
            self.parent[max(ra, rb)] = min(ra, rb)


class _CompiledNetwork:
    """Index arrays for the vectorised residual and Jacobian"""

    def __init__(self, netlist: Netlist, g_min: float):
        self.netlist = netlist
        sources = [b for b in netlist.branches if b.kind is BranchKind.SOURCE]
        if len(sources) != 1:
            raise StructuralError(f"expected exactly one voltage source, found {len(sources)}")
        self.source: Branch = sources[0]
        if self.source.node_b != GROUND:
            raise StructuralError("the voltage source must be referenced to ground")

        node_index = netlist.node_index
        n_nodes = len(netlist.nodes)
        uf = _UnionFind(n_nodes)
        self.constraint_branches: List[int] = []
        regular: List[int] = []
        for bi, b in enumerate(netlist.branches):
            if b.kind is BranchKind.SOURCE:
                self.constraint_branches.append(bi)
            elif b.is_resistor and b.value == 0.0:
                uf.union(node_index[b.node_a], node_index[b.node_b])
                self.constraint_branches.append(bi)
            else:
                regular.append(bi)

        roots = np.array([uf.find(i) for i in range(n_nodes)])
        ground_root = roots[node_index[GROUND]]
        driver_root = roots[node_index[self.source.node_a]]
        if ground_root == driver_root:
            raise StructuralError("the voltage source is short-circuited by zero-ohm branches")

        free_roots = sorted({int(r) for r in roots} - {int(ground_root), int(driver_root)})
        self.n_free = len(free_roots)
        group_of_root = {r: gi for gi, r in enumerate(free_roots)}
        group_of_root[int(driver_root)] = self.n_free
        group_of_root[int(ground_root)] = self.n_free + 1
        self.node_group = np.array([group_of_root[int(r)] for r in roots], dtype=np.int64)
        self.driver_group = self.n_free
        self.ground_group = self.n_free + 1

        branches = netlist.branches
        self.regular = np.array(regular, dtype=np.int64)
        self.ga = np.array([self.node_group[node_index[branches[i].node_a]] for i in regular], dtype=np.int64)
        self.gb = np.array([self.node_group[node_index[branches[i].node_b]] for i in regular], dtype=np.int64)
        self.is_mem = np.array([branches[i].kind is BranchKind.MEMRISTOR for i in regular], dtype=bool)
        self.k = np.array([branches[i].value if branches[i].kind is BranchKind.MEMRISTOR else 0.0 for i in regular])
        self.alpha = np.array([branches[i].alpha for i in regular])
        self.g_lin = np.array(
            [0.0 if branches[i].kind is BranchKind.MEMRISTOR else 1.0 / branches[i].value for i in regular]
        )

        # g_min on every original node that is not held at a fixed voltage
        free_node = self.node_group < self.n_free
        self.node_g_min = np.where(free_node, g_min, 0.0)
        self.group_g_min = np.bincount(self.node_group, weights=self.node_g_min, minlength=self.n_free + 2)[: self.n_free]

        rows = np.concatenate([self.ga, self.gb, self.ga, self.gb])
        cols = np.concatenate([self.ga, self.gb, self.gb, self.ga])
        self._stamp_mask = (rows < self.n_free) & (cols < self.n_free)
        diag = np.arange(self.n_free)
        self._rows = np.concatenate([rows[self._stamp_mask], diag])
        self._cols = np.concatenate([cols[self._stamp_mask], diag])

    def full_vector(self, v_free: np.ndarray, v_source: float) -> np.ndarray:
        return np.concatenate([v_free, [v_source, 0.0]])

    def branch_currents(self, v_full: np.ndarray, linear: bool = False) -> Tuple[np.ndarray, np.ndarray]:
        dv = v_full[self.ga] - v_full[self.gb]
        if linear:
            g_mem = self.k * self.alpha
            i_mem = g_mem * dv
        else:
            i_mem = device_current_array(self.k, self.alpha, dv)
            g_mem = device_conductance_array(self.k, self.alpha, dv)
        current = np.where(self.is_mem, i_mem, self.g_lin * dv)
        conductance = np.where(self.is_mem, g_mem, self.g_lin)
        return current, conductance

    def residual(self, v_full: np.ndarray, linear: bool = False) -> Tuple[np.ndarray, np.ndarray]:
        current, conductance = self.branch_currents(v_full, linear)
        size = self.n_free + 2
        leaving = np.bincount(self.ga, weights=current, minlength=size) - np.bincount(self.gb, weights=current, minlength=size)
        return leaving[: self.n_free] + self.group_g_min * v_full[: self.n_free], conductance

    def jacobian(self, conductance: np.ndarray) -> csc_matrix:
        data = np.concatenate([conductance, conductance, -conductance, -conductance])[self._stamp_mask]
        data = np.concatenate([data, self.group_g_min])
        return csc_matrix((data, (self._rows, self._cols)), shape=(self.n_free, self.n_free))


def _solve_linear(jac: csc_matrix, rhs: np.ndarray, netlist: Netlist) -> np.ndarray:
    if rhs.size == 0:
        return rhs
    step = np.atleast_1d(spsolve(jac, rhs))
    if not np.all(np.isfinite(step)):
        _, labels = netlist.components()
        reference = labels[netlist.node_index[GROUND]]
        floating = [name for name, label in zip(netlist.nodes, labels) if label != reference]
        raise StructuralError("singular nodal system", floating)
    return step


def _kcl_tolerance(current: np.ndarray) -> float:
    scale = float(np.max(np.abs(current))) if current.size else 0.0
    return KCL_REL_TOL * max(1.0, scale)


def _newton(net: _CompiledNetwork, v_free: np.ndarray, v_source: float, options: SolveOptions) -> Tuple[np.ndarray, int, float, bool]:
    v_full = net.full_vector(v_free, v_source)
    residual, conductance = net.residual(v_full)
    norm = float(np.linalg.norm(residual))
    for iteration in range(1, options.max_iter + 1):
        step = _solve_linear(net.jacobian(conductance), -residual, net.netlist)
        scale = 1.0
        trial = v_full.copy()
        trial[: net.n_free] += step
        trial_residual, trial_conductance = net.residual(trial)
        trial_norm = float(np.linalg.norm(trial_residual))
        if options.damping is Damping.LINE_HALVING:
            tol = _kcl_tolerance(net.branch_currents(trial)[0])
            halvings = 0
            while trial_norm >= norm and np.max(np.abs(trial_residual), initial=0.0) > tol and halvings < MAX_HALVINGS:
                scale *= 0.5
                trial[: net.n_free] = v_full[: net.n_free] + scale * step
                trial_residual, trial_conductance = net.residual(trial)
                trial_norm = float(np.linalg.norm(trial_residual))
                halvings += 1
            if halvings == MAX_HALVINGS and trial_norm >= norm:
                logger.warning(f"line search stalled after {MAX_HALVINGS} halvings at iteration {iteration}")
                return v_full[: net.n_free], iteration, float(np.max(np.abs(residual), initial=0.0)), False

        v_full, residual, conductance, norm = trial, trial_residual, trial_conductance, trial_norm
        max_residual = float(np.max(np.abs(residual), initial=0.0))
        step_size = scale * float(np.max(np.abs(step), initial=0.0))
        logger.debug(f"newton {iteration}: step {step_size:.3e} V, residual {max_residual:.3e} A")
        v_bound = options.abs_tol + options.rel_tol * float(np.max(np.abs(v_full)))
        if step_size <= v_bound and max_residual <= _kcl_tolerance(net.branch_currents(v_full)[0]):
            return v_full[: net.n_free], iteration, max_residual, True
    return v_full[: net.n_free], options.max_iter, float(np.max(np.abs(residual), initial=0.0)), False


def _initial_guess(net: _CompiledNetwork, v_source: float) -> np.ndarray:
    """Linear network with every device at its zero-bias conductance k*alpha"""
    v_full = net.full_vector(np.zeros(net.n_free), v_source)
    residual, conductance = net.residual(v_full, linear=True)
    return _solve_linear(net.jacobian(conductance), -residual, net.netlist)


def _constraint_currents(net: _CompiledNetwork, currents: np.ndarray, node_voltages: np.ndarray) -> None:
    """Fill zero-ohm and source branch currents in place from KCL on a spanning forest"""
    netlist = net.netlist
    node_index = netlist.node_index
    regular = net.regular
    injection = np.zeros(len(netlist.nodes))
    a_idx = np.array([node_index[netlist.branches[i].node_a] for i in regular], dtype=np.int64)
    b_idx = np.array([node_index[netlist.branches[i].node_b] for i in regular], dtype=np.int64)
    np.add.at(injection, a_idx, currents[regular])
    np.add.at(injection, b_idx, -currents[regular])
    injection += net.node_g_min * node_voltages

    adjacency: Dict[int, List[Tuple[int, int]]] = {}
    for bi in net.constraint_branches:
        b = netlist.branches[bi]
        a, c = node_index[b.node_a], node_index[b.node_b]
        adjacency.setdefault(a, []).append((bi, c))
        adjacency.setdefault(c, []).append((bi, a))

    ground = node_index[GROUND]
    seen = set()
    used = set()
    starts = [ground] + sorted(adjacency)
    for start in starts:
        if start in seen or start not in adjacency:
            continue
        order, parent = [], {}
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            order.append(u)
            for bi, w in adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    used.add(bi)
                    parent[w] = (bi, u)
                    queue.append(w)
        acc = {u: injection[u] for u in order}
        for u in reversed(order[1:]):
            bi, p = parent[u]
            leaving = -acc[u]
            b = netlist.branches[bi]
            currents[bi] = leaving if node_index[b.node_a] == u else -leaving
            acc[p] -= leaving

    for bi in net.constraint_branches:
        if bi not in used:
            logger.debug(f"zero-ohm loop through {netlist.branches[bi].name}; branch current set to 0")
            currents[bi] = 0.0


def solve_dc(netlist: Netlist, options: Optional[SolveOptions] = None) -> SolveResult:
    options = options or SolveOptions()
    netlist.check_connectivity()
    net = _CompiledNetwork(netlist, options.g_min)
    v_dd = net.source.value

    v_free, iterations, residual, converged = _newton(net, _initial_guess(net, v_dd), v_dd, options)
    total_iterations = iterations
    if not converged and options.source_steps > 0:
        logger.warning(f"newton failed (residual {residual:.3e} A); stepping the source in {options.source_steps} increments")
        v_free = _initial_guess(net, v_dd / options.source_steps)
        for step in range(1, options.source_steps + 1):
            v_free, iterations, residual, converged = _newton(net, v_free, v_dd * step / options.source_steps, options)
            total_iterations += iterations
            if not converged:
                break
    if not converged:
        raise SolverError("DC solve did not converge", residual, total_iterations)

    v_full = net.full_vector(v_free, v_dd)
    node_voltages = v_full[net.node_group]
    regular_currents, _ = net.branch_currents(v_full)
    currents = np.zeros(len(netlist.branches))
    currents[net.regular] = regular_currents
    _constraint_currents(net, currents, node_voltages)

    source_index = netlist.branch_index[net.source.name]
    shunt = net.node_g_min * node_voltages
    kcl = np.zeros(len(netlist.nodes))
    node_index = netlist.node_index
    for bi, b in enumerate(netlist.branches):
        kcl[node_index[b.node_a]] += currents[bi]
        kcl[node_index[b.node_b]] -= currents[bi]
    kcl += shunt
    kcl[node_index[GROUND]] = 0.0
    # report the source as the current it delivers into node_a
    currents[source_index] = -currents[source_index]

    result = SolveResult(
        netlist=netlist,
        node_voltages=node_voltages,
        branch_currents=currents,
        shunt_currents=shunt,
        iterations=total_iterations,
        max_kcl_residual=float(np.max(np.abs(kcl))),
        converged=True,
    )
    logger.debug(f"converged in {total_iterations} iterations, max KCL residual {result.max_kcl_residual:.3e} A")
    return result


def dump_node_voltages(result: SolveResult) -> str:
    """Node-voltage map as sorted JSON for regression snapshots"""
    return json.dumps({name: float(f"{v:.12g}") for name, v in sorted(result.voltage_map().items())}, indent=1)
