"""Reference solutions written independently of src.solver.

The dense oracle keeps the source current as an extra unknown (plain modified
nodal analysis) and runs step-limited Newton on the full system, so it shares
neither the source elimination nor the sparse assembly of the real solver.
"""
import math
from typing import Dict, Tuple

import numpy as np

from src.crossbar.netlist import GROUND, BranchKind, Netlist

MAX_STEP_V = 0.2


def solve_dense(netlist: Netlist, max_iter: int = 300, tol: float = 1e-15) -> Tuple[Dict[str, float], float]:
    """Node voltages and the current delivered by the source"""
    names = [n for n in netlist.nodes if n != GROUND]
    index = {n: i for i, n in enumerate(names)}
    m = len(names)
    x = np.zeros(m + 1)

    def at(node):
        return index.get(node)

    for _ in range(max_iter):
        f = np.zeros(m + 1)
        jac = np.zeros((m + 1, m + 1))
        for b in netlist.branches:
            a, c = at(b.node_a), at(b.node_b)
            va = x[a] if a is not None else 0.0
            vc = x[c] if c is not None else 0.0
            if b.kind is BranchKind.SOURCE:
                f[a] += x[m]
                jac[a, m] += 1.0
                f[m] = va - vc - b.value
                jac[m, a] += 1.0
                if c is not None:
                    jac[m, c] -= 1.0
                continue
            dv = va - vc
            if b.kind is BranchKind.MEMRISTOR:
                i, g = b.value * math.sinh(b.alpha * dv), b.value * b.alpha * math.cosh(b.alpha * dv)
            else:
                i, g = dv / b.value, 1.0 / b.value
            for node, sign in ((a, 1.0), (c, -1.0)):
                if node is None:
                    continue
                f[node] += sign * i
                if a is not None:
                    jac[node, a] += sign * g
                if c is not None:
                    jac[node, c] -= sign * g
        step = np.linalg.solve(jac, -f)
        biggest = float(np.max(np.abs(step[:m]))) if m else 0.0
        if biggest > MAX_STEP_V:
            step *= MAX_STEP_V / biggest
        x += step
        if biggest <= tol:
            break
    voltages = {n: float(x[i]) for n, i in index.items()}
    voltages[GROUND] = 0.0
    # x[m] flows from the positive terminal into the source
    return voltages, -float(x[m])


def series_device_current(k: float, alpha: float, v_dd: float, r_series: float, rounds: int = 200) -> float:
    """Bisection on I = k sinh(alpha (v_dd - I r_series))"""
    low, high = 0.0, k * math.sinh(alpha * v_dd)
    for _ in range(rounds):
        mid = 0.5 * (low + high)
        if mid - k * math.sinh(alpha * (v_dd - mid * r_series)) > 0:
            high = mid
        else:
            low = mid
    return 0.5 * (low + high)


def divider_voltage(k: float, alpha: float, v_dd: float, r_load: float, rounds: int = 200) -> float:
    """Bisection on k sinh(alpha (v_dd - v)) = v / r_load over [0, v_dd]"""
    low, high = 0.0, v_dd
    for _ in range(rounds):
        mid = 0.5 * (low + high)
        if k * math.sinh(alpha * (v_dd - mid)) - mid / r_load > 0:
            low = mid
        else:
            high = mid
    return 0.5 * (low + high)
