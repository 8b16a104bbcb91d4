"""Lexicographic solve through scipy's HiGHS MILP interface on the explicit rows."""

from __future__ import annotations

import time

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from pra.ip.model import IpModel


def _matrix(model: IpModel):
    idx = {v: j for j, v in enumerate(model.variables)}
    rows, cols, data, lo, hi = [], [], [], [], []
    for i, c in enumerate(model.constraints):
        for v, coef in c.terms:
            rows.append(i)
            cols.append(idx[v])
            data.append(coef)
        lo.append(c.rhs if c.sense in (">=", "=") else -np.inf)
        hi.append(c.rhs if c.sense in ("<=", "=") else np.inf)
    shape = (len(model.constraints), len(idx))
    return idx, coo_matrix((data, (rows, cols)), shape=shape).tocsr(), np.array(lo, float), np.array(hi, float)


def solve_highs(model: IpModel, time_limit: float | None = None):
    from pra.ip.solver import INFEASIBLE, OPTIMAL, TIME_LIMIT, IpSolution

    t_start = time.perf_counter()
    idx, A, lo, hi = _matrix(model)
    n = len(idx)
    cons = [LinearConstraint(A, lo, hi)] if A.shape[0] else []
    optima: list[int] = []
    x = None
    for k, obj in enumerate(model.objectives):
        c = np.zeros(n)
        sign = -1 if obj.sense == "max" else 1
        for v, coef in obj.terms:
            c[idx[v]] += sign * coef
        options = {"disp": False}
        if time_limit is not None:
            remaining = time_limit - (time.perf_counter() - t_start)
            if remaining <= 0:
                return _result(model, TIME_LIMIT, x, optima, k, t_start)
            options["time_limit"] = remaining
        res = milp(c, integrality=np.ones(n), bounds=Bounds(0, 1), constraints=cons, options=options)
        if res.status == 2:
            return IpSolution(INFEASIBLE, None, runtime=time.perf_counter() - t_start, backend="highs")
        if res.status != 0:
            if res.x is not None:
                x = res.x
            return _result(model, TIME_LIMIT, x, optima, k, t_start)
        x = res.x
        opt = int(round(res.fun))
        optima.append(sign * opt)
        # pin this stage: c.x <= opt (integral objective, so a half-unit slack is exact)
        cons.append(LinearConstraint(c.reshape(1, -1), -np.inf, opt + 0.5))
    return _result(model, OPTIMAL, x, optima, None, t_start)


def _result(model, status, x, optima, stage, t_start):
    from pra.ip.solver import IpSolution

    if x is None:
        return IpSolution(status, None, stage=stage, runtime=time.perf_counter() - t_start, backend="highs")
    values = {v: int(round(x[j])) for j, v in enumerate(model.variables)}
    assignment = model.assignment_from_values(values)
    # report objectives of the decoded assignment so auxiliary slack cannot leak in
    induced = model.values_from_assignment(assignment)
    allv = model.objective_values(induced)
    objective = {name: allv.get(name, 0) for name, _ in model.objective_spec}
    return IpSolution(status, assignment, objective, tuple(optima), stage, 0,
                      time.perf_counter() - t_start, "highs")
