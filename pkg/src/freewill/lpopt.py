"""Minimal one-sided measurement dependence via linear programming.

Variables are rho(s|X) and rho(s|X') over the 16 deterministic strategies s,
plus one auxiliary t_s per strategy linearizing |rho(s|X) - rho(s|X')|. The
objective sum_s t_s is the measurement dependence M of the cheapest model
reaching the target. <XY>, <XY'> are averaged under rho(.|X) and <X'Y>,
<X'Y'> under rho(.|X').

The LPs are tiny (48 variables), so they are solved by a dense two-phase
tableau simplex with Bland's rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .chsh import VARIANTS, CorrelatorQuad

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11
GAP_TOL = 1e-8
N_STRATEGIES = 16


class SolverError(RuntimeError):
    """The simplex solver hit a numerical breakdown."""


class Strategy(NamedTuple):
    v_x: int
    v_xp: int
    v_y: int
    v_yp: int

    def products(self) -> tuple[int, int, int, int]:
        """Outcome products for (XY, XY', X'Y, X'Y')."""
        return (self.v_x * self.v_y, self.v_x * self.v_yp, self.v_xp * self.v_y, self.v_xp * self.v_yp)


def enumerate_strategies() -> list[Strategy]:
    """All 16 assignments, ordered like ``itertools.product((+1, -1), repeat=4)``."""
    return [Strategy(*s) for s in itertools.product((1, -1), repeat=4)]


@dataclass
class LpProblem:
    """minimize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0."""

    c: np.ndarray
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    description: str = ""

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.size
        for A, b, name in ((self.A_ub, self.b_ub, "ub"), (self.A_eq, self.b_eq, "eq")):
            if (A is None) != (b is None):
                raise ValueError(f"A_{name} and b_{name} must be given together")
            if A is not None:
                A = np.atleast_2d(np.asarray(A, dtype=float))
                b = np.asarray(b, dtype=float).ravel()
                if A.shape[1] != n or A.shape[0] != b.size:
                    raise ValueError(f"A_{name} has shape {A.shape}, expected ({b.size}, {n})")
                setattr(self, f"A_{name}", A)
                setattr(self, f"b_{name}", b)


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[np.ndarray] = None
    objective: float = float("nan")
    dual_objective: float = float("nan")
    iterations: int = 0


def _standard_form(problem: LpProblem):
    """Rows A x = b with b >= 0 over original variables plus one slack per <= row."""
    n = problem.c.size
    rows, rhs = [], []
    n_ub = 0 if problem.A_ub is None else problem.A_ub.shape[0]
    if n_ub:
        rows.append(np.hstack([problem.A_ub, np.eye(n_ub)]))
        rhs.append(problem.b_ub)
    if problem.A_eq is not None:
        rows.append(np.hstack([problem.A_eq, np.zeros((problem.A_eq.shape[0], n_ub))]))
        rhs.append(problem.b_eq)
    if not rows:
        return np.zeros((0, n)), np.zeros(0), problem.c.copy()
    A = np.vstack(rows)
    b = np.concatenate(rhs)
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    c = np.concatenate([problem.c, np.zeros(n_ub)])
    return A, b, c


class _Tableau:
    def __init__(self, A, b, max_iter):
        self.T = np.hstack([A, b[:, None]])
        self.basis = []
        self.max_iter = max_iter
        self.iterations = 0

    def pivot(self, r, j):
        T = self.T
        piv = T[r, j]
        if abs(piv) < PIVOT_TOL:
            raise SolverError(f"pivot element {piv:.3e} too small")
        T[r] /= piv
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[np.abs(T) < 1e-14] = 0.0
        self.basis[r] = j

    def run(self, cost, allowed):
        """Minimize ``cost`` over the columns in ``allowed`` (Bland's rule).

        Returns "optimal" or "unbounded".
        """
        m = self.T.shape[0]
        while True:
            if self.iterations >= self.max_iter:
                raise SolverError("iteration limit reached")
            cb = cost[self.basis]
            reduced = cost - cb @ self.T[:, :-1]
            entering = next((j for j in allowed if reduced[j] < -FEAS_TOL), None)
            if entering is None:
                return "optimal"
            col = self.T[:, entering]
            best, leave = None, None
            for r in range(m):
                if col[r] > PIVOT_TOL:
                    ratio = self.T[r, -1] / col[r]
                    if (best is None or ratio < best - 1e-12
                            or (abs(ratio - best) <= 1e-12 and self.basis[r] < self.basis[leave])):
                        best, leave = ratio, r
            if leave is None:
                return "unbounded"
            self.pivot(leave, entering)
            self.iterations += 1


def simplex_solve(problem: LpProblem, max_iter: int = 10_000) -> SimplexResult:
    """Two-phase dense simplex with Bland's anti-cycling rule.

    The optimum is verified before returning: primal residuals within
    ``FEAS_TOL``, dual feasibility of the final basis, and a primal-dual gap
    below ``GAP_TOL``. Any failure raises ``SolverError``.
    """
    n_orig = problem.c.size
    A, b, c = _standard_form(problem)
    m, n = A.shape
    if m == 0:
        if np.any(problem.c < -FEAS_TOL):
            return SimplexResult("unbounded")
        return SimplexResult("optimal", np.zeros(n_orig), 0.0, 0.0, 0)

    # phase I: artificials form the starting basis
    tab = _Tableau(np.hstack([A, np.eye(m)]), b, max_iter)
    tab.basis = list(range(n, n + m))
    phase1_cost = np.concatenate([np.zeros(n), np.ones(m)])
    tab.run(phase1_cost, range(n + m))
    infeas = float(phase1_cost[tab.basis] @ tab.T[:, -1])
    if infeas > FEAS_TOL * max(1.0, float(np.abs(b).max())):
        return SimplexResult("infeasible", iterations=tab.iterations)

    # drive zero-level artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if tab.basis[r] >= n:
            j = next((j for j in range(n) if abs(tab.T[r, j]) > 1e-9), None)
            if j is None:
                continue
            tab.pivot(r, j)
        keep.append(r)
    tab.T = np.hstack([tab.T[keep, :n], tab.T[keep, -1:]])
    tab.basis = [tab.basis[r] for r in keep]
    A, b = A[keep], b[keep]

    status = tab.run(c, range(n))
    if status == "unbounded":
        return SimplexResult("unbounded", iterations=tab.iterations)

    x = np.zeros(n)
    x[tab.basis] = tab.T[:, -1]
    primal = float(c @ x)

    # duals of the final basis: B^T y = c_B
    B = A[:, tab.basis]
    try:
        y = np.linalg.solve(B.T, c[tab.basis])
    except np.linalg.LinAlgError as exc:
        raise SolverError("singular final basis") from exc
    dual = float(b @ y)
    scale = max(1.0, float(np.abs(b).max()))
    if np.abs(A @ x - b).max() > FEAS_TOL * scale or x.min() < -FEAS_TOL:
        raise SolverError("primal residual check failed")
    if (c - A.T @ y).min() < -1e-7:
        raise SolverError("final basis is not dual feasible")
    if abs(primal - dual) > GAP_TOL * max(1.0, abs(primal)):
        raise SolverError(f"duality gap {abs(primal - dual):.3e}")
    x = np.maximum(x[:n_orig], 0.0)
    return SimplexResult("optimal", x, primal, dual, tab.iterations)


@dataclass
class LpSolution:
    status: str
    m_star: float
    rho_x: np.ndarray
    rho_xp: np.ndarray
    correlators: tuple = ()
    target: dict = field(default_factory=dict)
    dual_objective: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "m_star": self.m_star,
            "rho_x": [float(v) for v in self.rho_x],
            "rho_xp": [float(v) for v in self.rho_xp],
            "correlators": list(self.correlators),
            "target": self.target,
        }


def _product_matrix() -> np.ndarray:
    """16 x 4 outcome products per strategy."""
    return np.array([s.products() for s in enumerate_strategies()], dtype=float)


def _base_problem():
    k = N_STRATEGIES
    n = 3 * k
    c = np.concatenate([np.zeros(2 * k), np.ones(k)])
    I = np.eye(k)
    # rho_x - rho_xp - t <= 0 ; rho_xp - rho_x - t <= 0
    A_ub = np.vstack([np.hstack([I, -I, -I]), np.hstack([-I, I, -I])])
    b_ub = np.zeros(2 * k)
    norm = np.zeros((2, n))
    norm[0, :k] = 1.0
    norm[1, k:2 * k] = 1.0
    return c, A_ub, b_ub, norm


def _correlator_rows() -> np.ndarray:
    """4 x 48 rows mapping the variables to (XY, XY', X'Y, X'Y')."""
    k = N_STRATEGIES
    P = _product_matrix()
    rows = np.zeros((4, 3 * k))
    rows[0, :k] = P[:, 0]
    rows[1, :k] = P[:, 1]
    rows[2, k:2 * k] = P[:, 2]
    rows[3, k:2 * k] = P[:, 3]
    return rows


def _finish(res: SimplexResult, target: dict) -> LpSolution:
    k = N_STRATEGIES
    if res.status != "optimal":
        return LpSolution(res.status, float("nan"), np.full(k, np.nan), np.full(k, np.nan), target=target)
    rho_x, rho_xp = res.x[:k], res.x[k:2 * k]
    corr = tuple(float(v) for v in _correlator_rows()[:, :2 * k] @ res.x[:2 * k])
    m_star = float(np.abs(rho_x - rho_xp).sum())
    if abs(m_star - res.objective) > FEAS_TOL:
        raise SolverError(f"objective {res.objective} disagrees with recomputed M {m_star}")
    return LpSolution("optimal", m_star, rho_x, rho_xp, corr, target, res.dual_objective)


def chsh_problem(target_b: float) -> LpProblem:
    if not (2.0 <= target_b <= 4.0):
        raise ValueError(f"target CHSH value must lie in [2, 4], got {target_b}")
    c, A_ub, b_ub, norm = _base_problem()
    chsh_row = VARIANTS[0] @ _correlator_rows()
    A_eq = np.vstack([norm, chsh_row])
    b_eq = np.array([1.0, 1.0, target_b])
    return LpProblem(c, A_ub, b_ub, A_eq, b_eq, f"min M s.t. CHSH variant 0 = {target_b!r}")


def correlator_problem(quad) -> LpProblem:
    q = quad if isinstance(quad, CorrelatorQuad) else CorrelatorQuad.from_iterable(quad)
    c, A_ub, b_ub, norm = _base_problem()
    A_eq = np.vstack([norm, _correlator_rows()])
    b_eq = np.concatenate([[1.0, 1.0], q.as_array()])
    return LpProblem(c, A_ub, b_ub, A_eq, b_eq, f"min M s.t. correlators = {tuple(q.as_array())!r}")


def min_m_for_chsh(target_b: float) -> LpSolution:
    """Smallest one-sided M of a deterministic model with CHSH variant 0 equal to ``target_b``."""
    return _finish(simplex_solve(chsh_problem(target_b)), {"chsh": float(target_b)})


def min_m_for_correlators(quad) -> LpSolution:
    """Smallest one-sided M of a deterministic model reproducing all four correlators."""
    problem = correlator_problem(quad)
    return _finish(simplex_solve(problem), {"correlators": [float(v) for v in problem.b_eq[2:]]})
