import math

import numpy as np
import pytest
from scipy.optimize import linprog

from freewill.chsh import VARIANTS
from freewill.lpopt import (
    LpProblem,
    SolverError,
    chsh_problem,
    correlator_problem,
    enumerate_strategies,
    min_m_for_chsh,
    min_m_for_correlators,
    simplex_solve,
)

R2 = 1 / math.sqrt(2)
GRID = [2.0, 2.2, 2.4, 2 * math.sqrt(2), 3.0, 3.5, 4.0]


def test_enumerate_strategies():
    s = enumerate_strategies()
    assert len(s) == 16 and len(set(s)) == 16
    assert (1, 1, 1, 1) in s
    st = next(x for x in s if tuple(x) == (1, 1, 1, -1))
    assert st.products() == (1, -1, 1, -1)


def test_simplex_abs_gadget():
    # variables x, y, t: min t, t >= |x - y|, x = 1, y = 0
    res = simplex_solve(LpProblem([0, 0, 1], [[1, -1, -1], [-1, 1, -1]], [0, 0], [[1, 0, 0], [0, 1, 0]], [1, 0]))
    assert res.status == "optimal"
    assert res.objective == pytest.approx(1.0, abs=1e-12)


def test_simplex_infeasible():
    res = simplex_solve(LpProblem([1], A_ub=[[-1], [1]], b_ub=[-2, 1]))
    assert res.status == "infeasible"


def test_simplex_unbounded():
    res = simplex_solve(LpProblem([-1, 0], A_ub=[[0, 1]], b_ub=[1]))
    assert res.status == "unbounded"


def test_simplex_malformed():
    with pytest.raises(ValueError):
        LpProblem([1, 2], A_ub=[[1, 2, 3]], b_ub=[1])
    with pytest.raises(ValueError):
        LpProblem([1, 2], A_ub=[[1, 2]])


def test_simplex_degenerate_redundant_rows():
    # duplicated equality row and a degenerate vertex
    res = simplex_solve(LpProblem([1, 1, 0], A_eq=[[1, 1, 1], [1, 1, 1], [1, 0, 0]], b_eq=[1, 1, 0]))
    assert res.status == "optimal"
    assert res.objective == pytest.approx(0.0, abs=1e-12)


def test_simplex_matches_linprog_on_random_problems():
    rng = np.random.default_rng(71)
    for _ in range(40):
        n, m_ub, m_eq = 6, 4, 2
        A_ub = rng.normal(size=(m_ub, n))
        x0 = rng.random(n)
        b_ub = A_ub @ x0 + rng.random(m_ub)
        A_eq = rng.normal(size=(m_eq, n))
        b_eq = A_eq @ x0
        c = rng.random(n)
        ours = simplex_solve(LpProblem(c, A_ub, b_ub, A_eq, b_eq))
        ref = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, method="highs")
        assert ours.status == "optimal" and ref.status == 0
        assert ours.objective == pytest.approx(ref.fun, abs=1e-8)
        assert ours.dual_objective == pytest.approx(ours.objective, abs=1e-8)


def test_solver_error_on_iteration_limit():
    with pytest.raises(SolverError):
        simplex_solve(chsh_problem(3.0), max_iter=2)


def test_min_m_for_chsh_examples():
    assert min_m_for_chsh(2.0).m_star == pytest.approx(0.0, abs=1e-12)
    assert min_m_for_chsh(4.0).m_star == pytest.approx(2.0, abs=1e-12)
    assert abs(min_m_for_chsh(2 * math.sqrt(2)).m_star - (2 * math.sqrt(2) - 2)) <= 1e-9
    assert abs(min_m_for_chsh(3.0).m_star - 1.0) <= 1e-9


def test_min_m_for_chsh_range():
    with pytest.raises(ValueError):
        min_m_for_chsh(1.9)
    with pytest.raises(ValueError):
        min_m_for_chsh(4.1)


@pytest.mark.parametrize("b", GRID)
def test_lp_lower_bound_and_achievability(b):
    sol = min_m_for_chsh(b)
    assert sol.m_star >= b - 2 - 1e-9
    assert sol.m_star <= b - 2 + 1e-9


@pytest.mark.parametrize("b", GRID)
def test_toy_table_is_feasible_with_m_equal_b_minus_2(b):
    """The tabulated model with p = (B-2)/2, mapped onto strategies, satisfies every LP row."""
    p = (b - 2) / 2
    strategies = [tuple(s) for s in enumerate_strategies()]
    # a = b = 1: lambda_1 -> (X, X', Y, Y') = (-1, -1, -1, 1), lambda_2 -> (1, 1, 1, 1)
    s1, s2 = strategies.index((-1, -1, -1, 1)), strategies.index((1, 1, 1, 1))
    rx, rxp = np.zeros(16), np.zeros(16)
    rx[s2] = 1.0
    rxp[s1], rxp[s2] = p, 1 - p
    x = np.concatenate([rx, rxp, np.abs(rx - rxp)])
    prob = chsh_problem(b)
    assert np.all(prob.A_ub @ x <= prob.b_ub + 1e-12)
    assert np.allclose(prob.A_eq @ x, prob.b_eq, atol=1e-12)
    assert prob.c @ x == pytest.approx(b - 2, abs=1e-12)


@pytest.mark.parametrize("b", GRID)
def test_lp_matches_linprog_oracle(b):
    prob = chsh_problem(b)
    ref = linprog(prob.c, A_ub=prob.A_ub, b_ub=prob.b_ub, A_eq=prob.A_eq, b_eq=prob.b_eq, method="highs")
    assert abs(min_m_for_chsh(b).m_star - ref.fun) <= 1e-9


def _verify(sol, quad=None, target_b=None):
    P = np.array([s.products() for s in enumerate_strategies()], dtype=float)
    assert sol.status == "optimal"
    assert np.all(sol.rho_x >= -1e-9) and np.all(sol.rho_xp >= -1e-9)
    assert abs(sol.rho_x.sum() - 1) <= 1e-9 and abs(sol.rho_xp.sum() - 1) <= 1e-9
    corr = np.array([sol.rho_x @ P[:, 0], sol.rho_x @ P[:, 1], sol.rho_xp @ P[:, 2], sol.rho_xp @ P[:, 3]])
    if quad is not None:
        assert np.allclose(corr, quad, atol=1e-9)
    if target_b is not None:
        assert abs(VARIANTS[0] @ corr - target_b) <= 1e-9
    assert abs(np.abs(sol.rho_x - sol.rho_xp).sum() - sol.m_star) <= 1e-9


@pytest.mark.parametrize("b", GRID)
def test_solution_verification_chsh(b):
    _verify(min_m_for_chsh(b), target_b=b)


def test_min_m_for_correlators_examples():
    s = min_m_for_correlators((1, 1, 1, 1))
    assert s.m_star == pytest.approx(0.0, abs=1e-12)
    _verify(s, quad=(1, 1, 1, 1))
    s = min_m_for_correlators((1, 1, 1, -1))
    assert s.m_star == pytest.approx(2.0, abs=1e-12)
    s = min_m_for_correlators((R2, R2, R2, -R2))
    assert abs(s.m_star - (2 * math.sqrt(2) - 2)) <= 1e-9
    _verify(s, quad=(R2, R2, R2, -R2))


def test_min_m_for_correlators_malformed():
    with pytest.raises(ValueError):
        min_m_for_correlators((1, 1, 1))
    with pytest.raises(ValueError):
        min_m_for_correlators((1, 1, 1, 2))


def test_all_quads_feasible_and_bounded_by_chsh():
    rng = np.random.default_rng(81)
    for _ in range(30):
        q = rng.uniform(-1, 1, size=4)
        sol = min_m_for_correlators(q)
        _verify(sol, quad=q)
        b = np.abs(VARIANTS @ q).max()
        assert sol.m_star >= max(b - 2, 0) - 1e-9
        ref_prob = correlator_problem(q)
        ref = linprog(ref_prob.c, A_ub=ref_prob.A_ub, b_ub=ref_prob.b_ub,
                      A_eq=ref_prob.A_eq, b_eq=ref_prob.b_eq, method="highs")
        assert abs(sol.m_star - ref.fun) <= 1e-8


def test_duality_gap():
    for b in GRID:
        sol = min_m_for_chsh(b)
        assert abs(sol.dual_objective - sol.m_star) <= 1e-8
