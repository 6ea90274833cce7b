import numpy as np
import pytest
from scipy.optimize import linprog

from catsec.finstoch import (UNIT, Morphism, compose, delete, identity, random_stochastic, tensor,
                             tv_distance, wires)
from catsec.lpsolve import (INFEASIBLE, OPTIMAL, UNBOUNDED, AffineMap, Block, LpProblem,
                            check_solution, fit_tv, min_max_pairwise_tv, min_tv_fit, solve,
                            views_agree_feasible)

from conftest import brute_force_lp
from corpus import random_program


def test_small_programs_match_vertex_enumeration():
    rng = np.random.default_rng(2024)
    seen = {OPTIMAL: 0, INFEASIBLE: 0, UNBOUNDED: 0}
    for _ in range(300):
        c, A, b = random_program(rng)
        want_status, want_val = brute_force_lp(c, A, b)
        sol = solve(LpProblem(c, A, b))
        assert sol.status == want_status, (c, A, b)
        seen[sol.status] += 1
        if sol.optimal:
            assert abs(sol.objective_value - want_val) <= 1e-8
            assert check_solution(LpProblem(c, A, b), sol)
    assert all(v > 0 for v in seen.values())


def test_redundant_and_degenerate_rows():
    A = np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]])
    b = np.array([1.0, 2.0, 1.0])
    sol = solve(LpProblem([1.0, 0.0, 0.0], A, b))
    assert sol.optimal and sol.objective_value == pytest.approx(0.0)
    bad = solve(LpProblem([0, 0, 0], A, np.array([1.0, 3.0, 1.0])))
    assert bad.status == INFEASIBLE


def test_problem_shape_checks():
    with pytest.raises(ValueError):
        LpProblem([1, 2], np.ones((1, 3)), [1])
    with pytest.raises(ValueError):
        LpProblem([1, np.inf], np.ones((1, 2)), [1])


def _scipy_tv(M, T, n_out, n_in):
    """Two-sided TV program solved by scipy, as an independent check."""
    rows_v, cols_v = T.shape
    nvar, ne = n_out * n_in, rows_v * cols_v
    nt = nvar + ne + 1
    A_ub, b_ub = [], []
    t = T.reshape(-1)
    for e in range(ne):
        r = np.zeros(nt); r[:nvar] = M[e]; r[nvar + e] = -1; A_ub.append(r); b_ub.append(t[e])
        r = np.zeros(nt); r[:nvar] = -M[e]; r[nvar + e] = -1; A_ub.append(r); b_ub.append(-t[e])
    for j in range(cols_v):
        r = np.zeros(nt)
        for e in range(ne):
            if e % cols_v == j:
                r[nvar + e] = 0.5
        r[-1] = -1
        A_ub.append(r); b_ub.append(0.0)
    A_eq = np.zeros((n_in, nt))
    for j in range(n_in):
        A_eq[j, j:nvar:n_in] = 1
    c = np.zeros(nt); c[-1] = 1
    res = linprog(c, A_ub=np.array(A_ub), b_ub=b_ub, A_eq=A_eq, b_eq=np.ones(n_in), bounds=(0, None),
                  method="highs")
    return res.fun


def test_fit_tv_matches_scipy_on_postprocessing():
    rng = np.random.default_rng(7)
    for _ in range(25):
        f = random_stochastic(wires(3), wires(2), rng)
        target = random_stochastic(wires(3), wires(3), rng)

        def view(s):
            return compose(s, f)

        fit = fit_tv(view, target, (wires(2), wires(3)))
        M = np.array([compose(Morphism(wires(2), wires(3), e.reshape(3, 2), "nonneg"), f).matrix.reshape(-1)
                      for e in np.eye(6)]).T
        assert fit.residual == pytest.approx(_scipy_tv(M, target.matrix, 3, 2), abs=1e-8)
        assert fit.simulator.flavor == "stochastic"


def test_fit_tv_exact_target_has_zero_residual(rng):
    f = random_stochastic(wires(2), wires(3), rng)
    s = random_stochastic(wires(3), wires(2), rng)
    sim, res = min_tv_fit(lambda x: compose(x, f), compose(s, f), (wires(3), wires(2)))
    assert res <= 1e-9


def test_fit_tv_known_value():
    # guessing a fair bit without seeing it is wrong half the time
    fit = fit_tv(lambda x: compose(x, delete(2)), identity(2), (UNIT, wires(2)))
    assert fit.residual == pytest.approx(0.5, abs=1e-12)
    fit = fit_tv(AffineMap(np.eye(2)), Morphism(UNIT, wires(2), np.array([[0.3], [0.7]])),
                 (UNIT, wires(2)))
    assert fit.residual == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(fit.simulator.matrix.ravel(), [0.3, 0.7])


def test_one_and_two_sided_programs_agree(rng):
    for _ in range(15):
        f = random_stochastic(wires(2), wires(2), rng)
        g = random_stochastic(wires(2), wires(2), rng)
        target = random_stochastic(wires(2, 2), wires(2, 2), rng)

        def view(s):
            return tensor(compose(s, f), g)

        a = fit_tv(view, target, (wires(2), wires(2)), normalized=True)
        b = fit_tv(view, target, (wires(2), wires(2)), normalized=False)
        assert a.residual == pytest.approx(b.residual, abs=1e-9)


def test_pairwise_program_and_feasibility():
    # two unknown distributions on 2 points, each free; they can agree exactly
    A, b = np.ones((1, 2)), np.ones(1)
    blocks = [Block(np.eye(2), A, b), Block(np.eye(2), A, b)]
    value, xs, status = min_max_pairwise_tv(blocks, [(0, 1)], (2, 1))
    assert status == OPTIMAL and value == pytest.approx(0.0, abs=1e-12)
    assert views_agree_feasible(blocks, [(0, 1)], (2, 1)) == OPTIMAL
    # pin the first to point 0 and the second to point 1: distance 1, no agreement
    pinned = [Block(np.eye(2), np.eye(2), np.array([1.0, 0.0])),
              Block(np.eye(2), np.eye(2), np.array([0.0, 1.0]))]
    value, _, _ = min_max_pairwise_tv(pinned, [(0, 1)], (2, 1))
    assert value == pytest.approx(1.0)
    assert views_agree_feasible(pinned, [(0, 1)], (2, 1)) == INFEASIBLE


def test_constant_map_cannot_reach_another_point():
    const = AffineMap(np.zeros((2, 2)), np.array([1.0, 0.0]))
    fit = fit_tv(const, Morphism(UNIT, wires(2), np.array([[0.0], [1.0]])), (UNIT, wires(2)))
    assert fit.residual == pytest.approx(1.0)


def test_fit_beats_random_candidates():
    rng = np.random.default_rng(11)
    for _ in range(5):
        f = random_stochastic(wires(2), wires(3), rng)
        target = random_stochastic(wires(2), wires(2), rng)

        def view(s):
            return compose(s, f)

        fit = fit_tv(view, target, (wires(3), wires(2)))
        for _ in range(1000):
            s = random_stochastic(wires(3), wires(2), rng)
            assert fit.residual <= tv_distance(view(s), target) + 1e-8


def test_fit_matches_grid_search():
    rng = np.random.default_rng(12)
    for _ in range(3):
        f = random_stochastic(wires(3), wires(2), rng)
        target = random_stochastic(wires(3), wires(2), rng)

        def view(s):
            return compose(s, f)

        fit = fit_tv(view, target, (wires(2), wires(2)))
        grid = np.linspace(0, 1, 101)
        best = min(tv_distance(view(Morphism(wires(2), wires(2), np.array([[p, q], [1 - p, 1 - q]]))), target)
                   for p in grid for q in grid)
        assert fit.residual <= best + 1e-9
        assert best - fit.residual <= 2e-2


def test_degenerate_program_solution_is_exact():
    # many copies of the same stochastic constraint with a zero optimum
    rng = np.random.default_rng(5)
    f = random_stochastic(wires(3), wires(3, 3), rng)
    s0 = random_stochastic(wires(3, 3), wires(3), rng)
    fit = fit_tv(lambda s: compose(s, f), compose(s0, f), (wires(3, 3), wires(3)))
    assert fit.residual <= 1e-12
    assert fit.simulator.flavor == "stochastic"
