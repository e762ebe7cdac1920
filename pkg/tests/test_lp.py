import numpy as np
import pytest

from ransomgame.lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    solve_lp,
)

from oracles import lp_by_vertex_enumeration


def test_cap_at_half():
    sol = solve_lp(LinearProgram(objective=[1.0], rows=[[1.0]], rhs=[0.5]))
    assert sol.status == OPTIMAL
    assert sol.x[0] == pytest.approx(0.5)
    assert sol.value == pytest.approx(0.5)


def test_infeasible_pair():
    lp = LinearProgram(objective=[1.0], rows=[[1.0], [-1.0]], rhs=[0.2, -0.5])
    assert solve_lp(lp).status == INFEASIBLE


def test_unbounded():
    lp = LinearProgram(objective=[1.0], rows=[[-1.0]], rhs=[0.0])
    assert solve_lp(lp).status == UNBOUNDED


def test_dimension_overflow():
    nv = 65
    lp = LinearProgram(objective=np.ones(nv), rows=np.eye(nv), rhs=np.ones(nv))
    with pytest.raises(ValueError, match="cap"):
        solve_lp(lp)


def test_negative_rhs_needs_phase_one():
    # x1 >= 0.3 encoded as -x1 <= -0.3, maximize -x1
    lp = LinearProgram(objective=[-1.0], rows=[[-1.0], [1.0]], rhs=[-0.3, 1.0])
    sol = solve_lp(lp)
    assert sol.status == OPTIMAL
    assert sol.x[0] == pytest.approx(0.3)


def test_deterministic_repeat():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(6, 4))
    b = rng.uniform(0.5, 2.0, size=6)
    c = rng.normal(size=4)
    lp = LinearProgram(objective=c, rows=np.vstack([A, np.eye(4)]),
                       rhs=np.concatenate([b, np.ones(4)]))
    s1, s2 = solve_lp(lp), solve_lp(lp)
    assert s1.status == s2.status
    assert s1.iterations == s2.iterations
    assert np.array_equal(s1.x, s2.x)


def test_random_lps_match_vertex_oracle():
    rng = np.random.default_rng(123)
    solved = 0
    for _ in range(100):
        nv = int(rng.integers(1, 4))
        m = int(rng.integers(1, 5))
        A = rng.normal(size=(m, nv))
        b = rng.uniform(-0.5, 2.0, size=m)
        c = rng.normal(size=nv)
        # bound the region so vertices exist
        rows = np.vstack([A, np.eye(nv)])
        rhs = np.concatenate([b, np.full(nv, 3.0)])
        lp = LinearProgram(objective=c, rows=rows, rhs=rhs)
        sol = solve_lp(lp)
        oracle_val, _ = lp_by_vertex_enumeration(c, rows, rhs)
        if oracle_val is None:
            assert sol.status == INFEASIBLE
        else:
            assert sol.status == OPTIMAL
            assert sol.value == pytest.approx(oracle_val, abs=1e-7)
            solved += 1
    assert solved > 50  # the generator should not be degenerate


def test_optimal_solutions_satisfy_constraints():
    rng = np.random.default_rng(99)
    for _ in range(50):
        nv = int(rng.integers(1, 5))
        m = int(rng.integers(1, 6))
        rows = np.vstack([rng.normal(size=(m, nv)), np.eye(nv)])
        rhs = np.concatenate([rng.uniform(-0.2, 2.0, size=m), np.ones(nv)])
        lp = LinearProgram(objective=rng.normal(size=nv), rows=rows, rhs=rhs)
        sol = solve_lp(lp)
        if sol.status == OPTIMAL:
            assert np.all(lp.residuals(sol.x) <= 1e-9)
            assert np.all(sol.x >= -1e-12)
