import itertools
import random
import time

import pytest

from pdrsmith.errors import CheckTimeout, SolverError
from pdrsmith.sat import SAT, UNSAT, Solver, luby


def brute_force(num_vars, clauses, assumptions=()):
    """True if some assignment satisfies every clause and assumption"""
    units = [[lit] for lit in assumptions]
    for bits in itertools.product((False, True), repeat=num_vars):
        def holds(lit):
            return bits[abs(lit) - 1] if lit > 0 else not bits[abs(lit) - 1]
        if all(any(holds(lit) for lit in clause) for clause in clauses + units):
            return True
    return False


def satisfied(outcome, clauses):
    return all(any(outcome.value(lit) for lit in clause) for clause in clauses)


def test_empty_clause_set_is_sat():
    outcome = Solver().solve()
    assert outcome.status == SAT
    assert outcome.model == [False]


def test_unit_conflict():
    s = Solver()
    s.add_clause([1])
    s.add_clause([-1])
    assert s.solve().status == UNSAT
    assert not s.ok


def test_empty_clause_makes_solver_unsat():
    s = Solver()
    s.add_clause([])
    assert s.solve().status == UNSAT


def test_single_clause_model():
    s = Solver()
    s.add_clause([1, 2])
    outcome = s.solve()
    assert outcome.sat
    assert outcome.value(1) or outcome.value(2)


def test_assumptions_are_temporary():
    s = Solver()
    s.add_clause([1, 2])
    assert s.solve([-1, -2]).status == UNSAT
    outcome = s.solve([-1])
    assert outcome.sat
    assert outcome.value(2)
    assert outcome.value(-1)


def test_failed_assumptions_are_a_subset():
    s = Solver()
    s.add_clause([-1, 2])
    outcome = s.solve([1, -2, 3])
    assert outcome.status == UNSAT
    assert outcome.failed_assumptions
    assert set(outcome.failed_assumptions) <= {1, -2}


def test_root_falsified_assumption():
    s = Solver()
    s.add_clause([4])
    outcome = s.solve([2, -4])
    assert outcome.status == UNSAT
    assert outcome.failed_assumptions == [-4]


def test_invalid_literals():
    s = Solver()
    with pytest.raises(SolverError):
        s.add_clause([1, 0])
    with pytest.raises(SolverError):
        s.solve([0])


def queens(n):
    def var(r, c):
        return r * n + c + 1
    clauses = [[var(r, c) for c in range(n)] for r in range(n)]
    cells = [(r, c) for r in range(n) for c in range(n)]
    for (r1, c1), (r2, c2) in itertools.combinations(cells, 2):
        if r1 == r2 or c1 == c2 or abs(r1 - r2) == abs(c1 - c2):
            clauses.append([-var(r1, c1), -var(r2, c2)])
    return clauses


def test_four_queens_has_two_solutions():
    s = Solver()
    for clause in queens(4):
        s.add_clause(clause)
    solutions = 0
    while True:
        outcome = s.solve()
        if not outcome.sat:
            break
        solutions += 1
        placed = [v for v in range(1, 17) if outcome.model[v]]
        assert len(placed) == 4
        s.add_clause([-v for v in placed])
    assert solutions == 2


def test_random_formulas_match_brute_force():
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.randint(3, 7)
        clauses = []
        for _ in range(rng.randint(4, 6 * n)):
            width = rng.randint(1, 3)
            chosen = rng.sample(range(1, n + 1), width)
            clauses.append([v if rng.random() < 0.5 else -v for v in chosen])
        s = Solver()
        for _ in range(n):
            s.new_var()
        for clause in clauses:
            s.add_clause(clause)

        for _ in range(3):
            picked = rng.sample(range(1, n + 1), rng.randint(0, 3))
            assumptions = [v if rng.random() < 0.5 else -v for v in picked]
            outcome = s.solve(assumptions)
            expected = brute_force(n, clauses, assumptions)
            assert outcome.sat == expected
            if outcome.sat:
                assert len(outcome.model) == n + 1
                assert satisfied(outcome, clauses)
                assert all(outcome.value(lit) for lit in assumptions)
            else:
                failed = outcome.failed_assumptions
                assert set(failed) <= set(assumptions)
                assert not brute_force(n, clauses, failed)
                assert s.solve(failed).status == UNSAT


def pigeonhole(holes):
    pigeons = holes + 1

    def var(p, h):
        return p * holes + h + 1
    clauses = [[var(p, h) for h in range(holes)] for p in range(pigeons)]
    for h in range(holes):
        for p1, p2 in itertools.combinations(range(pigeons), 2):
            clauses.append([-var(p1, h), -var(p2, h)])
    return clauses


def test_deadline_raises_check_timeout():
    s = Solver('php')
    for clause in pigeonhole(8):
        s.add_clause(clause)
    with pytest.raises(CheckTimeout):
        s.solve(deadline=time.monotonic() - 1.0)


def test_simplify_drops_satisfied_clauses():
    s = Solver()
    s.add_clause([1, 2])
    s.add_clause([1, 3])
    s.add_clause([1])
    assert s.simplify() == 2
    assert s.solve().sat


def test_luby_prefix():
    assert [luby(i) for i in range(15)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_dimacs_dump():
    s = Solver('dump')
    s.add_clause([1, -2])
    s.add_clause([3])
    text = s.to_dimacs()
    assert "p cnf 3 2" in text
    assert "1 -2 0" in text
    assert "3 0" in text
