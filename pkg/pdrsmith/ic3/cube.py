"""Cubes and clauses over signed latch indices"""
from pdrsmith.errors import EncodingError


def make_cube(lits):
    """Canonical cube: duplicate-free tuple sorted by latch index"""
    unique = set(lits)
    for l in unique:
        if l == 0:
            raise EncodingError("latch literal 0 is not allowed")
        if -l in unique:
            raise EncodingError(f"complementary literals {l} and {-l}")
    return tuple(sorted(unique, key=abs))


make_clause = make_cube


def negate(lits):
    """Clause ¬s of a cube s (or cube of a clause)"""
    return tuple(-l for l in lits)


def subsumes(small, big):
    """True when clause `small` implies clause `big`"""
    return len(small) <= len(big) and set(small) <= set(big)


def is_tautology(lits):
    s = set(lits)
    return any(-l in s for l in s)


def cube_of_state(state):
    """Full cube for a latch bit vector"""
    return tuple(i if bit else -i for i, bit in enumerate(state, start=1))


def contains_state(cube, state):
    return all(bool(state[abs(l) - 1]) == (l > 0) for l in cube)
