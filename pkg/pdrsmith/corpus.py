"""
Benchmark circuit generators

Small parameterized families (counters, toggles, shift registers, token
rings) plus seeded random AIGs. Every generated suite is labelled with its
expected verdict by explicit-state exploration, so it can serve as a gate
suite.
"""
import itertools
import logging
import random
from collections import deque
from pathlib import Path

from pdrsmith.aiger import AigerCircuit, AndGate, Latch, serialize, simulate_step
from pdrsmith.errors import BenchError

logger = logging.getLogger(__name__)

FALSE = 0
TRUE = 1
EXPLORE_LATCH_LIMIT = 16


class CircuitBuilder:
    """Allocates AIGER variables in creation order"""

    def __init__(self):
        self._next_var = 1
        self.inputs = []
        self.latches = []
        self._next = {}
        self.ands = []

    def _fresh(self):
        lit = 2 * self._next_var
        self._next_var += 1
        return lit

    def input(self):
        lit = self._fresh()
        self.inputs.append(lit)
        return lit

    def latch(self, reset=0):
        """reset 0 or 1; None leaves the latch uninitialized"""
        lit = self._fresh()
        self.latches.append((lit, lit if reset is None else reset))
        return lit

    def set_next(self, latch, next_lit):
        self._next[latch] = next_lit

    def and_(self, a, b):
        if a == FALSE or b == FALSE or a == b ^ 1:
            return FALSE
        if a == TRUE:
            return b
        if b == TRUE or a == b:
            return a
        lhs = self._fresh()
        self.ands.append(AndGate(lhs, max(a, b), min(a, b)))
        return lhs

    def or_(self, a, b):
        return self.and_(a ^ 1, b ^ 1) ^ 1

    def xor(self, a, b):
        return self.or_(self.and_(a, b ^ 1), self.and_(a ^ 1, b))

    def all_of(self, lits):
        out = TRUE
        for lit in lits:
            out = self.and_(out, lit)
        return out

    def any_of(self, lits):
        out = FALSE
        for lit in lits:
            out = self.or_(out, lit)
        return out

    def equals(self, bits, value):
        """bits is little-endian"""
        return self.all_of(b if (value >> k) & 1 else b ^ 1 for k, b in enumerate(bits))

    def build(self, bad, comment=None):
        latches = tuple(Latch(lit, self._next.get(lit, lit), reset) for lit, reset in self.latches)
        return AigerCircuit(
            max_var_index=self._next_var - 1,
            inputs=tuple(self.inputs),
            latches=latches,
            bads=(bad,),
            ands=tuple(self.ands),
            comments=(comment,) if comment else (),
        )


def _increment(b, bits, enable):
    """Ripple-carry +enable; returns next-state bits"""
    carry = enable
    out = []
    for bit in bits:
        out.append(b.xor(bit, carry))
        carry = b.and_(bit, carry)
    return out


# ============================================================================
# FAMILIES
# ============================================================================

def counter(width, bad_value, enable=True, wrap=None):
    """
    width-bit counter from 0, counting when the enable input is 1 (or every
    step). With wrap it returns to 0 after reaching wrap - 1, so values
    >= wrap are unreachable.
    """
    b = CircuitBuilder()
    en = b.input() if enable else TRUE
    bits = [b.latch(0) for _ in range(width)]
    nxt = _increment(b, bits, en)
    if wrap is not None:
        at_top = b.and_(b.equals(bits, wrap - 1), en)
        nxt = [b.and_(n, at_top ^ 1) for n in nxt]
    for bit, n in zip(bits, nxt):
        b.set_next(bit, n)
    return b.build(b.equals(bits, bad_value), f"counter width={width} bad={bad_value} wrap={wrap}")


def toggle(bad_on=True):
    """One latch flipping every step; bad is the latch (or constant false)"""
    b = CircuitBuilder()
    t = b.latch(0)
    b.set_next(t, t ^ 1)
    return b.build(t if bad_on else FALSE, "toggle")


def shift_register(length, feed_input=True):
    """Bits shift towards the end; bad when every bit is 1"""
    b = CircuitBuilder()
    src = b.input() if feed_input else FALSE
    bits = [b.latch(0) for _ in range(length)]
    prev = src
    for bit in bits:
        b.set_next(bit, prev)
        prev = bit
    return b.build(b.all_of(bits), f"shift length={length}")


def token_ring(size, bad_two_tokens=True):
    """
    One-hot token passed on when the move input is 1. Bad is either two
    adjacent tokens (never) or the token at the last station.
    """
    b = CircuitBuilder()
    move = b.input()
    st = [b.latch(1 if k == 0 else 0) for k in range(size)]
    for k, bit in enumerate(st):
        prev = st[k - 1]
        b.set_next(bit, b.or_(b.and_(move, prev), b.and_(move ^ 1, bit)))
    if bad_two_tokens:
        bad = b.any_of(b.and_(st[k], st[(k + 1) % size]) for k in range(size))
    else:
        bad = st[-1]
    return b.build(bad, f"ring size={size}")


def random_aig(seed, latches=6, inputs=2, gates=None, bad_width=None):
    """Seeded random netlist; bad is a conjunction over a few latch literals"""
    rng = random.Random(seed)
    b = CircuitBuilder()
    ins = [b.input() for _ in range(inputs)]
    regs = []
    for _ in range(latches):
        roll = rng.random()
        regs.append(b.latch(None if roll < 0.05 else (1 if roll < 0.3 else 0)))
    pool = ins + regs
    for _ in range(gates if gates is not None else 3 * latches):
        x, y = rng.sample(pool, 2) if len(pool) > 1 else (pool[0], pool[0])
        g = b.and_(x ^ rng.randint(0, 1), y ^ rng.randint(0, 1))
        if g > TRUE:
            pool.append(g)
    for reg in regs:
        b.set_next(reg, rng.choice(pool) ^ rng.randint(0, 1))
    width = bad_width or rng.randint(2, max(2, min(4, latches)))
    chosen = rng.sample(regs, min(width, len(regs)))
    bad = b.all_of(r ^ rng.randint(0, 1) for r in chosen)
    return b.build(bad, f"random seed={seed}")


# ============================================================================
# EXPLICIT-STATE EXPLORATION
# ============================================================================

def explore(circuit, max_latches=EXPLORE_LATCH_LIMIT):
    """
    Breadth-first reachability over concrete states.

    Returns:
        ('SAFE', None) or ('UNSAFE', depth) where depth is the number of
        transitions before the step that raises bad
    """
    n = len(circuit.latches)
    if n > max_latches:
        raise BenchError(f"explicit exploration limited to {max_latches} latches, circuit has {n}")
    free = [k for k, latch in enumerate(circuit.latches) if latch.uninitialized]
    base = [0 if latch.uninitialized else latch.reset for latch in circuit.latches]
    start = []
    for values in itertools.product((0, 1), repeat=len(free)):
        state = list(base)
        for k, v in zip(free, values):
            state[k] = v
        start.append(tuple(state))
    input_vectors = list(itertools.product((0, 1), repeat=len(circuit.inputs)))
    seen = set(start)
    queue = deque((s, 0) for s in start)
    while queue:
        state, depth = queue.popleft()
        for vector in input_vectors:
            nxt, bad = simulate_step(circuit, state, vector)
            if bad:
                return 'UNSAFE', depth
            nxt = tuple(nxt)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, depth + 1))
    return 'SAFE', None


# ============================================================================
# SUITES
# ============================================================================

def standard_suite(seed=0, random_count=20):
    """(name, circuit) pairs mixing structured families and random AIGs"""
    items = [
        ('toggle1_bad', toggle(True)),
        ('toggle1_ok', toggle(False)),
        ('counter3_b5', counter(3, 5)),
        ('counter3_w5_b6', counter(3, 6, wrap=5)),
        ('counter4_b10', counter(4, 10)),
        ('counter4_w9_b12', counter(4, 12, wrap=9)),
        ('counter5_w20_b25', counter(5, 25, wrap=20)),
        ('counterfree3_b7', counter(3, 7, enable=False)),
        ('shift3_in', shift_register(3, True)),
        ('shift4_zero', shift_register(4, False)),
        ('ring4_mutex', token_ring(4, True)),
        ('ring5_mutex', token_ring(5, True)),
        ('ring4_reach', token_ring(4, False)),
    ]
    rng = random.Random(seed)
    for k in range(random_count):
        s = rng.randrange(1 << 30)
        latches = rng.randint(4, 8)
        items.append((f"rand{k}_l{latches}", random_aig(s, latches=latches, inputs=rng.randint(1, 3))))
    return items


def write_suite(directory, items, binary=False):
    """
    Write circuits plus a ``suite.txt`` list of ``<file> <expected>`` lines.

    Returns:
        path of the suite list
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = []
    for name, circuit in items:
        ext = '.aig' if binary else '.aag'
        path = directory / f"{name}{ext}"
        path.write_bytes(serialize(circuit, binary=binary))
        verdict, _ = explore(circuit)
        lines.append(f"{path.name} {verdict}")
    listing = directory / 'suite.txt'
    listing.write_text("\n".join(lines) + "\n")
    logger.info("wrote %d instances to %s", len(items), directory)
    return listing
