"""
CNF encoding of AIGER transition systems

A TransitionSystem is the triple (I, T, P) read off a circuit: I is a set of
latch unit constraints, T the gate logic plus latch transfer, and P the
negation of the selected bad literal. Latches are numbered 1..L in circuit
order; cubes and clauses over the state space use signed latch indices.
"""
import logging
from dataclasses import dataclass

from pdrsmith.aiger import AigerCircuit
from pdrsmith.errors import EncodingError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransitionSystem:
    circuit: AigerCircuit
    init: tuple

    @classmethod
    def from_circuit(cls, circuit):
        init = []
        for index, latch in enumerate(circuit.latches, start=1):
            if latch.uninitialized:
                continue
            init.append(index if latch.reset else -index)
        return cls(circuit, tuple(init))

    @property
    def num_latches(self):
        return len(self.circuit.latches)

    @property
    def num_inputs(self):
        return len(self.circuit.inputs)

    @property
    def bad(self):
        return self.circuit.bad_literal

    def satisfies_init(self, state):
        return all(bool(state[abs(l) - 1]) == (l > 0) for l in self.init)


class _GateBuilder:
    """Tseitin AND gates with constant folding"""

    def __init__(self, solver, true_lit):
        self.solver = solver
        self.true = true_lit

    def and_(self, a, b):
        t = self.true
        if a == -t or b == -t or a == -b:
            return -t
        if a == t or a == b:
            return b
        if b == t:
            return a
        g = self.solver.new_var()
        self.solver.add_clause([-g, a])
        self.solver.add_clause([-g, b])
        self.solver.add_clause([g, -a, -b])
        return g


def _cone(circuit, roots):
    """Variables of AND gates in the transitive fan-in of the root literals"""
    gates = {g.lhs >> 1: g for g in circuit.ands}
    needed = set()
    stack = [r >> 1 for r in roots]
    while stack:
        v = stack.pop()
        if v in needed or v not in gates:
            continue
        needed.add(v)
        stack.append(gates[v].rhs0 >> 1)
        stack.append(gates[v].rhs1 >> 1)
    return needed


def _encode_copy(circuit, builder, leaves, roots):
    values = dict(leaves)
    values[0] = -builder.true
    needed = _cone(circuit, roots)

    def lit(aig_lit):
        v = values[aig_lit >> 1]
        return -v if aig_lit & 1 else v

    for gate in circuit.ands:
        if gate.lhs >> 1 in needed:
            values[gate.lhs >> 1] = builder.and_(lit(gate.rhs0), lit(gate.rhs1))
    return [lit(r) for r in roots]


class CnfEncoding:
    """
    Literal maps for one solver holding T.

    cur/nxt are 1-based lists indexed by latch number; inp/inp_nxt are
    0-based lists indexed by input position. bad_nxt is the bad literal over
    the primed latches and a primed input vector.
    """

    def __init__(self, ts, solver, true_lit, cur, nxt, inp, inp_nxt, bad_cur, bad_nxt):
        self.ts = ts
        self.solver = solver
        self.true_lit = true_lit
        self.cur = cur
        self.nxt = nxt
        self.inp = inp
        self.inp_nxt = inp_nxt
        self.bad_cur = bad_cur
        self.bad_nxt = bad_nxt
        self.frame_act = {}
        self.latch_of_cur = {v: i for i, v in enumerate(cur) if i}
        self.latch_of_nxt = {v: i for i, v in enumerate(nxt) if i}

    def _check(self, cube):
        n = len(self.cur) - 1
        for l in cube:
            if not isinstance(l, int) or l == 0 or abs(l) > n:
                raise EncodingError(f"literal {l!r} is not a latch literal (circuit has {n} latches)")

    def cur_lits(self, cube):
        self._check(cube)
        return [self.cur[l] if l > 0 else -self.cur[-l] for l in cube]

    def prime(self, cube):
        self._check(cube)
        return [self.nxt[l] if l > 0 else -self.nxt[-l] for l in cube]

    def init_lits(self):
        return self.cur_lits(self.ts.init)

    def input_lits(self, bits):
        return [v if b else -v for v, b in zip(self.inp, bits)]

    def primed_input_lits(self, bits):
        return [v if b else -v for v, b in zip(self.inp_nxt, bits)]

    def state_cube(self, model):
        return tuple(i if model[self.cur[i]] else -i for i in range(1, len(self.cur)))

    def input_bits(self, model):
        return [1 if model[v] else 0 for v in self.inp]

    def primed_input_bits(self, model):
        return [1 if model[v] else 0 for v in self.inp_nxt]

    def activation(self, level):
        """Activation variable guarding clauses whose highest frame is `level`"""
        act = self.frame_act.get(level)
        if act is None:
            act = self.solver.new_var()
            self.frame_act[level] = act
        return act

    def temporary(self, lits):
        """Add a retractable clause; assume the returned variable to enable it"""
        act = self.solver.new_var()
        self.solver.add_clause(list(lits) + [-act])
        return act

    def retire(self, act):
        self.solver.add_clause([-act])


def build_encoding(ts, solver, primed_bad=True):
    """
    Tseitin-encode T (and the primed bad cone) into a fresh solver.

    Returns:
        CnfEncoding bound to `solver`
    """
    circuit = ts.circuit
    true_lit = solver.new_var()
    solver.add_clause([true_lit])
    builder = _GateBuilder(solver, true_lit)

    cur = [None] + [solver.new_var() for _ in circuit.latches]
    inp = [solver.new_var() for _ in circuit.inputs]
    leaves = {lit >> 1: v for lit, v in zip(circuit.inputs, inp)}
    leaves.update({latch.lit >> 1: cur[i] for i, latch in enumerate(circuit.latches, start=1)})

    roots = [latch.next for latch in circuit.latches] + [circuit.bad_literal]
    encoded = _encode_copy(circuit, builder, leaves, roots)
    bad_cur = encoded[-1]

    nxt = [None]
    for f in encoded[:-1]:
        n = solver.new_var()
        solver.add_clause([-n, f])
        solver.add_clause([n, -f])
        nxt.append(n)

    inp_nxt = []
    bad_nxt = -true_lit
    if primed_bad:
        inp_nxt = [solver.new_var() for _ in circuit.inputs]
        primed = {lit >> 1: v for lit, v in zip(circuit.inputs, inp_nxt)}
        primed.update({latch.lit >> 1: nxt[i] for i, latch in enumerate(circuit.latches, start=1)})
        (bad_nxt,) = _encode_copy(circuit, builder, primed, [circuit.bad_literal])

    logger.debug("encoded %d latches, %d inputs into %d vars / %d clauses",
                 len(circuit.latches), len(circuit.inputs), solver.num_vars, solver.num_clauses)
    return CnfEncoding(ts, solver, true_lit, cur, nxt, inp, inp_nxt, bad_cur, bad_nxt)
