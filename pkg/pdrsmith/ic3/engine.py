"""
IC3 main loop

Frames carry P: every query on F_i with i >= 1 also assumes ¬B(x, y), and
F_0 is the initial-state predicate. Heuristic decisions are delegated to the
slot modules (obligations, generalize, propagate); the engine owns the
solvers, the frames and every query whose answer decides soundness.
"""
import logging
import random
import time
from dataclasses import dataclass, field

from pdrsmith.aiger import simulate
from pdrsmith.certify import Certificate, Witness, check_certificate, replay_witness
from pdrsmith.encode import build_encoding
from pdrsmith.errors import CheckTimeout, InternalError
from pdrsmith.ic3.cube import negate
from pdrsmith.ic3.frames import FrameSequence
from pdrsmith.ic3.generalize import ind_gen, pred_gen
from pdrsmith.ic3.obligations import ObligationQueue, ProofObligation, select_obligation
from pdrsmith.ic3.policies import resolve_policies
from pdrsmith.ic3.propagate import HeuristicState, push_clauses
from pdrsmith.sat import Solver

logger = logging.getLogger(__name__)

SAFE = 'SAFE'
UNSAFE = 'UNSAFE'
TIMEOUT = 'TIMEOUT'

EXIT_CODES = {SAFE: 0, UNSAFE: 1, TIMEOUT: 2}

COUNTERS = (
    'frames', 'lemmas', 'obligations', 'requeues', 'ctis', 'sat_calls', 'propagations',
    'conflicts', 'ind_gen_calls', 'ind_gen_sat_calls', 'pred_gen_calls', 'push_attempts',
    'push_success', 'push_success_rate', 'stall_skips', 'simplify_calls', 'subsumed',
    'early_cuts', 'time_sec',
)

CLEANUP_EVERY = 256


@dataclass
class CheckOptions:
    timeout: float = None
    policies: list = field(default_factory=list)
    emit_artifacts: bool = False
    seed: int = 0
    debug: bool = False
    validate: bool = True


@dataclass
class Verdict:
    status: str
    certificate: Certificate = None
    witness: Witness = None
    stats: dict = field(default_factory=dict)

    @property
    def exit_code(self):
        return EXIT_CODES[self.status]


class Ic3:
    """One model-checking run over a TransitionSystem"""

    def __init__(self, ts, options=None):
        self.ts = ts
        self.options = options or CheckOptions()
        self.policies = resolve_policies(self.options.policies)
        self.rng = random.Random(self.options.seed)
        self.deadline = None
        self.stats = {name: 0 for name in COUNTERS}
        self._fresh = {'propagations': 0, 'conflicts': 0}

        self.solver = Solver('frames')
        self.enc = build_encoding(ts, self.solver)
        self.lift_solver = Solver('lift')
        self.lift_enc = build_encoding(ts, self.lift_solver)
        self.init_solver = self._make_init_solver('init')
        self._init_model = None
        self._retired = 0

        self.frames = FrameSequence()
        self.heuristics = HeuristicState()
        self._cex = None

    def _make_init_solver(self, name):
        solver = Solver(name)
        for _ in range(self.ts.num_latches):
            solver.new_var()
        for lit in self.ts.init:
            solver.add_clause([lit])
        return solver

    # ------------------------------------------------------------------
    # Query helpers
    # ------------------------------------------------------------------

    def _tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise CheckTimeout("check deadline reached")

    def _solve(self, solver, assumptions):
        self._tick()
        self.stats['sat_calls'] += 1
        return solver.solve(assumptions, deadline=self.deadline)

    def _cleanup(self, solver):
        self._retired += 1
        if self._retired % CLEANUP_EVERY == 0:
            solver.simplify()

    def frame_assumptions(self, i):
        if i == 0:
            return self.enc.init_lits()
        acts = [self.enc.activation(j) for j in range(i, self.frames.top + 1)]
        return acts + [-self.enc.bad_cur]

    def init_intersects(self, cube):
        """I ∧ cube is satisfiable"""
        result = self._solve(self.init_solver, list(cube))
        if result.sat:
            self._init_model = result.model
        return result.sat

    def relatively_inductive(self, cube, level):
        """
        F_{level-1} ∧ ¬cube ∧ T ∧ cube' is UNSAT.

        Returns:
            (ok, core) where core ⊆ cube comes from the failed primed assumptions
        """
        enc = self.enc
        tmp = enc.temporary([-l for l in enc.cur_lits(cube)])
        try:
            result = self._solve(self.solver, self.frame_assumptions(level - 1) + [tmp] + enc.prime(cube))
        finally:
            enc.retire(tmp)
            self._cleanup(self.solver)
        if result.sat:
            return False, None
        return True, self._core(result.failed_assumptions, cube)

    def _core(self, failed, cube):
        latch_of = self.enc.latch_of_nxt
        core = []
        for lit in failed:
            idx = latch_of.get(abs(lit))
            if idx is not None:
                core.append(idx if lit > 0 else -idx)
        wanted = set(cube)
        return tuple(l for l in core if l in wanted)

    def lift(self, order, inputs, target, primed_inputs=None):
        """
        Failed-assumption lifting of a predecessor state.

        target is a cube over the successor, or None to lift towards the bad
        output under `primed_inputs`.
        """
        enc = self.lift_enc
        if target is None:
            goal = [-enc.bad_nxt]
            extra = enc.primed_input_lits(primed_inputs or [])
        else:
            goal = [-l for l in enc.prime(target)]
            extra = []
        tmp = enc.temporary(goal)
        assumptions = enc.input_lits(inputs) + extra + enc.cur_lits(order) + [tmp]
        try:
            result = self._solve(self.lift_solver, assumptions)
        finally:
            enc.retire(tmp)
            self._cleanup(self.lift_solver)
        if result.sat:
            raise InternalError("lifting query is satisfiable", {'state': list(order), 'target': target})
        latch_of = enc.latch_of_cur
        keep = set()
        for lit in result.failed_assumptions:
            idx = latch_of.get(abs(lit))
            if idx is not None:
                keep.add(idx if lit > 0 else -idx)
        return tuple(l for l in order if l in keep)

    def verify_lemma(self, clause, level):
        """Re-check initiation and relative inductiveness on fresh solvers"""
        init = self._make_init_solver('recheck-init')
        self.stats['sat_calls'] += 2
        r = init.solve(list(negate(clause)))
        self._absorb(init)
        if r.sat:
            raise InternalError("lemma violates initiation", {'clause': clause, 'level': level})
        solver = Solver('recheck')
        enc = build_encoding(self.ts, solver, primed_bad=False)
        if level - 1 == 0:
            assumptions = enc.init_lits()
        else:
            for c in self.frames.frame(level - 1):
                solver.add_clause(enc.cur_lits(c))
            assumptions = [-enc.bad_cur]
        solver.add_clause(enc.cur_lits(clause))
        r = solver.solve(assumptions + enc.prime(negate(clause)))
        self._absorb(solver)
        if r.sat:
            raise InternalError("lemma is not relatively inductive", {'clause': clause, 'level': level})

    def _absorb(self, solver):
        for key in self._fresh:
            self._fresh[key] += solver.stats[key]

    # ------------------------------------------------------------------
    # Frames
    # ------------------------------------------------------------------

    def add_lemma(self, clause, level):
        if self.frames.add(clause, level):
            self.solver.add_clause(self.enc.cur_lits(clause) + [-self.enc.activation(level)])

    def try_push(self, clause, i):
        """Move clause from F_i to F_{i+1} when F_i ∧ T ∧ ¬c' is UNSAT"""
        self.stats['push_attempts'] += 1
        result = self._solve(self.solver, self.frame_assumptions(i) + self.enc.prime(negate(clause)))
        if result.sat:
            return False
        self.frames.move(clause, i)
        self.solver.add_clause(self.enc.cur_lits(clause) + [-self.enc.activation(i + 1)])
        self.stats['push_success'] += 1
        return True

    def simplify(self):
        self.stats['simplify_calls'] += 1
        self.stats['subsumed'] += self.frames.subsume()
        self.solver.simplify()

    # ------------------------------------------------------------------
    # Blocking
    # ------------------------------------------------------------------

    def get_cti(self, k):
        result = self._solve(self.solver, self.frame_assumptions(k) + [self.enc.bad_nxt])
        if not result.sat:
            return None
        self.stats['ctis'] += 1
        state = self.enc.state_cube(result.model)
        inputs = self.enc.input_bits(result.model)
        primed = self.enc.primed_input_bits(result.model)
        cube = pred_gen(self, state, inputs, None, self.policies['pred_gen'], self.rng, primed_inputs=primed)
        self.stats['obligations'] += 1
        return ProofObligation(cube, k, 0, None, inputs, primed)

    def block_one(self, obligation, k):
        queue = ObligationQueue(self.policies['po_handling'])
        obligation.frame = k
        queue.push(obligation)
        return self.block_proof_obligations(queue)

    def block_proof_obligations(self, queue):
        enc = self.enc
        while len(queue):
            self._tick()
            po = select_obligation(queue)
            s, i = po.cube, po.frame
            if i == 0:
                if self.init_intersects(s):
                    self._cex = po
                    return False
                continue
            if not self._solve(self.solver, self.frame_assumptions(i) + enc.cur_lits(s)).sat:
                continue
            if self.init_intersects(s):
                self._cex = po
                return False

            result = self._solve(self.solver, self.frame_assumptions(i - 1) + enc.prime(s))
            if result.sat:
                state = enc.state_cube(result.model)
                inputs = enc.input_bits(result.model)
                p = pred_gen(self, state, inputs, s, self.policies['pred_gen'], self.rng)
                queue.push(po, requeue=True)
                queue.push(ProofObligation(p, i - 1, po.depth + 1, po, inputs))
                self.stats['requeues'] += 1
                self.stats['obligations'] += 1
            else:
                core = self._core(result.failed_assumptions, s)
                clause = ind_gen(self, s, i, self.policies['ind_gen'], core)
                if self.options.debug:
                    self.verify_lemma(clause, i)
                self.add_lemma(clause, i)
                self.stats['lemmas'] += 1
        return True

    # ------------------------------------------------------------------
    # Artifacts
    # ------------------------------------------------------------------

    def _witness(self, x0, frames):
        circuit = self.ts.circuit
        for step, _, bad in simulate(circuit, x0, frames):
            if bad:
                return Witness(circuit.property_index, list(x0), [list(f) for f in frames[:step + 1]])
        raise InternalError("reconstructed trace does not reach bad", {'steps': len(frames)})

    def _witness_from_obligation(self, po):
        n = self.ts.num_latches
        x0 = [1 if self._init_model[i] else 0 for i in range(1, n + 1)]
        frames = []
        while po is not None:
            frames.append(po.inputs)
            if po.parent is None:
                frames.append(po.bad_inputs)
            po = po.parent
        return self._witness(x0, frames)

    def _check_debug_invariants(self, k):
        for i in range(1, k + 1):
            if self._solve(self.solver, self.frame_assumptions(i) + [self.enc.bad_nxt]).sat:
                raise InternalError(f"F_{i} ∧ T does not imply P'", {'frame': i})
        for i in range(1, k):
            for clause in self.frames.frame(i + 1):
                query = self.frame_assumptions(i) + [-l for l in self.enc.cur_lits(clause)]
                if self._solve(self.solver, query).sat:
                    raise InternalError(f"F_{i} does not imply F_{i + 1}", {'clause': clause})

    # ------------------------------------------------------------------
    # Main loop
    # ------------------------------------------------------------------

    def _run(self):
        enc = self.enc
        base = self._solve(self.solver, enc.init_lits() + [enc.bad_cur])
        if base.sat:
            x0 = [1 if base.model[v] else 0 for v in enc.cur[1:]]
            return Verdict(UNSAFE, witness=self._witness(x0, [enc.input_bits(base.model)]))
        base = self._solve(self.solver, enc.init_lits() + [enc.bad_nxt])
        if base.sat:
            x0 = [1 if base.model[v] else 0 for v in enc.cur[1:]]
            frames = [enc.input_bits(base.model), enc.primed_input_bits(base.model)]
            return Verdict(UNSAFE, witness=self._witness(x0, frames))

        k = 1
        while True:
            logger.info("frame %d: %d lemmas", k, self.frames.lemma_count())
            while True:
                cti = self.get_cti(k)
                if cti is None:
                    break
                if not self.block_one(cti, k):
                    return Verdict(UNSAFE, witness=self._witness_from_obligation(self._cex))
            push_clauses(self, k, self.policies['push_prop'], self.heuristics)
            if self.options.debug:
                self._check_debug_invariants(k)
            i = self.frames.fixpoint()
            if i is not None:
                return Verdict(SAFE, certificate=Certificate.of(self.frames.frame(i + 1)))
            self.frames.new_frame()
            k += 1

    def _finish_stats(self, started):
        stats = self.stats
        stats['frames'] = self.frames.top
        solvers = (self.solver, self.lift_solver, self.init_solver)
        stats['propagations'] = sum(s.stats['propagations'] for s in solvers) + self._fresh['propagations']
        stats['conflicts'] = sum(s.stats['conflicts'] for s in solvers) + self._fresh['conflicts']
        attempts = stats['push_attempts']
        stats['push_success_rate'] = stats['push_success'] / attempts if attempts else 0.0
        stats['time_sec'] = time.monotonic() - started
        return dict(stats)

    def run(self):
        started = time.monotonic()
        if self.options.timeout:
            self.deadline = started + self.options.timeout
        try:
            verdict = self._run()
        except CheckTimeout:
            logger.info("timeout after %.1fs", time.monotonic() - started)
            verdict = Verdict(TIMEOUT)
        verdict.stats = self._finish_stats(started)

        if self.options.validate:
            if verdict.status == SAFE:
                outcome = check_certificate(self.ts, verdict.certificate)
            elif verdict.status == UNSAFE:
                outcome = replay_witness(self.ts, verdict.witness)
            else:
                outcome = None
            if outcome is not None and not outcome.ok:
                raise InternalError(f"{verdict.status} artifact failed validation: {outcome.describe()}")
        return verdict


def check(ts, options=None):
    """
    Model-check the selected property of a transition system.

    Returns:
        Verdict with a certificate (SAFE), a witness (UNSAFE) or neither
        (TIMEOUT); stats always holds the instrumentation counters
    """
    return Ic3(ts, options).run()
