"""
Incremental CDCL SAT solver

Clauses use DIMACS-style signed integers (``3`` is x3, ``-3`` its negation).
Internally a literal is coded as ``2*var + neg`` so negation is ``code ^ 1``.

The solver is incremental: clauses are added permanently, and each ``solve``
call takes a list of assumption literals that act as the first decisions.
When the assumptions are contradictory the solver reports the subset that
took part in the final conflict.
"""
import heapq
import logging
import time
from dataclasses import dataclass, field

from pdrsmith.errors import CheckTimeout, SolverError

logger = logging.getLogger(__name__)

SAT = 'SAT'
UNSAT = 'UNSAT'

VAR_DECAY = 0.95
CLAUSE_DECAY = 0.999
RESTART_BASE = 64
DEADLINE_POLL = 256
MIN_LEARNT_LIMIT = 1000


@dataclass
class SolveOutcome:
    status: str
    model: list = field(default_factory=list)
    failed_assumptions: list = field(default_factory=list)

    @property
    def sat(self):
        return self.status == SAT

    def value(self, lit):
        """Truth value of a signed literal in the model"""
        v = self.model[abs(lit)]
        return v if lit > 0 else not v


class _Clause:
    __slots__ = ('lits', 'learnt', 'activity', 'lbd', 'deleted')

    def __init__(self, lits, learnt=False, lbd=0):
        self.lits = lits
        self.learnt = learnt
        self.activity = 0.0
        self.lbd = lbd
        self.deleted = False


def _code(lit):
    return (abs(lit) << 1) | (lit < 0)


def _ext(code):
    return -(code >> 1) if code & 1 else code >> 1


def luby(i):
    """i-th element (0-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class Solver:
    """
    Watched-literal CDCL with VSIDS, phase saving, Luby restarts and
    LBD-based learnt clause reduction.
    """

    def __init__(self, name='sat'):
        self.name = name
        self.num_vars = 0
        self.ok = True
        self._vals = [-1]
        self._level = [0]
        self._reason = [None]
        self._phase = [0]
        self._activity = [0.0]
        self._seen = [False]
        self._watches = [[], []]
        self._heap = []
        self._trail = []
        self._trail_lim = []
        self._qhead = 0
        self._var_inc = 1.0
        self._cla_inc = 1.0
        self._clauses = []
        self._learnts = []
        self._original = []
        self._max_learnts = None
        self._learnt_cap = None
        self.stats = {
            'solves': 0, 'decisions': 0, 'conflicts': 0, 'propagations': 0,
            'restarts': 0, 'reduces': 0, 'learnts': 0,
        }

    # ------------------------------------------------------------------
    # Variables and clauses
    # ------------------------------------------------------------------

    def new_var(self):
        self.num_vars += 1
        v = self.num_vars
        self._vals.append(-1)
        self._level.append(0)
        self._reason.append(None)
        self._phase.append(0)
        self._activity.append(0.0)
        self._seen.append(False)
        self._watches.append([])
        self._watches.append([])
        heapq.heappush(self._heap, (0.0, v))
        return v

    def _ensure_var(self, var):
        while self.num_vars < var:
            self.new_var()

    def _lit_value(self, code):
        a = self._vals[code >> 1]
        return a if a < 0 else a ^ (code & 1)

    def add_clause(self, lits):
        """
        Permanently assert a clause.

        Tautologies are dropped. Adding the empty clause (or a clause falsified
        at the root) makes the solver permanently UNSAT.
        """
        for lit in lits:
            if not isinstance(lit, int) or lit == 0:
                raise SolverError(f"invalid literal {lit!r} (variable index must be >= 1)")
        codes = sorted(set(_code(l) for l in lits))
        if any(codes[k] ^ 1 == codes[k + 1] for k in range(len(codes) - 1)):
            return
        if codes:
            self._ensure_var(max(c >> 1 for c in codes))
        self._original.append([_ext(c) for c in codes])
        if not self.ok:
            return
        self._cancel_until(0)
        kept = []
        for c in codes:
            val = self._lit_value(c)
            if val == 1:
                return
            if val < 0:
                kept.append(c)
        if not kept:
            self.ok = False
        elif len(kept) == 1:
            self._enqueue(kept[0], None)
            if self._propagate() is not None:
                self.ok = False
        else:
            clause = _Clause(kept)
            self._clauses.append(clause)
            self._attach(clause)

    def _attach(self, clause):
        self._watches[clause.lits[0]].append(clause)
        self._watches[clause.lits[1]].append(clause)

    @property
    def num_clauses(self):
        return len(self._original)

    # ------------------------------------------------------------------
    # Trail
    # ------------------------------------------------------------------

    def _decision_level(self):
        return len(self._trail_lim)

    def _enqueue(self, code, reason):
        v = code >> 1
        self._vals[v] = (code & 1) ^ 1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(code)

    def _cancel_until(self, level):
        if len(self._trail_lim) <= level:
            return
        stop = self._trail_lim[level]
        vals, phase, reason, act, heap = self._vals, self._phase, self._reason, self._activity, self._heap
        for k in range(len(self._trail) - 1, stop - 1, -1):
            v = self._trail[k] >> 1
            phase[v] = vals[v]
            vals[v] = -1
            reason[v] = None
            heapq.heappush(heap, (-act[v], v))
        del self._trail[stop:]
        del self._trail_lim[level:]
        self._qhead = len(self._trail)

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or None"""
        trail, watches, vals = self._trail, self._watches, self._vals
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            self.stats['propagations'] += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            watches[false_lit] = kept = []
            n = len(ws)
            idx = 0
            while idx < n:
                clause = ws[idx]
                idx += 1
                if clause.deleted:
                    continue
                lits = clause.lits
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], lits[0]
                first = lits[0]
                a = vals[first >> 1]
                if a >= 0 and a ^ (first & 1) == 1:
                    kept.append(clause)
                    continue
                moved = False
                for k in range(2, len(lits)):
                    lk = lits[k]
                    b = vals[lk >> 1]
                    if b < 0 or b ^ (lk & 1) == 1:
                        lits[1], lits[k] = lk, false_lit
                        watches[lk].append(clause)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(clause)
                if a >= 0:
                    kept.extend(ws[idx:])
                    self._qhead = len(trail)
                    return clause
                self._enqueue(first, clause)
        return None

    # ------------------------------------------------------------------
    # Heuristics
    # ------------------------------------------------------------------

    def _bump_var(self, v):
        act = self._activity
        act[v] += self._var_inc
        if act[v] > 1e100:
            for u in range(1, self.num_vars + 1):
                act[u] *= 1e-100
            self._var_inc *= 1e-100
            self._heap = [(-act[u], u) for u in range(1, self.num_vars + 1) if self._vals[u] < 0]
            heapq.heapify(self._heap)
        elif self._vals[v] < 0:
            heapq.heappush(self._heap, (-act[v], v))

    def _bump_clause(self, clause):
        clause.activity += self._cla_inc
        if clause.activity > 1e20:
            for c in self._learnts:
                c.activity *= 1e-20
            self._cla_inc *= 1e-20

    def _pick_branch(self):
        heap, vals, act = self._heap, self._vals, self._activity
        if len(heap) > 8 * (self.num_vars + 16):
            self._heap = heap = [(-act[u], u) for u in range(1, self.num_vars + 1) if vals[u] < 0]
            heapq.heapify(heap)
        while heap:
            neg_act, v = heapq.heappop(heap)
            if vals[v] < 0 and -neg_act == act[v]:
                return (v << 1) | (self._phase[v] != 1)
        for v in range(1, self.num_vars + 1):
            if vals[v] < 0:
                return (v << 1) | (self._phase[v] != 1)
        return None

    # ------------------------------------------------------------------
    # Conflict analysis
    # ------------------------------------------------------------------

    def _analyze(self, confl):
        """First-UIP learning; returns (learnt codes, backtrack level, lbd)"""
        seen, level, reason, trail = self._seen, self._level, self._reason, self._trail
        current = len(self._trail_lim)
        learnt = [0]
        touched = []
        path = 0
        p = None
        idx = len(trail) - 1
        while True:
            if confl.learnt:
                self._bump_clause(confl)
            lits = confl.lits if p is None else confl.lits[1:]
            for q in lits:
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    self._bump_var(v)
                    if level[v] >= current:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1

        # drop literals whose reason is already covered by the clause
        minimized = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r is None or any(not seen[l >> 1] and level[l >> 1] > 0 for l in r.lits[1:]):
                minimized.append(q)
        for v in touched:
            seen[v] = False

        if len(minimized) == 1:
            back = 0
        else:
            best = 1
            for k in range(2, len(minimized)):
                if level[minimized[k] >> 1] > level[minimized[best] >> 1]:
                    best = k
            minimized[1], minimized[best] = minimized[best], minimized[1]
            back = level[minimized[1] >> 1]
        lbd = len({level[q >> 1] for q in minimized})
        return minimized, back, lbd

    def _analyze_final(self, code):
        """Assumptions responsible for the assumption literal `code` being false"""
        failed = [_ext(code)]
        v0 = code >> 1
        if self._level[v0] == 0:
            return failed
        seen, reason, level = self._seen, self._reason, self._level
        seen[v0] = True
        touched = [v0]
        for k in range(len(self._trail) - 1, self._trail_lim[0] - 1, -1):
            x = self._trail[k]
            v = x >> 1
            if not seen[v]:
                continue
            r = reason[v]
            if r is None:
                failed.append(_ext(x))
            else:
                for l in r.lits[1:]:
                    u = l >> 1
                    if level[u] > 0 and not seen[u]:
                        seen[u] = True
                        touched.append(u)
        for v in touched:
            seen[v] = False
        return failed

    # ------------------------------------------------------------------
    # Clause database maintenance
    # ------------------------------------------------------------------

    def _locked(self, clause):
        v = clause.lits[0] >> 1
        return self._reason[v] is clause and self._vals[v] >= 0

    def _reduce(self):
        self.stats['reduces'] += 1
        self._learnts.sort(key=lambda c: (-c.lbd, c.activity))
        half = len(self._learnts) // 2
        kept = []
        for k, clause in enumerate(self._learnts):
            if k < half and clause.lbd > 2 and len(clause.lits) > 2 and not self._locked(clause):
                clause.deleted = True
            else:
                kept.append(clause)
        self._learnts = kept
        self._max_learnts = min(self._max_learnts * 1.1, self._learnt_cap)
        logger.debug("%s: reduced learnt clauses to %d", self.name, len(kept))

    def simplify(self):
        """Remove clauses satisfied at the root level"""
        if not self.ok:
            return 0
        self._cancel_until(0)
        if self._propagate() is not None:
            self.ok = False
            return 0
        removed = 0
        for db in (self._clauses, self._learnts):
            kept = []
            for clause in db:
                if any(self._lit_value(c) == 1 for c in clause.lits):
                    clause.deleted = True
                    removed += 1
                else:
                    kept.append(clause)
            db[:] = kept
        return removed

    # ------------------------------------------------------------------
    # Solving
    # ------------------------------------------------------------------

    def solve(self, assumptions=(), deadline=None):
        """
        Decide satisfiability under assumptions.

        Args:
            assumptions: signed literals assumed true for this call only
            deadline: optional time.monotonic() value; checked every few
                hundred conflicts

        Returns:
            SolveOutcome; model is indexed by variable (index 0 unused)

        Raises:
            CheckTimeout when the deadline passes
        """
        self.stats['solves'] += 1
        for lit in assumptions:
            if not isinstance(lit, int) or lit == 0:
                raise SolverError(f"invalid assumption literal {lit!r}")
            self._ensure_var(abs(lit))
        if not self.ok:
            return SolveOutcome(UNSAT)
        codes = [_code(l) for l in assumptions]
        if self._max_learnts is None or self._max_learnts < MIN_LEARNT_LIMIT:
            self._max_learnts = max(MIN_LEARNT_LIMIT, len(self._clauses) / 3)
            self._learnt_cap = 2 * self._max_learnts
        self._cancel_until(0)

        restart_no = 0
        restart_limit = luby(0) * RESTART_BASE
        conflicts_here = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats['conflicts'] += 1
                conflicts_here += 1
                if not self._trail_lim:
                    self.ok = False
                    return SolveOutcome(UNSAT)
                learnt, back, lbd = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    clause = _Clause(learnt, learnt=True, lbd=lbd)
                    self._learnts.append(clause)
                    self.stats['learnts'] += 1
                    self._attach(clause)
                    self._bump_clause(clause)
                    self._enqueue(learnt[0], clause)
                self._var_inc /= VAR_DECAY
                self._cla_inc /= CLAUSE_DECAY
                if deadline is not None and conflicts_here % DEADLINE_POLL == 0 and time.monotonic() > deadline:
                    self._cancel_until(0)
                    raise CheckTimeout(f"{self.name}: deadline reached during solve")
                continue

            if conflicts_here >= restart_limit:
                self.stats['restarts'] += 1
                restart_no += 1
                restart_limit = conflicts_here + luby(restart_no) * RESTART_BASE
                self._cancel_until(0)
                continue
            if len(self._learnts) - len(self._trail) >= self._max_learnts:
                self._reduce()

            nxt = None
            while len(self._trail_lim) < len(codes):
                p = codes[len(self._trail_lim)]
                val = self._lit_value(p)
                if val == 1:
                    self._trail_lim.append(len(self._trail))
                elif val == 0:
                    failed = self._analyze_final(p)
                    self._cancel_until(0)
                    return SolveOutcome(UNSAT, failed_assumptions=failed)
                else:
                    nxt = p
                    break
            if nxt is None:
                nxt = self._pick_branch()
                if nxt is None:
                    model = [v == 1 for v in self._vals]
                    model[0] = False
                    self._cancel_until(0)
                    return SolveOutcome(SAT, model=model)
                self.stats['decisions'] += 1
            self._trail_lim.append(len(self._trail))
            self._enqueue(nxt, None)

    # ------------------------------------------------------------------
    # Debug output
    # ------------------------------------------------------------------

    def to_dimacs(self):
        """DIMACS dump of every clause added so far (learnt clauses excluded)"""
        lines = [f"c {self.name}", f"p cnf {self.num_vars} {len(self._original)}"]
        lines += [" ".join(str(l) for l in clause) + " 0" for clause in self._original]
        return "\n".join(lines) + "\n"
