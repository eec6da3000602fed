"""
Independent verdict validation

SAFE certificates are checked with three UNSAT obligations on fresh solvers
and UNSAFE witnesses are replayed with the circuit simulator. Nothing here
depends on the model checker itself.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path

from pdrsmith.aiger import simulate, simulate_step
from pdrsmith.encode import build_encoding
from pdrsmith.errors import CertificateFormatError, WitnessFormatError
from pdrsmith.sat import Solver

logger = logging.getLogger(__name__)

CERT_MAGIC = 'IC3CERT 1'

INITIATION = 'initiation'
CONSECUTION = 'consecution'
SAFETY = 'safety'


# ============================================================================
# ARTIFACT TYPES
# ============================================================================

def _canonical_clause(lits):
    unique = set(lits)
    if any(-l in unique for l in unique):
        return None
    return tuple(sorted(unique, key=abs))


def canonical_clauses(clauses):
    """Sorted, deduplicated, tautology-free clause list"""
    out = set()
    for clause in clauses:
        c = _canonical_clause(clause)
        if c is not None:
            out.add(c)
    return sorted(out, key=lambda c: (len(c), [abs(l) for l in c], c))


@dataclass(frozen=True)
class Certificate:
    clauses: tuple = ()

    @classmethod
    def of(cls, clauses):
        return cls(tuple(canonical_clauses(clauses)))


@dataclass
class Witness:
    property_index: int = 0
    initial_state: list = field(default_factory=list)
    input_frames: list = field(default_factory=list)


@dataclass
class CheckOutcome:
    ok: bool
    obligation: str = None
    reason: str = None
    step: int = None
    assignment: dict = None

    def describe(self):
        if self.ok:
            return "valid"
        where = f" ({self.obligation})" if self.obligation else ""
        at = f" at step {self.step}" if self.step is not None else ""
        return f"invalid{where}{at}: {self.reason}"


# ============================================================================
# FILE FORMATS
# ============================================================================

def write_certificate(cert):
    lines = [CERT_MAGIC, f"clauses {len(cert.clauses)}"]
    lines += [" ".join(str(l) for l in clause) + " 0" for clause in cert.clauses]
    return "\n".join(lines) + "\n"


def read_certificate(text):
    """Parse a .cert file; tautological clauses are dropped"""
    lines = text.split('\n')
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or lines[0].strip() != CERT_MAGIC:
        raise CertificateFormatError(f"line 1: expected '{CERT_MAGIC}'")
    if len(lines) < 2:
        raise CertificateFormatError("line 2: missing 'clauses N'")
    head = lines[1].split()
    if len(head) != 2 or head[0] != 'clauses' or not head[1].isdigit():
        raise CertificateFormatError(f"line 2: expected 'clauses N', got '{lines[1]}'")
    count = int(head[1])
    body = lines[2:]
    if len(body) != count:
        raise CertificateFormatError(f"header announces {count} clauses, file has {len(body)}")
    clauses = []
    for offset, line in enumerate(body, start=3):
        try:
            lits = [int(t) for t in line.split()]
        except ValueError:
            raise CertificateFormatError(f"line {offset}: non-numeric literal") from None
        if not lits or lits[-1] != 0:
            raise CertificateFormatError(f"line {offset}: clause must end with 0")
        if 0 in lits[:-1]:
            raise CertificateFormatError(f"line {offset}: literal 0 inside clause")
        clauses.append(lits[:-1])
    return Certificate.of(clauses)


def write_witness(witness):
    lines = ['1', f"b{witness.property_index}", "".join(str(int(b)) for b in witness.initial_state)]
    lines += ["".join(str(int(b)) for b in frame) for frame in witness.input_frames]
    lines.append('.')
    return "\n".join(lines) + "\n"


def _bits(line, number):
    out = []
    for ch in line.strip():
        if ch == '1':
            out.append(1)
        elif ch in '0xX':
            out.append(0)
        else:
            raise WitnessFormatError(f"line {number}: unexpected character '{ch}'")
    return out


def read_witness(text):
    """Parse a .cex file in AIGER witness layout; 'x' bits read as 0"""
    lines = text.split('\n')
    if not lines or lines[0].strip() != '1':
        raise WitnessFormatError("line 1: expected '1' (counterexample present)")
    if len(lines) < 3:
        raise WitnessFormatError("witness truncated before the initial state line")
    prop = lines[1].strip()
    if len(prop) < 2 or prop[0] != 'b' or not prop[1:].isdigit():
        raise WitnessFormatError(f"line 2: expected 'b<index>', got '{lines[1]}'")
    initial = _bits(lines[2], 3)
    frames = []
    for number, line in enumerate(lines[3:], start=4):
        if line.strip() == '.':
            return Witness(int(prop[1:]), initial, frames)
        frames.append(_bits(line, number))
    raise WitnessFormatError("missing terminating '.' line")


def load_certificate(path):
    return read_certificate(Path(path).read_text())


def load_witness(path):
    return read_witness(Path(path).read_text())


# ============================================================================
# CHECKS
# ============================================================================

def _state_of(encoding, model):
    return {i: int(model[encoding.cur[i]]) for i in range(1, len(encoding.cur))}


def _negation_selector(solver, lits_of, clauses):
    """Fresh variables d_c with d_c -> ¬c; returns the list of selectors"""
    selectors = []
    for clause in clauses:
        d = solver.new_var()
        for lit in lits_of(clause):
            solver.add_clause([-d, -lit])
        selectors.append(d)
    return selectors


def check_certificate(ts, cert):
    """
    Validate Inv(x, y) = ¬B(x, y) ∧ clauses as an inductive invariant.

    Returns:
        CheckOutcome; on failure `obligation` names the violated check and
        `assignment` holds a concrete latch assignment
    """
    n = ts.num_latches
    for clause in cert.clauses:
        for lit in clause:
            if lit == 0 or abs(lit) > n:
                raise CertificateFormatError(f"clause {list(clause)} references unknown latch {abs(lit)} (circuit has {n})")

    # initiation: I ∧ ¬Inv
    solver = Solver('cert-initiation')
    enc = build_encoding(ts, solver, primed_bad=False)
    sel = _negation_selector(solver, enc.cur_lits, cert.clauses)
    solver.add_clause([enc.bad_cur] + sel)
    result = solver.solve(enc.init_lits())
    if result.sat:
        return CheckOutcome(False, INITIATION, "an initial state violates the invariant",
                            assignment=_state_of(enc, result.model))

    # consecution: Inv ∧ T ∧ ¬Inv'
    solver = Solver('cert-consecution')
    enc = build_encoding(ts, solver, primed_bad=True)
    for clause in cert.clauses:
        solver.add_clause(enc.cur_lits(clause))
    sel = _negation_selector(solver, enc.prime, cert.clauses)
    solver.add_clause([enc.bad_nxt] + sel)
    result = solver.solve([-enc.bad_cur])
    if result.sat:
        return CheckOutcome(False, CONSECUTION, "invariant is not closed under the transition relation",
                            assignment=_state_of(enc, result.model))

    # safety: Inv ∧ ¬P
    solver = Solver('cert-safety')
    enc = build_encoding(ts, solver, primed_bad=False)
    for clause in cert.clauses:
        solver.add_clause(enc.cur_lits(clause))
    result = solver.solve([-enc.bad_cur, enc.bad_cur])
    if result.sat:
        return CheckOutcome(False, SAFETY, "invariant admits a bad state",
                            assignment=_state_of(enc, result.model))
    return CheckOutcome(True)


def replay_witness(ts, witness):
    """
    Replay a counterexample by simulation.

    Bad is evaluated at each step with that step's input frame; a witness
    without frames is evaluated once with all inputs 0.
    """
    circuit = ts.circuit
    if len(witness.initial_state) != ts.num_latches:
        return CheckOutcome(False, reason=f"initial state has {len(witness.initial_state)} bits, circuit has {ts.num_latches} latches", step=0)
    for step, frame in enumerate(witness.input_frames):
        if len(frame) != ts.num_inputs:
            return CheckOutcome(False, reason=f"input frame has {len(frame)} bits, circuit has {ts.num_inputs} inputs", step=step)
    if witness.property_index != circuit.property_index:
        return CheckOutcome(False, reason=f"witness is for property b{witness.property_index}, checking b{circuit.property_index}")
    if not ts.satisfies_init(witness.initial_state):
        return CheckOutcome(False, reason="initial state violates the reset values", step=0)
    if not witness.input_frames:
        _, bad = simulate_step(circuit, witness.initial_state, [0] * ts.num_inputs)
        if bad:
            return CheckOutcome(True, step=0)
        return CheckOutcome(False, reason="bad never raised", step=0)
    for step, _, bad in simulate(circuit, witness.initial_state, witness.input_frames):
        if bad:
            return CheckOutcome(True, step=step)
    return CheckOutcome(False, reason="bad never raised", step=len(witness.input_frames))
