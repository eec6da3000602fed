"""
AIGER circuit reader, writer and simulator

Supports AIGER 1.x ASCII (``aag``) and binary (``aig``) files with a single
safety property taken from the bad-state section (1.9) or, when that section
is empty, from the outputs (1.0). Constraint, justice and fairness sections
are rejected instead of being ignored.
"""
from dataclasses import dataclass, field
from pathlib import Path

from pdrsmith.errors import AigerParseError, SimulationError

ASCII_MAGIC = 'aag'
BINARY_MAGIC = 'aig'


# ============================================================================
# NETLIST TYPES
# ============================================================================

@dataclass(frozen=True)
class Latch:
    lit: int
    next: int
    reset: int = 0

    @property
    def uninitialized(self):
        """Reset equal to the latch's own literal means any initial value"""
        return self.reset == self.lit


@dataclass(frozen=True)
class AndGate:
    lhs: int
    rhs0: int
    rhs1: int


@dataclass(frozen=True)
class AigerCircuit:
    """Immutable gate-level netlist; ANDs are kept in topological order"""
    max_var_index: int
    inputs: tuple = ()
    latches: tuple = ()
    outputs: tuple = ()
    bads: tuple = ()
    ands: tuple = ()
    property_index: int = 0
    symbols: tuple = field(default=(), compare=False)
    comments: tuple = field(default=(), compare=False)

    @property
    def properties(self):
        """Bad-state literals; AIGER 1.0 files carry them as outputs"""
        return self.bads if self.bads else self.outputs

    @property
    def bad_literal(self):
        return self.properties[self.property_index]

    @property
    def num_inputs(self):
        return len(self.inputs)

    @property
    def num_latches(self):
        return len(self.latches)

    def with_property(self, index):
        """Select another property index (CLI ``--property``)"""
        if not 0 <= index < len(self.properties):
            raise AigerParseError(
                f"property index {index} out of range (circuit has {len(self.properties)})"
            )
        return AigerCircuit(
            self.max_var_index, self.inputs, self.latches, self.outputs, self.bads,
            self.ands, index, self.symbols, self.comments,
        )


def lit_var(lit):
    return lit >> 1


def lit_sign(lit):
    return lit & 1


# ============================================================================
# PARSING
# ============================================================================

def load(path, property_index=0):
    """Read and parse an AIGER file from disk"""
    return parse(Path(path).read_bytes(), property_index=property_index)


def parse(data, property_index=0):
    """
    Parse an AIGER 1.x file.

    Args:
        data: file contents (bytes or str)
        property_index: which bad/output literal is the checked property

    Returns:
        AigerCircuit with ANDs in topological order

    Raises:
        AigerParseError with the offending line (ASCII) or byte (binary)
    """
    if isinstance(data, str):
        data = data.encode('ascii')
    if data.startswith(ASCII_MAGIC.encode()):
        circuit = _parse_ascii(data)
    elif data.startswith(BINARY_MAGIC.encode()):
        circuit = _parse_binary(data)
    else:
        raise AigerParseError("missing 'aag' or 'aig' header", 1)
    if not circuit.properties:
        raise AigerParseError("circuit has neither bad-state properties nor outputs", 1)
    return circuit.with_property(property_index)


def _parse_header(line, line_no=1):
    tokens = line.split()
    if not tokens or tokens[0] not in (ASCII_MAGIC, BINARY_MAGIC):
        raise AigerParseError(f"malformed header '{line}'", line_no)
    if not 6 <= len(tokens) <= 10:
        raise AigerParseError(f"header needs 5 to 9 counts, got {len(tokens) - 1}", line_no)
    try:
        counts = [int(t) for t in tokens[1:]]
    except ValueError:
        raise AigerParseError(f"non-numeric header field in '{line}'", line_no) from None
    if any(n < 0 for n in counts):
        raise AigerParseError("negative header count", line_no)
    counts += [0] * (9 - len(counts))
    m, i, l, o, a, b, c, j, f = counts
    for name, n in (('constraint', c), ('justice', j), ('fairness', f)):
        if n:
            raise AigerParseError(f"unsupported {name} section ({n} entries); only bad-state properties are checked", line_no)
    return tokens[0], m, i, l, o, a, b


def _int_tokens(line, expected, line_no, what):
    tokens = line.split()
    if len(tokens) not in expected:
        raise AigerParseError(f"expected {what}, got '{line}'", line_no)
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise AigerParseError(f"non-numeric {what} '{line}'", line_no) from None


class _Definitions:
    """Tracks which variables are defined while parsing"""

    def __init__(self, max_var, unit):
        self.max_var = max_var
        self.unit = unit
        self.defined = {}

    def check_lit(self, lit, pos):
        if lit < 0 or lit_var(lit) > self.max_var:
            raise AigerParseError(f"literal {lit} out of range (M={self.max_var})", pos, self.unit)

    def define(self, lit, kind, pos):
        self.check_lit(lit, pos)
        if lit_sign(lit) or lit < 2:
            raise AigerParseError(f"{kind} literal {lit} must be even and non-constant", pos, self.unit)
        var = lit_var(lit)
        if var in self.defined:
            prev = self.defined[var]
            if kind == 'AND' and prev == 'AND':
                raise AigerParseError(f"duplicate AND definition of literal {lit}", pos, self.unit)
            raise AigerParseError(f"literal {lit} defined twice ({prev} and {kind})", pos, self.unit)
        self.defined[var] = kind


def _parse_ascii(data):
    try:
        text = data.decode('ascii')
    except UnicodeDecodeError as exc:
        raise AigerParseError("non-ASCII byte in 'aag' file", exc.start, 'byte') from None
    lines = text.split('\n')
    _, m, i, l, o, a, b = _parse_header(lines[0])
    defs = _Definitions(m, 'line')
    cursor = 1

    def take(what):
        nonlocal cursor
        if cursor >= len(lines):
            raise AigerParseError(f"unexpected end of file while reading {what}", cursor + 1)
        line = lines[cursor]
        cursor += 1
        return line, cursor

    inputs = []
    for _ in range(i):
        line, no = take('input')
        (lit,) = _int_tokens(line, (1,), no, 'input literal')
        defs.define(lit, 'input', no)
        inputs.append(lit)

    latches = []
    for _ in range(l):
        line, no = take('latch')
        fields = _int_tokens(line, (2, 3), no, 'latch definition')
        cur, nxt = fields[0], fields[1]
        reset = fields[2] if len(fields) == 3 else 0
        defs.define(cur, 'latch', no)
        defs.check_lit(nxt, no)
        if reset not in (0, 1, cur):
            raise AigerParseError(f"latch reset {reset} must be 0, 1 or the latch literal", no)
        latches.append((Latch(cur, nxt, reset), no))

    outputs, bads = [], []
    for target, count, what in ((outputs, o, 'output'), (bads, b, 'bad')):
        for _ in range(count):
            line, no = take(what)
            (lit,) = _int_tokens(line, (1,), no, f'{what} literal')
            defs.check_lit(lit, no)
            target.append((lit, no))

    ands = []
    for _ in range(a):
        line, no = take('AND gate')
        lhs, rhs0, rhs1 = _int_tokens(line, (3,), no, 'AND gate')
        defs.define(lhs, 'AND', no)
        defs.check_lit(rhs0, no)
        defs.check_lit(rhs1, no)
        ands.append((AndGate(lhs, rhs0, rhs1), no))

    symbols, comments = _parse_trailer(lines[cursor:], cursor + 1, i, l, o, b)

    def used(lit, no):
        if lit_var(lit) and lit_var(lit) not in defs.defined:
            raise AigerParseError(f"literal {lit} references undefined variable {lit_var(lit)}", no)

    for latch, no in latches:
        used(latch.next, no)
    for lit, no in outputs + bads:
        used(lit, no)
    for gate, no in ands:
        used(gate.rhs0, no)
        used(gate.rhs1, no)

    ordered = _topological(ands, 'line')
    return AigerCircuit(
        max_var_index=m,
        inputs=tuple(inputs),
        latches=tuple(latch for latch, _ in latches),
        outputs=tuple(lit for lit, _ in outputs),
        bads=tuple(lit for lit, _ in bads),
        ands=tuple(ordered),
        symbols=tuple(symbols),
        comments=tuple(comments),
    )


def _parse_trailer(lines, first_line_no, i, l, o, b):
    """Symbol table and comment section"""
    limits = {'i': i, 'l': l, 'o': o, 'b': b}
    symbols, comments = [], []
    for offset, line in enumerate(lines):
        no = first_line_no + offset
        if line == 'c':
            comments = lines[offset + 1:]
            while comments and comments[-1] == '':
                comments.pop()
            break
        if not line:
            continue
        kind = line[0]
        head, _, name = line.partition(' ')
        if kind not in limits or not head[1:].isdigit():
            raise AigerParseError(f"unexpected line '{line}' after netlist", no)
        pos = int(head[1:])
        if pos >= limits[kind]:
            raise AigerParseError(f"symbol {head} refers to a missing {kind}-entry", no)
        symbols.append((kind, pos, name))
    return symbols, comments


def _topological(ands, unit):
    """Order (gate, pos) pairs so every gate follows the gates it reads"""
    by_var = {lit_var(g.lhs): (g, pos) for g, pos in ands}
    state = {}
    ordered = []
    for gate, pos in ands:
        root = lit_var(gate.lhs)
        if root in state:
            continue
        stack = [(root, False)]
        while stack:
            var, expanded = stack.pop()
            if expanded:
                state[var] = 'done'
                ordered.append(by_var[var][0])
                continue
            if state.get(var) == 'done':
                continue
            if state.get(var) == 'active':
                raise AigerParseError(f"combinational cycle through variable {var}", by_var[var][1], unit)
            state[var] = 'active'
            stack.append((var, True))
            g = by_var[var][0]
            for child in (lit_var(g.rhs1), lit_var(g.rhs0)):
                if child in by_var and state.get(child) != 'done':
                    if state.get(child) == 'active':
                        raise AigerParseError(f"combinational cycle through variable {child}", by_var[child][1], unit)
                    stack.append((child, False))
    return ordered


def _read_text_line(data, pos):
    end = data.find(b'\n', pos)
    if end < 0:
        raise AigerParseError("unexpected end of file in text section", pos, 'byte')
    return data[pos:end].decode('ascii', errors='replace'), end + 1


def _decode_delta(data, pos):
    """Variable-length 7-bit chunks, high bit set means more chunks follow"""
    value, shift = 0, 0
    while True:
        if pos >= len(data):
            raise AigerParseError("truncated binary delta stream", pos, 'byte')
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7


def _parse_binary(data):
    header, pos = _read_text_line(data, 0)
    _, m, i, l, o, a, b = _parse_header(header)
    if m != i + l + a:
        raise AigerParseError(f"binary header requires M = I + L + A ({m} != {i + l + a})", 0, 'byte')
    defs = _Definitions(m, 'byte')
    inputs = tuple(2 * (k + 1) for k in range(i))
    for lit in inputs:
        defs.define(lit, 'input', 0)

    latches = []
    for k in range(l):
        start = pos
        line, pos = _read_text_line(data, pos)
        fields = _int_tokens(line, (1, 2), start, 'latch definition')
        cur = 2 * (i + k + 1)
        reset = fields[1] if len(fields) == 2 else 0
        defs.define(cur, 'latch', start)
        defs.check_lit(fields[0], start)
        if reset not in (0, 1, cur):
            raise AigerParseError(f"latch reset {reset} must be 0, 1 or the latch literal", start, 'byte')
        latches.append(Latch(cur, fields[0], reset))

    outputs, bads = [], []
    for target, count, what in ((outputs, o, 'output'), (bads, b, 'bad')):
        for _ in range(count):
            start = pos
            line, pos = _read_text_line(data, pos)
            (lit,) = _int_tokens(line, (1,), start, f'{what} literal')
            defs.check_lit(lit, start)
            target.append(lit)

    ands = []
    for k in range(a):
        start = pos
        lhs = 2 * (i + l + k + 1)
        delta0, pos = _decode_delta(data, pos)
        delta1, pos = _decode_delta(data, pos)
        if delta0 == 0 or delta0 > lhs:
            raise AigerParseError(f"invalid first delta {delta0} for AND {lhs}", start, 'byte')
        rhs0 = lhs - delta0
        if delta1 > rhs0:
            raise AigerParseError(f"invalid second delta {delta1} for AND {lhs}", start, 'byte')
        rhs1 = rhs0 - delta1
        defs.define(lhs, 'AND', start)
        ands.append(AndGate(lhs, rhs0, rhs1))

    trailer = data[pos:].decode('ascii', errors='replace').split('\n')
    symbols, comments = _parse_trailer(trailer, 0, i, l, o, b)
    return AigerCircuit(
        max_var_index=m,
        inputs=inputs,
        latches=tuple(latches),
        outputs=tuple(outputs),
        bads=tuple(bads),
        ands=tuple(ands),
        symbols=tuple(symbols),
        comments=tuple(comments),
    )


# ============================================================================
# NORMALIZATION AND WRITING
# ============================================================================

def normalize(circuit):
    """
    Canonical reindexing: inputs get variables 1..I, latches I+1..I+L and
    ANDs follow in topological order with rhs0 >= rhs1. Symbols and comments
    are carried over unchanged.
    """
    mapping = {0: 0}
    next_var = 1
    for lit in circuit.inputs:
        mapping[lit_var(lit)] = next_var
        next_var += 1
    for latch in circuit.latches:
        mapping[lit_var(latch.lit)] = next_var
        next_var += 1
    for gate in circuit.ands:
        mapping[lit_var(gate.lhs)] = next_var
        next_var += 1

    def remap(lit):
        return 2 * mapping[lit_var(lit)] + lit_sign(lit)

    ands = []
    for gate in circuit.ands:
        r0, r1 = remap(gate.rhs0), remap(gate.rhs1)
        if r0 < r1:
            r0, r1 = r1, r0
        ands.append(AndGate(remap(gate.lhs), r0, r1))
    latches = []
    for latch in circuit.latches:
        cur = remap(latch.lit)
        reset = cur if latch.uninitialized else latch.reset
        latches.append(Latch(cur, remap(latch.next), reset))
    return AigerCircuit(
        max_var_index=next_var - 1,
        inputs=tuple(remap(lit) for lit in circuit.inputs),
        latches=tuple(latches),
        outputs=tuple(remap(lit) for lit in circuit.outputs),
        bads=tuple(remap(lit) for lit in circuit.bads),
        ands=tuple(ands),
        property_index=circuit.property_index,
        symbols=circuit.symbols,
        comments=circuit.comments,
    )


def _encode_delta(value):
    out = bytearray()
    while value & ~0x7F:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    out.append(value)
    return bytes(out)


def serialize(circuit, binary=False):
    """Write a circuit as 'aag' text or, after normalization, as binary 'aig'"""
    c = normalize(circuit) if binary else circuit
    b = len(c.bads)
    counts = [c.max_var_index, len(c.inputs), len(c.latches), len(c.outputs), len(c.ands)]
    if b:
        counts.append(b)
    magic = BINARY_MAGIC if binary else ASCII_MAGIC
    head = [f"{magic} " + " ".join(str(n) for n in counts)]
    if not binary:
        head += [str(lit) for lit in c.inputs]
    for latch in c.latches:
        fields = [] if binary else [str(latch.lit)]
        fields.append(str(latch.next))
        if latch.reset != 0:
            fields.append(str(latch.reset))
        head.append(" ".join(fields))
    head += [str(lit) for lit in c.outputs]
    head += [str(lit) for lit in c.bads]
    out = bytearray(("\n".join(head) + "\n").encode('ascii'))
    if binary:
        for gate in c.ands:
            out += _encode_delta(gate.lhs - gate.rhs0)
            out += _encode_delta(gate.rhs0 - gate.rhs1)
    else:
        out += "".join(f"{g.lhs} {g.rhs0} {g.rhs1}\n" for g in c.ands).encode('ascii')
    trailer = [f"{kind}{pos} {name}" for kind, pos, name in c.symbols]
    if c.comments:
        trailer.append('c')
        trailer += list(c.comments)
    if trailer:
        out += ("\n".join(trailer) + "\n").encode('ascii')
    return bytes(out)


# ============================================================================
# SIMULATION
# ============================================================================

def initial_state(circuit):
    """Reset values; uninitialized latches start at 0"""
    return [0 if latch.uninitialized else latch.reset for latch in circuit.latches]


def _evaluate(circuit, state, inputs):
    if len(state) != len(circuit.latches):
        raise SimulationError(f"state has {len(state)} bits, circuit has {len(circuit.latches)} latches")
    if len(inputs) != len(circuit.inputs):
        raise SimulationError(f"input vector has {len(inputs)} bits, circuit has {len(circuit.inputs)} inputs")
    values = [0] * (circuit.max_var_index + 1)
    for lit, bit in zip(circuit.inputs, inputs):
        values[lit >> 1] = 1 if bit else 0
    for latch, bit in zip(circuit.latches, state):
        values[latch.lit >> 1] = 1 if bit else 0
    for gate in circuit.ands:
        v0 = values[gate.rhs0 >> 1] ^ (gate.rhs0 & 1)
        v1 = values[gate.rhs1 >> 1] ^ (gate.rhs1 & 1)
        values[gate.lhs >> 1] = v0 & v1
    return values


def _value(values, lit):
    return values[lit >> 1] ^ (lit & 1)


def simulate_step(circuit, state, inputs):
    """
    One clock step.

    Returns:
        (next_state, bad) where bad is the property literal under the given
        state and inputs
    """
    values = _evaluate(circuit, state, inputs)
    next_state = [_value(values, latch.next) for latch in circuit.latches]
    return next_state, _value(values, circuit.bad_literal)


def simulate(circuit, initial, input_frames):
    """Yield (step, state, bad) for each input frame"""
    state = list(initial)
    for step, inputs in enumerate(input_frames):
        next_state, bad = simulate_step(circuit, state, inputs)
        yield step, state, bad
        state = next_state
