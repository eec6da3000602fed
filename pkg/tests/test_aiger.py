import random

import pytest

from pdrsmith.aiger import AndGate, Latch, initial_state, normalize, parse, serialize, simulate, simulate_step
from pdrsmith.corpus import counter, random_aig, standard_suite
from pdrsmith.errors import AigerParseError, SimulationError

TOGGLE = "aag 1 0 1 0 0 1\n2 3\n2\n"

TWO_PROPERTIES = "aag 2 1 1 0 0 2\n2\n4 2\n4\n5\n"

# sparse numbering: input is variable 5, the AND is variable 4
SPARSE = "aag 5 1 1 1 1\n10\n4 8\n8\n8 10 4\n"

SYMBOLS = """aag 1 1 0 1 0
2
2
i0 req
o0 err
c
generated by hand
"""


def test_constant_false_output():
    circuit = parse("aag 0 0 0 1 0\n0\n")
    assert circuit.max_var_index == 0
    assert circuit.bads == ()
    assert circuit.properties == (0,)
    assert circuit.bad_literal == 0


def test_single_input_passthrough():
    circuit = parse("aag 1 1 0 1 0\n2\n2\n")
    assert circuit.inputs == (2,)
    assert circuit.bad_literal == 2


def test_latch_fields():
    circuit = parse(TOGGLE)
    assert circuit.latches == (Latch(2, 3, 0),)
    assert circuit.bads == (2,)
    assert not circuit.latches[0].uninitialized


def test_uninitialized_latch():
    circuit = parse("aag 1 0 1 0 0 1\n2 2 2\n2\n")
    assert circuit.latches[0].uninitialized


def test_symbols_and_comments():
    circuit = parse(SYMBOLS)
    assert circuit.symbols == (('i', 0, 'req'), ('o', 0, 'err'))
    assert circuit.comments == ('generated by hand',)


def test_property_index_selects_bad_literal():
    assert parse(TWO_PROPERTIES).bad_literal == 4
    assert parse(TWO_PROPERTIES, property_index=1).bad_literal == 5
    with pytest.raises(AigerParseError, match="out of range"):
        parse(TWO_PROPERTIES, property_index=2)


def test_ands_are_put_in_topological_order():
    circuit = parse("aag 4 2 0 1 2\n2\n4\n8\n8 6 2\n6 2 4\n")
    assert circuit.ands == (AndGate(6, 2, 4), AndGate(8, 6, 2))


@pytest.mark.parametrize("text, fragment", [
    ("hello\n", "missing 'aag' or 'aig' header"),
    ("aag 1 0 0 1 1\n2\n2 2 2\n", "combinational cycle"),
    ("aag 2 0 0 1 0\n4\n", "undefined variable"),
    ("aag 2 1 0 1 2\n2\n4\n4 2 2\n4 3 3\n", "duplicate AND definition"),
    ("aag 0 0 0 0 0 0 0 1\n", "unsupported justice section"),
    ("aag 1 1 0 1 0\n2", "unexpected end of file"),
    ("aag 1 0 1 0 0 1\n2 2 3\n2\n", "latch reset 3"),
    ("aag 1 0 0 0 0\n", "neither bad-state properties nor outputs"),
    ("aag 1 1 0 1 0\n2\n4\n", "out of range"),
    ("aag 1 x 0 1 0\n", "non-numeric header"),
    ("aig 3 1 0 1 1\n2\n", "binary header requires M"),
])
def test_malformed_input_is_rejected(text, fragment):
    with pytest.raises(AigerParseError, match=fragment):
        parse(text)


def test_parse_error_names_the_line():
    with pytest.raises(AigerParseError) as info:
        parse("aag 2 1 0 1 1\n2\n4\n4 2 6\n")
    assert info.value.position == 4
    assert "at line 4" in str(info.value)


def test_binary_counter_matches_ascii_twin():
    circuit = counter(3, 5)
    assert parse(serialize(circuit, binary=True)) == parse(serialize(circuit))


def test_binary_writer_renumbers_sparse_variables():
    circuit = parse(SPARSE)
    binary = parse(serialize(circuit, binary=True))
    assert binary == normalize(circuit)
    assert binary.max_var_index == 3
    assert binary.ands == (AndGate(6, 4, 2),)
    frames = [[1], [1], [0], [1]]
    original = [bad for _, _, bad in simulate(circuit, [0], frames)]
    renumbered = [bad for _, _, bad in simulate(binary, [0], frames)]
    assert original == renumbered


def test_random_circuit_survives_binary_encoding():
    circuit = random_aig(7, latches=6, inputs=2)
    assert parse(serialize(circuit, binary=True)) == normalize(circuit)


def test_binary_and_ascii_encodings_simulate_identically():
    rng = random.Random(11)
    for name, circuit in standard_suite(seed=2, random_count=17):
        ascii_twin = parse(serialize(circuit))
        binary_twin = parse(serialize(circuit, binary=True))
        frames = [[rng.randint(0, 1) for _ in circuit.inputs] for _ in range(1000)]
        start = initial_state(circuit)
        traces = [
            [(list(state), bad) for _, state, bad in simulate(twin, start, frames)]
            for twin in (ascii_twin, binary_twin)
        ]
        assert traces[0] == traces[1], name


def test_toggle_step():
    next_state, bad = simulate_step(parse(TOGGLE), [0], [])
    assert next_state == [1]
    assert bad == 0


def test_empty_circuit_step():
    next_state, bad = simulate_step(parse("aag 0 0 0 1 0\n1\n"), [], [])
    assert next_state == []
    assert bad == 1


def test_counter_reaches_bad_after_five_steps():
    circuit = counter(3, 5)
    bads = [bad for _, _, bad in simulate(circuit, [0, 0, 0], [[1]] * 6)]
    assert bads == [0, 0, 0, 0, 0, 1]


def test_simulation_checks_vector_widths():
    circuit = counter(3, 5)
    with pytest.raises(SimulationError):
        simulate_step(circuit, [0, 0], [1])
    with pytest.raises(SimulationError):
        simulate_step(circuit, [0, 0, 0], [])
