import pytest

from qtmlab.machine import (
	MachineSyntaxError,
	RoleError,
	TapeRoles,
	TotalityError,
	build_machine,
	format_machine,
	load_machine,
	parse_machine,
)
from qtmlab.scalar import Scalar
from qtmlab.wellformed import RowDefectError

FLIP = [
	"qtm flip",
	"tapes 1",
	"tape 1 input {0,1} work {}",
	"roles input=1 output=1",
	"states q0 qf",
	"initial q0",
	"final qf",
	"complete",
	"on (q0; 0):",
	"  1 -> (qf; 1; N)",
	"on (q0; 1):",
	"  1 -> (qf; 0; N)",
]


def flip(replace=None, drop=(), extra=()):
	lines = [(replace or {}).get(line, line) for line in FLIP if line not in drop]
	return "\n".join(lines + list(extra)) + "\n"


def test_parse_flip():
	machine = parse_machine(flip())
	assert machine.name == "flip"
	assert machine.states == ("q0", "qf")
	assert machine.exact
	assert machine.roles == TapeRoles(input=0, output=0)
	assert len(machine.delta) == 6
	assert machine.delta[("q0", ("0",))][0].write == ("1",)
	assert machine.delta[("q0", ("#",))][0].state == "qf"


def test_parse_fixtures():
	had = load_machine("had.qtm")
	assert (len(had.states), had.tape_count, len(had.delta)) == (2, 1, 6)
	plus, minus = had.delta[("q0", ("1",))]
	assert minus.amplitude == -plus.amplitude
	assert plus.amplitude.abs2() == Scalar(1) / 2

	q1 = load_machine("fixtures/q1.qtm")
	assert q1.oracle_states == ("qp", "qa")
	assert q1.roles.query == 2
	assert len(q1.symbol_vectors) == 27
	assert all(key[0] != "qp" for key in q1.delta)

	assert not load_machine("phase.qtm").exact
	assert not load_machine("had.qtm", mode="approx").exact

	# Objective: Verify that a missing file is reported instead of silently ignored.
	with pytest.raises(FileNotFoundError):
		load_machine("no-such-machine.qtm")


def test_wildcards():
	hh = load_machine("hh.qtm")
	for symbol in ("0", "1", "#"):
		(t,) = hh.delta[("q1", (symbol,))]
		assert t.state == "q2"
		assert t.write == (symbol,)
		assert t.move == (-1,)

	# Objective: Verify that a row with fewer wildcards takes precedence over a wildcard row.
	text = flip(
		replace={"states q0 qf": "states q0 qa qf", "on (q0; 0):": "on (q0; *):", "  1 -> (qf; 1; N)": "  1 -> (qf; *; N)"},
		drop=("on (q0; 1):", "  1 -> (qf; 0; N)"),
		extra=["on (q0; #):", "  1 -> (qa; #; N)"],
	)
	machine = parse_machine(text)
	assert machine.delta[("q0", ("#",))][0].state == "qa"
	assert machine.delta[("q0", ("0",))][0].write == ("0",)
	assert machine.delta[("q0", ("1",))][0].state == "qf"


def test_totality():
	# Objective: Verify that a table without the complete directive must define every row.
	with pytest.raises(TotalityError, match="missing transition row"):
		parse_machine(flip(drop=("complete",)))


@pytest.mark.parametrize(
	"replace, extra, error, match",
	[
		({"tapes 1": "tapes 2"}, [], MachineSyntaxError, "tapes 1..2"),
		({"initial q0": "initial qx"}, [], MachineSyntaxError, "unknown initial state"),
		({"final qf": "final q0"}, [], MachineSyntaxError, "must not be final"),
		({"  1 -> (qf; 1; N)": "  1 -> (qf; 1; X)"}, [], MachineSyntaxError, "L, N or R"),
		({"  1 -> (qf; 1; N)": "  abc -> (qf; 1; N)"}, [], MachineSyntaxError, "Invalid amplitude"),
		({"  1 -> (qf; 1; N)": "  1 -> (qf; 7; N)"}, [], MachineSyntaxError, "outside the tape alphabet"),
		({"  1 -> (qf; 1; N)": "  1 -> (qx; 1; N)"}, [], MachineSyntaxError, "unknown state"),
		({}, ["on (q0; 0):", "  1 -> (qf; 0; N)"], MachineSyntaxError, "duplicate row"),
		({}, ["on (q0; 0,1):", "  1 -> (qf; 0; N)"], MachineSyntaxError, "expected 1"),
		({"roles input=1 output=1": "roles input=1 output=2"}, [], RoleError, "outside tapes"),
		({"roles input=1 output=1": "roles input=1 output=1 input=1"}, [], RoleError, "declared twice"),
		({"roles input=1 output=1": "roles output=1"}, [], RoleError, "must be declared"),
	],
)
def test_parse_errors(replace, extra, error, match):
	with pytest.raises(error, match=match):
		parse_machine(flip(replace=replace, extra=extra))


def test_syntax_error_position():
	text = flip(replace={"tapes 1": "frobnicate 1"})
	with pytest.raises(MachineSyntaxError) as excinfo:
		parse_machine(text)
	assert excinfo.value.line == 2
	assert excinfo.value.column == 1
	assert "line 2, column 1" in str(excinfo.value)


def test_oracle_declarations():
	lines = [
		"qtm o",
		"tapes 2",
		"tape 1 input {0,1} work {}",
		"tape 2 input {} work {0,1}",
		"roles input=1 output=1 query=2",
		"states q0 qp qa qf",
		"initial q0",
		"final qf",
		"oracle qp qa",
		"on (qp; *,*):",
		"  1 -> (qf; *,*; N N)",
	]
	# Objective: Verify that the pre-query state cannot carry rows of its own.
	with pytest.raises(MachineSyntaxError, match="pre-query"):
		parse_machine("\n".join(lines))

	# Objective: Verify that an oracle machine must declare a query tape.
	with pytest.raises(RoleError, match="query tape"):
		parse_machine("\n".join(lines[:4] + ["roles input=1 output=1"] + lines[5:9]))

	# Objective: Verify that the query tape cannot double as the input tape.
	with pytest.raises(RoleError, match="distinct"):
		parse_machine("\n".join(lines[:4] + ["roles input=1 output=1 query=1"] + lines[5:9]))


def test_completion_rejects_defective_rows():
	# Objective: Verify that the complete directive refuses rows that are already not orthonormal.
	with pytest.raises(RowDefectError, match="unit-length"):
		parse_machine(flip(replace={"  1 -> (qf; 1; N)": "  2 -> (qf; 1; N)"}))


def test_invalid_mode():
	with pytest.raises(ValueError, match="Invalid mode"):
		parse_machine(flip(), mode="fast")


@pytest.mark.parametrize("fixture", ["had.qtm", "hh.qtm", "one.qtm", "q1.qtm", "adaptive.qtm", "qma_hadamard.qtm"])
def test_format_machine(fixture):
	# Objective: Verify that a printed machine parses back to the same transition table.
	machine = load_machine(fixture)
	reparsed = parse_machine(format_machine(machine))
	assert reparsed.delta == machine.delta
	assert reparsed.states == machine.states
	assert reparsed.finals == machine.finals
	assert reparsed.roles == machine.roles
	assert reparsed.oracle_states == machine.oracle_states


def test_format_machine_cancelled_row():
	# Objective: Verify that a row whose entries cancelled survives printing and parsing as a row without entries.
	machine = load_machine("had.qtm")
	cancelled = machine.with_changes(delta={**machine.delta, ("qf", ("0",)): ()})
	text = format_machine(cancelled)
	assert "on (qf; 0):\n  0 -> (qf; 0; N)\n" in text

	reparsed = parse_machine(text)
	assert reparsed.delta[("qf", ("0",))] == ()
	assert reparsed.delta == cancelled.delta


def test_build_machine():
	machine = build_machine(
		"flip",
		[{"0", "1"}],
		["q0", "qf"],
		"q0",
		["qf"],
		{("q0", ("0",)): [(Scalar(1), "qf", ("1",), "N")], ("q0", ("1",)): [(Scalar(1), "qf", ("0",), "N")]},
		TapeRoles(0, 0),
		complete=True,
	)
	assert machine.delta == parse_machine(flip()).delta
	assert machine.input_alphabets == (frozenset({"0", "1"}),)

	# Objective: Verify that entries sharing a target are merged and cancelled entries disappear.
	merged = build_machine(
		"merge",
		[{"0", "1"}],
		["q0", "qf"],
		"q0",
		["qf"],
		{("q0", ("0",)): [(Scalar(1), "qf", ("1",), "N"), (Scalar(1), "qf", ("0",), "N"), (Scalar(-1), "qf", ("0",), "N")]},
		TapeRoles(0, 0),
		complete=True,
	)
	assert len(merged.delta[("q0", ("0",))]) == 1
