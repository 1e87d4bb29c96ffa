import pytest

from qtmlab.machine import Transition, load_machine, parse_machine
from qtmlab.scalar import Scalar
from qtmlab.wellformed import (
	NotUnidirectionalError,
	check_well_formed,
	complete_unidirectional,
	direction_map,
	is_unidirectional,
)

FIXTURES = [
	"had.qtm",
	"one.qtm",
	"zero.qtm",
	"hh.qtm",
	"timing.qtm",
	"phase.qtm",
	"q1.qtm",
	"q2.qtm",
	"adaptive.qtm",
	"qma_copy.qtm",
	"qma_hadamard.qtm",
	"qma_coin.qtm",
	"qma_reject.qtm",
	"qma_rotate.qtm",
	"qma_tilt.qtm",
	"qma_tilt_phase.qtm",
	"qma_lean.qtm",
	"qma_controlled.qtm",
	"qma_and.qtm",
]

HEADER = [
	"tapes 1",
	"tape 1 input {0,1} work {}",
	"roles input=1 output=1",
	"states q0 qf",
	"initial q0",
	"final qf",
]

# Moves right on 0 and left on 1 into the same state: rows are orthonormal but not separable.
SKEW = "\n".join(
	["qtm skew"]
	+ HEADER
	+ [
		"on (q0; 0):",
		"  1 -> (qf; 0; R)",
		"on (q0; 1):",
		"  1 -> (qf; 1; L)",
		"on (q0; #):",
		"  1 -> (qf; #; N)",
		"on (qf; *):",
		"  1 -> (q0; *; N)",
	]
)


@pytest.mark.parametrize("fixture", FIXTURES)
def test_fixtures_are_well_formed(fixture):
	report = check_well_formed(load_machine(fixture))
	assert report.passed, report.to_report()


def test_unit_length_violation():
	had = load_machine("had.qtm")
	key = ("q0", ("0",))
	first, second = had.delta[key]
	scaled = Transition(first.amplitude * 2, first.state, first.write, first.move)
	report = check_well_formed(had.with_changes(delta={**had.delta, key: (scaled, second)}))

	assert not report.passed
	assert [v.witness for v in report.of("unit-length")] == [key]
	assert report.of("unit-length")[0].residual == pytest.approx(1.5)


def test_orthogonality_violation():
	had = load_machine("had.qtm")
	delta = {**had.delta, ("q0", ("1",)): had.delta[("q0", ("0",))]}
	report = check_well_formed(had.with_changes(delta=delta))

	assert not report.of("unit-length")
	assert report.of("orthogonality")
	assert report.of("orthogonality")[0].witness == (("q0", ("0",)), ("q0", ("1",)))
	assert report.to_report()["passed"] is False


def test_separability_violation():
	skew = parse_machine(SKEW)
	report = check_well_formed(skew)

	assert not report.of("unit-length")
	assert not report.of("orthogonality")
	assert report.of("separability")

	# Objective: Verify that a state entered with two different head directions is not unidirectional.
	assert not is_unidirectional(skew)
	with pytest.raises(NotUnidirectionalError, match="qf"):
		direction_map(skew)


def test_direction_map():
	directions = direction_map(load_machine("had.qtm"))
	assert directions == {"q0": (1,), "qf": (-1,)}
	assert is_unidirectional(load_machine("q1.qtm"))


def test_completion():
	had = load_machine("had.qtm")
	assert complete_unidirectional(had) is had

	partial = had.with_changes(delta={k: v for k, v in had.delta.items() if k[0] != "qf"})
	completed = complete_unidirectional(partial)
	assert set(completed.delta) == set(had.delta)
	assert check_well_formed(completed).passed

	# Objective: Verify that completed rows enter each state with that state's direction.
	for transitions in completed.delta.values():
		for t in transitions:
			assert t.move == direction_map(had)[t.state]


@pytest.mark.parametrize("fixture", ["one.qtm", "zero.qtm", "hh.qtm"])
def test_completion_keeps_initial_state_free(fixture):
	# Objective: Verify that only final-state rows of a completed machine lead back into the initial state.
	machine = load_machine(fixture)
	assert all(state in machine.finals for state, _, _ in machine.arrivals[machine.initial])


def test_completion_stays_in_field():
	text = "\n".join(
		["qtm adm"]
		+ HEADER
		+ [
			"complete",
			"on (q0; 0):",
			"  1/2 -> (qf; #; N)",
			"  1/2 -> (qf; 0; N)",
			"  1 rt2^-1 -> (qf; 1; N)",
		]
	)
	# Objective: Verify that an exact completion stays inside Q(sqrt 2) where Gram-Schmidt on basis vectors needs sqrt(3/4).
	completed = parse_machine(text)
	assert completed.exact
	assert check_well_formed(completed).passed
	assert all(t.amplitude.is_exact for transitions in completed.delta.values() for t in transitions)

	approx = parse_machine(text, mode="approx")
	assert check_well_formed(approx).passed
	assert approx.delta[("q0", ("0",))][0].amplitude == Scalar(0.5)


def test_completion_of_four_way_split():
	text = "\n".join(
		[
			"qtm split",
			"tapes 1",
			"tape 1 input {0,1} work {}",
			"roles input=1 output=1",
			"states q0 a qf",
			"initial q0",
			"final qf",
			"complete",
			"on (q0; 0):",
			"  1/2 -> (qf; #; N)",
			"  1/2 -> (qf; 0; N)",
			"  -1/2 -> (qf; 1; N)",
			"  1/2 -> (a; 0; N)",
		]
	)
	# Objective: Verify that a row spreading 1/2 over four coordinates is completed exactly, the pattern of branch splits.
	completed = parse_machine(text)
	assert set(completed.delta) == set(completed.row_keys())
	assert check_well_formed(completed).passed
	assert all(t.amplitude.is_exact for transitions in completed.delta.values() for t in transitions)

	# The three completed rows sharing the block of the split are orthogonal to it.
	block = {("qf", ("#",)), ("qf", ("0",)), ("qf", ("1",)), ("a", ("0",))}
	targets = {key: {(t.state, t.write) for t in transitions} for key, transitions in completed.delta.items()}
	sharing = [key for key, target in targets.items() if key != ("q0", ("0",)) and target & block]
	assert len(sharing) == 3
