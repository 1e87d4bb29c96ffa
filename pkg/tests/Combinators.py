import cmath
import math

import pytest
from fractions import Fraction

from qtmlab.combinators import (
	BudgetError,
	ConstructionError,
	SyncError,
	complement_machine,
	conjugate_machine,
	halting_offset,
	mixture_machine,
	pad_machine,
	seq_repeat,
)
from qtmlab.machine import load_machine, parse_machine
from qtmlab.scalar import Scalar
from qtmlab.simulator import run
from qtmlab.wellformed import check_well_formed

HAD = load_machine("had.qtm")
ONE = load_machine("one.qtm")
ZERO = load_machine("zero.qtm")
HH = load_machine("hh.qtm")


def test_conjugate():
	assert conjugate_machine(conjugate_machine(HAD)) == HAD
	assert conjugate_machine(HAD) == HAD

	phase = load_machine("phase.qtm")
	(amplitude,) = run(conjugate_machine(phase), "0").final.entries.values()
	assert complex(amplitude) == pytest.approx(cmath.exp(-1j * math.pi / 4))


@pytest.mark.parametrize("machine, x, accept", [(HAD, "0", Fraction(1, 2)), (ONE, "1", 0), (ZERO, "0", 1), (HH, "1", 0)])
def test_complement(machine, x, accept):
	complemented = complement_machine(machine)
	assert complemented.name == f"not-{machine.name}"
	assert check_well_formed(complemented).passed

	result = run(complemented, x)
	assert result.accept == Scalar(accept)
	assert result.halt_time == run(machine, x).halt_time + 1


def test_complement_checks_output_head():
	# Objective: Verify that a machine halting with its output head off cell 0 is not complemented.
	drifting = parse_machine(
		"\n".join(
			[
				"qtm drift",
				"tapes 1",
				"tape 1 input {0,1} work {}",
				"roles input=1 output=1",
				"states q0 qf",
				"initial q0",
				"final qf",
				"complete",
				"on (q0; 0):",
				"  1 -> (qf; 1; R)",
			]
		)
	)
	assert run(drifting, "0").accept == 1
	with pytest.raises(ConstructionError, match="output head on cell 1"):
		complement_machine(drifting)

	# Sample inputs on which the head comes back are accepted, and the complement then holds there.
	for x in ("0", "1"):
		assert run(complement_machine(HAD, inputs=[x]), x).accept + run(HAD, x).accept == 1


def test_pad_machine():
	assert pad_machine(HAD, 0) is HAD

	padded = pad_machine(HAD, 3)
	assert padded.name == "had+3"
	assert check_well_formed(padded).passed
	result = run(padded, "1")
	assert result.halt_time == 5
	assert result.accept == Scalar(Fraction(1, 2))

	with pytest.raises(ValueError, match="Invalid extra"):
		pad_machine(HAD, -1)


def test_halting_offset():
	assert halting_offset(ONE, complement_machine(HAD), ["0", "1"]) == 1
	assert halting_offset(HAD, HAD, ["0", "01"]) == 0

	# Objective: Verify that machines whose halting times drift apart cannot be synchronised.
	with pytest.raises(SyncError):
		halting_offset(HAD, HH, ["0", "01"])


@pytest.mark.parametrize(
	"g, h, accept",
	[
		(ONE, ZERO, Fraction(1)),
		(ZERO, ONE, Fraction(0)),
		(HAD, HAD, Fraction(1, 2)),
		(ONE, HAD, Fraction(3, 4)),
		(HH, ONE, Fraction(0)),
	],
)
def test_mixture(g, h, accept):
	# Objective: Verify that the mixture machine accepts with probability rho_g / 2 + (1 - rho_h) / 2.
	mixture = mixture_machine(g, h)
	assert mixture.name == f"mix-{g.name}-{h.name}"
	assert check_well_formed(mixture).passed
	assert run(mixture, "0").accept == Scalar(accept)


def test_mixture_errors():
	with pytest.raises(ValueError, match="Invalid pad"):
		mixture_machine(ONE, HAD, pad=(-1, 0))

	# Objective: Verify that oracle machines and machines with different tapes are not composed.
	with pytest.raises(ConstructionError, match="oracle"):
		mixture_machine(load_machine("q1.qtm"), load_machine("q1.qtm"))
	with pytest.raises(ConstructionError, match="same tapes"):
		mixture_machine(HAD, seq_repeat(HAD, 2))


@pytest.mark.parametrize("machine, m, accept", [(HAD, 1, Fraction(1, 2)), (HAD, 2, Fraction(1, 4)), (HAD, 3, Fraction(1, 8)), (ONE, 2, 1), (ZERO, 2, 0)])
def test_seq_repeat(machine, m, accept):
	repeated = seq_repeat(machine, m)
	assert repeated.name == f"{machine.name}^{m}"
	assert repeated.tape_count == m * machine.tape_count + 1
	assert run(repeated, "1").accept == Scalar(accept)


def test_seq_repeat_errors():
	with pytest.raises(ValueError, match="Invalid m"):
		seq_repeat(HAD, 0)

	with pytest.raises(BudgetError):
		seq_repeat(HAD, 5)

	with pytest.raises(ConstructionError, match="single final state"):
		seq_repeat(mixture_machine(ONE, ZERO), 2)
