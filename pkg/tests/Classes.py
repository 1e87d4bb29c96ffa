import math

import numpy as np
import pytest
from fractions import Fraction

from qtmlab.classes import (
	FBQP,
	FEQP,
	GAP_QP,
	QMASV,
	SHARP_QP,
	BiasTooLow,
	CertaintyViolation,
	DimensionError,
	FunctionWitness,
	acceptance_form,
	amplify,
	difference_as_gapqp,
	eval_fbqp,
	eval_feqp,
	eval_gapqp,
	eval_sharpqp,
	gapqp_as_difference,
	majority_tail,
	power_iteration,
	qma_best_witness,
)
from qtmlab.combinators import complement_machine, mixture_machine, seq_repeat
from qtmlab.machine import RolePrereqError, load_machine
from qtmlab.oracle import Oracle

HAD = load_machine("had.qtm")
ONE = load_machine("one.qtm")
ZERO = load_machine("zero.qtm")
THREE_QUARTERS = complement_machine(seq_repeat(HAD, 2))


def test_function_witness():
	w = FunctionWitness(HAD, SHARP_QP)
	assert w.to_report() == {"machine": "had", "class": "#QP", "params": {}}

	q1 = FunctionWitness(load_machine("q1.qtm"), SHARP_QP, {"oracle": Oracle.from_words(["0"], "zero"), "source": "q1.qtm"})
	assert q1.to_report() == {"machine": "q1.qtm", "class": "#QP", "params": {"source": "q1.qtm", "oracle": "zero"}}
	assert eval_sharpqp(q1, "0") == 1.0

	# Objective: Verify that the class raises a ValueError for an unknown class tag.
	with pytest.raises(ValueError, match="Invalid class_tag"):
		FunctionWitness(HAD, "BQP")


@pytest.mark.parametrize("machine, sharp, gap", [(HAD, 0.5, 0.0), (ONE, 1.0, 1.0), (ZERO, 0.0, -1.0), (THREE_QUARTERS, 0.75, 0.5)])
def test_counting_functions(machine, sharp, gap):
	assert eval_sharpqp(FunctionWitness(machine, SHARP_QP), "0") == pytest.approx(sharp)
	assert eval_gapqp(FunctionWitness(machine, GAP_QP), "0") == pytest.approx(gap)


def test_eval_feqp():
	assert eval_feqp(FunctionWitness(ONE, FEQP), "0") == "1"
	assert eval_feqp(FunctionWitness(ZERO, FEQP), "1") == "0"

	# Objective: Verify that an output that is only likely is rejected together with its probability.
	with pytest.raises(CertaintyViolation) as excinfo:
		eval_feqp(FunctionWitness(HAD, FEQP), "0")
	assert excinfo.value.modal_prob == 0.5
	assert "'0'" in str(excinfo.value)


def test_eval_fbqp():
	# Ties go to the smaller output.
	assert eval_fbqp(FunctionWitness(HAD, FBQP), "0") == ("0", 0.5)
	assert eval_fbqp(FunctionWitness(ONE, FBQP), "1") == ("1", 1.0)

	# Objective: Verify that a 3/4-biased mixture of ONE and the complement of HAD reports its majority output.
	assert eval_fbqp(FunctionWitness(mixture_machine(ONE, HAD), FBQP), "0") == ("1", 0.75)


@pytest.mark.parametrize(
	"s, q, tail",
	[
		(Fraction(3, 4), 1, Fraction(3807, 4096)),
		(Fraction(1, 2), 1, Fraction(1, 2)),
		(Fraction(1), 3, Fraction(1)),
		(Fraction(0), 2, Fraction(0)),
		(0.75, 1, Fraction(3807, 4096)),
	],
)
def test_majority_tail(s, q, tail):
	assert majority_tail(s, q) == tail


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_majority_tail_bound(q):
	# Objective: Verify that 6q + 1 runs at bias 3/4 reach success probability 1 - 2^-q.
	assert majority_tail(Fraction(3, 4), q) >= 1 - Fraction(1, 2**q)


@pytest.mark.parametrize("s, q, match", [(Fraction(3, 4), 0, "Invalid q"), (1.5, 1, "Invalid s"), (-0.25, 1, "Invalid s")])
def test_majority_tail_invalid(s, q, match):
	with pytest.raises(ValueError, match=match):
		majority_tail(s, q)


@pytest.mark.parametrize("machine, output, per_run", [(ONE, "1", 1.0), (ZERO, "0", 1.0), (THREE_QUARTERS, "1", 0.75)])
def test_amplify(machine, output, per_run):
	amplification = amplify(FunctionWitness(machine, FBQP), 2, "0")
	assert amplification.output == output
	assert amplification.per_run == pytest.approx(per_run)
	assert amplification.probability == majority_tail(Fraction(per_run), 2)
	assert amplification.bound == 0.75
	assert amplification.holds
	assert amplification.to_report()["q"] == 2


def test_amplify_rejects_low_bias():
	with pytest.raises(BiasTooLow, match="3/4"):
		amplify(FunctionWitness(HAD, FBQP), 1, "0")


def test_acceptance_form():
	copy = FunctionWitness(load_machine("qma_copy.qtm"), QMASV)
	assert np.allclose(acceptance_form(copy, "0", 1), np.diag([0, 1]))
	assert np.allclose(acceptance_form(copy, "1", 2), np.diag([0, 0, 1, 1]))

	hadamard = FunctionWitness(load_machine("qma_hadamard.qtm"), QMASV)
	assert np.allclose(acceptance_form(hadamard, "0", 1), np.full((2, 2), 0.5))

	coin = FunctionWitness(load_machine("qma_coin.qtm"), QMASV)
	assert np.allclose(acceptance_form(coin, "0", 2), np.eye(4) / 2)

	# Objective: Verify that overlapping accepting branches give off-diagonal entries, complex after a phase.
	tilt = FunctionWitness(load_machine("qma_tilt.qtm"), QMASV)
	off = math.sqrt(2) / 4
	assert np.allclose(acceptance_form(tilt, "0", 1), [[0.75, off], [off, 0.25]])
	tilt_phase = FunctionWitness(load_machine("qma_tilt_phase.qtm"), QMASV)
	assert np.allclose(acceptance_form(tilt_phase, "0", 1), [[0.75, (1 + 1j) / 4], [(1 - 1j) / 4, 0.25]])

	controlled = FunctionWitness(load_machine("qma_controlled.qtm"), QMASV)
	expected = np.zeros((4, 4))
	expected[:2, :2] = [[0.5, off], [off, 0.5]]
	expected[2:, 2:] = np.eye(2) / 2
	assert np.allclose(acceptance_form(controlled, "1", 2), expected)


def test_acceptance_form_errors():
	copy = FunctionWitness(load_machine("qma_copy.qtm"), QMASV)
	with pytest.raises(DimensionError):
		acceptance_form(copy, "0", 7)
	with pytest.raises(DimensionError):
		acceptance_form(copy, "0", 0)

	# Objective: Verify that a machine without a witness tape has no acceptance form.
	with pytest.raises(RolePrereqError, match="witness"):
		acceptance_form(FunctionWitness(HAD, QMASV), "0", 1)


def test_power_iteration():
	matrix = np.array([[2.0, 1.0], [1.0, 2.0]], dtype=complex)
	value, vector = power_iteration(matrix)
	assert value == pytest.approx(3.0, abs=1e-6)
	assert np.abs(vector) == pytest.approx([math.sqrt(0.5)] * 2, abs=1e-6)


@pytest.mark.parametrize(
	"fixture, p, best",
	[
		("qma_copy.qtm", 1, 1.0),
		("qma_copy.qtm", 3, 1.0),
		("qma_hadamard.qtm", 1, 1.0),
		("qma_coin.qtm", 2, 0.5),
		("qma_reject.qtm", 1, 0.0),
		("qma_rotate.qtm", 1, 1.0),
		("qma_tilt.qtm", 1, 0.5 + math.sqrt(3) / 4),
		("qma_tilt_phase.qtm", 2, 0.5 + math.sqrt(3) / 4),
		("qma_lean.qtm", 1, 0.5 + math.sqrt(2) / 4),
		("qma_controlled.qtm", 2, 0.5 + math.sqrt(2) / 4),
		("qma_and.qtm", 3, 1.0),
	],
)
def test_qma_best_witness(fixture, p, best):
	outcome = qma_best_witness(FunctionWitness(load_machine(fixture), QMASV), "0", p)
	assert outcome.max_prob == pytest.approx(best, abs=1e-6)
	assert outcome.dense_max == pytest.approx(best, abs=1e-9)
	assert outcome.resimulated == pytest.approx(best, abs=1e-6)
	assert len(outcome.witness) == 2**p


def test_hadamard_verifier_prefers_plus():
	# Objective: Verify that the optimal witness of the Hadamard verifier is the uniform superposition.
	outcome = qma_best_witness(FunctionWitness(load_machine("qma_hadamard.qtm"), QMASV), "1", 1)
	assert np.abs(outcome.witness) == pytest.approx([math.sqrt(0.5)] * 2, abs=1e-4)
	assert len(outcome.to_report()["witness"]) == 2


@pytest.mark.parametrize("machine", [HAD, ONE, ZERO, THREE_QUARTERS])
def test_gapqp_as_difference(machine):
	g, h = gapqp_as_difference(FunctionWitness(machine, GAP_QP))
	assert g.class_tag == h.class_tag == SHARP_QP
	assert h.machine.name == f"not-{machine.name}"
	assert eval_sharpqp(g, "0") - eval_sharpqp(h, "0") == pytest.approx(eval_gapqp(FunctionWitness(machine, GAP_QP), "0"))


@pytest.mark.parametrize("g, h", [(ONE, HAD), (HAD, ONE), (ZERO, ZERO), (ONE, ZERO)])
def test_difference_as_gapqp(g, h):
	# Objective: Verify that the mixture witness has gap rho_g - rho_h.
	w = difference_as_gapqp(FunctionWitness(g, SHARP_QP), FunctionWitness(h, SHARP_QP))
	assert w.class_tag == GAP_QP
	expected = eval_sharpqp(FunctionWitness(g, SHARP_QP), "0") - eval_sharpqp(FunctionWitness(h, SHARP_QP), "0")
	assert eval_gapqp(w, "0") == pytest.approx(expected)
