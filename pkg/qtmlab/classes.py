import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from qtmlab.qtmlab import QtmlabException
from .combinators import complement_machine, mixture_machine
from .machine import MachineSpec, RolePrereqError
from .scalar import EPS_AMP, Scalar
from .simulator import Configuration, RunResult, Superposition, TimingViolation, run, run_superposition


SHARP_QP = "#QP"
GAP_QP = "GapQP"
FEQP = "FEQP"
FBQP = "FBQP"
QMASV = "QMASV-verifier"
CLASS_TAGS = (SHARP_QP, GAP_QP, FEQP, FBQP, QMASV)

EPS_CERT = 1 - 1e-9
FBQP_BAR = Fraction(3, 4)
MAX_WITNESS_DIM = 64
POWER_TOL = 1e-8


class CertaintyViolation(QtmlabException):
	def __init__(self, message, modal_prob=None):
		self.modal_prob = modal_prob
		super().__init__(message)


class BiasTooLow(QtmlabException):
	pass


class DimensionError(QtmlabException):
	pass


@dataclass(frozen=True)
class FunctionWitness:
	"""
	A machine together with the function class it witnesses.

	Parameters
	----------
	machine : MachineSpec
		The machine.
	class_tag : str
		One of ``CLASS_TAGS``.
	params : dict
		Class-specific parameters: ``oracle`` for runs relative to an oracle, ``p`` for the witness width of a
		verifier, ``source`` for the machine file the witness was loaded from.
	"""

	machine: MachineSpec
	class_tag: str
	params: dict = field(default_factory=dict)

	def __post_init__(self):
		if self.class_tag not in CLASS_TAGS:
			raise ValueError(f"Invalid class_tag. Expected one of {', '.join(CLASS_TAGS)}.")

	def run(self, x: str, max_steps: int = 10000) -> RunResult:
		return run(self.machine, x, max_steps, oracle=self.params.get("oracle"))

	def to_report(self) -> dict:
		params = {k: v for k, v in self.params.items() if k != "oracle"}
		if "oracle" in self.params:
			params["oracle"] = self.params["oracle"].name
		return {"machine": self.params.get("source", self.machine.name), "class": self.class_tag, "params": params}


def eval_sharpqp(w: FunctionWitness, x: str, max_steps: int = 10000) -> float:
	"""
	Acceptance probability of the witnessed machine on ``x``.

	Example
	-------
	>>> eval_sharpqp(FunctionWitness(had, SHARP_QP), "0")
	0.5
	"""
	return w.run(x, max_steps).accept_prob


def eval_gapqp(w: FunctionWitness, x: str, max_steps: int = 10000) -> float:
	return 2 * w.run(x, max_steps).accept_prob - 1


def _modal(outputs: dict) -> tuple:
	best = max(float(p) for p in outputs.values())
	output = min(o for o, p in outputs.items() if float(p) >= best - EPS_AMP)
	return output, outputs[output]


def eval_feqp(w: FunctionWitness, x: str, max_steps: int = 10000) -> str:
	"""
	The output the machine produces with certainty: probability exactly 1 in exact mode, at least ``EPS_CERT``
	otherwise. Raises CertaintyViolation with the modal probability.
	"""
	result = w.run(x, max_steps)
	output, probability = _modal(result.outputs)
	certain = probability == 1 if probability.is_exact else float(probability) >= EPS_CERT
	if not certain:
		raise CertaintyViolation(f"{w.machine.name} on {x!r}: modal output {output!r} has probability {float(probability):.12g}", float(probability))
	return output


def eval_fbqp(w: FunctionWitness, x: str, max_steps: int = 10000) -> tuple:
	"""
	The modal output and its probability; ties go to the lexicographically smallest output.

	Example
	-------
	>>> eval_fbqp(FunctionWitness(had, FBQP), "0")
	('0', 0.5)
	"""
	output, probability = _modal(w.run(x, max_steps).outputs)
	return output, float(probability)


def majority_tail(s, q: int) -> Fraction:
	"""
	Exact probability that the majority of 6q + 1 independent runs succeeds when each run succeeds with probability s.

	Example
	-------
	>>> float(majority_tail(Fraction(3, 4), 1))
	0.929443359375
	"""
	if q < 1:
		raise ValueError("Invalid q. Expected a positive integer.")
	s = s if isinstance(s, Fraction) else Fraction(s).limit_denominator(10**12)
	if not 0 <= s <= 1:
		raise ValueError("Invalid s. Expected a probability.")
	runs = 6 * q + 1
	return sum(math.comb(runs, j) * s**j * (1 - s) ** (runs - j) for j in range(runs // 2 + 1, runs + 1))


@dataclass(frozen=True)
class Amplification:
	output: str
	per_run: float
	probability: Fraction
	q: int

	@property
	def bound(self) -> float:
		return 1 - 2.0**-self.q

	@property
	def holds(self) -> bool:
		return self.probability >= 1 - Fraction(1, 2**self.q)

	def to_report(self) -> dict:
		return {"output": self.output, "per_run": self.per_run, "probability": float(self.probability), "bound": self.bound, "holds": self.holds, "q": self.q}


def amplify(w: FunctionWitness, q: int, x: str, max_steps: int = 10000) -> Amplification:
	"""
	Majority vote over 6q + 1 runs of a single-bit machine, evaluated as an exact binomial tail of the measured
	per-run success probability. Raises BiasTooLow below 3/4.
	"""
	result = w.run(x, max_steps)
	accept, reject = result.accept, result.reject
	output, per_run = ("1", accept) if float(accept) >= float(reject) else ("0", reject)
	exact = per_run.surd.a if per_run.is_exact and per_run.surd.b == 0 else per_run.real
	if float(per_run) < float(FBQP_BAR) - EPS_AMP:
		raise BiasTooLow(f"{w.machine.name} on {x!r} succeeds with probability {float(per_run):.12g} < 3/4")
	probability = majority_tail(exact, q)
	logging.info(f"Amplified {w.machine.name} on {x!r}: {float(probability):.12g} over {6 * q + 1} runs")
	return Amplification(output, float(per_run), probability, q)


def _witness_words(p: int) -> list:
	return [format(i, f"0{p}b") for i in range(2**p)]


def _witness_start(machine: MachineSpec, x: str, word: str) -> Configuration:
	return Configuration.initial(machine, x, {machine.roles.witness: tuple(word)})


def acceptance_form(v: FunctionWitness, x: str, p: int, max_steps: int = 10000) -> np.ndarray:
	"""
	Hermitian PSD matrix E with E[s, s'] = Σ_c conj(φ_s(c)) φ_s'(c) over accepting final configurations c, where φ_s
	is the final superposition on witness basis state s; <ψ|E|ψ> is the acceptance probability on witness ψ.
	"""
	machine = v.machine
	if machine.roles.witness is None:
		raise RolePrereqError(f"{machine.name} declares no witness tape")
	if p < 1 or 2**p > MAX_WITNESS_DIM:
		raise DimensionError(f"witness dimension 2^{p} outside 2..{MAX_WITNESS_DIM}")

	finals, times = [], set()
	for word in _witness_words(p):
		result = run_superposition(machine, Superposition.basis(_witness_start(machine, x, word), machine.exact), max_steps, v.params.get("oracle"))
		times.add(result.halt_time)
		finals.append({c: complex(a) for c, a in result.final.entries.items() if c.symbol(machine.roles.output, 0) == "1"})
	if len(times) != 1:
		raise TimingViolation(f"{machine.name} halts at times {sorted(times)} depending on the witness")

	size = len(finals)
	form = np.zeros((size, size), dtype=complex)
	for s in range(size):
		for t in range(s, size):
			value = sum(a.conjugate() * finals[t][c] for c, a in finals[s].items() if c in finals[t])
			form[s, t] = value
			form[t, s] = np.conj(value)
	return form


def power_iteration(matrix: np.ndarray, tol: float = POWER_TOL, max_iter: int = 100000) -> tuple:
	"""
	Top eigenpair of a Hermitian PSD matrix by power iteration on matrix + I.

	Returns
	-------
	tuple
		(eigenvalue, unit eigenvector)
	"""
	size = matrix.shape[0]
	shifted = matrix + np.eye(size)
	vector = np.linspace(1.0, 2.0, size).astype(complex)
	vector /= np.linalg.norm(vector)
	value = float(np.real(np.vdot(vector, matrix @ vector)))
	for _ in range(max_iter):
		vector = shifted @ vector
		vector /= np.linalg.norm(vector)
		image = matrix @ vector
		value = float(np.real(np.vdot(vector, image)))
		if np.linalg.norm(image - value * vector) < tol:
			break
	return value, vector


@dataclass(frozen=True)
class QmaOutcome:
	max_prob: float
	witness: tuple
	dense_max: float
	resimulated: float

	def to_report(self) -> dict:
		return {
			"max_prob": self.max_prob,
			"dense_max": self.dense_max,
			"resimulated": self.resimulated,
			"witness": [[a.real, a.imag] for a in self.witness],
		}


def qma_best_witness(v: FunctionWitness, x: str, p: int, max_steps: int = 10000, tol: float = POWER_TOL) -> QmaOutcome:
	"""
	Best acceptance probability of a verifier over all p-qubit witness states, i.e. the top eigenvalue of the
	acceptance form, with an optimal witness. The value is checked against a dense eigendecomposition and by
	re-simulating the verifier on the returned witness.

	Example
	-------
	>>> qma_best_witness(FunctionWitness(copy_verifier, QMASV), "0", 1).max_prob
	1.0
	"""
	form = acceptance_form(v, x, p, max_steps)
	value, vector = power_iteration(form, tol)
	dense = float(np.linalg.eigvalsh(form)[-1])

	machine = v.machine
	entries = {}
	for word, amplitude in zip(_witness_words(p), vector):
		if abs(amplitude) > EPS_AMP:
			entries[_witness_start(machine, x, word)] = Scalar(complex(amplitude))
	resimulated = run_superposition(machine, Superposition(entries), max_steps, v.params.get("oracle")).accept_prob

	logging.info(f"Best witness of {machine.name} on {x!r}: {value:.9f} (dense {dense:.9f})")
	return QmaOutcome(max_prob=value, witness=tuple(complex(a) for a in vector), dense_max=dense, resimulated=resimulated)


def gapqp_as_difference(w: FunctionWitness) -> tuple:
	"""
	Write a GapQP witness as a difference of two #QP witnesses: 2ρ_M - 1 = ρ_M - ρ_complement(M).
	"""
	g = FunctionWitness(w.machine, SHARP_QP, dict(w.params))
	h = FunctionWitness(complement_machine(w.machine), SHARP_QP, dict(w.params))
	return g, h


def difference_as_gapqp(g: FunctionWitness, h: FunctionWitness, inputs=None, pad=None) -> FunctionWitness:
	"""
	Write ρ_g - ρ_h as a GapQP witness through the mixture machine N, for which 2ρ_N - 1 = ρ_g - ρ_h.
	"""
	return FunctionWitness(mixture_machine(g.machine, h.machine, pad=pad, inputs=inputs), GAP_QP)
