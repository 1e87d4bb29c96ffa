from fractions import Fraction

from qtmlab import CaseResult, Suite
from qtmlab.classes import FBQP, BiasTooLow, FunctionWitness, amplify, majority_tail
from qtmlab.combinators import complement_machine, seq_repeat
from qtmlab.machine import load_machine


BIASES = (Fraction(3, 4), Fraction(4, 5), Fraction(7, 8), Fraction(1))
ROUNDS = (1, 2, 3, 4)


class Amplify(Suite):
	"""
	Majority vote over 6q + 1 runs: the exact binomial tail reaches 1 - 2^-q whenever one run succeeds with
	probability at least 3/4, both for bare biases and for machines measured by simulation.
	"""

	name = "amplify"
	lemma = "majority-amplification"

	def _cases(self):
		for s in BIASES:
			for q in ROUNDS:
				tail = majority_tail(s, q)
				yield CaseResult.compare(f"s={s}, q={q}: tail ≥ 1 - 2^-q", self.lemma, tail, 1 - 2.0**-q, 0.0, "ge")

		yield CaseResult.compare("s=3/4, q=1: exact tail over 7 runs", self.lemma, majority_tail(Fraction(3, 4), 1), 0.929443359375, 0.0)

		had = load_machine("had.qtm")
		three_quarters = complement_machine(seq_repeat(had, 2))
		for machine in (three_quarters, load_machine("one.qtm"), load_machine("zero.qtm")):
			witness = FunctionWitness(machine, FBQP)
			for q in ROUNDS:
				result = amplify(witness, q, "0", self.max_steps)
				yield CaseResult.claim(f"{machine.name}, q={q}: majority output {result.output} meets 1 - 2^-q", self.lemma, result.holds, detail=f"{float(result.probability):.12g}")

		try:
			amplify(FunctionWitness(had, FBQP), 1, "0", self.max_steps)
			raised = False
		except BiasTooLow:
			raised = True
		yield CaseResult.claim("had: success 1/2 is below 3/4", self.lemma, raised)
