import math

from qtmlab import CaseResult, Suite
from qtmlab.combinators import complement_machine, seq_repeat
from qtmlab.constructions import amplitude_estimate, ancilla_width, estimation_bound
from qtmlab.machine import load_machine


PRECISIONS = (1, 2, 4, 8)
SUCCESS_FLOOR = 8 / math.pi**2


class Estimation(Suite):
	"""
	Amplitude estimation with k = ceil(log2 p) + 3 ancilla qubits and accuracy 1/(4p) on machines with
	ρ in {0, 1/4, 1/2, 3/4, 1}. The outcome distribution is computed exactly, so the success probability is compared
	with 8/π² without sampling.

	Example
	-------
	>>> from qtmlab.suites import Estimation
	>>> [c.id for c in Estimation().run().cases][1]
	'ρ=0, k=3: success_prob ≥ 8/π²'
	"""

	name = "estimation"
	lemma = "amplitude-estimation"

	def machines(self) -> list:
		had, one, zero = (load_machine(name) for name in ("had.qtm", "one.qtm", "zero.qtm"))
		quarter = seq_repeat(had, 2)
		return [("0", zero), ("1/4", quarter), ("1/2", had), ("3/4", complement_machine(quarter)), ("1", one)]

	def _cases(self):
		for label, machine in self.machines():
			for p in PRECISIONS:
				k = ancilla_width(p)
				outcome = amplitude_estimate(machine, "0", k, 1 / (4 * p), max_steps=self.max_steps)
				prefix = f"ρ={label}, k={k}"

				yield CaseResult.compare(f"{prefix}: distribution sums to 1", self.lemma, outcome.total(), 1.0)
				yield CaseResult.compare(f"{prefix}: success_prob ≥ 8/π²", self.lemma, outcome.success_prob, SUCCESS_FLOOR, relation="ge")

				bound = estimation_bound(outcome.rho, k)
				for l, error in zip(outcome.grid_points(), outcome.adjacent_errors()):
					yield CaseResult.compare(
						f"{prefix}: grid point {l} is within the estimation bound",
						"estimation-grid",
						error,
						bound,
						1e-12,
						"le",
						detail=f"quadratic term π²/4^k = {math.pi**2 / 4**k:.12g}",
					)

				if label in ("0", "1"):
					expected = 0 if label == "0" else 2 ** (k - 1)
					yield CaseResult.compare(f"{prefix}: outcome {expected} is certain", self.lemma, outcome.distribution[expected], 1.0)
