import math

from qtmlab import CaseResult, Suite
from qtmlab.classes import QMASV, DimensionError, FunctionWitness, acceptance_form, qma_best_witness
from qtmlab.machine import load_machine


# fixture -> (best acceptance probability, witness sizes p)
VERIFIERS = {
	"qma_copy.qtm": (1.0, (1, 2, 3, 6)),
	"qma_hadamard.qtm": (1.0, (1, 2, 3)),
	"qma_coin.qtm": (0.5, (1, 2, 3)),
	"qma_reject.qtm": (0.0, (1, 2)),
	"qma_rotate.qtm": (1.0, (1, 2)),
	"qma_tilt.qtm": (0.5 + math.sqrt(3) / 4, (1, 2, 3)),
	"qma_tilt_phase.qtm": (0.5 + math.sqrt(3) / 4, (1, 2)),
	"qma_lean.qtm": (0.5 + math.sqrt(2) / 4, (1, 2)),
	"qma_controlled.qtm": (0.5 + math.sqrt(2) / 4, (2, 3)),
	"qma_and.qtm": (1.0, (2, 3)),
}


class QMA(Suite):
	"""
	Best-witness search: power iteration on the acceptance form agrees with a dense eigendecomposition, and
	re-simulating the verifier on the returned witness reproduces the maximum.
	"""

	name = "qma"
	lemma = "best-witness"

	def _cases(self):
		for fixture, (best, sizes) in VERIFIERS.items():
			for p in sizes:
				verifier = FunctionWitness(load_machine(fixture), QMASV, {"p": p, "source": fixture})
				outcome = qma_best_witness(verifier, "0", p, self.max_steps)
				label = f"{verifier.machine.name}, p={p}"
				yield CaseResult.compare(f"{label}: power iteration matches eigvalsh", self.lemma, outcome.max_prob, outcome.dense_max, 1e-8)
				yield CaseResult.compare(f"{label}: witness re-simulates to the maximum", self.lemma, outcome.resimulated, outcome.max_prob, 1e-6)
				yield CaseResult.compare(f"{label}: maximum is {best:.9g}", self.lemma, outcome.dense_max, best, 1e-9)

		try:
			acceptance_form(FunctionWitness(load_machine("qma_copy.qtm"), QMASV), "0", 7, self.max_steps)
			raised = False
		except DimensionError:
			raised = True
		yield CaseResult.claim("p=7 exceeds the witness dimension cap", self.lemma, raised)
