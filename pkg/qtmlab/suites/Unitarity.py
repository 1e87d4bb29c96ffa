from qtmlab import CaseResult, Suite
from qtmlab.machine import load_machine
from qtmlab.scalar import EPS_AMP, EPS_NORM
from qtmlab.simulator import Configuration, TimingViolation, dense_run, reachable_configurations, run


FIXTURES = ("had.qtm", "one.qtm", "zero.qtm", "hh.qtm", "phase.qtm", "q1.qtm", "q2.qtm", "adaptive.qtm")
INPUTS = ("0", "1")
DENSE_LIMIT = 512


class Unitarity(Suite):
	"""
	Norm preservation of the sparse evolution, ρ + ρ̄ = 1, agreement with explicit matrix-vector evolution on small
	reachable sets, exact interference of the HH fixture and the timing check.
	"""

	name = "unitarity"
	lemma = "unitary-evolution"

	def _cases(self):
		for fixture in FIXTURES:
			machine = load_machine(fixture)
			for x in INPUTS:
				norms = []
				result = run(machine, x, self.max_steps, on_step=lambda psi: norms.append(psi.norm_sq()))
				label = f"{machine.name}({x})"

				if machine.exact:
					yield CaseResult.claim(f"{label}: norm is exactly 1 at every step", self.lemma, all(n == 1 for n in norms))
				else:
					drift = max(abs(float(n) - 1) for n in norms)
					yield CaseResult.compare(f"{label}: norm drift", self.lemma, drift, 0.0, EPS_NORM, "le")

				yield CaseResult.compare(f"{label}: ρ + ρ̄ = 1", self.lemma, result.accept_prob + result.reject_prob, 1.0)

				start = Configuration.initial(machine, x)
				size = len(reachable_configurations(machine, [start], result.halt_time))
				if size <= DENSE_LIMIT:
					dense = dense_run(machine, x, result.halt_time)
					sparse = {c: complex(a) for c, a in result.final.entries.items()}
					gap = max((abs(sparse.get(c, 0j) - dense.get(c, 0j)) for c in set(sparse) | set(dense)), default=0.0)
					yield CaseResult.compare(f"{label}: sparse evolution equals dense evolution", self.lemma, gap, 0.0, EPS_AMP, "le")

		hh = load_machine("hh.qtm")
		for x in INPUTS:
			result = run(hh, x, self.max_steps)
			yield CaseResult.claim(f"hh({x}): H·H interferes back to the input", "interference", result.accept == int(x))

		timing = load_machine("timing.qtm")
		try:
			run(timing, "0", self.max_steps)
			raised = False
		except TimingViolation:
			raised = True
		yield CaseResult.claim("timing(0): asynchronous halting is rejected", "synchronous-halting", raised)
