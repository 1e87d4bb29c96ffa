import itertools

from qtmlab import CaseResult, Suite
from qtmlab.classes import GAP_QP, SHARP_QP, FunctionWitness, difference_as_gapqp, eval_gapqp, eval_sharpqp, gapqp_as_difference
from qtmlab.combinators import seq_repeat
from qtmlab.machine import load_machine
from qtmlab.simulator import run


FIXTURES = ("had.qtm", "one.qtm", "zero.qtm", "hh.qtm")
INPUTS = ("0", "1")
REPEATS = (1, 2, 3)


class Closure(Suite):
	"""
	Closure of the acceptance-probability classes: the mixture machine N of g and h satisfies
	2ρ_N - 1 = ρ_g - ρ_h, a GapQP witness splits into two #QP witnesses, and m sequential copies accept with
	probability ρ^m.
	"""

	name = "closure"

	def _cases(self):
		machines = [load_machine(name) for name in FIXTURES]

		for g, h in itertools.product(machines, repeat=2):
			mixed = difference_as_gapqp(FunctionWitness(g, SHARP_QP), FunctionWitness(h, SHARP_QP), inputs=INPUTS)
			for x in INPUTS:
				target = run(g, x, self.max_steps).accept_prob - run(h, x, self.max_steps).accept_prob
				yield CaseResult.compare(f"mix({g.name}, {h.name})({x}): 2ρ_N - 1 = ρ_g - ρ_h", "gap-characterization", eval_gapqp(mixed, x, self.max_steps), target)

		for machine in machines:
			positive, negative = gapqp_as_difference(FunctionWitness(machine, GAP_QP))
			for x in INPUTS:
				difference = eval_sharpqp(positive, x, self.max_steps) - eval_sharpqp(negative, x, self.max_steps)
				yield CaseResult.compare(f"{machine.name}({x}): 2ρ - 1 = ρ - ρ_complement", "gap-characterization", difference, 2 * run(machine, x, self.max_steps).accept_prob - 1)

		for machine in machines:
			for m in REPEATS:
				repeated = seq_repeat(machine, m)
				for x in INPUTS:
					rho = run(machine, x, self.max_steps).accept_prob
					yield CaseResult.compare(f"{repeated.name}({x}): ρ^m", "sequential-repetition", run(repeated, x, self.max_steps).accept_prob, rho**m)
