from qtmlab import CaseResult, Suite
from qtmlab.combinators import complement_machine, seq_repeat
from qtmlab.constructions import gap_square
from qtmlab.machine import load_machine
from qtmlab.simulator import run


FIXTURES = ("had.qtm", "one.qtm", "zero.qtm", "hh.qtm", "phase.qtm", "q1.qtm", "q2.qtm")
INPUTS = ("0", "1")


class GapSquaring(Suite):
	"""
	Forward run, phase flip on output 0, inverse run: the amplitude of the initial configuration equals 2ρ - 1 and
	its squared magnitude (2ρ - 1)^2. Exact machines must match exactly.
	"""

	name = "gap-squaring"
	lemma = "gap-squaring"

	def machines(self) -> list:
		machines = [load_machine(name) for name in FIXTURES]
		had = machines[0]
		quarter = seq_repeat(had, 2)
		return machines + [complement_machine(had), quarter, complement_machine(quarter)]

	def _cases(self):
		for machine in self.machines():
			for x in INPUTS:
				result = run(machine, x, self.max_steps)
				square = gap_square(machine, x, self.max_steps)
				gap = 2 * result.accept_prob - 1
				label = f"{machine.name}({x})"

				if machine.exact:
					holds = square.gap_amplitude.is_exact and square.gap_amplitude == result.accept * 2 - 1
					yield CaseResult.claim(f"{label}: amplitude is exactly 2ρ - 1", self.lemma, holds, detail=square.gap_amplitude.to_literal())
				else:
					yield CaseResult.compare(f"{label}: amplitude equals 2ρ - 1", self.lemma, abs(complex(square.gap_amplitude) - gap), 0.0, relation="le")
				yield CaseResult.compare(f"{label}: squared probability is (2ρ - 1)^2", "squared-function", square.squared_prob, gap**2)
