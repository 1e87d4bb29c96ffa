import itertools

from qtmlab import CaseResult, Suite
from qtmlab.combinators import complement_machine, mixture_machine, seq_repeat
from qtmlab.constructions import dj_machine, predicate_machine
from qtmlab.machine import BLANK, MachineSpec, Transition, load_machine
from qtmlab.simulator import Configuration, reachable_configurations, unitarity_defect
from qtmlab.wellformed import check_well_formed


FIXTURES = (
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
)


def seed_configurations(machine: MachineSpec) -> list:
	"""One configuration per (state, symbol vector): heads on cell 0 reading the vector, every other cell blank."""
	seeds = []
	for state, symbols in itertools.product(machine.states, machine.symbol_vectors):
		tapes = tuple(((0, s),) if s != BLANK else () for s in symbols)
		seeds.append(Configuration(state, (0,) * machine.tape_count, tapes))
	return seeds


def mutations(machine: MachineSpec) -> dict:
	"""
	Three defective variants of a machine: the first entry of the first row scaled by 2, the second row replaced by
	a copy of the first one, the first row emptied.
	"""
	keys = [key for key in machine.row_keys() if machine.delta.get(key)]
	first, second = keys[0], keys[1]

	scaled = dict(machine.delta)
	head = scaled[first][0]
	scaled[first] = (Transition(head.amplitude * 2, head.state, head.write, head.move),) + scaled[first][1:]

	duplicated = dict(machine.delta)
	duplicated[second] = machine.delta[first]

	dropped = dict(machine.delta)
	dropped[first] = ()

	return {
		"scaled": machine.with_changes(delta=scaled),
		"duplicated": machine.with_changes(delta=duplicated),
		"dropped": machine.with_changes(delta=dropped),
	}


class WellFormedness(Suite):
	"""
	Compare the local well-formedness conditions with explicit unitarity of the evolution operator.

	For every bundled fixture, a few constructed machines and three defective variants of each, the local check must
	agree with U†U = I on the configurations reachable within ``depth`` steps from one seed configuration per row.

	Parameters
	----------
	depth : int
		Number of evolution steps explored from the seeds. Default is 4.
	output_format : str
		The format of the dumped report. Default is "json".
	max_steps : int
		Step limit of the simulations. Default is 10000.

	Example
	-------
	>>> from qtmlab import Qtmlab
	>>> from qtmlab.suites import WellFormedness
	>>> Qtmlab([WellFormedness()], debug=False).start()[0].passed
	True
	"""

	name = "well-formedness"
	lemma = "well-formedness-conditions"

	def __init__(self, depth: int = 4, output_format="json", max_steps=10000):
		super().__init__(output_format, max_steps)
		if depth < 1:
			raise ValueError("Invalid depth. Expected a positive integer.")
		self.depth = depth

	def machines(self) -> list:
		machines = [load_machine(name) for name in FIXTURES]
		had, one = machines[0], machines[1]
		machines.extend(
			[
				complement_machine(had),
				seq_repeat(had, 2),
				mixture_machine(one, had, max_steps=self.max_steps),
				predicate_machine({"0", "2"}, 1),
				dj_machine(1),
			]
		)
		return machines

	def _agreement(self, machine: MachineSpec, variant: str, expected: bool) -> CaseResult:
		local = check_well_formed(machine).passed
		configurations = reachable_configurations(machine, seed_configurations(machine), self.depth)
		defect = unitarity_defect(machine, configurations)
		unitary = defect <= 1e-9
		return CaseResult.claim(
			f"{machine.name}/{variant}: local conditions agree with U†U = I",
			self.lemma,
			local == unitary == expected,
			detail=f"local={'pass' if local else 'fail'}, defect={defect:.3g}, configurations={len(configurations)}",
		)

	def _cases(self):
		for machine in self.machines():
			yield self._agreement(machine, "original", True)
			for variant, mutated in mutations(machine).items():
				yield self._agreement(mutated, variant, False)
