import numpy as np

from qtmlab import CaseResult, Suite
from qtmlab.machine import load_machine
from qtmlab.scalar import EPS_AMP, Scalar
from qtmlab.simulator import Configuration, Superposition, distance, reachable_configurations, step, step_inverse


FIXTURES = ("had.qtm", "hh.qtm", "one.qtm", "zero.qtm", "phase.qtm", "q1.qtm", "q2.qtm", "adaptive.qtm")


def random_superposition(rng: np.random.Generator, pool: list, max_support: int = 5) -> Superposition:
	"""Unit superposition with random complex amplitudes on a random subset of ``pool``."""
	size = int(rng.integers(1, min(max_support, len(pool)) + 1))
	chosen = rng.choice(len(pool), size=size, replace=False)
	amplitudes = rng.normal(size=size) + 1j * rng.normal(size=size)
	amplitudes /= np.linalg.norm(amplitudes)
	return Superposition({pool[int(i)]: Scalar(complex(a)) for i, a in zip(chosen, amplitudes)})


class Reversal(Suite):
	"""
	step_inverse undoes step on random sparse unit vectors drawn from configurations reachable from the fixtures.

	Parameters
	----------
	samples : int
		Number of random vectors. Default is 100.
	seed : int
		Seed of the numpy generator. Default is 2024.
	"""

	name = "reversal"
	lemma = "reversibility"

	def __init__(self, samples: int = 100, seed: int = 2024, output_format="json", max_steps=10000):
		super().__init__(output_format, max_steps)
		if samples < 1:
			raise ValueError("Invalid samples. Expected a positive integer.")
		self.samples = samples
		self.seed = seed

	def _cases(self):
		rng = np.random.default_rng(self.seed)
		machines = [load_machine(name) for name in FIXTURES]
		pools = {}
		for machine in machines:
			starts = [Configuration.initial(machine, x) for x in ("0", "1")]
			pools[machine.name] = reachable_configurations(machine, starts, 3)

		for i in range(self.samples):
			machine = machines[i % len(machines)]
			psi = random_superposition(rng, pools[machine.name])
			back = step_inverse(machine, step(machine, psi))
			yield CaseResult.compare(f"{machine.name} #{i}: step_inverse(step(ψ)) = ψ", self.lemma, distance(back, psi), 0.0, EPS_AMP, "le")
