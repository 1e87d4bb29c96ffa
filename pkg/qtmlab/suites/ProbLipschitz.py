import numpy as np

from qtmlab import CaseResult, Suite
from qtmlab.combinators import conjugate_machine
from qtmlab.machine import load_machine
from qtmlab.scalar import EPS_AMP, Scalar
from qtmlab.simulator import Configuration, Superposition, distance, run_superposition


# one-tape fixtures that all halt at time 2 on one-symbol inputs
FIXTURES = ("had.qtm", "one.qtm", "zero.qtm", "phase.qtm")


def random_input(rng: np.random.Generator, machine, words=("0", "1")) -> Superposition:
	amplitudes = rng.normal(size=len(words)) + 1j * rng.normal(size=len(words))
	amplitudes /= np.linalg.norm(amplitudes)
	return Superposition({Configuration.initial(machine, w): Scalar(complex(a)) for w, a in zip(words, amplitudes)})


class ProbLipschitz(Suite):
	"""
	|ρ_M(φ) - ρ_N(ψ)| <= ||Mφ - Nψ|| for random pairs of machines halting at equal times and random unit inputs.

	Parameters
	----------
	samples : int
		Number of random (M, N, φ, ψ) draws. Default is 50.
	seed : int
		Seed of the numpy generator. Default is 7.
	"""

	name = "prob-lipschitz"
	lemma = "probability-distance"

	def __init__(self, samples: int = 50, seed: int = 7, output_format="json", max_steps=10000):
		super().__init__(output_format, max_steps)
		if samples < 1:
			raise ValueError("Invalid samples. Expected a positive integer.")
		self.samples = samples
		self.seed = seed

	def _cases(self):
		rng = np.random.default_rng(self.seed)
		machines = [load_machine(name) for name in FIXTURES]
		machines.append(conjugate_machine(machines[-1]).with_changes(name="phase-conj"))

		for i in range(self.samples):
			m, n = (machines[int(j)] for j in rng.integers(0, len(machines), size=2))
			phi, psi = random_input(rng, m), random_input(rng, n)
			left = run_superposition(m, phi, self.max_steps)
			right = run_superposition(n, psi, self.max_steps)
			lhs = abs(left.accept_prob - right.accept_prob)
			rhs = distance(left.final, right.final)
			yield CaseResult.compare(f"{m.name} vs {n.name} #{i}", self.lemma, lhs, rhs, EPS_AMP, "le")
