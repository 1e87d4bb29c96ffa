import itertools

import numpy as np

from qtmlab import CaseResult, Suite
from qtmlab.constructions import dj_machine
from qtmlab.machine import load_machine
from qtmlab.oracle import Oracle, bbbv_bound, query_magnitudes


def words_up_to(length: int) -> list:
	return ["".join(w) for n in range(length + 1) for w in itertools.product("01", repeat=n)]


def random_oracle(rng: np.random.Generator, words: list, name: str) -> Oracle:
	return Oracle(frozenset(w for w in words if rng.random() < 0.5), name)


class OracleBbbv(Suite):
	"""
	Oracle perturbation bound |ρ^A(φ) - ρ^B(ψ)| <= ||φ - ψ|| + 2 sqrt(t) (Σ_{i<t} Σ_{y in A△B} q^i_y)^(1/2) over
	random oracle pairs on words of length at most 4, plus the query magnitudes of the one-bit DJ machine.

	Parameters
	----------
	pairs : int
		Random oracle pairs per machine. Default is 20.
	seed : int
		Seed of the numpy generator. Default is 11.
	"""

	name = "oracle-bbbv"
	lemma = "query-magnitude"

	def __init__(self, pairs: int = 20, seed: int = 11, output_format="json", max_steps=10000):
		super().__init__(output_format, max_steps)
		if pairs < 1:
			raise ValueError("Invalid pairs. Expected a positive integer.")
		self.pairs = pairs
		self.seed = seed

	def _cases(self):
		rng = np.random.default_rng(self.seed)
		words = words_up_to(4)
		machines = [load_machine("q1.qtm"), load_machine("adaptive.qtm"), dj_machine(1)]

		for machine in machines:
			for i in range(self.pairs):
				a = random_oracle(rng, words, f"A{i}")
				b = random_oracle(rng, words, f"B{i}")
				psi = "0" if i % 2 == 0 else "1"
				bound = bbbv_bound(machine, a, b, "0", psi, self.max_steps)
				yield CaseResult.compare(f"{machine.name} #{i} (0 vs {psi})", self.lemma, bound.lhs, bound.rhs, relation="le", detail=f"query mass {bound.query_mass:.12g}")

		dj = machines[2]
		trace = query_magnitudes(dj, Oracle(), "0", self.max_steps)
		(t0,) = [t for t, _ in trace.events]
		for word in ("0", "1"):
			yield CaseResult.compare(f"{dj.name}: q^{t0}_{word} = 1/2", self.lemma, trace.magnitude(t0, word), 0.5)

		bound = bbbv_bound(dj, Oracle(), Oracle.from_words(["0"], "zero"), "0", "0", self.max_steps)
		yield CaseResult.compare(f"{dj.name}: A△B = {{0}} carries query mass 1/2", self.lemma, bound.query_mass, 0.5)
		yield CaseResult.claim(f"{dj.name}: A△B = {{0}} satisfies the bound", self.lemma, bound.holds)
