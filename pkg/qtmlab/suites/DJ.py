import itertools

import numpy as np

from qtmlab import CaseResult, Suite
from qtmlab.constructions import dj_oracle_value, dj_target
from qtmlab.oracle import Oracle
from qtmlab.scalar import Scalar


def block_words(width: int) -> list:
	return ["".join(w) for w in itertools.product("01", repeat=width)]


class DJ(Suite):
	"""
	The one-query DJ machine reproduces f^A = 2^(-2N) (|A_N| - |Σ^N \\ A_N|)^2 exactly: an exhaustive sweep over
	all 16 oracles on words of length 2 and a random sample on words of length 4. On good oracles (empty, full or
	balanced block) the output is deterministic.

	Parameters
	----------
	samples : int
		Random oracles at length 4. Default is 200.
	seed : int
		Seed of the numpy generator. Default is 3.
	"""

	name = "dj"
	lemma = "separation-algorithm"

	def __init__(self, samples: int = 200, seed: int = 3, output_format="json", max_steps=10000):
		super().__init__(output_format, max_steps)
		if samples < 0:
			raise ValueError("Invalid samples. Expected a nonnegative integer.")
		self.samples = samples
		self.seed = seed

	def _check(self, oracle: Oracle, n: int, width: int, label: str):
		outcome = dj_oracle_value(oracle, n, max_steps=self.max_steps, width=width)
		target = dj_target(oracle, n, width)
		yield CaseResult.claim(f"{label}: value equals f^A exactly", self.lemma, outcome.run.accept == Scalar(target), detail=f"census {outcome.census}")
		if outcome.good:
			yield CaseResult.claim(f"{label}: good oracle gives a certain output", self.lemma, outcome.value in (0.0, 1.0))

	def _cases(self):
		words = block_words(2)
		for size in range(len(words) + 1):
			for members in itertools.combinations(words, size):
				label = "width 2, A = {" + ",".join(members) + "}"
				yield from self._check(Oracle(frozenset(members)), 1, 2, label)

		words = block_words(4)
		yield from self._check(Oracle(frozenset(words), "full"), 2, 4, "width 4, A = Σ^4")
		yield from self._check(Oracle(frozenset(w for w in words if w[0] == "0"), "first-bit-0"), 2, 4, "width 4, A = 0Σ^3")
		yield from self._check(Oracle(name="empty"), 2, 4, "width 4, A = ∅")

		rng = np.random.default_rng(self.seed)
		for i in range(self.samples):
			members = frozenset(w for w in words if rng.random() < 0.5)
			yield from self._check(Oracle(members, f"sample-{i}"), 2, 4, f"width 4, sample {i}")
