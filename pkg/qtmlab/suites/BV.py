import itertools
import math

from qtmlab import CaseResult, Suite
from qtmlab.constructions import EncodingError, bv_oracle, bv_recover
from qtmlab.oracle import Oracle, pairing


FIDELITY = math.sqrt(79 / 80)
FLOOR = (math.sqrt(79 / 80) - math.sqrt(1 / 80)) ** 2


class BV(Suite):
	"""
	Recovery of a hidden string from one parallel pass of dot-product queries: certain at fidelity 1 for every hidden
	string of length at most ``max_p``, and above (sqrt(79/80) - sqrt(1/80))^2 >= 3/4 at fidelity sqrt(79/80).
	"""

	name = "bv"
	lemma = "parallel-queries"

	def __init__(self, max_p: int = 4, x: str = "1", output_format="json", max_steps=10000):
		super().__init__(output_format, max_steps)
		if max_p < 1:
			raise ValueError("Invalid max_p. Expected a positive integer.")
		self.max_p = max_p
		self.x = x

	def _cases(self):
		for p in range(1, self.max_p + 1):
			for bits in itertools.product("01", repeat=p):
				hidden = "".join(bits)
				oracle = bv_oracle(self.x, hidden)
				exact = bv_recover(oracle, self.x, p)
				yield CaseResult.compare(f"p={p}, f(x)={hidden}: recovered with certainty", self.lemma, exact.recovered_prob, 1.0)
				noisy = bv_recover(oracle, self.x, p, FIDELITY)
				yield CaseResult.compare(f"p={p}, f(x)={hidden}: fidelity sqrt(79/80)", self.lemma, noisy.recovered_prob, FLOOR, relation="ge")

		yield CaseResult.compare("(sqrt(79/80) - sqrt(1/80))^2 >= 3/4", self.lemma, FLOOR, 0.75, 0.0, "ge")

		broken = Oracle.from_words([pairing(self.x, "11")], "not-linear")
		try:
			bv_recover(broken, self.x, 2)
			raised = False
		except EncodingError:
			raised = True
		yield CaseResult.claim("non-linear oracle is rejected", self.lemma, raised)
