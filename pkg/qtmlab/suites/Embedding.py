from qtmlab import CaseResult, Suite
from qtmlab.constructions import NotPermutationError, predicate_machine, sharp_p_embed, witness_count
from qtmlab.machine import load_machine
from qtmlab.simulator import run


PREDICATES = (
	(1, frozenset()),
	(1, frozenset({"0"})),
	(1, frozenset({"0", "1"})),
	(1, frozenset({"1", "3"})),
	(1, frozenset({"0", "1", "2", "3"})),
	(2, frozenset()),
	(2, frozenset({"00"})),
	(2, frozenset({"01", "10", "23"})),
	(2, frozenset({"00", "11", "22", "33", "12"})),
	(2, frozenset(a + b for a in "0123" for b in "0123")),
)

# accepted words per input symbol: the count depends on x
PAIR_PREDICATE = {"0": frozenset({"0"}), "1": frozenset({"0", "1", "2"})}


class Embedding(Suite):
	"""
	Counting through acceptance probability: for deterministic predicates over witness words in {w0..w3}^p, the
	embedded machine accepts with probability exactly (number of accepted witnesses) / 4^p.
	"""

	name = "embedding"
	lemma = "counting-embedding"

	def _cases(self):
		for p, accepting in PREDICATES:
			predicate = predicate_machine(accepting, p)
			embedded = sharp_p_embed(predicate, p)
			result = run(embedded, "0", self.max_steps)
			count = witness_count(predicate, "0", p)
			scaled = result.accept * 4**p
			label = f"p={p}, |accepted|={len(accepting)}"

			yield CaseResult.claim(f"{label}: brute-force count", self.lemma, count == len(accepting))
			yield CaseResult.claim(
				f"{label}: ρ·4^p equals the witness count exactly",
				self.lemma,
				scaled.is_exact and scaled == count,
				detail=scaled.to_literal(),
			)

		predicate = predicate_machine(PAIR_PREDICATE, 1)
		embedded = sharp_p_embed(predicate, 1)
		for x, accepted in PAIR_PREDICATE.items():
			count = witness_count(predicate, x, 1)
			scaled = run(embedded, x, self.max_steps).accept * 4
			yield CaseResult.claim(f"x={x}: brute-force count of <x, y>", self.lemma, count == len(accepted))
			yield CaseResult.claim(f"x={x}: ρ·4 equals the count of <x, y>", self.lemma, scaled.is_exact and scaled == count, detail=scaled.to_literal())

		try:
			sharp_p_embed(load_machine("qma_hadamard.qtm"), 1)
			raised = False
		except NotPermutationError:
			raised = True
		yield CaseResult.claim("non-permutation predicate is rejected", self.lemma, raised)
