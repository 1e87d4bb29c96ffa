from qtmlab import CaseResult, Suite
from qtmlab.constructions import dj_machine
from qtmlab.machine import RolePrereqError, load_machine
from qtmlab.oracle import Oracle, nonadaptive_audit


class Nonadaptive(Suite):
	"""
	Query-list audit: the DJ machines write their whole query list before the single query and pass for every oracle;
	the adaptive fixture passes as long as its second query word happens to be listed and fails once the first answer
	is 1.
	"""

	name = "nonadaptive"
	lemma = "nonadaptive-queries"

	def _cases(self):
		oracles = [Oracle(name="empty"), Oracle.from_words(["0"], "zero"), Oracle.from_words(["1"], "one"), Oracle.from_words(["0", "1", "00", "11"], "mixed")]

		for machine in (dj_machine(1), dj_machine(1, width=2)):
			for oracle in oracles:
				report = nonadaptive_audit(machine, oracle, "0", self.max_steps)
				yield CaseResult.claim(f"{machine.name} with {oracle.name}: passes", self.lemma, report.passed and report.snapshot_time is not None)

		adaptive = load_machine("adaptive.qtm")
		report = nonadaptive_audit(adaptive, Oracle(name="empty"), "0", self.max_steps)
		yield CaseResult.claim("adaptive with empty: every query is listed", self.lemma, report.passed)

		report = nonadaptive_audit(adaptive, Oracle.from_words(["0"], "zero"), "0", self.max_steps)
		conditions = {f.condition for f in report.findings}
		yield CaseResult.claim("adaptive with zero: the answer-dependent query is flagged", self.lemma, conditions == {"unlisted-query"})

		try:
			nonadaptive_audit(load_machine("q1.qtm"), Oracle(), "0", self.max_steps)
			raised = False
		except RolePrereqError:
			raised = True
		yield CaseResult.claim("q1 without a query-list tape is rejected", self.lemma, raised)
