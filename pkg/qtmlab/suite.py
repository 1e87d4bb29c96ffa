import time
from dataclasses import dataclass, field

from .scalar import EPS_AMP

__all__ = ["Suite", "SuiteResult", "CaseResult"]


@dataclass
class CaseResult:
	"""
	One checked case of a suite.

	``relation`` is "eq" (|lhs - rhs| <= tolerance), "le" (lhs <= rhs + tolerance), "ge" (lhs >= rhs - tolerance) or
	"claim" (a boolean property, lhs/rhs unused).
	"""

	id: str
	lemma: str
	status: str
	lhs: float | None = None
	rhs: float | None = None
	tolerance: float = EPS_AMP
	relation: str = "eq"
	detail: str | None = None
	elapsed: float = 0.0

	@classmethod
	def compare(cls, id, lemma, lhs, rhs, tolerance=EPS_AMP, relation="eq", detail=None) -> "CaseResult":
		lhs, rhs = float(lhs), float(rhs)
		if relation == "eq":
			ok = abs(lhs - rhs) <= tolerance
		elif relation == "le":
			ok = lhs <= rhs + tolerance
		elif relation == "ge":
			ok = lhs >= rhs - tolerance
		else:
			raise ValueError('Invalid relation. Expected "eq", "le" or "ge".')
		return cls(id=id, lemma=lemma, status="pass" if ok else "fail", lhs=lhs, rhs=rhs, tolerance=tolerance, relation=relation, detail=detail)

	@classmethod
	def claim(cls, id, lemma, holds: bool, detail=None) -> "CaseResult":
		return cls(id=id, lemma=lemma, status="pass" if holds else "fail", tolerance=0.0, relation="claim", detail=detail)

	@property
	def passed(self) -> bool:
		return self.status == "pass"

	def to_report(self, include_elapsed: bool = False) -> dict:
		report = {
			"id": self.id,
			"lemma": self.lemma,
			"status": self.status,
			"lhs": self.lhs,
			"rhs": self.rhs,
			"tolerance": self.tolerance,
			"relation": self.relation,
		}
		if self.detail is not None:
			report["detail"] = self.detail
		if include_elapsed:
			report["elapsed"] = self.elapsed
		return report


@dataclass
class SuiteResult:
	name: str
	cases: list[CaseResult] = field(default_factory=list)
	error: str | None = None

	@property
	def summary(self) -> dict:
		passed = sum(1 for case in self.cases if case.passed)
		return {"total": len(self.cases), "passed": passed, "failed": len(self.cases) - passed}

	@property
	def passed(self) -> bool:
		return self.error is None and all(case.passed for case in self.cases)

	def to_report(self, include_elapsed: bool = False) -> dict:
		report = {
			"suite": self.name,
			"cases": [case.to_report(include_elapsed) for case in self.cases],
			"summary": self.summary,
			"passed": self.passed,
		}
		if self.error is not None:
			report["error"] = self.error
		return report


class Suite:
	"""
	Base class of verification suites. Subclasses set ``name`` and implement ``_cases`` as a generator of CaseResult.

	Parameters
	----------
	output_format : str
		The format of the dumped report. Accepted values are "json" and "txt".
		Default is "json".
	max_steps : int
		Step limit passed to every simulation of the suite.
		Default is 10000.
	"""

	name = None

	def __init__(self, output_format="json", max_steps=10000):
		super().__init__()
		if output_format not in ("json", "txt"):
			raise ValueError('Invalid output_format. Expected "json" or "txt".')
		if max_steps <= 0:
			raise ValueError("Invalid max_steps. Expected a positive integer.")
		self.output_format = output_format
		self.max_steps = max_steps

	def _cases(self):
		raise NotImplementedError()

	def run(self) -> SuiteResult:
		cases = []
		iterator = iter(self._cases())
		while True:
			start = time.perf_counter()
			try:
				case = next(iterator)
			except StopIteration:
				break
			case.elapsed = time.perf_counter() - start
			cases.append(case)
		return SuiteResult(name=self.name, cases=cases)
