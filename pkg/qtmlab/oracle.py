import logging
import math
from dataclasses import dataclass, field

from qtmlab.qtmlab import QtmlabException
from .machine import MachineSpec, RolePrereqError
from .scalar import EPS_AMP
from .simulator import Configuration, Superposition, distance, initial_superposition, run_superposition, step
from .utils import read_text


SEPARATOR = "/"


class QueryDesyncError(QtmlabException):
	pass


class BudgetExceeded(QtmlabException):
	pass


class OracleTimingError(QtmlabException):
	pass


@dataclass(frozen=True)
class Oracle:
	"""
	A finite oracle set A over binary strings; words outside the set answer 0.

	Example
	-------
	>>> a = Oracle.from_words(["0", "11"])
	>>> a.contains("0"), a.contains("1")
	(True, False)
	"""

	members: frozenset = frozenset()
	name: str = "A"

	def __post_init__(self):
		members = frozenset(self.members)
		bad = sorted(w for w in members if not isinstance(w, str) or set(w) - {"0", "1"})
		if bad:
			raise ValueError(f"Invalid oracle words {bad}. Expected binary strings.")
		object.__setattr__(self, "members", members)

	@classmethod
	def from_words(cls, words, name: str = "A") -> "Oracle":
		return cls(frozenset(words), name)

	@classmethod
	def parse(cls, text: str, name: str = "A") -> "Oracle":
		"""One binary string per line; blank lines and ``%`` comments are ignored."""
		words = []
		for raw in text.splitlines():
			line = raw.split("%", 1)[0].strip()
			if line:
				words.append(line)
		return cls(frozenset(words), name)

	@classmethod
	def from_file(cls, path: str) -> "Oracle":
		return cls.parse(read_text(path), name=path)

	def contains(self, word: str) -> bool:
		return word in self.members

	def __contains__(self, word):
		return self.contains(word)

	def __len__(self):
		return len(self.members)

	def symmetric_difference(self, other: "Oracle") -> frozenset:
		return self.members ^ other.members

	def block(self, length: int) -> frozenset:
		"""Members of the given length."""
		return frozenset(w for w in self.members if len(w) == length)

	def to_report(self) -> dict:
		return {"name": self.name, "members": sorted(self.members, key=lambda w: (len(w), w))}


def characteristic(oracle: Oracle | None, word: str) -> int:
	"""χ_A(word); ``None`` is the empty oracle."""
	return 1 if oracle is not None and oracle.contains(word) else 0


def pairing(x: str, y: str) -> str:
	"""
	Self-delimiting pairing 1^|x| 0 x y.

	Example
	-------
	>>> pairing("10", "1")
	'110101'
	"""
	return "1" * len(x) + "0" + x + y


def unpairing(s: str) -> tuple:
	n = len(s) - len(s.lstrip("1"))
	if n >= len(s) or s[n] != "0" or len(s) < 2 * n + 1:
		raise ValueError(f"Invalid pair {s!r}. Expected 1^n 0 x y with |x| = n.")
	return s[n + 1 : 2 * n + 1], s[2 * n + 1 :]


def query_word(machine: MachineSpec, configuration: Configuration) -> str | None:
	"""The word y of a query tape holding |y>|b>, or None when the content is not a query."""
	content = configuration.content(machine.roles.query)
	if not content or content[-1] not in ("0", "1"):
		return None
	return "".join(content[:-1])


def query_list(machine: MachineSpec, configuration: Configuration) -> tuple:
	"""Words of the query-list tape: ``/``-separated from cell 0 rightward, blank tape is the empty list."""
	text = "".join(configuration.content(machine.roles.qlist))
	return tuple(w for w in text.split(SEPARATOR) if w)


@dataclass(frozen=True)
class QueryTrace:
	"""
	Query magnitudes q^t_y at every time t where the support held pre-query configurations.

	Parameters
	----------
	events : tuple
		(t, {y: q}) pairs in time order.
	total_query_times : int
		Number of such times.
	"""

	events: tuple = ()
	total_query_times: int = 0

	def magnitude(self, t: int, word: str) -> float:
		for time, magnitudes in self.events:
			if time == t:
				return magnitudes.get(word, 0.0)
		return 0.0

	def totals(self) -> dict:
		return {t: sum(m.values()) for t, m in self.events}

	def mass(self, words, start: int = 1, stop: int | None = None) -> float:
		"""Σ over start <= t < stop and y in ``words`` of q^t_y."""
		words = set(words)
		return sum(q for t, m in self.events if t >= start and (stop is None or t < stop) for y, q in m.items() if y in words)

	def triples(self) -> list:
		return sorted((t, y, q) for t, m in self.events for y, q in m.items())

	def to_report(self) -> dict:
		return {"total_query_times": self.total_query_times, "events": [{"t": t, "y": y, "q": q} for t, y, q in self.triples()]}


class _TraceRecorder:
	"""Observer for ``run_superposition`` collecting query magnitudes at pre-query times."""

	def __init__(self, machine: MachineSpec, budget: int | None = None, strict: bool = True):
		self.machine = machine
		self.budget = budget
		self.strict = strict
		self.events = []

	def __call__(self, psi: Superposition):
		pre = self.machine.pre_query
		querying = [(c, a) for c, a in psi.entries.items() if c.state == pre]
		if not querying:
			return
		if self.strict and len(querying) != len(psi):
			raise QueryDesyncError(f"{self.machine.name}: at time {psi.time}, {len(querying)} of {len(psi)} configurations are pre-query")

		magnitudes = {}
		for c, a in querying:
			word = query_word(self.machine, c)
			if word is not None:
				magnitudes[word] = magnitudes.get(word, 0.0) + float(a.abs2())
		self.events.append((psi.time, magnitudes))

		if self.budget is not None and len(self.events) > self.budget:
			raise BudgetExceeded(f"{self.machine.name}: {len(self.events)} query steps exceed the budget {self.budget}")

	def trace(self) -> QueryTrace:
		return QueryTrace(tuple(self.events), len(self.events))


def _require_oracle_machine(machine: MachineSpec):
	if machine.oracle_states is None:
		raise RolePrereqError(f"{machine.name} declares no pre/post-query states")


def run_with_oracle(machine: MachineSpec, oracle: Oracle | None, x: str, budget: int | None = None, max_steps: int = 10000) -> tuple:
	"""
	Run an oracle machine relative to ``oracle`` and record its query magnitudes.

	Pre-query events must be globally synchronised (QueryDesyncError otherwise); ``budget`` bounds the number of
	query steps (BudgetExceeded).

	Returns
	-------
	tuple
		(RunResult, QueryTrace)

	Example
	-------
	>>> result, trace = run_with_oracle(q1, Oracle.from_words(["0"]), "0")
	>>> result.accept_prob, trace.triples()
	(1.0, [(2, '0', 1.0)])
	"""
	_require_oracle_machine(machine)
	if budget is not None and budget < 0:
		raise ValueError("Invalid budget. Expected a nonnegative integer or None.")

	recorder = _TraceRecorder(machine, budget)
	result = run_superposition(machine, initial_superposition(machine, x), max_steps, oracle, on_step=recorder, label=x)
	trace = recorder.trace()
	logging.info(f"{machine.name} on {x!r} made {trace.total_query_times} query steps")
	return result, trace


def query_magnitudes(machine: MachineSpec, oracle: Oracle | None, x: str, max_steps: int = 10000) -> QueryTrace:
	return run_with_oracle(machine, oracle, x, max_steps=max_steps)[1]


@dataclass(frozen=True)
class AuditFinding:
	time: int
	condition: str
	configuration: str
	detail: str

	def to_report(self) -> dict:
		return {"time": self.time, "condition": self.condition, "configuration": self.configuration, "detail": self.detail}


@dataclass(frozen=True)
class AuditReport:
	"""Outcome of the non-adaptive query-list audit; ``snapshot_time`` is None when the machine never queries."""

	machine: str
	input: str
	snapshot_time: int | None
	snapshot: tuple
	findings: tuple = field(default=())

	@property
	def passed(self) -> bool:
		return not self.findings

	def to_report(self) -> dict:
		return {
			"machine": self.machine,
			"input": self.input,
			"passed": self.passed,
			"snapshot_time": self.snapshot_time,
			"snapshot": [SEPARATOR.join(words) for words in self.snapshot],
			"findings": [f.to_report() for f in self.findings],
		}


def _merge(*parts: dict) -> dict:
	merged = {}
	for part in parts:
		for c, a in part.items():
			merged[c] = merged[c] + a if c in merged else a
	return merged


def nonadaptive_audit(machine: MachineSpec, oracle: Oracle | None, x: str, max_steps: int = 10000) -> AuditReport:
	"""
	Audit the query-list discipline of a machine with a query-list tape.

	The superposition is split into the component that has not queried yet and the component that has; a
	configuration leaves the first one at its first pre-query step. At the first time T0 with a pre-query
	configuration the query lists of the whole support are snapshotted. The audit fails if a not-yet-queried
	configuration at some t >= T0 holds a list outside the snapshot, or if a queried word is absent from the list of the
	querying configuration.

	Example
	-------
	>>> nonadaptive_audit(dj_machine(1), Oracle(), "0").passed
	True
	"""
	_require_oracle_machine(machine)
	if machine.roles.qlist is None:
		raise RolePrereqError(f"{machine.name} declares no query-list tape")

	pre = machine.pre_query
	fresh = initial_superposition(machine, x)
	queried = Superposition({}, fresh.time)
	snapshot_time, snapshot, findings = None, (), []

	while True:
		t = fresh.time
		querying = {c: a for c, a in fresh.entries.items() if c.state == pre}
		repeat = [c for c in queried.entries if c.state == pre]

		if snapshot_time is None and (querying or repeat):
			snapshot_time = t
			snapshot = tuple(sorted({query_list(machine, c) for c in _merge(fresh.entries, queried.entries)}))

		if snapshot_time is not None:
			for c in fresh.entries:
				if query_list(machine, c) not in snapshot:
					findings.append(AuditFinding(t, "list-altered", str(c), SEPARATOR.join(query_list(machine, c))))
		for c in list(querying) + repeat:
			word = query_word(machine, c)
			if word is not None and word not in query_list(machine, c):
				findings.append(AuditFinding(t, "unlisted-query", str(c), word))

		rest = {c: a for c, a in fresh.entries.items() if c.state != pre}
		combined = _merge(rest, querying, queried.entries)
		if combined and all(machine.is_final(c.state) for c in combined):
			break
		if t >= max_steps:
			findings.append(AuditFinding(t, "no-halt", "", f"no halt within {max_steps} steps"))
			break

		fresh = step(machine, Superposition(rest, t), oracle)
		queried = step(machine, Superposition(_merge(querying, queried.entries), t), oracle)

	report = AuditReport(machine.name, x, snapshot_time, snapshot, tuple(findings))
	logging.info(f"Non-adaptive audit of {machine.name} on {x!r}: {'pass' if report.passed else 'fail'}")
	return report


@dataclass(frozen=True)
class BbbvBound:
	"""
	Both sides of the oracle perturbation bound
	|ρ^A(φ) - ρ^B(ψ)| <= ||φ - ψ|| + 2 sqrt(t) (Σ_{1<=i<t} Σ_{y in A△B} q^i_y)^(1/2).
	"""

	lhs: float
	rhs: float
	holds: bool
	halt_time: int
	query_mass: float

	def to_report(self) -> dict:
		return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "halt_time": self.halt_time, "query_mass": self.query_mass}


def _as_superposition(machine: MachineSpec, value) -> Superposition:
	return value if isinstance(value, Superposition) else initial_superposition(machine, value)


def bbbv_bound(machine: MachineSpec, a: Oracle, b: Oracle, phi, psi, max_steps: int = 10000) -> BbbvBound:
	"""
	Evaluate the perturbation bound for ``machine`` run on ``phi`` with oracle ``a`` and on ``psi`` with oracle ``b``.

	Parameters
	----------
	machine : MachineSpec
		An oracle machine.
	a, b : Oracle
		The two oracles.
	phi, psi : str | Superposition
		Inputs, either basis strings or unit superpositions at time 0.
	max_steps : int
		Step limit of both runs.
	"""
	_require_oracle_machine(machine)
	start_a, start_b = _as_superposition(machine, phi), _as_superposition(machine, psi)

	recorder = _TraceRecorder(machine, strict=False)
	run_a = run_superposition(machine, start_a, max_steps, a, on_step=recorder)
	run_b = run_superposition(machine, start_b, max_steps, b)
	if run_a.halt_time != run_b.halt_time:
		raise OracleTimingError(f"{machine.name} halts at {run_a.halt_time} with {a.name} and at {run_b.halt_time} with {b.name}")

	t = run_a.halt_time
	mass = recorder.trace().mass(a.symmetric_difference(b), 1, t)
	lhs = abs(run_a.accept_prob - run_b.accept_prob)
	rhs = distance(start_a, start_b) + 2 * math.sqrt(t) * math.sqrt(mass)
	return BbbvBound(lhs=lhs, rhs=rhs, holds=lhs <= rhs + EPS_AMP, halt_time=t, query_mass=mass)
