import logging
import math
import os
from dataclasses import dataclass

import numpy as np

from qtmlab.qtmlab import QtmlabException
from .machine import BLANK, MachineSpec, Transition
from .scalar import EPS_AMP, Scalar


EPS_PRUNE = 1e-12
DEFAULT_MAX_SUPPORT = 10**6


class AlphabetError(QtmlabException):
	pass


class TimingViolation(QtmlabException):
	pass


class MaxStepsExceeded(QtmlabException):
	pass


class SupportLimitError(QtmlabException):
	pass


def max_support() -> int:
	value = os.environ.get("QTMLAB_MAX_SUPPORT")
	if value is None:
		return DEFAULT_MAX_SUPPORT
	if not value.isdigit() or int(value) <= 0:
		raise ValueError("Invalid QTMLAB_MAX_SUPPORT. Expected a positive integer.")
	return int(value)


def _write_cell(tape: tuple, position: int, symbol: str) -> tuple:
	cells = dict(tape)
	if symbol == BLANK:
		cells.pop(position, None)
	else:
		cells[position] = symbol
	return tuple(sorted(cells.items()))


@dataclass(frozen=True)
class Configuration:
	"""
	Classical snapshot of a machine: state, head positions and tape contents.

	Each tape is a sorted tuple of (cell, symbol) pairs that never stores the blank, so equality and hashing depend on
	content only.
	"""

	state: str
	heads: tuple
	tapes: tuple

	@classmethod
	def initial(cls, machine: MachineSpec, x: str, extra: dict | None = None) -> "Configuration":
		"""
		The initial configuration on input ``x``. ``extra`` maps further tape indices to symbol sequences written from
		cell 0 (used for witness registers).
		"""
		alphabet = machine.input_alphabets[machine.roles.input]
		bad = [s for s in x if s not in alphabet]
		if bad:
			raise AlphabetError(f"input symbols {sorted(set(bad))} are not in the input alphabet {sorted(alphabet)}")

		contents = {machine.roles.input: list(x)}
		for tape, symbols in (extra or {}).items():
			if any(s not in machine.tape_alphabets[tape] for s in symbols):
				raise AlphabetError(f"symbols {list(symbols)} are not in the alphabet of tape {tape + 1}")
			contents[tape] = list(symbols)

		tapes = tuple(
			tuple((i, s) for i, s in enumerate(contents.get(tape, [])) if s != BLANK) for tape in range(machine.tape_count)
		)
		return cls(machine.initial, (0,) * machine.tape_count, tapes)

	def symbol(self, tape: int, position: int | None = None) -> str:
		position = self.heads[tape] if position is None else position
		for cell, symbol in self.tapes[tape]:
			if cell == position:
				return symbol
		return BLANK

	def read(self) -> tuple:
		return tuple(self.symbol(i) for i in range(len(self.heads)))

	def apply(self, t: Transition) -> "Configuration":
		tapes = tuple(_write_cell(tape, head, symbol) for tape, head, symbol in zip(self.tapes, self.heads, t.write))
		heads = tuple(h + d for h, d in zip(self.heads, t.move))
		return Configuration(t.state, heads, tapes)

	def content(self, tape: int) -> tuple:
		"""Maximal run of non-blank symbols starting at cell 0."""
		cells = dict(self.tapes[tape])
		run = []
		while len(run) in cells:
			run.append(cells[len(run)])
		return tuple(run)

	def output_string(self, tape: int) -> str:
		"""Symbols from cell 0 to the rightmost non-blank cell; cells left of 0 are scratch."""
		cells = dict(self.tapes[tape])
		right = max((cell for cell in cells if cell >= 0), default=-1)
		return "".join(cells.get(i, BLANK) for i in range(right + 1))

	def with_state(self, state: str) -> "Configuration":
		return Configuration(state, self.heads, self.tapes)

	def with_cell(self, tape: int, position: int, symbol: str) -> "Configuration":
		tapes = tuple(_write_cell(t, position, symbol) if i == tape else t for i, t in enumerate(self.tapes))
		return Configuration(self.state, self.heads, tapes)

	def __str__(self):
		tapes = " | ".join(",".join(f"{cell}:{symbol}" for cell, symbol in tape) for tape in self.tapes)
		return f"<{self.state} @ {list(self.heads)} [{tapes}]>"


class Superposition:
	"""
	Sparse superposition of configurations at a given time step.

	Parameters
	----------
	entries : dict
		Map Configuration -> Scalar. Zero amplitudes must already be pruned.
	time : int
		Step counter.
	"""

	__slots__ = ("entries", "time")

	def __init__(self, entries: dict, time: int = 0):
		self.entries = entries
		self.time = time

	@classmethod
	def basis(cls, configuration: Configuration, exact: bool = True, time: int = 0) -> "Superposition":
		return cls({configuration: Scalar.one(exact)}, time)

	def __len__(self):
		return len(self.entries)

	def __iter__(self):
		return iter(self.entries.items())

	def __contains__(self, configuration):
		return configuration in self.entries

	def norm_sq(self) -> Scalar:
		total = Scalar.zero(True)
		for amplitude in self.entries.values():
			total = total + amplitude.abs2()
		return total

	def norm(self) -> float:
		return math.sqrt(max(float(self.norm_sq()), 0.0))

	def scaled(self, factor: Scalar) -> "Superposition":
		return Superposition({c: a * factor for c, a in self.entries.items()}, self.time)

	def __repr__(self):
		return f"Superposition(time={self.time}, support={len(self.entries)})"


def _accumulate(entries: dict, configuration: Configuration, amplitude: Scalar):
	if configuration in entries:
		entries[configuration] = entries[configuration] + amplitude
	else:
		entries[configuration] = amplitude


def _prune(entries: dict) -> dict:
	pruned = {}
	for c, a in entries.items():
		if a.is_exact:
			if not a.is_zero():
				pruned[c] = a
		elif abs(complex(a)) ** 2 >= EPS_PRUNE:
			pruned[c] = a
	if len(pruned) > max_support():
		raise SupportLimitError(f"superposition support {len(pruned)} exceeds QTMLAB_MAX_SUPPORT={max_support()}")
	return pruned


def initial_superposition(machine: MachineSpec, x: str, extra: dict | None = None) -> Superposition:
	"""
	The superposition holding only the initial configuration on ``x``, with amplitude 1.

	Example
	-------
	>>> psi = initial_superposition(had, "0")
	>>> len(psi), psi.norm()
	(1, 1.0)
	"""
	return Superposition.basis(Configuration.initial(machine, x, extra), machine.exact)


def oracle_successor(machine: MachineSpec, configuration: Configuration, oracle) -> Configuration:
	"""
	The oracle step: |y>|b> on the query tape becomes |y>|b xor χ_A(y)> and the state moves to post-query. Empty
	content or a non-binary last symbol passes through unchanged. ``oracle`` None is the empty oracle.
	"""
	return _answer(machine, configuration, oracle, machine.post_query)


def _answer(machine, configuration, oracle, state):
	query_tape = machine.roles.query
	content = configuration.content(query_tape)
	moved = configuration.with_state(state)
	if not content or content[-1] not in ("0", "1") or oracle is None:
		return moved
	if not oracle.contains("".join(content[:-1])):
		return moved
	flipped = "1" if content[-1] == "0" else "0"
	return moved.with_cell(query_tape, len(content) - 1, flipped)


def step(machine: MachineSpec, psi: Superposition, oracle=None) -> Superposition:
	"""
	Apply the time-evolution operator once: every configuration follows its δ row (the oracle step in the pre-query
	state), coinciding successors interfere, amplitudes below the pruning floor are dropped.
	"""
	pre = machine.pre_query
	out = {}
	for c, a in psi.entries.items():
		if c.state == pre:
			_accumulate(out, oracle_successor(machine, c, oracle), a)
			continue
		for t in machine.delta[(c.state, c.read())]:
			_accumulate(out, c.apply(t), a * t.amplitude)
	return Superposition(_prune(out), psi.time + 1)


def step_inverse(machine: MachineSpec, psi: Superposition, oracle=None) -> Superposition:
	"""
	Apply the adjoint of the time-evolution operator by predecessor enumeration: every row entering the state of c'
	is undone locally (heads moved back, written symbols replaced by the read ones) if the tape under the restored
	heads shows what the row wrote.
	"""
	post = machine.post_query
	out = {}
	for c, a in psi.entries.items():
		for p, sigma, t in machine.arrivals.get(c.state, ()):
			heads = tuple(h - d for h, d in zip(c.heads, t.move))
			if any(c.symbol(i, heads[i]) != t.write[i] for i in range(len(heads))):
				continue
			tapes = tuple(_write_cell(tape, head, symbol) for tape, head, symbol in zip(c.tapes, heads, sigma))
			_accumulate(out, Configuration(p, heads, tapes), t.amplitude.conjugate() * a)
		if post is not None and c.state == post:
			_accumulate(out, _answer(machine, c, oracle, machine.pre_query), a)
	return Superposition(_prune(out), psi.time - 1)


@dataclass(frozen=True)
class RunResult:
	"""
	Outcome of a synchronous run. ``accept`` and ``reject`` are Scalars (exact in exact mode); the ``*_prob``
	properties give floats.
	"""

	machine: str
	input: str | None
	final: Superposition
	halt_time: int
	accept: Scalar
	reject: Scalar
	outputs: dict
	support_sizes: tuple

	@property
	def accept_prob(self) -> float:
		return float(self.accept)

	@property
	def reject_prob(self) -> float:
		return float(self.reject)

	@property
	def output_distribution(self) -> dict:
		return {output: float(p) for output, p in self.outputs.items()}

	def to_report(self) -> dict:
		return {
			"machine": self.machine,
			"input": self.input,
			"halt_time": self.halt_time,
			"accept_prob": self.accept_prob,
			"reject_prob": self.reject_prob,
			"output_distribution": dict(sorted(self.output_distribution.items())),
			"support_sizes": list(self.support_sizes),
		}


def _classify(machine: MachineSpec, psi: Superposition):
	output_tape = machine.roles.output
	accept = Scalar.zero(machine.exact)
	reject = Scalar.zero(machine.exact)
	outputs = {}
	for c, a in psi.entries.items():
		weight = a.abs2()
		if c.symbol(output_tape, 0) == "1":
			accept = accept + weight
		else:
			reject = reject + weight
		output = c.output_string(output_tape)
		outputs[output] = outputs[output] + weight if output in outputs else weight
	return accept, reject, outputs


def run_superposition(
	machine: MachineSpec, psi: Superposition, max_steps: int = 10000, oracle=None, on_step=None, label: str | None = None
) -> RunResult:
	"""
	Evolve ``psi`` until every configuration is final.

	``on_step`` is called with the superposition at every time step, the halting one included. Raises TimingViolation
	when final and non-final configurations coexist, MaxStepsExceeded past ``max_steps``.
	"""
	sizes = [len(psi)]
	while True:
		if on_step is not None:
			on_step(psi)
		finals = sum(1 for c in psi.entries if machine.is_final(c.state))
		if finals == len(psi):
			break
		if finals:
			raise TimingViolation(f"{machine.name}: at time {psi.time}, {finals} of {len(psi)} configurations are final")
		if psi.time >= max_steps:
			raise MaxStepsExceeded(f"{machine.name}: no synchronous halt within {max_steps} steps")
		psi = step(machine, psi, oracle)
		sizes.append(len(psi))

	accept, reject, outputs = _classify(machine, psi)
	logging.debug(f"{machine.name} halted at time {psi.time} with acceptance {float(accept):.6g}")
	return RunResult(
		machine=machine.name,
		input=label,
		final=psi,
		halt_time=psi.time,
		accept=accept,
		reject=reject,
		outputs=outputs,
		support_sizes=tuple(sizes),
	)


def run(machine: MachineSpec, x: str, max_steps: int = 10000, oracle=None, on_step=None) -> RunResult:
	"""
	Run ``machine`` on the basis input ``x`` until it halts synchronously.

	Parameters
	----------
	machine : MachineSpec
		A well-formed machine.
	x : str
		Input string over the input tape alphabet.
	max_steps : int
		Step limit. Default is 10000.
	oracle : Oracle | None
		Oracle answering queries of the pre-query state; None acts as the empty oracle.
	on_step : callable | None
		Observer called with the superposition at every step.

	Example
	-------
	>>> result = run(had, "0")
	>>> result.halt_time, result.accept_prob
	(2, 0.5)
	"""
	return run_superposition(machine, initial_superposition(machine, x), max_steps, oracle, on_step, label=x)


def amplitude_of(psi: Superposition, configuration: Configuration) -> Scalar:
	if configuration in psi.entries:
		return psi.entries[configuration]
	exact = all(a.is_exact for a in psi.entries.values())
	return Scalar.zero(exact)


def inner_product(psi: Superposition, phi: Superposition) -> Scalar:
	"""<psi|phi> over the union support."""
	total = Scalar.zero(True)
	for c, a in psi.entries.items():
		if c in phi.entries:
			total = total + a.conjugate() * phi.entries[c]
	return total


def distance(psi: Superposition, phi: Superposition) -> float:
	total = 0.0
	for c in set(psi.entries) | set(phi.entries):
		delta = complex(psi.entries.get(c, 0j)) - complex(phi.entries.get(c, 0j))
		total += abs(delta) ** 2
	return math.sqrt(total)


def reachable_configurations(machine: MachineSpec, starts, steps: int, oracle=None) -> list:
	"""
	Configurations reachable from ``starts`` within ``steps`` applications of δ, ignoring interference. Order is
	breadth-first and deterministic.
	"""
	seen = list(dict.fromkeys(starts))
	known = set(seen)
	frontier = list(seen)
	for _ in range(steps):
		successors = []
		for c in frontier:
			for successor in step(machine, Superposition.basis(c, machine.exact), oracle).entries:
				if successor not in known:
					known.add(successor)
					successors.append(successor)
		seen.extend(successors)
		frontier = successors
	return seen


def unitarity_defect(machine: MachineSpec, configurations, oracle=None) -> float:
	"""
	Largest entry of |U†U - I| restricted to the columns ``configurations``; computed exactly for exact machines.
	"""
	columns = [step(machine, Superposition.basis(c, machine.exact), oracle) for c in list(dict.fromkeys(configurations))]
	sharing = {}
	for i, column in enumerate(columns):
		for successor in column.entries:
			sharing.setdefault(successor, []).append(i)

	pairs = {(i, i) for i in range(len(columns))}
	for indices in sharing.values():
		pairs.update((i, j) for i in indices for j in indices if i < j)

	worst = 0.0
	for i, j in pairs:
		gram = inner_product(columns[i], columns[j])
		if i == j:
			gram = gram - 1
		if gram.is_exact and gram.is_zero():
			continue
		worst = max(worst, abs(complex(gram)))
	return worst


def evolution_matrix(machine: MachineSpec, configurations, oracle=None):
	"""
	Dense matrix of U on the span of ``configurations`` (images outside the set are dropped).

	Returns
	-------
	numpy.ndarray
		Complex matrix with ``U[i, j] = <c_i|U|c_j>``.
	"""
	index = {c: i for i, c in enumerate(configurations)}
	matrix = np.zeros((len(index), len(index)), dtype=complex)
	for c, j in index.items():
		for successor, a in step(machine, Superposition.basis(c, machine.exact), oracle).entries.items():
			if successor in index:
				matrix[index[successor], j] = complex(a)
	return matrix


def dense_run(machine: MachineSpec, x: str, steps: int, oracle=None) -> dict:
	"""
	Evolve the initial configuration by explicit matrix-vector products for ``steps`` steps. Returns the nonzero
	amplitudes keyed by configuration.
	"""
	start = Configuration.initial(machine, x)
	configurations = reachable_configurations(machine, [start], steps, oracle)
	matrix = evolution_matrix(machine, configurations, oracle)
	vector = np.zeros(len(configurations), dtype=complex)
	vector[0] = 1.0
	for _ in range(steps):
		vector = matrix @ vector
	return {c: vector[i] for i, c in enumerate(configurations) if abs(vector[i]) > EPS_AMP}
