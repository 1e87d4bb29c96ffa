import functools
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from qtmlab.qtmlab import QtmlabException
from .combinators import Assembly, add_entry
from .machine import BLANK, MachineSpec, RolePrereqError, TapeRoles
from .oracle import Oracle, pairing, run_with_oracle
from .scalar import EPS_AMP, QuadraticSurd, Scalar
from .simulator import Configuration, RunResult, Superposition, amplitude_of, run, run_superposition, step, step_inverse


WITNESS_SYMBOLS = ("w0", "w1", "w2", "w3")
MAX_ANCILLA = 10
MAX_DJ_N = 2


class OutputFormError(QtmlabException):
	pass


class AncillaWidthError(QtmlabException):
	pass


class NotPermutationError(QtmlabException):
	pass


class WidthError(QtmlabException):
	pass


class EncodingError(QtmlabException):
	pass


def _hadamard(exact: bool) -> Scalar:
	return Scalar(QuadraticSurd.rt2_power(-1)) if exact else Scalar(complex(2**-0.5))


def _phase_flip(machine: MachineSpec, psi: Superposition) -> Superposition:
	"""-P_π: negate every configuration whose output start cell reads 0."""
	output = machine.roles.output
	entries = {}
	for c, a in psi.entries.items():
		bit = c.symbol(output, 0)
		if bit not in ("0", "1"):
			raise OutputFormError(f"{machine.name}: final configuration {c} has output start cell {bit!r}")
		entries[c] = -a if bit == "0" else a
	return Superposition(entries, psi.time)


def _uncompute(machine: MachineSpec, psi: Superposition, steps: int) -> Superposition:
	for _ in range(steps):
		psi = step_inverse(machine, psi)
	return psi


def _compute(machine: MachineSpec, psi: Superposition, steps: int) -> Superposition:
	for _ in range(steps):
		psi = step(machine, psi)
	return psi


@dataclass(frozen=True)
class GapSquare:
	gap_amplitude: Scalar
	squared_prob: float
	accept_prob: float
	halt_time: int

	def to_report(self) -> dict:
		return {
			"gap_amplitude": self.gap_amplitude.to_json(),
			"squared_prob": self.squared_prob,
			"accept_prob": self.accept_prob,
			"halt_time": self.halt_time,
		}


def gap_square(machine: MachineSpec, x: str, max_steps: int = 10000) -> GapSquare:
	"""
	Run ``machine`` forward, negate the output-0 branches, run the same number of steps backwards and read the
	amplitude of the initial configuration. It equals 2ρ - 1, so its squared magnitude is (2ρ - 1)^2.

	Example
	-------
	>>> gap_square(had, "0").gap_amplitude
	Scalar(0)
	"""
	forward = run(machine, x, max_steps)
	back = _uncompute(machine, _phase_flip(machine, forward.final), forward.halt_time)
	amplitude = amplitude_of(back, Configuration.initial(machine, x))
	return GapSquare(amplitude, float(amplitude.abs2()), forward.accept_prob, forward.halt_time)


def ancilla_width(p: int) -> int:
	"""Ancilla width ceil(log2 p) + 3 that gives accuracy 1/(4p) with probability at least 8/pi^2."""
	if p < 1:
		raise ValueError("Invalid p. Expected a positive integer.")
	return math.ceil(math.log2(p)) + 3


def estimation_bound(rho: float, k: int) -> float:
	"""Distance between sin^2(theta) and the estimate of either grid point adjacent to 2^k theta / pi."""
	return 2 * math.pi * math.sqrt(max(rho * (1 - rho), 0.0)) / 2**k + math.pi**2 / 4**k


@dataclass(frozen=True)
class EstimationOutcome:
	"""
	Exact readout of amplitude estimation with ``k`` ancilla qubits.

	``distribution[l]`` is the probability of reading l; ``folded[l]`` is min(l, 2^k - l) and ``estimates[l]`` is
	sin^2(pi folded[l] / 2^k).
	"""

	k: int
	rho: float
	distribution: tuple
	folded: tuple
	estimates: tuple
	accuracy: float
	success_prob: float

	def total(self) -> float:
		return float(sum(self.distribution))

	def grid_points(self) -> tuple:
		"""The two outcomes floor and ceil of 2^k theta / pi, with sin^2 theta = rho."""
		position = 2**self.k * math.asin(math.sqrt(min(max(self.rho, 0.0), 1.0))) / math.pi
		return math.floor(position + EPS_AMP), math.ceil(position - EPS_AMP)

	def adjacent_errors(self) -> list:
		size = 2**self.k
		return [abs(self.rho - math.sin(math.pi * min(l, size - l) / size) ** 2) for l in self.grid_points()]

	def table(self) -> list:
		return [
			{"l": l, "probability": float(p), "folded": self.folded[l], "estimate": self.estimates[l]}
			for l, p in enumerate(self.distribution)
		]

	def to_report(self) -> dict:
		return {
			"k": self.k,
			"rho": self.rho,
			"accuracy": self.accuracy,
			"success_prob": self.success_prob,
			"outcomes": self.table(),
		}


def amplitude_estimate(machine: MachineSpec, x: str, k: int, accuracy: float, max_k: int = MAX_ANCILLA, max_steps: int = 10000) -> EstimationOutcome:
	"""
	Phase estimation on the iterate Q = U^T R U^-T (-P_π), whose eigenphases are ±2θ with sin^2 θ = ρ.

	The register is handled exactly: the states Q^m φ for m < 2^k are stacked and an FFT over m performs the inverse
	Fourier transform of the ancilla register, so the outcome distribution is computed without sampling.

	Parameters
	----------
	machine : MachineSpec
		A synchronous machine with a binary output start cell.
	x : str
		Input.
	k : int
		Ancilla width, 1 <= k <= ``max_k``.
	accuracy : float
		Outcomes with |estimate - ρ| <= accuracy count as successes.
	"""
	if not 1 <= k <= max_k:
		raise AncillaWidthError(f"ancilla width {k} outside 1..{max_k}")
	if accuracy <= 0:
		raise ValueError("Invalid accuracy. Expected a positive number.")

	forward = run(machine, x, max_steps)
	start = Configuration.initial(machine, x)
	halt_time = forward.halt_time

	def iterate(entries: dict) -> dict:
		psi = _uncompute(machine, _phase_flip(machine, Superposition(entries, halt_time)), halt_time)
		reflected = {c: -a if c == start else a for c, a in psi.entries.items()}
		return _compute(machine, Superposition(reflected, 0), halt_time).entries

	size = 2**k
	powers = [forward.final.entries]
	for _ in range(size - 1):
		powers.append(iterate(powers[-1]))

	index = {}
	for vector in powers:
		for c in vector:
			index.setdefault(c, len(index))
	stacked = np.zeros((size, len(index)), dtype=complex)
	for m, vector in enumerate(powers):
		for c, a in vector.items():
			stacked[m, index[c]] = complex(a)

	register = np.fft.fft(stacked, axis=0) / size
	distribution = np.sum(np.abs(register) ** 2, axis=1)
	folded = tuple(l if l <= size // 2 else size - l for l in range(size))
	estimates = tuple(math.sin(math.pi * f / size) ** 2 for f in folded)
	rho = forward.accept_prob
	success = float(sum(p for p, e in zip(distribution, estimates) if abs(e - rho) <= accuracy + EPS_AMP))

	logging.info(f"Estimated {machine.name} on {x!r} with k={k}: success probability {success:.6f}")
	return EstimationOutcome(k, rho, tuple(float(p) for p in distribution), folded, estimates, accuracy, success)


def predicate_machine(accepting, p: int, name: str | None = None) -> MachineSpec:
	"""
	Deterministic reversible predicate over witness words y of ``p`` symbols from {w0, w1, w2, w3}.

	The machine walks the witness tape, writes [y in accepting] on the output tape and walks back, remembering the
	prefix read so far in its state. Words are given as digit strings, e.g. ``"01"`` for (w0, w1). A mapping from the
	input symbols ``"0"``, ``"1"`` and ``"#"`` to word sets makes the predicate depend on the input cell under the
	input head, i.e. on the pair <x, y>; input symbols missing from the mapping accept no word.

	Tapes: 1 input {0,1}, 2 output, 3 witness.

	Example
	-------
	>>> pred = predicate_machine({"0": {"0"}, "1": {"0", "1", "2"}}, 1)
	>>> witness_count(pred, "0", 1), witness_count(pred, "1", 1)
	(1, 3)
	"""
	if p < 1:
		raise ValueError("Invalid p. Expected a positive integer.")
	if isinstance(accepting, dict):
		if set(accepting) - {"0", "1", BLANK}:
			raise ValueError("Invalid accepting. Expected input symbols 0, 1 or # as keys.")
		by_input = {symbol: frozenset("".join(w) for w in words) for symbol, words in accepting.items()}
	else:
		accepted = frozenset("".join(w) for w in accepting)
		by_input = {symbol: accepted for symbol in ("0", "1", BLANK)}
	if any(len(w) != p or set(w) - set("0123") for words in by_input.values() for w in words):
		raise ValueError("Invalid accepting. Expected words of p digits 0-3.")

	assembly = Assembly([{"0", "1"}, {"0", "1"}, set(WITNESS_SYMBOLS)])
	one = Scalar.one(True)
	still = (0, 0, 0)
	right, left = (0, 0, 1), (0, 0, -1)
	words = ["".join(w) for length in range(p + 1) for w in itertools.product("0123", repeat=length)]

	for w in words:
		if len(w) < p:
			assembly.state(f"f{w}")
	for w in words:
		if len(w) >= 1:
			assembly.state(f"b{w}")
	done = assembly.state("done")

	for w in words:
		if len(w) >= p:
			continue
		for digit in "0123":
			symbol = WITNESS_SYMBOLS[int(digit)]
			for read in assembly.vectors(t1={BLANK}, t2={symbol}):
				if len(w) + 1 < p:
					assembly.add(f"f{w}", read, [(one, f"f{w}{digit}", read, right)])
				else:
					bit = "1" if w + digit in by_input.get(read[0], ()) else "0"
					assembly.add(f"f{w}", read, [(one, f"b{w}{digit}", (read[0], bit, read[2]), still)])

	for u in words:
		if not u:
			continue
		symbol = WITNESS_SYMBOLS[int(u[-1])]
		for read in assembly.vectors(t1={"0", "1"}, t2={symbol}):
			if len(u) > 1:
				assembly.add(f"b{u}", read, [(one, f"b{u[:-1]}", read, left)])
			else:
				assembly.add(f"b{u}", read, [(one, done, read, still)])

	input_alphabets = [{"0", "1"}, set(), set()]
	count = len(set().union(*by_input.values()))
	return assembly.build(name or f"pred-{p}-{count}", "f", [done], TapeRoles(input=0, output=1, witness=2), input_alphabets)


def sharp_p_embed(predicate: MachineSpec, p: int) -> MachineSpec:
	"""
	Put ``p`` fresh witness cells into the uniform superposition over the four witness symbols, copy each symbol to
	a storage tape and run ``predicate``. The acceptance probability is (number of accepted witnesses) / 4^p.

	Raises NotPermutationError unless every amplitude of ``predicate`` is exactly 1.

	Example
	-------
	>>> embedded = sharp_p_embed(predicate_machine({"0", "1"}, 1), 1)
	>>> run(embedded, "0").accept
	Scalar(1/2)
	"""
	if p < 1:
		raise ValueError("Invalid p. Expected a positive integer.")
	if predicate.roles.witness is None:
		raise RolePrereqError(f"{predicate.name} declares no witness tape")
	for (state, symbols), transitions in predicate.delta.items():
		for t in transitions:
			if not t.amplitude.is_exact or t.amplitude != 1:
				raise NotPermutationError(f"{predicate.name}: row ({state}; {','.join(symbols)}) has amplitude {t.amplitude.to_literal()}")

	k = predicate.tape_count
	witness, storage = predicate.roles.witness, k
	alphabets = list(predicate.tape_alphabets) + [set(WITNESS_SYMBOLS)]
	assembly = Assembly(alphabets)
	one, half = Scalar.one(True), Scalar(Fraction(1, 2))
	forward = assembly.move(**{f"t{witness}": 1, f"t{storage}": 1})
	backward = assembly.move(**{f"t{witness}": -1, f"t{storage}": -1})

	generators = [assembly.state(f"g{j}") for j in range(p)]
	rewinds = [assembly.state(f"r{j}") for j in range(p + 1)]
	enter = assembly.state("enter")
	tape_map = list(range(k))
	assembly.embed(predicate, "p.", tape_map)
	back = add_entry(assembly, enter, predicate, "p.", tape_map)

	for j, state in enumerate(generators):
		following = generators[j + 1] if j + 1 < p else rewinds[p]
		for read in assembly.vectors(**{f"t{witness}": {BLANK}, f"t{storage}": {BLANK}}):
			entries = []
			for symbol in WITNESS_SYMBOLS:
				write = tuple(symbol if i in (witness, storage) else s for i, s in enumerate(read))
				entries.append((half, following, write, forward))
			assembly.add(state, read, entries)

	for j in range(p, 0, -1):
		for read in assembly.vectors():
			assembly.add(rewinds[j], read, [(one, rewinds[j - 1], read, backward)])
	for read in assembly.vectors():
		assembly.add(rewinds[0], read, [(one, enter, read, back)])

	input_alphabets = list(predicate.input_alphabets) + [frozenset()]
	finals = ["p." + q for q in predicate.finals]
	return assembly.build(f"sharp-{predicate.name}", generators[0], finals, predicate.roles, input_alphabets)


def witness_count(predicate: MachineSpec, x: str, p: int) -> int:
	"""Brute-force count of witness words accepted by ``predicate`` on ``x``."""
	count = 0
	for word in itertools.product(WITNESS_SYMBOLS, repeat=p):
		configuration = Configuration.initial(predicate, x, {predicate.roles.witness: word})
		result = run_from(predicate, configuration)
		count += 1 if result.accept == 1 else 0
	return count


def run_from(machine: MachineSpec, configuration: Configuration, max_steps: int = 10000) -> RunResult:
	return run_superposition(machine, Superposition.basis(configuration, machine.exact), max_steps)


@functools.lru_cache(maxsize=None)
def dj_machine(n: int, max_n: int = MAX_DJ_N, width: int | None = None) -> MachineSpec:
	"""
	Oracle machine for words of length N = n^2: prepare H^N|0^N> H|1> on the query tape while copying the word to the
	query list, query once, erase the list while applying H^N again, and output 1 iff the query word reads 0^N.
	``width`` overrides N (at most max_n^2).

	Tapes: 1 input, 2 output, 3 query, 4 query list.
	"""
	width = _dj_width(n, max_n, width)
	assembly = Assembly([{"0", "1"}, {"0", "1"}, {"0", "1"}, {"0", "1", "/"}])
	one, h = Scalar.one(True), _hadamard(True)
	blank = {BLANK}
	still = (0, 0, 0, 0)
	pair_right, pair_left = (0, 0, 1, 1), (0, 0, -1, -1)
	query_right, query_left = (0, 0, 1, 0), (0, 0, -1, 0)

	writers = [assembly.state(f"w{j}") for j in range(width + 1)]
	pre, post = assembly.state("qp"), assembly.state("qa")
	erasers = {j: assembly.state(f"u{j}") for j in range(width - 1, -2, -1)}
	words = ["".join(w) for length in range(width + 1) for w in itertools.product("01", repeat=length)]
	for w in words:
		if len(w) < width:
			assembly.state(f"f{w}")
	for w in words:
		if w:
			assembly.state(f"b{w}")
	done = assembly.state("done")

	for j in range(width):
		for read in assembly.vectors(t1=blank, t2=blank, t3=blank):
			entries = [(h, writers[j + 1], (read[0], BLANK, c, c), pair_right) for c in "01"]
			assembly.add(writers[j], read, entries)
	for read in assembly.vectors(t1=blank, t2=blank, t3=blank):
		assembly.add(writers[width], read, [(h, pre, (read[0], BLANK, "0", BLANK), still), (-h, pre, (read[0], BLANK, "1", BLANK), still)])

	for read in assembly.vectors(t1=blank, t2={"0", "1"}, t3=blank):
		assembly.add(post, read, [(one, erasers[width - 1], read, pair_left)])
	for j in range(width - 1, -1, -1):
		for a in "01":
			for read in assembly.vectors(t1=blank, t2={a}, t3={a}):
				entries = [(h if a == "0" or c == "0" else -h, erasers[j - 1], (read[0], BLANK, c, BLANK), pair_left) for c in "01"]
				assembly.add(erasers[j], read, entries)
	for read in assembly.vectors(t1=blank, t2=blank, t3=blank):
		assembly.add(erasers[-1], read, [(one, "f", read, pair_right)])

	target = "0" * width
	for w in words:
		if len(w) >= width:
			continue
		for y in "01":
			for read in assembly.vectors(t1=blank, t2={y}, t3=blank):
				if len(w) + 1 < width:
					assembly.add(f"f{w}", read, [(one, f"f{w}{y}", read, query_right)])
				else:
					bit = "1" if w + y == target else "0"
					assembly.add(f"f{w}", read, [(one, f"b{w}{y}", (read[0], bit, y, BLANK), still)])
	for u in words:
		if not u:
			continue
		for read in assembly.vectors(t1={"0", "1"}, t2={u[-1]}, t3=blank):
			if len(u) > 1:
				assembly.add(f"b{u}", read, [(one, f"b{u[:-1]}", read, query_left)])
			else:
				assembly.add(f"b{u}", read, [(one, done, read, still)])

	roles = TapeRoles(input=0, output=1, query=2, qlist=3)
	input_alphabets = [{"0", "1"}, set(), set(), set()]
	name = f"dj-{n}" if width == n * n else f"dj-{n}-w{width}"
	return assembly.build(name, writers[0], [done], roles, input_alphabets, oracle_states=(pre, post))


def _dj_width(n: int, max_n: int, width: int | None) -> int:
	if n < 1:
		raise ValueError("Invalid n. Expected a positive integer.")
	if n > max_n:
		raise WidthError(f"n = {n} exceeds the width bound {max_n}")
	if width is None:
		return n * n
	if width < 1:
		raise ValueError("Invalid width. Expected a positive integer.")
	if width > max_n * max_n:
		raise WidthError(f"query width {width} exceeds the bound {max_n * max_n}")
	return width


def is_good(oracle: Oracle, n: int, width: int | None = None) -> bool:
	"""Whether the length-n^2 block of ``oracle`` is empty, full or balanced."""
	width = n * n if width is None else width
	size = len(oracle.block(width))
	return size in (0, 2**width, 2 ** (width - 1))


def dj_target(oracle: Oracle, n: int, width: int | None = None) -> Fraction:
	"""2^(-2N) (|A_N| - |Σ^N \\ A_N|)^2 for the length-N block A_N, N = n^2."""
	width = n * n if width is None else width
	inside = len(oracle.block(width))
	return Fraction((inside - (2**width - inside)) ** 2, 4**width)


@dataclass(frozen=True)
class DjOutcome:
	value: float
	run: RunResult
	census: int
	good: bool

	def to_report(self) -> dict:
		return {"value": self.value, "census": self.census, "good": self.good, "run": self.run.to_report()}


def dj_oracle_value(oracle: Oracle, n: int, max_n: int = MAX_DJ_N, max_steps: int = 10000, width: int | None = None) -> DjOutcome:
	"""
	Probability that the Deutsch-Jozsa style machine outputs 1 relative to the length-n^2 block of ``oracle``.

	Example
	-------
	>>> dj_oracle_value(Oracle(), 1).value
	1.0
	"""
	width = _dj_width(n, max_n, width)
	block = Oracle(oracle.block(width), oracle.name)
	result, _ = run_with_oracle(dj_machine(n, max_n, width), block, "0" * n, max_steps=max_steps)
	return DjOutcome(result.accept_prob, result, len(block), is_good(block, n, width))


def bv_oracle(x: str, hidden: str) -> Oracle:
	"""Oracle containing <x, z> exactly when hidden . z = 1 (mod 2)."""
	if set(hidden) - {"0", "1"}:
		raise ValueError("Invalid hidden. Expected a binary string.")
	members = []
	for bits in itertools.product("01", repeat=len(hidden)):
		z = "".join(bits)
		if sum(int(a) & int(b) for a, b in zip(hidden, z)) % 2:
			members.append(pairing(x, z))
	return Oracle(frozenset(members), f"bv-{hidden}")


def _decode_hidden(oracle: Oracle, x: str, p: int) -> str:
	answers = {}
	for bits in itertools.product("01", repeat=p):
		z = "".join(bits)
		answers[z] = 1 if oracle.contains(pairing(x, z)) else 0
	hidden = "".join(str(answers["0" * i + "1" + "0" * (p - i - 1)]) for i in range(p))
	for z, answer in answers.items():
		if sum(int(a) & int(b) for a, b in zip(hidden, z)) % 2 != answer:
			raise EncodingError(f"{oracle.name} is not a dot-product oracle for x={x!r}: z={z} answers {answer}")
	return hidden


@dataclass(frozen=True)
class BvOutcome:
	hidden: str
	distribution: dict
	inner_fidelity: float

	@property
	def recovered_prob(self) -> float:
		return self.distribution.get(self.hidden, 0.0)

	def to_report(self) -> dict:
		return {"hidden": self.hidden, "inner_fidelity": self.inner_fidelity, "recovered_prob": self.recovered_prob, "distribution": self.distribution}


def bv_recover(oracle: Oracle, x: str, p: int, inner_fidelity: float = 1.0) -> BvOutcome:
	"""
	Recover the hidden string f(x) from one parallel pass of dot-product queries.

	The register starts in the uniform superposition over z, the oracle pass kicks back (-1)^(f(x).z) with amplitude
	``inner_fidelity`` and leaves the rest in an orthogonal junk register that stays uniform, then H^p is applied and
	the readout distribution is returned.

	Example
	-------
	>>> bv_recover(bv_oracle("1", "101"), "1", 3).recovered_prob
	1.0
	"""
	if p < 1:
		raise ValueError("Invalid p. Expected a positive integer.")
	if not 0.0 <= inner_fidelity <= 1.0:
		raise ValueError("Invalid inner_fidelity. Expected a number in [0, 1].")

	hidden = _decode_hidden(oracle, x, p)
	hadamard = functools.reduce(np.kron, [np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)] * p)
	signs = np.array([(-1) ** (sum(int(a) & int(b) for a, b in zip(hidden, format(z, f"0{p}b"))) % 2) for z in range(2**p)], dtype=float)
	uniform = np.full(2**p, 2 ** (-p / 2))

	good = hadamard @ (inner_fidelity * signs * uniform)
	junk = hadamard @ (math.sqrt(1.0 - inner_fidelity**2) * uniform)
	probabilities = np.abs(good) ** 2 + np.abs(junk) ** 2
	distribution = {format(i, f"0{p}b"): float(q) for i, q in enumerate(probabilities) if q > EPS_AMP**2}
	return BvOutcome(hidden, distribution, inner_fidelity)
