import itertools
import logging
from dataclasses import dataclass

from qtmlab.qtmlab import QtmlabException
from .machine import MachineSpec, Transition
from .scalar import EPS_NORM, QuadraticSurd, Scalar


class NotUnidirectionalError(QtmlabException):
	pass


class RowDefectError(QtmlabException):
	pass


class AdmissibilityError(QtmlabException):
	pass


NATURAL = "nat"

# E_d per head direction: the offsets ε compatible with a move d
_OFFSETS = {-1: (-2, -1), 0: (-1, 0, 1), 1: (1, 2)}


@dataclass(frozen=True)
class Violation:
	condition: str
	witness: tuple
	residual: float

	def to_report(self) -> dict:
		return {"condition": self.condition, "witness": _witness_text(self.witness), "residual": self.residual}


@dataclass(frozen=True)
class WellFormednessReport:
	"""
	Result of the three local well-formedness conditions. ``passed`` holds iff there are no violations.
	"""

	machine: str
	violations: tuple = ()

	@property
	def passed(self) -> bool:
		return not self.violations

	def of(self, condition: str) -> list:
		return [v for v in self.violations if v.condition == condition]

	def to_report(self) -> dict:
		return {"machine": self.machine, "passed": self.passed, "violations": [v.to_report() for v in self.violations]}


def _witness_text(witness):
	if isinstance(witness, tuple) and witness and isinstance(witness[0], tuple):
		return [_witness_text(w) for w in witness]
	parts = []
	for item in witness:
		parts.append(",".join(str(x) for x in item) if isinstance(item, tuple) else str(item))
	return "(" + "; ".join(parts) + ")"


def oracle_rows(machine: MachineSpec) -> dict:
	"""Pseudo-rows of the pre-query state: identity into the post-query state, no head moves."""
	if machine.oracle_states is None:
		return {}
	pre, post = machine.oracle_states
	one = Scalar.one(machine.exact)
	still = (0,) * machine.tape_count
	return {(pre, symbols): (Transition(one, post, symbols, still),) for symbols in machine.symbol_vectors}


def local_rows(machine: MachineSpec) -> dict:
	return {**machine.delta, **oracle_rows(machine)}


def _is_zero(value: Scalar) -> bool:
	return value.is_zero()


def _unit_length(rows: dict) -> list:
	violations = []
	for key, transitions in rows.items():
		norm = Scalar.zero(True)
		for t in transitions:
			norm = norm + t.amplitude.abs2()
		defect = norm - 1
		if defect.is_exact:
			ok = defect.is_zero()
		else:
			ok = abs(complex(defect)) <= EPS_NORM
		if not ok:
			violations.append(Violation("unit-length", key, abs(complex(defect))))
	return violations


def _orthogonality(rows: dict) -> list:
	keys = list(rows)
	by_coordinate = {}
	for i, key in enumerate(keys):
		for t in rows[key]:
			by_coordinate.setdefault(t.target, []).append((i, t.amplitude))

	sums = {}
	for entries in by_coordinate.values():
		for (i, a), (j, b) in itertools.combinations(entries, 2):
			pair = (i, j) if i < j else (j, i)
			term = a.conjugate() * b
			sums[pair] = sums[pair] + term if pair in sums else term

	violations = []
	for (i, j), inner in sorted(sums.items()):
		if not _is_zero(inner):
			violations.append(Violation("orthogonality", (keys[i], keys[j]), abs(complex(inner))))
	return violations


def _offset_size(move: tuple) -> int:
	size = 1
	for d in move:
		size *= len(_OFFSETS[d])
	return size


def _weight(n: int) -> tuple:
	"""
	Split 1/sqrt(n), n = 2^a 3^b, into (surd, odd) with 1/sqrt(n) = surd if b is even, surd/sqrt(3) if b is odd.
	"""
	a = b = 0
	while n % 2 == 0:
		n //= 2
		a += 1
	while n % 3 == 0:
		n //= 3
		b += 1
	surd = QuadraticSurd.rt2_power(-a) / (3 ** (b // 2))
	return surd, b % 2 == 1


class _SeparabilitySum:
	"""Exact accumulator of a + c/sqrt(3) with a, c in Q(sqrt 2); approximate sums collapse to one complex."""

	def __init__(self):
		self.even = Scalar.zero(True)
		self.odd = Scalar.zero(True)
		self.approx = 0j
		self.exact = True

	def add(self, product: Scalar, n: int):
		if product.is_exact:
			surd, odd = _weight(n)
			if odd:
				self.odd = self.odd + product * Scalar(surd)
			else:
				self.even = self.even + product * Scalar(surd)
		else:
			self.exact = False
			self.approx += complex(product) / n**0.5

	def value(self) -> complex:
		return complex(self.even) + complex(self.odd) / 3**0.5 + self.approx

	def is_zero(self) -> bool:
		if self.exact:
			return self.even.is_zero() and self.odd.is_zero()
		return abs(self.value()) <= EPS_NORM


def _separability(rows: dict) -> list:
	# label (p, σ, τ, ε) -> coordinate (q, h) -> {|E_d|: amplitude}
	vectors = {}
	for (p, sigma), transitions in rows.items():
		for t in transitions:
			n = _offset_size(t.move)
			for eps in itertools.product(*(_OFFSETS[d] for d in t.move)):
				h = tuple(NATURAL if e == 0 else 2 * d - e for d, e in zip(t.move, eps))
				bucket = vectors.setdefault((p, sigma, t.write, eps), {}).setdefault((t.state, h), {})
				bucket[n] = bucket[n] + t.amplitude if n in bucket else t.amplitude

	labels = list(vectors)
	by_coordinate = {}
	for i, label in enumerate(labels):
		for coordinate, weighted in vectors[label].items():
			by_coordinate.setdefault(coordinate, []).append((i, weighted))

	sums = {}
	for entries in by_coordinate.values():
		for (i, a), (j, b) in itertools.combinations(entries, 2):
			if labels[i][3] == labels[j][3]:
				continue
			if i > j:
				i, j, a, b = j, i, b, a
			acc = sums.setdefault((i, j), _SeparabilitySum())
			for n1, x in a.items():
				for n2, y in b.items():
					acc.add(x.conjugate() * y, n1 * n2)

	violations = []
	for (i, j), acc in sorted(sums.items(), key=lambda item: item[0]):
		if not acc.is_zero():
			violations.append(Violation("separability", (labels[i], labels[j]), abs(acc.value())))
	return violations


def check_well_formed(machine: MachineSpec) -> WellFormednessReport:
	"""
	Evaluate the local conditions that make the time evolution of ``machine`` unitary: unit length of every row,
	orthogonality of distinct rows and separability of the ε-expanded rows with weights |E_d|^(-1/2).

	The pre-query state of an oracle machine contributes its identity pseudo-rows.

	Parameters
	----------
	machine : MachineSpec
		The machine to check.

	Example
	-------
	>>> from qtmlab.machine import parse_machine
	>>> from qtmlab.utils import read_text
	>>> check_well_formed(parse_machine(read_text("had.qtm"))).passed
	True
	"""
	rows = local_rows(machine)
	violations = _unit_length(rows) + _orthogonality(rows) + _separability(rows)
	return WellFormednessReport(machine=machine.name, violations=tuple(violations))


def direction_map(machine: MachineSpec, rows: dict | None = None) -> dict:
	"""
	Head-direction vector of every state entered by some row. Raises NotUnidirectionalError on a conflict.
	"""
	rows = local_rows(machine) if rows is None else rows
	directions = {}
	for (p, sigma), transitions in rows.items():
		for t in transitions:
			previous = directions.setdefault(t.state, t.move)
			if previous != t.move:
				raise NotUnidirectionalError(f"state {t.state!r} is entered with directions {previous} and {t.move}")
	return directions


def is_unidirectional(machine: MachineSpec) -> bool:
	try:
		direction_map(machine)
	except NotUnidirectionalError:
		return False
	return True


def _prune(vector: dict) -> dict:
	return {c: v for c, v in vector.items() if not v.is_zero()}


def _normalized_remainder(candidate: dict, overlapping, exact):
	"""
	Normalized part of ``candidate`` orthogonal to the orthonormal vectors ``overlapping``; None when it vanishes or
	its norm has no square root in the amplitude field.
	"""
	w = dict(candidate)
	for b in overlapping:
		overlap = Scalar.zero(exact)
		for coordinate, value in candidate.items():
			if coordinate in b:
				overlap = overlap + b[coordinate].conjugate() * value
		if overlap.is_zero():
			continue
		for coordinate, value in b.items():
			w[coordinate] = w.get(coordinate, Scalar.zero(exact)) - overlap * value
	w = _prune(w)

	norm_sq = Scalar.zero(exact)
	for value in w.values():
		norm_sq = norm_sq + value.abs2()
	if norm_sq.is_zero():
		return None

	root = norm_sq.sqrt()
	if root is None:
		logging.debug(f"Completion skips a candidate of squared norm {norm_sq.to_literal()}.")
		return None
	return {c: v / root for c, v in w.items()}


def _reflect(x: dict, w: dict, w_sq: Scalar, exact) -> dict:
	# x - 2 w <w, x> / <w, w>
	dot = Scalar.zero(exact)
	for coordinate, value in w.items():
		if coordinate in x:
			dot = dot + value.conjugate() * x[coordinate]
	if dot.is_zero():
		return x
	factor = (dot + dot) / w_sq
	out = dict(x)
	for coordinate, value in w.items():
		out[coordinate] = out.get(coordinate, Scalar.zero(exact)) - factor * value
	return _prune(out)


def _householder_extension(vectors, coordinates, exact) -> list:
	"""
	Extend the orthonormal ``vectors`` to a basis of span(``coordinates``) with reflections I - 2ww*/<w, w>.

	Each reflection swaps a pivot basis vector e_k with the current vector, w = e_k - v, and needs only field
	operations as long as v_k is real. Exact amplitudes are real, so exact completions never leave Q(sqrt 2).
	"""
	one = Scalar.one(exact)
	reflections = []
	pivots = set()
	for v in vectors:
		x = v
		for w, w_sq in reflections:
			x = _reflect(x, w, w_sq, exact)
		eligible = [c for c in coordinates if c not in pivots and (c not in x or abs(x[c].imag) <= EPS_NORM)]
		if not eligible:
			raise AdmissibilityError("orthonormal completion found no real pivot for a complex row")
		pivot = min(eligible, key=lambda c: x[c].real if c in x else 0.0)
		pivots.add(pivot)

		w = {c: -value for c, value in x.items()}
		w[pivot] = w.get(pivot, Scalar.zero(exact)) + one
		w = _prune(w)
		if not w:
			continue
		w_sq = Scalar.zero(exact)
		for value in w.values():
			w_sq = w_sq + value.abs2()
		reflections.append((w, w_sq))

	extension = []
	for c in coordinates:
		if c in pivots:
			continue
		x = {c: one}
		for w, w_sq in reversed(reflections):
			x = _reflect(x, w, w_sq, exact)
		extension.append(x)
	return extension


def _components(vectors) -> list:
	"""Groups of vectors connected through shared coordinates, as (coordinates, vectors) pairs."""
	parent = {}

	def find(c):
		while parent.setdefault(c, c) != c:
			parent[c] = parent[parent[c]]
			c = parent[c]
		return c

	vectors = [v for v in vectors if v]
	for vector in vectors:
		first, *rest = vector
		for c in rest:
			parent[find(c)] = find(first)

	groups = {}
	for vector in vectors:
		coordinates, members = groups.setdefault(find(next(iter(vector))), (set(), []))
		coordinates.update(vector)
		members.append(vector)
	return list(groups.values())


def _overlapping(index: dict, coordinates) -> list:
	seen = {}
	for c in coordinates:
		for vector in index.get(c, ()):
			seen.setdefault(id(vector), vector)
	return list(seen.values())


def complete_unidirectional(partial: MachineSpec) -> MachineSpec:
	"""
	Fill the undefined rows of a unidirectional partial machine with an orthonormal completion.

	Coordinates (q, τ) untouched by the defined rows become basis rows directly. Inside each connected block of the
	defined rows the missing directions come from Gram-Schmidt on basis vectors while the remaining norm has a root in
	the amplitude field, and from Householder reflections after that, so exact completions stay inside Q(sqrt 2).
	Every row enters q with the direction vector of q (all N for states that are never entered). Missing rows of final
	states take the free coordinates of the initial state first, so completed rows of other states never enter it.

	Parameters
	----------
	partial : MachineSpec
		Machine whose ``delta`` may lack rows.

	Example
	-------
	>>> from qtmlab.machine import parse_machine
	>>> from qtmlab.utils import read_text
	>>> had = parse_machine(read_text("had.qtm"))
	>>> partial = had.with_changes(delta={k: v for k, v in had.delta.items() if k != ("q0", ("#",))})
	>>> complete_unidirectional(partial).delta[("q0", ("#",))][0].state
	'qf'
	"""
	rows = local_rows(partial)
	directions = direction_map(partial, rows)

	defects = _unit_length(rows) + _orthogonality(rows)
	if defects:
		first = defects[0]
		raise RowDefectError(f"defined rows violate {first.condition} at {_witness_text(first.witness)} (residual {first.residual:.3g})")

	missing = [key for key in partial.row_keys() if key not in partial.delta]
	missing.sort(key=lambda key: key[0] not in partial.finals)
	if not missing:
		return partial

	exact = partial.exact
	still = (0,) * partial.tape_count
	coordinates = sorted(((q, tau) for q in partial.states for tau in partial.symbol_vectors), key=lambda c: c[0] != partial.initial)

	index = {}
	defined = []
	for transitions in rows.values():
		vector = {(t.state, t.write): t.amplitude for t in transitions}
		defined.append(vector)
		for coordinate in vector:
			index.setdefault(coordinate, []).append(vector)

	new_vectors = [{c: Scalar.one(exact)} for c in coordinates if c not in index]

	order = {c: i for i, c in enumerate(coordinates)}
	for support, members in sorted(_components(defined), key=lambda group: min(order[c] for c in group[0])):
		needed = len(support) - len(members)
		candidates = sorted(support, key=order.__getitem__)
		found = []
		for candidate in candidates:
			if len(found) == needed:
				break
			vector = _normalized_remainder({candidate: Scalar.one(exact)}, _overlapping(index, [candidate]), exact)
			if vector is not None:
				for coordinate in vector:
					index[coordinate].append(vector)
				found.append(vector)
		if len(found) < needed:
			found += _householder_extension(members + found, candidates, exact)
		new_vectors += found

	if len(new_vectors) != len(missing):
		raise AdmissibilityError(f"completion found {len(new_vectors)} free directions for {len(missing)} missing rows")

	delta = dict(partial.delta)
	for key, vector in zip(missing, new_vectors):
		delta[key] = tuple(Transition(amp, q, tau, directions.get(q, still)) for (q, tau), amp in vector.items())

	return partial.with_changes(delta=delta)
