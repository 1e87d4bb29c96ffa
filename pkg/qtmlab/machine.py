import itertools
import re
from dataclasses import dataclass, field, replace
from functools import cached_property

from qtmlab.qtmlab import QtmlabException
from .scalar import Scalar, parse_amplitude
from .utils import read_text


BLANK = "#"
WILDCARD = "*"
MOVES = {"L": -1, "N": 0, "R": 1}
MOVE_NAMES = {-1: "L", 0: "N", 1: "R"}


class MachineSyntaxError(QtmlabException):
	"""Malformed machine description; carries the 1-based line and column of the problem."""

	def __init__(self, message, line=None, column=None):
		self.line = line
		self.column = column
		where = f"line {line}, column {column}: " if line is not None else ""
		super().__init__(f"{where}{message}")


class TotalityError(QtmlabException):
	pass


class RoleError(QtmlabException):
	pass


class RolePrereqError(QtmlabException):
	pass


@dataclass(frozen=True)
class Transition:
	amplitude: Scalar
	state: str
	write: tuple[str, ...]
	move: tuple[int, ...]

	@property
	def target(self) -> tuple:
		return self.state, self.write, self.move


@dataclass(frozen=True)
class TapeRoles:
	"""0-based tape indices of the designated tapes."""

	input: int
	output: int
	query: int | None = None
	qlist: int | None = None
	witness: int | None = None

	def as_dict(self) -> dict:
		return {name: getattr(self, name) for name in ("input", "output", "query", "qlist", "witness") if getattr(self, name) is not None}


@dataclass(frozen=True)
class MachineSpec:
	"""
	A k-tape quantum Turing machine.

	``delta`` maps (state, k-symbol tuple) to a tuple of Transition. A machine built by ``parse_machine`` or
	``build_machine`` is total over every non-pre-query state; the pre-query state of an oracle machine has no rows, its
	step is the oracle call.

	Parameters
	----------
	name : str
		Identifier of the machine.
	tape_count : int
		Number of tapes k.
	input_alphabets : tuple[frozenset]
		Per-tape input alphabets.
	tape_alphabets : tuple[frozenset]
		Per-tape alphabets, each containing its input alphabet and the blank ``#``.
	states : tuple[str]
		The states, in declaration order.
	initial : str
		Initial state.
	finals : frozenset[str]
		Final states.
	delta : dict
		The transition table.
	roles : TapeRoles
		Designated tapes.
	oracle_states : tuple[str, str] | None
		(pre-query state, post-query state) of an oracle machine.
	exact : bool
		Whether amplitudes are exact scalars.
	"""

	name: str
	tape_count: int
	input_alphabets: tuple
	tape_alphabets: tuple
	states: tuple
	initial: str
	finals: frozenset
	delta: dict = field(repr=False)
	roles: TapeRoles = None
	oracle_states: tuple | None = None
	exact: bool = True

	@property
	def pre_query(self) -> str | None:
		return self.oracle_states[0] if self.oracle_states else None

	@property
	def post_query(self) -> str | None:
		return self.oracle_states[1] if self.oracle_states else None

	def is_final(self, state: str) -> bool:
		return state in self.finals

	@cached_property
	def symbol_vectors(self) -> tuple:
		"""Every k-symbol vector of Γ_1 x ... x Γ_k, in sorted order."""
		return tuple(itertools.product(*(sorted(alphabet) for alphabet in self.tape_alphabets)))

	@cached_property
	def state_index(self) -> dict:
		return {state: i for i, state in enumerate(self.states)}

	def row_keys(self) -> list:
		"""Keys of all rows δ must define, pre-query state excluded, in canonical order."""
		return [(state, symbols) for state in self.states if state != self.pre_query for symbols in self.symbol_vectors]

	@cached_property
	def arrivals(self) -> dict:
		"""Map from a next-state to the list of (state, read symbols, Transition) entering it."""
		index = {}
		for (state, symbols), transitions in self.delta.items():
			for t in transitions:
				index.setdefault(t.state, []).append((state, symbols, t))
		return index

	def with_changes(self, **changes) -> "MachineSpec":
		return replace(self, **changes)


def _make_transition(amplitude, state, write, move) -> Transition:
	return Transition(amplitude, state, tuple(write), tuple(MOVES[m] if isinstance(m, str) else m for m in move))


def merge_entries(entries) -> tuple:
	"""Sum entries sharing (state, write, move) and drop zero amplitudes."""
	merged = {}
	for t in entries:
		key = t.target
		merged[key] = merged[key] + t.amplitude if key in merged else t.amplitude
	return tuple(Transition(amp, *key) for key, amp in merged.items() if not amp.is_zero())


def validate_machine(machine: MachineSpec, total: bool = True) -> MachineSpec:
	"""
	Check the structural invariants of a machine. Raises RoleError, TotalityError or MachineSyntaxError.
	"""
	k = machine.tape_count
	states = set(machine.states)

	if len(states) != len(machine.states):
		raise MachineSyntaxError("duplicate state declaration")
	if machine.initial not in states:
		raise MachineSyntaxError(f"unknown initial state {machine.initial!r}")
	if not machine.finals:
		raise MachineSyntaxError("at least one final state is required")
	if not machine.finals <= states:
		raise MachineSyntaxError(f"unknown final states {sorted(machine.finals - states)}")
	if machine.initial in machine.finals:
		raise MachineSyntaxError("the initial state must not be final")

	for i in range(k):
		if BLANK not in machine.tape_alphabets[i] or not machine.input_alphabets[i] <= machine.tape_alphabets[i]:
			raise MachineSyntaxError(f"tape {i + 1} alphabet must contain its input alphabet and the blank")
		if BLANK in machine.input_alphabets[i]:
			raise MachineSyntaxError(f"tape {i + 1} input alphabet must not contain the blank")

	_validate_roles(machine.roles, k)
	if machine.roles.query is not None and {"0", "1"} - machine.tape_alphabets[machine.roles.query]:
		raise RoleError("the query tape alphabet must contain 0 and 1")

	if machine.oracle_states is not None:
		pre, post = machine.oracle_states
		if pre not in states or post not in states or pre == post:
			raise MachineSyntaxError("oracle states must be two distinct declared states")
		if machine.roles.query is None:
			raise RoleError("an oracle machine needs a query tape")
		if pre in machine.finals or pre == machine.initial:
			raise MachineSyntaxError("the pre-query state must be neither initial nor final")

	for (state, symbols), transitions in machine.delta.items():
		if state == machine.pre_query:
			raise MachineSyntaxError(f"the pre-query state {state!r} must not have transition rows")
		if state not in states or len(symbols) != k or any(s not in machine.tape_alphabets[i] for i, s in enumerate(symbols)):
			raise MachineSyntaxError(f"invalid row ({state}; {','.join(symbols)})")
		for t in transitions:
			if t.state not in states:
				raise MachineSyntaxError(f"unknown state {t.state!r} in row ({state}; {','.join(symbols)})")
			if len(t.write) != k or len(t.move) != k:
				raise MachineSyntaxError(f"row ({state}; {','.join(symbols)}) has an entry of the wrong width")
			if any(s not in machine.tape_alphabets[i] for i, s in enumerate(t.write)):
				raise MachineSyntaxError(f"row ({state}; {','.join(symbols)}) writes a symbol outside the tape alphabet")

	if total:
		for key in machine.row_keys():
			if key not in machine.delta:
				raise TotalityError(f"missing transition row ({key[0]}; {','.join(key[1])})")

	return machine


def _validate_roles(roles: TapeRoles, k: int):
	if roles is None:
		raise RoleError("roles input=<i> output=<j> must be declared")

	named = roles.as_dict()
	for role, index in named.items():
		if not 0 <= index < k:
			raise RoleError(f"role {role}={index + 1} is outside tapes 1..{k}")

	exclusive = [index for role, index in named.items() if role in ("query", "qlist", "witness")]
	if len(set(exclusive)) != len(exclusive) or {roles.input, roles.output} & set(exclusive):
		raise RoleError("query, qlist and witness tapes must be distinct from every other role")


def build_machine(
	name,
	alphabets,
	states,
	initial,
	finals,
	delta,
	roles,
	input_alphabets=None,
	oracle_states=None,
	exact=True,
	complete=False,
) -> MachineSpec:
	"""
	Assemble a machine from Python values. ``delta`` maps (state, symbols) to lists of (amplitude, state, write, move)
	tuples or Transition objects. With ``complete=True`` the undefined rows are filled by orthonormal completion.

	Example
	-------
	>>> m = build_machine("flip", [{"0", "1"}], ["q0", "qf"], "q0", ["qf"], {("q0", ("0",)): [(Scalar(1), "qf", ("1",), "N")]},
	...     TapeRoles(0, 0), complete=True)
	"""
	tape_alphabets = tuple(frozenset(set(alphabet) | {BLANK}) for alphabet in alphabets)
	if input_alphabets is None:
		input_alphabets = tuple(frozenset(alphabet) - {BLANK} if i == roles.input else frozenset() for i, alphabet in enumerate(alphabets))
	else:
		input_alphabets = tuple(frozenset(alphabet) for alphabet in input_alphabets)

	table = {}
	for key, entries in delta.items():
		state, symbols = key
		transitions = [e if isinstance(e, Transition) else _make_transition(*e) for e in entries]
		table[(state, tuple(symbols))] = merge_entries(transitions)

	machine = MachineSpec(
		name=name,
		tape_count=len(tape_alphabets),
		input_alphabets=input_alphabets,
		tape_alphabets=tape_alphabets,
		states=tuple(states),
		initial=initial,
		finals=frozenset(finals),
		delta=table,
		roles=roles,
		oracle_states=tuple(oracle_states) if oracle_states else None,
		exact=exact,
	)
	validate_machine(machine, total=False)

	if complete:
		from .wellformed import complete_unidirectional

		machine = complete_unidirectional(machine)

	return validate_machine(machine, total=True)


_ON = re.compile(r"^on\s*\(\s*(?P<state>[^;()\s]+)\s*;\s*(?P<syms>[^;()]*)\)\s*:\s*$")
_ENTRY = re.compile(r"^(?P<amp>.+?)\s*->\s*\(\s*(?P<state>[^;()\s]+)\s*;\s*(?P<syms>[^;()]*);\s*(?P<moves>[^;()]*)\)\s*$")
_TAPE = re.compile(r"^tape\s+(?P<i>\d+)\s+input\s*\{(?P<input>[^}]*)\}\s*work\s*\{(?P<work>[^}]*)\}\s*$")
_IDENT = re.compile(r"^[A-Za-z0-9_.'~\-]+$")


def _symbols(text):
	return [s for s in re.split(r"[\s,]+", text.strip()) if s]


def parse_machine(text: str, mode: str | None = None) -> MachineSpec:
	"""
	Parse a machine description document.

	Parameters
	----------
	text : str
		The document (see README for the grammar).
	mode : str | None
		"exact", "approx", or None to use exact arithmetic unless a ``cis(...)`` literal is present.

	Example
	-------
	>>> from qtmlab.utils import read_text
	>>> had = parse_machine(read_text("had.qtm"))
	>>> len(had.states), had.tape_count, len(had.delta)
	(2, 1, 6)
	"""
	if mode not in (None, "exact", "approx"):
		raise ValueError('Invalid mode. Expected "exact" or "approx".')
	exact = ("cis(" not in text) if mode is None else (mode == "exact")

	header = {}
	tapes = {}
	blocks = []
	current = None
	complete = False

	for line_no, raw in enumerate(text.splitlines(), start=1):
		line = raw.split("%", 1)[0].rstrip()
		if not line.strip():
			continue
		column = len(line) - len(line.lstrip()) + 1
		stripped = line.strip()
		keyword = stripped.split()[0]

		if line[0].isspace() and current is not None and "->" in stripped:
			match = _ENTRY.match(stripped)
			if match is None:
				raise MachineSyntaxError(f"malformed transition entry {stripped!r}", line_no, column)
			try:
				amplitude = parse_amplitude(match["amp"], exact)
			except ValueError as e:
				raise MachineSyntaxError(str(e), line_no, column) from e
			moves = _symbols(match["moves"])
			if any(m not in MOVES for m in moves):
				raise MachineSyntaxError(f"directions must be L, N or R: {match['moves']!r}", line_no, column + match.start("moves"))
			current["entries"].append((amplitude, match["state"], _symbols(match["syms"]), [MOVES[m] for m in moves], line_no))
			continue

		current = None
		if keyword == "on":
			match = _ON.match(stripped)
			if match is None:
				raise MachineSyntaxError(f"malformed row header {stripped!r}", line_no, column)
			current = {"state": match["state"], "read": _symbols(match["syms"]), "entries": [], "line": line_no}
			blocks.append(current)
		elif keyword == "tape":
			match = _TAPE.match(stripped)
			if match is None:
				raise MachineSyntaxError(f"malformed tape declaration {stripped!r}", line_no, column)
			tapes[int(match["i"])] = (_symbols(match["input"]), _symbols(match["work"]), line_no)
		elif keyword == "roles":
			roles = {}
			for item in stripped.split()[1:]:
				role, _, value = item.partition("=")
				if role not in ("input", "output", "query", "qlist", "witness") or not value.isdigit():
					raise MachineSyntaxError(f"invalid role {item!r}", line_no, column + stripped.find(item))
				if role in roles:
					raise RoleError(f"line {line_no}: role {role} declared twice")
				roles[role] = int(value) - 1
			header["roles"] = roles
		elif keyword == "complete" and stripped == "complete":
			complete = True
		elif keyword in ("qtm", "tapes", "states", "initial", "final", "oracle"):
			if keyword in header:
				raise MachineSyntaxError(f"duplicate {keyword!r} declaration", line_no, column)
			values = stripped.split()[1:]
			bad = [v for v in values if not _IDENT.match(v)]
			if not values or bad:
				raise MachineSyntaxError(f"invalid {keyword!r} declaration", line_no, column)
			header[keyword] = (values, line_no)
		else:
			raise MachineSyntaxError(f"unknown declaration {keyword!r}", line_no, column)

	for keyword in ("qtm", "tapes", "states", "initial", "final"):
		if keyword not in header:
			raise MachineSyntaxError(f"missing {keyword!r} declaration")
	if "roles" not in header or "input" not in header["roles"] or "output" not in header["roles"]:
		raise RoleError("roles input=<i> output=<j> must be declared")

	k_text = header["tapes"][0][0]
	if not k_text.isdigit() or int(k_text) < 1:
		raise MachineSyntaxError("tapes must be a positive integer", header["tapes"][1], 1)
	k = int(k_text)
	if sorted(tapes) != list(range(1, k + 1)):
		raise MachineSyntaxError(f"expected one tape declaration for each of tapes 1..{k}")

	input_alphabets = tuple(frozenset(tapes[i][0]) for i in range(1, k + 1))
	tape_alphabets = tuple(frozenset(tapes[i][0]) | frozenset(tapes[i][1]) | {BLANK} for i in range(1, k + 1))
	sorted_alphabets = [sorted(a) for a in tape_alphabets]

	if len(header["initial"][0]) != 1:
		raise MachineSyntaxError("exactly one initial state is required", header["initial"][1], 1)
	if "oracle" in header and len(header["oracle"][0]) != 2:
		raise MachineSyntaxError("oracle expects <pre-query> <post-query>", header["oracle"][1], 1)

	delta = {}
	specificity = {}
	for block in sorted(blocks, key=lambda b: -sum(1 for s in b["read"] if s != WILDCARD)):
		if len(block["read"]) != k:
			raise MachineSyntaxError(f"row header reads {len(block['read'])} symbols, expected {k}", block["line"], 1)
		if not block["entries"]:
			raise MachineSyntaxError("row without transition entries", block["line"], 1)
		rank = sum(1 for s in block["read"] if s != WILDCARD)
		choices = [sorted_alphabets[i] if s == WILDCARD else [s] for i, s in enumerate(block["read"])]

		for symbols in itertools.product(*choices):
			key = (block["state"], symbols)
			if key in specificity:
				if specificity[key] == rank:
					raise MachineSyntaxError(f"duplicate row ({key[0]}; {','.join(symbols)})", block["line"], 1)
				continue

			entries = []
			for amplitude, state, written, moves, line_no in block["entries"]:
				if len(written) != k or len(moves) != k:
					raise MachineSyntaxError(f"entry must write {k} symbols and move {k} heads", line_no, 1)
				write = tuple(symbols[i] if s == WILDCARD else s for i, s in enumerate(written))
				entries.append(Transition(amplitude, state, write, tuple(moves)))
			specificity[key] = rank
			delta[key] = merge_entries(entries)

	try:
		roles = TapeRoles(**header["roles"])
	except TypeError as e:
		raise RoleError(str(e)) from e

	machine = MachineSpec(
		name=header["qtm"][0][0],
		tape_count=k,
		input_alphabets=input_alphabets,
		tape_alphabets=tape_alphabets,
		states=tuple(header["states"][0]),
		initial=header["initial"][0][0],
		finals=frozenset(header["final"][0]),
		delta=delta,
		roles=roles,
		oracle_states=tuple(header["oracle"][0]) if "oracle" in header else None,
		exact=exact,
	)
	validate_machine(machine, total=False)

	if complete:
		from .wellformed import complete_unidirectional

		machine = complete_unidirectional(machine)

	return validate_machine(machine, total=True)


def format_machine(machine: MachineSpec) -> str:
	"""
	Serialize a machine to the description format, one explicit row per (state, symbols).
	"""
	k = machine.tape_count
	lines = [f"qtm {machine.name}", f"tapes {k}"]
	for i in range(k):
		inputs = ",".join(sorted(machine.input_alphabets[i]))
		work = ",".join(sorted(machine.tape_alphabets[i] - machine.input_alphabets[i] - {BLANK}))
		lines.append(f"tape {i + 1} input {{{inputs}}} work {{{work}}}")
	lines.append("roles " + " ".join(f"{role}={index + 1}" for role, index in machine.roles.as_dict().items()))
	lines.append("states " + " ".join(machine.states))
	lines.append(f"initial {machine.initial}")
	lines.append("final " + " ".join(s for s in machine.states if s in machine.finals))
	if machine.oracle_states:
		lines.append(f"oracle {machine.oracle_states[0]} {machine.oracle_states[1]}")

	for state, symbols in machine.row_keys():
		if (state, symbols) not in machine.delta:
			continue
		transitions = machine.delta[(state, symbols)]
		lines.append(f"on ({state}; {','.join(symbols)}):")
		if not transitions:
			# a cancelled row keeps its header with a zero entry, which parses back to no entries
			lines.append(f"  0 -> ({state}; {','.join(symbols)}; {' '.join(MOVE_NAMES[0] for _ in symbols)})")
		for t in transitions:
			moves = " ".join(MOVE_NAMES[m] for m in t.move)
			lines.append(f"  {t.amplitude.to_literal()} -> ({t.state}; {','.join(t.write)}; {moves})")
	return "\n".join(lines) + "\n"


def load_machine(path: str, mode: str | None = None) -> MachineSpec:
	"""
	Parse a machine file; bare names such as ``had.qtm`` resolve to the bundled fixtures.

	Example
	-------
	>>> load_machine("had.qtm").name
	'had'
	"""
	return parse_machine(read_text(path), mode)
