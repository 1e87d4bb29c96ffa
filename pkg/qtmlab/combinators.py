import itertools
import logging

from qtmlab.qtmlab import QtmlabException
from .machine import BLANK, MachineSpec, RolePrereqError, TapeRoles, Transition, build_machine
from .scalar import Scalar
from .simulator import run
from .wellformed import direction_map


MAX_COPIES = 4
BRANCH_SYMBOLS = ("b0", "b1", "b2", "b3")


class SyncError(QtmlabException):
	pass


class BudgetError(QtmlabException):
	pass


class ConstructionError(QtmlabException):
	pass


class Assembly:
	"""
	Mutable transition table used to compose machines. Rows are added explicitly or by embedding another machine on
	a subset of the tapes; ``build`` fills the remaining rows by orthonormal completion.

	Parameters
	----------
	alphabets : list
		Per-tape alphabets of the composed machine (the blank is added).
	exact : bool
		Amplitude mode of the composed machine.
	"""

	def __init__(self, alphabets, exact=True):
		self.alphabets = [frozenset(a) | {BLANK} for a in alphabets]
		self.exact = exact
		self.states = []
		self.delta = {}

	@property
	def k(self) -> int:
		return len(self.alphabets)

	def state(self, name: str) -> str:
		if name in self.states:
			raise ConstructionError(f"state {name!r} declared twice")
		self.states.append(name)
		return name

	def fresh(self, base: str) -> str:
		name = base
		while name in self.states:
			name += "'"
		return self.state(name)

	def vectors(self, **constraints):
		"""
		Symbol vectors of the composed machine. ``constraints`` maps ``t<i>`` to the allowed symbols of tape i.
		"""
		choices = []
		for i, alphabet in enumerate(self.alphabets):
			allowed = constraints.get(f"t{i}")
			choices.append(sorted(alphabet if allowed is None else set(allowed) & alphabet))
		return itertools.product(*choices)

	def add(self, state, read, entries):
		key = (state, tuple(read))
		if key in self.delta:
			raise ConstructionError(f"row ({state}; {','.join(read)}) defined twice")
		self.delta[key] = [
			e if isinstance(e, Transition) else Transition(e[0], e[1], tuple(e[2]), tuple(e[3])) for e in entries
		]

	def move(self, **moves) -> tuple:
		return tuple(moves.get(f"t{i}", 0) for i in range(self.k))

	def embed(self, machine: MachineSpec, prefix: str, tape_map: list, guard: dict | None = None):
		"""
		Copy the non-final rows of ``machine`` with states renamed ``prefix + state``; tape i of ``machine`` becomes
		tape ``tape_map[i]``. Other tapes are read through ``guard`` (tape index -> allowed symbols), left unchanged and
		not moved.
		"""
		for state in machine.states:
			self.state(prefix + state)

		others = [i for i in range(self.k) if i not in tape_map]
		guard = guard or {}
		other_choices = [sorted(guard.get(i, self.alphabets[i])) for i in others]

		for (p, sigma), transitions in machine.delta.items():
			if p in machine.finals:
				continue
			for rest in itertools.product(*other_choices):
				read = [None] * self.k
				for i, symbol in zip(tape_map, sigma):
					read[i] = symbol
				for i, symbol in zip(others, rest):
					read[i] = symbol
				entries = []
				for t in transitions:
					write, move = list(read), [0] * self.k
					for j, i in enumerate(tape_map):
						write[i], move[i] = t.write[j], t.move[j]
					entries.append(Transition(t.amplitude, prefix + t.state, tuple(write), tuple(move)))
				self.add(prefix + p, read, entries)

	def build(self, name, initial, finals, roles, input_alphabets, oracle_states=None) -> MachineSpec:
		logging.info(f"Assembling machine {name} with {len(self.states)} states and {self.k} tapes.")
		return build_machine(
			name=name,
			alphabets=self.alphabets,
			states=self.states,
			initial=initial,
			finals=finals,
			delta=self.delta,
			roles=roles,
			input_alphabets=input_alphabets,
			oracle_states=oracle_states,
			exact=self.exact,
			complete=True,
		)


def entry_direction(machine: MachineSpec) -> tuple:
	"""Direction vector with which the non-final rows of ``machine`` enter its initial state (all N if never)."""
	inner = {key: v for key, v in machine.delta.items() if key[0] not in machine.finals}
	return direction_map(machine, inner).get(machine.initial, (0,) * machine.tape_count)


def add_entry(assembly: Assembly, pos_state: str, machine: MachineSpec, prefix: str, tape_map: list, guard: dict | None = None):
	"""
	Rows of the entry state ``pos_state``: heads sit one cell against the entry direction d0 of ``machine`` and step
	into its initial state with d0, so the copy starts with all heads on cell 0. The state feeding ``pos_state`` must
	move by -d0.
	"""
	d0 = entry_direction(machine)
	constraints = {f"t{tape_map[j]}": {BLANK} for j, d in enumerate(d0) if d != 0}
	for i, allowed in (guard or {}).items():
		constraints[f"t{i}"] = allowed
	move = [0] * assembly.k
	for j, d in enumerate(d0):
		move[tape_map[j]] = d
	for read in assembly.vectors(**constraints):
		assembly.add(pos_state, read, [(Scalar.one(assembly.exact), prefix + machine.initial, read, tuple(move))])
	return tuple(-m for m in move)


def conjugate_machine(machine: MachineSpec) -> MachineSpec:
	"""
	The machine with every amplitude replaced by its complex conjugate.

	Example
	-------
	>>> conjugate_machine(conjugate_machine(had)) == had
	True
	"""
	delta = {key: tuple(Transition(t.amplitude.conjugate(), t.state, t.write, t.move) for t in ts) for key, ts in machine.delta.items()}
	return machine.with_changes(delta=delta)


def _flip(symbol: str) -> str:
	return {"0": "1", "1": "0"}.get(symbol, symbol)


def _check_output_head(machine: MachineSpec, inputs, max_steps: int):
	output = machine.roles.output
	for x in inputs:
		for c in run(machine, x, max_steps).final.entries:
			if c.heads[output] != 0:
				raise ConstructionError(f"{machine.name} halts on {x!r} with its output head on cell {c.heads[output]}, expected cell 0")


def complement_machine(machine: MachineSpec, inputs=None, max_steps: int = 10000) -> MachineSpec:
	"""
	Simulate ``machine`` and, once it halts, flip the output-tape start cell 0 <-> 1 in one extra step.

	The flip rewrites the cell under the output head, so ``machine`` is first run on ``inputs`` and rejected with
	ConstructionError if any final configuration has its output head away from cell 0. Final-state rows of
	``machine`` are replaced by the flip step into fresh final states.

	Parameters
	----------
	machine : MachineSpec
		Machine with an output tape.
	inputs : list | None
		Sample inputs; default is every one-symbol input.
	max_steps : int
		Step limit of the sample runs.
	"""
	if machine.roles is None or machine.roles.output is None:
		raise RolePrereqError(f"{machine.name} has no output tape")
	if inputs is None:
		inputs = sorted(machine.input_alphabets[machine.roles.input])
	_check_output_head(machine, inputs, max_steps)

	output = machine.roles.output
	assembly = Assembly(machine.tape_alphabets, machine.exact)
	assembly.states.extend(machine.states)
	for key, transitions in machine.delta.items():
		if key[0] not in machine.finals:
			assembly.delta[key] = list(transitions)

	finals = []
	still = (0,) * machine.tape_count
	for qf in machine.states:
		if qf not in machine.finals:
			continue
		flipped = assembly.fresh(f"{qf}~")
		finals.append(flipped)
		for read in machine.symbol_vectors:
			write = tuple(_flip(s) if i == output else s for i, s in enumerate(read))
			assembly.add(qf, read, [(Scalar.one(machine.exact), flipped, write, still)])

	result = build_machine(
		name=f"not-{machine.name}",
		alphabets=assembly.alphabets,
		states=assembly.states,
		initial=machine.initial,
		finals=finals,
		delta=assembly.delta,
		roles=machine.roles,
		input_alphabets=machine.input_alphabets,
		oracle_states=machine.oracle_states,
		exact=machine.exact,
		complete=True,
	)
	logging.info(f"Built complement of {machine.name}.")
	return result


def pad_machine(machine: MachineSpec, extra: int) -> MachineSpec:
	"""
	Delay halting by ``extra`` idle steps: every final state gets a chain of ``extra`` stationary states and the
	last state of each chain is final.
	"""
	if extra < 0:
		raise ValueError("Invalid extra. Expected a nonnegative integer.")
	if extra == 0:
		return machine

	assembly = Assembly(machine.tape_alphabets, machine.exact)
	assembly.states.extend(machine.states)
	for key, transitions in machine.delta.items():
		if key[0] not in machine.finals:
			assembly.delta[key] = list(transitions)

	finals = []
	still = (0,) * machine.tape_count
	for qf in machine.states:
		if qf not in machine.finals:
			continue
		previous = qf
		for i in range(1, extra + 1):
			current = assembly.fresh(f"{qf}.w{i}")
			for read in machine.symbol_vectors:
				assembly.add(previous, read, [(Scalar.one(machine.exact), current, read, still)])
			previous = current
		finals.append(previous)

	return build_machine(
		name=f"{machine.name}+{extra}",
		alphabets=assembly.alphabets,
		states=assembly.states,
		initial=machine.initial,
		finals=finals,
		delta=assembly.delta,
		roles=machine.roles,
		input_alphabets=machine.input_alphabets,
		oracle_states=machine.oracle_states,
		exact=machine.exact,
		complete=True,
	)


def halting_offset(mg: MachineSpec, mh: MachineSpec, inputs, max_steps: int = 10000) -> int:
	"""
	Constant difference halt(mh) - halt(mg) over ``inputs``. Raises SyncError if it is not constant.
	"""
	offsets = {run(mh, x, max_steps).halt_time - run(mg, x, max_steps).halt_time for x in inputs}
	if len(offsets) != 1:
		raise SyncError(f"halting times of {mg.name} and {mh.name} differ by {sorted(offsets)} across inputs")
	return offsets.pop()


def _check_combinable(*machines):
	first = machines[0]
	for m in machines:
		if m.oracle_states is not None:
			raise ConstructionError(f"{m.name}: oracle machines cannot be composed")
		if m.tape_count != first.tape_count or m.roles != first.roles:
			raise ConstructionError(f"{m.name} and {first.name} need the same tapes and roles")


def mixture_machine(mg: MachineSpec, mh: MachineSpec, pad: tuple | None = None, inputs=None, max_steps: int = 10000) -> MachineSpec:
	"""
	Branch on one cell of a fresh tape put into (|b0> + |b1> + |b2> + |b3>)/2: b0, b1 run ``mg``, b2, b3 run the
	complement of ``mh``. The branch cell is never rewritten, so the acceptance probability is
	rho_g/2 + (1 - rho_h)/2.

	Parameters
	----------
	mg, mh : MachineSpec
		Machines with the same tapes and roles.
	pad : tuple | None
		Idle steps appended to (mg, complement(mh)). Computed from ``inputs`` when None.
	inputs : list | None
		Sample inputs for the automatic pad; default is every one-symbol input.
	max_steps : int
		Step limit of the sample runs.
	"""
	_check_combinable(mg, mh)
	nh = complement_machine(mh, max_steps=max_steps)

	if pad is None:
		if inputs is None:
			inputs = sorted(mg.input_alphabets[mg.roles.input] | mh.input_alphabets[mh.roles.input])
		offset = halting_offset(mg, nh, inputs, max_steps)
		pad = (offset, 0) if offset >= 0 else (0, -offset)
	if len(pad) != 2 or min(pad) < 0:
		raise ValueError("Invalid pad. Expected two nonnegative integers.")

	g, h = pad_machine(mg, pad[0]), pad_machine(nh, pad[1])
	k = mg.tape_count
	branch = k
	alphabets = [mg.tape_alphabets[i] | mh.tape_alphabets[i] for i in range(k)] + [set(BRANCH_SYMBOLS)]
	assembly = Assembly(alphabets, mg.exact and mh.exact)
	tape_map = list(range(k))

	start = assembly.state("split")
	pos_g, pos_h = assembly.state("enter-g"), assembly.state("enter-h")
	assembly.embed(g, "g.", tape_map, guard={branch: set(BRANCH_SYMBOLS[:2])})
	assembly.embed(h, "h.", tape_map, guard={branch: set(BRANCH_SYMBOLS[2:])})
	back_g = add_entry(assembly, pos_g, g, "g.", tape_map, guard={branch: set(BRANCH_SYMBOLS[:2])})
	back_h = add_entry(assembly, pos_h, h, "h.", tape_map, guard={branch: set(BRANCH_SYMBOLS[2:])})

	half = Scalar(1) / 2 if assembly.exact else Scalar(0.5)
	for read in assembly.vectors(**{f"t{branch}": {BLANK}}):
		entries = []
		for b in BRANCH_SYMBOLS:
			target, back = (pos_g, back_g) if b in BRANCH_SYMBOLS[:2] else (pos_h, back_h)
			entries.append((half, target, read[:branch] + (b,), back))
		assembly.add(start, read, entries)

	input_alphabets = [mg.input_alphabets[i] | mh.input_alphabets[i] for i in range(k)] + [frozenset()]
	finals = ["g." + q for q in g.finals] + ["h." + q for q in h.finals]
	return assembly.build(f"mix-{mg.name}-{mh.name}", start, finals, mg.roles, input_alphabets)


def seq_repeat(machine: MachineSpec, m: int, max_copies: int = MAX_COPIES) -> MachineSpec:
	"""
	Run ``m`` copies of ``machine`` one after another, each on its own block of tapes, and accept iff every copy
	accepts; the acceptance probability is rho**m.

	The input is first copied onto the input tapes of copies 2..m. ``machine`` must have a single final state and
	leave its output head on cell 0.

	Example
	-------
	>>> run(seq_repeat(had, 2), "0").accept_prob
	0.25
	"""
	if m < 1:
		raise ValueError("Invalid m. Expected a positive integer.")
	if m > max_copies:
		raise BudgetError(f"{m} copies exceed the construction bound {max_copies}")
	_check_combinable(machine)
	if len(machine.finals) != 1:
		raise ConstructionError(f"{machine.name} must have a single final state to be repeated")

	k = machine.tape_count
	roles = machine.roles
	out = m * k
	alphabets = [machine.tape_alphabets[j] for _ in range(m) for j in range(k)] + [{"0", "1"}]
	assembly = Assembly(alphabets, machine.exact)
	one = Scalar.one(machine.exact)
	maps = [[i * k + j for j in range(k)] for i in range(m)]
	loop_tapes = [maps[i][roles.input] for i in range(m)]

	start = assembly.state("start")
	entries = [assembly.state(f"enter{i + 1}") for i in range(m)]
	for i in range(m):
		assembly.embed(machine, f"{i + 1}.", maps[i])
	done = assembly.state("done")

	backs = [add_entry(assembly, entries[i], machine, f"{i + 1}.", maps[i]) for i in range(m)]

	if m == 1:
		for read in assembly.vectors():
			assembly.add(start, read, [(one, entries[0], read, backs[0])])
	else:
		# copy the input of copy 1 onto the input tapes of the other copies
		opening, copying, rewinding, home = (assembly.state(s) for s in ("open", "copy", "rewind", "home"))
		left = assembly.move(**{f"t{i}": -1 for i in loop_tapes})
		right = assembly.move(**{f"t{i}": 1 for i in loop_tapes})
		blank_copies = {f"t{i}": {BLANK} for i in loop_tapes[1:]}

		for read in assembly.vectors(**blank_copies):
			assembly.add(start, read, [(one, opening, read, left)])
		for read in assembly.vectors(**{f"t{i}": {BLANK} for i in loop_tapes}):
			assembly.add(opening, read, [(one, copying, read, right)])
			assembly.add(rewinding, read, [(one, home, read, right)])
		for read in assembly.vectors(**blank_copies):
			symbol = read[loop_tapes[0]]
			if symbol == BLANK:
				assembly.add(copying, read, [(one, rewinding, read, left)])
			else:
				write = tuple(symbol if i in loop_tapes else s for i, s in enumerate(read))
				assembly.add(copying, read, [(one, copying, write, right)])
		for symbol in sorted(machine.input_alphabets[roles.input]):
			for read in assembly.vectors(**{f"t{i}": {symbol} for i in loop_tapes}):
				assembly.add(rewinding, read, [(one, rewinding, read, left)])
		for read in assembly.vectors():
			assembly.add(home, read, [(one, entries[0], read, backs[0])])

	(qf,) = machine.finals
	for i in range(m):
		final = f"{i + 1}.{qf}"
		if i + 1 < m:
			for read in assembly.vectors():
				assembly.add(final, read, [(one, entries[i + 1], read, backs[i + 1])])
		else:
			outputs = [maps[c][roles.output] for c in range(m)]
			for read in assembly.vectors(**{f"t{out}": {BLANK}}):
				bit = "1" if all(read[o] == "1" for o in outputs) else "0"
				assembly.add(final, read, [(one, done, read[:out] + (bit,), (0,) * assembly.k)])

	input_alphabets = [machine.input_alphabets[roles.input] if i == roles.input else frozenset() for i in range(out + 1)]
	new_roles = TapeRoles(input=roles.input, output=out)
	return assembly.build(f"{machine.name}^{m}", start, [done], new_roles, input_alphabets)
