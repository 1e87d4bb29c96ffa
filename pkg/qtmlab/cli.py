"""
Command-line interface: parse machines and oracles, run them, evaluate the constructions and run verification suites.
Exit codes are 0 on success, 1 when a verification fails and 2 on usage or parse errors.
"""

import logging
import sys
from argparse import ArgumentParser

from qtmlab.qtmlab import Qtmlab, QtmlabException
from .classes import FBQP, GAP_QP, QMASV, FunctionWitness, amplify, eval_gapqp, qma_best_witness
from .constructions import amplitude_estimate, bv_oracle, bv_recover, dj_oracle_value, gap_square, sharp_p_embed, witness_count
from .machine import MachineSyntaxError, RoleError, TotalityError, load_machine
from .oracle import Oracle, bbbv_bound, nonadaptive_audit, query_magnitudes, run_with_oracle
from .simulator import run
from .suites import SUITES, UnknownSuite, get_suite
from .utils import render_text, to_json
from .wellformed import check_well_formed


USAGE_ERRORS = (MachineSyntaxError, TotalityError, RoleError, UnknownSuite, FileNotFoundError, ValueError)


def _machine(args):
	return load_machine(args.machine, args.mode)


def _check(args):
	report = check_well_formed(_machine(args))
	return {"machine": report.machine, "well-formed": "yes" if report.passed else "no", "violations": report.to_report()["violations"] or None}, report.passed


def _run(args):
	result = run(_machine(args), args.input, args.max_steps)
	return {**result.to_report(), "rho": result.accept_prob}, True


def _prob(args):
	result = run(_machine(args), args.input, args.max_steps)
	return {"machine": result.machine, "input": args.input, "rho": result.accept_prob}, True


def _gap(args):
	witness = FunctionWitness(_machine(args), GAP_QP, {"source": args.machine})
	return {"machine": witness.machine.name, "input": args.input, "gap": eval_gapqp(witness, args.input, args.max_steps)}, True


def _gapsq(args):
	machine = _machine(args)
	return {"machine": machine.name, "input": args.input, **gap_square(machine, args.input, args.max_steps).to_report()}, True


def _estimate(args):
	machine = _machine(args)
	outcome = amplitude_estimate(machine, args.input, args.k, args.accuracy, max_steps=args.max_steps)
	return {"machine": machine.name, "input": args.input, **outcome.to_report()}, True


def _embed(args):
	predicate = _machine(args)
	embedded = sharp_p_embed(predicate, args.p)
	result = run(embedded, args.input, args.max_steps)
	count = witness_count(predicate, args.input, args.p)
	scaled = result.accept_prob * 4**args.p
	report = {"machine": embedded.name, "input": args.input, "p": args.p, "rho": result.accept_prob, "scaled_count": scaled, "witness_count": count}
	return report, abs(scaled - count) <= 1e-6


def _orun(args):
	machine = _machine(args)
	result, trace = run_with_oracle(machine, Oracle.from_file(args.oracle), args.input, args.budget, args.max_steps)
	return {**result.to_report(), "rho": result.accept_prob, "queries": trace.to_report()}, True


def _audit(args):
	report = nonadaptive_audit(_machine(args), Oracle.from_file(args.oracle), args.input, args.max_steps)
	return report.to_report(), report.passed


def _qmag(args):
	machine = _machine(args)
	trace = query_magnitudes(machine, Oracle.from_file(args.oracle), args.input, args.max_steps)
	return {"machine": machine.name, "input": args.input, **trace.to_report()}, True


def _bbbv(args):
	machine = _machine(args)
	psi = args.input if args.psi is None else args.psi
	bound = bbbv_bound(machine, Oracle.from_file(args.oracle_a), Oracle.from_file(args.oracle_b), args.input, psi, args.max_steps)
	return {"machine": machine.name, "phi": args.input, "psi": psi, **bound.to_report()}, bound.holds


def _dj(args):
	oracle = Oracle.from_file(args.oracle) if args.oracle else Oracle(name="empty")
	outcome = dj_oracle_value(oracle, args.n, max_steps=args.max_steps, width=args.width)
	return {"n": args.n, "oracle": oracle.name, **outcome.to_report()}, True


def _bv(args):
	p = len(args.hidden)
	outcome = bv_recover(bv_oracle(args.x, args.hidden), args.x, p, args.fidelity)
	return {"x": args.x, "p": p, **outcome.to_report()}, True


def _amplify(args):
	result = amplify(FunctionWitness(_machine(args), FBQP, {"source": args.machine}), args.q, args.input, args.max_steps)
	return result.to_report(), result.holds


def _qma(args):
	p = args.witness_qubits
	witness = FunctionWitness(_machine(args), QMASV, {"p": p, "source": args.machine})
	return {"machine": witness.machine.name, "input": args.input, "p": p, **qma_best_witness(witness, args.input, p, args.max_steps).to_report()}, True


def _verify(args):
	suites = [get_suite(name, max_steps=args.max_steps) for name in args.suites]
	results = Qtmlab(suites, loading_bar=args.progress, debug=False).start(args.output)
	reports = [result.to_report() for result in results]
	return reports[0] if len(reports) == 1 else {"suites": reports}, all(result.passed for result in results)


def build_parser() -> ArgumentParser:
	common = ArgumentParser(add_help=False)
	common.add_argument("--mode", choices=("exact", "approx"), default=None, help="Amplitude arithmetic. Default: exact unless the machine uses cis(...).")
	common.add_argument("--max-steps", type=int, default=10000, help="Step limit of every run (default: 10000).")
	common.add_argument("--json", action="store_true", help="Print the report as JSON.")
	common.add_argument("--input", default="0", help="Input string (default: 0).")

	machine = ArgumentParser(add_help=False, parents=[common])
	machine.add_argument("machine", help="Machine file; bare names such as had.qtm resolve to the bundled fixtures.")

	parser = ArgumentParser(prog="qtmlab", description=__doc__)
	commands = parser.add_subparsers(dest="command", required=True)

	commands.add_parser("check", parents=[machine], help="Check the local well-formedness conditions.").set_defaults(handler=_check)
	commands.add_parser("run", parents=[machine], help="Run a machine and print its outcome distribution.").set_defaults(handler=_run)
	commands.add_parser("prob", parents=[machine], help="Acceptance probability.").set_defaults(handler=_prob)
	commands.add_parser("gap", parents=[machine], help="Gap 2ρ - 1.").set_defaults(handler=_gap)
	commands.add_parser("gapsq", parents=[machine], help="Gap-squaring amplitude and probability.").set_defaults(handler=_gapsq)

	sub = commands.add_parser("estimate", parents=[machine], help="Exact amplitude estimation readout.")
	sub.add_argument("--k", type=int, required=True, help="Ancilla qubits.")
	sub.add_argument("--accuracy", type=float, required=True, help="Success radius around ρ.")
	sub.set_defaults(handler=_estimate)

	sub = commands.add_parser("embed", parents=[machine], help="Embed a witness predicate and compare ρ·4^p with the witness count.")
	sub.add_argument("--p", type=int, default=1, help="Witness length (default: 1).")
	sub.set_defaults(handler=_embed)

	sub = commands.add_parser("orun", parents=[machine], help="Run an oracle machine relative to an oracle file.")
	sub.add_argument("--oracle", required=True, help="Oracle file.")
	sub.add_argument("--budget", type=int, default=None, help="Maximum number of query steps.")
	sub.set_defaults(handler=_orun)

	sub = commands.add_parser("audit-nonadaptive", parents=[machine], help="Audit the query-list discipline.")
	sub.add_argument("--oracle", required=True, help="Oracle file.")
	sub.set_defaults(handler=_audit)

	sub = commands.add_parser("qmag", parents=[machine], help="Query magnitudes per time step.")
	sub.add_argument("--oracle", required=True, help="Oracle file.")
	sub.set_defaults(handler=_qmag)

	sub = commands.add_parser("bbbv", parents=[machine], help="Both sides of the oracle perturbation bound.")
	sub.add_argument("--oracle-a", required=True, help="First oracle file.")
	sub.add_argument("--oracle-b", required=True, help="Second oracle file.")
	sub.add_argument("--psi", default=None, help="Input of the second run (default: --input).")
	sub.set_defaults(handler=_bbbv)

	sub = commands.add_parser("dj", parents=[common], help="Value of the one-query DJ machine relative to an oracle.")
	sub.add_argument("--n", type=int, required=True, help="Input length.")
	sub.add_argument("--oracle", default=None, help="Oracle file (default: the empty oracle).")
	sub.add_argument("--width", type=int, default=None, help="Query word length (default: n^2).")
	sub.set_defaults(handler=_dj)

	sub = commands.add_parser("bv", parents=[common], help="Recover a hidden string from one parallel query pass.")
	sub.add_argument("--hidden", required=True, help="Hidden binary string f(x).")
	sub.add_argument("--x", default="1", help="Oracle input x (default: 1).")
	sub.add_argument("--fidelity", type=float, default=1.0, help="Inner fidelity of the oracle pass (default: 1).")
	sub.set_defaults(handler=_bv)

	sub = commands.add_parser("amplify", parents=[machine], help="Majority amplification over 6q + 1 runs.")
	sub.add_argument("--q", type=int, required=True, help="Target error exponent.")
	sub.set_defaults(handler=_amplify)

	sub = commands.add_parser("qma", parents=[machine], help="Best acceptance probability over witness states.")
	sub.add_argument("--witness-qubits", type=int, required=True, help="Witness width p, 2^p <= 64.")
	sub.set_defaults(handler=_qma)

	sub = commands.add_parser("verify", parents=[common], help="Run verification suites.")
	sub.add_argument("suites", nargs="+", metavar="SUITE", help=f"One of: {', '.join(SUITES)}.")
	sub.add_argument("--output", default=None, help="Dump each report to OUTPUT.format(date=..., suite=...).")
	sub.add_argument("--progress", action="store_true", help="Show a progress bar.")
	sub.set_defaults(handler=_verify)

	return parser


def run_command(argv) -> int:
	"""
	Execute one subcommand and print its report on standard output.

	Example
	-------
	>>> run_command(["check", "had.qtm"])
	machine: had
	well-formed: yes
	0
	"""
	try:
		args = build_parser().parse_args(argv)
	except SystemExit as e:
		return 0 if e.code in (0, None) else 2

	if args.max_steps <= 0:
		print("[error] Invalid --max-steps. Expected a positive integer.", file=sys.stderr)
		return 2

	try:
		report, passed = args.handler(args)
	except USAGE_ERRORS as e:
		print(f"[error] {e}", file=sys.stderr)
		return 2
	except QtmlabException as e:
		logging.error(f"{args.command} failed: {type(e).__name__}: {e}")
		print(f"[{type(e).__name__}] {e}", file=sys.stderr)
		return 1

	print(to_json(report) if args.json else render_text(report))
	return 0 if passed else 1


def main(argv=None):
	sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
	main()
