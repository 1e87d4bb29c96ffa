import math

import pytest

from qtmlab.machine import RolePrereqError, load_machine, parse_machine
from qtmlab.oracle import (
	BudgetExceeded,
	Oracle,
	OracleTimingError,
	QueryDesyncError,
	bbbv_bound,
	characteristic,
	nonadaptive_audit,
	pairing,
	query_magnitudes,
	run_with_oracle,
	unpairing,
)

Q1 = load_machine("q1.qtm")
Q2 = load_machine("q2.qtm")
ADAPTIVE = load_machine("adaptive.qtm")
ZERO = Oracle.from_words(["0"], "zero")

ORACLE_HEADER = [
	"tapes 3",
	"tape 1 input {0,1} work {}",
	"tape 2 input {} work {0,1}",
	"tape 3 input {} work {0,1}",
	"roles input=1 output=2 query=3",
	"initial q0",
	"final qf",
	"oracle qp qa",
	"complete",
]

# Only one of two branches enters the pre-query state at time 1.
SPLIT_QUERY = "\n".join(
	["qtm split-query", "states q0 w qp qa qf"]
	+ ORACLE_HEADER
	+ [
		"on (q0; *,#,#):",
		"  1 rt2^-1 -> (qp; *,#,0; N N N)",
		"  1 rt2^-1 -> (w; *,#,1; N N N)",
		"on (w; *,#,1):",
		"  1 -> (qp; *,#,1; N N N)",
		"on (qa; *,#,0):",
		"  1 -> (qf; *,0,0; N N N)",
		"on (qa; *,#,1):",
		"  1 -> (qf; *,1,1; N N N)",
	]
)

# Asks for the word 0 and halts one step later when the answer is 0.
ANSWER_DELAY = "\n".join(
	["qtm answer-delay", "states q0 s1 qp qa d qf"]
	+ ORACLE_HEADER
	+ [
		"on (q0; *,#,#):",
		"  1 -> (s1; *,#,0; N N R)",
		"on (s1; *,#,#):",
		"  1 -> (qp; *,#,0; N N N)",
		"on (qa; *,#,1):",
		"  1 -> (qf; *,1,1; N N N)",
		"on (qa; *,#,0):",
		"  1 -> (d; *,0,0; N N N)",
		"on (d; *,0,0):",
		"  1 -> (qf; *,0,0; N N N)",
	]
)


def test_oracle_sets():
	a = Oracle.parse("% comment\n0\n\n11 % trailing\n", "A")
	assert a.members == frozenset({"0", "11"})
	assert "11" in a and "1" not in a
	assert len(a) == 2
	assert a.block(2) == frozenset({"11"})
	assert a.symmetric_difference(Oracle.from_words(["0", "1"])) == frozenset({"1", "11"})
	assert a.to_report() == {"name": "A", "members": ["0", "11"]}

	assert Oracle.from_file("one.oracle").members == frozenset({"1"})
	assert len(Oracle.from_file("empty.oracle")) == 0

	# Objective: Verify that the class raises a ValueError for words that are not binary strings.
	with pytest.raises(ValueError, match="Invalid oracle words"):
		Oracle.from_words(["0", "2"])


def test_characteristic():
	assert characteristic(ZERO, "0") == 1
	assert characteristic(ZERO, "00") == 0
	assert characteristic(None, "0") == 0


@pytest.mark.parametrize("x, y, pair", [("10", "1", "110101"), ("", "01", "001"), ("1", "", "101")])
def test_pairing(x, y, pair):
	assert pairing(x, y) == pair
	assert unpairing(pair) == (x, y)


@pytest.mark.parametrize("s", ["", "1", "11", "1101"])
def test_unpairing_invalid(s):
	with pytest.raises(ValueError, match="Invalid pair"):
		unpairing(s)


@pytest.mark.parametrize("oracle, accept", [(ZERO, 1.0), (Oracle(), 0.0), (None, 0.0)])
def test_single_query(oracle, accept):
	result, trace = run_with_oracle(Q1, oracle, "0")
	assert result.halt_time == 5
	assert result.accept_prob == accept
	assert trace.triples() == [(2, "0", 1.0)]
	assert trace.total_query_times == 1


@pytest.mark.parametrize("oracle", [ZERO, Oracle()])
def test_repeated_query(oracle):
	# Objective: Verify that asking the same word twice cancels the answer.
	result, trace = run_with_oracle(Q2, oracle, "1")
	assert result.halt_time == 7
	assert result.accept_prob == 0.0
	assert trace.triples() == [(2, "0", 1.0), (4, "0", 1.0)]
	assert trace.totals() == {2: 1.0, 4: 1.0}
	assert trace.mass({"0"}, 1, 4) == 1.0
	assert trace.to_report()["total_query_times"] == 2


def test_query_budget():
	run_with_oracle(Q2, ZERO, "0", budget=2)

	with pytest.raises(BudgetExceeded):
		run_with_oracle(Q2, ZERO, "0", budget=1)

	with pytest.raises(ValueError, match="Invalid budget"):
		run_with_oracle(Q2, ZERO, "0", budget=-1)

	# Objective: Verify that a machine without oracle states cannot be run relative to an oracle.
	with pytest.raises(RolePrereqError):
		run_with_oracle(load_machine("had.qtm"), ZERO, "0")


def test_query_magnitudes():
	trace = query_magnitudes(Q1, None, "1")
	assert trace.magnitude(2, "0") == 1.0
	assert trace.magnitude(2, "1") == 0.0
	assert trace.magnitude(3, "0") == 0.0


def test_audit_passes():
	report = nonadaptive_audit(ADAPTIVE, Oracle(), "0")
	assert report.passed
	assert report.snapshot_time == 2
	assert report.snapshot == (("0",),)
	assert report.to_report()["snapshot"] == ["0"]


def test_audit_flags_adaptive_query():
	# Objective: Verify that a query word chosen from an earlier answer is reported when it is not listed.
	report = nonadaptive_audit(ADAPTIVE, ZERO, "0")
	assert not report.passed
	assert {f.condition for f in report.findings} == {"unlisted-query"}
	assert [f.detail for f in report.findings] == ["1"]
	assert report.to_report()["findings"][0]["condition"] == "unlisted-query"


def test_audit_needs_query_list():
	with pytest.raises(RolePrereqError, match="query-list"):
		nonadaptive_audit(Q1, Oracle(), "0")


def test_bbbv_bound():
	bound = bbbv_bound(Q1, Oracle(), ZERO, "0", "0")
	assert bound.lhs == 1.0
	assert bound.halt_time == 5
	assert bound.query_mass == 1.0
	assert bound.rhs == pytest.approx(2 * math.sqrt(5))
	assert bound.holds

	# Identical oracles: only the input distance remains.
	bound = bbbv_bound(Q1, ZERO, ZERO, "0", "1")
	assert bound.lhs == 0.0
	assert bound.query_mass == 0.0
	assert bound.rhs == pytest.approx(math.sqrt(2))
	assert bound.to_report()["holds"] is True


def test_query_desync():
	# Objective: Verify that a support where only some configurations are pre-query is refused.
	with pytest.raises(QueryDesyncError, match="1 of 2"):
		run_with_oracle(parse_machine(SPLIT_QUERY), ZERO, "0")


def test_bbbv_timing():
	machine = parse_machine(ANSWER_DELAY)
	assert run_with_oracle(machine, ZERO, "0")[0].halt_time == 4
	assert run_with_oracle(machine, Oracle(), "0")[0].halt_time == 5

	# Objective: Verify that the bound is not evaluated when the two oracles give different halting times.
	with pytest.raises(OracleTimingError, match="halts at 5"):
		bbbv_bound(machine, Oracle(), ZERO, "0", "0")


@pytest.mark.parametrize("machine, x", [(Q1, "0"), (Q1, "1"), (Q2, "1"), (ADAPTIVE, "0"), (ADAPTIVE, "1")])
def test_oracle_locality(machine, x):
	# Objective: Verify that changing the oracle outside the queried words changes nothing in the run.
	result, trace = run_with_oracle(machine, ZERO, x)
	queried = {y for _, y, _ in trace.triples()}
	outside = {"1", "00", "01", "10", "11", "010"} - queried
	changed = Oracle.from_words(ZERO.members | outside, "changed")

	other, other_trace = run_with_oracle(machine, changed, x)
	assert other.to_report() == result.to_report()
	assert other.final.entries == result.final.entries
	assert other_trace.triples() == trace.triples()
