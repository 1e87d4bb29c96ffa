import json
import os

import pytest

from qtmlab import CaseResult, Qtmlab, Suite


class Passing(Suite):
	name = "passing"

	def _cases(self):
		yield CaseResult.compare("one-half", "arithmetic", 0.5, 1 / 2)
		yield CaseResult.compare("bounded", "arithmetic", 0.25, 0.5, relation="le")
		yield CaseResult.claim("claim", "arithmetic", True, detail="holds")


class Failing(Suite):
	name = "failing"

	def _cases(self):
		yield CaseResult.compare("off", "arithmetic", 0.5, 0.75, relation="ge")


class Broken(Suite):
	name = "broken"

	def _cases(self):
		yield CaseResult.claim("first", "arithmetic", True)
		raise RuntimeError("simulation exploded")


def test_start():
	results = Qtmlab([Passing(), Failing()], debug=False).start()
	assert [r.name for r in results] == ["passing", "failing"]
	assert results[0].passed
	assert results[0].summary == {"total": 3, "passed": 3, "failed": 0}
	assert not results[1].passed
	assert results[1].cases[0].status == "fail"


def test_broken_suite_is_reported():
	# Objective: Verify that a suite raising an exception does not stop the run and is reported with its error.
	results = Qtmlab([Broken(), Passing()], debug=False).start()
	assert results[0].error == "simulation exploded"
	assert results[0].cases == []
	assert not results[0].passed
	assert results[0].to_report()["error"] == "simulation exploded"
	assert results[1].passed


def test_dump(tmp_path):
	output_path = os.path.join(tmp_path, "{date}", "{suite}")
	Qtmlab([Passing(), Failing(output_format="txt")], debug=False).start(output_path)
	(day,) = os.listdir(tmp_path)

	with open(os.path.join(tmp_path, day, "passing.json")) as f:
		report = json.load(f)
	assert report["summary"]["passed"] == 3
	# Claims carry no lhs or rhs.
	assert "lhs" not in report["cases"][2]
	assert report["cases"][2]["detail"] == "holds"

	with open(os.path.join(tmp_path, day, "failing.txt")) as f:
		text = f.read()
	assert "passed: False" in text
	assert "fail" in text


def test_debug_output(capsys):
	Qtmlab([Passing()]).start()
	assert "Verifying passing..." in capsys.readouterr().out


def test_invalid_suites():
	with pytest.raises(ValueError, match="Invalid suites"):
		Qtmlab(Passing())


@pytest.mark.parametrize(
	"lhs, rhs, relation, status",
	[(1.0, 1.0 + 1e-12, "eq", "pass"), (1.0, 1.1, "eq", "fail"), (1.0, 1.1, "le", "pass"), (1.2, 1.1, "le", "fail"), (1.2, 1.1, "ge", "pass")],
)
def test_case_result(lhs, rhs, relation, status):
	case = CaseResult.compare("case", "arithmetic", lhs, rhs, relation=relation)
	assert case.status == status
	assert case.to_report()["relation"] == relation
	assert "elapsed" in case.to_report(include_elapsed=True)


def test_case_result_invalid_relation():
	with pytest.raises(ValueError, match="Invalid relation"):
		CaseResult.compare("case", "arithmetic", 1, 1, relation="lt")


def test_elapsed_is_recorded():
	result = Passing().run()
	assert all(case.elapsed >= 0 for case in result.cases)
