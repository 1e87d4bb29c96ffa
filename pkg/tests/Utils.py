import json
import os

import pytest

from qtmlab.utils import clean_nones, dump, fixture_path, read_text, render_text, resolve_path, to_json


def test_clean_nones():
	report = {"a": None, "b": [1, None, {"c": None, "d": 2}], "e": {"f": None}}
	assert clean_nones(report) == {"b": [1, {"d": 2}], "e": {}}
	assert clean_nones(3) == 3


def test_to_json():
	assert json.loads(to_json({"b": 1, "a": None})) == {"b": 1}
	assert to_json({"b": 1, "a": 2}).index('"a"') < to_json({"b": 1, "a": 2}).index('"b"')


def test_render_text():
	text = render_text({"suite": "dj", "rho": 0.1 + 0.2, "skip": None, "summary": {"total": 1}, "cases": [{"id": "a", "status": "pass"}]})
	lines = text.splitlines()
	assert lines[0] == "cases:"
	assert "suite: dj" in lines
	assert "rho: 0.3" in lines
	assert "  total: 1" in lines
	assert not any(line.startswith("skip") for line in lines)
	assert "status" in lines[1]
	assert "pass" in lines[2]

	assert render_text([1, 2]) == "[1, 2]"


def test_dump(tmp_path):
	base = os.path.join(tmp_path, "nested", "report")
	dump(base, {"b": 1, "a": None})
	with open(f"{base}.json") as f:
		assert json.load(f) == {"b": 1}

	dump(base, {"b": 1}, output_format="txt")
	with open(f"{base}.txt") as f:
		assert f.read() == "b: 1\n"


def test_fixture_paths(tmp_path):
	path = fixture_path("fixtures/had.qtm")
	assert path.endswith(os.path.join("fixtures", "had.qtm"))
	assert os.path.exists(path)
	assert resolve_path("had.qtm") == path

	local = tmp_path / "local.oracle"
	local.write_text("0\n")
	assert resolve_path(str(local)) == str(local)
	assert read_text(str(local)) == "0\n"

	# Objective: Verify that a name that is neither a file nor a bundled fixture is reported.
	with pytest.raises(FileNotFoundError, match="nothing.qtm"):
		resolve_path("nothing.qtm")
