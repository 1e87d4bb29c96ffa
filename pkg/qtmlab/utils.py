import json
import os
from importlib import resources

import pandas as pd


def dump(file_name, obj_list, output_format="json"):
	"""
	Dump a report to a file. Keys are sorted so that equal reports produce byte-identical files.

	Parameters:
	    file_name (str): Base name of the output file, without extension.
	    obj_list (dict | list): The report to write.
	    output_format: output format. Default is "json". "txt" writes the human-readable rendering.
	"""

	directory = os.path.dirname(file_name)
	if directory and not os.path.exists(directory):
		os.makedirs(directory)

	with open(f"{file_name}.{output_format}", "w+") as output_file:
		if output_format == "txt":
			output_file.write(render_text(obj_list))
			output_file.write("\n")
		else:
			json.dump(clean_nones(obj_list), output_file, indent=4, sort_keys=True)


def clean_nones(value):
	"""
	Recursively remove all None values from dictionaries and lists, and returns
	the result as a new dictionary or list.
	"""
	if isinstance(value, list):
		return [clean_nones(x) for x in value if x is not None]
	elif isinstance(value, dict):
		return {key: clean_nones(val) for key, val in value.items() if val is not None}
	else:
		return value


def to_json(report) -> str:
	return json.dumps(clean_nones(report), indent=4, sort_keys=True)


def render_text(report) -> str:
	"""
	Render a report as text: scalars as ``key: value`` lines, lists of flat dicts as tables.

	Example:
	render_text({"suite": "dj", "cases": [{"id": "a", "status": "pass"}]})
	"""
	if not isinstance(report, dict):
		return str(report)

	lines = []
	for key in sorted(report):
		value = report[key]
		if value is None:
			continue
		if isinstance(value, list) and value and all(isinstance(row, dict) for row in value):
			lines.append(f"{key}:")
			table = pd.DataFrame([{k: _cell(v) for k, v in row.items()} for row in value])
			lines.append(table.to_string(index=False))
		elif isinstance(value, dict):
			lines.append(f"{key}:")
			for sub_key in sorted(value):
				lines.append(f"  {sub_key}: {_cell(value[sub_key])}")
		else:
			lines.append(f"{key}: {_cell(value)}")
	return "\n".join(lines)


def _cell(value):
	if isinstance(value, float):
		return f"{value:.12g}"
	if isinstance(value, (list, dict)):
		return json.dumps(value, sort_keys=True)
	return value


def fixture_path(name: str) -> str:
	"""
	Resolve a bundled fixture file. ``name`` may be a bare file name (``had.qtm``) or start with ``fixtures/``.
	"""
	base = os.path.basename(name)
	return str(resources.files("qtmlab").joinpath("fixtures", base))


def resolve_path(path: str) -> str:
	"""
	Return ``path`` if it exists, otherwise the bundled fixture of the same name.
	"""
	if os.path.exists(path):
		return path
	bundled = fixture_path(path)
	if os.path.exists(bundled):
		return bundled
	raise FileNotFoundError(f"No such machine or oracle file: {path}")


def read_text(path: str) -> str:
	with open(resolve_path(path), "r") as f:
		return f.read()
