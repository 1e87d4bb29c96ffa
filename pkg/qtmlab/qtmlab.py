from datetime import datetime
from .suite import Suite, SuiteResult
from .utils import dump
from tqdm import tqdm
import logging


# Setup logging configuration
logging.basicConfig(
	level=logging.INFO,
	format="%(asctime)s - %(levelname)s - %(message)s",
	datefmt="%Y-%m-%d %H:%M:%S",
	filename="qtmlab.log",
	filemode="a",  # is the appended mode
)


class QtmlabException(Exception):
	pass


class Qtmlab:
	"""
	This class runs verification suites over the bundled machine fixtures and collects their reports.

	Parameters
	----------
	suites : list
		A list of suite instances, each checking one family of machine invariants.
	loading_bar : bool
		 If True, shows a progress bar while suites run. If False, disable the progress bar.
		 Default is False
	debug : bool
		If True, enables printing of detailed information during execution.
		Default is True

	Example
	-------
	>>> from qtmlab import Qtmlab
	>>> from qtmlab.suites import GapSquaring
	>>> results = Qtmlab([GapSquaring()], debug=False).start()
	>>> results[0].passed
	True
	"""

	def __init__(self, suites: list[Suite], loading_bar: bool = False, debug: bool = True) -> None:
		super().__init__()
		if not isinstance(suites, list):
			raise ValueError("Invalid suites. Expected a list of Suite instances.")
		self.suites = suites
		self.debug = debug
		self.loading_bar = loading_bar

	def start(self, output_path=None) -> list[SuiteResult]:
		"""
		Run every suite in order. A suite raising an exception is logged and reported as a failed suite.

		Parameters
		----------
		output_path : str | None
			If given, each report is dumped to ``output_path.format(date=..., suite=...)``.
		"""
		current_date = datetime.now().strftime("%Y-%m-%d")
		results = []

		for suite in tqdm(self.suites, desc="Qtmlab suites", unit=" suites", disable=not self.loading_bar, smoothing=0):
			suite_name = suite.name
			if self.debug:
				print(f"Verifying {suite_name}...")

			logging.info(f"qtmlab initialized with {type(suite).__name__} suite.")
			try:
				result = suite.run()
				logging.info(f"Suite {suite_name} finished: {result.summary['passed']}/{result.summary['total']} cases passed.\n")
			except Exception as e:
				logging.error(f'[{suite_name}] Suite "{suite_name}" failed: {str(e)} \n')
				result = SuiteResult(name=suite_name, cases=[], error=str(e))

			results.append(result)

			if output_path is not None:
				dump(
					file_name=output_path.format(date=current_date, suite=suite_name),
					obj_list=result.to_report(),
					output_format=suite.output_format,
				)

		return results
