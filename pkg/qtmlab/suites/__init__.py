from qtmlab.qtmlab import QtmlabException

from .WellFormedness import WellFormedness
from .Unitarity import Unitarity
from .Reversal import Reversal
from .ProbLipschitz import ProbLipschitz
from .GapSquaring import GapSquaring
from .Estimation import Estimation
from .Embedding import Embedding
from .Closure import Closure
from .OracleBbbv import OracleBbbv
from .Nonadaptive import Nonadaptive
from .DJ import DJ
from .BV import BV
from .Amplify import Amplify
from .QMA import QMA


SUITES = {
	suite.name: suite
	for suite in (WellFormedness, Unitarity, Reversal, ProbLipschitz, GapSquaring, Estimation, Embedding, Closure, OracleBbbv, Nonadaptive, DJ, BV, Amplify, QMA)
}


class UnknownSuite(QtmlabException):
	pass


def get_suite(name: str, **kwargs):
	"""
	Instantiate a registered suite by name.

	Example
	-------
	>>> get_suite("gap-squaring").name
	'gap-squaring'
	"""
	if name not in SUITES:
		raise UnknownSuite(f"Unknown suite {name!r}. Expected one of {', '.join(SUITES)}.")
	return SUITES[name](**kwargs)


def verify_suite(name: str, **kwargs):
	"""
	Run a registered suite by name and return its SuiteResult.

	Example
	-------
	>>> verify_suite("gap-squaring").passed
	True
	"""
	return get_suite(name, **kwargs).run()
