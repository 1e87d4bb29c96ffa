from qtmlab.qtmlab import Qtmlab
from qtmlab.qtmlab import QtmlabException
from .suite import *

__version__ = "0.1.0"
