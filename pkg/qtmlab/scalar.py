import cmath
import math
import re
from fractions import Fraction


EPS_AMP = 1e-9
EPS_NORM = 1e-9


def rational_sqrt(value: Fraction) -> Fraction | None:
	"""
	Return the nonnegative rational square root of ``value``, or None when it is not a perfect square.
	"""
	value = Fraction(value)
	if value < 0:
		return None

	num_root = math.isqrt(value.numerator)
	den_root = math.isqrt(value.denominator)
	if num_root * num_root != value.numerator or den_root * den_root != value.denominator:
		return None

	return Fraction(num_root, den_root)


class QuadraticSurd:
	"""
	An element a + b*sqrt(2) of the quadratic field Q(sqrt 2), with rational a and b.

	Arithmetic is closed and lossless. Division is supported through the field norm a^2 - 2b^2.

	Parameters
	----------
	a : int | Fraction
		Rational part.
	b : int | Fraction
		Coefficient of sqrt(2).

	Example
	-------
	>>> half = QuadraticSurd.rt2_power(-2)
	>>> QuadraticSurd.rt2_power(-1) * QuadraticSurd.rt2_power(-1) == half
	True
	"""

	__slots__ = ("a", "b")

	def __init__(self, a=0, b=0):
		self.a = Fraction(a)
		self.b = Fraction(b)

	@classmethod
	def rt2_power(cls, m: int) -> "QuadraticSurd":
		# 2^(m/2)
		if m % 2 == 0:
			return cls(Fraction(2) ** (m // 2))
		return cls(0, Fraction(2) ** ((m - 1) // 2))

	@staticmethod
	def _coerce(other):
		if isinstance(other, QuadraticSurd):
			return other
		if isinstance(other, (int, Fraction)):
			return QuadraticSurd(other)
		return None

	def __add__(self, other):
		other = self._coerce(other)
		if other is None:
			return NotImplemented
		return QuadraticSurd(self.a + other.a, self.b + other.b)

	__radd__ = __add__

	def __neg__(self):
		return QuadraticSurd(-self.a, -self.b)

	def __sub__(self, other):
		other = self._coerce(other)
		if other is None:
			return NotImplemented
		return QuadraticSurd(self.a - other.a, self.b - other.b)

	def __rsub__(self, other):
		other = self._coerce(other)
		if other is None:
			return NotImplemented
		return other - self

	def __mul__(self, other):
		other = self._coerce(other)
		if other is None:
			return NotImplemented
		return QuadraticSurd(self.a * other.a + 2 * self.b * other.b, self.a * other.b + self.b * other.a)

	__rmul__ = __mul__

	def norm(self) -> Fraction:
		return self.a * self.a - 2 * self.b * self.b

	def conj_sq2(self) -> "QuadraticSurd":
		return QuadraticSurd(self.a, -self.b)

	def inverse(self) -> "QuadraticSurd":
		n = self.norm()
		if n == 0:
			raise ZeroDivisionError("QuadraticSurd division by zero")
		return QuadraticSurd(self.a / n, -self.b / n)

	def __truediv__(self, other):
		other = self._coerce(other)
		if other is None:
			return NotImplemented
		return self * other.inverse()

	def __rtruediv__(self, other):
		other = self._coerce(other)
		if other is None:
			return NotImplemented
		return other * self.inverse()

	def __pow__(self, exponent: int):
		if exponent < 0:
			return self.inverse() ** (-exponent)
		result = QuadraticSurd(1)
		for _ in range(exponent):
			result = result * self
		return result

	def is_zero(self) -> bool:
		return self.a == 0 and self.b == 0

	def __bool__(self):
		return not self.is_zero()

	def sign(self) -> int:
		if self.is_zero():
			return 0
		if self.a >= 0 and self.b >= 0:
			return 1
		if self.a <= 0 and self.b <= 0:
			return -1
		# opposite signs: compare a^2 with 2b^2
		if self.a > 0:
			return 1 if self.a * self.a > 2 * self.b * self.b else -1
		return 1 if 2 * self.b * self.b > self.a * self.a else -1

	def __lt__(self, other):
		other = self._coerce(other)
		if other is None:
			return NotImplemented
		return (self - other).sign() < 0

	def __le__(self, other):
		other = self._coerce(other)
		if other is None:
			return NotImplemented
		return (self - other).sign() <= 0

	def sqrt(self) -> "QuadraticSurd | None":
		"""
		Exact square root inside Q(sqrt 2), or None when the root leaves the field.
		"""
		if self.sign() < 0:
			return None
		if self.is_zero():
			return QuadraticSurd(0)

		if self.b == 0:
			root = rational_sqrt(self.a)
			if root is not None:
				return QuadraticSurd(root)
			root = rational_sqrt(self.a / 2)
			if root is not None:
				return QuadraticSurd(0, root)
			return None

		disc = rational_sqrt(self.norm())
		if disc is None:
			return None

		for x_sq in ((self.a + disc) / 2, (self.a - disc) / 2):
			x = rational_sqrt(x_sq)
			if not x:
				continue
			candidate = QuadraticSurd(x, self.b / (2 * x))
			if candidate * candidate == self:
				return -candidate if candidate.sign() < 0 else candidate
		return None

	def __eq__(self, other):
		other = self._coerce(other)
		if other is None:
			return NotImplemented
		return self.a == other.a and self.b == other.b

	def __hash__(self):
		return hash((self.a, self.b))

	def __float__(self):
		return float(self.a) + float(self.b) * math.sqrt(2)

	def to_literal(self) -> str:
		terms = []
		if self.a != 0:
			terms.append(_format_fraction(self.a))
		if self.b != 0:
			coefficient = f"{_format_fraction(abs(self.b))} rt2^1"
			if terms:
				terms.append(("- " if self.b < 0 else "+ ") + coefficient)
			else:
				terms.append(("-" if self.b < 0 else "") + coefficient)
		return " ".join(terms) if terms else "0"

	def __repr__(self):
		return f"QuadraticSurd({self.a}, {self.b})"


def _format_fraction(value: Fraction) -> str:
	return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


class Scalar:
	"""
	Complex amplitude in one of two modes.

	Exact scalars are real elements of Q(sqrt 2) (every exactly representable literal is real). Approximate scalars
	wrap a Python complex and compare with tolerance ``EPS_AMP`` on both components. Mixing modes yields an
	approximate result. Hashing follows the mode: exact scalars hash by value, approximate ones all hash alike, so
	sets and dictionary keys should not mix the two modes.

	Parameters
	----------
	value : QuadraticSurd | int | Fraction | float | complex
		Integers, fractions and surds give exact scalars. Floats and complex numbers give approximate ones.

	Example
	-------
	>>> h = parse_amplitude("1/2 rt2^1")
	>>> (h * h) == Scalar(Fraction(1, 2))
	True
	"""

	__slots__ = ("surd", "value")

	def __init__(self, value=0):
		if isinstance(value, Scalar):
			self.surd, self.value = value.surd, value.value
		elif isinstance(value, QuadraticSurd):
			self.surd, self.value = value, None
		elif isinstance(value, (int, Fraction)) and not isinstance(value, bool):
			self.surd, self.value = QuadraticSurd(value), None
		elif isinstance(value, (float, complex)):
			self.surd, self.value = None, complex(value)
		else:
			raise ValueError(f"Invalid value. Expected a number, got {type(value).__name__}.")

	@classmethod
	def zero(cls, exact: bool = True) -> "Scalar":
		return cls(0) if exact else cls(0j)

	@classmethod
	def one(cls, exact: bool = True) -> "Scalar":
		return cls(1) if exact else cls(1 + 0j)

	@classmethod
	def cis(cls, turns: Fraction) -> "Scalar":
		# e^{2 pi i turns}
		return cls(cmath.exp(2j * math.pi * float(turns)))

	@property
	def is_exact(self) -> bool:
		return self.surd is not None

	def __complex__(self):
		return complex(float(self.surd)) if self.is_exact else self.value

	@property
	def real(self) -> float:
		return float(self.surd) if self.is_exact else self.value.real

	@property
	def imag(self) -> float:
		return 0.0 if self.is_exact else self.value.imag

	def __float__(self):
		if self.is_exact:
			return float(self.surd)
		if abs(self.value.imag) > EPS_AMP:
			raise TypeError(f"Scalar {self.value} is not real")
		return self.value.real

	def _pair(self, other):
		if not isinstance(other, Scalar):
			try:
				other = Scalar(other)
			except ValueError:
				return None, None
		if self.is_exact and other.is_exact:
			return self.surd, other.surd
		return complex(self), complex(other)

	def __add__(self, other):
		x, y = self._pair(other)
		if x is None:
			return NotImplemented
		return Scalar(x + y)

	__radd__ = __add__

	def __sub__(self, other):
		x, y = self._pair(other)
		if x is None:
			return NotImplemented
		return Scalar(x - y)

	def __rsub__(self, other):
		x, y = self._pair(other)
		if x is None:
			return NotImplemented
		return Scalar(y - x)

	def __mul__(self, other):
		x, y = self._pair(other)
		if x is None:
			return NotImplemented
		return Scalar(x * y)

	__rmul__ = __mul__

	def __truediv__(self, other):
		x, y = self._pair(other)
		if x is None:
			return NotImplemented
		return Scalar(x / y)

	def __neg__(self):
		return Scalar(-self.surd) if self.is_exact else Scalar(-self.value)

	def conjugate(self) -> "Scalar":
		return self if self.is_exact else Scalar(self.value.conjugate())

	def abs2(self) -> "Scalar":
		"""Squared magnitude, as a real scalar of the same mode."""
		if self.is_exact:
			return Scalar(self.surd * self.surd)
		return Scalar(complex(abs(self.value) ** 2))

	def is_zero(self) -> bool:
		if self.is_exact:
			return self.surd.is_zero()
		return abs(self.value) <= EPS_AMP

	def sqrt(self) -> "Scalar | None":
		"""Square root of a nonnegative real scalar; None when an exact root does not exist."""
		if self.is_exact:
			root = self.surd.sqrt()
			return None if root is None else Scalar(root)
		return Scalar(complex(math.sqrt(max(float(self), 0.0))))

	def __eq__(self, other):
		x, y = self._pair(other)
		if x is None:
			return NotImplemented
		if isinstance(x, QuadraticSurd):
			return x == y
		return abs(x.real - y.real) <= EPS_AMP and abs(x.imag - y.imag) <= EPS_AMP

	def __hash__(self):
		# values equal within EPS_AMP must hash alike
		if self.is_exact:
			return hash(self.surd)
		return hash(Scalar)

	def to_literal(self) -> str:
		if self.is_exact:
			return self.surd.to_literal()
		if abs(self.value.imag) <= EPS_AMP:
			return repr(self.value.real)
		return f"{self.value.real!r}{self.value.imag:+.17g}i"

	def to_json(self):
		return float(self) if self.is_exact or abs(self.value.imag) <= EPS_AMP else [self.value.real, self.value.imag]

	def __repr__(self):
		return f"Scalar({self.to_literal()})"


_TERM = re.compile(
	r"\s*(?P<sign>[+-])?\s*"
	r"(?:cis\(\s*(?P<cnum>[+-]?\d+)\s*/\s*(?P<cden>\d+)\s*\)"
	r"|(?P<num>\d+(?:\.\d*)?(?:/\d+)?)?\s*(?:rt2\^(?P<exp>[+-]?\d+))?)\s*"
)


def parse_amplitude(text: str, exact: bool = True) -> Scalar:
	"""
	Parse an amplitude literal.

	Terms are ``a/b`` (rational), ``a/b rt2^m`` (times 2^(m/2)), ``cis(a/b)`` (e^{2 pi i a/b}, approximate only) and
	signed decimals; a literal is one term or several terms joined by ``+``/``-``.

	Parameters
	----------
	text : str
		The literal.
	exact : bool
		If True the result is exact and ``cis`` terms are rejected. If False the result is approximate.

	Example
	-------
	>>> parse_amplitude("3/5")
	Scalar(3/5)
	>>> parse_amplitude("-1/2 rt2^1")
	Scalar(-1/2 rt2^1)
	"""
	total = Scalar.zero(exact)
	pos = 0
	first = True
	text = text.strip()
	if not text:
		raise ValueError("Invalid amplitude. Expected a literal, got an empty string.")

	while pos < len(text):
		match = _TERM.match(text, pos)
		if match is None or match.end() == pos or not (match["cnum"] or match["num"] or match["exp"]):
			raise ValueError(f"Invalid amplitude literal {text!r} at column {pos + 1}.")
		if not first and match["sign"] is None:
			raise ValueError(f"Invalid amplitude literal {text!r}: terms must be joined by '+' or '-'.")

		if match["cnum"] is not None:
			if exact:
				raise ValueError(f"Invalid amplitude literal {text!r}: cis(...) requires approximate mode.")
			term = Scalar.cis(Fraction(int(match["cnum"]), int(match["cden"])))
		else:
			coefficient = Fraction(match["num"]) if match["num"] else Fraction(1)
			surd = QuadraticSurd(coefficient)
			if match["exp"] is not None:
				surd = surd * QuadraticSurd.rt2_power(int(match["exp"]))
			term = Scalar(surd) if exact else Scalar(complex(float(surd)))

		total = total - term if match["sign"] == "-" else total + term
		pos = match.end()
		first = False

	return total
