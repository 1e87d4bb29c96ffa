import pytest
from fractions import Fraction

from hypothesis import assume, given
from hypothesis import strategies as st

from qtmlab.scalar import EPS_AMP, QuadraticSurd, Scalar, parse_amplitude, rational_sqrt

surds = st.builds(QuadraticSurd, st.integers(-40, 40), st.integers(-40, 40))


def test_rational_sqrt():
	assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
	assert rational_sqrt(0) == 0
	assert rational_sqrt(2) is None
	assert rational_sqrt(-1) is None


def test_surd_arithmetic():
	x = QuadraticSurd(1, 1)
	assert x * x.conj_sq2() == -1
	assert x.inverse() == QuadraticSurd(-1, 1)
	assert QuadraticSurd.rt2_power(-1) * QuadraticSurd.rt2_power(-1) == Fraction(1, 2)
	assert QuadraticSurd.rt2_power(3) == QuadraticSurd(0, 2)
	assert x ** -2 == (x * x).inverse()

	# Objective: Verify that division by zero is reported as such.
	with pytest.raises(ZeroDivisionError):
		QuadraticSurd(1) / QuadraticSurd(0)


@pytest.mark.parametrize(
	"a, b, sign",
	[(1, -1, -1), (2, -1, 1), (-3, 2, -1), (-1, 1, 1), (0, 0, 0)],
)
def test_surd_sign(a, b, sign):
	# Objective: Verify that the sign of a + b sqrt(2) is decided exactly, including opposite-sign parts.
	assert QuadraticSurd(a, b).sign() == sign


@pytest.mark.parametrize(
	"value, root",
	[
		(QuadraticSurd(3, 2), QuadraticSurd(1, 1)),
		(QuadraticSurd(Fraction(1, 2)), QuadraticSurd(0, Fraction(1, 2))),
		(QuadraticSurd(4), QuadraticSurd(2)),
		(QuadraticSurd(0), QuadraticSurd(0)),
	],
)
def test_surd_sqrt(value, root):
	assert value.sqrt() == root


def test_surd_sqrt_outside_field():
	assert QuadraticSurd(3).sqrt() is None
	assert QuadraticSurd(-1).sqrt() is None


@given(surds)
def test_surd_inverse(x):
	# Objective: Verify that every nonzero element of Q(sqrt 2) has an exact inverse.
	assume(not x.is_zero())
	assert x * x.inverse() == 1


@given(surds)
def test_surd_sqrt_of_square(x):
	assert (x * x).sqrt() == (x if x.sign() >= 0 else -x)


def test_scalar_modes():
	exact = Scalar(Fraction(1, 2))
	approx = Scalar(0.5)
	assert exact.is_exact and not approx.is_exact
	assert exact == approx
	assert not (exact + approx).is_exact
	assert Scalar(1j).imag == 1.0

	# Objective: Verify that only real scalars convert to float.
	with pytest.raises(TypeError):
		float(Scalar(1j))

	# Objective: Verify that the class raises a ValueError for a non-numeric value.
	with pytest.raises(ValueError, match="Invalid value"):
		Scalar("1/2")


def test_scalar_tolerance():
	assert Scalar(0.5 + EPS_AMP / 2) == Scalar(0.5)
	assert Scalar(0.5 + 10 * EPS_AMP) != Scalar(0.5)
	assert Scalar(EPS_AMP / 2).is_zero()
	assert not Scalar(QuadraticSurd(0, Fraction(1, 10**12))).is_zero()


def test_scalar_hash_follows_tolerance():
	# Objective: Verify that approximate scalars equal within the tolerance hash alike, across a rounding boundary.
	below, above = Scalar(0.1234567894), Scalar(0.1234567896)
	assert below == above
	assert hash(below) == hash(above)
	assert len({below, above}) == 1

	assert hash(Scalar(Fraction(1, 2))) == hash(Scalar(QuadraticSurd(Fraction(1, 2))))


def test_scalar_abs2():
	h = parse_amplitude("1 rt2^-1")
	assert h.abs2() == Scalar(Fraction(1, 2))
	assert Scalar(0.6 + 0.8j).abs2() == Scalar(1.0)
	assert Scalar(0.6 + 0.8j).conjugate() == Scalar(0.6 - 0.8j)


@pytest.mark.parametrize(
	"text, expected",
	[
		("1", Scalar(1)),
		("-3/5", Scalar(Fraction(-3, 5))),
		("0.25", Scalar(Fraction(1, 4))),
		("1 rt2^-1", Scalar(QuadraticSurd(0, Fraction(1, 2)))),
		("1/2 rt2^1", Scalar(QuadraticSurd(0, Fraction(1, 2)))),
		("rt2^2", Scalar(2)),
		("1/2 + 1/2 rt2^-1", Scalar(QuadraticSurd(Fraction(1, 2), Fraction(1, 4)))),
		("1 - rt2^1", Scalar(QuadraticSurd(1, -1))),
	],
)
def test_parse_amplitude(text, expected):
	value = parse_amplitude(text)
	assert value.is_exact
	assert value == expected


def test_parse_amplitude_approx():
	assert parse_amplitude("cis(1/4)", exact=False) == Scalar(1j)
	assert parse_amplitude("1/2 rt2^1", exact=False) == Scalar(2**-0.5)

	# Objective: Verify that cis literals are refused in exact mode.
	with pytest.raises(ValueError, match="approximate mode"):
		parse_amplitude("cis(1/4)")


@pytest.mark.parametrize("text", ["", "abc", "1/2 1/2", "rt2^"])
def test_parse_amplitude_invalid(text):
	with pytest.raises(ValueError, match="Invalid amplitude"):
		parse_amplitude(text)


@pytest.mark.parametrize("text", ["3/5", "-1/2 rt2^1", "1/2 + 1/4 rt2^1", "0"])
def test_literal_roundtrip(text):
	# Objective: Verify that printed exact literals parse back to the same value.
	value = parse_amplitude(text)
	assert value.to_literal() == text
	assert parse_amplitude(value.to_literal()) == value
