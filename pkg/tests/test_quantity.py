import pytest
from hypothesis import given, strategies as st

from tablink.quantity import (
    QuantityParseError,
    magnitudes_equal,
    parse_quantity,
    round_half_up,
)


def test_scientific_notation():
    v = parse_quantity("1.57E+12")
    assert v.magnitude == 1.57e12
    assert v.display_precision == 2
    assert v.scale_applied == 1e12
    assert v.has_scale


def test_percent():
    v = parse_quantity("12.5%")
    assert v.magnitude == 12.5
    assert v.is_percent
    assert v.display_precision == 1


def test_non_numeric_rejected():
    with pytest.raises(QuantityParseError):
        parse_quantity("abc")


@pytest.mark.parametrize(
    "text,magnitude,precision,scale",
    [
        ("27.20", 27.20, 2, 1.0),
        ("27.2", 27.2, 1, 1.0),
        ("8.3B", 8.3e9, 1, 1e9),
        ("8.30E+09", 8.3e9, 2, 1e9),
        ("1,234", 1234.0, 0, 1.0),
        ("1,234,567.5", 1234567.5, 1, 1.0),
        ("0.92", 0.92, 2, 1.0),
        ("3k", 3000.0, 0, 1e3),
        ("2.5M", 2.5e6, 1, 1e6),
        ("1.6T", 1.6e12, 1, 1e12),
        ("-4.2", -4.2, 1, 1.0),
        ("−4.2", -4.2, 1, 1.0),
        ("5e3", 5000.0, 0, 1e3),
    ],
)
def test_grammar(text, magnitude, precision, scale):
    v = parse_quantity(text)
    assert magnitudes_equal(v.magnitude, magnitude)
    assert v.display_precision == precision
    assert v.scale_applied == scale


@pytest.mark.parametrize("bad", ["", "12..5", "1,23", "12%%", "4.2.3", "GB", "E+12"])
def test_grammar_rejects(bad):
    with pytest.raises(QuantityParseError):
        parse_quantity(bad)


_mantissas = st.decimals(
    min_value="0.01", max_value="999.99", places=2, allow_nan=False
).map(str)


@given(_mantissas)
def test_suffix_scale_law(mantissa):
    base = parse_quantity(mantissa)
    for suffix, scale in (("K", 1e3), ("M", 1e6), ("B", 1e9), ("T", 1e12)):
        scaled = parse_quantity(mantissa + suffix)
        assert scaled.magnitude == scale * base.magnitude
        assert scaled.display_precision == base.display_precision


@given(_mantissas, st.integers(-12, 12))
def test_exponent_scale_law(mantissa, exp):
    base = parse_quantity(mantissa)
    scaled = parse_quantity(f"{mantissa}E{exp}")
    assert scaled.magnitude == (10.0 ** exp) * base.magnitude


def test_round_half_up_ties_away():
    assert round_half_up(0.125, 2) == 0.13
    assert round_half_up(2.5, 0) == 3.0
    assert round_half_up(2.25, 1) == 2.3
    assert round_half_up(27.20, 1) == 27.2
    assert round_half_up(-2.5, 0) == -3.0


def test_numeric_value_has_scale_flag():
    assert not parse_quantity("42").has_scale
    assert parse_quantity("42K").has_scale
    assert parse_quantity("4.2E+01").has_scale
