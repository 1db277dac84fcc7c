"""Parsing of numeric surface forms found in prose and table cells.

Handles plain decimals, thousands separators, percent signs, magnitude
suffixes (K/M/B/T) and exponent notation, keeping track of how precise the
surface form was so matching can round accordingly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

SUFFIX_SCALES = {"K": 1e3, "M": 1e6, "B": 1e9, "T": 1e12}

_QUANTITY_RE = re.compile(
    r"""^
    (?P<sign>[+\-−])?
    (?P<int>\d{1,3}(?:,\d{3})+|\d+)
    (?:\.(?P<frac>\d+))?
    (?:
        [eE](?P<exp>[+\-−]?\d+)
      | (?P<suffix>[kKmMbBtT])
    )?
    (?P<pct>%)?
    $""",
    re.VERBOSE,
)


class QuantityParseError(ValueError):
    """Raised when a token is not a quantity the grammar accepts."""


@dataclass(frozen=True)
class NumericValue:
    """A parsed number plus the surface-form facts matching relies on."""

    magnitude: float
    display_precision: int
    is_percent: bool = False
    scale_applied: float = 1.0

    @property
    def has_scale(self) -> bool:
        return self.scale_applied != 1.0


def parse_quantity(text: str) -> NumericValue:
    """Parse a numeric token such as ``27.20``, ``1,234``, ``12.5%``,
    ``8.3B`` or ``1.57E+12``.

    Raises QuantityParseError for anything outside the grammar.
    """
    token = text.strip()
    m = _QUANTITY_RE.match(token)
    if m is None:
        raise QuantityParseError(f"not a numeric quantity: {text!r}")

    int_part = m.group("int").replace(",", "")
    frac = m.group("frac") or ""
    mantissa = float(f"{int_part}.{frac}" if frac else int_part)
    if m.group("sign") in ("-", "−"):
        mantissa = -mantissa

    scale = 1.0
    if m.group("exp") is not None:
        scale = 10.0 ** int(m.group("exp").replace("−", "-"))
    elif m.group("suffix"):
        scale = SUFFIX_SCALES[m.group("suffix").upper()]

    return NumericValue(
        magnitude=mantissa * scale,
        display_precision=len(frac),
        is_percent=m.group("pct") is not None,
        scale_applied=scale,
    )


def is_quantity(text: str) -> bool:
    try:
        parse_quantity(text)
    except QuantityParseError:
        return False
    return True


def round_half_up(value: float, ndigits: int) -> float:
    """Round with ties going away from zero, e.g. 0.125 -> 0.13 at 2 digits."""
    quantum = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


def magnitudes_equal(a: float, b: float, rel_tol: float = 1e-12) -> bool:
    """Equality up to float noise from different parse paths (e.g. 8.3B vs
    8300M); not a semantic tolerance."""
    if a == b:
        return True
    return abs(a - b) <= rel_tol * max(abs(a), abs(b))
