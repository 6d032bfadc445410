"""Measurement-unit conversion registry.

Unit tokens must match exactly unless a conversion factor has been
registered; silent coercion between ecological measurement units is a known
failure mode, so nothing is built in. The registry is populated at startup
and read-only afterwards.
"""

from __future__ import annotations

from decimal import Decimal

from .values import SlotValue, number


class ConversionRegistry:
    def __init__(self):
        self._factors: dict[tuple[str, str], Decimal] = {}

    def register(self, from_unit: str, to_unit: str, factor: Decimal | int | str) -> None:
        """Register `value[from_unit] * factor = value[to_unit]` (and inverse)."""
        f = factor if isinstance(factor, Decimal) else Decimal(str(factor))
        self._factors[(from_unit, to_unit)] = f
        self._factors.setdefault((to_unit, from_unit), Decimal(1) / f)

    def convert(self, value: SlotValue, to_unit: str) -> SlotValue | None:
        """Convert a number SlotValue to `to_unit`; None when no path exists."""
        if value.kind != "number":
            return None
        if value.unit == to_unit:
            return value
        factor = self._factors.get((value.unit or "", to_unit))
        if factor is None:
            return None
        return number(value.magnitude * factor, to_unit)  # type: ignore[operator]


NO_CONVERSIONS = ConversionRegistry()
