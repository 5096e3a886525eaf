"""Calendar months and tri-annual publication periods."""
from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass

PUBLICATION_MONTHS = (2, 6, 10)


def _split_code(code) -> tuple[int, int]:
    s = str(code).strip().replace("-", "")
    if len(s) != 6 or not s.isdigit():
        raise ValueError(f"expected YYYYMM, got {code!r}")
    return int(s[:4]), int(s[4:])


@dataclass(frozen=True, order=True)
class YearMonth:
    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")

    @classmethod
    def parse(cls, code) -> "YearMonth":
        return cls(*_split_code(code))

    @property
    def index(self) -> int:
        """Months since year 0; differences give month distances."""
        return self.year * 12 + (self.month - 1)

    @classmethod
    def from_index(cls, i: int) -> "YearMonth":
        return cls(i // 12, i % 12 + 1)

    def shift(self, n: int) -> "YearMonth":
        return YearMonth.from_index(self.index + n)

    def prev(self) -> "YearMonth":
        return self.shift(-1)

    def next(self) -> "YearMonth":
        return self.shift(1)

    @property
    def code(self) -> int:
        return self.year * 100 + self.month

    def __str__(self):
        return f"{self.year:04d}{self.month:02d}"


@dataclass(frozen=True, order=True)
class Period:
    """A publication period; month is one of February, June, October."""

    year: int
    month: int

    def __post_init__(self):
        if self.month not in PUBLICATION_MONTHS:
            raise ValueError(f"not a publication month: {self.month}")

    @classmethod
    def parse(cls, code) -> "Period":
        return cls(*_split_code(code))

    @property
    def ym(self) -> YearMonth:
        return YearMonth(self.year, self.month)

    @property
    def index(self) -> int:
        return self.year * 3 + PUBLICATION_MONTHS.index(self.month)

    @classmethod
    def from_index(cls, i: int) -> "Period":
        return cls(i // 3, PUBLICATION_MONTHS[i % 3])

    def shift(self, n: int) -> "Period":
        return Period.from_index(self.index + n)

    def prev(self) -> "Period":
        return self.shift(-1)

    def next(self) -> "Period":
        return self.shift(1)

    def same_last_year(self) -> "Period":
        return Period(self.year - 1, self.month)

    @property
    def code(self) -> int:
        return self.year * 100 + self.month

    def __str__(self):
        return f"{self.year:04d}{self.month:02d}"


def year_month_of(date: _dt.date) -> YearMonth:
    return YearMonth(date.year, date.month)


def period_range(first: Period, last: Period) -> list[Period]:
    return [Period.from_index(i) for i in range(first.index, last.index + 1)]
