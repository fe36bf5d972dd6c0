"""Timestamp normalization against an independent calendar oracle."""

from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from cloudspill.reporting import (
    FMT_EPOCH_MS,
    FMT_EPOCH_S,
    FMT_HUMAN_OTHER,
    FMT_YMD_HMS,
    SENTINEL_YMD,
    normalize_timestamp,
)


def days_from_civil(year: int, month: int, day: int) -> int:
    """Days since 1970-01-01 by pure integer arithmetic (era decomposition),
    independent of any datetime library."""
    year -= month <= 2
    era = (year if year >= 0 else year - 399) // 400
    yoe = year - era * 400
    doy = (153 * (month + (-3 if month > 2 else 9)) + 2) // 5 + day - 1
    doe = yoe * 365 + yoe // 4 - yoe // 100 + doy
    return era * 146097 + doe - 719468


def oracle_utc_ms(year, month, day, hour, minute, second, tz_offset_min=0):
    days = days_from_civil(year, month, day)
    seconds = days * 86400 + hour * 3600 + minute * 60 + second
    return seconds * 1000 - tz_offset_min * 60_000


def test_epoch_ms_passthrough():
    assert normalize_timestamp(0, FMT_EPOCH_MS) == (0, None)
    assert normalize_timestamp(1398902400000, FMT_EPOCH_MS) == (1398902400000, None)
    assert normalize_timestamp("1398902400000", FMT_EPOCH_MS) == (1398902400000, None)


def test_epoch_seconds_scaled():
    assert normalize_timestamp(1398902400, FMT_EPOCH_S) == (1398902400000, None)


def test_sentinel_maps_to_null_without_warning():
    assert normalize_timestamp(SENTINEL_YMD, FMT_YMD_HMS) == (None, None)


def test_blank_is_absence_not_warning():
    assert normalize_timestamp(None, FMT_EPOCH_MS) == (None, None)
    assert normalize_timestamp("", FMT_YMD_HMS) == (None, None)


def test_unparsable_warns():
    value, warning = normalize_timestamp("not a date", FMT_YMD_HMS)
    assert value is None and warning
    value, warning = normalize_timestamp("christmas", FMT_EPOCH_MS)
    assert value is None and warning


def test_known_conversion_against_oracle():
    expected = oracle_utc_ms(2014, 1, 1, 0, 0, 0)
    assert expected == 1388534400000
    assert normalize_timestamp("20140101 00:00:00", FMT_YMD_HMS) == (expected, None)


def test_hundred_random_dates_match_oracle():
    rng = random.Random(99)
    month_days = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]
    for _ in range(100):
        year = rng.randrange(1902, 2100)
        month = rng.randrange(1, 13)
        limit = month_days[month - 1]
        if month == 2 and (year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)):
            limit = 29
        day = rng.randrange(1, limit + 1)
        hour, minute, second = (rng.randrange(24), rng.randrange(60),
                                rng.randrange(60))
        offset = rng.choice([-600, -480, 0, 60, 330, 600])
        text = f"{year:04d}{month:02d}{day:02d} {hour:02d}:{minute:02d}:{second:02d}"
        got, warning = normalize_timestamp(text, FMT_YMD_HMS, offset)
        assert warning is None
        assert got == oracle_utc_ms(year, month, day, hour, minute, second, offset)


def test_tz_offset_applied():
    # 10:00 local at UTC+10 is midnight UTC
    got, _ = normalize_timestamp("20140501 10:00:00", FMT_YMD_HMS, 600)
    assert got == oracle_utc_ms(2014, 5, 1, 0, 0, 0)


def test_iso_with_offset_ignores_device_zone():
    got, _ = normalize_timestamp("2014-05-01T10:00:00+10:00", FMT_HUMAN_OTHER, 300)
    assert got == oracle_utc_ms(2014, 5, 1, 0, 0, 0)


def test_iso_naive_uses_device_zone():
    got, _ = normalize_timestamp("2014-05-01T10:00:00", FMT_HUMAN_OTHER, 600)
    assert got == oracle_utc_ms(2014, 5, 1, 0, 0, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1902, max_value=2099), st.integers(1, 12),
       st.integers(1, 28), st.integers(0, 23), st.integers(0, 59),
       st.integers(0, 59))
def test_ymd_property_against_oracle(year, month, day, hour, minute, second):
    text = f"{year:04d}{month:02d}{day:02d} {hour:02d}:{minute:02d}:{second:02d}"
    if text == SENTINEL_YMD:
        return
    got, warning = normalize_timestamp(text, FMT_YMD_HMS)
    assert warning is None
    assert got == oracle_utc_ms(year, month, day, hour, minute, second)
