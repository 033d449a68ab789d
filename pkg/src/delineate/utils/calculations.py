"""Calculation utilities for corpus statistics."""

from decimal import ROUND_HALF_UP, Decimal
from statistics import median


def round_half_away(value: float | int | Decimal, digits: int = 0) -> float:
    """Round half away from zero at the given number of decimals.

    Python's round() uses banker's rounding; published tables round 0.5 up.

    Args:
        value: Number to round
        digits: Decimal places to keep (default 0)

    Returns:
        Rounded value
    """
    quantum = Decimal(1).scaleb(-digits)
    dec = value if isinstance(value, Decimal) else Decimal(str(value))
    return float(dec.quantize(quantum, rounding=ROUND_HALF_UP))


def exact_ratio(numerator: int, denominator: int) -> Decimal:
    """Exact decimal quotient of two integers (0 when the denominator is 0)."""
    if denominator == 0:
        return Decimal(0)
    return Decimal(numerator) / Decimal(denominator)


def articles_per_journal(articles: int, journals: int) -> int:
    """Articles per journal, rounded half away from zero to an integer.

    Args:
        articles: Article count A
        journals: Journal count J

    Returns:
        round(A / J), or 0 if there are no journals
    """
    return int(round_half_away(exact_ratio(articles, journals)))


def percent_share(part: int, whole: int, digits: int = 1) -> float:
    """Percentage of whole represented by part, rounded half away from zero."""
    return round_half_away(exact_ratio(part, whole) * 100, digits)


def average(total: int | float, count: int, digits: int = 1) -> float:
    """Mean of a sum over a count, rounded half away from zero."""
    if count == 0:
        return 0.0
    return round_half_away(Decimal(str(total)) / Decimal(count), digits)


def relative_frequency(count: int, denominator: int) -> float | None:
    """count / denominator, or None when the denominator is 0."""
    if denominator == 0:
        return None
    return count / denominator


def median_throughput(timings: list[float], items: int) -> tuple[float, float]:
    """Median wall time over repetitions and the matching items/second.

    Args:
        timings: Wall times in seconds, one per repetition
        items: Items processed per repetition

    Returns:
        Tuple of (median wall time, items per second)
    """
    if not timings:
        return 0.0, 0.0
    mid = median(timings)
    return mid, (items / mid if mid > 0 else 0.0)
