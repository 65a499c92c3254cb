"""Common utility functions for the cumulative entropy toolkit."""

import math
import sys

from config.settings import Config


def setup_utf8_output():
    """Configure system to handle UTF-8 output properly."""
    if sys.stdout.encoding != 'utf-8':
        sys.stdout.reconfigure(encoding='utf-8')
    if sys.stderr.encoding != 'utf-8':
        sys.stderr.reconfigure(encoding='utf-8')


def round_significant(value: float, digits: int = Config.SIGNIFICANT_DIGITS) -> float:
    """
    Round a float to a number of significant digits.

    Args:
        value: Number to round
        digits: Significant digits (default: Config.SIGNIFICANT_DIGITS)

    Returns:
        Rounded float; non-finite values are returned unchanged
    """
    if not math.isfinite(value) or value == 0.0:
        return value
    return float(f"{value:.{digits}g}")


def format_number(value, digits: int = Config.SIGNIFICANT_DIGITS) -> str:
    """
    Format a number with a fixed count of significant digits.

    Args:
        value: int, float, bool or None

    Returns:
        Formatted string ("inf", "-inf", "nan" for non-finite floats, "" for None)
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"
