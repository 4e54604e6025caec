"""
Helper utility functions
Common conversions and formatting used across the CLI
"""

import ast


def format_number(value):
    """
    Format a number with full round-trip precision

    Args:
        value: int, float or None

    Returns:
        str: 17 significant digits for floats, plain digits for ints, '' for None
    """
    if value is None:
        return ''
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    return format(float(value), '.17g')


def format_duration(seconds):
    """
    Format a wall-clock duration in seconds to a short string

    Args:
        seconds: elapsed seconds

    Returns:
        str: formatted duration (e.g., "2m 30s" or "0.42s")
    """
    if not seconds:
        return "0s"

    minutes = int(seconds // 60)
    secs = seconds - 60 * minutes

    if minutes > 0:
        return f"{minutes}m {int(round(secs))}s"
    return f"{secs:.2f}s"


def parse_bool(text):
    """Parse yes/no style flags; raises ValueError on anything else."""
    lowered = str(text).strip().lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"'{text}' is not a boolean")


def parse_complex(text):
    """
    Parse a Python numeric literal (int, float or complex such as 0.5+0.5j)

    Expressions like sqrt(2) are not accepted; only literals.
    """
    text = str(text).strip()
    if text.startswith('(') and text.endswith(')'):
        text = text[1:-1]
    try:
        node = ast.literal_eval(text)
    except (ValueError, SyntaxError):
        raise ValueError(f"'{text}' is not a numeric literal") from None
    if isinstance(node, bool) or not isinstance(node, (int, float, complex)):
        raise ValueError(f"'{text}' is not a numeric literal")
    return complex(node)


def parse_list(text, convert=float):
    """Split a comma separated value and convert every item."""
    items = [item.strip() for item in str(text).split(',')]
    if not items or any(not item for item in items):
        raise ValueError(f"'{text}' is not a comma separated list")
    return [convert(item) for item in items]
