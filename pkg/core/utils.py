"""
Utility functions for the support recovery toolkit
Helpers for number rendering, CSV/JSON output, confidence intervals and config files
"""

import csv
import io
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Tuple
import logging

import environ
from django.conf import settings
from rest_framework.renderers import JSONRenderer
from scipy.stats import norm

from core.exceptions import UsageError

logger = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64


def format_number(value: Any, digits: Optional[int] = None) -> str:
    """
    Render one CSV cell

    Args:
        value: Number, string, boolean or None
        digits: Significant digits for reals (defaults to CSV_SIGNIFICANT_DIGITS)

    Returns:
        Locale-independent text; None renders as an empty cell
    """
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        digits = settings.CSV_SIGNIFICANT_DIGITS if digits is None else digits
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return f"{value:.{digits}g}"
    if hasattr(value, 'item'):
        # numpy scalars
        return format_number(value.item(), digits)
    return str(value)


def render_csv(records: Iterable[Mapping[str, Any]], fieldnames: Sequence[str]) -> str:
    """
    Render records as CSV with a header row and LF line endings

    Columns not present in a record are left empty.
    """
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), lineterminator='\n',
                            extrasaction='ignore')
    writer.writeheader()
    for record in records:
        writer.writerow({name: format_number(record.get(name)) for name in fieldnames})
    return buffer.getvalue()


def json_safe(value: Any) -> Any:
    """Replace non-finite floats with None so strict JSON rendering accepts them"""
    if isinstance(value, Mapping):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    if hasattr(value, 'item') and not isinstance(value, (str, bytes)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def render_json(payload: Any) -> str:
    """Render a payload with DRF's JSONRenderer, newline terminated"""
    content = JSONRenderer().render(json_safe(payload), renderer_context={'indent': 2})
    return content.decode('utf-8') + '\n'


def write_output(content: str, path: Optional[str] = None, stream=None) -> None:
    """
    Write rendered output to a file, or to the given stream when no path is set

    Raises:
        UsageError: If the file cannot be written
    """
    if not path or path == '-':
        stream.write(content)
        return
    try:
        with open(Path(path), 'w', encoding='utf-8', newline='') as handle:
            handle.write(content)
    except OSError as e:
        raise UsageError(f"Cannot write output file {path}: {e}") from e
    logger.info(f"Output written to {path}")


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """
    Wilson score interval for a binomial proportion

    Args:
        successes: Number of counted events
        trials: Number of Bernoulli trials (positive)
        confidence: Two-sided coverage

    Returns:
        Tuple of (low, high) within [0, 1]
    """
    if trials <= 0:
        raise UsageError("Wilson interval needs at least one trial")
    z = float(norm.ppf(0.5 + confidence / 2))
    p_hat = successes / trials
    z2 = z * z
    denominator = 1 + z2 / trials
    centre = (p_hat + z2 / (2 * trials)) / denominator
    half_width = z * math.sqrt(p_hat * (1 - p_hat) / trials + z2 / (4 * trials * trials)) / denominator
    return max(0.0, centre - half_width), min(1.0, centre + half_width)


def parse_seed(value: Any) -> int:
    """
    Parse a 64-bit unsigned decimal seed

    Raises:
        UsageError: If the value is not an integer in [0, 2**64)
    """
    try:
        seed = int(str(value).strip(), 10)
    except (TypeError, ValueError):
        raise UsageError(f"Seed must be an unsigned decimal integer, got {value!r}")
    if not 0 <= seed < SEED_LIMIT:
        raise UsageError(f"Seed must lie in [0, 2**64), got {seed}")
    return seed


def parse_config_file(path: str, schema: Mapping[str, Any]) -> Dict[str, Any]:
    """
    Read a plain-text key = value config file

    Args:
        path: UTF-8 file; '#' starts a comment, blank lines are ignored
        schema: Allowed keys mapped to their cast (int, float, str, bool, list)

    Returns:
        Dict of cast values keyed like the schema

    Raises:
        UsageError: On unreadable files, malformed lines and unknown keys
    """
    try:
        text = Path(path).read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as e:
        raise UsageError(f"Cannot read config file {path}: {e}") from e

    values = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise UsageError(f"{path}:{line_no}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        key = key.replace('_', '-')
        if key not in schema:
            raise UsageError(f"{path}:{line_no}: unknown key {key!r}")
        try:
            values[key] = environ.Env.parse_value(value, schema[key])
        except (TypeError, ValueError) as e:
            raise UsageError(f"{path}:{line_no}: bad value for {key!r}: {e}") from e

    logger.debug(f"Loaded {len(values)} settings from {path}")
    return values
