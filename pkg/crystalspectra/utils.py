import os
import math
import logging
from concurrent.futures import ThreadPoolExecutor

from .consts import CrystalConventions as const
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

# nodes handed to a worker at once by the grid kernels
CHUNK_SIZE = 256


def worker_count(workers=None):
    """number of worker threads used by the parallel grid kernels

        Args:
            workers (int, optional): explicit worker count; overrides the environment

        Returns:
            int: ``workers`` if given, else the value of ``CRYSTAL_SPECTRA_THREADS``,
            else ``os.cpu_count()``

        Raises:
            ConfigurationError: the worker count is not a positive integer

    """
    if workers is None:
        raw = os.environ.get(const.THREADS_ENV)
        if raw is None or raw.strip() == "":
            return os.cpu_count() or 1
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigurationError("{0} must be a positive integer, got {1!r}".format(const.THREADS_ENV, raw))
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ConfigurationError("worker count must be a positive integer, got {0!r}".format(workers))
    return workers


def chunks(sequence, size=CHUNK_SIZE):
    """consecutive slices of ``sequence`` with at most ``size`` items"""
    return [sequence[pos:pos + size] for pos in range(0, len(sequence), size)]


def parallel_map(func, items, workers=None):
    """maps ``func`` over ``items`` on a thread pool, results in input order

    The result list only depends on ``func`` and ``items``, never on the worker count.
    """
    items = list(items)
    workers = min(worker_count(workers), max(len(items), 1))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def format_float(value):
    """17 significant digits, enough to round-trip a double"""
    return "%.17g" % value


def json_float(value):
    """float for JSON output; non-finite values become None"""
    if value is None:
        return None
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        return None
    return value


def csv_text(header, rows):
    """comma separated text with a header row and LF line endings"""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_interval(text):
    """parses ``"a,b"`` into a well ordered float tuple

        Raises:
            ConfigurationError: malformed or reversed interval

        Example:
           >>> from crystalspectra.utils import parse_interval
           >>> parse_interval("1,3")
           (1.0, 3.0)

    """
    if isinstance(text, (tuple, list)):
        parts = list(text)
    else:
        parts = str(text).split(",")
    if len(parts) != 2:
        raise ConfigurationError("interval must have the form a,b: {0!r}".format(text))
    try:
        a, b = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigurationError("interval must have the form a,b: {0!r}".format(text))
    check_interval((a, b))
    return a, b


def check_interval(interval):
    a, b = interval
    if not (math.isfinite(a) and math.isfinite(b)) or a > b:
        raise ConfigurationError("interval [{0}, {1}] is not well ordered".format(a, b))
    return float(a), float(b)


def parse_floats(text):
    """parses ``"t1,t2,..."`` into a list of floats"""
    try:
        values = [float(part) for part in str(text).split(",") if part.strip() != ""]
    except ValueError:
        raise ConfigurationError("expected a comma separated list of numbers: {0!r}".format(text))
    if not values:
        raise ConfigurationError("expected at least one number")
    return values
