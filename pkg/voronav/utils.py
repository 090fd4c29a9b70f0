import dataclasses
import enum
import json
import logging
import math

import numpy as np
from scipy import sparse


class NumpyEncoder(json.JSONEncoder):
    """A JSON encoder that handles ``numpy`` data types."""

    def default(self, obj):
        if isinstance(obj, np.bool_):
            return bool(obj)
        elif isinstance(obj, np.integer):
            return int(obj)
        elif isinstance(obj, np.floating):
            return float(obj)
        elif isinstance(obj, np.ndarray):
            return obj.tolist()
        return super().default(obj)


class PythonEncoder(json.JSONEncoder):
    """A JSON encoder for the enums, dataclasses and sets used in traces."""

    def default(self, obj):
        if isinstance(obj, enum.Enum):
            return obj.value
        elif dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return dataclasses.asdict(obj)
        elif isinstance(obj, (set, frozenset)):
            return sorted(obj)
        elif isinstance(obj, Exception):
            return repr(obj)
        return super().default(obj)


class AppEncoder(NumpyEncoder, PythonEncoder):
    """A JSON encoder that handles ``numpy`` and python data types."""

    def default(self, obj):
        try:
            return super().default(obj)
        except TypeError:
            return str(obj)


class JSONLogFormatter(logging.Formatter):
    """A JSON formatter for logs.

    Usage:

        >>> logger = logging.getLogger('voronav')
        >>> console = logging.StreamHandler()
        >>> console.setFormatter(JSONLogFormatter('asctime', 'message', 'levelname', 'event'))
        >>> logger.addHandler(console)
        >>> logger.info('chose waypoint', extra={'event': 'decision'})
        {"asctime": "...", "message": "chose waypoint", "levelname": "INFO", "event": "decision"}

    Args:
        fields (list of str): Attributes of ``logging.LogRecord`` to include,
            plus "asctime", "message" and any key passed through ``extra``.
        indent (int or None): Passed to ``json.dumps``.
        encoder (object): A ``json.JSONEncoder`` subclass. Defaults to
            :class:`AppEncoder`.
        **kwargs: Passed to ``logging.Formatter.__init__``.
    """

    def __init__(self, *fields, indent=None, encoder=None, **kwargs):
        self.fields = tuple(fields)
        self.encoder = AppEncoder if encoder is None else encoder
        self.indent = indent
        super().__init__(**kwargs)

    def format(self, record):
        return json.dumps(self._process_record(record), cls=self.encoder, indent=self.indent)

    def _process_record(self, record):
        fields = list(self.fields)
        if 'message' in fields:
            record.message = record.msg if isinstance(record.msg, dict) else record.getMessage()
        if 'asctime' in fields:
            record.asctime = self.formatTime(record, self.datefmt)
        if record.exc_info:
            if not record.exc_text:
                record.exc_text = self.formatException(record.exc_info)
            fields.append('exc_text')
        if record.stack_info:
            fields.append('stack_info')
        return {field: getattr(record, field, None) for field in fields}


def object_constants(obj):
    return [(attr, val) for attr, val in vars(obj).items()
            if not attr.startswith('_') and attr.isupper()]


def constant_values(obj):
    return [val for _, val in object_constants(obj)]


def wrap_degrees(angle):
    """Map ``angle`` into [0, 360)."""
    wrapped = math.fmod(angle, 360.0)
    if wrapped < 0:
        wrapped += 360.0
    # fmod of e.g. -1e-15 gives 360.0 after the shift
    return 0.0 if wrapped >= 360.0 else wrapped


def signed_angle(angle):
    """Map ``angle`` into [-180, 180)."""
    return wrap_degrees(angle + 180.0) - 180.0


def bearing_degrees(d_row, d_col):
    """Bearing in [0, 360) of the grid offset ``(d_row, d_col)``.

    Columns run along +x and rows along +y, so a bearing of 0 points down
    the columns and 90 down the rows.
    """
    return wrap_degrees(math.degrees(math.atan2(d_row, d_col)))


# 8-neighborhood in a fixed order; ties elsewhere are broken by this order
NEIGHBOR_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def grid_graph(mask, resolution):
    """Build the 8-connected weighted graph over the true cells of ``mask``.

    Args:
        mask (numpy.ndarray): 2D boolean array.
        resolution (float): Meters per cell. Axis steps cost ``resolution``
            and diagonal steps ``sqrt(2) * resolution``.

    Returns:
        tuple: ``(graph, index)`` where ``graph`` is a ``scipy.sparse``
            CSR matrix and ``index`` maps each cell of the grid to its node
            number (-1 for cells outside ``mask``).
    """
    mask = np.asarray(mask, dtype=bool)
    index = np.full(mask.shape, -1, dtype=np.int64)
    cells = np.argwhere(mask)
    index[mask] = np.arange(len(cells))
    rows, cols, weights = [], [], []
    height, width = mask.shape
    for d_row, d_col in NEIGHBOR_OFFSETS:
        cost = resolution * (math.sqrt(2.0) if d_row and d_col else 1.0)
        nbr_r = cells[:, 0] + d_row
        nbr_c = cells[:, 1] + d_col
        inside = (nbr_r >= 0) & (nbr_r < height) & (nbr_c >= 0) & (nbr_c < width)
        src = np.nonzero(inside)[0]
        dst = index[nbr_r[inside], nbr_c[inside]]
        keep = dst >= 0
        rows.append(src[keep])
        cols.append(dst[keep])
        weights.append(np.full(keep.sum(), cost))
    size = len(cells)
    graph = sparse.csr_matrix(
        (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size))
    return graph, index
