import os
from typing import Iterable, Sequence

import numpy as np

from giantatom.util import FLOAT_FORMAT


def format_field(value) -> str:
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % float(value)
    if hasattr(value, 'value'):
        return str(value.value)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence], config_sha256: str) -> str:
    """
    Writes a CSV whose first line is a comment carrying the config checksum.
    The table goes to a temporary file first and replaces the target when complete.

    :param path: Target file.
    :param header: Column names.
    :param rows: Row values; floats are printed with 17 significant digits.
    :param config_sha256: Hex digest of the canonical config.
    :return: The path written.
    """
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    tmp = path + '.tmp'
    try:
        with open(tmp, 'w', newline='\n') as d:
            d.write(f'# config_sha256={config_sha256}\n')
            d.write(','.join(header) + '\n')
            for row in rows:
                d.write(','.join(format_field(v) for v in row) + '\n')
    except Exception:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
    os.replace(tmp, path)
    return path


def read_rows(path: str):
    """Data rows of a file written by write_csv, as lists of strings."""
    with open(path) as d:
        lines = [line.rstrip('\n') for line in d if not line.startswith('#')]
    return [line.split(',') for line in lines[1:]]
