"""Loading utilities."""

import functools
import json
import os
import sys

from . import constants as cn
from .exceptions import ParseError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def load_file(path):
    """Load a ``.json`` or ``.toml`` file and return the parsed object.

    Raises:
        ParseError: If ``path`` has an unknown extension, cannot be read, or
            does not parse.
    """
    extension = os.path.splitext(path)[-1].lower()
    if extension == '.json':
        loader = load_json
    elif extension == '.toml':
        loader = load_toml
    else:
        raise ParseError(f'unknown file type: {path}')
    try:
        return loader(path)
    except OSError as err:
        raise ParseError(f'cannot read {path}: {err}') from err
    except (ValueError, tomllib.TOMLDecodeError) as err:
        raise ParseError(f'cannot parse {path}: {err}') from err


def load_json(path):
    """Load and return a JSON document."""
    with open(path) as f:
        return json.load(f)


def load_toml(path):
    """Load and return a TOML document."""
    with open(path, 'rb') as f:
        return tomllib.load(f)


@functools.lru_cache(maxsize=None)
def load_template(name, directory=cn.TEMPLATES_DIR):
    """Return the text of prompt template ``name`` without its trailing newline."""
    with open(os.path.join(directory, f'{name}.txt')) as f:
        return f.read().rstrip('\n')


@functools.lru_cache(maxsize=None)
def load_relatedness_table(path=cn.RELATEDNESS_TABLE_PATH):
    """Return the frozen object co-occurrence table."""
    return load_file(path)
