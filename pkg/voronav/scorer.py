"""Language-model scorers: path summaries and semantic scores per neighbor.

Two backends implement :class:`BaseScorer`: :class:`MockScorer`, a pure
function of the prompt driven by the co-occurrence table, and
:class:`RemoteScorer`, a chat-completion client. Remote failures never abort
an episode; the mock answer is used instead and the reply is flagged.
"""

import abc
import logging
import math
import re
import threading
import typing
from dataclasses import dataclass

from . import api
from . import config as cf
from . import constants as cn
from . import loading
from .exceptions import ParseError, RemoteError, ScoreParseError, ValidationError


_logger = logging.getLogger(__name__)

SCORE_MIN = 0.01
SCORE_MAX = 0.99
NO_MENTION_SCORE = 0.5

_SCORES = re.compile(r'scores:\s*\[([^\]]*)\]', re.IGNORECASE)
_WAYPOINT_LINE = re.compile(r'^\s*Waypoint (\d+):\s*(.*?)\s*$')
_DESCRIPTION_LINE = re.compile(r'^[A-Z][a-z]+ description: (.*)$')
_TARGET = re.compile(r'searching for an? (.+?)\.')
_OBJECT_ITEM = re.compile(r'(?:^|, )([^,()]+?) at \(')


def relatedness(target, obj, table=None):
    """Symmetric co-occurrence value of two categories, in [0, 1].

    Identical categories give the table's identity value and unknown pairs
    its default.
    """
    table = table or loading.load_relatedness_table()
    if target == obj:
        return table['identity']
    pairs = table['pairs']
    if obj in pairs.get(target, {}):
        return pairs[target][obj]
    if target in pairs.get(obj, {}):
        return pairs[obj][target]
    return table['default']


def clamp(value):
    return min(SCORE_MAX, max(SCORE_MIN, value))


class ScorerReply(typing.NamedTuple):
    """Parsed values plus every (prompt, response) exchange behind them."""
    values: list
    fallback: bool
    exchanges: list


class BaseScorer(abc.ABC):
    """Interface every scorer backend implements.

    Implementations must be safe to call from several episode workers at once.
    """
    kind = None

    @abc.abstractmethod
    def reply_summaries(self, prompt, n):
        """Return raw reply text holding one ``Waypoint i: <summary>`` line per neighbor."""

    @abc.abstractmethod
    def reply_scores(self, prompt, n):
        """Return raw reply text holding a ``scores: [...]`` line with ``n`` numbers."""


class MockScorer(BaseScorer):
    """Deterministic offline scorer.

    Summaries list the categories named in each waypoint block; scores are
    the highest relatedness between the target and any category mentioned
    for a neighbor, or 0.5 when nothing is mentioned.

    Args:
        table (dict or None): Co-occurrence table; the bundled one when None.
    """
    kind = cn.BACKENDS.MOCK

    def __init__(self, table=None):
        self.table = table or loading.load_relatedness_table()

    @classmethod
    def from_file(cls, path):
        return cls(loading.load_file(path))

    def reply_summaries(self, prompt, n):
        blocks = {}
        for line in prompt.splitlines():
            match = _WAYPOINT_LINE.match(line)
            if match:
                blocks[int(match.group(1))] = match.group(2)
        lines = []
        for index in range(1, n + 1):
            listed = blocks.get(index, '').rsplit(': ', 1)[-1]
            names = list(dict.fromkeys(name.strip() for name in _OBJECT_ITEM.findall(listed)))
            if names:
                summary = loading.load_template('summary_objects').format(categories=', '.join(names))
            else:
                summary = loading.load_template('summary_empty')
            lines.append(f'Waypoint {index}: {summary}')
        return '\n'.join(lines)

    def mentions(self, text):
        """Vocabulary categories named in ``text``, in vocabulary order."""
        return [word for word in sorted(self.table['vocabulary'])
                if re.search(rf'\b{re.escape(word)}\b', text)]

    def reply_scores(self, prompt, n):
        match = _TARGET.search(prompt)
        target = match.group(1) if match else ''
        blocks = {}
        current = None
        for line in prompt.splitlines():
            header = _WAYPOINT_LINE.match(line)
            if header and not header.group(2):
                current = int(header.group(1))
                blocks[current] = []
                continue
            description = _DESCRIPTION_LINE.match(line)
            if description and current is not None:
                blocks[current].append(description.group(1))
        scores = []
        for index in range(1, n + 1):
            mentioned = self.mentions(' '.join(blocks.get(index, [])))
            if mentioned:
                score = clamp(max(relatedness(target, name, self.table) for name in mentioned))
            else:
                score = NO_MENTION_SCORE
            scores.append(score)
        return 'scores: [' + ', '.join(repr(float(s)) for s in scores) + ']'


class RemoteScorer(BaseScorer):
    """Chat-completion client.

    Args:
        url (str): Endpoint URL.
        model (str): Model name.
        token (str or None): Bearer token.
        timeout (float): Seconds per request.
        max_retries (int): Extra attempts after a failed request.
        max_in_flight (int or None): Concurrent request limit shared by all
            callers of this instance; ``config.remote_max_in_flight`` when None.
    """
    kind = cn.BACKENDS.REMOTE

    def __init__(self, url, model, token=None, timeout=30.0, max_retries=2, max_in_flight=None):
        if not timeout > 0:
            raise ValidationError(f'timeout must be > 0, got {timeout!r}')
        self.url = url
        self.model = model
        self.token = token
        self.timeout = timeout
        self.max_retries = max_retries
        self._in_flight = threading.BoundedSemaphore(max_in_flight or cf.remote_max_in_flight)

    def _chat(self, prompt):
        import requests
        messages = [{'role': 'user', 'content': prompt}]
        error = None
        for attempt in range(self.max_retries + 1):
            try:
                with self._in_flight:
                    return api.chat_completion(self.url, self.model, messages,
                                               token=self.token, timeout=self.timeout)
            except (requests.RequestException, KeyError, IndexError, TypeError, ValueError) as err:
                error = err
                _logger.warning('remote scorer request failed',
                                extra={'event': 'remote_call', 'attempt': attempt + 1, 'error': repr(err)})
        raise RemoteError(f'remote scorer failed after {self.max_retries + 1} attempts: {error!r}')

    def reply_summaries(self, prompt, n):
        return self._chat(prompt)

    def reply_scores(self, prompt, n):
        return self._chat(prompt)


@dataclass(frozen=True)
class BackendConfig:
    """Which scorer to build and how to reach a remote one."""
    kind: str = cn.BACKENDS.MOCK
    url: typing.Optional[str] = None
    model: typing.Optional[str] = None
    token: typing.Optional[str] = None
    timeout: float = 30.0
    max_retries: int = 2
    max_in_flight: typing.Optional[int] = None

    def __post_init__(self):
        if self.kind not in (cn.BACKENDS.MOCK, cn.BACKENDS.REMOTE):
            raise ValidationError(f'unknown backend {self.kind!r}')
        if not self.timeout > 0:
            raise ValidationError(f'timeout must be > 0, got {self.timeout!r}')

    @classmethod
    def from_env(cls, kind=cn.BACKENDS.MOCK, **kwargs):
        url, token, model = cf.llm_settings()
        return cls(kind=kind, url=url, token=token, model=model, **kwargs)


def make_backend(config=None):
    """Build the scorer described by ``config``.

    Raises:
        ValidationError: If a remote backend lacks a valid URL or model name.
    """
    config = config or BackendConfig()
    if config.kind == cn.BACKENDS.MOCK:
        return MockScorer()
    if not config.url or not api.validate_url(config.url):
        raise ValidationError(f'remote scorer needs a valid URL (set {cf.LLM_URL_ENV})')
    if not config.model:
        raise ValidationError(f'remote scorer needs a model name (set {cf.LLM_MODEL_ENV})')
    return RemoteScorer(config.url, config.model, token=config.token, timeout=config.timeout,
                        max_retries=config.max_retries, max_in_flight=config.max_in_flight)


def count_waypoints(prompt):
    return len({int(m.group(1)) for m in map(_WAYPOINT_LINE.match, prompt.splitlines()) if m})


def parse_summaries(text, n):
    """Split a reply into ``n`` summaries.

    Raises:
        ParseError: If a ``Waypoint i:`` line is missing or empty.
    """
    found = {}
    for line in text.splitlines():
        match = _WAYPOINT_LINE.match(line)
        if match and match.group(2):
            found.setdefault(int(match.group(1)), match.group(2))
    missing = [i for i in range(1, n + 1) if i not in found]
    if missing:
        raise ParseError(f'reply has no summary for waypoints {missing}')
    return [found[i] for i in range(1, n + 1)]


def parse_scores(text, n):
    """Read the ``scores: [...]`` line of a reply.

    Raises:
        ScoreParseError: If the line is missing, holds a non-number or holds
            other than ``n`` values.
    """
    match = _SCORES.search(text or '')
    if not match:
        raise ScoreParseError('reply has no scores line')
    try:
        values = [float(item) for item in match.group(1).split(',') if item.strip()]
    except ValueError as err:
        raise ScoreParseError(f'non-numeric score in {match.group(0)!r}') from err
    if len(values) != n or not all(math.isfinite(v) for v in values):
        raise ScoreParseError(f'expected {n} finite scores, got {match.group(0)!r}')
    return values


def _fallback_warning(kind, err):
    _logger.warning('scorer fell back to the mock', extra={'event': 'scorer_fallback',
                                                          'request': kind, 'error': repr(err)})


def _fallback_scorer(backend):
    """The mock that stands in for ``backend``, sharing its table if it has one."""
    table = getattr(backend, 'table', None)
    return MockScorer(table if isinstance(table, dict) else None)


def summarize_paths(prompt, backend, n=None):
    """One summary per neighbor for a path prompt.

    Returns:
        ScorerReply: ``values`` holds the ``n`` summaries.
    """
    if not prompt:
        raise ValueError('prompt is empty')
    n = n or count_waypoints(prompt)
    exchanges = []
    try:
        text = backend.reply_summaries(prompt, n)
        exchanges.append({cn.EXCHANGE_KEYS.PROMPT: prompt, cn.EXCHANGE_KEYS.RESPONSE: text})
        return ScorerReply(parse_summaries(text, n), False, exchanges)
    except (RemoteError, ParseError) as err:
        _fallback_warning('summaries', err)
    text = _fallback_scorer(backend).reply_summaries(prompt, n)
    return ScorerReply(parse_summaries(text, n), True, exchanges)


def score_neighbors(prompt, n, backend):
    """Semantic score per neighbor, clamped to [0.01, 0.99].

    A reply without a usable ``scores`` line is retried once with a reminder;
    a second failure or a transport error falls back to the mock scores.

    Returns:
        ScorerReply: ``values`` holds ``n`` floats.
    """
    if n < 1:
        raise ValueError('n must be >= 1')
    exchanges = []
    try:
        text = backend.reply_scores(prompt, n)
        exchanges.append({cn.EXCHANGE_KEYS.PROMPT: prompt, cn.EXCHANGE_KEYS.RESPONSE: text})
        try:
            values = parse_scores(text, n)
        except ScoreParseError:
            retry = prompt + '\n' + loading.load_template('score_reminder').format(count=n)
            text = backend.reply_scores(retry, n)
            exchanges.append({cn.EXCHANGE_KEYS.PROMPT: retry, cn.EXCHANGE_KEYS.RESPONSE: text})
            values = parse_scores(text, n)
        return ScorerReply([clamp(v) for v in values], False, exchanges)
    except (RemoteError, ScoreParseError) as err:
        _fallback_warning('scores', err)
    values = parse_scores(_fallback_scorer(backend).reply_scores(prompt, n), n)
    return ScorerReply([clamp(v) for v in values], True, exchanges)
