"""Light wrappers around ``requests`` for chat-completion endpoints."""

import json

from . import config as cf


def post(*args, data, **kwargs):
    # requests is imported lazily so offline runs never touch it
    import requests
    return requests.post(*args, data=json.dumps(data, cls=cf.json_encoder), **kwargs)


def validate_url(url):
    """Return True if ``url`` has at least a scheme and a host."""
    from urllib3.util import parse_url
    try:
        parts = parse_url(url)
    except Exception:
        return False
    return bool(parts.scheme and parts.host)


def chat_completion(url, model, messages, *, token=None, timeout=30.0):
    """POST a chat-completion request and return the reply text.

    Args:
        url (str): Endpoint URL.
        model (str): Model name.
        messages (list of dict): ``{'role': ..., 'content': ...}`` messages.
        token (str or None): Bearer token.
        timeout (float): Seconds before the request is abandoned.

    Raises:
        requests.RequestException: On transport errors and non-2xx replies.
        KeyError, IndexError, ValueError: If the reply body is malformed.
    """
    headers = {'Content-Type': 'application/json'}
    if token:
        headers['Authorization'] = f'Bearer {token}'
    payload = {'model': model, 'messages': messages, 'temperature': 0}
    response = post(url, data=payload, headers=headers, timeout=timeout)
    response.raise_for_status()
    return response.json()['choices'][0]['message']['content']
