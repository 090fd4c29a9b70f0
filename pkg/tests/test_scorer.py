import os
import unittest
from unittest import mock

import requests

from voronav import describe, scorer
from voronav import constants as cn
from voronav.describe import NeighborContext, PathObject
from voronav.exceptions import ParseError, RemoteError, ScoreParseError, ValidationError


def decision_prompt():
    contexts = [
        NeighborContext(1, path_description='This direction leads past: sofa.'),
        NeighborContext(2, farsight_description='a view containing bed'),
        NeighborContext(5),
    ]
    return describe.render_decision_prompt('tv', contexts)


def path_prompt():
    sofa = PathObject(category=1, name='sofa', location=(0.6, -0.5), arc_length=0.6, key=0)
    bed = PathObject(category=2, name='bed', location=(1.3, 0.9), arc_length=1.3, key=1)
    return describe.render_path_prompt({1: [], 3: [sofa, bed]}, 'tv')


class GarbageBackend(scorer.BaseScorer):
    kind = 'garbage'

    def reply_summaries(self, prompt, n):
        return 'I am not sure.'

    def reply_scores(self, prompt, n):
        return 'I am not sure.'


class TestRelatedness(unittest.TestCase):
    def test_symmetric(self):
        self.assertEqual(scorer.relatedness('tv', 'sofa'), 0.8)
        self.assertEqual(scorer.relatedness('sofa', 'tv'), 0.8)

    def test_identity_and_default(self):
        self.assertEqual(scorer.relatedness('bed', 'bed'), 0.99)
        self.assertEqual(scorer.relatedness('bed', 'spaceship'), 0.3)

    def test_clamp(self):
        self.assertEqual(scorer.clamp(0.0), scorer.SCORE_MIN)
        self.assertEqual(scorer.clamp(2.0), scorer.SCORE_MAX)
        self.assertEqual(scorer.clamp(0.4), 0.4)


class TestMockScorer(unittest.TestCase):
    def test_scores_from_mentions(self):
        reply = scorer.score_neighbors(decision_prompt(), 3, scorer.MockScorer())
        self.assertEqual(reply.values, [0.8, 0.3, 0.5])
        self.assertFalse(reply.fallback)
        self.assertEqual(len(reply.exchanges), 1)
        exchange, = reply.exchanges
        self.assertEqual(exchange[cn.EXCHANGE_KEYS.PROMPT], decision_prompt())
        self.assertTrue(exchange[cn.EXCHANGE_KEYS.RESPONSE].startswith('scores: ['))

    def test_pure_function_of_prompt(self):
        backend = scorer.MockScorer()
        prompt = decision_prompt()
        self.assertEqual(backend.reply_scores(prompt, 3), backend.reply_scores(prompt, 3))

    def test_summaries(self):
        reply = scorer.summarize_paths(path_prompt(), scorer.MockScorer())
        expected = ['This direction has no observed objects.', 'This direction leads past: sofa, bed.']
        self.assertEqual(reply.values, expected)
        self.assertFalse(reply.fallback)

    def test_mentions(self):
        backend = scorer.MockScorer()
        self.assertEqual(backend.mentions('a bed next to a sofabed and a tv'), ['bed', 'tv'])

    def test_custom_table(self):
        table = {'identity': 0.99, 'default': 0.1, 'pairs': {}, 'vocabulary': ['sofa', 'bed']}
        reply = scorer.score_neighbors(decision_prompt(), 3, scorer.MockScorer(table))
        self.assertEqual(reply.values, [0.1, 0.1, 0.5])


class TestParsing(unittest.TestCase):
    def test_parse_scores(self):
        self.assertEqual(scorer.parse_scores('Sure!\nscores: [0.2, 0.7]', 2), [0.2, 0.7])
        self.assertEqual(scorer.parse_scores('SCORES: [1]', 1), [1.0])

    def test_parse_scores_fail(self):
        for text in ('scores: [0.2]', 'scores: [0.2, high]', 'no scores here', None, 'scores: [nan, 0.1]'):
            with self.subTest(text=text):
                with self.assertRaises(ScoreParseError):
                    scorer.parse_scores(text, 2)

    def test_score_parse_error_is_parse_error(self):
        self.assertTrue(issubclass(ScoreParseError, ParseError))

    def test_parse_summaries(self):
        text = 'Waypoint 2: kitchen things\nWaypoint 1: bedroom things\nWaypoint 1: ignored'
        self.assertEqual(scorer.parse_summaries(text, 2), ['bedroom things', 'kitchen things'])
        with self.assertRaises(ParseError):
            scorer.parse_summaries('Waypoint 1: fine', 2)

    def test_count_waypoints(self):
        self.assertEqual(scorer.count_waypoints(path_prompt()), 2)
        self.assertEqual(scorer.count_waypoints(decision_prompt()), 3)


class TestScoreNeighbors(unittest.TestCase):
    def test_values_clamped(self):
        backend = mock.Mock(spec=scorer.BaseScorer)
        backend.reply_scores.return_value = 'scores: [0, 1.5]'
        reply = scorer.score_neighbors('prompt', 2, backend)
        self.assertEqual(reply.values, [0.01, 0.99])
        self.assertFalse(reply.fallback)

    def test_retry_then_succeed(self):
        backend = mock.Mock(spec=scorer.BaseScorer)
        backend.reply_scores.side_effect = ['hmm', 'scores: [0.4, 0.6]']
        reply = scorer.score_neighbors('prompt', 2, backend)
        self.assertEqual(reply.values, [0.4, 0.6])
        self.assertFalse(reply.fallback)
        self.assertEqual(len(reply.exchanges), 2)
        retry_prompt = reply.exchanges[1][cn.EXCHANGE_KEYS.PROMPT]
        self.assertTrue(retry_prompt.startswith('prompt\n'))
        self.assertIn('exactly 2 numbers', retry_prompt)

    def test_fallback_after_two_failures(self):
        prompt = decision_prompt()
        with self.assertLogs('voronav.scorer', level='WARNING'):
            reply = scorer.score_neighbors(prompt, 3, GarbageBackend())
        self.assertTrue(reply.fallback)
        self.assertEqual(len(reply.exchanges), 2)
        self.assertEqual(reply.values, [0.8, 0.3, 0.5])

    def test_fallback_keeps_backend_table(self):
        table = {'identity': 0.99, 'default': 0.1, 'pairs': {}, 'vocabulary': ['sofa', 'bed']}

        class Mumbling(scorer.MockScorer):
            def reply_scores(self, prompt, n):
                return 'I am not sure.'

        with self.assertLogs('voronav.scorer', level='WARNING'):
            reply = scorer.score_neighbors(decision_prompt(), 3, Mumbling(table))
        self.assertTrue(reply.fallback)
        self.assertEqual(reply.values, [0.1, 0.1, 0.5])

    def test_summaries_fallback(self):
        reply = scorer.summarize_paths(path_prompt(), GarbageBackend())
        self.assertTrue(reply.fallback)
        self.assertEqual(len(reply.exchanges), 1)
        self.assertEqual(len(reply.values), 2)

    def test_bad_arguments(self):
        with self.assertRaises(ValueError):
            scorer.score_neighbors('prompt', 0, scorer.MockScorer())
        with self.assertRaises(ValueError):
            scorer.summarize_paths('', scorer.MockScorer())


class TestRemoteScorer(unittest.TestCase):
    def setUp(self):
        self.backend = scorer.RemoteScorer('http://localhost:8000/v1/chat/completions', 'test-model',
                                           token='secret', max_retries=1, max_in_flight=1)

    def test_reply(self):
        with mock.patch('voronav.api.chat_completion', return_value='scores: [0.2, 0.7]') as mock_chat:
            reply = scorer.score_neighbors('prompt', 2, self.backend)
        self.assertEqual(reply.values, [0.2, 0.7])
        self.assertFalse(reply.fallback)
        args, kwargs = mock_chat.call_args
        self.assertEqual(args, ('http://localhost:8000/v1/chat/completions', 'test-model',
                                [{'role': 'user', 'content': 'prompt'}]))
        self.assertEqual(kwargs['token'], 'secret')

    def test_retries_then_raises(self):
        with mock.patch('voronav.api.chat_completion', side_effect=requests.ConnectionError('down')) as mock_chat:
            with self.assertRaises(RemoteError):
                self.backend.reply_scores('prompt', 2)
        self.assertEqual(mock_chat.call_count, 2)

    def test_transport_failure_falls_back(self):
        prompt = decision_prompt()
        with mock.patch('voronav.api.chat_completion', side_effect=requests.ConnectionError('down')):
            reply = scorer.score_neighbors(prompt, 3, self.backend)
        self.assertTrue(reply.fallback)
        self.assertEqual(reply.exchanges, [])
        self.assertEqual(reply.values, [0.8, 0.3, 0.5])

    def test_malformed_body_is_a_failure(self):
        with mock.patch('voronav.api.chat_completion', side_effect=KeyError('choices')):
            reply = scorer.summarize_paths(path_prompt(), self.backend)
        self.assertTrue(reply.fallback)

    def test_invalid_timeout(self):
        with self.assertRaises(ValidationError):
            scorer.RemoteScorer('http://localhost', 'm', timeout=0)


class TestMakeBackend(unittest.TestCase):
    def test_default_is_mock(self):
        self.assertIsInstance(scorer.make_backend(), scorer.MockScorer)

    def test_remote(self):
        config = scorer.BackendConfig(kind='remote', url='https://example.org/v1', model='m')
        backend = scorer.make_backend(config)
        self.assertIsInstance(backend, scorer.RemoteScorer)
        self.assertEqual(backend.kind, 'remote')

    def test_remote_needs_url_and_model(self):
        with self.assertRaisesRegex(ValidationError, 'VORONAV_LLM_URL'):
            scorer.make_backend(scorer.BackendConfig(kind='remote'))
        with self.assertRaises(ValidationError):
            scorer.make_backend(scorer.BackendConfig(kind='remote', url='not a url', model='m'))
        with self.assertRaisesRegex(ValidationError, 'VORONAV_LLM_MODEL'):
            scorer.make_backend(scorer.BackendConfig(kind='remote', url='https://example.org/v1'))

    def test_config_validation(self):
        with self.assertRaises(ValidationError):
            scorer.BackendConfig(kind='oracle')
        with self.assertRaises(ValidationError):
            scorer.BackendConfig(timeout=-1)

    @mock.patch.dict(os.environ, {'VORONAV_LLM_URL': 'https://example.org/v1', 'VORONAV_LLM_MODEL': 'm',
                                  'VORONAV_LLM_KEY': 'k'})
    def test_from_env(self):
        config = scorer.BackendConfig.from_env(kind='remote')
        self.assertEqual((config.url, config.model, config.token), ('https://example.org/v1', 'm', 'k'))


if __name__ == '__main__':
    unittest.main()
