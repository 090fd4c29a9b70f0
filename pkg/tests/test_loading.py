import json
import os
import tempfile
import unittest

from voronav import loading
from voronav.exceptions import ParseError


class TestLoadFile(unittest.TestCase):
    def test_load_file_json(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, 'config.json')
            with open(path, 'w') as f:
                json.dump({'max_steps': 10}, f)
            actual = loading.load_file(path)
        expected = {'max_steps': 10}
        self.assertEqual(actual, expected)

    def test_load_file_toml(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, 'config.toml')
            with open(path, 'w') as f:
                f.write('max_steps = 10\n\n[rvg]\nmerge_radius = 0.3\n')
            actual = loading.load_file(path)
        expected = {'max_steps': 10, 'rvg': {'merge_radius': 0.3}}
        self.assertEqual(actual, expected)

    def test_load_file_fail(self):
        with self.assertRaisesRegex(ParseError, 'unknown file type'):
            loading.load_file('foo.yaml')
        with self.assertRaisesRegex(ParseError, 'cannot read'):
            loading.load_file('/no/such/dir/scene.json')
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, 'broken.json')
            with open(path, 'w') as f:
                f.write('{"grid": [')
            with self.assertRaisesRegex(ParseError, 'cannot parse'):
                loading.load_file(path)
            path = os.path.join(tmpdir, 'broken.toml')
            with open(path, 'w') as f:
                f.write('max_steps = = 3\n')
            with self.assertRaisesRegex(ParseError, 'cannot parse'):
                loading.load_file(path)


class TestAssets(unittest.TestCase):
    def test_load_template(self):
        actual = loading.load_template('path_empty')
        expected = 'Waypoint {index}: No objects have been observed along this path.'
        self.assertEqual(actual, expected)

    def test_load_template_custom_directory(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            with open(os.path.join(tmpdir, 'greeting.txt'), 'w') as f:
                f.write('hello {name}\n\n')
            actual = loading.load_template('greeting', tmpdir)
        self.assertEqual(actual, 'hello {name}')

    def test_relatedness_table(self):
        table = loading.load_relatedness_table()
        self.assertEqual(len(table['vocabulary']), 15)
        self.assertEqual(table['identity'], 0.99)
        for names in table['rooms'].values():
            self.assertTrue(set(names) <= set(table['vocabulary']))
        self.assertEqual(set(table['footprints_m']), set(table['vocabulary']))


if __name__ == '__main__':
    unittest.main()
