import json
import os
import unittest

import voronav.schemas as sc
from voronav import constants as cn

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


class TestSchemaObjects(unittest.TestCase):
    def test_nullable(self):
        schema = sc.String(nullable=True)
        schema.validate(None)
        schema.validate('x')
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.String().validate(None)

    def test_to_jsonschema(self):
        schema = sc.Array('cells', item_type=sc.Integer(additional_params=dict(minimum=0)))
        actual = schema.to_jsonschema()
        expected = {'type': 'array', 'description': 'cells', 'items': {'type': 'integer', 'minimum': 0}}
        self.assertEqual(actual, expected)

    def test_object_requires_something(self):
        with self.assertRaises(ValueError):
            sc.Object()

    def test_object_required_subset(self):
        schema = sc.Object(properties={'a': sc.Integer(), 'b': sc.Integer()}, required=['a'])
        schema.validate({'a': 1})
        with self.assertRaisesRegex(ValueError, 'must contain'):
            schema.validate({'b': 1})


class TestSchemas(unittest.TestCase):
    def test_scene(self):
        with open(os.path.join(FIXTURES, 'open_room.json')) as f:
            data = json.load(f)
        sc.scene.validate(data)
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.scene.validate({**data, 'extra': 1})
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.scene.validate({**data, 'resolution_m': 0})

    def test_planner_config(self):
        sc.planner_config.validate({})
        sc.planner_config.validate({'max_steps': 5, 'rvg': {'merge_radius': 0.2}})
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.planner_config.validate({'max_step': 5})
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.planner_config.validate({'rvg': {'radius': 0.2}})
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.planner_config.validate({'max_steps': 0})
        sc.planner_config.validate({'view_point_radius': None})
        sc.planner_config.validate({'view_point_radius': 1.0})
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.planner_config.validate({'view_point_radius': 0})

    def test_step_record(self):
        record = {'type': 'step', 'step': 1, 'pose': [0.5, 1.5, 0.0], 'action': 'MoveForward',
                  'collision': False}
        sc.step_record.validate(record)
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.step_record.validate({**record, 'pose': [0.5, 1.5]})
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.step_record.validate({**record, 'step': 0})

    def test_outcome_record(self):
        record = {'type': 'outcome', 'success': False, 'path_length': 0.0, 'optimal_length': 1.0,
                  'explored_area': 2.5, 'collisions': 0, 'forwards': 0, 'steps': 12,
                  'failure': cn.FAILURES.EXPLORATION}
        sc.outcome_record.validate(record)
        sc.outcome_record.validate({**record, 'success': True, 'failure': None})
        with self.assertRaisesRegex(ValueError, 'Schema validation failed'):
            sc.outcome_record.validate({**record, 'failure': 'boredom'})

    def test_record_schemas(self):
        self.assertEqual(set(sc.record_schemas), {'episode', 'step', 'decision', 'outcome'})


if __name__ == '__main__':
    unittest.main()
