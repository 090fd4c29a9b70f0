import os
import tempfile
import unittest

import numpy as np
from PIL import Image

from voronav import gridworld
from voronav.exceptions import OutOfBounds
from voronav.gridworld import Observation, Pose
from voronav.semantic_map import (SemanticMap, dump_layers, frontier_cells, integrate,
                                  object_instances, unoccupied_mask)

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


class TestSemanticMap(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.scene = gridworld.load_scene(os.path.join(FIXTURES, 'open_room.json'))
        super().setUpClass()

    def test_for_scene(self):
        semantic_map = SemanticMap.for_scene(self.scene)
        self.assertEqual(semantic_map.shape, (34, 34))
        self.assertEqual(semantic_map.num_categories, 2)
        self.assertEqual(semantic_map.offset, (2, 2))
        self.assertEqual(semantic_map.labels, {1: 'tv', 2: 'bed'})
        self.assertFalse(semantic_map.explored.any())

    def test_integrate(self):
        semantic_map = SemanticMap.for_scene(self.scene)
        state = gridworld.initial_state(self.scene)
        obs = gridworld.observe(state, self.scene)
        integrate(semantic_map, obs, state.pose)
        self.assertEqual(int(semantic_map.explored.sum()), len(obs))
        self.assertEqual(semantic_map.version, 1)
        self.assertTrue(semantic_map.explored[17, 7])
        self.assertTrue(semantic_map.category_mask(1)[16, 27])
        self.assertTrue(semantic_map.obstacle[16, 27])
        self.assertFalse(semantic_map.obstacle[17, 10])
        self.assertAlmostEqual(semantic_map.explored_area, len(obs) * 0.01)

        integrate(semantic_map, obs, state.pose)
        self.assertEqual(semantic_map.version, 1)

    def test_integrate_never_clears(self):
        semantic_map = SemanticMap.for_scene(self.scene)
        semantic_map.obstacle[20, 20] = True
        obs = Observation(rows=np.array([18]), cols=np.array([18]), labels=np.array([0]),
                          sector_heading=0.0, agent_cell=(15, 5))
        integrate(semantic_map, obs, Pose(0.5, 1.5, 0.0))
        self.assertTrue(semantic_map.obstacle[20, 20])
        self.assertTrue(semantic_map.explored[20, 20])

    def test_integrate_out_of_bounds(self):
        semantic_map = SemanticMap.for_scene(self.scene)
        obs = Observation(rows=np.array([100]), cols=np.array([0]), labels=np.array([0]),
                          sector_heading=0.0, agent_cell=(15, 5))
        with self.assertRaises(OutOfBounds):
            integrate(semantic_map, obs, Pose(0.5, 1.5, 0.0))
        self.assertEqual(semantic_map.version, 0)

    def test_snapshot_is_independent(self):
        semantic_map = SemanticMap.for_scene(self.scene)
        copy = semantic_map.snapshot()
        semantic_map.explored[5, 5] = True
        self.assertFalse(copy.explored[5, 5])


class TestFrontier(unittest.TestCase):
    def test_frontier_ring(self):
        semantic_map = SemanticMap.empty(10, 1, 0.1)
        semantic_map.explored[2:7, 2:7] = True
        frontier = frontier_cells(semantic_map)
        self.assertEqual(int(frontier.sum()), 16)
        self.assertFalse(frontier[4, 4])
        self.assertTrue(frontier[2, 2])

    def test_obstacles_are_not_frontier(self):
        semantic_map = SemanticMap.empty(10, 1, 0.1)
        semantic_map.explored[2:7, 2:7] = True
        semantic_map.obstacle[2, 2:7] = True
        frontier = frontier_cells(semantic_map)
        self.assertFalse(frontier[2, 4])
        self.assertEqual(int(frontier.sum()), 11)


class TestUnoccupiedMask(unittest.TestCase):
    def test_small_pockets_fill(self):
        semantic_map = SemanticMap.empty(16, 1, 0.1)
        semantic_map.explored[:] = True
        semantic_map.explored[2:4, 2:4] = False
        semantic_map.explored[8:12, 8:12] = False
        free = unoccupied_mask(semantic_map).free
        self.assertTrue(free[2, 2])
        self.assertFalse(free[9, 9])
        self.assertTrue(free[0, 0])

    def test_obstacles_stay_occupied(self):
        semantic_map = SemanticMap.empty(12, 1, 0.1)
        semantic_map.explored[:] = True
        semantic_map.obstacle[5, 5] = True
        free = unoccupied_mask(semantic_map).free
        self.assertFalse(free[5, 5])
        self.assertEqual(int(free.sum()), 143)

    def test_unexplored_stays_unknown(self):
        semantic_map = SemanticMap.empty(12, 1, 0.1)
        semantic_map.explored[:, :6] = True
        free = unoccupied_mask(semantic_map).free
        self.assertFalse(free[:, 7:].any())


class TestObjectInstances(unittest.TestCase):
    def test_components(self):
        semantic_map = SemanticMap.empty(10, 1, 0.1)
        semantic_map.categories[0, 1, 1:3] = True
        semantic_map.categories[0, 6, 6] = True
        instances = object_instances(semantic_map, 1)
        self.assertEqual(len(instances), 2)
        first, second = instances
        self.assertEqual(first.key, 11)
        self.assertEqual(first.size, 2)
        self.assertAlmostEqual(first.centroid[0], 0.15)
        self.assertAlmostEqual(first.centroid[1], 0.1)
        self.assertEqual(second.size, 1)
        self.assertAlmostEqual(second.centroid[0], 0.6)

    def test_diagonal_cells_join(self):
        semantic_map = SemanticMap.empty(10, 1, 0.1)
        semantic_map.categories[0, 3, 3] = True
        semantic_map.categories[0, 4, 4] = True
        self.assertEqual(len(object_instances(semantic_map, 1)), 1)

    def test_empty(self):
        self.assertEqual(object_instances(SemanticMap.empty(10, 1, 0.1), 1), [])


class TestDumpLayers(unittest.TestCase):
    def test_dump_layers(self):
        semantic_map = SemanticMap.empty(10, 1, 0.1, labels={1: 'tv'})
        semantic_map.explored[2:5, 2:5] = True
        with tempfile.TemporaryDirectory() as tmpdir:
            paths = dump_layers(semantic_map, tmpdir)
            names = sorted(os.path.basename(path) for path in paths)
            self.assertEqual(names, ['category_tv.pgm', 'explored.pgm', 'obstacle.pgm'])
            with Image.open(os.path.join(tmpdir, 'explored.pgm')) as image:
                layer = np.array(image)
        self.assertEqual(layer.shape, (10, 10))
        self.assertEqual(int((layer == 255).sum()), 9)


if __name__ == '__main__':
    unittest.main()
