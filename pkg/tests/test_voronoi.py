import unittest

import numpy as np
from scipy import ndimage

from voronav import scenegen, voronoi
from voronav.exceptions import EmptyFreeSpace
from voronav.semantic_map import FreeMask

EIGHT = np.ones((3, 3), dtype=bool)


def brute_force_esdf(mask, resolution):
    blocked = np.argwhere(~mask)
    values = np.zeros(mask.shape)
    for row, col in np.argwhere(mask):
        values[row, col] = np.hypot(*(blocked - (row, col)).T).min() * resolution
    return values


class TestESDF(unittest.TestCase):
    def test_matches_brute_force(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            shape = tuple(rng.integers(3, 16, size=2))
            mask = rng.random(shape) < 0.8
            if mask.all() or not mask.any():
                continue
            field = voronoi.esdf(FreeMask(mask, 0.05, (0.0, 0.0)))
            np.testing.assert_allclose(field.values, brute_force_esdf(mask, 0.05))

    def test_corridor(self):
        mask = np.zeros((7, 20), dtype=bool)
        mask[1:6, :] = True
        field = voronoi.esdf(FreeMask(mask, 0.1, (0.0, 0.0)))
        self.assertAlmostEqual(field.at((3, 10)), 0.3)
        self.assertAlmostEqual(field.at((1, 10)), 0.1)
        self.assertEqual(field.at((0, 10)), 0.0)

    def test_all_free(self):
        field = voronoi.esdf(FreeMask(np.ones((5, 5), dtype=bool), 0.1, (0.0, 0.0)))
        self.assertTrue(np.isinf(field.values).all())

    def test_empty(self):
        with self.assertRaises(EmptyFreeSpace):
            voronoi.esdf(FreeMask(np.zeros((5, 5), dtype=bool), 0.1, (0.0, 0.0)))


class TestSkeletonize(unittest.TestCase):
    def test_corridor_centerline(self):
        mask = np.zeros((9, 24), dtype=bool)
        mask[2:7, 1:23] = True
        skeleton = voronoi.skeletonize(FreeMask(mask, 0.1, (0.5, 0.5)))
        self.assertTrue(skeleton.mask[4, 5:19].all())
        self.assertFalse(skeleton.mask[2].any())
        self.assertFalse((skeleton.mask & ~mask).any())
        _, count = ndimage.label(skeleton.mask, structure=np.ones((3, 3)))
        self.assertEqual(count, 1)
        self.assertEqual(skeleton.origin, (0.5, 0.5))

    def test_loop_around_pillar(self):
        mask = np.zeros((20, 20), dtype=bool)
        mask[2:18, 2:18] = True
        mask[8:12, 8:12] = False
        skeleton = voronoi.skeletonize(FreeMask(mask, 0.1, (0.0, 0.0))).mask
        self.assertFalse(skeleton[8:12, 8:12].any())
        self.assertTrue(skeleton[2:8, 10].any())
        self.assertTrue(skeleton[12:18, 10].any())
        self.assertTrue(skeleton[10, 2:8].any())
        self.assertTrue(skeleton[10, 12:18].any())

    def test_empty(self):
        with self.assertRaises(EmptyFreeSpace):
            voronoi.skeletonize(FreeMask(np.zeros((5, 5), dtype=bool), 0.1, (0.0, 0.0)))


def generated_scenes():
    for seed in range(10):
        yield scenegen.generate_scene(seed, 'maze', size=4.0, resolution=0.1)
        yield scenegen.generate_scene(seed, 'apartment', size=5.5, resolution=0.1)


class TestGeneratedScenes(unittest.TestCase):
    def test_skeleton_is_equidistant(self):
        """Most skeleton cells have two boundary cells at the minimum distance, up to one diagonal."""
        for scene in generated_scenes():
            with self.subTest(scene=scene.name):
                free = ~scene.solid
                boundary = np.argwhere(~free & ndimage.binary_dilation(free, structure=EIGHT))
                cells = np.argwhere(voronoi.skeletonize(FreeMask(free, scene.resolution, (0.0, 0.0))).mask)
                equidistant = 0
                for cell in cells:
                    distances = np.hypot(*(boundary - cell).T)
                    if (distances <= distances.min() + np.sqrt(2) + 1e-9).sum() >= 2:
                        equidistant += 1
                self.assertGreaterEqual(equidistant, 0.9 * len(cells))

    def test_skeleton_keeps_components(self):
        for scene in generated_scenes():
            with self.subTest(scene=scene.name):
                free = ~scene.solid
                skeleton = voronoi.skeletonize(FreeMask(free, scene.resolution, (0.0, 0.0))).mask
                _, free_count = ndimage.label(free, structure=EIGHT)
                _, skeleton_count = ndimage.label(skeleton, structure=EIGHT)
                self.assertEqual(skeleton_count, free_count)


if __name__ == '__main__':
    unittest.main()
